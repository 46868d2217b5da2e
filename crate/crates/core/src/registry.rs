//! Name-keyed tables of the interchangeable pieces: merge rules, wire
//! codings, ready-set schedulers and exact oracles. The CLI resolves every
//! `--param`, `--encoding` and `--schedule` value here.

use crate::error::{Error, Result};
use crate::hd::{EdgeSearchRules, MergeRules, NodeSearchRules, ProcessNumberRules};
use crate::oracle::{EdgeSearchOracle, ExactOracle, NodeSearchOracle, PathwidthOracle, ProcessNumberOracle};
use crate::protocol::{CodingScheme, Fifo, Scheduler, SeededShuffle};

#[derive(Clone, Copy, Debug)]
pub struct Entry<T> {
    pub name: &'static str,
    pub about: &'static str,
    pub item: T,
}

pub type SchedulerFactory = fn(u64) -> Box<dyn Scheduler>;

pub static RULES: [Entry<&'static dyn MergeRules>; 3] = [
    Entry { name: "pn", about: "process number", item: &ProcessNumberRules },
    Entry { name: "ns", about: "node search number", item: &NodeSearchRules },
    Entry { name: "es", about: "edge search number, via the 2-expansion", item: &EdgeSearchRules },
];

pub static CODINGS: [Entry<CodingScheme>; 2] = [
    Entry { name: "known", about: "fixed-width table, n known to every node", item: CodingScheme::KnownN },
    Entry { name: "unknown", about: "self-delimiting table", item: CodingScheme::UnknownN },
];

fn fifo(_seed: u64) -> Box<dyn Scheduler> {
    Box::new(Fifo)
}

fn shuffle(seed: u64) -> Box<dyn Scheduler> {
    Box::new(SeededShuffle::new(seed))
}

pub static SCHEDULERS: [Entry<SchedulerFactory>; 2] = [
    Entry { name: "fifo", about: "ready nodes in arrival order", item: fifo },
    Entry { name: "shuffle", about: "seeded uniform pick from the ready set", item: shuffle },
];

pub static ORACLES: [Entry<&'static dyn ExactOracle>; 4] = [
    Entry { name: "pn", about: "process game search", item: &ProcessNumberOracle },
    Entry { name: "ns", about: "node search with recontamination", item: &NodeSearchOracle },
    Entry { name: "es", about: "edge search with recontamination", item: &EdgeSearchOracle },
    Entry { name: "pw", about: "vertex separation subset DP", item: &PathwidthOracle },
];

fn find<'a, T>(table: &'a [Entry<T>], kind: &str, name: &str) -> Result<&'a T> {
    table.iter().find(|e| e.name == name).map(|e| &e.item).ok_or_else(|| {
        let known: Vec<_> = names(table);
        Error::Argument(format!("unknown {kind} {name:?} (known: {})", known.join(", ")))
    })
}

pub fn names<T>(table: &[Entry<T>]) -> Vec<&'static str> {
    table.iter().map(|e| e.name).collect()
}

pub fn rules(name: &str) -> Result<&'static dyn MergeRules> {
    find(&RULES, "parameter", name).copied()
}

pub fn coding(name: &str) -> Result<CodingScheme> {
    find(&CODINGS, "encoding", name).copied()
}

pub fn scheduler(name: &str, seed: u64) -> Result<Box<dyn Scheduler>> {
    find(&SCHEDULERS, "schedule", name).map(|make| make(seed))
}

pub fn oracle(name: &str) -> Result<&'static dyn ExactOracle> {
    find(&ORACLES, "oracle", name).copied()
}

/// One `kind=name` line per registered entry.
pub fn listing() -> Vec<String> {
    fn lines<T>(out: &mut Vec<String>, kind: &str, table: &[Entry<T>]) {
        out.extend(table.iter().map(|e| format!("{kind}={} about=\"{}\"", e.name, e.about)));
    }
    let mut out = Vec::new();
    lines(&mut out, "rules", &RULES);
    lines(&mut out, "encoding", &CODINGS);
    lines(&mut out, "schedule", &SCHEDULERS);
    lines(&mut out, "oracle", &ORACLES);
    out
}
