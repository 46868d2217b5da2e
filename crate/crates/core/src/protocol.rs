//! Simulated asynchronous convergecast.
//!
//! Leaves start; a node that has heard from all neighbours but one merges
//! what it received and sends the result to that last neighbour, which
//! becomes its father. The node that hears from everyone is the root. All
//! messages go through the wire coding and are decoded by the receiver.
//!
//! Asynchrony is a single-threaded event loop: the set of nodes ready to
//! act is ordered by a scheduler, and each visit delivers its message
//! immediately. Equal seeds give equal transcripts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{decode, encode, DynFlag, KnownN, UnknownN, WireCoding};
use crate::error::{Error, Result};
use crate::forest::{Forest, VertexId};
use crate::hd::{check_capacity, evaluate, merge_summed, EvalResult, HDescriptor, HdTable, MergeRules, ParamVariant};

/// What a node knows about its neighbourhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeState {
    pub neighbours: Vec<VertexId>,
    pub received: BTreeMap<VertexId, HDescriptor>,
    pub father: Option<VertexId>,
    pub visited: bool,
    /// Cell-wise sum of the received tables.
    pub sum_table: HdTable,
    /// Descriptor this node last computed: its subtree, or the whole tree at
    /// the root.
    pub merged: Option<HDescriptor>,
}

impl NodeState {
    pub fn new(neighbours: Vec<VertexId>) -> Self {
        NodeState {
            neighbours,
            received: BTreeMap::new(),
            father: None,
            visited: false,
            sum_table: HdTable::new(),
            merged: None,
        }
    }

    /// Store `hd` as the entry of `from`, replacing any earlier one.
    pub fn store(&mut self, from: VertexId, hd: HDescriptor) -> Result<()> {
        self.forget(from)?;
        self.sum_table.add_assign(&hd.table);
        self.received.insert(from, hd);
        Ok(())
    }

    pub fn forget(&mut self, from: VertexId) -> Result<Option<HDescriptor>> {
        let old = self.received.remove(&from);
        if let Some(h) = &old {
            self.sum_table.sub_assign(&h.table)?;
        }
        Ok(old)
    }

    pub fn unheard(&self) -> Vec<VertexId> {
        self.neighbours.iter().copied().filter(|w| !self.received.contains_key(w)).collect()
    }

    /// Merge every stored entry except the one from `excluded`.
    pub fn merge_excluding(&self, excluded: Option<VertexId>, rules: &dyn MergeRules) -> Result<(HDescriptor, usize)> {
        let mut table = self.sum_table.clone();
        let mut vects = Vec::with_capacity(self.received.len());
        for (&w, h) in &self.received {
            if Some(w) == excluded {
                table.sub_assign(&h.table)?;
            } else {
                vects.push(h.vect);
            }
        }
        let (hd, trace) = merge_summed(&vects, table, rules)?;
        Ok((hd, trace.cell_touches))
    }

    pub fn sum_is_consistent(&self) -> bool {
        let mut sum = HdTable::new();
        for h in self.received.values() {
            sum.add_assign(&h.table);
        }
        sum.same_counts(&self.sum_table)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CostCounters {
    pub messages: u64,
    pub bits: u64,
    /// Node activations.
    pub steps: u64,
    /// Table cells read or written while merging.
    pub cell_touches: u64,
}

impl std::ops::Sub for CostCounters {
    type Output = CostCounters;

    fn sub(self, o: CostCounters) -> CostCounters {
        CostCounters {
            messages: self.messages - o.messages,
            bits: self.bits - o.bits,
            steps: self.steps - o.steps,
            cell_touches: self.cell_touches - o.cell_touches,
        }
    }
}

/// Orders the ready set.
pub trait Scheduler: fmt::Debug {
    fn name(&self) -> &'static str;

    /// Index into `ready` of the node to visit next; `ready` is non-empty.
    fn pick(&mut self, ready: &[VertexId]) -> usize;
}

/// Visit nodes in the order they became ready.
#[derive(Clone, Copy, Debug, Default)]
pub struct Fifo;

impl Scheduler for Fifo {
    fn name(&self) -> &'static str {
        "fifo"
    }

    fn pick(&mut self, _ready: &[VertexId]) -> usize {
        0
    }
}

/// Visit a uniformly random ready node, driven by a seeded generator.
#[derive(Clone, Debug)]
pub struct SeededShuffle {
    rng: ChaCha8Rng,
}

impl SeededShuffle {
    pub fn new(seed: u64) -> Self {
        SeededShuffle { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Scheduler for SeededShuffle {
    fn name(&self) -> &'static str {
        "shuffle"
    }

    fn pick(&mut self, ready: &[VertexId]) -> usize {
        self.rng.gen_range(0..ready.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchedulePolicy {
    Fifo,
    SeededShuffle,
}

impl FromStr for SchedulePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fifo" => Ok(SchedulePolicy::Fifo),
            "shuffle" => Ok(SchedulePolicy::SeededShuffle),
            _ => Err(Error::Argument(format!("unknown schedule {s:?} (expected fifo or shuffle)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub seed: u64,
    pub policy: SchedulePolicy,
}

impl Schedule {
    pub fn fifo() -> Self {
        Schedule { seed: 0, policy: SchedulePolicy::Fifo }
    }

    pub fn shuffled(seed: u64) -> Self {
        Schedule { seed, policy: SchedulePolicy::SeededShuffle }
    }

    pub fn scheduler(&self) -> Box<dyn Scheduler> {
        match self.policy {
            SchedulePolicy::Fifo => Box::new(Fifo),
            SchedulePolicy::SeededShuffle => Box::new(SeededShuffle::new(self.seed)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodingScheme {
    KnownN,
    UnknownN,
}

impl CodingScheme {
    pub fn coding(self, n: usize, variant: ParamVariant) -> Box<dyn WireCoding> {
        match self {
            CodingScheme::KnownN => Box::new(KnownN::for_tree(n, variant)),
            CodingScheme::UnknownN => Box::new(UnknownN),
        }
    }
}

impl FromStr for CodingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "known" => Ok(CodingScheme::KnownN),
            "unknown" => Ok(CodingScheme::UnknownN),
            _ => Err(Error::Argument(format!("unknown coding {s:?} (expected known or unknown)"))),
        }
    }
}

/// Root chosen when two adjacent nodes both qualify.
pub fn elect_root(u: VertexId, v: VertexId) -> VertexId {
    u.max(v)
}

/// Node states plus the links between them, shared by the static and the
/// dynamic algorithms.
#[derive(Debug)]
pub struct Network {
    pub states: Vec<NodeState>,
    pub counters: CostCounters,
    pub transcript: Vec<String>,
    rules: &'static dyn MergeRules,
    coding: Box<dyn WireCoding>,
    capacity: usize,
    dynamic: bool,
}

impl Network {
    pub fn new(f: &Forest, variant: ParamVariant, scheme: CodingScheme, dynamic: bool) -> Self {
        let rules = variant.rules();
        Network {
            states: f.graph().vertices().map(|v| NodeState::new(f.neighbours(v).to_vec())).collect(),
            counters: CostCounters::default(),
            transcript: Vec::new(),
            rules,
            coding: scheme.coding(f.len(), variant),
            capacity: rules.table_capacity(f.len()),
            dynamic,
        }
    }

    pub fn rules(&self) -> &'static dyn MergeRules {
        self.rules
    }

    /// Merge at `v` leaving out `excluded`, record it as `v`'s descriptor.
    pub fn merge_at(&mut self, v: VertexId, excluded: Option<VertexId>) -> Result<HDescriptor> {
        let (hd, touches) = self.states[v].merge_excluding(excluded, self.rules)?;
        check_capacity(&hd, self.capacity)?;
        self.counters.cell_touches += touches as u64;
        self.states[v].merged = Some(hd.clone());
        Ok(hd)
    }

    pub fn visit(&mut self, v: VertexId) {
        self.counters.steps += 1;
        self.transcript.push(format!("VISIT {v}"));
    }

    /// Encode, count and deliver one message; returns what `to` decoded.
    pub fn send(&mut self, from: VertexId, to: VertexId, hd: &HDescriptor, flag: DynFlag) -> Result<(DynFlag, HDescriptor)> {
        let flag = self.dynamic.then_some(flag);
        let msg = encode(hd, self.coding.as_ref(), flag)?;
        self.counters.messages += 1;
        self.counters.bits += msg.len() as u64;
        self.transcript.push(format!("SEND {from}→{to} {msg}"));
        let (got, decoded) = decode(&msg, self.coding.as_ref(), self.dynamic)?;
        Ok((got.unwrap_or(DynFlag::Replace), decoded))
    }

    /// Send `v`'s descriptor to `to` and store it there.
    pub fn deliver(&mut self, v: VertexId, to: VertexId, hd: &HDescriptor) -> Result<()> {
        let (_, got) = self.send(v, to, hd, DynFlag::Replace)?;
        let kept = self.rules.across_edge(got)?;
        self.states[to].store(v, kept)
    }
}

#[derive(Debug)]
pub struct StaticRun {
    pub variant: ParamVariant,
    pub value: EvalResult,
    pub root: VertexId,
    pub states: Vec<NodeState>,
    pub counters: CostCounters,
    pub transcript: Vec<String>,
}

/// Run the convergecast on a connected tree.
pub fn run_static(tree: &Forest, variant: ParamVariant, scheme: CodingScheme, schedule: Schedule) -> Result<StaticRun> {
    run_static_with(tree, variant, scheme, schedule.scheduler().as_mut())
}

/// [`run_static`] with a caller-supplied scheduler.
pub fn run_static_with(tree: &Forest, variant: ParamVariant, scheme: CodingScheme, sched: &mut dyn Scheduler) -> Result<StaticRun> {
    if tree.is_empty() {
        return Err(Error::Argument("empty tree".into()));
    }
    if !tree.is_connected() {
        return Err(Error::Argument("static runs need a connected tree; use the dynamic mode for forests".into()));
    }
    let mut net = Network::new(tree, variant, scheme, false);
    let mut ready: Vec<VertexId> = tree.graph().vertices().filter(|&v| tree.degree(v) <= 1).collect();
    let mut queued = vec![false; tree.len()];
    for &v in &ready {
        queued[v] = true;
    }
    let mut root = None;
    while !ready.is_empty() {
        let i = sched.pick(&ready);
        let mut v = ready.remove(i);
        let missing = net.states[v].unheard();
        let Some(&w) = missing.first() else {
            net.visit(v);
            net.merge_at(v, None)?;
            net.states[v].visited = true;
            root = Some(v);
            break;
        };
        debug_assert_eq!(missing.len(), 1);
        let mut w = w;
        // Both ends of an edge wait only for each other: the smaller id
        // sends, so the larger becomes the root.
        if net.states[w].unheard() == [v] && v > w {
            let j = ready.iter().position(|&x| x == w).expect("a waiting node is ready");
            ready[j] = v;
            std::mem::swap(&mut v, &mut w);
        }
        net.visit(v);
        let hd = net.merge_at(v, None)?;
        net.states[v].father = Some(w);
        net.states[v].visited = true;
        net.deliver(v, w, &hd)?;
        if !queued[w] && net.states[w].unheard().len() <= 1 {
            queued[w] = true;
            ready.push(w);
        }
    }
    let root = root.ok_or_else(|| Error::Contract("convergecast ended without a root".into()))?;
    let value = net.rules.root_value(evaluate(net.states[root].merged.as_ref().expect("root merged"))?);
    Ok(StaticRun { variant, value, root, states: net.states, counters: net.counters, transcript: net.transcript })
}
