// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::time::{Duration, Instant};

use hdsearch::codec::{decode, encode, KnownN, UnknownN, WireCoding, WireMessage};
use hdsearch::dynamic::{best_case_order, inc_build, worst_case_order};
use hdsearch::forest::{enumerate_trees, gen_tree, Graph, TreeKind};
use hdsearch::hd::tree_value;
use hdsearch::oracle::{es_exact, gap_characterization_check, ns_exact, pathwidth_exact, pn_exact, stable_exact};
use hdsearch::protocol::{run_static, CodingScheme, StaticRun, Schedule};
use hdsearch::strategy::{extract, validate};
use hdsearch::{evaluate, EvalResult, Forest, HDescriptor, ParamVariant};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CONFORMANCE_BUDGET: Duration = Duration::from_secs(300);
const BEST_SLOPE_TOL: f64 = 0.15;
const WORST_SLOPE_MIN: f64 = 1.7;
const SCALING_NS: [usize; 5] = [50, 100, 200, 400, 800];
const RANDOM_ORDERS: u64 = 100;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_trees(max_n: usize) -> Vec<Forest> {
    (1..=max_n).flat_map(|n| enumerate_trees(n).unwrap()).collect()
}

fn wire(line: &str) -> Option<(usize, WireMessage)> {
    let rest = line.strip_prefix("SEND ")?;
    let (route, bits) = rest.split_once(' ')?;
    let from = route.split('→').next()?.parse().ok()?;
    Some((from, bits.parse().ok()?))
}

fn coding_for(scheme: CodingScheme, n: usize, v: ParamVariant) -> Box<dyn WireCoding> {
    scheme.coding(n, v)
}

/// Every message decodes to its sender's descriptor and re-encodes to the
/// same bits.
fn roundtrip_all(run: &StaticRun, coding: &dyn WireCoding) -> Result<usize, String> {
    let mut count = 0;
    for (from, msg) in run.transcript.iter().filter_map(|l| wire(l)) {
        let (_, got) = decode(&msg, coding, false).map_err(|e| e.to_string())?;
        let sent = run.states[from].merged.clone().expect("sender merged").normalized();
        ensure(got == sent, || format!("node {from} sent {sent}, decoded {got}"))?;
        let again = encode(&got, coding, None).map_err(|e| e.to_string())?;
        ensure(again == msg, || format!("node {from}: {msg} re-encodes as {again}"))?;
        count += 1;
    }
    Ok(count)
}

fn slope(points: &[(usize, u64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 as f64).ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn oracle_conformance_and_codec() -> (Outcome, Outcome) {
    let start = Instant::now();
    let trees = all_trees(10);
    let mut runs = 0;
    let mut messages = 0;
    let mut c1 = Ok(());
    let mut c9 = Ok(());
    for t in &trees {
        let g = t.graph();
        let want = [
            (ParamVariant::ProcessNumber, pn_exact(g).unwrap()),
            (ParamVariant::NodeSearch, ns_exact(g).unwrap()),
            (ParamVariant::EdgeSearch, es_exact(g).unwrap()),
        ];
        for (variant, value) in want {
            for scheme in [CodingScheme::KnownN, CodingScheme::UnknownN] {
                let run = run_static(t, variant, scheme, Schedule::fifo()).unwrap();
                runs += 1;
                if c1.is_ok() && run.value.value != value {
                    c1 = Err(format!("{variant} got {} want {value} on {:?}", run.value.value, t.edges()));
                }
                match roundtrip_all(&run, coding_for(scheme, t.len(), variant).as_ref()) {
                    Ok(k) => messages += k,
                    Err(e) if c9.is_ok() => c9 = Err(format!("{variant} {scheme:?} {:?}: {e}", t.edges())),
                    Err(_) => {}
                }
            }
        }
    }
    let took = start.elapsed();
    let c1 = c1.and_then(|_| ensure(took < CONFORMANCE_BUDGET, || format!("took {took:?}"))).map(|_| {
        format!("{} trees x pn/ns/es x 2 codings, {runs} runs, {:.1}s", trees.len(), took.as_secs_f64())
    });
    let c9 = c9.map(|_| format!("{messages} messages, both codings"));
    (c1, c9)
}

fn named_examples() -> Outcome {
    let star = gen_tree(TreeKind::Star(5)).unwrap();
    let p4 = gen_tree(TreeKind::Path(4)).unwrap();
    let got = [
        ("star", pn_exact(star.graph()).unwrap(), 1),
        ("P4", pn_exact(p4.graph()).unwrap(), 2),
        ("C5", pn_exact(&Graph::cycle(5)).unwrap(), 3),
        ("grid3x3", pn_exact(&Graph::grid(3, 3)).unwrap(), 4),
        ("star/hd", run_static(&star, ParamVariant::ProcessNumber, CodingScheme::KnownN, Schedule::fifo()).unwrap().value.value, 1),
        ("P4/hd", run_static(&p4, ParamVariant::ProcessNumber, CodingScheme::KnownN, Schedule::fifo()).unwrap().value.value, 2),
    ];
    for (name, g, w) in got {
        ensure(g == w, || format!("{name}: got {g}, want {w}"))?;
    }
    Ok("star=1 P4=2 C5=3 grid3x3=4".into())
}

fn theorem1_tower() -> Outcome {
    let mut sizes = Vec::new();
    for k in 1..=5 {
        let t = gen_tree(TreeKind::Theorem1(k)).unwrap();
        let run = run_static(&t, ParamVariant::ProcessNumber, CodingScheme::KnownN, Schedule::fifo()).unwrap();
        ensure(run.value.value == k, || format!("k={k}: got {}", run.value.value))?;
        if k <= 2 {
            let exact = pn_exact(t.graph()).unwrap();
            ensure(exact == k, || format!("k={k}: pn_exact {exact}"))?;
        }
        sizes.push(t.len());
    }
    Ok(format!("k=1..5 exact, sizes {sizes:?}, k<=2 oracle-checked"))
}

fn relations() -> Outcome {
    let trees = all_trees(9);
    let mut rooted = 0;
    for t in &trees {
        let g = t.graph();
        let (pn, ns, es, pw) = (pn_exact(g).unwrap(), ns_exact(g).unwrap(), es_exact(g).unwrap(), pathwidth_exact(g).unwrap());
        let edges = || format!("{:?}", t.edges());
        ensure(ns == pw + 1, || format!("ns {ns} pw {pw} on {}", edges()))?;
        ensure(pw <= pn && pn <= pw + 1, || format!("pn {pn} pw {pw} on {}", edges()))?;
        ensure(es + 1 == ns || es == ns, || format!("es {es} ns {ns} on {}", edges()))?;
        for r in 0..t.len() {
            let hd = tree_value(t, r, ParamVariant::ProcessNumber).unwrap();
            let exact = stable_exact(g, r).unwrap();
            ensure(hd.stable == exact, || format!("root {r}: stable {} vs {exact} on {}", hd.stable, edges()))?;
            rooted += 1;
        }
    }
    Ok(format!("{} trees, {rooted} rooted stability checks", trees.len()))
}

fn message_accounting() -> Outcome {
    let t = gen_tree(TreeKind::Random { n: 1000, seed: 1 }).unwrap();
    let run = run_static(&t, ParamVariant::ProcessNumber, CodingScheme::KnownN, Schedule::fifo()).unwrap();
    let known = KnownN::for_tree(1000, ParamVariant::ProcessNumber);
    let lens: Vec<usize> = run.transcript.iter().filter_map(|l| wire(l)).map(|(_, m)| m.len()).collect();
    ensure(run.counters.messages == 999 && lens.len() == 999, || format!("{} messages", run.counters.messages))?;
    ensure(lens.iter().all(|&l| l == 9), || format!("lengths {:?}", lens.iter().filter(|&&l| l != 9).take(3).collect::<Vec<_>>()))?;
    ensure(known.lmax + 2 == 9, || format!("lmax {}", known.lmax))?;
    let bound = 1000.0 * (1000f64.ln() / 3f64.ln() + 3.0);
    ensure(run.counters.bits == 8991 && (run.counters.bits as f64) <= bound, || format!("bits {}", run.counters.bits))?;

    let unknown = run_static(&t, ParamVariant::ProcessNumber, CodingScheme::UnknownN, Schedule::fifo()).unwrap();
    for (_, m) in unknown.transcript.iter().filter_map(|l| wire(l)) {
        let (_, h) = decode(&m, &UnknownN, false).map_err(|e| e.to_string())?;
        ensure(m.len() == 2 * h.table.len() + 4, || format!("{m} carries {h}"))?;
    }
    let order: Vec<_> = t.edges();
    let df = inc_build(1000, &order[..300], ParamVariant::ProcessNumber, CodingScheme::UnknownN, false).unwrap();
    let mut dynamic = 0;
    for (_, m) in df.transcript().iter().filter_map(|l| wire(l)) {
        let (_, h) = decode(&m, &UnknownN, true).map_err(|e| e.to_string())?;
        ensure(m.len() == 2 * h.table.len() + 5, || format!("dynamic {m} carries {h}"))?;
        dynamic += 1;
    }
    Ok(format!("999 x 9 = {} <= {bound:.0}; unknown 2L+4 on 999, 2L+5 on {dynamic} dynamic", run.counters.bits))
}

fn table_readings() -> Outcome {
    let a = evaluate(&HDescriptor::from_parts(2, 2, &[0, 0, 3, 2, 3, 1, 0, 0, 1])).unwrap();
    ensure(a == EvalResult { value: 9, stable: false }, || format!("large table {a:?}"))?;
    // (-1,-1) with one unstable tree of each value 3, 4, 5: each bigger one
    // takes over the count, so the last gives 5.
    let b = evaluate(&HDescriptor::from_parts(-1, -1, &[0, 0, 1, 1, 1])).unwrap();
    ensure(b.value == 5, || format!("chain {b:?}"))?;
    Ok("9 unstable; 5".into())
}

fn dynamics() -> Outcome {
    let pn = ParamVariant::ProcessNumber;
    let trees = all_trees(9);
    let (mut reroots, mut deletions) = (0, 0);
    for t in &trees {
        let n = t.len();
        let edges = t.edges();
        let base = inc_build(n, &edges, pn, CodingScheme::KnownN, false).unwrap();
        let want = base.value_of(0).unwrap().value;
        for r in 0..n {
            let mut df = inc_build(n, &edges, pn, CodingScheme::KnownN, false).unwrap();
            let old = df.root_of(r).unwrap();
            let dist = t.path(old, r).unwrap().len() - 1;
            let before = df.counters().messages;
            df.change_root(r).unwrap();
            let used = df.counters().messages - before;
            ensure(df.value_of(r).unwrap().value == want, || format!("reroot {r} changed value on {edges:?}"))?;
            ensure(used <= 2 * dist as u64 + 1, || format!("reroot {r}: {used} messages for dist {dist}"))?;
            reroots += 1;
        }
        for &(u, v) in &edges {
            let mut df = inc_build(n, &edges, pn, CodingScheme::KnownN, false).unwrap();
            df.delete_edge(u, v).unwrap();
            df.check_invariants().map_err(|e| e.to_string())?;
            for side in [u, v] {
                let (sub, _) = df.forest().induced(&df.forest().component(side));
                let fresh = run_static(&sub, pn, CodingScheme::KnownN, Schedule::fifo()).unwrap().value.value;
                let got = df.value_of(side).unwrap().value;
                ensure(got == fresh, || format!("del {u}-{v}: side {side} has {got}, rerun {fresh}"))?;
            }
            deletions += 1;
        }
    }
    let t = gen_tree(TreeKind::Random { n: 50, seed: 7 }).unwrap();
    let want = run_static(&t, pn, CodingScheme::KnownN, Schedule::fifo()).unwrap().value.value;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..RANDOM_ORDERS {
        let mut order = t.edges();
        order.shuffle(&mut rng);
        let df = inc_build(50, &order, pn, CodingScheme::KnownN, i % 2 == 1).unwrap();
        let got = df.value_of(0).unwrap().value;
        ensure(got == want, || format!("order {i}: {got} vs static {want}"))?;
    }
    Ok(format!("{reroots} reroots, {deletions} deletions, {RANDOM_ORDERS} orders on n=50 (pn {want})"))
}

fn inc_scaling() -> Outcome {
    let pn = ParamVariant::ProcessNumber;
    let mut best = Vec::new();
    let mut worst = Vec::new();
    for &n in &SCALING_NS {
        let t = gen_tree(TreeKind::Random { n, seed: n as u64 }).unwrap();
        let df = inc_build(n, &best_case_order(&t, 0), pn, CodingScheme::KnownN, false).unwrap();
        best.push((n, df.counters().messages));
        let (m, order) = worst_case_order(n);
        let df = inc_build(m, &order, pn, CodingScheme::KnownN, false).unwrap();
        worst.push((m, df.counters().messages));
    }
    let (sb, sw) = (slope(&best), slope(&worst));
    let detail = format!("best slope {sb:.3} {best:?}; worst slope {sw:.3} {worst:?}");
    ensure((sb - 1.0).abs() <= BEST_SLOPE_TOL, || detail.clone())?;
    ensure(sw >= WORST_SLOPE_MIN, || detail.clone())?;
    Ok(detail)
}

fn strategies() -> Outcome {
    let trees = all_trees(10);
    for t in &trees {
        let run = run_static(t, ParamVariant::ProcessNumber, CodingScheme::KnownN, Schedule::fifo()).unwrap();
        let s = extract(t, &run).map_err(|e| format!("{:?}: {e}", t.edges()))?;
        let peak = validate(t.graph(), &s).map_err(|e| format!("{:?}: {e}", t.edges()))?;
        ensure(peak == run.value.value, || format!("peak {peak} vs pn {} on {:?}", run.value.value, t.edges()))?;
    }
    Ok(format!("{} trees", trees.len()))
}

fn gap_lemma() -> Outcome {
    let trees = all_trees(9);
    for t in &trees {
        ensure(gap_characterization_check(t).unwrap(), || format!("sides disagree on {:?}", t.edges()))?;
    }
    Ok(format!("{} trees", trees.len()))
}

fn main() {
    let (c1, c9) = oracle_conformance_and_codec();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "static runs equal the oracles, all trees n<=10, pn/ns/es", c1),
        (2, "named examples", named_examples()),
        (3, "theorem1 tower", theorem1_tower()),
        (4, "oracle relations and stability, n<=9", relations()),
        (5, "message accounting", message_accounting()),
        (6, "table readings", table_readings()),
        (7, "dynamics, n<=9 and 100 orders", dynamics()),
        (8, "IncHD best and worst case slopes", inc_scaling()),
        (9, "codec roundtrip of every criterion 1 message", c9),
        (10, "extracted strategies reach pn, n<=10", strategies()),
        (11, "gap characterisation, n<=9", gap_lemma()),
    ];
    let mut failed = 0;
    for (i, what, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {i}: {what} ({detail})"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {i}: {what} ({why})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
