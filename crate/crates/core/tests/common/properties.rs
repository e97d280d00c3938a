//! Property checks run through a deterministic proptest runner. Each
//! function returns a short summary on success and the shrunk
//! counterexample on failure.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use std::cell::Cell;
use std::collections::HashMap;
use streamtree::eval::{prequential_run, Learner};
use streamtree::hat::{DetectorKind, HatConfig, HoeffdingAdaptiveTree, VotingMode};
use streamtree::streams::{generator_from_str, parse_stream_spec, Attribute, Instance, Schema, Value};
use streamtree::testbench::in_scope_rows;
use streamtree::tree::{
    hoeffding_bound, info_gain, ClassDistribution, CounterMode, HoeffdingTree, InfoGainMode, LearningLeaf, Node,
    NodeStatistics, StrategyConfig,
};

pub const MIN_CASES: u32 = 1000;

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>, summary: String) -> Result<String, String> {
    r.map(|()| summary).map_err(|e| e.to_string())
}

const WEIGHTS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.75];

/// Which reuse rule a random config gets.
fn reuse_config(reuse: u8, instantaneous: bool, weight_seen: bool, grace: u64, tau: f64) -> StrategyConfig {
    StrategyConfig {
        allow_resplit: reuse == 1,
        eviscerate_on_used_best: reuse == 2,
        infogain_mode: if instantaneous {
            InfoGainMode::InstantaneousOverExamples
        } else {
            InfoGainMode::AveragedOverEvaluations
        },
        counter_mode: if weight_seen { CounterMode::WeightSeen } else { CounterMode::NodeTime },
        grace_period: grace,
        tau,
        ..StrategyConfig::default()
    }
}

fn config_strategy() -> impl Strategy<Value = StrategyConfig> {
    (0u8..3, any::<bool>(), any::<bool>(), 2u64..40, prop_oneof![Just(0.05), Just(0.2), Just(0.5)])
        .prop_map(|(r, i, w, g, t)| reuse_config(r, i, w, g, t))
}

/// Small nominal schema and a decoded instance sequence.
fn nominal_case() -> impl Strategy<Value = (Schema, Vec<Instance>)> {
    (prop::collection::vec(2usize..5, 1..5), 2usize..5, prop::collection::vec((any::<u64>(), 0usize..5), 1..400))
        .prop_map(|(values, classes, raw)| {
            let attrs = values.iter().enumerate().map(|(i, &v)| Attribute::nominal(format!("a{i}"), v)).collect();
            let schema = Schema::new(attrs, classes).expect("valid schema");
            let instances = raw
                .iter()
                .map(|&(bits, w)| {
                    // the label depends on the first attribute so splits actually happen
                    let xs: Vec<usize> = values.iter().enumerate().map(|(i, &v)| ((bits >> (8 * i)) % v as u64) as usize).collect();
                    let noise = (bits >> 56) % 4 == 0;
                    let label = if noise { ((bits >> 40) % classes as u64) as usize } else { xs[0] % classes };
                    Instance::nominal(&xs, label).with_weight(WEIGHTS[w])
                })
                .collect();
            (schema, instances)
        })
}

fn leaf_path(root: &Node, instance: &Instance) -> Vec<usize> {
    let mut path = Vec::new();
    let mut node = root;
    while let Node::Split { test, children } = node {
        let b = test.branch(instance);
        path.push(b);
        node = &children[b];
    }
    path
}

fn leaves_with_paths<'a>(node: &'a Node, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a LearningLeaf)>) {
    match node {
        Node::Leaf(l) => out.push((path.clone(), l)),
        Node::Split { children, .. } => {
            for (j, c) in children.iter().enumerate() {
                path.push(j);
                leaves_with_paths(c, path, out);
                path.pop();
            }
        }
    }
}

/// At every amnesiac leaf and for every attribute, the n_ijk mass equals the
/// weight routed to the leaf since it was created, tracked outside the tree.
pub fn count_conservation(cases: u32) -> Result<String, String> {
    let r = runner(cases).run(&(nominal_case(), config_strategy()), |((schema, instances), config)| {
        let mut tree = HoeffdingTree::new(schema.clone(), config).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut seen: HashMap<Vec<usize>, f64> = HashMap::from([(Vec::new(), 0.0)]);
        for inst in &instances {
            let path = leaf_path(tree.root(), inst);
            let before = tree.split_counts();
            tree.train(inst).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let after = tree.split_counts();
            if after.splits + after.resplits > before.splits + before.resplits {
                seen.remove(&path);
                let mut node = tree.root();
                for &b in &path {
                    let Node::Split { children, .. } = node else { unreachable!() };
                    node = &children[b];
                }
                let Node::Split { children, .. } = node else { unreachable!("split just happened") };
                for j in 0..children.len() {
                    let mut child = path.clone();
                    child.push(j);
                    seen.insert(child, 0.0);
                }
            } else if after.eviscerations > before.eviscerations {
                seen.insert(path, 0.0);
            } else {
                *seen.get_mut(&path).expect("tracked leaf") += inst.weight;
            }
            let mut leaves = Vec::new();
            leaves_with_paths(tree.root(), &mut Vec::new(), &mut leaves);
            for (p, leaf) in leaves {
                let want = seen[&p];
                for i in 0..schema.attribute_count() {
                    let got = leaf.stats.attribute_weight(i);
                    prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0), "leaf {:?} attribute {}: {} vs {}", p, i, got, want);
                }
            }
        }
        Ok(())
    });
    finish(r, format!("{cases} cases"))
}

/// An attribute whose observed mass sits on one value has gain exactly 0.
pub fn constant_attribute_gain(cases: u32) -> Result<String, String> {
    let strat = (2usize..6, 2usize..6, prop::collection::vec((0usize..5, 0usize..8, 0usize..5), 1..200));
    let r = runner(cases).run(&strat, |(values, classes, raw)| {
        let schema = Schema::new(vec![Attribute::nominal("c", values), Attribute::nominal("x", values)], classes).unwrap();
        let mut stats = NodeStatistics::new(&schema);
        let mut dist = ClassDistribution::zeros(classes);
        let fixed = raw[0].0 % values;
        for (k, x, w) in raw {
            let inst = Instance::nominal(&[fixed, x % values], k % classes);
            stats.observe(&inst, WEIGHTS[w]);
            dist.add(k % classes, WEIGHTS[w]);
        }
        prop_assert_eq!(info_gain(&stats, &dist, 0), 0.0);
        Ok(())
    });
    finish(r, format!("{cases} cases"))
}

/// The bound strictly decreases in n, strictly increases in R and 1/delta,
/// and halves when n quadruples.
pub fn hoeffding_monotonicity(cases: u32) -> Result<String, String> {
    let strat = (0.01f64..8.0, 1e-12f64..0.99, 1.0f64..1e9, 1.001f64..100.0);
    let r = runner(cases).run(&strat, |(range, delta, n, f)| {
        let e = hoeffding_bound(range, delta, n).unwrap();
        prop_assert!(hoeffding_bound(range, delta, n * f).unwrap() < e);
        prop_assert!(hoeffding_bound(range * f, delta, n).unwrap() > e);
        prop_assert!(hoeffding_bound(range, delta / f, n).unwrap() > e);
        let q = hoeffding_bound(range, delta, 4.0 * n).unwrap();
        prop_assert!((q - e / 2.0).abs() <= 1e-12 * e, "quadrupling: {} vs {}", q, e / 2.0);
        Ok(())
    });
    finish(r, format!("{cases} cases"))
}

fn check_resplit_routing(node: &Node, fixed: &mut Vec<Option<usize>>, resplits: &mut u64) -> Result<(), String> {
    let Node::Split { test, children } = node else { return Ok(()) };
    let a = test.attribute();
    if !test.is_nominal() {
        for c in children {
            check_resplit_routing(c, fixed, resplits)?;
        }
        return Ok(());
    }
    if let Some(j) = fixed[a] {
        *resplits += 1;
        for (k, c) in children.iter().enumerate() {
            if k == j {
                continue;
            }
            match c {
                Node::Leaf(l) if l.node_time == 0 && l.class_dist.total() == 0.0 && l.observed_weight == 0.0 => {}
                _ => return Err(format!("resplit on attribute {a} with path value {j}: child {k} received traffic")),
            }
        }
        return check_resplit_routing(&children[j], fixed, resplits);
    }
    for (j, c) in children.iter().enumerate() {
        fixed[a] = Some(j);
        check_resplit_routing(c, fixed, resplits)?;
    }
    fixed[a] = None;
    Ok(())
}

/// After a resplit on an attribute already fixed to value j on the path,
/// only child j ever receives instances. Returns the number of cases whose
/// final tree contained at least one resplit node.
pub fn resplit_routing(cases: u32) -> Result<String, String> {
    let with_resplits = Cell::new(0u32);
    let strat = (1u64..1_000_000, 2usize..4, 2usize..4, 10u64..60, any::<bool>());
    let r = runner(cases).run(&strat, |(seed, n, z, grace, weight_seen)| {
        let text = format!("AbruptDriftGenerator -c -o 1.0 -z {z} -n {n} -v 2 -r {seed} -b 600 -d Recurrent");
        let mut stream = generator_from_str(&text).unwrap();
        let mut config = StrategyConfig::combined();
        config.grace_period = grace;
        if !weight_seen {
            config.counter_mode = CounterMode::NodeTime;
        }
        let mut tree = HoeffdingTree::new(stream.schema().clone(), config).unwrap();
        let mut found = 0;
        for t in 1..=4000 {
            tree.train(&stream.next_instance().unwrap()).unwrap();
            if t % 500 == 0 {
                found = 0;
                check_resplit_routing(tree.root(), &mut vec![None; n], &mut found).map_err(TestCaseError::fail)?;
            }
        }
        if found > 0 {
            with_resplits.set(with_resplits.get() + 1);
        }
        Ok(())
    });
    let hits = with_resplits.get();
    r.map_err(|e| e.to_string())?;
    if hits == 0 {
        return Err("no case produced a resplit; the property was never exercised".into());
    }
    Ok(format!("{cases} cases, {hits} with resplit nodes"))
}

/// Trains two trees that differ only in `allow_resplit` on a drift-free
/// abrupt-drift stream; both must make the same predictions and end with
/// the same dump.
pub fn resplit_agreement_run(seed: u64, n: usize, z: usize, v: usize, base: StrategyConfig, len: u64) -> Result<(), String> {
    let text = format!("AbruptDriftGenerator -z {z} -n {n} -v {v} -r {seed}");
    let mut stream = generator_from_str(&text).map_err(|e| e.to_string())?;
    let schema = stream.schema().clone();
    let off = StrategyConfig { allow_resplit: false, eviscerate_on_used_best: false, ..base };
    let on = StrategyConfig { allow_resplit: true, ..off };
    let mut a = HoeffdingTree::new(schema.clone(), off).map_err(|e| e.to_string())?;
    let mut b = HoeffdingTree::new(schema, on).map_err(|e| e.to_string())?;
    for t in 0..len {
        let inst = stream.next_instance().ok_or("stream exhausted")?;
        if a.predict_label(&inst) != b.predict_label(&inst) {
            return Err(format!("seed {seed}: predictions differ at t={t}"));
        }
        a.train(&inst).map_err(|e| e.to_string())?;
        b.train(&inst).map_err(|e| e.to_string())?;
    }
    if a.dump() != b.dump() {
        return Err(format!("seed {seed}: final trees differ"));
    }
    if b.split_counts().resplits != 0 {
        return Err(format!("seed {seed}: resplit on a stationary stream"));
    }
    Ok(())
}

pub fn drift_free_resplit_agreement(cases: u32, len: u64) -> Result<String, String> {
    // grace period and tau stay at their defaults: with tiny grace periods
    // and a loose tau, sampling noise alone can make a used attribute win
    let strat = (1u64..1_000_000, 2usize..5, 2usize..5, 2usize..5, any::<bool>(), any::<bool>());
    let r = runner(cases).run(&strat, |(seed, n, z, v, i, w)| {
        let base = reuse_config(0, i, w, 200, 0.05);
        resplit_agreement_run(seed, n, z, v, base, len).map_err(TestCaseError::fail)
    });
    finish(r, format!("{cases} cases x {len} instances"))
}

fn boxed_learner(kind: u8, schema: &Schema, seed: u64) -> Box<dyn Learner> {
    match kind {
        0 => Box::new(HoeffdingTree::new(schema.clone(), StrategyConfig::default()).unwrap()),
        1 => Box::new(HoeffdingTree::new(schema.clone(), StrategyConfig::combined()).unwrap()),
        _ => {
            let cfg = HatConfig { poisson_weighting: true, voting: VotingMode::MultipleAlternates, seed, ..HatConfig::default() };
            Box::new(HoeffdingAdaptiveTree::new(schema.clone(), cfg).unwrap())
        }
    }
}

/// Identical stream and learner seeds give identical prequential results,
/// error series included.
pub fn determinism(cases: u32) -> Result<String, String> {
    let rows = in_scope_rows();
    let strat = (0..rows.len(), 0i64..1000, 0u8..3);
    let r = runner(cases).run(&strat, |(row, offset, kind)| {
        let spec = parse_stream_spec(rows[row]).unwrap().with_seed_offset(offset);
        let run = || {
            let mut stream = streamtree::build_generator(&spec).unwrap();
            let mut learner = boxed_learner(kind, stream.schema(), offset as u64 + 1);
            prequential_run(learner.as_mut(), stream.as_mut(), 1500, 100).unwrap()
        };
        let (x, y) = (run(), run());
        prop_assert_eq!(x.mistakes, y.mistakes);
        prop_assert_eq!(x.final_error.to_bits(), y.final_error.to_bits());
        prop_assert_eq!(x.error_series, y.error_series);
        Ok(())
    });
    finish(r, format!("{cases} cases"))
}

/// HAT with never-firing detectors, no voting and no weighting predicts
/// exactly like a Hoeffding tree with the same base flags.
pub fn hat_reduction_run(stream_text: &str, base: StrategyConfig, len: u64) -> Result<(), String> {
    let mut stream = generator_from_str(stream_text).map_err(|e| e.to_string())?;
    let schema = stream.schema().clone();
    let cfg = HatConfig {
        base,
        voting: VotingMode::None,
        poisson_weighting: false,
        eval_timer: base.counter_mode,
        detector: DetectorKind::NeverFire,
        ..HatConfig::default()
    };
    let mut hat = HoeffdingAdaptiveTree::new(schema.clone(), cfg).map_err(|e| e.to_string())?;
    let mut vfdt = HoeffdingTree::new(schema, base).map_err(|e| e.to_string())?;
    for t in 0..len {
        let inst = stream.next_instance().ok_or("stream exhausted")?;
        let (h, v) = (hat.predict_label(&inst), vfdt.predict_label(&inst));
        if h != v {
            return Err(format!("{stream_text}: HAT predicts {h}, VFDT {v} at t={t}"));
        }
        hat.train(&inst).map_err(|e| e.to_string())?;
        vfdt.train(&inst).map_err(|e| e.to_string())?;
    }
    Ok(())
}

pub fn hat_reduction(cases: u32) -> Result<String, String> {
    let strat = (1u64..1_000_000, 0usize..3, config_strategy());
    let r = runner(cases).run(&strat, |(seed, which, base)| {
        let text = match which {
            0 => format!("AbruptDriftGenerator -c -o 1.0 -z 3 -n 3 -v 3 -r {seed} -b 800 -d Recurrent"),
            1 => format!("SEAGenerator -f 2 -i {seed}"),
            _ => format!("STAGGERGenerator -f 2 -i {seed}"),
        };
        hat_reduction_run(&text, base, 2000).map_err(TestCaseError::fail)
    });
    finish(r, format!("{cases} cases"))
}

/// `parse(canonical(parse(s))) = parse(s)` for every in-scope row under
/// arbitrary seed offsets and extra whitespace.
pub fn parser_round_trip(cases: u32) -> Result<String, String> {
    let rows = in_scope_rows();
    let strat = (0..rows.len(), 0i64..100_000, 1usize..4);
    let r = runner(cases).run(&strat, |(row, offset, spaces)| {
        let padded = rows[row].replace(' ', &" ".repeat(spaces));
        let spec = parse_stream_spec(&padded).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&parse_stream_spec(rows[row]).unwrap(), &spec);
        let shifted = spec.with_seed_offset(offset);
        let again = parse_stream_spec(&shifted.to_string()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(again, shifted);
        Ok(())
    });
    finish(r, format!("{cases} cases"))
}

/// `apply_drift` changes exactly round-half-up(m * cells) cells, each to a
/// different class, and leaves the probabilities alone; checked by a full
/// diff of the two tables for n, v <= 4.
pub fn drift_cell_count(cases: u32) -> Result<String, String> {
    use streamtree::streams::{apply_drift, seeded_rng, CellTable};
    let strat = (1usize..5, 2usize..5, 2usize..6, 0u32..=20, any::<u64>());
    let r = runner(cases).run(&strat, |(n, v, c, m20, seed)| {
        let m = f64::from(m20) / 20.0;
        let mut rng = seeded_rng(seed, 50);
        let table = CellTable::random(&vec![v; n], c, &mut rng).unwrap();
        let drifted = apply_drift(&table, m, &mut rng).unwrap();
        let cells = v.pow(n as u32);
        let want = (m * cells as f64 + 0.5).floor() as usize;
        let changed = (0..cells).filter(|&i| table.class_assignment[i] != drifted.class_assignment[i]).count();
        prop_assert_eq!(changed, want, "n={} v={} m={}", n, v, m);
        prop_assert_eq!(&table.attribute_value_probs, &drifted.attribute_value_probs);
        prop_assert!(drifted.class_assignment.iter().all(|&k| k < c));
        Ok(())
    });
    finish(r, format!("{cases} cases"))
}

/// Scaling every class mass by a positive constant keeps the argmax.
pub fn argmax_invariance(cases: u32) -> Result<String, String> {
    let strat = (prop::collection::vec(0u32..50, 2..8), 1e-6f64..1e6);
    let r = runner(cases).run(&strat, |(counts, scale)| {
        let mass: Vec<f64> = counts.iter().map(|&c| f64::from(c)).collect();
        let scaled: Vec<f64> = mass.iter().map(|m| m * scale).collect();
        prop_assert_eq!(ClassDistribution::from_mass(mass).argmax(), ClassDistribution::from_mass(scaled).argmax());
        Ok(())
    });
    finish(r, format!("{cases} cases"))
}

/// Poisson leaf weights never change node_time, and votes stay finite and
/// non-negative in every voting mode.
pub fn hat_weighting_and_votes(cases: u32) -> Result<String, String> {
    let strat = (1u64..1_000_000, 0u8..4, 100u64..1500);
    let r = runner(cases).run(&strat, |(seed, mode, len)| {
        let voting = [VotingMode::None, VotingMode::SingleAlternate, VotingMode::MultipleAlternates, VotingMode::MultipleExcludingSingleLeaves]
            [mode as usize];
        let mut stream = generator_from_str(&format!("STAGGERGenerator -f 1 -i {seed}")).unwrap();
        let schema = stream.schema().clone();
        let base = StrategyConfig { grace_period: 1_000_000, ..HatConfig::default().base };
        let cfg = HatConfig { base, voting, poisson_weighting: true, seed, ..HatConfig::default() };
        let mut hat = HoeffdingAdaptiveTree::new(schema, cfg).unwrap();
        for _ in 0..len {
            let inst = stream.next_instance().unwrap();
            let vote = hat.vote(&inst);
            prop_assert!(vote.mass().iter().all(|m| m.is_finite() && *m >= 0.0));
            hat.train(&inst).unwrap();
        }
        let probe = Instance::new(vec![Value::Nominal(0); 3], 0);
        prop_assert_eq!(hat.root().leaf_for(&probe).node_time, len);
        Ok(())
    });
    finish(r, format!("{cases} cases"))
}

/// Every named property, in a fixed order, with its outcome.
pub fn all(cases: u32) -> Vec<(&'static str, Result<String, String>)> {
    vec![
        ("count conservation", count_conservation(cases)),
        ("constant-attribute gain", constant_attribute_gain(cases)),
        ("Hoeffding monotonicity", hoeffding_monotonicity(cases)),
        ("resplit routing", resplit_routing(cases)),
        ("drift-free resplit agreement", drift_free_resplit_agreement(cases, 20_000)),
        ("determinism", determinism(cases)),
        ("HAT/VFDT reduction", hat_reduction(cases)),
        ("parser round-trip", parser_round_trip(cases)),
        ("apply_drift cell count", drift_cell_count(cases)),
        ("argmax invariance", argmax_invariance(cases)),
        ("Poisson node_time and vote sanity", hat_weighting_and_votes(cases)),
    ]
}
