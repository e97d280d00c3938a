//! Independent reference computations. Each check returns the number of
//! comparisons made, or a description of the first disagreement.

#![allow(dead_code)]

use streamtree::change::{Adwin, ChangeDetector};
use streamtree::eval::{binomial_test, ci_lower};
use streamtree::streams::{seeded_rng, AttributeKind, Generator, Instance, Value};
use streamtree::tree::{AttributeObserver, HoeffdingTree, LearningLeaf, StrategyConfig};
use rand::Rng;

/// Compares `binomial_test(w, l)` with a count over all `2^(w+l)` outcome
/// vectors, for every `w + l <= max_n`.
pub fn binomial_enumeration(max_n: u32) -> Result<usize, String> {
    let mut checks = 0;
    for n in 0..=max_n {
        // histogram of the number of wins over every outcome vector
        let mut hist = vec![0u64; n as usize + 1];
        for v in 0u64..(1u64 << n) {
            hist[v.count_ones() as usize] += 1;
        }
        let total = (1u64 << n) as f64;
        for w in 0..=n {
            let at_least: u64 = hist[w as usize..].iter().sum();
            let want = at_least as f64 / total;
            let got = binomial_test(w as u64, (n - w) as u64);
            if (got - want).abs() > 1e-12 {
                return Err(format!("binomial_test({w}, {}) = {got}, enumeration gives {want}", n - w));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

fn tail_at_least(n: u64, w: u64, x: f64) -> f64 {
    // P(Bin(n, x) >= w) by direct summation with exact integer coefficients
    let mut coef = 1.0f64;
    let mut sum = 0.0;
    for k in 0..=n {
        if k > 0 {
            coef = coef * (n - k + 1) as f64 / k as f64;
        }
        if k >= w {
            sum += coef * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32);
        }
    }
    sum
}

/// Lower confidence bound by bisection on the binomial tail:
/// the `x` with `P(Bin(w + l, x) >= w) = alpha`.
pub fn ci_lower_by_bisection(wins: u64, losses: u64, alpha: f64) -> f64 {
    if wins == 0 {
        return 0.0;
    }
    let n = wins + losses;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if tail_at_least(n, wins, mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Compares `ci_lower` with the bisection oracle for all `1 <= w + l <= max_n`.
pub fn ci_bisection(max_n: u64, tol: f64) -> Result<usize, String> {
    let mut checks = 0;
    for n in 1..=max_n {
        for w in 0..=n {
            let l = n - w;
            let want = ci_lower_by_bisection(w, l, 0.05);
            let got = ci_lower(w, l, 0.05).map_err(|e| e.to_string())?;
            if (got - want).abs() > tol {
                return Err(format!("ci_lower({w}, {l}) = {got}, bisection gives {want}"));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

/// Sufficient statistics recounted from raw instances.
struct Recount {
    /// Per attribute: nominal `[value][class]` weights, or per-class
    /// `(weight, weighted sum)` for numeric attributes.
    nominal: Vec<Vec<Vec<f64>>>,
    numeric: Vec<Vec<(f64, f64)>>,
    classes: Vec<f64>,
}

fn recount(kinds: &[AttributeKind], class_count: usize, instances: &[&Instance]) -> Recount {
    let mut r = Recount {
        nominal: kinds
            .iter()
            .map(|k| match k {
                AttributeKind::Nominal { values } => vec![vec![0.0; class_count]; *values],
                AttributeKind::Numeric { .. } => Vec::new(),
            })
            .collect(),
        numeric: vec![vec![(0.0, 0.0); class_count]; kinds.len()],
        classes: vec![0.0; class_count],
    };
    for inst in instances {
        let (k, w) = (inst.class_label, inst.weight);
        r.classes[k] += w;
        for (i, v) in inst.values.iter().enumerate() {
            match *v {
                Value::Nominal(j) => r.nominal[i][j][k] += w,
                Value::Numeric(x) => {
                    r.numeric[i][k].0 += w;
                    r.numeric[i][k].1 += w * x;
                }
            }
        }
    }
    r
}

fn leaf_matches(leaf: &LearningLeaf, want: &Recount) -> Result<(), String> {
    if leaf.class_dist.mass() != want.classes.as_slice() {
        return Err(format!("class_dist {:?} vs recount {:?}", leaf.class_dist.mass(), want.classes));
    }
    for (i, obs) in leaf.stats.observers().iter().enumerate() {
        match obs {
            AttributeObserver::Nominal { values, .. } => {
                for j in 0..*values {
                    let got = leaf.stats.value_class_counts(i, j);
                    if got != want.nominal[i][j] {
                        return Err(format!("n[{i}][{j}] = {got:?}, recount {:?}", want.nominal[i][j]));
                    }
                }
            }
            AttributeObserver::Numeric { per_class } => {
                for (k, s) in per_class.iter().enumerate() {
                    let (w, sum) = want.numeric[i][k];
                    let mean = if w > 0.0 { sum / w } else { 0.0 };
                    if s.gaussian.weight() != w || (s.gaussian.mean() - mean).abs() > 1e-9 {
                        return Err(format!(
                            "numeric attribute {i} class {k}: weight {} mean {} vs recount {w} {mean}",
                            s.gaussian.weight(),
                            s.gaussian.mean()
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Trains an eidetic tree on `n` instances of `stream` and, after every
/// split and every `every` instances, checks each leaf against a recount of
/// all instances so far that the current tree routes to it.
pub fn eidetic_replay(
    stream: &mut dyn Generator,
    config: StrategyConfig,
    n: usize,
    every: usize,
) -> Result<(usize, u64), String> {
    assert!(config.eidetic, "replay oracle needs an eidetic tree");
    let schema = stream.schema().clone();
    let kinds: Vec<AttributeKind> = schema.attributes().iter().map(|a| a.kind.clone()).collect();
    let mut tree = HoeffdingTree::new(schema.clone(), config).map_err(|e| e.to_string())?;
    let mut seen: Vec<Instance> = Vec::with_capacity(n);
    let mut checks = 0;
    let mut last_splits = 0;
    for t in 1..=n {
        let inst = stream.next_instance().ok_or("stream exhausted")?;
        tree.train(&inst).map_err(|e| e.to_string())?;
        seen.push(inst);
        let c = tree.split_counts();
        let splits = c.splits + c.resplits;
        if splits == last_splits && t % every != 0 && t != n {
            continue;
        }
        last_splits = splits;
        for leaf in tree.root().leaves() {
            let routed: Vec<&Instance> =
                seen.iter().filter(|i| std::ptr::eq(tree.root().leaf_for(i), leaf)).collect();
            let want = recount(&kinds, schema.class_count(), &routed);
            leaf_matches(leaf, &want).map_err(|e| format!("t={t}: {e}"))?;
            let buffered = leaf.buffer().map_or(0, <[Instance]>::len);
            if buffered != routed.len() {
                return Err(format!("t={t}: buffer holds {buffered}, {} routed", routed.len()));
            }
            checks += 1;
        }
    }
    Ok((checks, last_splits))
}

/// Feeds `xs` to a fresh ADWIN and, after every element, checks it against
/// the plain list of inputs:
/// - the window is a suffix of the inputs and the estimate is its mean;
/// - the width grows by at most one per step;
/// - no bucket boundary inside the retained window meets the cut condition.
pub fn adwin_against_list(xs: &[f64], delta: f64) -> Result<usize, String> {
    let mut a = Adwin::new(delta);
    let mut prev_width = 0u64;
    let mut checks = 0;
    for (t, &x) in xs.iter().enumerate() {
        a.add_element(x).map_err(|e| e.to_string())?;
        let width = a.width() as usize;
        if width == 0 || width > t + 1 {
            return Err(format!("t={t}: width {width}"));
        }
        if width as u64 > prev_width + 1 {
            return Err(format!("t={t}: width jumped {prev_width} -> {width}"));
        }
        prev_width = width as u64;
        let suffix = &xs[t + 1 - width..=t];
        let mean = suffix.iter().sum::<f64>() / width as f64;
        let est = a.estimate().map_err(|e| e.to_string())?;
        if (est - mean).abs() > 1e-9 {
            return Err(format!("t={t}: estimate {est}, suffix mean {mean}"));
        }
        let sizes = a.bucket_sizes();
        if sizes.iter().sum::<u64>() as usize != width {
            return Err(format!("t={t}: bucket sizes {sizes:?} do not add up to width {width}"));
        }
        if sizes.len() >= 2 {
            let delta_prime = delta / (sizes.len() - 1) as f64;
            let mut split = 0usize;
            for s in &sizes[..sizes.len() - 1] {
                split += *s as usize;
                let (old, new) = suffix.split_at(split);
                let (n0, n1) = (old.len() as f64, new.len() as f64);
                let m = 1.0 / (1.0 / n0 + 1.0 / n1);
                let eps = ((4.0 / delta_prime).ln() / (2.0 * m)).sqrt();
                let gap = (old.iter().sum::<f64>() / n0 - new.iter().sum::<f64>() / n1).abs();
                if gap >= eps + 1e-12 {
                    return Err(format!("t={t}: boundary at {split} still qualifies ({gap} >= {eps})"));
                }
            }
        }
        checks += 1;
    }
    Ok(checks)
}

/// Inputs for the ADWIN list oracle: Bernoulli segments with random rates,
/// mixed with uniform reals, `len` elements long.
pub fn adwin_oracle_input(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = seeded_rng(seed, 100);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let seg = rng.gen_range(50..600);
        let p: f64 = rng.gen();
        let real = rng.gen_bool(0.25);
        for _ in 0..seg.min(len - out.len()) {
            out.push(if real { rng.gen::<f64>() * p } else { f64::from(u8::from(rng.gen_bool(p))) });
        }
    }
    out
}
