#![allow(dead_code)]

use consfree::eval::measure_tree;
use consfree::gen::{random_input, random_program, rng, GenConfig};
use consfree::report::run_engine;
use consfree::{BitString, Budget, Engine, Program, RunOptions, RunRecord};

pub const DETERMINISTIC_ENGINES: [Engine; 4] =
    [Engine::Tree, Engine::Stack, Engine::StackTco, Engine::Memo];

pub fn checked(max_steps: u64) -> RunOptions {
    RunOptions {
        budget: Budget::new(max_steps),
        check_suffixes: true,
    }
}

/// Runs all deterministic engines and returns a description of the first
/// inconsistency, if any.
pub fn engine_disagreement(p: &Program, x: &BitString, opts: RunOptions) -> Option<String> {
    let recs: Vec<RunRecord> = DETERMINISTIC_ENGINES
        .iter()
        .map(|&e| run_engine(p, "p", x, e, opts))
        .collect();
    for r in &recs {
        if r.status == "suffix-violation" || r.status == "error" {
            return Some(format!("{}: {} {:?}", r.engine, r.status, r.error));
        }
        if let (Some(d), true) = (r.distinct_configs, r.is_ok()) {
            if d > r.reach_bound {
                return Some(format!(
                    "{}: {d} configurations > bound {}",
                    r.engine, r.reach_bound
                ));
            }
        }
    }
    // Tree and both stack machines count the same steps, so they end the same way.
    for r in &recs[1..3] {
        if (&r.status, &r.result, r.time_steps.filter(|_| r.is_ok()))
            != (
                &recs[0].status,
                &recs[0].result,
                recs[0].time_steps.filter(|_| recs[0].is_ok()),
            )
        {
            return Some(format!("tree {:?} vs {} {:?}", recs[0], r.engine, r));
        }
    }
    let memo = &recs[3];
    let tree = &recs[0];
    let diverged = |r: &RunRecord| r.status == "timeout" || r.status == "reach-bound";
    let consistent = (tree.status == memo.status && tree.result == memo.result)
        || diverged(tree)
        || diverged(memo);
    if !consistent {
        return Some(format!("tree {tree:?} vs memo {memo:?}"));
    }
    if tree.is_ok() && memo.time_steps > tree.time_steps {
        return Some("memo took more steps than the tree".into());
    }
    None
}

pub fn random_cases(seed: u64, count: usize, max_len: usize) -> Vec<(Program, BitString)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let p = random_program(&mut r, GenConfig::default());
            let n = rand::Rng::gen_range(&mut r, 0..=max_len);
            let x = random_input(&mut r, n);
            (p, x)
        })
        .collect()
}

pub fn tree_steps(p: &Program, x: &BitString) -> u64 {
    measure_tree(p, x, RunOptions::default())
        .unwrap()
        .time_steps
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}
