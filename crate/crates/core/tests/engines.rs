mod common;

use common::*;
use consfree::corpus;
use consfree::eval::{eval_stack_with_history, measure_tree, value_bits};
use consfree::{
    detect_call_overlap, eval_memo, eval_stack, eval_tree, reach_bound, BitString, Budget, Config,
    EvalError, Rule, RunOptions, Value,
};

#[test]
fn corpus_engines_agree() {
    for c in corpus::deterministic() {
        let p = c.program();
        let max_len = if c.name == "q.cf" || c.name == "mcv.cf" {
            8
        } else {
            10
        };
        for n in 0..=max_len {
            for x in BitString::all_of_length(n).take(64) {
                if let Some(d) = engine_disagreement(&p, &x, checked(2_000_000)) {
                    panic!("{} on {x}: {d}", c.name);
                }
            }
        }
    }
}

#[test]
fn random_programs_engines_agree() {
    for (i, (p, x)) in random_cases(2024, 500, 6).into_iter().enumerate() {
        if let Some(d) = engine_disagreement(&p, &x, checked(20_000)) {
            panic!("case {i} on {x}: {d}\n{}", consfree::pretty_print(&p));
        }
    }
}

#[test]
fn parity_ground_truth() {
    let p = corpus::parity();
    let x = consfree::parse_input("[1,0,1]").unwrap();
    let (tree, stats) = eval_tree(&p, &x, Budget::default()).unwrap();
    assert_eq!(tree.value, Value::FALSE);
    assert_eq!(tree.rule, Rule::Program);
    assert_eq!(tree.size, stats.time_steps);
    assert_eq!(tree.depth(), stats.tree_depth.unwrap());
    let mut count = 0;
    tree.walk(&mut |_| count += 1);
    assert_eq!(count as u64, tree.size);
}

#[test]
fn tree_nodes_refer_to_program_expressions() {
    let p = corpus::parity_prime();
    let (tree, _) = eval_tree(&p, &BitString::from_u8s(&[1, 1]), Budget::default()).unwrap();
    assert!(tree.expr(&p).is_none());
    let body = tree.children[0].expr(&p).unwrap();
    assert_eq!(body, &p.entry().body);
}

#[test]
fn timeouts_are_reported_not_hung() {
    let p = consfree::parse_program("main x = f x\nf y = f y").unwrap();
    let x = BitString::from_u8s(&[0]);
    assert_eq!(
        eval_tree(&p, &x, Budget::new(1000)).unwrap_err(),
        EvalError::Timeout { max_steps: 1000 }
    );
    assert!(eval_stack(&p, &x, Budget::new(1000), true)
        .unwrap_err()
        .is_divergence());
    assert!(eval_memo(&p, &x).unwrap_err().is_divergence());
}

#[test]
fn deep_recursion_does_not_overflow() {
    let p = corpus::parity();
    let x = BitString::new(vec![true; 20_000]);
    let s = measure_tree(&p, &x, RunOptions::default()).unwrap();
    assert_eq!(s.result, Value::TRUE);
    assert_eq!(eval_memo(&p, &x).unwrap().result, Value::TRUE);
}

#[test]
fn tail_calls_run_in_one_frame() {
    let p = corpus::parity_prime();
    for n in [1usize, 8, 16, 32, 64] {
        let x = BitString::new(vec![false; n]);
        let with = eval_stack(&p, &x, Budget::default(), true).unwrap();
        let without = eval_stack(&p, &x, Budget::default(), false).unwrap();
        assert_eq!(with.max_frames, 1);
        assert_eq!(without.max_frames, n as u64 + 2);
        assert_eq!(with.time_steps, without.time_steps);
    }
    let x = BitString::new(vec![false; 64]);
    let with = eval_stack(&p, &x, Budget::default(), true).unwrap();
    let without = eval_stack(&p, &x, Budget::default(), false).unwrap();
    assert!(without.max_space_bits.unwrap() >= 16 * with.max_space_bits.unwrap());
    assert_eq!(with.max_space_bits.unwrap() % value_bits(64), 0);
}

#[test]
fn call_history_begins_at_entry_and_counts_calls() {
    let p = corpus::parity();
    let x = BitString::from_u8s(&[1, 1, 0]);
    let (stats, hist) = eval_stack_with_history(&p, &x, Budget::default(), false).unwrap();
    assert_eq!(
        hist[0],
        Config {
            function: "entry".into(),
            args: vec![Value::Suffix(0)]
        }
    );
    assert_eq!(hist.len(), 5);
    assert_eq!(stats.call_history_length, 5);
    assert!(!stats.overlap());
}

#[test]
fn q_overlaps_and_parity_does_not() {
    let x = BitString::new(vec![true; 4]);
    let q = detect_call_overlap(&corpus::q(), &x, Budget::default()).unwrap();
    assert!(q.overlap);
    assert_eq!(q.distinct_configs, 5);
    assert!(q.call_history_length > q.distinct_configs);
    let parity = detect_call_overlap(&corpus::parity(), &x, Budget::default()).unwrap();
    assert!(!parity.overlap);
    assert!(parity.first_repeated.is_none());
}

#[test]
fn memo_is_bounded_by_configurations() {
    let p = corpus::q();
    for n in [4usize, 8, 16, 32] {
        let x = BitString::new(vec![true; n]);
        let s = eval_memo(&p, &x).unwrap();
        assert_eq!(s.cache_entries, Some(n as u64 + 1));
        assert!(s.distinct_configs <= reach_bound(&p, n));
        // Each configuration's body is evaluated once.
        assert!(s.time_steps <= 1 + 16 * reach_bound(&p, n));
    }
}

#[test]
fn suffix_audit_counts_checks() {
    let p = corpus::parity();
    let opts = checked(1_000_000);
    let s = consfree::run_engine(
        &p,
        "parity",
        &BitString::from_u8s(&[1, 0, 1, 1]),
        consfree::Engine::Tree,
        opts,
    );
    assert!(s.is_ok());
    assert!(s.suffix_checks.unwrap() > 0);
}
