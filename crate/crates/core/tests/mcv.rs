use consfree::gen::rng;
use consfree::mcv::{
    decode_mcv, encode_mcv, eval_circuit, mcv_cf_program, McvError, StraightLineProgram,
};
use consfree::{
    call_shape_report, detect_call_overlap, eval_memo, eval_tree, is_cftr, BitString, Budget,
    CallShape, Value,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn encode_decode_round_trip(seed in any::<u64>(), vars in 3usize..=12) {
        let c = StraightLineProgram::random(&mut rng(seed), vars);
        let e = encode_mcv(&c);
        prop_assert_eq!(e.bits.len(), (e.block_len + 1) + c.instructions().len() * (3 * e.block_len + 1));
        let back = decode_mcv(&e.bits).unwrap();
        prop_assert_eq!(encode_mcv(&back).bits, e.bits);
        prop_assert_eq!(back, c);
    }

    #[test]
    fn decoder_never_panics(bits in prop::collection::vec(any::<bool>(), 0..64)) {
        let x = BitString::new(bits);
        if let Ok(c) = decode_mcv(&x) {
            prop_assert_eq!(encode_mcv(&c).bits, x);
        }
    }
}

#[test]
fn truncated_header_is_malformed() {
    assert!(matches!(
        decode_mcv(&BitString::from_u8s(&[1, 1])),
        Err(McvError::MalformedEncoding { position: 2, .. })
    ));
}

#[test]
fn bundled_program_agrees_with_direct_evaluation() {
    let p = mcv_cf_program();
    let mut r = rng(99);
    let mut seen = [0usize; 2];
    for _ in 0..150 {
        let vars = r.gen_range(3..=8);
        let c = StraightLineProgram::random(&mut r, vars);
        let x = encode_mcv(&c).bits;
        let want = eval_circuit(&c);
        seen[want as usize] += 1;
        assert_eq!(eval_memo(&p, &x).unwrap().result, Value::Bool(want), "{c}");
        if vars <= 5 {
            assert_eq!(
                eval_tree(&p, &x, Budget::default()).unwrap().1.result,
                Value::Bool(want)
            );
        }
    }
    assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
}

#[test]
fn bundled_program_shape() {
    let p = mcv_cf_program();
    assert!(!is_cftr(&p));
    let r = call_shape_report(&p);
    assert!(r
        .sites
        .iter()
        .any(|s| s.in_if_test && s.shape == CallShape::Nested));
}

#[test]
fn reuse_makes_the_tree_blow_up() {
    let p = mcv_cf_program();
    let mut ratios = Vec::new();
    for depth in [2usize, 4, 6, 8] {
        let x = encode_mcv(&StraightLineProgram::deep_reuse(depth)).bits;
        let memo = eval_memo(&p, &x).unwrap();
        let (_, tree) = eval_tree(&p, &x, Budget::new(50_000_000)).unwrap();
        assert_eq!(memo.result, Value::TRUE);
        assert_eq!(tree.result, Value::TRUE);
        ratios.push(tree.time_steps as f64 / memo.time_steps as f64);
        assert!(
            detect_call_overlap(&p, &x, Budget::new(50_000_000))
                .unwrap()
                .overlap
        );
    }
    // The tree/memo gap widens with every doubling of the reuse depth.
    assert!(ratios.windows(2).all(|w| w[1] > 1.5 * w[0]), "{ratios:?}");
}
