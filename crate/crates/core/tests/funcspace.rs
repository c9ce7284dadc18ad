use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftlab::funcspace::*;
use shiftlab::{Error, ScalarField};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn mixed_space(field: ScalarField) -> Arc<BlockSpace> {
    let cantor = Fiber::cantor(CantorPoint::zero(2));
    Arc::new(
        BlockSpace::new(
            vec![
                ("circle".into(), BlockShape::torus(1, 4)),
                ("cantor".into(), BlockShape::cantor(2, 3)),
                ("plane".into(), BlockShape::torus(2, 2).with_tags(2)),
            ],
            6,
            vec![LimitPoint::Free, LimitPoint::Identified { block: 1, fiber: cantor }],
            field,
        )
        .unwrap(),
    )
}

fn random_point(space: &BlockSpace, rng: &mut ChaCha8Rng) -> PointRef {
    match rng.random_range(0..5) {
        0 => PointRef::Seq(rng.random_range(1..20)),
        1 => PointRef::Limit(rng.random_range(0..space.limit_count())),
        _ => {
            let b = rng.random_range(0..space.blocks.len());
            let s = &space.blocks[b].shape;
            let cantor = s.cantor.map(|p| {
                let digits: Vec<u8> = (0..8).map(|_| rng.random_range(0..p)).collect();
                CantorPoint::from_digits(p, &digits, &[rng.random_range(0..p)]).unwrap()
            });
            let angles = (0..s.circles).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            PointRef::block(b, Fiber { tag: rng.random_range(0..s.tags), cantor, angles })
        }
    }
}

#[test]
fn constant_one_evaluates_to_one() {
    let space = mixed_space(ScalarField::Real);
    let one = BlockFunction::constant(&space, re(1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let x = random_point(&space, &mut rng);
        assert!((eval_function(&one, &x).unwrap() - 1.0).norm() < 1e-15);
    }
    assert_eq!(sup_norm(&one, 64), 1.0);
}

#[test]
fn fourier_mode_at_origin() {
    let space = mixed_space(ScalarField::Complex);
    let f = assemble_block_function(
        &space,
        vec![
            BlockPart::Modes(vec![(vec![1], re(1.0))]),
            BlockPart::Constant(re(0.0)),
            BlockPart::Constant(re(0.0)),
        ],
        vec![],
        vec![re(0.0), re(0.0)],
    )
    .unwrap();
    let v = eval_function(&f, &PointRef::block(0, Fiber::angles(vec![0.0]))).unwrap();
    assert!((v - 1.0).norm() < 1e-15);
    assert!((sup_norm(&f, 1 << 12) - 1.0).abs() < 1e-12);
}

#[test]
fn cylinder_indicator_reads_its_window() {
    let space = mixed_space(ScalarField::Real);
    // window "01": digit 0 is 0 and digit 1 is 1, little-endian index 2
    let mut values = vec![re(0.0); 4];
    values[2] = re(1.0);
    let f = assemble_block_function(
        &space,
        vec![BlockPart::Constant(re(0.0)), BlockPart::Cylinders { depth: 2, values }, BlockPart::Constant(re(0.0))],
        vec![],
        vec![re(0.0), re(0.0)],
    )
    .unwrap();
    let at = |digits: &[u8]| {
        let x = CantorPoint::from_digits(2, digits, &[1]).unwrap();
        eval_function(&f, &PointRef::block(1, Fiber::cantor(x))).unwrap()
    };
    assert_eq!(at(&[0, 1]), re(1.0));
    assert_eq!(at(&[1, 0]), re(0.0));
    assert_eq!(sup_norm(&f, 2), 1.0);
}

#[test]
fn weighted_block_indicators() {
    let space = mixed_space(ScalarField::Real);
    let f = BlockFunction::combine(
        re(2.0),
        &BlockFunction::block_indicator(&space, 0).unwrap(),
        re(1.0),
        &BlockFunction::block_indicator(&space, 1).unwrap(),
    )
    .unwrap();
    // exhaustive over every represented block point and sequence point
    let mut best: f64 = 0.0;
    for b in 0..3 {
        best = best.max(eval_function(&f, &PointRef::block(b, space.blocks[b].shape.origin())).unwrap().norm());
    }
    for n in 1..=6 {
        best = best.max(eval_function(&f, &PointRef::Seq(n)).unwrap().norm());
    }
    assert_eq!(best, 2.0);
    assert_eq!(sup_norm(&f, 64), 2.0);
}

#[test]
fn zero_parts_and_glue_violation() {
    let space = mixed_space(ScalarField::Real);
    let parts = || vec![BlockPart::Constant(re(0.0)), BlockPart::Constant(re(0.0)), BlockPart::Constant(re(0.0))];
    let z = assemble_block_function(&space, parts(), vec![], vec![re(0.0), re(0.0)]).unwrap();
    assert_eq!(sup_norm(&z, 16), 0.0);
    let bad = assemble_block_function(&space, parts(), vec![], vec![re(0.0), re(1.0)]);
    assert!(matches!(bad, Err(Error::Glue { .. })), "{bad:?}");
    let missing = assemble_block_function(&space, parts()[..2].to_vec(), vec![], vec![re(0.0), re(0.0)]);
    assert!(matches!(missing, Err(Error::MissingBlock(3))));
    let too_high = assemble_block_function(
        &space,
        vec![BlockPart::Modes(vec![(vec![5], re(1.0))]), BlockPart::Constant(re(0.0)), BlockPart::Constant(re(0.0))],
        vec![],
        vec![re(0.0), re(0.0)],
    );
    assert!(matches!(too_high, Err(Error::Truncation(_))));
}

#[test]
fn block_indicator_is_one_on_its_block() {
    let space = mixed_space(ScalarField::Real);
    let xi = BlockFunction::block_indicator(&space, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..40 {
        let x = random_point(&space, &mut rng);
        let expect = matches!(x, PointRef::Block { block: 2, .. }) as u8 as f64;
        assert_eq!(eval_function(&xi, &x).unwrap(), re(expect));
    }
}

#[test]
fn address_mismatch_is_an_error() {
    let space = mixed_space(ScalarField::Real);
    let f = BlockFunction::zero(&space);
    assert!(eval_function(&f, &PointRef::block(0, Fiber::angles(vec![0.0, 1.0]))).is_err());
    assert!(eval_function(&f, &PointRef::Limit(7)).is_err());
    assert!(eval_function(&f, &PointRef::Seq(0)).is_err());
}

#[test]
fn sup_norm_grows_with_resolution() {
    let space = mixed_space(ScalarField::Complex);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_function(&space, &mut rng);
    // nested grids: every coarse sample is also a fine sample
    let mut last = 0.0;
    for r in [4, 8, 16, 32, 64] {
        let s = sup_norm(&f, r);
        assert!(s >= last - 1e-12, "{r}: {s} < {last}");
        last = s;
    }
}

fn spaces() -> impl Strategy<Value = ScalarField> {
    prop_oneof![Just(ScalarField::Real), Just(ScalarField::Complex)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_is_linear(seed in any::<u64>(), field in spaces(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let space = mixed_space(field);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_function(&space, &mut rng);
        let g = random_function(&space, &mut rng);
        let (a, b) = (re(a), re(b));
        let h = BlockFunction::combine(a, &f, b, &g).unwrap();
        for _ in 0..20 {
            let x = random_point(&space, &mut rng);
            let lhs = eval_function(&h, &x).unwrap();
            let rhs = a * eval_function(&f, &x).unwrap() + b * eval_function(&g, &x).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn norm_is_homogeneous(seed in any::<u64>(), ar in -4.0..4.0f64, ai in -4.0..4.0f64) {
        let space = mixed_space(ScalarField::Complex);
        let f = random_function(&space, &mut ChaCha8Rng::seed_from_u64(seed));
        let a = Complex64::new(ar, ai);
        let lhs = sup_norm(&f.scale(a), 128);
        let rhs = a.norm() * sup_norm(&f, 128);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>(), field in spaces()) {
        let space = mixed_space(field);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_function(&space, &mut rng);
        let g = random_function(&space, &mut rng);
        let s = sup_norm(&f.add(&g).unwrap(), 128);
        prop_assert!(s <= sup_norm(&f, 128) + sup_norm(&g, 128) + 1e-12);
    }

    #[test]
    fn real_functions_take_real_values(seed in any::<u64>()) {
        let space = mixed_space(ScalarField::Real);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_function(&space, &mut rng);
        prop_assert!(f.check_field().is_ok());
        for _ in 0..30 {
            let x = random_point(&space, &mut rng);
            prop_assert!(eval_function(&f, &x).unwrap().im.abs() < 1e-12);
        }
    }
}
