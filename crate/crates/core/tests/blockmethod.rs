use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shiftlab::blockmethod::*;
use shiftlab::funcspace::{random_function, sup_norm, BlockFunction};
use shiftlab::shiftop::{build_block_method, BlockMethodParams};
use shiftlab::{Error, ScalarField};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn det2(m: &SkewCirculant) -> Complex64 {
    let e = &m.entries;
    e[(0, 0)] * e[(1, 1)] - e[(0, 1)] * e[(1, 0)]
}

#[test]
fn compatible_sequence_examples() {
    assert!(validate_compatible_sequence(vec![3]).is_ok());
    assert!(validate_compatible_sequence(vec![2, 4]).is_ok());
    assert!(validate_compatible_sequence(vec![2, 4, 16]).is_ok());
    let odd = validate_compatible_sequence(vec![2, 6]);
    assert!(matches!(&odd, Err(Error::Sequence(msg)) if msg.contains('6')), "{odd:?}");
    assert!(validate_compatible_sequence(vec![1]).is_err());
    assert!(validate_compatible_sequence(vec![4, 2]).is_err());
    assert!(validate_compatible_sequence(vec![]).is_err());
    let d = CompatibleSequence::doubling(2, 4).unwrap();
    assert_eq!(d.p(), &[2, 4, 8, 16]);
    assert!(d.is_infinite());
}

#[test]
fn block_index_examples() {
    let idx = build_block_index(&validate_compatible_sequence(vec![2, 4]).unwrap());
    assert_eq!(idx.run(1), vec![1, 2]);
    assert_eq!(idx.run(2), vec![3, 4, 5, 6]);
    assert_eq!(idx.family(5).unwrap(), 2);
    assert!(idx.family(0).is_err() && idx.family(7).is_err());
    assert_eq!(idx.s(3).unwrap(), 6);
    assert_eq!(idx.s(4).unwrap(), 3);

    let idx = build_block_index(&validate_compatible_sequence(vec![2]).unwrap());
    assert_eq!(idx.s(1).unwrap(), 2);
    assert_eq!(idx.s(2).unwrap(), 1);
}

#[test]
fn skew_circulant_examples() {
    let (g1, g2) = (re(0.3), re(-0.7));
    let m = build_skew_circulant(&[g1, g2]);
    assert_eq!(m.entries[(0, 0)], g1);
    assert_eq!(m.entries[(0, 1)], g2);
    assert_eq!(m.entries[(1, 0)], -g2);
    assert_eq!(m.entries[(1, 1)], g1);
    assert!((m.det - (g1 * g1 + g2 * g2)).norm() < 1e-15);

    let m = build_skew_circulant(&[re(0.25), re(0.25)]);
    assert!((det2(&m) - 0.125).norm() < 1e-15 && m.is_invertible());

    let bad = vec![re(0.5), Complex64::new(0.0, 0.5)];
    let m = build_skew_circulant(&bad);
    assert!(det2(&m).norm() < 1e-15 && !m.is_invertible());
    let idx = build_block_index(&validate_compatible_sequence(vec![2]).unwrap());
    assert!(matches!(GammaConfig::new(bad, ScalarField::Complex, &idx), Err(Error::Gamma(_))));
}

#[test]
fn v_vector_examples() {
    let idx = build_block_index(&validate_compatible_sequence(vec![3]).unwrap());
    let g = vec![re(0.1), re(0.2), re(0.3)];
    let cfg = GammaConfig::new(g.clone(), ScalarField::Real, &idx).unwrap();
    assert_eq!(v_vector(&cfg, &idx, 1, 0).unwrap(), g);
    assert_eq!(v_vector(&cfg, &idx, 1, 1).unwrap(), vec![-g[2], g[0], g[1]]);
    assert_eq!(v_vector(&cfg, &idx, 1, 3).unwrap(), vec![-g[0], -g[1], -g[2]]);
    assert!(matches!(v_vector(&cfg, &idx, 1, 6), Err(Error::OutOfRange(_))));
    assert!(v_vector(&cfg, &idx, 2, 0).is_err());
}

#[test]
fn gamma_rules() {
    let idx = build_block_index(&validate_compatible_sequence(vec![2]).unwrap());
    assert!(GammaConfig::new(vec![re(0.5), re(0.0)], ScalarField::Real, &idx).is_err());
    assert!(GammaConfig::new(vec![re(0.75), re(0.5)], ScalarField::Real, &idx).is_err());
    assert!(GammaConfig::new(vec![re(0.5), Complex64::new(0.0, 0.25)], ScalarField::Real, &idx).is_err());
    assert!(GammaConfig::new(vec![re(0.5), re(0.25)], ScalarField::Real, &idx).is_ok());
}

#[test]
fn default_gamma_examples() {
    let seq = validate_compatible_sequence(vec![2]).unwrap();
    let g = default_gamma_search(&seq, ScalarField::Real, 0).unwrap();
    assert_eq!(g.gamma(), &[re(0.5), re(0.25)]);
    let m = build_skew_circulant(g.gamma());
    assert!((m.det - 5.0 / 16.0).norm() < 1e-15);

    let seq = validate_compatible_sequence(vec![2, 4]).unwrap();
    let idx = build_block_index(&seq);
    let g = default_gamma_search(&seq, ScalarField::Real, 0).unwrap();
    let geometric: Vec<Complex64> = (1..=6).map(|m| re(0.5f64.powi(m))).collect();
    assert_eq!(g.gamma(), &geometric[..]);
    for n in 1..=2 {
        assert!(build_skew_circulant(&g.restrict(&idx, n)).is_invertible());
    }
    assert!(g.mass() <= 1.0);

    let g = default_gamma_search(&CompatibleSequence::doubling(2, 3).unwrap(), ScalarField::Complex, 1).unwrap();
    assert!(g.tail_mass() > 0.0 && g.mass() <= 1.0);
}

#[test]
fn block_delta_examples() {
    let seq = validate_compatible_sequence(vec![2]).unwrap();
    let idx = build_block_index(&seq);
    let gamma = GammaConfig::new(vec![re(0.25), re(0.25)], ScalarField::Real, &idx).unwrap();
    let bm = build_block_method(BlockMethodParams::torus_with(seq, gamma, 1, 2)).unwrap();
    let space = bm.op.space();
    let f = BlockFunction::combine(
        re(2.0),
        &BlockFunction::block_indicator(space, 0).unwrap(),
        re(-2.0),
        &BlockFunction::block_indicator(space, 1).unwrap(),
    )
    .unwrap();
    assert_eq!(bm.op.delta().evaluate(&f).unwrap(), re(0.0));
    let one = BlockFunction::constant(space, re(1.0));
    assert!((bm.op.delta().evaluate(&one).unwrap() - 0.5).norm() < 1e-15);
    assert_eq!(block_delta_terms(&bm.gamma, &bm.index), vec![(1, 1, re(0.25)), (2, 1, re(0.25))]);
}

#[test]
fn delta_is_bounded_by_the_sup_norm() {
    let bm = build_block_method(BlockMethodParams::torus(vec![2, 4], 1, 6, ScalarField::Complex, 3).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let f = random_function(bm.op.space(), &mut rng);
        let d = bm.op.delta().evaluate(&f).unwrap().norm();
        assert!(d <= sup_norm(&f, 64) + 1e-12);
    }
}

fn sequences() -> impl Strategy<Value = Vec<usize>> {
    (2usize..6, prop::collection::vec(1usize..3, 0..3)).prop_map(|(p1, ls)| {
        let mut p = vec![p1];
        for l in ls {
            let last = *p.last().unwrap();
            p.push(last * 2 * l);
        }
        p
    })
}

fn weights(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len).prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn runs_partition_the_block_ids(p in sequences()) {
        let idx = build_block_index(&validate_compatible_sequence(p.clone()).unwrap());
        let mut seen = vec![0usize; idx.total() + 1];
        for n in 1..=idx.families() {
            for k in idx.run(n) {
                seen[k] += 1;
                prop_assert_eq!(idx.family(k).unwrap(), n);
            }
        }
        prop_assert!(seen[1..].iter().all(|&c| c == 1));
    }

    #[test]
    fn cyclic_map_has_order_p(p in sequences()) {
        let idx = build_block_index(&validate_compatible_sequence(p).unwrap());
        for k in 1..=idx.total() {
            let n = idx.family(k).unwrap();
            let mut x = k;
            for step in 1..=idx.p(n) {
                x = idx.s(x).unwrap();
                prop_assert_eq!(idx.family(x).unwrap(), n);
                if step < idx.p(n) {
                    prop_assert_ne!(x, k);
                }
            }
            prop_assert_eq!(x, k);
            prop_assert_eq!(idx.s_inverse(idx.s(k).unwrap()).unwrap(), k);
        }
    }

    #[test]
    fn matrices_are_signed_circulants(g in (1usize..10).prop_flat_map(weights)) {
        let m = build_skew_circulant(&g);
        prop_assert!(m.check_structure());
        for i in 0..g.len() {
            let row: Vec<Complex64> = (0..g.len()).map(|j| m.entries[(i, j)]).collect();
            prop_assert_eq!(row, v_row(&g, i));
        }
        // LU and eigenvalue product agree
        prop_assert!((m.det - m.det_spectral).norm() <= 1e-10 * (1.0 + m.row_norm_product));
        // the matrix is normal, so singular values are eigenvalue moduli
        let sv = m.entries.clone().singular_values();
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((smin - m.min_eigenvalue).abs() <= 1e-12 * (1.0 + m.row_norm));
    }

    #[test]
    fn v_rows_are_antiperiodic(g in (1usize..10).prop_flat_map(weights), i in 0usize..40) {
        let p = g.len();
        let a = v_row(&g, i);
        let b = v_row(&g, i + p);
        prop_assert!(a.iter().zip(&b).all(|(x, y)| *x == -*y));
        prop_assert_eq!(v_row(&g, i + 2 * p), a);
    }

    #[test]
    fn telescoping_sum_vanishes(g in prop::collection::vec((-64i32..64, -64i32..64), 1..8), l in 1usize..5) {
        // dyadic weights make every partial sum exact
        let g: Vec<Complex64> = g.into_iter().map(|(a, b)| Complex64::new(a as f64 / 64.0, b as f64 / 64.0)).collect();
        let s = telescoping_sum(&g, 2 * l * g.len());
        prop_assert!(s.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn accepted_gamma_has_a_safe_determinant(p in sequences(), seed in 0u64..1000, complex in any::<bool>()) {
        let seq = validate_compatible_sequence(p).unwrap();
        let idx = build_block_index(&seq);
        let field = if complex { ScalarField::Complex } else { ScalarField::Real };
        let g = default_gamma_search(&seq, field, seed).unwrap();
        prop_assert!(g.mass() <= 1.0);
        for n in 1..=idx.families() {
            let m = build_skew_circulant(&g.restrict(&idx, n));
            let smin = m.entries.clone().singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(smin > DET_TOL * m.row_norm * (1.0 - 1e-9));
            if m.order <= 8 {
                prop_assert!(m.det.norm() > 0.0);
            }
        }
    }
}
