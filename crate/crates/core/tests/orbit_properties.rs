use entangle_core::catalog::{entries, CatalogState};
use entangle_core::exterior::{build_exterior_flattening, exterior_ranks, secant_family_index, strassen_determinant};
use entangle_core::linalg::DEFAULT_RANK_TOL;
use entangle_core::slocc::{random_tensor, LocalOperation};
use entangle_core::tensor::Tensor3;
use entangle_core::Complex64;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn qutrit_sum(r: usize) -> impl Strategy<Value = Tensor3> {
    let v = || prop::collection::vec(complex(), 3);
    prop::collection::vec((v(), v(), v()), r).prop_map(|terms| {
        terms
            .iter()
            .fold(Tensor3::zeros([3, 3, 3]), |acc, (a, b, c)| &acc + &Tensor3::product(a, b, c))
    })
}

fn qutrit_tensor() -> impl Strategy<Value = Tensor3> {
    (1usize..=6).prop_flat_map(qutrit_sum)
}

fn three_qutrit_catalog() -> Vec<(String, Tensor3)> {
    entries()
        .into_iter()
        .filter_map(|e| match e.state {
            CatalogState::Three(t) => Some((e.name, t)),
            CatalogState::Two(_) => None,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn determinant_scales_with_ninth_power(t in qutrit_tensor(), re in 0.1..3.0f64, phase in 0.0..6.28f64) {
        let lambda = Complex64::from_polar(re, phase);
        let det = strassen_determinant(&t).unwrap();
        let scaled = strassen_determinant(&t.scaled(lambda)).unwrap();
        let want = det * lambda.powi(9);
        prop_assert!((scaled - want).norm() <= 1e-9 * want.norm() + 1e-12 * (re * t.norm()).powi(9));
    }

    #[test]
    fn determinant_is_invariant_under_unit_determinant_operations(t in qutrit_sum(5), seed in any::<u64>()) {
        let det = strassen_determinant(&t).unwrap();
        prop_assume!(det.norm() > 1e-6 * t.norm().powi(9));
        let image = LocalOperation::random([3, 3, 3], seed, 0).unwrap().apply(&t).unwrap();
        let moved = strassen_determinant(&image).unwrap();
        prop_assert!((moved - det).norm() <= 1e-6 * det.norm(), "{} vs {}", moved, det);
    }

    #[test]
    fn flattening_ranks_are_orbit_invariant(t in qutrit_tensor(), seed in any::<u64>()) {
        prop_assume!(t.norm() > 1e-3);
        let image = LocalOperation::random([3, 3, 3], seed, 1).unwrap().apply(&t).unwrap();
        prop_assert_eq!(exterior_ranks(&t, DEFAULT_RANK_TOL).unwrap(), exterior_ranks(&image, DEFAULT_RANK_TOL).unwrap());
        prop_assert_eq!(
            secant_family_index(&t, DEFAULT_RANK_TOL).unwrap(),
            secant_family_index(&image, DEFAULT_RANK_TOL).unwrap()
        );
    }

    #[test]
    fn operations_compose(t in qutrit_tensor(), seed in any::<u64>()) {
        let a = LocalOperation::random([3, 3, 3], seed, 0).unwrap();
        let b = LocalOperation::random([3, 3, 3], seed, 1).unwrap();
        let lhs = b.apply(&a.apply(&t).unwrap()).unwrap();
        let rhs = b.compose(&a).unwrap().apply(&t).unwrap();
        prop_assert!((&lhs - &rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
    }
}

#[test]
fn basis_tensors_give_one_signed_pair() {
    for n in 0..27 {
        let t = Tensor3::basis([3, 3, 3], [n / 9, (n / 3) % 3, n % 3]);
        let f = build_exterior_flattening(&t).unwrap();
        let nz: Vec<f64> = f.matrix().iter().filter(|z| z.norm() > 0.0).map(|z| z.re).collect();
        assert_eq!(nz.len(), 2, "basis {n}");
        assert_eq!(nz[0], -nz[1], "basis {n}");
    }
}

#[test]
fn secant_index_dominates_multirank() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let mut configs = std::collections::BTreeSet::new();
    let mut check = |t: &Tensor3, what: &str| {
        let m = t.one_multirank(DEFAULT_RANK_TOL).unwrap();
        let k = secant_family_index(t, DEFAULT_RANK_TOL).unwrap();
        assert!(k >= m.largest(), "{what}: k={k} multirank {m}");
        assert_eq!(k == 1, m.0 == [1, 1, 1], "{what}");
        configs.insert(m.0);
    };
    for (name, t) in three_qutrit_catalog() {
        check(&t, &name);
    }
    for _ in 0..1000 {
        let t = qutrit_tensor().new_tree(&mut runner).unwrap().current();
        if t.norm() > 1e-3 {
            check(&t, "low-rank sample");
        }
    }
    for i in 0..1000 {
        check(&random_tensor([3, 3, 3], 0x5ec, i).unwrap(), "gaussian sample");
    }
    assert!(configs.len() >= 8, "{configs:?}");
}

#[test]
fn catalog_invariants_are_constant_on_orbits() {
    for (i, (name, t)) in three_qutrit_catalog().into_iter().enumerate() {
        let multirank = t.one_multirank(DEFAULT_RANK_TOL).unwrap();
        let k = secant_family_index(&t, DEFAULT_RANK_TOL).unwrap();
        let det = strassen_determinant(&t).unwrap();
        for trial in 0..100 {
            let image = LocalOperation::random([3, 3, 3], 0xc0de + i as u64, trial).unwrap().apply(&t).unwrap();
            assert_eq!(image.one_multirank(DEFAULT_RANK_TOL).unwrap(), multirank, "{name} trial {trial}");
            assert_eq!(secant_family_index(&image, DEFAULT_RANK_TOL).unwrap(), k, "{name} trial {trial}");
            let moved = strassen_determinant(&image).unwrap();
            if k == 5 {
                assert!((moved - det).norm() <= 1e-6 * det.norm(), "{name} trial {trial}: {moved} vs {det}");
            } else {
                assert!(det.norm() <= 1e-12 * t.norm().powi(9), "{name}");
                assert!(moved.norm() <= 1e-9 * image.norm().powi(9), "{name} trial {trial}: {moved}");
            }
        }
    }
}
