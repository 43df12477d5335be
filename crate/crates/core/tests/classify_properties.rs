use entangle_core::catalog::{dicke, x3_curve, x3_curve_limit};
use entangle_core::classify::{classify2, classify3, Cell, ClassifyConfig};
use entangle_core::formulas::{qubit_dicke_ranks, waring_rank, MonomialSpec};
use entangle_core::tensor::{Tensor2, Tensor3};
use entangle_core::witness::TangentVerdict;
use entangle_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rank_r_pair(r: usize, rng: &mut ChaCha8Rng) -> Tensor2 {
    let mut amps = vec![Complex64::new(0.0, 0.0); 9];
    for _ in 0..r {
        let u: Vec<Complex64> = (0..3).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let v: Vec<Complex64> = (0..3).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        for i in 0..3 {
            for j in 0..3 {
                amps[3 * i + j] += u[i] * v[j];
            }
        }
    }
    Tensor2::new([3, 3], amps).unwrap()
}

#[test]
fn two_party_labels_match_embedded_three_party_labels() {
    let cfg = ClassifyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x2b);
    for i in 0..100 {
        let t = random_rank_r_pair(1 + i % 3, &mut rng);
        let two = classify2(&t, &cfg).unwrap().label;
        let three = classify3(&t.extend_with_basis(3, 0), &cfg).unwrap().label;
        assert_eq!(two.k, three.k, "sample {i}");
        assert_eq!(three.tangent, TangentVerdict::ProperSecant, "sample {i}");
        let expected = match two.cell {
            Cell::TwoSep => Cell::Sep,
            Cell::TwoGhz1 => Cell::B1 { i: 3 },
            Cell::TwoGhz2 => Cell::B2 { i: 3 },
            ref other => panic!("unexpected two-party cell {other}"),
        };
        assert_eq!(three.cell, expected, "sample {i}");
        assert_eq!(two.k, 1 + i % 3, "sample {i}");
    }
}

#[test]
fn curve_is_secant_and_its_limit_is_tangent() {
    let cfg = ClassifyConfig::default();
    for eps in [1.0, 0.1, 0.01] {
        let label = classify3(&x3_curve(eps), &cfg).unwrap().label;
        assert_eq!((label.k, label.tangent, label.cell), (3, TangentVerdict::ProperSecant, Cell::Ghz2), "eps {eps}");
    }
    let limit = classify3(&x3_curve_limit(), &cfg).unwrap().label;
    assert_eq!((limit.k, limit.tangent), (3, TangentVerdict::Tangent));
}

fn excitations() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (2usize..=5).prop_flat_map(|n| {
        prop::collection::vec(0usize..=n, 3).prop_filter_map("sum to n", move |mut j| {
            j[2] = n.checked_sub(j[0] + j[1])?;
            Some((n, j))
        })
    })
}

proptest! {
    #[test]
    fn dicke_states_are_symmetric((n, j) in excitations()) {
        let t = dicke(n, &j, 3).unwrap();
        prop_assert!(t.is_symmetric());
        if n == 3 {
            let t3: Tensor3 = t.to_tensor3().unwrap();
            for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                prop_assert_eq!(&t3.permute_modes(perm), &t3);
            }
        }
    }

    #[test]
    fn separable_iff_unit_multirank(amps in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 9), product in any::<bool>()) {
        let v: Vec<Complex64> = amps.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let t = if product {
            Tensor3::product(&v[0..3], &v[3..6], &v[6..9])
        } else {
            &Tensor3::product(&v[0..3], &v[3..6], &v[6..9]) + &Tensor3::product(&v[6..9], &v[0..3], &v[3..6])
        };
        prop_assume!(t.norm() > 1e-3);
        let label = classify3(&t, &ClassifyConfig::default()).unwrap().label;
        prop_assert_eq!(label.k == 1, label.multirank == vec![1, 1, 1]);
        prop_assert_eq!(label.k == 1, product);
    }
}

#[test]
fn dicke_ranks_match_binary_monomials() {
    for n in 2..=20u64 {
        for l in 1..n {
            let m = MonomialSpec::new(&[n - l, l]).unwrap();
            assert_eq!(qubit_dicke_ranks(n, l).unwrap().rank, waring_rank(&m).value, "n={n} l={l}");
        }
    }
}
