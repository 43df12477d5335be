//! Random local operations and orbit-invariance testing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::classify::{classify2, classify3, Classification, ClassifyConfig, FamilyLabel};
use crate::error::{invalid, Error, Result};
use crate::linalg::{singular_values, CMatrix};
use crate::tensor::{Partition, Tensor2, Tensor3};

const MIN_ABS_DET: f64 = 1e-3;
const MAX_CONDITION: f64 = 1e4;
const MAX_REJECTIONS: usize = 100;

/// Complex Gaussian `d x d` matrix rescaled to determinant one, drawn from `rng`.
///
/// Draws with `|det| < 1e-3` or condition number above `1e4` are rejected.
pub fn random_sl_from(d: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    if d == 0 {
        return Err(invalid("matrix dimension must be positive"));
    }
    for _ in 0..MAX_REJECTIONS {
        let m = DMatrix::from_fn(d, d, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        });
        let det = m.clone().determinant();
        if det.norm() < MIN_ABS_DET {
            continue;
        }
        let sv = singular_values(&m);
        if sv[0] / sv[d - 1] > MAX_CONDITION {
            continue;
        }
        let root = det.powf(1.0 / d as f64);
        return Ok(m.map(|z| z / root));
    }
    Err(Error::Sampling(format!(
        "no acceptable SL({d}) sample after {MAX_REJECTIONS} draws"
    )))
}

/// Deterministic [`random_sl_from`] for a seed.
pub fn random_sl(d: usize, seed: u64) -> Result<CMatrix> {
    random_sl_from(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Tensor with independent standard complex Gaussian amplitudes, drawn from
/// the stream `(seed, index)`.
pub fn random_tensor(dims: [usize; 3], seed: u64, index: u64) -> Result<Tensor3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = dims.iter().product();
    let amps = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    Tensor3::new(dims, amps)
}

/// Sum of `k` products of independent complex Gaussian vectors, drawn from
/// the stream `(seed, index)`. Generic such sums lie in the k-secant family.
pub fn random_secant_point(dims: [usize; 3], k: usize, seed: u64, index: u64) -> Tensor3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut draw = |d: usize| -> Vec<Complex64> {
        (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect()
    };
    let mut t = Tensor3::zeros(dims);
    for _ in 0..k {
        let (a, b, c) = (draw(dims[0]), draw(dims[1]), draw(dims[2]));
        t = &t + &Tensor3::product(&a, &b, &c);
    }
    t
}

/// `(A ⊗ B) |t>` for a bipartite state, that is `A M B^T`.
pub fn apply_pair(a: &CMatrix, b: &CMatrix, t: &Tensor2) -> Result<Tensor2> {
    let [d0, d1] = t.dims();
    if a.shape() != (d0, d0) || b.shape() != (d1, d1) {
        return Err(invalid(format!("local operations do not act on a {d0}x{d1} state")));
    }
    let m = a * t.matrix() * b.transpose();
    let amps = (0..d0).flat_map(|i| (0..d1).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect();
    Tensor2::new([d0, d1], amps)
}

/// One invertible matrix per party.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperation {
    mats: [CMatrix; 3],
}

impl LocalOperation {
    pub fn new(mats: [CMatrix; 3]) -> Result<Self> {
        if mats.iter().any(|m| !m.is_square()) {
            return Err(invalid("local operations must be square matrices"));
        }
        Ok(Self { mats })
    }

    pub fn identity(dims: [usize; 3]) -> Self {
        Self {
            mats: dims.map(|d| CMatrix::identity(d, d)),
        }
    }

    /// Three determinant-one samples from the stream `(seed, trial)`.
    pub fn random(dims: [usize; 3], seed: u64, trial: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let [a, b, c] = dims;
        Ok(Self {
            mats: [random_sl_from(a, &mut rng)?, random_sl_from(b, &mut rng)?, random_sl_from(c, &mut rng)?],
        })
    }

    pub fn matrices(&self) -> &[CMatrix; 3] {
        &self.mats
    }

    pub fn dims(&self) -> [usize; 3] {
        std::array::from_fn(|m| self.mats[m].nrows())
    }

    /// `self ∘ other`: applying the result equals applying `other` then `self`.
    pub fn compose(&self, other: &LocalOperation) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(invalid("cannot compose operations of different shapes"));
        }
        Ok(Self {
            mats: std::array::from_fn(|m| &self.mats[m] * &other.mats[m]),
        })
    }

    /// `(A1 ⊗ A2 ⊗ A3) |t>`.
    pub fn apply(&self, t: &Tensor3) -> Result<Tensor3> {
        let dims = t.dims();
        if dims != self.dims() {
            return Err(invalid(format!(
                "operation of shape {:?} does not act on a tensor of shape {dims:?}",
                self.dims()
            )));
        }
        let mut cur = t.clone();
        for mode in 0..3 {
            cur = apply_mode(&cur, &self.mats[mode], mode);
        }
        Ok(cur)
    }
}

fn apply_mode(t: &Tensor3, a: &CMatrix, mode: usize) -> Tensor3 {
    let dims = t.dims();
    let mut out = Tensor3::zeros(dims);
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let z = t[[i, j, k]];
                if z.norm_sqr() == 0.0 {
                    continue;
                }
                let src = [i, j, k];
                let mut dst = src;
                for row in 0..dims[mode] {
                    dst[mode] = row;
                    out[dst] += a[(row, src[mode])] * z;
                }
            }
        }
    }
    out
}

const BALANCE_SWEEPS: usize = 500;
const BALANCE_SPREAD: f64 = 1.0 + 1e-6;
const ROUGH_SWEEPS: usize = 10;
const ROUGH_SPREAD: f64 = 10.0;

/// A point on the orbit of a tensor `t` with `t = scale * back.apply(point)`.
#[derive(Clone, Debug)]
pub struct Balanced {
    pub point: Tensor3,
    pub back: LocalOperation,
    pub scale: f64,
}

impl Balanced {
    /// Maps a tensor near `point` to the corresponding tensor near `t`.
    pub fn pull_back(&self, x: &Tensor3) -> Tensor3 {
        let mut cur = x.clone();
        for mode in 0..3 {
            cur = apply_mode(&cur, &self.back.mats[mode], mode);
        }
        cur.scaled(Complex64::new(self.scale, 0.0))
    }
}

/// Moves `t` along its orbit towards equal one-party marginals by
/// whitening each reduced density matrix on its support, until every
/// marginal spectrum is flat on its support or the sweep budget runs out.
/// The returned point has unit norm.
pub fn balance_marginals(t: &Tensor3, rank_tol: f64) -> Balanced {
    balance_marginals_with(t, rank_tol, BALANCE_SWEEPS, BALANCE_SPREAD)
}

/// A few balancing sweeps, stopping once no marginal spectrum spreads by
/// more than a factor 10. Unlike [`balance_marginals`] this stays at a
/// bounded distance from `t` when the orbit is not closed.
pub fn rough_balance(t: &Tensor3, rank_tol: f64) -> Balanced {
    balance_marginals_with(t, rank_tol, ROUGH_SWEEPS, ROUGH_SPREAD)
}

/// Balancing with an explicit sweep budget and target spread (ratio of
/// largest to smallest nonzero marginal eigenvalue).
pub fn balance_marginals_with(t: &Tensor3, rank_tol: f64, max_sweeps: usize, max_spread: f64) -> Balanced {
    let dims = t.dims();
    let mut scale = t.norm();
    let mut cur = t.normalized();
    let mut back = LocalOperation::identity(dims);
    for _ in 0..max_sweeps {
        let mut spread: f64 = 1.0;
        for mode in 0..3 {
            let rho = cur.reduced_density(&Partition::single(mode));
            let eig = rho.symmetric_eigen();
            let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
            let cut = rank_tol * rank_tol * top;
            let kept: Vec<f64> = eig.eigenvalues.iter().copied().filter(|&l| l > cut).collect();
            let low = kept.iter().copied().fold(f64::INFINITY, f64::min);
            spread = spread.max(top / low);
            let factor = eig.eigenvalues.map(|l| if l > cut { (top / l).sqrt() } else { 1.0 });
            let u = &eig.eigenvectors;
            let diag = |f: &dyn Fn(f64) -> f64| CMatrix::from_diagonal(&factor.map(|x| Complex64::new(f(x), 0.0)));
            let a = u * diag(&|x| x) * u.adjoint();
            let a_inv = u * diag(&|x| 1.0 / x) * u.adjoint();
            let moved = apply_mode(&cur, &a, mode);
            let n = moved.norm();
            scale *= n;
            cur = moved.scaled(Complex64::new(1.0 / n, 0.0));
            back.mats[mode] = &back.mats[mode] * a_inv;
        }
        if spread <= max_spread {
            break;
        }
    }
    Balanced { point: cur, back, scale }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitTrial {
    pub trial: u64,
    pub label: Option<FamilyLabel>,
    pub error: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub baseline: FamilyLabel,
    pub trials: usize,
    pub agreements: usize,
    /// Trials whose label differs from the baseline or failed to classify.
    pub disagreements: Vec<OrbitTrial>,
    /// Trials that agreed but had a rank decision close to its threshold.
    pub near_threshold: Vec<u64>,
}

impl OrbitReport {
    pub fn passed(&self) -> bool {
        self.agreements == self.trials
    }

    pub fn agreement_rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.agreements as f64 / self.trials as f64
        }
    }
}

/// Classifies `t` and `trials` random local images of it; trial `i` uses the
/// stream `(seed, i)`.
pub fn orbit_invariance_test(t: &Tensor3, trials: usize, seed: u64, cfg: &ClassifyConfig) -> Result<OrbitReport> {
    let baseline = classify3(t, cfg)?.label;
    orbit_report(baseline, trials, |trial| {
        let image = LocalOperation::random(t.dims(), seed, trial)?.apply(t)?;
        classify3(&image, cfg)
    })
}

/// [`orbit_invariance_test`] for a bipartite state.
pub fn orbit_invariance_test2(t: &Tensor2, trials: usize, seed: u64, cfg: &ClassifyConfig) -> Result<OrbitReport> {
    let baseline = classify2(t, cfg)?.label;
    let [d0, d1] = t.dims();
    orbit_report(baseline, trials, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let a = random_sl_from(d0, &mut rng)?;
        let b = random_sl_from(d1, &mut rng)?;
        classify2(&apply_pair(&a, &b, t)?, cfg)
    })
}

fn orbit_report(
    baseline: FamilyLabel,
    trials: usize,
    classify_trial: impl Fn(u64) -> Result<Classification>,
) -> Result<OrbitReport> {
    let mut report = OrbitReport {
        baseline: baseline.clone(),
        trials,
        agreements: 0,
        disagreements: Vec::new(),
        near_threshold: Vec::new(),
    };
    for trial in 0..trials as u64 {
        match classify_trial(trial) {
            Ok(c) => {
                let warnings = c.evidence.warnings();
                if c.label.same_class(&baseline) {
                    report.agreements += 1;
                    if !warnings.is_empty() {
                        report.near_threshold.push(trial);
                    }
                } else {
                    report.disagreements.push(OrbitTrial {
                        trial,
                        label: Some(c.label),
                        error: None,
                        warnings,
                    });
                }
            }
            Err(Error::Sampling(msg)) => return Err(Error::Sampling(msg)),
            Err(e) => report.disagreements.push(OrbitTrial {
                trial,
                label: None,
                error: Some(e.to_string()),
                warnings: Vec::new(),
            }),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_determinant_and_determinism() {
        for seed in 0..20 {
            let m = random_sl(3, seed).unwrap();
            assert!((m.clone().determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            assert_eq!(m, random_sl(3, seed).unwrap());
        }
        assert_ne!(random_sl(3, 1).unwrap(), random_sl(3, 2).unwrap());
    }

    #[test]
    fn identity_leaves_tensor() {
        let t = Tensor3::from_kets(3, &["001", "010", "100"]);
        assert_eq!(LocalOperation::identity([3, 3, 3]).apply(&t).unwrap(), t);
        assert_eq!(LocalOperation::identity([2, 2, 2]).matrices()[0], CMatrix::identity(2, 2));
    }

    #[test]
    fn product_state_stays_product() {
        let op = LocalOperation::random([3, 3, 3], 7, 0).unwrap();
        let t = op.apply(&Tensor3::from_kets(3, &["000"])).unwrap();
        assert_eq!(t.one_multirank(1e-8).unwrap().0, [1, 1, 1]);
        let cols: Vec<Vec<Complex64>> = (0..3).map(|m| op.matrices()[m].column(0).iter().copied().collect()).collect();
        let expected = Tensor3::product(&cols[0], &cols[1], &cols[2]);
        assert!((&t - &expected).norm() < 1e-12);
    }

    #[test]
    fn flattening_transforms_by_conjugation() {
        let op = LocalOperation::random([3, 3, 3], 3, 1).unwrap();
        let t = Tensor3::from_kets(3, &["000", "012", "121", "202", "111"]);
        let image = op.apply(&t).unwrap();
        let [a, b, c] = op.matrices();
        let p = Partition::single(0);
        let kron = b.kronecker(c);
        let expected = a * t.flatten(&p) * kron.transpose();
        assert!((image.flatten(&p) - expected).norm() < 1e-10);
    }

    #[test]
    fn apply_respects_composition() {
        let t = Tensor3::from_kets(3, &["000", "111", "012"]);
        let a = LocalOperation::random([3, 3, 3], 11, 0).unwrap();
        let b = LocalOperation::random([3, 3, 3], 11, 1).unwrap();
        let lhs = b.apply(&a.apply(&t).unwrap()).unwrap();
        let rhs = b.compose(&a).unwrap().apply(&t).unwrap();
        assert!((&lhs - &rhs).norm() < 1e-9 * lhs.norm());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let op = LocalOperation::identity([2, 2, 2]);
        assert!(op.apply(&Tensor3::from_kets(3, &["000"])).is_err());
    }

    #[test]
    fn balancing_pulls_back_to_the_input() {
        let t = crate::catalog::x3_curve(0.05).scaled(Complex64::new(2.0, 0.0));
        let b = balance_marginals(&t, 1e-8);
        assert!((b.point.norm() - 1.0).abs() < 1e-12);
        assert!((&b.pull_back(&b.point) - &t).norm() < 1e-9 * t.norm());
        for m in 0..3 {
            let rho = b.point.reduced_density(&Partition::single(m));
            assert!((rho - CMatrix::identity(3, 3).map(|z| z / 3.0)).norm() < 1e-5);
        }
    }

    #[test]
    fn random_tensors_are_seeded() {
        let a = random_tensor([3, 3, 3], 1, 0).unwrap();
        assert_eq!(a, random_tensor([3, 3, 3], 1, 0).unwrap());
        assert_ne!(a, random_tensor([3, 3, 3], 1, 1).unwrap());
    }

    #[test]
    fn secant_points_have_their_index() {
        for k in 1..=5 {
            let t = random_secant_point([3, 3, 3], k, 9, k as u64);
            assert_eq!(crate::exterior::secant_family_index(&t, 1e-8).unwrap(), k);
        }
    }

    #[test]
    fn bipartite_orbit_agrees() {
        let t = Tensor2::from_kets(3, &["00", "11"]);
        let r = orbit_invariance_test2(&t, 20, 5, &ClassifyConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.disagreements);
    }

    #[test]
    fn separable_orbit_agrees() {
        let t = Tensor3::from_kets(3, &["000"]);
        let r = orbit_invariance_test(&t, 20, 5, &ClassifyConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.disagreements);
    }
}
