//! CP decompositions by alternating least squares, used as tensor-rank upper
//! bound witnesses and to detect border-rank degeneracy.
//!
//! A fit is *degenerate* when it approaches the tensor only through rank-one
//! terms whose weights blow up and cancel. That is the numerical signature
//! of a tensor whose border rank is below its rank.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::exterior::border_rank_lower_bound;
use crate::linalg::{CMatrix, DEFAULT_RANK_TOL};
use crate::slocc::{balance_marginals, rough_balance, Balanced};
use crate::tensor::Tensor3;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlsConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative Frobenius residual counted as an exact fit.
    pub tol_fit: f64,
    /// A fit is degenerate when its largest weight exceeds `degeneracy_ratio · ‖t‖`,
    /// or when the run ends on the sweep budget with diverging, cancelling terms.
    pub degeneracy_ratio: f64,
    /// Residual below which a blown-up fit counts as evidence of degeneracy.
    pub degenerate_fit: f64,
    pub seed: u64,
}

impl Default for AlsConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 2000,
            tol_fit: 1e-8,
            degeneracy_ratio: 1e3,
            degenerate_fit: 1e-2,
            seed: 0x5eed,
        }
    }
}

impl AlsConfig {
    /// Twice the restarts and four times the sweep budget, from fresh seeds.
    pub fn escalated(&self) -> Self {
        Self {
            restarts: self.restarts * 2,
            max_iters: self.max_iters * 4,
            seed: self.seed.wrapping_add(1),
            ..self.clone()
        }
    }
}

/// Weighted sum of rank-one terms `Σ λ_q a_q ⊗ b_q ⊗ c_q`.
#[derive(Clone, Debug, Serialize)]
pub struct CpDecomposition {
    pub rank: usize,
    pub weights: Vec<Complex64>,
    /// One `d_i x r` matrix per mode with unit-norm columns.
    #[serde(skip)]
    pub factors: [CMatrix; 3],
    pub residual: f64,
    pub degenerate: bool,
    pub iterations: usize,
    /// Relative residual after each sweep.
    #[serde(skip)]
    pub history: Vec<f64>,
    /// Largest rank-one term norm after each sweep.
    #[serde(skip)]
    pub weight_history: Vec<f64>,
}

impl CpDecomposition {
    pub fn max_weight(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }

    pub fn reconstruct(&self) -> Tensor3 {
        let dims = [self.factors[0].nrows(), self.factors[1].nrows(), self.factors[2].nrows()];
        let mut t = Tensor3::zeros(dims);
        for q in 0..self.rank {
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    let ab = self.weights[q] * self.factors[0][(i, q)] * self.factors[1][(j, q)];
                    for k in 0..dims[2] {
                        t[[i, j, k]] += ab * self.factors[2][(k, q)];
                    }
                }
            }
        }
        t
    }

    /// Exact (below `tol_fit`) and not degenerate.
    pub fn is_witness(&self, tol_fit: f64) -> bool {
        self.residual < tol_fit && !self.degenerate
    }
}

/// Dense working state of one ALS run; factors are row-major `d x r`.
struct Als<'a> {
    t: &'a Tensor3,
    dims: [usize; 3],
    r: usize,
    factors: [Vec<Complex64>; 3],
    gram: Vec<Complex64>,
    rhs: Vec<Complex64>,
    chol: Vec<Complex64>,
    norm: f64,
}

impl<'a> Als<'a> {
    fn new(t: &'a Tensor3, r: usize, rng: &mut ChaCha8Rng) -> Self {
        let dims = t.dims();
        let mut draw = |n: usize| -> Vec<Complex64> {
            (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(re, im)
                })
                .collect()
        };
        let factors = [draw(dims[0] * r), draw(dims[1] * r), draw(dims[2] * r)];
        Self::with_factors(t, r, factors)
    }

    fn from_decomposition(t: &'a Tensor3, dec: &CpDecomposition) -> Self {
        let r = dec.rank;
        let factors = std::array::from_fn(|m| {
            let mut out = Vec::with_capacity(dec.factors[m].nrows() * r);
            for row in 0..dec.factors[m].nrows() {
                for a in 0..r {
                    let w = if m == 0 { dec.weights[a] } else { Complex64::new(1.0, 0.0) };
                    out.push(dec.factors[m][(row, a)] * w);
                }
            }
            out
        });
        Self::with_factors(t, r, factors)
    }

    fn with_factors(t: &'a Tensor3, r: usize, factors: [Vec<Complex64>; 3]) -> Self {
        let dims = t.dims();
        let dmax = *dims.iter().max().unwrap();
        Self {
            t,
            dims,
            r,
            factors,
            gram: vec![ZERO; r * r],
            rhs: vec![ZERO; dmax * r],
            chol: vec![ZERO; r * r],
            norm: t.norm(),
        }
    }

    /// Exact least-squares update of one mode with the other two fixed.
    fn update(&mut self, mode: usize) {
        let r = self.r;
        let (p, q) = match mode {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for a in 0..r {
            for b in 0..r {
                let mut gp = ZERO;
                for row in 0..self.dims[p] {
                    gp += self.factors[p][row * r + a].conj() * self.factors[p][row * r + b];
                }
                let mut gq = ZERO;
                for row in 0..self.dims[q] {
                    gq += self.factors[q][row * r + a].conj() * self.factors[q][row * r + b];
                }
                self.gram[a * r + b] = gp * gq;
            }
        }

        let n_rows = self.dims[mode];
        self.rhs[..n_rows * r].fill(ZERO);
        let amps = self.t.amps();
        let [d0, d1, d2] = self.dims;
        let [f0, f1, f2] = &self.factors;
        for i in 0..d0 {
            for j in 0..d1 {
                for k in 0..d2 {
                    let z = amps[(i * d1 + j) * d2 + k];
                    if z == ZERO {
                        continue;
                    }
                    match mode {
                        0 => {
                            for a in 0..r {
                                self.rhs[i * r + a] += z * (f1[j * r + a] * f2[k * r + a]).conj();
                            }
                        }
                        1 => {
                            for a in 0..r {
                                self.rhs[j * r + a] += z * (f0[i * r + a] * f2[k * r + a]).conj();
                            }
                        }
                        _ => {
                            for a in 0..r {
                                self.rhs[k * r + a] += z * (f0[i * r + a] * f1[j * r + a]).conj();
                            }
                        }
                    }
                }
            }
        }

        if self.cholesky() {
            for row in 0..n_rows {
                let x = self.chol_solve(row);
                self.factors[mode][row * r..(row + 1) * r].copy_from_slice(&x);
            }
        } else {
            let g = DMatrix::from_row_slice(r, r, &self.gram);
            let pinv = g
                .pseudo_inverse(1e-14)
                .unwrap_or_else(|_| DMatrix::zeros(r, r));
            for row in 0..n_rows {
                for a in 0..r {
                    let mut acc = ZERO;
                    for b in 0..r {
                        acc += pinv[(a, b)] * self.rhs[row * r + b];
                    }
                    self.factors[mode][row * r + a] = acc;
                }
            }
        }
    }

    /// Lower Cholesky factor of the Hermitian gram matrix; false when it is
    /// not numerically positive definite.
    fn cholesky(&mut self) -> bool {
        let r = self.r;
        let scale = (0..r).map(|a| self.gram[a * r + a].re).fold(0.0, f64::max);
        if !(scale > 0.0) || !scale.is_finite() {
            return false;
        }
        self.chol.fill(ZERO);
        for a in 0..r {
            for b in 0..=a {
                let mut s = self.gram[a * r + b];
                for c in 0..b {
                    s -= self.chol[a * r + c] * self.chol[b * r + c].conj();
                }
                if a == b {
                    if s.re <= 1e-13 * scale {
                        return false;
                    }
                    self.chol[a * r + a] = Complex64::new(s.re.sqrt(), 0.0);
                } else {
                    self.chol[a * r + b] = s / self.chol[b * r + b].re;
                }
            }
        }
        true
    }

    fn chol_solve(&self, row: usize) -> Vec<Complex64> {
        let r = self.r;
        let rhs = &self.rhs[row * r..(row + 1) * r];
        let mut y = vec![ZERO; r];
        for a in 0..r {
            let mut s = rhs[a];
            for c in 0..a {
                s -= self.chol[a * r + c] * y[c];
            }
            y[a] = s / self.chol[a * r + a].re;
        }
        let mut x = vec![ZERO; r];
        for a in (0..r).rev() {
            let mut s = y[a];
            for c in a + 1..r {
                s -= self.chol[c * r + a].conj() * x[c];
            }
            x[a] = s / self.chol[a * r + a].re;
        }
        x
    }

    /// Rescales every rank-one term so its three factor columns share the
    /// same norm; the represented tensor is unchanged. Returns the largest
    /// term norm.
    fn balance(&mut self) -> f64 {
        let r = self.r;
        let mut largest: f64 = 0.0;
        for a in 0..r {
            let norms: [f64; 3] = std::array::from_fn(|m| {
                (0..self.dims[m])
                    .map(|row| self.factors[m][row * r + a].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            });
            let prod = norms.iter().product::<f64>();
            if !(prod > 0.0) || !prod.is_finite() {
                continue;
            }
            largest = largest.max(prod);
            let target = prod.cbrt();
            for (m, n) in norms.iter().enumerate() {
                let s = target / n;
                for row in 0..self.dims[m] {
                    self.factors[m][row * r + a] *= s;
                }
            }
        }
        largest
    }

    fn residual(&self) -> f64 {
        let r = self.r;
        let [d0, d1, d2] = self.dims;
        let [f0, f1, f2] = &self.factors;
        let amps = self.t.amps();
        let mut err = 0.0;
        for i in 0..d0 {
            for j in 0..d1 {
                for k in 0..d2 {
                    let mut rec = ZERO;
                    for a in 0..r {
                        rec += f0[i * r + a] * f1[j * r + a] * f2[k * r + a];
                    }
                    err += (amps[(i * d1 + j) * d2 + k] - rec).norm_sqr();
                }
            }
        }
        err.sqrt() / self.norm
    }

    fn into_decomposition(self, run: Trajectory, cfg: &AlsConfig) -> CpDecomposition {
        let r = self.r;
        let mut weights = vec![Complex64::new(1.0, 0.0); r];
        let factors: [CMatrix; 3] = std::array::from_fn(|m| {
            let mut mat = CMatrix::from_row_slice(self.dims[m], r, &self.factors[m]);
            for (a, w) in weights.iter_mut().enumerate() {
                let n = mat.column(a).norm();
                if n > 0.0 {
                    mat.column_mut(a).unscale_mut(n);
                    *w *= n;
                } else {
                    *w = ZERO;
                }
            }
            mat
        });
        let mut dec = CpDecomposition {
            rank: r,
            weights,
            factors,
            residual: 0.0,
            degenerate: false,
            iterations: run.residuals.len(),
            history: run.residuals,
            weight_history: run.weights,
        };
        let diff = &dec.reconstruct() - self.t;
        dec.residual = diff.norm() / self.norm;
        dec.degenerate = dec.residual < cfg.degenerate_fit
            && dec.residual >= cfg.tol_fit
            && (dec.max_weight() > cfg.degeneracy_ratio * self.norm
                || (!run.stalled && diverging(&dec, self.norm)));
        dec
    }
}

struct Trajectory {
    residuals: Vec<f64>,
    weights: Vec<f64>,
    stalled: bool,
}

const TREND_MIN_SWEEPS: usize = 200;
const TREND_WEIGHT_GROWTH: f64 = 1.1;
const TREND_RESIDUAL_DROP: f64 = 0.8;
const TREND_CANCELLATION: f64 = 4.0;

/// Swamp signature over the second half of a run that hit the sweep budget:
/// the residual keeps falling while the largest term keeps growing, and the
/// terms cancel (their total weight is several times the tensor norm).
fn diverging(dec: &CpDecomposition, norm: f64) -> bool {
    let n = dec.history.len();
    if n < TREND_MIN_SWEEPS {
        return false;
    }
    let half = n / 2;
    let total: f64 = dec.weights.iter().map(|w| w.norm()).sum();
    dec.history[n - 1] < TREND_RESIDUAL_DROP * dec.history[half]
        && dec.weight_history[n - 1] > TREND_WEIGHT_GROWTH * dec.weight_history[half]
        && total > TREND_CANCELLATION * norm
}

const STALL_WINDOW: usize = 50;
const JUMP_START: f64 = 1.5;
const JUMP_GROWTH: f64 = 1.5;
const JUMP_MAX: f64 = 1e3;
const STALL_REL: f64 = 1e-9;

/// One ALS run from the random start selected by `(seed, restart)`.
pub fn cp_als_single(t: &Tensor3, r: usize, restart: u64, cfg: &AlsConfig) -> CpDecomposition {
    assert!(r >= 1, "CP rank must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart);
    run_als(Als::new(t, r, &mut rng), cfg)
}

/// ALS on `t` started from the terms of `start`.
pub fn cp_als_from(t: &Tensor3, start: &CpDecomposition, cfg: &AlsConfig) -> CpDecomposition {
    assert_eq!(start.factors[0].nrows(), t.dims()[0], "start does not match the tensor shape");
    run_als(Als::from_decomposition(t, start), cfg)
}

fn run_als(mut als: Als<'_>, cfg: &AlsConfig) -> CpDecomposition {
    let mut run = Trajectory {
        residuals: Vec::with_capacity(cfg.max_iters.min(4096)),
        weights: Vec::with_capacity(cfg.max_iters.min(4096)),
        stalled: false,
    };
    if als.norm == 0.0 {
        return als.into_decomposition(run, cfg);
    }
    let mut jump = JUMP_START;
    for it in 0..cfg.max_iters {
        let previous = als.factors.clone();
        for mode in 0..3 {
            als.update(mode);
        }
        let mut res = als.residual();
        // Extrapolate along the last sweep's direction; keep the step only
        // when it lowers the residual so the history stays monotone.
        if it >= 1 {
            let swept = std::mem::replace(&mut als.factors, previous);
            let from = std::mem::take(&mut als.factors);
            als.factors = std::array::from_fn(|m| {
                from[m]
                    .iter()
                    .zip(&swept[m])
                    .map(|(o, n)| o + (n - o) * jump)
                    .collect()
            });
            let ext = als.residual();
            if ext < res {
                res = ext;
                jump = (jump * JUMP_GROWTH).min(JUMP_MAX);
            } else {
                als.factors = swept;
                jump = JUMP_START;
            }
        }
        run.weights.push(als.balance());
        run.residuals.push(res);
        if !res.is_finite() || res < cfg.tol_fit {
            break;
        }
        let h = &run.residuals;
        if it >= STALL_WINDOW && h[it - STALL_WINDOW] - res < STALL_REL * h[it - STALL_WINDOW] {
            run.stalled = true;
            break;
        }
    }
    als.into_decomposition(run, cfg)
}

/// All restarts at rank `r`, in restart order.
pub fn cp_als_restarts(t: &Tensor3, r: usize, cfg: &AlsConfig) -> Vec<CpDecomposition> {
    (0..cfg.restarts as u64).map(|s| cp_als_single(t, r, s, cfg)).collect()
}

/// Best of `cfg.restarts` ALS runs: the exact non-degenerate fit with the
/// smallest weights if one exists, otherwise the lowest residual.
pub fn cp_als(t: &Tensor3, r: usize, cfg: &AlsConfig) -> CpDecomposition {
    let runs = cp_als_restarts(t, r, cfg);
    pick_best(runs, cfg.tol_fit)
}

fn pick_best(runs: Vec<CpDecomposition>, tol_fit: f64) -> CpDecomposition {
    let mut witnesses: Vec<_> = runs.iter().filter(|d| d.is_witness(tol_fit)).cloned().collect();
    if !witnesses.is_empty() {
        witnesses.sort_by(|a, b| a.max_weight().total_cmp(&b.max_weight()));
        return witnesses.swap_remove(0);
    }
    runs.into_iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .expect("at least one restart")
}

/// A tensor to bound, optionally with better conditioned points of its orbit
/// as further places to look for fits. Exact fits found there are carried
/// back and refined against the tensor itself, so a witness is always exact
/// for the tensor.
#[derive(Clone, Debug)]
pub struct FitProblem<'a> {
    target: &'a Tensor3,
    points: Vec<Balanced>,
}

impl<'a> FitProblem<'a> {
    pub fn direct(t: &'a Tensor3) -> Self {
        Self { target: t, points: Vec::new() }
    }

    /// Also searches at a roughly and at a fully marginal-balanced point of
    /// the orbit of `t`.
    pub fn balanced(t: &'a Tensor3, rank_tol: f64) -> Self {
        Self {
            target: t,
            points: vec![rough_balance(t, rank_tol), balance_marginals(t, rank_tol)],
        }
    }

    pub fn target(&self) -> &Tensor3 {
        self.target
    }

    /// Restart `s` at rank `r` on the tensor, then at each orbit point until
    /// one gives an exact fit of the tensor. The result is that fit, or else
    /// the fit of the tensor itself, flagged degenerate when any run was.
    pub fn restart(&self, r: usize, s: u64, cfg: &AlsConfig) -> CpDecomposition {
        let mut direct = cp_als_single(self.target, r, s, cfg);
        if direct.is_witness(cfg.tol_fit) {
            return direct;
        }
        for b in &self.points {
            let moved = cp_als_single(&b.point, r, s, cfg);
            if moved.is_witness(cfg.tol_fit) {
                let polished = cp_als_from(self.target, &pull_back(&moved, b), cfg);
                if polished.is_witness(cfg.tol_fit) {
                    return polished;
                }
            }
            direct.degenerate |= moved.degenerate;
        }
        direct
    }
}

fn pull_back(dec: &CpDecomposition, b: &Balanced) -> CpDecomposition {
    let back = b.back.matrices();
    CpDecomposition {
        weights: dec.weights.iter().map(|w| w * b.scale).collect(),
        factors: std::array::from_fn(|m| &back[m] * &dec.factors[m]),
        ..dec.clone()
    }
}

/// Summary of the restarts at one target rank.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankAttempt {
    pub rank: usize,
    pub restarts_run: usize,
    pub best_residual: f64,
    /// Largest weight of the lowest-residual fit.
    pub best_max_weight: f64,
    pub degenerate_restarts: usize,
    /// True when some restart produced an exact non-degenerate fit.
    pub witnessed: bool,
}

/// Runs restarts at rank `r`, stopping at the first exact non-degenerate fit.
pub fn attempt_rank(t: &Tensor3, r: usize, cfg: &AlsConfig) -> (RankAttempt, Option<CpDecomposition>) {
    attempt_rank_in(&FitProblem::direct(t), r, cfg)
}

/// [`attempt_rank`] for a [`FitProblem`].
pub fn attempt_rank_in(p: &FitProblem<'_>, r: usize, cfg: &AlsConfig) -> (RankAttempt, Option<CpDecomposition>) {
    let mut best: Option<CpDecomposition> = None;
    let mut degenerate = 0;
    let mut run = 0;
    for s in 0..cfg.restarts as u64 {
        let dec = p.restart(r, s, cfg);
        run += 1;
        degenerate += dec.degenerate as usize;
        let witnessed = dec.is_witness(cfg.tol_fit);
        if best.as_ref().is_none_or(|b| dec.residual < b.residual) || witnessed {
            best = Some(dec);
        }
        if witnessed {
            break;
        }
    }
    let best = best.expect("at least one restart");
    let witnessed = best.is_witness(cfg.tol_fit);
    let attempt = RankAttempt {
        rank: r,
        restarts_run: run,
        best_residual: best.residual,
        best_max_weight: best.max_weight(),
        degenerate_restarts: degenerate,
        witnessed,
    };
    (attempt, witnessed.then_some(best))
}

#[derive(Clone, Debug, Serialize)]
pub struct RankWitness {
    /// Smallest rank with an exact non-degenerate fit, or `r_max + 1` when
    /// none was found (inconclusive, not a lower bound).
    pub upper: usize,
    pub found: bool,
    pub attempts: Vec<RankAttempt>,
    pub certificate: Option<CpDecomposition>,
}

/// Searches ranks upward from the flattening lower bound (ranks below it
/// cannot fit exactly) to `r_max`.
pub fn tensor_rank_witness(t: &Tensor3, r_max: usize, cfg: &AlsConfig) -> RankWitness {
    tensor_rank_witness_in(&FitProblem::direct(t), r_max, cfg)
}

/// [`tensor_rank_witness`] for a [`FitProblem`].
pub fn tensor_rank_witness_in(p: &FitProblem<'_>, r_max: usize, cfg: &AlsConfig) -> RankWitness {
    let start = lower_bound(p.target()).max(1);
    let mut attempts = Vec::new();
    for r in start..=r_max {
        let (attempt, cert) = attempt_rank_in(p, r, cfg);
        attempts.push(attempt);
        if let Some(cert) = cert {
            return RankWitness {
                upper: r,
                found: true,
                attempts,
                certificate: Some(cert),
            };
        }
    }
    RankWitness {
        upper: r_max + 1,
        found: false,
        attempts,
        certificate: None,
    }
}

fn lower_bound(t: &Tensor3) -> usize {
    if t.is_zero() {
        return 0;
    }
    match border_rank_lower_bound(t, DEFAULT_RANK_TOL) {
        Ok(b) => b.bound,
        Err(_) => t.one_multirank(DEFAULT_RANK_TOL).map(|m| m.largest()).unwrap_or(1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangentVerdict {
    ProperSecant,
    Tangent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentReport {
    pub verdict: TangentVerdict,
    /// Smallest rank witnessed by an exact non-degenerate fit, if any.
    pub witness_rank: Option<usize>,
    pub attempts: Vec<RankAttempt>,
}

/// Splits a k-secant family member into proper secant or tangent.
///
/// Proper when an exact non-degenerate rank-k fit exists. Tangent when the
/// rank-k fits only approach the tensor degenerately and an exact fit exists
/// at some rank in `k+1..=r_max`. Anything else is inconclusive.
pub fn tangent_discriminator(t: &Tensor3, k: usize, r_max: usize, cfg: &AlsConfig) -> TangentReport {
    tangent_discriminator_in(&FitProblem::direct(t), k, r_max, cfg)
}

/// [`tangent_discriminator`] for a [`FitProblem`].
pub fn tangent_discriminator_in(p: &FitProblem<'_>, k: usize, r_max: usize, cfg: &AlsConfig) -> TangentReport {
    let (at_k, cert) = attempt_rank_in(p, k, cfg);
    let degenerate_at_k = at_k.degenerate_restarts > 0;
    let mut attempts = vec![at_k];
    if cert.is_some() {
        return TangentReport {
            verdict: TangentVerdict::ProperSecant,
            witness_rank: Some(k),
            attempts,
        };
    }
    for r in k + 1..=r_max {
        let (attempt, cert) = attempt_rank_in(p, r, cfg);
        attempts.push(attempt);
        if cert.is_some() {
            let verdict = if degenerate_at_k {
                TangentVerdict::Tangent
            } else {
                TangentVerdict::Inconclusive
            };
            return TangentReport {
                verdict,
                witness_rank: Some(r),
                attempts,
            };
        }
    }
    TangentReport {
        verdict: TangentVerdict::Inconclusive,
        witness_rank: None,
        attempts,
    }
}
