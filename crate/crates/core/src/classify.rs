//! Three-qutrit and two-qutrit family classification.
//!
//! The secant index comes from the exterior flattening, the secant/tangent
//! split from CP fits, and the subfamily from the one-multirank. The result
//! is a cell of the fine-structure grid.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{invalid, unsupported, Error, Result};
use crate::exterior::{build_exterior_flattening, determinant_is_nonzero, DEFAULT_DET_TOL, MODE_ORDERS};
use crate::linalg::{numerical_rank, rank_of_spectrum, singular_values, threshold_margins, DEFAULT_RANK_TOL};
use crate::tensor::{MultiRank, Partition, Tensor2, Tensor3};
use crate::witness::{
    attempt_rank_in, tangent_discriminator_in, tensor_rank_witness_in, AlsConfig, FitProblem, RankAttempt, TangentReport,
    TangentVerdict,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyConfig {
    pub rank_tol: f64,
    pub det_tol: f64,
    pub als: AlsConfig,
    /// Largest CP rank tried by the witness search.
    pub r_max: usize,
    /// Also search for a tensor-rank witness in the four- and five-secant
    /// families, where the tangent split does not need one.
    pub witness_high_rank: bool,
    /// Repeat the tangent split with a larger fit budget when the first pass
    /// is inconclusive, lands outside the table, or witnesses a rank above
    /// `k + 1`.
    pub escalate: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            rank_tol: DEFAULT_RANK_TOL,
            det_tol: DEFAULT_DET_TOL,
            als: AlsConfig::default(),
            r_max: 5,
            witness_high_rank: false,
            escalate: true,
        }
    }
}

/// Tensor-rank refinement of the (333)'_3 cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Refinement {
    /// Tensor rank four.
    X3,
    /// Tensor rank five.
    Y3,
}

/// A cell of the three-qutrit or two-qutrit classification table.
///
/// Positions `i` are 1-based and name the party that factors out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Sep,
    Ghz1,
    B1 { i: usize },
    W3,
    Ghz2,
    /// Proper three-secant cells named by their multirank: (332), (323),
    /// (233), (322), (232), (223).
    Secant3([usize; 3]),
    B2 { i: usize },
    /// (333)'_3, optionally refined by tensor rank.
    Tangent333(Option<Refinement>),
    /// (332)', (323)', (233)'.
    Tangent3([usize; 3]),
    Secant4,
    Secant5,
    TwoSep,
    TwoGhz1,
    TwoGhz2,
    /// The evidence does not pin a single cell (inconclusive tangent split).
    Undetermined { k: usize, multirank: [usize; 3] },
}

impl Cell {
    /// Family column of the table: `Sep`, `sigma_k` or `tau_k`.
    pub fn family(&self) -> String {
        match self {
            Cell::Sep | Cell::TwoSep => "Sep".into(),
            Cell::Ghz1 | Cell::B1 { .. } | Cell::TwoGhz1 => "sigma_2".into(),
            Cell::W3 => "tau_2".into(),
            Cell::Ghz2 | Cell::Secant3(_) | Cell::B2 { .. } | Cell::TwoGhz2 => "sigma_3".into(),
            Cell::Tangent333(_) | Cell::Tangent3(_) => "tau_3".into(),
            Cell::Secant4 => "sigma_4".into(),
            Cell::Secant5 => "sigma_5".into(),
            Cell::Undetermined { k, .. } => format!("sigma_{k}|tau_{k}"),
        }
    }

    /// The cell with positions and refinements dropped, as it appears in the
    /// table and in the hierarchy graph.
    pub fn generic(&self) -> Cell {
        match *self {
            Cell::B1 { .. } => Cell::B1 { i: 0 },
            Cell::B2 { .. } => Cell::B2 { i: 0 },
            Cell::Tangent333(_) => Cell::Tangent333(None),
            other => other,
        }
    }
}

fn triple(m: &[usize; 3]) -> String {
    m.iter().map(|r| r.to_string()).collect()
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos = |i: usize| if i == 0 { "i".to_string() } else { i.to_string() };
        match self {
            Cell::Sep | Cell::TwoSep => write!(f, "Sep"),
            Cell::Ghz1 => write!(f, "GHZ3^(1)"),
            Cell::B1 { i } => write!(f, "B_{}^(1)", pos(*i)),
            Cell::W3 => write!(f, "W3"),
            Cell::Ghz2 => write!(f, "GHZ3^(2)"),
            Cell::Secant3(m) => write!(f, "({})", triple(m)),
            Cell::B2 { i } => write!(f, "B_{}^(2)", pos(*i)),
            Cell::Tangent333(None) => write!(f, "(333)'_3"),
            Cell::Tangent333(Some(Refinement::X3)) => write!(f, "(333)'_3 [X3]"),
            Cell::Tangent333(Some(Refinement::Y3)) => write!(f, "(333)'_3 [Y3]"),
            Cell::Tangent3(m) => write!(f, "({})'", triple(m)),
            Cell::Secant4 => write!(f, "(333)_4"),
            Cell::Secant5 => write!(f, "(333)_5"),
            Cell::TwoGhz1 => write!(f, "GHZ2^(1)"),
            Cell::TwoGhz2 => write!(f, "GHZ2^(2)"),
            Cell::Undetermined { k, multirank } => {
                write!(f, "undetermined k={k} ({})", triple(multirank))
            }
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankStatus {
    /// Exact non-degenerate CP fit found at this rank.
    Witnessed,
    /// Taken from the flattening evidence (separable states only).
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TensorRank {
    pub value: usize,
    pub status: RankStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyLabel {
    /// Number of parties, 2 or 3.
    pub parties: usize,
    pub k: usize,
    pub tangent: TangentVerdict,
    pub multirank: Vec<usize>,
    pub tensor_rank: Option<TensorRank>,
    pub cell: Cell,
}

impl FamilyLabel {
    /// Equality of the classification itself; tensor ranks must agree only
    /// when both sides carry one.
    pub fn same_class(&self, other: &FamilyLabel) -> bool {
        let ranks_agree = match (self.tensor_rank, other.tensor_rank) {
            (Some(a), Some(b)) => a.value == b.value,
            _ => true,
        };
        self.parties == other.parties
            && self.k == other.k
            && self.tangent == other.tangent
            && self.multirank == other.multirank
            && self.cell == other.cell
            && ranks_agree
    }

    pub fn family(&self) -> String {
        self.cell.family()
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let split = match self.tangent {
            TangentVerdict::ProperSecant => "proper",
            TangentVerdict::Tangent => "tangent",
            TangentVerdict::Inconclusive => "inconclusive",
        };
        write!(
            f,
            "{} in {} (k={}, {split}, multirank ({}))",
            self.cell,
            self.family(),
            self.k,
            self.multirank.iter().map(|r| r.to_string()).collect::<String>()
        )?;
        if let Some(r) = self.tensor_rank {
            write!(f, ", tensor rank {}", r.value)?;
        }
        Ok(())
    }
}

/// Distance of a rank decision from its threshold, as ratios to `tol · σ_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Margin {
    /// Smallest retained singular value over the cutoff (> 1).
    pub kept: Option<f64>,
    /// Largest discarded singular value over the cutoff (<= 1).
    pub dropped: Option<f64>,
}

impl Margin {
    fn of(sv: &[f64], tol: f64) -> Self {
        let (kept, dropped) = threshold_margins(sv, tol);
        Self { kept, dropped }
    }

    /// Within a factor 100 of flipping.
    pub fn is_near(&self) -> bool {
        self.kept.is_some_and(|k| k < 100.0) || self.dropped.is_some_and(|d| d > 0.01)
    }
}

/// Raw measurements behind a label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub dims: Vec<usize>,
    pub multirank: Vec<usize>,
    pub multirank_margins: Vec<Margin>,
    /// Largest exterior-flattening rank over the party orderings.
    pub flattening_rank: Option<usize>,
    pub flattening_ranks: Vec<usize>,
    pub flattening_margin: Option<Margin>,
    #[serde(serialize_with = "ser_complex_opt")]
    pub det_f: Option<Complex64>,
    pub det_nonzero: Option<bool>,
    pub cp_attempts: Vec<RankAttempt>,
}

fn ser_complex_opt<S: Serializer>(z: &Option<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match z {
        Some(z) => [z.re, z.im].serialize(s),
        None => s.serialize_none(),
    }
}

impl Evidence {
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (mode, m) in self.multirank_margins.iter().enumerate() {
            if m.is_near() {
                out.push(format!("mode {} flattening rank is near the threshold", mode + 1));
            }
        }
        if self.flattening_margin.is_some_and(|m| m.is_near()) {
            out.push("exterior flattening rank is near the threshold".into());
        }
        if let (Some(r), Some(nonzero)) = (self.flattening_rank, self.det_nonzero) {
            if (r == 9) != nonzero {
                out.push(format!("rank F = {r} but the determinant test says {}", if nonzero { "nonzero" } else { "zero" }));
            }
        }
        out
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "multirank {:?}", self.multirank)?;
        if let Some(r) = self.flattening_rank {
            write!(f, ", rank F {r}")?;
        }
        if let Some(d) = self.det_f {
            write!(f, ", det F {:.6e}{:+.6e}i", d.re, d.im)?;
        }
        for a in &self.cp_attempts {
            write!(
                f,
                ", r={} residual {:.2e} (degenerate {}/{})",
                a.rank, a.best_residual, a.degenerate_restarts, a.restarts_run
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub label: FamilyLabel,
    pub evidence: Evidence,
}

fn contradiction(reason: impl Into<String>, evidence: Evidence) -> Error {
    Error::Contradictory {
        reason: reason.into(),
        evidence: Box::new(evidence),
    }
}

/// Position (1-based) of the single rank-one party, if exactly one.
fn lone_party(m: &[usize; 3]) -> Option<usize> {
    let ones: Vec<usize> = (0..3).filter(|&i| m[i] == 1).collect();
    (ones.len() == 1).then(|| ones[0] + 1)
}

/// Table lookup for `(k, split, multirank)`. `None` means the combination
/// does not occur.
pub fn grid_cell(k: usize, tangent: TangentVerdict, m: [usize; 3]) -> Option<Cell> {
    use TangentVerdict::*;
    let others_are = |r: usize| lone_party(&m).is_some_and(|i| (0..3).all(|j| j + 1 == i || m[j] == r));
    let mixed = m.iter().all(|&r| r == 2 || r == 3) && m != [2, 2, 2] && m != [3, 3, 3];
    let one_two = m.iter().filter(|&&r| r == 2).count() == 1;
    match (k, tangent, m) {
        (1, ProperSecant, [1, 1, 1]) => Some(Cell::Sep),
        (2, ProperSecant, [2, 2, 2]) => Some(Cell::Ghz1),
        (2, ProperSecant, _) if others_are(2) => Some(Cell::B1 { i: lone_party(&m)? }),
        (2, Tangent, [2, 2, 2]) => Some(Cell::W3),
        (3, ProperSecant, [3, 3, 3]) => Some(Cell::Ghz2),
        (3, ProperSecant, _) if mixed => Some(Cell::Secant3(m)),
        (3, ProperSecant, _) if others_are(3) => Some(Cell::B2 { i: lone_party(&m)? }),
        (3, Tangent, [3, 3, 3]) => Some(Cell::Tangent333(None)),
        (3, Tangent, _) if mixed && one_two => Some(Cell::Tangent3(m)),
        (4, ProperSecant, [3, 3, 3]) => Some(Cell::Secant4),
        (5, ProperSecant, [3, 3, 3]) => Some(Cell::Secant5),
        _ => None,
    }
}
/// Tangent split with at most one escalated second pass.
fn tangent_split(p: &FitProblem<'_>, k: usize, m: [usize; 3], cfg: &ClassifyConfig) -> TangentReport {
    let first = tangent_discriminator_in(p, k, cfg.r_max, &cfg.als);
    if !cfg.escalate {
        return first;
    }
    let harder = cfg.als.escalated();
    if first.verdict == TangentVerdict::Inconclusive || grid_cell(k, first.verdict, m).is_none() {
        let mut second = tangent_discriminator_in(p, k, cfg.r_max, &harder);
        let mut attempts = first.attempts;
        attempts.append(&mut second.attempts);
        second.attempts = attempts;
        return second;
    }
    let mut report = first;
    if let Some(w) = report.witness_rank.filter(|&w| w > k + 1) {
        for r in k + 1..w {
            let (attempt, cert) = attempt_rank_in(p, r, &harder);
            report.attempts.push(attempt);
            if cert.is_some() {
                report.witness_rank = Some(r);
                break;
            }
        }
    }
    report
}

/// Classifies a nonzero 3x3x3 state.
pub fn classify3(t: &Tensor3, cfg: &ClassifyConfig) -> Result<Classification> {
    if t.dims() != [3, 3, 3] {
        return Err(unsupported(&t.dims(), "three-qutrit classification needs a 3x3x3 tensor"));
    }
    t.ensure_nonzero()?;
    if cfg.als.restarts == 0 || cfg.r_max == 0 {
        return Err(invalid("CP fitting needs at least one restart and r_max >= 1"));
    }

    let spectra: Vec<Vec<f64>> =
        (0..3).map(|m| singular_values(&t.flatten(&Partition::single(m)))).collect();
    let multirank = MultiRank(std::array::from_fn(|m| rank_of_spectrum(&spectra[m], cfg.rank_tol)));
    let mut flattening_ranks = Vec::with_capacity(MODE_ORDERS.len());
    let mut f_sv = Vec::new();
    for order in MODE_ORDERS {
        let sv = singular_values(build_exterior_flattening(&t.permute_modes(order))?.matrix());
        let r = rank_of_spectrum(&sv, cfg.rank_tol);
        if flattening_ranks.iter().all(|&prev| r > prev) {
            f_sv = sv;
        }
        flattening_ranks.push(r);
    }
    let rank_f = rank_of_spectrum(&f_sv, cfg.rank_tol);
    let det = build_exterior_flattening(t)?.matrix().clone().determinant();
    let det_nonzero = determinant_is_nonzero(det, t, cfg.det_tol);
    let k = rank_f.div_ceil(2);

    let mut evidence = Evidence {
        dims: t.dims().to_vec(),
        multirank: multirank.0.to_vec(),
        multirank_margins: spectra.iter().map(|s| Margin::of(s, cfg.rank_tol)).collect(),
        flattening_rank: Some(rank_f),
        flattening_ranks,
        flattening_margin: Some(Margin::of(&f_sv, cfg.rank_tol)),
        det_f: Some(det),
        det_nonzero: Some(det_nonzero),
        cp_attempts: Vec::new(),
    };

    if k < multirank.largest() {
        return Err(contradiction(
            format!("secant index {k} is below the largest flattening rank {}", multirank.largest()),
            evidence,
        ));
    }
    if (k == 1) != (multirank.0 == [1, 1, 1]) {
        return Err(contradiction("separability disagrees between flattenings", evidence));
    }
    // Fits run on a better-conditioned point of the same orbit.
    let fit_target = FitProblem::balanced(t, cfg.rank_tol);
    let mut tensor_rank = None;
    let tangent = match k {
        1 => {
            tensor_rank = Some(TensorRank { value: 1, status: RankStatus::Exact });
            TangentVerdict::ProperSecant
        }
        2 | 3 => {
            let report = tangent_split(&fit_target, k, multirank.0, cfg);
            evidence.cp_attempts = report.attempts;
            tensor_rank = report.witness_rank.map(|value| TensorRank { value, status: RankStatus::Witnessed });
            report.verdict
        }
        _ => {
            if cfg.witness_high_rank {
                let w = tensor_rank_witness_in(&fit_target, cfg.r_max, &cfg.als);
                evidence.cp_attempts = w.attempts;
                tensor_rank = w.found.then_some(TensorRank { value: w.upper, status: RankStatus::Witnessed });
            }
            TangentVerdict::ProperSecant
        }
    };

    let cell = if tangent == TangentVerdict::Inconclusive {
        Cell::Undetermined { k, multirank: multirank.0 }
    } else {
        let Some(mut cell) = grid_cell(k, tangent, multirank.0) else {
            return Err(contradiction(
                format!("no table cell for k={k}, {tangent:?}, multirank {multirank}"),
                evidence,
            ));
        };
        if let Cell::Tangent333(_) = cell {
            cell = Cell::Tangent333(match tensor_rank.map(|r| r.value) {
                Some(4) => Some(Refinement::X3),
                Some(5) => Some(Refinement::Y3),
                _ => None,
            });
        }
        cell
    };

    Ok(Classification {
        label: FamilyLabel {
            parties: 3,
            k,
            tangent,
            multirank: multirank.0.to_vec(),
            tensor_rank,
            cell,
        },
        evidence,
    })
}

/// Classifies a nonzero 3x3 two-party state; the family index is the matrix rank.
pub fn classify2(t: &Tensor2, cfg: &ClassifyConfig) -> Result<Classification> {
    if t.dims() != [3, 3] {
        return Err(unsupported(&t.dims(), "two-qutrit classification needs a 3x3 tensor"));
    }
    if t.is_zero() {
        return Err(invalid("the zero tensor has no class"));
    }
    let sv = singular_values(&t.matrix());
    let k = numerical_rank(&t.matrix(), cfg.rank_tol);
    let cell = match k {
        1 => Cell::TwoSep,
        2 => Cell::TwoGhz1,
        _ => Cell::TwoGhz2,
    };
    let margin = Margin::of(&sv, cfg.rank_tol);
    Ok(Classification {
        label: FamilyLabel {
            parties: 2,
            k,
            tangent: TangentVerdict::ProperSecant,
            multirank: vec![k, k],
            tensor_rank: Some(TensorRank { value: k, status: RankStatus::Exact }),
            cell,
        },
        evidence: Evidence {
            dims: t.dims().to_vec(),
            multirank: vec![k, k],
            multirank_margins: vec![margin, margin],
            flattening_rank: None,
            flattening_ranks: Vec::new(),
            flattening_margin: None,
            det_f: None,
            det_nonzero: None,
            cp_attempts: Vec::new(),
        },
    })
}

/// Directed degeneration arrow between table cells (outer to inner).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: Cell,
    pub to: Cell,
    /// Stated in the text rather than only drawn in the hierarchy figure.
    pub explicit: bool,
}

/// Degeneration hierarchy between the generic three-qutrit cells.
pub fn hierarchy_edges() -> Vec<Edge> {
    let b1 = Cell::B1 { i: 0 };
    let b2 = Cell::B2 { i: 0 };
    let s3 = Cell::Secant3;
    let t3 = Cell::Tangent3;
    let e = |from, to, explicit| Edge { from, to, explicit };
    vec![
        // stated explicitly
        e(Cell::W3, b1, true),
        e(b2, b1, true),
        e(Cell::Ghz1, Cell::W3, true),
        e(Cell::Ghz2, Cell::Tangent333(None), true),
        e(s3([3, 3, 2]), t3([3, 3, 2]), true),
        e(s3([3, 2, 3]), t3([3, 2, 3]), true),
        e(s3([2, 3, 3]), t3([2, 3, 3]), true),
        // read off the figure
        e(Cell::Secant5, Cell::Secant4, false),
        e(Cell::Secant4, Cell::Ghz2, false),
        e(Cell::Ghz2, s3([3, 3, 2]), false),
        e(Cell::Ghz2, s3([3, 2, 3]), false),
        e(Cell::Ghz2, s3([2, 3, 3]), false),
        e(s3([3, 3, 2]), s3([3, 2, 2]), false),
        e(s3([3, 3, 2]), s3([2, 3, 2]), false),
        e(s3([3, 3, 2]), b2, false),
        e(s3([3, 2, 3]), s3([3, 2, 2]), false),
        e(s3([3, 2, 3]), s3([2, 2, 3]), false),
        e(s3([3, 2, 3]), b2, false),
        e(s3([2, 3, 3]), s3([2, 3, 2]), false),
        e(s3([2, 3, 3]), s3([2, 2, 3]), false),
        e(s3([2, 3, 3]), b2, false),
        e(s3([3, 2, 2]), Cell::Ghz1, false),
        e(s3([2, 3, 2]), Cell::Ghz1, false),
        e(s3([2, 2, 3]), Cell::Ghz1, false),
        e(Cell::Tangent333(None), t3([3, 3, 2]), false),
        e(Cell::Tangent333(None), t3([3, 2, 3]), false),
        e(Cell::Tangent333(None), t3([2, 3, 3]), false),
        e(t3([3, 3, 2]), Cell::W3, false),
        e(t3([3, 2, 3]), Cell::W3, false),
        e(t3([2, 3, 3]), Cell::W3, false),
        e(b1, Cell::Sep, false),
    ]
}

/// True when `to` is reachable from `from` along hierarchy edges.
pub fn reachable(edges: &[Edge], from: Cell, to: Cell) -> bool {
    let mut stack = vec![from.generic()];
    let mut seen = vec![];
    let to = to.generic();
    while let Some(c) = stack.pop() {
        if c == to {
            return true;
        }
        if seen.contains(&c) {
            continue;
        }
        seen.push(c);
        stack.extend(edges.iter().filter(|e| e.from == c).map(|e| e.to));
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(kets: &[&str]) -> Tensor3 {
        Tensor3::from_kets(3, kets)
    }

    fn label(kets: &[&str]) -> FamilyLabel {
        classify3(&t(kets), &ClassifyConfig::default()).unwrap().label
    }

    #[test]
    fn zero_restarts_is_an_input_error() {
        let mut cfg = ClassifyConfig::default();
        cfg.als.restarts = 0;
        assert!(matches!(classify3(&crate::catalog::w3(), &cfg), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn cell_names() {
        assert_eq!(Cell::Secant3([3, 3, 2]).to_string(), "(332)");
        assert_eq!(Cell::Tangent3([2, 3, 3]).to_string(), "(233)'");
        assert_eq!(Cell::B1 { i: 2 }.to_string(), "B_2^(1)");
        assert_eq!(Cell::Tangent333(Some(Refinement::Y3)).to_string(), "(333)'_3 [Y3]");
        assert_eq!(Cell::Secant4.family(), "sigma_4");
        assert_eq!(Cell::W3.family(), "tau_2");
    }

    #[test]
    fn grid_rejects_absent_cells() {
        use TangentVerdict::*;
        assert_eq!(grid_cell(3, Tangent, [2, 2, 3]), None);
        assert_eq!(grid_cell(4, ProperSecant, [2, 3, 3]), None);
        assert_eq!(grid_cell(2, Tangent, [1, 2, 2]), None);
        assert_eq!(grid_cell(3, ProperSecant, [1, 3, 3]), Some(Cell::B2 { i: 1 }));
        assert_eq!(grid_cell(2, ProperSecant, [2, 1, 2]), Some(Cell::B1 { i: 2 }));
        assert_eq!(grid_cell(3, ProperSecant, [1, 2, 2]), None);
    }

    #[test]
    fn ghz1_is_proper_two_secant() {
        let l = label(&["000", "111"]);
        assert_eq!((l.k, l.tangent, l.cell), (2, TangentVerdict::ProperSecant, Cell::Ghz1));
        assert_eq!(l.tensor_rank.unwrap().value, 2);
    }

    #[test]
    fn w3_is_tangent() {
        let l = label(&["001", "010", "100"]);
        assert_eq!((l.k, l.tangent, l.cell), (2, TangentVerdict::Tangent, Cell::W3));
        assert_eq!(l.tensor_rank.unwrap().value, 3);
    }

    #[test]
    fn x3_refines_to_rank_four() {
        let l = label(&["001", "010", "100", "222"]);
        assert_eq!(l.cell, Cell::Tangent333(Some(Refinement::X3)));
    }

    #[test]
    fn four_secant_first_state() {
        let l = label(&["000", "011", "122", "221"]);
        assert_eq!((l.k, l.cell), (4, Cell::Secant4));
    }

    #[test]
    fn separable_skips_fits() {
        let c = classify3(&t(&["012"]), &ClassifyConfig::default()).unwrap();
        assert_eq!(c.label.cell, Cell::Sep);
        assert!(c.evidence.cp_attempts.is_empty());
    }

    #[test]
    fn rejects_zero_and_bad_shape() {
        let cfg = ClassifyConfig::default();
        assert!(classify3(&Tensor3::zeros([3, 3, 3]), &cfg).is_err());
        assert!(matches!(
            classify3(&Tensor3::from_kets(2, &["000"]), &cfg),
            Err(Error::UnsupportedShape { .. })
        ));
    }

    #[test]
    fn two_qutrit_cells() {
        let cfg = ClassifyConfig::default();
        let c = |k: &[&str]| classify2(&Tensor2::from_kets(3, k), &cfg).unwrap().label;
        assert_eq!(c(&["00"]).cell, Cell::TwoSep);
        assert_eq!(c(&["00", "11"]).k, 2);
        assert_eq!(c(&["00", "11", "22"]).cell, Cell::TwoGhz2);
    }

    #[test]
    fn hierarchy_caption_statements() {
        let edges = hierarchy_edges();
        let b1 = Cell::B1 { i: 0 };
        let b2 = Cell::B2 { i: 0 };
        assert!(edges.iter().any(|e| e.from == Cell::W3 && e.to == b1 && e.explicit));
        assert!(edges.iter().any(|e| e.from == b2 && e.to == b1));
        assert!(!edges.iter().any(|e| e.from == Cell::W3 && e.to == b2));
        assert!(!reachable(&edges, Cell::W3, b2));
        for (sigma, tau) in [
            (Cell::Ghz1, Cell::W3),
            (Cell::Ghz2, Cell::Tangent333(None)),
            (Cell::Secant3([3, 3, 2]), Cell::Tangent3([3, 3, 2])),
            (Cell::Secant3([3, 2, 3]), Cell::Tangent3([3, 2, 3])),
            (Cell::Secant3([2, 3, 3]), Cell::Tangent3([2, 3, 3])),
        ] {
            assert!(edges.iter().any(|e| e.from == sigma && e.to == tau));
        }
        assert!(reachable(&edges, Cell::Secant5, Cell::Sep));
    }
}
