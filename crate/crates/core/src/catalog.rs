//! Canonical states of the classification tables with their expected labels.
//!
//! States are stored unnormalized with the amplitudes as printed. Default
//! basis choices are α, β, γ = 0, 1, 2.

use num_complex::Complex64;

use crate::classify::{Cell, FamilyLabel, RankStatus, Refinement, TensorRank};
use crate::error::{invalid, Result};
use crate::tensor::{Tensor2, Tensor3, TensorN};
use crate::witness::TangentVerdict;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `|α_1>^{⊗n} + ... + |α_{ζ+1}>^{⊗n}` with α_i = i.
pub fn ghz(n: usize, zeta: usize, d: usize) -> Result<TensorN> {
    if n < 2 {
        return Err(invalid("GHZ states need at least two parties"));
    }
    if zeta == 0 || zeta >= d {
        return Err(invalid(format!("GHZ order ζ={zeta} must lie in 1..{d}")));
    }
    let mut t = TensorN::zeros(vec![d; n]);
    for a in 0..=zeta {
        t.add_at(&vec![a; n], c(1.0));
    }
    Ok(t)
}

pub fn ghz3(zeta: usize) -> Tensor3 {
    ghz(3, zeta, 3).and_then(|t| t.to_tensor3()).expect("valid GHZ order")
}

/// Sum of all distinct arrangements of `pattern` (one local index per party),
/// each with coefficient one.
pub fn arrangements(pattern: &[usize], d: usize) -> TensorN {
    let n = pattern.len();
    let mut t = TensorN::zeros(vec![d; n]);
    let mut p = pattern.to_vec();
    p.sort_unstable();
    loop {
        t.add_at(&p, c(1.0));
        if !next_permutation(&mut p) {
            break;
        }
    }
    t
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Normalized Dicke state with excitation vector `j` (`j[a]` parties in `|a>`).
pub fn dicke(n: usize, j: &[usize], d: usize) -> Result<TensorN> {
    if j.len() > d {
        return Err(invalid(format!("excitation vector {j:?} is longer than d={d}")));
    }
    if j.iter().sum::<usize>() != n {
        return Err(invalid(format!("excitations {j:?} do not sum to n={n}")));
    }
    let pattern: Vec<usize> = j.iter().enumerate().flat_map(|(a, &m)| std::iter::repeat_n(a, m)).collect();
    let t = arrangements(&pattern, d);
    let norm = t.norm();
    Ok(t.scaled(c(1.0 / norm)))
}

/// W-type state: all arrangements of `|α>^{⊗(n-1)}|β>`, unit coefficients.
pub fn w_state(n: usize, d: usize, alpha: usize, beta: usize) -> Result<TensorN> {
    if alpha == beta {
        return Err(invalid("W state needs α ≠ β"));
    }
    if n < 2 || alpha >= d || beta >= d {
        return Err(invalid(format!("W state parameters out of range (n={n}, d={d})")));
    }
    let mut pattern = vec![alpha; n - 1];
    pattern.push(beta);
    Ok(arrangements(&pattern, d))
}

pub fn w3() -> Tensor3 {
    Tensor3::from_kets(3, &["001", "010", "100"])
}

/// `W3 + |222>`.
pub fn x_state() -> Tensor3 {
    Tensor3::from_kets(3, &["001", "010", "100", "222"])
}

pub fn y_state() -> Tensor3 {
    Tensor3::from_kets(3, &["002", "020", "200", "011", "101", "110"])
}

/// Two-party GHZ of order `kind` on two parties and `|0>` on party `position` (1-based).
pub fn biseparable(kind: usize, position: usize) -> Result<Tensor3> {
    if !(1..=2).contains(&kind) {
        return Err(invalid(format!("biseparable kind must be 1 or 2, got {kind}")));
    }
    if !(1..=3).contains(&position) {
        return Err(invalid(format!("position must be 1, 2 or 3, got {position}")));
    }
    let kets: Vec<String> = (0..=kind)
        .map(|a| {
            (1..=3)
                .map(|p| if p == position { '0' } else { char::from(b'0' + a as u8) })
                .collect()
        })
        .collect();
    let refs: Vec<&str> = kets.iter().map(String::as_str).collect();
    Ok(Tensor3::from_kets(3, &refs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixedKind {
    /// Extra point `|αβγ>`, multirank a permutation of (223).
    Abc,
    /// Extra point `|αγγ>`, multirank a permutation of (233).
    Agg,
}

/// The extra product term: for `Abc`, party `position` carries γ; for `Agg`,
/// party `position` carries α and the others γ.
fn extra_ket(kind: MixedKind, position: usize) -> Result<String> {
    if !(1..=3).contains(&position) {
        return Err(invalid(format!("position must be 1, 2 or 3, got {position}")));
    }
    Ok(match kind {
        MixedKind::Abc => {
            let mut rest = ['0', '1'].into_iter();
            (1..=3).map(|p| if p == position { '2' } else { rest.next().unwrap() }).collect()
        }
        MixedKind::Agg => (1..=3).map(|p| if p == position { '0' } else { '2' }).collect(),
    })
}

/// `GHZ3^(1)` plus one extra product term.
pub fn three_secant_mixed(kind: MixedKind, position: usize) -> Result<Tensor3> {
    let ket = extra_ket(kind, position)?;
    Ok(Tensor3::from_kets(3, &["000", "111", &ket]))
}

/// `W3 + |αγγ>` with party `position` carrying α.
pub fn w3_plus(position: usize) -> Result<Tensor3> {
    let ket = extra_ket(MixedKind::Agg, position)?;
    Ok(Tensor3::from_kets(3, &["001", "010", "100", &ket]))
}

/// `|0>(|00>+|11>+|22>) + |1>|v>|v>` with `v = |0> + i|1>`, so `<GHZ2^(2)|vv> = 0`.
pub fn pencil_tangent() -> Tensor3 {
    let mut t = Tensor3::from_kets(3, &["000", "011", "022"]);
    let v = [c(1.0), Complex64::new(0.0, 1.0), c(0.0)];
    for j in 0..3 {
        for k in 0..3 {
            t[[1, j, k]] += v[j] * v[k];
        }
    }
    t
}

/// `GHZ3^(2) + |ω1 ω1 ω1>` with `ω1 = |0>+|1>+|2>`.
pub fn g3() -> Tensor3 {
    let w = [1.0; 3];
    &ghz3(2) + &Tensor3::product_real(&w, &w, &w)
}

/// `G3 + t (|1>+|2>) ⊗ (|0>+|2>) ⊗ (|0>+|1>)`.
pub fn five_secant(t: Complex64) -> Tensor3 {
    let extra = Tensor3::product_real(&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]);
    &g3() + &(t * &extra)
}

/// `|012> + |021> + ... + |210>` as printed (unit coefficients).
pub fn d111() -> Tensor3 {
    arrangements(&[0, 1, 2], 3).to_tensor3().expect("order 3")
}

/// The four-secant examples: both printed (333) sums of four points,
/// `GHZ3^(2) + |012>`, `G3` and `D3^(1,1,1)`.
pub fn four_secant_examples() -> Vec<Tensor3> {
    vec![
        Tensor3::from_kets(3, &["000", "011", "122", "221"]),
        Tensor3::from_kets(3, &["000", "111", "122", "221"]),
        Tensor3::from_kets(3, &["000", "111", "222", "012"]),
        g3(),
        d111(),
    ]
}

/// `((|0> + ε|1> + ε|2>)^{⊗3} + ε|222> - |000>) / ε`, a curve of
/// three-secant states converging to an X3-type state.
pub fn x3_curve(eps: f64) -> Tensor3 {
    assert!(eps != 0.0, "the curve point at ε = 0 is the limit");
    let v = [1.0, eps, eps];
    let mut t = Tensor3::product_real(&v, &v, &v);
    t[[2, 2, 2]] += c(eps);
    t[[0, 0, 0]] -= c(1.0);
    t.scaled(c(1.0 / eps))
}

/// Limit of [`x3_curve`]: `|00υ> + |0υ0> + |υ00> + |222>` with `υ = |1>+|2>`.
pub fn x3_curve_limit() -> Tensor3 {
    let mut t = Tensor3::from_kets(3, &["001", "002", "010", "020", "100", "200"]);
    t[[2, 2, 2]] += c(1.0);
    t
}

/// Rank-five decomposition of `Y3` (ξ = e^{2πi/3}); the first three terms
/// carry weights 1/2, -1, 1/2.
pub fn y3_decomposition() -> Vec<(Complex64, [Complex64; 3])> {
    let xi = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let one = c(1.0);
    let k = Complex64::new(0.0, 2.0 * 3f64.sqrt()).inv();
    let z = c(0.0);
    vec![
        (c(0.5), [c(2.0), z, one]),
        (c(-1.0), [one, z, one]),
        (c(0.5), [z, z, one]),
        (k, [xi * 2.0 + 1.0, -one, z]),
        (-k, [xi * xi * 2.0 + 1.0, -one, z]),
    ]
}

/// The four cube vectors with `D3^(1,1,1) = (1/4) Σ ω_a^{⊗3}`.
pub fn d111_cube_vectors() -> [[f64; 3]; 4] {
    [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]]
}

#[derive(Clone, Debug)]
pub enum CatalogState {
    Three(Tensor3),
    Two(Tensor2),
}

impl CatalogState {
    pub fn dims(&self) -> Vec<usize> {
        match self {
            CatalogState::Three(t) => t.dims().to_vec(),
            CatalogState::Two(t) => t.dims().to_vec(),
        }
    }

    pub fn amps(&self) -> &[Complex64] {
        match self {
            CatalogState::Three(t) => t.amps(),
            CatalogState::Two(t) => t.amps(),
        }
    }
}

/// Which reproduction table an entry represents, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table {
    ThreeQutrit,
    TwoQutrit,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub state: CatalogState,
    pub expected: FamilyLabel,
    /// Border rank where it is known and differs from what `expected` implies.
    pub border_rank: Option<usize>,
    pub table: Option<Table>,
}

fn expect(k: usize, tangent: bool, multirank: [usize; 3], rank: Option<usize>, cell: Cell) -> FamilyLabel {
    FamilyLabel {
        parties: 3,
        k,
        tangent: if tangent { TangentVerdict::Tangent } else { TangentVerdict::ProperSecant },
        multirank: multirank.to_vec(),
        tensor_rank: rank.map(|value| TensorRank { value, status: RankStatus::Witnessed }),
        cell,
    }
}

fn entry3(name: impl Into<String>, t: Tensor3, expected: FamilyLabel, table: bool) -> CatalogEntry {
    let border_rank = expected.tangent.eq(&TangentVerdict::Tangent).then_some(expected.k);
    CatalogEntry {
        name: name.into(),
        state: CatalogState::Three(t),
        expected,
        border_rank,
        table: table.then_some(Table::ThreeQutrit),
    }
}

fn entry2(name: &str, kets: &[&str], k: usize, cell: Cell) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        state: CatalogState::Two(Tensor2::from_kets(3, kets)),
        expected: FamilyLabel {
            parties: 2,
            k,
            tangent: TangentVerdict::ProperSecant,
            multirank: vec![k, k],
            tensor_rank: Some(TensorRank { value: k, status: RankStatus::Exact }),
            cell,
        },
        border_rank: None,
        table: Some(Table::TwoQutrit),
    }
}

fn mr(cell_kets: &str) -> [usize; 3] {
    let b = cell_kets.as_bytes();
    [(b[0] - b'0') as usize, (b[1] - b'0') as usize, (b[2] - b'0') as usize]
}

/// Every catalog entry: the 22 three-qutrit table representatives, the three
/// two-qutrit ones, then further printed states.
pub fn entries() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    let sep = Tensor3::from_kets(3, &["000"]);
    out.push(entry3("Sep", sep, expect(1, false, [1, 1, 1], Some(1), Cell::Sep), true));
    out.push(entry3("GHZ3_1", ghz3(1), expect(2, false, [2, 2, 2], Some(2), Cell::Ghz1), true));
    for i in 1..=3 {
        let mut m = [2, 2, 2];
        m[i - 1] = 1;
        let t = biseparable(1, i).expect("valid position");
        out.push(entry3(format!("B1_{i}"), t, expect(2, false, m, Some(2), Cell::B1 { i }), true));
    }
    out.push(entry3("W3", w3(), expect(2, true, [2, 2, 2], Some(3), Cell::W3), true));
    out.push(entry3("GHZ3_2", ghz3(2), expect(3, false, [3, 3, 3], Some(3), Cell::Ghz2), true));
    for (kind, position, cell) in [
        (MixedKind::Agg, 3, "332"),
        (MixedKind::Agg, 2, "323"),
        (MixedKind::Agg, 1, "233"),
        (MixedKind::Abc, 1, "322"),
        (MixedKind::Abc, 2, "232"),
        (MixedKind::Abc, 3, "223"),
    ] {
        let t = three_secant_mixed(kind, position).expect("valid position");
        let m = mr(cell);
        out.push(entry3(format!("S3_{cell}"), t, expect(3, false, m, Some(3), Cell::Secant3(m)), true));
    }
    for i in 1..=3 {
        let mut m = [3, 3, 3];
        m[i - 1] = 1;
        let t = biseparable(2, i).expect("valid position");
        out.push(entry3(format!("B2_{i}"), t, expect(3, false, m, Some(3), Cell::B2 { i }), true));
    }
    let x3_cell = Cell::Tangent333(Some(Refinement::X3));
    out.push(entry3("X3", x_state(), expect(3, true, [3, 3, 3], Some(4), x3_cell), true));
    for (position, cell) in [(3, "332"), (2, "323"), (1, "233")] {
        let m = mr(cell);
        let t = w3_plus(position).expect("valid position");
        out.push(entry3(format!("T3_{cell}"), t, expect(3, true, m, Some(4), Cell::Tangent3(m)), true));
    }
    let [e26a, e26b, ghz_012, g3_state, d111_state] = <[Tensor3; 5]>::try_from(four_secant_examples()).unwrap();
    out.push(entry3("S4_E26a", e26a, expect(4, false, [3, 3, 3], Some(4), Cell::Secant4), true));
    let fs2 = five_secant(c(2.0));
    out.push(entry3("FiveSecant(2)", fs2, expect(5, false, [3, 3, 3], Some(5), Cell::Secant5), true));

    out.push(entry2("Sep2", &["00"], 1, Cell::TwoSep));
    out.push(entry2("GHZ2_1", &["00", "11"], 2, Cell::TwoGhz1));
    out.push(entry2("GHZ2_2", &["00", "11", "22"], 3, Cell::TwoGhz2));

    let y3_cell = Cell::Tangent333(Some(Refinement::Y3));
    out.push(entry3("Y3", y_state(), expect(3, true, [3, 3, 3], Some(5), y3_cell), false));
    out.push(entry3("E26b", e26b, expect(3, true, [3, 3, 3], Some(4), x3_cell), false));
    out.push(entry3("T3_pencil", pencil_tangent(), expect(3, true, [2, 3, 3], Some(4), Cell::Tangent3([2, 3, 3])), false));
    out.push(entry3("GHZ3_2+|012>", ghz_012, expect(4, false, [3, 3, 3], Some(4), Cell::Secant4), false));
    out.push(entry3("G3", g3_state, expect(4, false, [3, 3, 3], Some(4), Cell::Secant4), false));
    out.push(entry3("D3_111", d111_state, expect(4, false, [3, 3, 3], Some(4), Cell::Secant4), false));
    out.push(entry3("FiveSecant(1)", five_secant(c(1.0)), expect(4, false, [3, 3, 3], Some(4), Cell::Secant4), false));
    out.push(entry3("FiveSecant(0.5)", five_secant(c(0.5)), expect(5, false, [3, 3, 3], None, Cell::Secant5), false));
    let fs_complex = five_secant(Complex64::new(3.0, 1.0));
    out.push(entry3("FiveSecant(3+i)", fs_complex, expect(5, false, [3, 3, 3], None, Cell::Secant5), false));
    for eps in [1.0, 0.1, 0.01] {
        let name = format!("XCurve({eps})");
        out.push(entry3(name, x3_curve(eps), expect(3, false, [3, 3, 3], Some(3), Cell::Ghz2), false));
    }
    out.push(entry3("XCurveLimit", x3_curve_limit(), expect(3, true, [3, 3, 3], Some(4), x3_cell), false));
    out
}

pub fn find(name: &str) -> Option<CatalogEntry> {
    entries().into_iter().find(|e| e.name == name)
}
