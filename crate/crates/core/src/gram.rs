//! Overlap tables Tr(ρ_i ρ_j) of state ensembles and the tests they admit.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qudit::{overlap, stabilizer_vertices, DensityMatrix, DisplacementIndex, PrimeDimension};
use crate::report::Scenario;
use crate::scalar::Scalar;
use crate::witness::bit;

/// Symmetric table of pairwise overlaps r_ij = Tr(ρ_i ρ_j).
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T: Scalar> {
    entries: DMatrix<T>,
}

impl<T: Scalar> GramMatrix<T> {
    pub fn new(entries: DMatrix<T>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidGram(format!("{}×{} is not square", entries.nrows(), entries.ncols())));
        }
        let tol = T::lit(T::STRUCTURAL_TOL);
        let n = entries.nrows();
        for i in 0..n {
            for j in i + 1..n {
                if (entries[(i, j)] - entries[(j, i)]).abs() > tol {
                    return Err(Error::InvalidGram(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }
}

pub fn gram_matrix<T: Scalar>(states: &[DensityMatrix<T>]) -> Result<GramMatrix<T>> {
    let n = states.len();
    let mut entries = DMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let r = overlap(&states[i], &states[j])?;
            entries[(i, j)] = r;
            entries[(j, i)] = r;
        }
    }
    Ok(GramMatrix { entries })
}

/// Tr(ρ₁ρ₂) for the eigenstates ρ_k of D_{g_k} with eigenvalue ω^{q_k},
/// read off the generators alone.
///
/// Non-parallel generators give 1/d. Parallel ones (g₂ = λg₁) give the same
/// state when q₂ ≡ λq₁ and orthogonal states otherwise.
pub fn symplectic_overlap(
    dim: PrimeDimension,
    g1: DisplacementIndex,
    q1: u32,
    g2: DisplacementIndex,
    q2: u32,
) -> Result<f64> {
    if g1.is_trivial() || g2.is_trivial() {
        return Err(Error::TrivialGenerator);
    }
    let d = dim.get() as i64;
    let (a1, b1, a2, b2) = (g1.a as i64, g1.b as i64, g2.a as i64, g2.b as i64);
    if (a2 * b1 - a1 * b2).rem_euclid(d) != 0 {
        return Ok(1.0 / d as f64);
    }
    let lambda = (1..d)
        .find(|&l| (l * a1 - a2).rem_euclid(d) == 0 && (l * b1 - b2).rem_euclid(d) == 0)
        .expect("parallel non-trivial generators differ by a unit");
    Ok(if (q2 as i64 - lambda * q1 as i64).rem_euclid(d) == 0 { 1.0 } else { 0.0 })
}

/// Outcome of testing a Gram matrix against the overlaps a scenario allows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramClassification {
    pub scenario: Scenario,
    /// Every off-diagonal entry lies in the allowed set.
    pub compatible_entrywise: bool,
    /// Off-diagonal entries (i < j) outside the allowed set.
    pub offending_pairs: Vec<(usize, usize, f64)>,
    /// Indices whose diagonal entry is not 1.
    pub non_pure_diagonal: Vec<usize>,
    /// Whether some assignment of allowed pure states reproduces the whole
    /// matrix; `None` when the search is out of range.
    pub subset_match: Option<bool>,
}

/// Largest ensemble for which the exact assignment search runs.
pub const SUBSET_SEARCH_MAX_N: usize = 6;
/// Largest dimension for which the exact assignment search runs.
pub const SUBSET_SEARCH_MAX_D: usize = 3;

/// Entrywise test against {0, 1} (classical) or {0, 1/d, 1} (stabilizer),
/// plus an exact search for states realizing the matrix when it is small.
///
/// Entrywise compatibility is necessary only; `subset_match` is decisive.
pub fn classify_gram<T: Scalar>(
    g: &GramMatrix<T>,
    dim: PrimeDimension,
    scenario: Scenario,
    tol: f64,
) -> Result<GramClassification> {
    let d = dim.get();
    let allowed: Vec<f64> = match scenario {
        Scenario::C => vec![0.0, 1.0],
        Scenario::Stab => vec![0.0, 1.0 / d as f64, 1.0],
        other => return Err(Error::Unsupported(format!("Gram classification for scenario {other}"))),
    };
    let n = g.n();
    let mut offending_pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let r = g.get(i, j).as_f64();
            if !allowed.iter().any(|a| (r - a).abs() <= tol) {
                offending_pairs.push((i, j, r));
            }
        }
    }
    let non_pure_diagonal: Vec<usize> = (0..n).filter(|&i| (g.get(i, i).as_f64() - 1.0).abs() > tol).collect();
    let subset_match = (n <= SUBSET_SEARCH_MAX_N && d <= SUBSET_SEARCH_MAX_D).then(|| {
        if !non_pure_diagonal.is_empty() || !offending_pairs.is_empty() {
            return false;
        }
        let candidates: Vec<DensityMatrix<T>> = match scenario {
            Scenario::C => crate::witness::Povm::<T>::computational(d)
                .effects()
                .iter()
                .map(|e| DensityMatrix::new(e.clone(), dim).expect("basis projector"))
                .collect(),
            _ => stabilizer_vertices::<T>(dim).into_iter().map(|v| v.state).collect(),
        };
        let table = gram_matrix(&candidates).expect("common dimension");
        assignment_exists(g, &table, tol)
    });
    Ok(GramClassification {
        scenario,
        compatible_entrywise: offending_pairs.is_empty(),
        offending_pairs,
        non_pure_diagonal,
        subset_match,
    })
}

/// Backtracking over candidate states with pruning on each new row. The
/// first state is pinned to candidate 0: the candidate sets are single
/// orbits of overlap-preserving symmetries (basis permutations, Cliffords).
fn assignment_exists<T: Scalar>(g: &GramMatrix<T>, table: &GramMatrix<T>, tol: f64) -> bool {
    fn extend<T: Scalar>(g: &GramMatrix<T>, table: &GramMatrix<T>, tol: f64, chosen: &mut Vec<usize>) -> bool {
        let i = chosen.len();
        if i == g.n() {
            return true;
        }
        let range = if i == 0 { 0..1 } else { 0..table.n() };
        for v in range {
            let fits = chosen
                .iter()
                .enumerate()
                .all(|(j, &u)| (g.get(i, j).as_f64() - table.get(v, u).as_f64()).abs() <= tol);
            if fits {
                chosen.push(v);
                if extend(g, table, tol, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    extend(g, table, tol, &mut Vec::with_capacity(g.n()))
}

/// Radicands above this negative slack are clamped to zero.
const RADICAND_SLACK: f64 = 1e-10;

fn checked_sqrt<T: Scalar>(x: T, what: &str) -> Result<T> {
    if x < -T::lit(RADICAND_SLACK) {
        return Err(Error::InvalidGram(format!("{what} = {x:e} is negative")));
    }
    Ok(x.max(T::zero()).sqrt())
}

/// S3 written through overlaps, using r_x·r_y = 2r_xy − 1.
///
/// With `pure` the diagonal is taken to be 1; otherwise the purities on the
/// diagonal enter.
pub fn s3_overlap_form<T: Scalar>(g: &GramMatrix<T>, pure: bool) -> Result<T> {
    if g.n() != 3 {
        return Err(Error::Shape(format!("S3 needs a 3×3 Gram matrix, got {}×{}", g.n(), g.n())));
    }
    let r = |i: usize, j: usize| if pure && i == j { T::one() } else { g.get(i, j) };
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    let cross = four * (r(0, 1) - r(0, 2) - r(1, 2));
    let first = -T::one() + two * (r(0, 0) + r(1, 1) + r(2, 2)) + cross;
    let second = two * (r(0, 0) + r(1, 1)) - four * r(0, 1);
    Ok(checked_sqrt(first, "‖r1 + r2 − r3‖²")? + checked_sqrt(second, "‖r1 − r2‖²")?)
}

/// T_N = (1/√2) Σ_i √(Σ_xy (−1)^{x_i + y_i} r_xy), states indexed by
/// bitstring in lexicographic order.
pub fn tn_overlap_form<T: Scalar>(n: usize, g: &GramMatrix<T>) -> Result<T> {
    if !(2..=16).contains(&n) {
        return Err(Error::OutOfRange { name: "N", value: n as f64, range: "[2, 16]" });
    }
    let m = 1usize << n;
    if g.n() != m {
        return Err(Error::Shape(format!("T{n} needs a {m}×{m} Gram matrix, got {}×{}", g.n(), g.n())));
    }
    let mut total = T::zero();
    for i in 0..n {
        let mut inner = T::zero();
        for x in 0..m {
            for y in 0..m {
                let r = g.get(x, y);
                inner += if bit(x, i, n) == bit(y, i, n) { r } else { -r };
            }
        }
        total += checked_sqrt(inner, "parity sum")?;
    }
    Ok(total / T::lit(2.0).sqrt())
}

/// Reads a Gram matrix from CSV text.
///
/// Blank lines and lines starting with `#` are skipped. The first remaining
/// line is `n,d`; the next n lines are the rows, comma separated.
pub fn parse_gram_csv(text: &str) -> Result<(GramMatrix<f64>, PrimeDimension)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let end_line = text.lines().count() + 1;
    let (line, header) = lines.next().ok_or(Error::Parse { line: end_line, msg: "empty input".into() })?;
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    let [n, d] = fields[..] else {
        return Err(Error::Parse { line, msg: format!("expected header `n,d`, found `{header}`") });
    };
    let parse_count = |s: &str, name: &str| {
        s.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("{name} `{s}` is not a count") })
    };
    let n = parse_count(n, "n")?;
    let d = parse_count(d, "d")?;
    let dim = PrimeDimension::new(d as u32)?;
    let mut entries = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let (line, row) = lines.next().ok_or(Error::Parse { line: end_line, msg: format!("expected {n} rows, found {i}") })?;
        let values: Vec<&str> = row.split(',').map(str::trim).collect();
        if values.len() != n {
            return Err(Error::Parse { line, msg: format!("expected {n} entries, found {}", values.len()) });
        }
        for (j, v) in values.iter().enumerate() {
            entries[(i, j)] = v.parse().map_err(|_| Error::Parse { line, msg: format!("`{v}` is not a number") })?;
        }
    }
    if let Some((line, extra)) = lines.next() {
        return Err(Error::Parse { line, msg: format!("unexpected trailing row `{extra}`") });
    }
    Ok((GramMatrix::new(entries)?, dim))
}
