//! Prepare-and-measure behaviors, linear witnesses and their bounds.

pub mod forms;
pub mod search;
pub mod selftest;
pub mod tilted;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix};
use crate::qudit::{DensityMatrix, PrimeDimension};
use crate::report::{Argmax, BoundReport, RunMeta, Scenario};
use crate::scalar::Scalar;

pub use forms::{s3_bloch, s3_tilted_bloch, tn_bloch, NormSumForm, NormTerm};
pub use search::{
    exhaustive_stabilizer, k_stabilizer_bound_any_slots, quantum_bound_qubit, stabilizer_bound_qubit, AscentConfig, ExhaustiveResult,
    Slot, mixed_stabilizer_ascent, alternating_ascent, AscentResult,
};
pub use tilted::{certify, tilted_bounds, Certification, CertificationBounds, TiltedBounds};

/// Largest number of deterministic strategies the classical bound enumerates.
pub const CLASSICAL_CAPACITY: f64 = 1e7;

/// A measurement: PSD effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm<T: Scalar> {
    effects: Vec<CMatrix<T>>,
}

impl<T: Scalar> Povm<T> {
    pub fn new(effects: Vec<CMatrix<T>>) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::InvalidPovm("no effects".into()));
        };
        let d = first.nrows();
        let tol = T::lit(T::STRUCTURAL_TOL);
        let mut sum = CMatrix::<T>::zeros(d, d);
        for (b, m) in effects.iter().enumerate() {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
            }
            if linalg::hermiticity_defect(m) > tol {
                return Err(Error::InvalidPovm(format!("effect {b} is not Hermitian")));
            }
            let lambda = linalg::min_eigenvalue(m);
            if lambda < -tol {
                return Err(Error::InvalidPovm(format!("effect {b} has eigenvalue {lambda:e}")));
            }
            sum += m;
        }
        let defect = linalg::frobenius_distance(&sum, &linalg::identity(d));
        if defect > tol {
            return Err(Error::InvalidPovm(format!("effects sum to identity only within {defect:e}")));
        }
        Ok(Self { effects })
    }

    pub(crate) fn new_unchecked(effects: Vec<CMatrix<T>>) -> Self {
        Self { effects }
    }

    /// Projective measurement in the basis given by the columns of `u`.
    pub fn from_unitary(u: &CMatrix<T>) -> Self {
        let effects = (0..u.ncols())
            .map(|b| {
                let v = u.column(b);
                v * v.adjoint()
            })
            .collect();
        Self { effects }
    }

    pub fn computational(d: usize) -> Self {
        Self::from_unitary(&linalg::identity(d))
    }

    /// Binary qubit measurement {(I + s·σ)/2, (I − s·σ)/2} with ‖s‖ ≤ 1.
    pub fn qubit_binary(s: &Vector3<T>) -> Result<Self> {
        if s.norm() > T::one() + T::lit(T::STRUCTURAL_TOL) {
            return Err(Error::BlochNorm(s.norm().as_f64()));
        }
        let half = T::lit(0.5);
        let sigma = CMatrix::from_row_slice(
            2,
            2,
            &[cr(s[2]), c(s[0], -s[1]), c(s[0], s[1]), cr(-s[2])],
        );
        let id = linalg::identity::<T>(2);
        Ok(Self {
            effects: vec![(&id + &sigma) * cr(half), (&id - &sigma) * cr(half)],
        })
    }

    pub fn effects(&self) -> &[CMatrix<T>] {
        &self.effects
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    /// U M_b U† for every effect.
    pub fn conjugate(&self, u: &CMatrix<T>) -> Self {
        Self {
            effects: self.effects.iter().map(|m| u * m * u.adjoint()).collect(),
        }
    }
}

/// Conditional outcome probabilities p(b|x,y).
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior<T: Scalar> {
    nx: usize,
    ny: usize,
    nb: usize,
    probs: Vec<T>,
}

impl<T: Scalar> Behavior<T> {
    /// `probs` is laid out as [x][y][b].
    pub fn new(nx: usize, ny: usize, nb: usize, probs: Vec<T>) -> Result<Self> {
        if probs.len() != nx * ny * nb {
            return Err(Error::Shape(format!("expected {} probabilities, got {}", nx * ny * nb, probs.len())));
        }
        let tol = T::lit(T::STRUCTURAL_TOL);
        for (k, row) in probs.chunks(nb).enumerate() {
            if row.iter().any(|&p| p < -tol || p > T::one() + tol) {
                return Err(Error::Shape(format!("probability out of [0, 1] in row {k}")));
            }
            let total = row.iter().fold(T::zero(), |acc, &p| acc + p);
            if (total - T::one()).abs() > tol {
                return Err(Error::Shape(format!("row {k} sums to {total}")));
            }
        }
        Ok(Self { nx, ny, nb, probs })
    }

    #[inline]
    pub fn p(&self, b: usize, x: usize, y: usize) -> T {
        self.probs[(x * self.ny + y) * self.nb + b]
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nb)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.probs
            .iter()
            .zip(&other.probs)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }
}

/// Born rule p(b|x,y) = Tr(ρ_x M^y_b).
pub fn behavior_from<T: Scalar>(states: &[DensityMatrix<T>], povms: &[Povm<T>]) -> Result<Behavior<T>> {
    let (Some(rho0), Some(m0)) = (states.first(), povms.first()) else {
        return Err(Error::Shape("empty state or measurement list".into()));
    };
    let d = rho0.dim().get();
    let nb = m0.outcomes();
    let mut probs = Vec::with_capacity(states.len() * povms.len() * nb);
    for rho in states {
        if rho.dim().get() != d {
            return Err(Error::DimensionMismatch { expected: d, found: rho.dim().get() });
        }
        for povm in povms {
            if povm.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: povm.dim() });
            }
            if povm.outcomes() != nb {
                return Err(Error::Shape(format!("measurements with {nb} and {} outcomes", povm.outcomes())));
            }
            probs.extend(povm.effects().iter().map(|m| linalg::trace_product_re(rho.matrix(), m)));
        }
    }
    Behavior::new(states.len(), povms.len(), nb, probs)
}

/// Linear functional Σ W^b_{x,y} p(b|x,y) on a (d, |X|, |Y|, |B|) scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSpec<T: Scalar> {
    d: PrimeDimension,
    nx: usize,
    ny: usize,
    nb: usize,
    /// Laid out as [b][x][y].
    coeffs: Vec<T>,
}

impl<T: Scalar> WitnessSpec<T> {
    pub fn new(d: PrimeDimension, nx: usize, ny: usize, nb: usize, coeffs: Vec<T>) -> Result<Self> {
        if nx == 0 || ny == 0 || nb == 0 || coeffs.len() != nx * ny * nb {
            return Err(Error::Shape(format!(
                "{} coefficients for shape ({nx}, {ny}, {nb})",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|w| !w.is_finite()) {
            return Err(Error::Shape("non-finite coefficient".into()));
        }
        Ok(Self { d, nx, ny, nb, coeffs })
    }

    /// Qubit binary-outcome witness Σ c_{xy} E_{xy} with E = p(0|x,y) − p(1|x,y).
    pub fn from_correlators(nx: usize, ny: usize, c: &[T]) -> Result<Self> {
        let coeffs = c.iter().copied().chain(c.iter().map(|&v| -v)).collect();
        Self::new(PrimeDimension::QUBIT, nx, ny, 2, coeffs)
    }

    /// S3 = E11 + E12 + E21 − E22 − E31.
    pub fn s3() -> Self {
        let one = T::one();
        Self::from_correlators(3, 2, &[one, one, one, -one, -one, T::zero()]).expect("fixed shape")
    }

    /// S3(t) = 2t(E11 + E21 − E31) + 2(1 − t)(E12 − E22).
    pub fn tilted_s3(t: T) -> Result<Self> {
        check_t(t)?;
        let a = T::lit(2.0) * t;
        let b = T::lit(2.0) * (T::one() - t);
        Self::from_correlators(3, 2, &[a, b, a, -b, -a, T::zero()])
    }

    /// T_N = Σ_x Σ_y (−1)^{x_y} p(0|x,y), bitstrings x in lexicographic order
    /// with x_1 the most significant bit.
    pub fn tn(n: usize) -> Result<Self> {
        if !(2..=16).contains(&n) {
            return Err(Error::OutOfRange { name: "N", value: n as f64, range: "[2, 16]" });
        }
        let nx = 1usize << n;
        let mut coeffs = vec![T::zero(); 2 * nx * n];
        for x in 0..nx {
            for y in 0..n {
                coeffs[x * n + y] = if bit(x, y, n) { -T::one() } else { T::one() };
            }
        }
        Self::new(PrimeDimension::QUBIT, nx, n, 2, coeffs)
    }

    #[inline]
    pub fn coeff(&self, b: usize, x: usize, y: usize) -> T {
        self.coeffs[(b * self.nx + x) * self.ny + y]
    }

    pub fn dim(&self) -> PrimeDimension {
        self.d
    }

    /// (|X|, |Y|, |B|).
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nb)
    }
}

/// Bit y (0-based, most significant first) of an N-bit string.
#[inline]
pub fn bit(x: usize, y: usize, n: usize) -> bool {
    (x >> (n - 1 - y)) & 1 == 1
}

pub(crate) fn check_t<T: Scalar>(t: T) -> Result<()> {
    if t >= T::zero() && t <= T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "t", value: t.as_f64(), range: "[0, 1]" })
    }
}

pub fn evaluate<T: Scalar>(w: &WitnessSpec<T>, beh: &Behavior<T>) -> Result<T> {
    if w.shape() != beh.shape() {
        return Err(Error::Shape(format!("witness {:?} vs behavior {:?}", w.shape(), beh.shape())));
    }
    let mut acc = T::zero();
    for b in 0..w.nb {
        for x in 0..w.nx {
            for y in 0..w.ny {
                acc += w.coeff(b, x, y) * beh.p(b, x, y);
            }
        }
    }
    Ok(acc)
}

/// Exact classical maximum over deterministic strategies.
///
/// Enumerates whichever side is smaller, encodings m: X → [d] or decodings
/// b: [d] × Y → B, and optimizes the other side pointwise.
pub fn classical_bound<T: Scalar>(w: &WitnessSpec<T>) -> Result<BoundReport> {
    let d = w.d.get();
    let (nx, ny, nb) = w.shape();
    let encodings = (d as f64).powi(nx as i32);
    let decodings = (nb as f64).powi((d * ny) as i32);
    let size = encodings.min(decodings);
    if size > CLASSICAL_CAPACITY {
        return Err(Error::Capacity { size, capacity: CLASSICAL_CAPACITY });
    }
    let count = size as u64;
    let mut best: Option<(T, Vec<usize>, Vec<usize>)> = None;

    if encodings <= decodings {
        let mut enc = vec![0usize; nx];
        for code in 0..count {
            digits(code, d, &mut enc);
            let mut dec = vec![0usize; d * ny];
            let mut total = T::zero();
            for j in 0..d {
                for y in 0..ny {
                    let (bb, v) = argmax_by(nb, |b| {
                        (0..nx)
                            .filter(|&x| enc[x] == j)
                            .fold(T::zero(), |acc, x| acc + w.coeff(b, x, y))
                    });
                    dec[j * ny + y] = bb;
                    total += v;
                }
            }
            if best.as_ref().is_none_or(|(v, _, _)| total > *v) {
                best = Some((total, enc.clone(), dec));
            }
        }
    } else {
        let mut dec = vec![0usize; d * ny];
        for code in 0..count {
            digits(code, nb, &mut dec);
            let mut enc = vec![0usize; nx];
            let mut total = T::zero();
            for (x, slot) in enc.iter_mut().enumerate() {
                let (j, v) = argmax_by(d, |j| {
                    (0..ny).fold(T::zero(), |acc, y| acc + w.coeff(dec[j * ny + y], x, y))
                });
                *slot = j;
                total += v;
            }
            if best.as_ref().is_none_or(|(v, _, _)| total > *v) {
                best = Some((total, enc, dec.clone()));
            }
        }
    }

    let (value, encoding, decoding) = best.expect("at least one strategy");
    Ok(BoundReport {
        scenario: Scenario::C,
        value: value.as_f64(),
        exact: true,
        argmax: Argmax::Deterministic { encoding, decoding },
        meta: RunMeta { evaluated: count, ..RunMeta::default() },
    })
}

fn digits(mut code: u64, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = (code % base as u64) as usize;
        code /= base as u64;
    }
}

/// First index attaining the maximum of `f` over 0..n.
fn argmax_by<T: Scalar>(n: usize, f: impl Fn(usize) -> T) -> (usize, T) {
    let mut best = (0, f(0));
    for k in 1..n {
        let v = f(k);
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}
