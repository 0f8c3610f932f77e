//! Weyl-Heisenberg displacement operators and single-qudit stabilizer states
//! in prime dimension.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix};
use crate::scalar::Scalar;

/// A prime Hilbert-space dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeDimension(u32);

impl PrimeDimension {
    pub const QUBIT: PrimeDimension = PrimeDimension(2);
    pub const QUTRIT: PrimeDimension = PrimeDimension(3);

    pub fn new(d: u32) -> Result<Self> {
        if d >= 2 && (2..d).take_while(|k| k * k <= d).all(|k| d % k != 0) {
            Ok(Self(d))
        } else {
            Err(Error::NotPrime(d))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_qubit(self) -> bool {
        self.0 == 2
    }

    /// Order of the root of unity in which phases are expressed:
    /// 4 for qubits (phases are powers of i), d otherwise.
    #[inline]
    pub fn phase_modulus(self) -> u32 {
        if self.is_qubit() {
            4
        } else {
            self.0
        }
    }

    /// ω_d as an exponent over [`Self::phase_modulus`]: i for qubits,
    /// ω^{(d+1)/2} (the square root of ω in F_d) for odd d.
    #[inline]
    fn half_omega_units(self) -> i64 {
        if self.is_qubit() {
            1
        } else {
            (self.0 as i64 + 1) / 2
        }
    }

    /// ω = e^{2πi/d} as an exponent over [`Self::phase_modulus`].
    #[inline]
    fn omega_units(self) -> i64 {
        (self.phase_modulus() / self.0) as i64
    }
}

/// Index (a, b) ∈ F_d² of the displacement operator D_{a,b}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DisplacementIndex {
    pub a: u32,
    pub b: u32,
}

impl DisplacementIndex {
    /// Reduces arbitrary integers modulo d.
    pub fn new(dim: PrimeDimension, a: i64, b: i64) -> Self {
        let d = dim.get() as i64;
        Self {
            a: a.rem_euclid(d) as u32,
            b: b.rem_euclid(d) as u32,
        }
    }

    #[inline]
    pub fn is_trivial(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// An exact root of unity e^{2πi k/m}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase {
    pub exponent: u32,
    pub modulus: u32,
}

impl Phase {
    pub fn new(exponent: i64, modulus: u32) -> Self {
        Self {
            exponent: exponent.rem_euclid(modulus as i64) as u32,
            modulus,
        }
    }

    pub fn one(modulus: u32) -> Self {
        Self::new(0, modulus)
    }

    pub fn to_complex<T: Scalar>(self) -> Complex<T> {
        let angle = T::two_pi() * T::from_usize_lossy(self.exponent as usize)
            / T::from_usize_lossy(self.modulus as usize);
        Complex::new(angle.cos(), angle.sin())
    }
}

/// D_{a,b} = ω_d^{ab} X^a Z^b, with X|j> = |j+1>, Z|j> = ω^j |j>.
pub fn displacement_operator<T: Scalar>(dim: PrimeDimension, idx: DisplacementIndex) -> CMatrix<T> {
    let d = dim.get();
    let m = dim.phase_modulus();
    let (a, b) = (idx.a as i64, idx.b as i64);
    let mut out = CMatrix::zeros(d, d);
    for j in 0..d {
        let units = a * b * dim.half_omega_units() + b * j as i64 * dim.omega_units();
        out[((j + idx.a as usize) % d, j)] = Phase::new(units, m).to_complex();
    }
    out
}

/// Group law D_{a,b} D_{a',b'} = phase · D_{(a+a', b+b') mod d}.
///
/// For odd d the phase is ω_d^{a'b − ab'}. For qubits D_{a,b} is only
/// 4-periodic in its indices, so reducing mod 2 contributes an extra
/// factor i^{AB − (A mod 2)(B mod 2)} with A = a+a', B = b+b'.
pub fn group_product(
    dim: PrimeDimension,
    idx1: DisplacementIndex,
    idx2: DisplacementIndex,
) -> (Phase, DisplacementIndex) {
    let d = dim.get() as i64;
    let (a, b) = (idx1.a as i64, idx1.b as i64);
    let (a2, b2) = (idx2.a as i64, idx2.b as i64);
    let (big_a, big_b) = (a + a2, b + b2);
    let mut half_omegas = a2 * b - a * b2;
    if dim.is_qubit() {
        half_omegas += big_a * big_b - (big_a % d) * (big_b % d);
    }
    let phase = Phase::new(half_omegas * dim.half_omega_units(), dim.phase_modulus());
    (phase, DisplacementIndex::new(dim, big_a, big_b))
}

/// The d+1 generator directions (0,1), (1,0), (1,1), …, (1,d−1).
pub fn canonical_directions(dim: PrimeDimension) -> Vec<DisplacementIndex> {
    let d = dim.get() as i64;
    std::iter::once(DisplacementIndex::new(dim, 0, 1))
        .chain((0..d).map(|b| DisplacementIndex::new(dim, 1, b)))
        .collect()
}

/// Projector onto the ω^q eigenspace of D_{a,b}: (1/d) Σ_k (ω^{−q} D)^k.
pub fn eigenprojector<T: Scalar>(dim: PrimeDimension, generator: DisplacementIndex, q: u32) -> CMatrix<T> {
    let d = dim.get();
    let shift = Phase::new(-(q as i64) * dim.omega_units(), dim.phase_modulus()).to_complex::<T>();
    let step = displacement_operator::<T>(dim, generator) * shift;
    let mut power = linalg::identity::<T>(d);
    let mut sum = CMatrix::zeros(d, d);
    for _ in 0..d {
        sum += &power;
        power = &power * &step;
    }
    sum * cr(T::one() / T::from_usize_lossy(d))
}

/// A validated density matrix on C^d with d prime.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    entries: CMatrix<T>,
    dim: PrimeDimension,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(entries: CMatrix<T>, dim: PrimeDimension) -> Result<Self> {
        let d = dim.get();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: entries.nrows() });
        }
        let algebraic = T::lit(T::ALGEBRAIC_TOL);
        let herm = linalg::hermiticity_defect(&entries);
        if herm > algebraic {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = linalg::trace(&entries);
        if (tr.re - T::one()).abs() > algebraic || tr.im.abs() > algebraic {
            return Err(Error::InvalidState(format!("trace {} + {}i", tr.re, tr.im)));
        }
        let lambda = linalg::min_eigenvalue(&entries);
        if lambda < -T::lit(T::STRUCTURAL_TOL) {
            return Err(Error::InvalidState(format!("negative eigenvalue {lambda:e}")));
        }
        Ok(Self { entries, dim })
    }

    pub fn maximally_mixed(dim: PrimeDimension) -> Self {
        let d = dim.get();
        Self {
            entries: linalg::identity::<T>(d) * cr(T::one() / T::from_usize_lossy(d)),
            dim,
        }
    }

    /// Pure state |ψ><ψ| from an unnormalized ket.
    pub fn from_ket(ket: &nalgebra::DVector<Complex<T>>, dim: PrimeDimension) -> Result<Self> {
        Self::new(linalg::projector(ket), dim)
    }

    /// Qubit state (I + r·σ)/2.
    pub fn from_bloch(r: &BlochVector<T>) -> Self {
        let [x, y, z] = r.components();
        let half = T::lit(0.5);
        let entries = CMatrix::from_row_slice(
            2,
            2,
            &[
                cr(half * (T::one() + z)),
                Complex::new(half * x, -half * y),
                Complex::new(half * x, half * y),
                cr(half * (T::one() - z)),
            ],
        );
        Self { entries, dim: PrimeDimension::QUBIT }
    }

    /// Bloch vector (Tr ρX, Tr ρY, Tr ρZ) of a qubit state.
    pub fn to_bloch(&self) -> Result<BlochVector<T>> {
        if !self.dim.is_qubit() {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim.get() });
        }
        let m = &self.entries;
        let two = T::lit(2.0);
        BlochVector::new(two * m[(1, 0)].re, two * m[(1, 0)].im, m[(0, 0)].re - m[(1, 1)].re)
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    #[inline]
    pub fn dim(&self) -> PrimeDimension {
        self.dim
    }

    /// U ρ U†.
    pub fn conjugate(&self, u: &CMatrix<T>) -> Self {
        Self { entries: u * &self.entries * u.adjoint(), dim: self.dim }
    }

    pub fn purity(&self) -> T {
        linalg::trace_product_re(&self.entries, &self.entries)
    }

    /// Tr(ρσ).
    pub fn overlap(&self, other: &Self) -> Result<T> {
        overlap(self, other)
    }
}

/// Tr(ρσ) for two states of equal dimension.
pub fn overlap<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim != sigma.dim {
        return Err(Error::DimensionMismatch { expected: rho.dim.get(), found: sigma.dim.get() });
    }
    Ok(linalg::trace_product_re(&rho.entries, &sigma.entries))
}

/// A pure stabilizer state labelled by its generator and eigenvalue exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerVertex<T: Scalar> {
    pub state: DensityMatrix<T>,
    pub generator: DisplacementIndex,
    pub phase_index: u32,
}

/// All d(d+1) stabilizer states, ordered by canonical direction then q.
pub fn stabilizer_vertices<T: Scalar>(dim: PrimeDimension) -> Vec<StabilizerVertex<T>> {
    let dedup_tol = T::lit(1e-8);
    let mut out: Vec<StabilizerVertex<T>> = Vec::with_capacity(dim.get() * (dim.get() + 1));
    for generator in canonical_directions(dim) {
        for q in 0..dim.get() as u32 {
            let entries = eigenprojector::<T>(dim, generator, q);
            if out
                .iter()
                .any(|v| linalg::frobenius_distance(v.state.matrix(), &entries) < dedup_tol)
            {
                continue;
            }
            let state = DensityMatrix { entries, dim };
            out.push(StabilizerVertex { state, generator, phase_index: q });
        }
    }
    out
}

/// The 12 H-type and 8 T-type qubit magic states as Bloch vectors.
pub fn qubit_clifford_orbits<T: Scalar>() -> (Vec<BlochVector<T>>, Vec<BlochVector<T>>) {
    let h_norm = T::one() / T::lit(2.0).sqrt();
    let t_norm = T::one() / T::lit(3.0).sqrt();
    let signs = [T::one(), -T::one()];
    let mut h = Vec::with_capacity(12);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for si in signs {
            for sj in signs {
                let mut v = [T::zero(); 3];
                v[i] = si * h_norm;
                v[j] = sj * h_norm;
                h.push(BlochVector::from_array_unchecked(v));
            }
        }
    }
    let mut t = Vec::with_capacity(8);
    for sx in signs {
        for sy in signs {
            for sz in signs {
                t.push(BlochVector::from_array_unchecked([sx * t_norm, sy * t_norm, sz * t_norm]));
            }
        }
    }
    (h, t)
}
