//! H-representation of the single-qudit stabilizer polytope and the qubit
//! non-stabilizerness measures.

use nalgebra::Vector3;

use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qudit::{canonical_directions, eigenprojector, stabilizer_vertices, DensityMatrix, PrimeDimension, StabilizerVertex};
use crate::scalar::Scalar;

/// A_q = −I + Σ_j Π_j^{q_j}, with Π_j^{q} the ω^q eigenprojector of the
/// j-th canonical displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetOperator<T: Scalar> {
    pub matrix: CMatrix<T>,
    pub label: Vec<u32>,
}

/// All d^{d+1} facet operators, labels in lexicographic order.
pub fn facet_operators<T: Scalar>(dim: PrimeDimension) -> Vec<FacetOperator<T>> {
    let d = dim.get();
    let dirs = canonical_directions(dim);
    let projectors: Vec<Vec<CMatrix<T>>> = dirs
        .iter()
        .map(|&g| (0..d as u32).map(|q| eigenprojector(dim, g, q)).collect())
        .collect();
    let count = d.pow(dirs.len() as u32);
    (0..count)
        .map(|mut code| {
            let mut label = vec![0u32; dirs.len()];
            for slot in label.iter_mut().rev() {
                *slot = (code % d) as u32;
                code /= d;
            }
            let mut matrix = -linalg::identity::<T>(d);
            for (j, &q) in label.iter().enumerate() {
                matrix += &projectors[j][q as usize];
            }
            FacetOperator { matrix, label }
        })
        .collect()
}

/// Cached vertex and facet lists for one dimension.
#[derive(Debug, Clone)]
pub struct StabilizerPolytope<T: Scalar> {
    dim: PrimeDimension,
    vertices: Vec<StabilizerVertex<T>>,
    facets: Vec<FacetOperator<T>>,
}

impl<T: Scalar> StabilizerPolytope<T> {
    pub fn new(dim: PrimeDimension) -> Self {
        Self {
            dim,
            vertices: stabilizer_vertices(dim),
            facets: facet_operators(dim),
        }
    }

    pub fn dim(&self) -> PrimeDimension {
        self.dim
    }

    pub fn vertices(&self) -> &[StabilizerVertex<T>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[FacetOperator<T>] {
        &self.facets
    }

    /// The smallest facet value Tr(ρ A_q) and the index of the facet attaining it.
    pub fn min_facet(&self, rho: &DensityMatrix<T>) -> Result<(T, usize)> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim.get(), found: rho.dim().get() });
        }
        let mut best = (T::max_value().unwrap_or_else(T::one), 0);
        for (k, f) in self.facets.iter().enumerate() {
            let v = linalg::trace_product_re(rho.matrix(), &f.matrix);
            if v < best.0 {
                best = (v, k);
            }
        }
        Ok(best)
    }

    pub fn contains(&self, rho: &DensityMatrix<T>) -> Result<bool> {
        Ok(self.min_facet(rho)?.0 >= -T::lit(T::STRUCTURAL_TOL))
    }
}

/// Membership through the facet inequalities Tr(ρ A_q) ≥ 0.
pub fn is_stabilizer_member<T: Scalar>(rho: &DensityMatrix<T>) -> bool {
    StabilizerPolytope::new(rho.dim())
        .contains(rho)
        .expect("polytope built for the state's own dimension")
}

/// Most negative qubit facet value, ½·min(0, 1 − ‖r‖₁).
pub fn facet_witness_qubit<T: Scalar>(r: &BlochVector<T>) -> T {
    (T::lit(0.5) * (T::one() - r.l1_norm())).min(T::zero())
}

/// Largest magnitude of the qubit facet witness, (√3 − 1)/2, attained at T states.
pub fn facet_witness_qubit_max<T: Scalar>() -> T {
    (T::lit(3.0).sqrt() - T::one()) * T::lit(0.5)
}

/// Qubit non-stabilizerness summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsReport<T: Scalar> {
    /// Trace distance to the octahedron.
    pub ns: T,
    /// Facet witness value (≤ 0).
    pub w: T,
    /// Closest stabilizer mixture.
    pub nearest_point: BlochVector<T>,
}

/// Trace distance from a qubit state to the stabilizer octahedron, computed
/// by exact Euclidean projection onto the unit ℓ1 ball.
pub fn ns_trace_distance_qubit<T: Scalar>(r: &BlochVector<T>) -> NsReport<T> {
    let comps = r.components();
    let p = project_l1_ball(&comps, T::one());
    let nearest = Vector3::new(p[0], p[1], p[2]);
    let ns = T::lit(0.5) * (r.vector() - nearest).norm();
    NsReport {
        ns,
        w: facet_witness_qubit(r),
        nearest_point: BlochVector::from_vector(nearest).expect("ℓ1 ball lies inside the unit ball"),
    }
}

/// Euclidean projection onto the simplex {w ≥ 0, Σ w = z} by sorting.
pub fn project_simplex<T: Scalar>(v: &[T], z: T) -> Vec<T> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite input"));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let candidate = (cumsum - z) / T::from_usize_lossy(j + 1);
        if uj - candidate > T::zero() {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(T::zero())).collect()
}

/// Euclidean projection onto the ℓ1 ball of radius z.
pub fn project_l1_ball<T: Scalar>(v: &[T], z: T) -> Vec<T> {
    let abs: Vec<T> = v.iter().map(|x| x.abs()).collect();
    if abs.iter().fold(T::zero(), |acc, &x| acc + x) <= z {
        return v.to_vec();
    }
    project_simplex(&abs, z)
        .into_iter()
        .zip(v)
        .map(|(w, &x)| if x < T::zero() { -w } else { w })
        .collect()
}

/// ½‖ρ − σ‖₁.
pub fn trace_distance<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim().get(), found: sigma.dim().get() });
    }
    let (values, _) = linalg::eigh(&(rho.matrix() - sigma.matrix()));
    Ok(T::lit(0.5) * values.iter().fold(T::zero(), |acc, x| acc + x.abs()))
}
