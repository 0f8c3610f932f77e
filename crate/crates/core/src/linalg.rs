//! Small dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::rng::Rng;
use crate::scalar::Scalar;

/// Dense complex square matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;

#[inline]
pub fn c<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cr<T: Scalar>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn identity<T: Scalar>(d: usize) -> CMatrix<T> {
    CMatrix::identity(d, d)
}

pub fn trace<T: Scalar>(m: &CMatrix<T>) -> Complex<T> {
    m.diagonal().iter().fold(cr(T::zero()), |acc, &z| acc + z)
}

/// Re Tr(AB) without forming the product.
pub fn trace_product_re<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for k in 0..n {
            let z = a[(i, k)] * b[(k, i)];
            acc += z.re;
        }
    }
    acc
}

pub fn frobenius_distance<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    (a - b).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Largest entrywise deviation of `m` from its adjoint.
pub fn hermiticity_defect<T: Scalar>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(z.norm_sqr().sqrt());
        }
    }
    worst
}

pub fn hermitian_part<T: Scalar>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()) * cr(T::lit(0.5))
}

/// Eigen-decomposition of a Hermitian matrix (the Hermitian part is used).
/// Eigenvalues come back in ascending order with matching eigenvector columns.
pub fn eigh<T: Scalar>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn min_eigenvalue<T: Scalar>(m: &CMatrix<T>) -> T {
    eigh(m).0[0]
}

pub fn max_eigenvalue<T: Scalar>(m: &CMatrix<T>) -> T {
    *eigh(m).0.last().expect("non-empty matrix")
}

/// Euclidean (Frobenius) projection onto the positive semidefinite cone.
pub fn psd_projection<T: Scalar>(m: &CMatrix<T>) -> CMatrix<T> {
    let (values, vectors) = eigh(m);
    let n = values.len();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda > T::zero() {
            let v = vectors.column(k);
            out += v * v.adjoint() * cr(lambda);
        }
    }
    out
}

/// Rank-one projector |v><v| for a (not necessarily normalized) vector.
pub fn projector<T: Scalar>(v: &DVector<Complex<T>>) -> CMatrix<T> {
    let norm2 = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    v * v.adjoint() * cr(T::one() / norm2)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<T: Scalar>(d: usize, rng: &mut Rng) -> CMatrix<T> {
    let g = CMatrix::<T>::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(T::lit(re), T::lit(im))
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..d {
        let z = r[(j, j)];
        let modulus = z.norm_sqr().sqrt();
        if modulus > T::zero() {
            let phase = z * cr(T::one() / modulus);
            for i in 0..d {
                u[(i, j)] *= phase;
            }
        }
    }
    u
}
