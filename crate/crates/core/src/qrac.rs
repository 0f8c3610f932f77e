//! The 2^(d)→1 random access code: two d-ary inputs are encoded into one
//! qudit and either input is decoded on request.

use nalgebra::{Complex, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix};
use crate::qudit::{stabilizer_vertices, DensityMatrix, PrimeDimension};
use crate::rng::rng_for;
use crate::scalar::Scalar;
use crate::witness::Povm;

/// States ρ_{x,x'} (stored at index x·d + x') and the two decoding
/// measurements, one per requested input.
#[derive(Debug, Clone, PartialEq)]
pub struct QracStrategy<T: Scalar> {
    dim: PrimeDimension,
    states: Vec<DensityMatrix<T>>,
    povms: [Povm<T>; 2],
}

impl<T: Scalar> QracStrategy<T> {
    pub fn new(dim: PrimeDimension, states: Vec<DensityMatrix<T>>, povms: [Povm<T>; 2]) -> Result<Self> {
        let d = dim.get();
        if states.len() != d * d {
            return Err(Error::Shape(format!("{} states for d = {d}, expected {}", states.len(), d * d)));
        }
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim().get() });
        }
        for m in &povms {
            if m.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.dim() });
            }
            if m.outcomes() != d {
                return Err(Error::Shape(format!("POVM with {} outcomes, expected {d}", m.outcomes())));
            }
        }
        Ok(Self { dim, states, povms })
    }

    pub fn dim(&self) -> PrimeDimension {
        self.dim
    }

    pub fn state(&self, x: usize, xp: usize) -> &DensityMatrix<T> {
        &self.states[x * self.dim.get() + xp]
    }

    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }

    pub fn povms(&self) -> &[Povm<T>; 2] {
        &self.povms
    }
}

/// Average success probability (1/2d²) Σ Tr[ρ_{x,x'}(M¹_x + M²_{x'})].
pub fn pd_value<T: Scalar>(s: &QracStrategy<T>) -> T {
    let d = s.dim.get();
    let [m1, m2] = &s.povms;
    let mut total = T::zero();
    for x in 0..d {
        for xp in 0..d {
            let rho = s.state(x, xp).matrix();
            total += linalg::trace_product_re(rho, &m1.effects()[x]);
            total += linalg::trace_product_re(rho, &m2.effects()[xp]);
        }
    }
    total / T::from_usize_lossy(2 * d * d)
}

/// Sends |x⟩ and measures both inputs in the computational basis.
pub fn classical_strategy<T: Scalar>(dim: PrimeDimension) -> QracStrategy<T> {
    let d = dim.get();
    let states = (0..d * d)
        .map(|i| {
            let ket = DVector::from_fn(d, |j, _| if j == i / d { cr(T::one()) } else { cr(T::zero()) });
            DensityMatrix::from_ket(&ket, dim).expect("basis ket")
        })
        .collect();
    let povms = [Povm::computational(d), Povm::computational(d)];
    QracStrategy { dim, states, povms }
}

/// Columns ω^{jk}/√d of the discrete Fourier transform.
pub fn fourier_basis<T: Scalar>(d: usize) -> CMatrix<T> {
    let scale = T::one() / T::from_usize_lossy(d).sqrt();
    CMatrix::from_fn(d, d, |j, k| {
        let angle = T::two_pi() * T::from_usize_lossy((j * k) % d) / T::from_usize_lossy(d);
        c(angle.cos() * scale, angle.sin() * scale)
    })
}

/// Computational and Fourier measurements with each state the top
/// eigenvector of M¹_x + M²_{x'}. Reaches (1 + 1/√d)/2.
pub fn mub_quantum_strategy<T: Scalar>(dim: PrimeDimension) -> QracStrategy<T> {
    let d = dim.get();
    let povms = [Povm::computational(d), Povm::from_unitary(&fourier_basis(d))];
    let states = (0..d * d)
        .map(|i| {
            let sum = &povms[0].effects()[i / d] + &povms[1].effects()[i % d];
            top_eigenstate(&sum, dim)
        })
        .collect();
    QracStrategy { dim, states, povms }
}

fn top_eigenstate<T: Scalar>(m: &CMatrix<T>, dim: PrimeDimension) -> DensityMatrix<T> {
    let (_, vectors) = linalg::eigh(m);
    let top: DVector<Complex<T>> = vectors.column(dim.get() - 1).into_owned();
    DensityMatrix::from_ket(&top, dim).expect("unit eigenvector")
}

/// Settings of the measurement optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmConfig {
    /// Target duality gap.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial ascent step; grows geometrically up to `max_step`.
    pub step: f64,
    pub max_step: f64,
    pub projection_iters: usize,
    pub projection_tol: f64,
}

impl Default for PovmConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 400,
            step: 1.0,
            max_step: 1e3,
            projection_iters: 2000,
            projection_tol: 1e-12,
        }
    }
}

/// Optimized measurement with its dual certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSolution<T: Scalar> {
    pub povm: Povm<T>,
    /// Σ_b Tr(M_b H_b).
    pub objective: T,
    /// Tr Y for a feasible Y ⪰ H_b; an upper bound on every POVM's objective.
    pub dual_bound: T,
    pub gap: T,
    /// Whether `gap ≤ tol` was reached.
    pub converged: bool,
}

/// Maximizes Σ_b Tr(M_b H_b) over POVMs, starting from I/n.
pub fn povm_optimize<T: Scalar>(targets: &[CMatrix<T>], cfg: &PovmConfig) -> Result<PovmSolution<T>> {
    let Some(first) = targets.first() else {
        return Err(Error::Shape("no targets".into()));
    };
    let (d, n) = (first.nrows(), targets.len());
    let start = vec![linalg::identity::<T>(d) * cr(T::one() / T::from_usize_lossy(n)); n];
    povm_optimize_from(targets, &Povm::new_unchecked(start), cfg)
}

/// Projected ascent from `start` on the POVM set.
///
/// Each step projects M + ηH onto {M_b ⪰ 0} ∩ {Σ M_b = I} by Dykstra's
/// alternating projections, then repairs the residual so the iterate is an
/// exact POVM. The dual point is Y = Σ_b H_b M_b shifted by the largest
/// violation of Y ⪰ H_b, which closes the gap exactly at an optimum. The
/// best certified iterate is returned.
pub fn povm_optimize_from<T: Scalar>(
    targets: &[CMatrix<T>],
    start: &Povm<T>,
    cfg: &PovmConfig,
) -> Result<PovmSolution<T>> {
    let n = targets.len();
    let Some(first) = targets.first() else {
        return Err(Error::Shape("no targets".into()));
    };
    let d = first.nrows();
    for h in targets {
        if h.nrows() != d || h.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: h.nrows() });
        }
        if linalg::hermiticity_defect(h) > T::lit(T::STRUCTURAL_TOL) {
            return Err(Error::Shape("targets must be Hermitian".into()));
        }
    }
    if start.outcomes() != n || start.dim() != d {
        return Err(Error::Shape(format!("start POVM has {} outcomes on C^{}", start.outcomes(), start.dim())));
    }
    let tol = T::lit(cfg.tol);
    let mut m: Vec<CMatrix<T>> = start.effects().to_vec();
    let mut best = certify(targets, m.clone());
    let mut step = cfg.step;
    for _ in 0..cfg.max_iters {
        if best.gap <= tol {
            break;
        }
        let shifted: Vec<CMatrix<T>> = m.iter().zip(targets).map(|(mb, h)| mb + h * cr(T::lit(step))).collect();
        m = repair(project_povm(&shifted, cfg.projection_iters, T::lit(cfg.projection_tol)));
        let cand = certify(targets, m.clone());
        if cand.objective > best.objective || (cand.objective == best.objective && cand.gap < best.gap) {
            best = cand;
        }
        step = (step * 1.5).min(cfg.max_step);
    }
    best.converged = best.gap <= tol;
    Ok(best)
}

fn certify<T: Scalar>(targets: &[CMatrix<T>], m: Vec<CMatrix<T>>) -> PovmSolution<T> {
    let d = targets[0].nrows();
    let objective = targets.iter().zip(&m).fold(T::zero(), |acc, (h, mb)| acc + linalg::trace_product_re(h, mb));
    let mut y = CMatrix::<T>::zeros(d, d);
    for (h, mb) in targets.iter().zip(&m) {
        y += h * mb;
    }
    let y = linalg::hermitian_part(&y);
    let violation = targets
        .iter()
        .map(|h| linalg::max_eigenvalue(&(h - &y)))
        .fold(T::zero(), |a, b| a.max(b));
    let dual_bound = linalg::trace(&y).re + violation * T::from_usize_lossy(d);
    PovmSolution {
        povm: Povm::new_unchecked(m),
        objective,
        dual_bound,
        gap: (dual_bound - objective).max(T::zero()),
        converged: false,
    }
}

/// Euclidean projection onto {each M_b ⪰ 0} ∩ {Σ M_b = I}.
///
/// The projection is M_b = [Z_b + Λ]_+ for the Hermitian multiplier Λ that
/// makes the effects sum to I; Λ minimizes the smooth convex dual
/// Σ_b ½‖[Z_b + Λ]_+‖² − Tr Λ and is found by damped semismooth Newton.
/// Dykstra's alternating projections take over if Newton stalls.
fn project_povm<T: Scalar>(z: &[CMatrix<T>], max_iters: usize, tol: T) -> Vec<CMatrix<T>> {
    newton_projection(z, tol).unwrap_or_else(|| dykstra_projection(z, max_iters, tol))
}

fn hermitian_basis<T: Scalar>(d: usize) -> Vec<CMatrix<T>> {
    let s = T::one() / T::lit(2.0).sqrt();
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut e = CMatrix::<T>::zeros(d, d);
        e[(i, i)] = cr(T::one());
        basis.push(e);
        for j in i + 1..d {
            let mut re = CMatrix::<T>::zeros(d, d);
            re[(i, j)] = cr(s);
            re[(j, i)] = cr(s);
            basis.push(re);
            let mut im = CMatrix::<T>::zeros(d, d);
            im[(i, j)] = c(T::zero(), s);
            im[(j, i)] = c(T::zero(), -s);
            basis.push(im);
        }
    }
    basis
}

struct PsdPart<T: Scalar> {
    values: Vec<T>,
    vectors: CMatrix<T>,
    clipped: CMatrix<T>,
}

fn psd_part<T: Scalar>(m: &CMatrix<T>) -> PsdPart<T> {
    let (values, vectors) = linalg::eigh(m);
    let pos = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| cr(l.max(T::zero()))),
    ));
    let clipped = &vectors * pos * vectors.adjoint();
    PsdPart { values, vectors, clipped }
}

/// Directional derivative of the PSD clip at V diag(λ) V†.
fn psd_derivative<T: Scalar>(p: &PsdPart<T>, e: &CMatrix<T>) -> CMatrix<T> {
    let n = p.values.len();
    let mut inner = p.vectors.adjoint() * e * &p.vectors;
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (p.values[i], p.values[j]);
            let (pi, pj) = (li.max(T::zero()), lj.max(T::zero()));
            let gamma = if (li - lj).abs() > T::lit(1e-14) {
                (pi - pj) / (li - lj)
            } else if li > T::zero() {
                T::one()
            } else {
                T::zero()
            };
            inner[(i, j)] *= cr(gamma);
        }
    }
    &p.vectors * inner * p.vectors.adjoint()
}

fn newton_projection<T: Scalar>(z: &[CMatrix<T>], tol: T) -> Option<Vec<CMatrix<T>>> {
    let d = z[0].nrows();
    let id = linalg::identity::<T>(d);
    let basis = hermitian_basis::<T>(d);
    let k = basis.len();
    let half = T::lit(0.5);
    let dual = |lambda: &CMatrix<T>| -> (T, Vec<PsdPart<T>>) {
        let parts: Vec<PsdPart<T>> = z.iter().map(|zb| psd_part(&(zb + lambda))).collect();
        let v = parts.iter().fold(T::zero(), |acc, p| acc + half * p.clipped.norm_squared()) - linalg::trace(lambda).re;
        (v, parts)
    };
    // Start from the affine correction of the unconstrained sum.
    let mut sum = CMatrix::<T>::zeros(d, d);
    for zb in z {
        sum += zb;
    }
    let mut lambda = (&id - sum) * cr(T::one() / T::from_usize_lossy(z.len()));
    let (mut value, mut parts) = dual(&lambda);
    for _ in 0..60 {
        let mut residual = -id.clone();
        for p in &parts {
            residual += &p.clipped;
        }
        if residual.norm() < tol {
            return Some(parts.into_iter().map(|p| p.clipped).collect());
        }
        let grad = nalgebra::DVector::<T>::from_iterator(k, basis.iter().map(|e| linalg::trace_product_re(e, &residual)));
        let mut jac = nalgebra::DMatrix::<T>::zeros(k, k);
        for (l, el) in basis.iter().enumerate() {
            let mut col = CMatrix::<T>::zeros(d, d);
            for p in &parts {
                col += psd_derivative(p, el);
            }
            for (r, er) in basis.iter().enumerate() {
                jac[(r, l)] = linalg::trace_product_re(er, &col);
            }
        }
        for r in 0..k {
            jac[(r, r)] += T::lit(1e-12);
        }
        let step = jac.lu().solve(&(-&grad))?;
        let mut dir = CMatrix::<T>::zeros(d, d);
        for (e, &s) in basis.iter().zip(step.iter()) {
            dir += e * cr(s);
        }
        let slope = grad.dot(&step);
        if !(slope < T::zero()) {
            return None;
        }
        let mut t = T::one();
        loop {
            let trial = &lambda + &dir * cr(t);
            let (v, p) = dual(&trial);
            if v <= value + T::lit(1e-4) * t * slope || t < T::lit(1e-10) {
                if t < T::lit(1e-10) && v > value {
                    return None;
                }
                lambda = trial;
                value = v;
                parts = p;
                break;
            }
            t *= half;
        }
    }
    None
}

/// Dykstra's alternating projections onto the PSD product and the affine set.
fn dykstra_projection<T: Scalar>(z: &[CMatrix<T>], max_iters: usize, tol: T) -> Vec<CMatrix<T>> {
    let n = z.len();
    let d = z[0].nrows();
    let inv_n = cr(T::one() / T::from_usize_lossy(n));
    let id = linalg::identity::<T>(d);
    let mut x: Vec<CMatrix<T>> = z.to_vec();
    let mut p = vec![CMatrix::<T>::zeros(d, d); n];
    let mut q = vec![CMatrix::<T>::zeros(d, d); n];
    let mut y = x.clone();
    for _ in 0..max_iters {
        for b in 0..n {
            let v = &x[b] + &p[b];
            y[b] = linalg::psd_projection(&v);
            p[b] = v - &y[b];
        }
        let mut sum = CMatrix::<T>::zeros(d, d);
        for b in 0..n {
            sum += &y[b] + &q[b];
        }
        let corr = (&id - sum) * inv_n;
        let mut change = T::zero();
        for b in 0..n {
            let v = &y[b] + &q[b];
            let next = &v + &corr;
            q[b] = v - &next;
            change = change.max((&next - &x[b]).norm());
            x[b] = next;
        }
        if change < tol {
            break;
        }
    }
    y
}

/// PSD clip then S^{-1/2} M_b S^{-1/2} with S = Σ M_b: an exact POVM.
fn repair<T: Scalar>(m: Vec<CMatrix<T>>) -> Vec<CMatrix<T>> {
    let d = m[0].nrows();
    let clipped: Vec<CMatrix<T>> = m.iter().map(linalg::psd_projection).collect();
    let mut s = CMatrix::<T>::zeros(d, d);
    for mb in &clipped {
        s += mb;
    }
    let (values, vectors) = linalg::eigh(&s);
    let mut inv_sqrt = CMatrix::<T>::zeros(d, d);
    for (k, &lambda) in values.iter().enumerate() {
        let v = vectors.column(k);
        inv_sqrt += v * v.adjoint() * cr(T::one() / lambda.max(T::lit(1e-300)).sqrt());
    }
    clipped
        .iter()
        .map(|mb| linalg::hermitian_part(&(&inv_sqrt * mb * &inv_sqrt)))
        .collect()
}

/// Settings of the stabilizer seesaw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once a full round improves by less than this.
    pub tol: f64,
    pub seed: u64,
    pub povm: PovmConfig,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self { restarts: 100, max_iters: 200, tol: 1e-10, seed: 0, povm: PovmConfig::default() }
    }
}

/// One seesaw run: the objective after every half-step.
#[derive(Debug, Clone, PartialEq)]
pub struct SeesawTrace<T: Scalar> {
    pub values: Vec<T>,
    pub converged: bool,
    pub final_strategy: QracStrategy<T>,
    pub restart: usize,
}

impl<T: Scalar> SeesawTrace<T> {
    pub fn value(&self) -> T {
        *self.values.last().expect("at least one half-step")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawReport<T: Scalar> {
    /// Best run (earliest restart on ties).
    pub best: SeesawTrace<T>,
    /// Every run in restart order.
    pub traces: Vec<SeesawTrace<T>>,
}

/// Heuristic lower bound on the success probability with stabilizer
/// preparations.
///
/// Alternates an exact state step (each ρ_{x,x'} becomes the stabilizer
/// state maximizing Tr[ρ(M¹_x + M²_{x'})]) with certified measurement steps.
/// A measurement step that would lower the objective keeps the incumbent.
pub fn seesaw_stabilizer<T: Scalar>(dim: PrimeDimension, cfg: &SeesawConfig) -> Result<SeesawReport<T>> {
    if cfg.restarts == 0 {
        return Err(Error::OutOfRange { name: "restarts", value: 0.0, range: "[1, ∞)" });
    }
    let vertices: Vec<DensityMatrix<T>> = stabilizer_vertices::<T>(dim).into_iter().map(|v| v.state).collect();
    let traces: Vec<SeesawTrace<T>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| seesaw_once(dim, &vertices, cfg, k))
        .collect();
    let mut best = 0;
    for (k, t) in traces.iter().enumerate() {
        if t.value() > traces[best].value() {
            best = k;
        }
    }
    Ok(SeesawReport { best: traces[best].clone(), traces })
}

fn seesaw_once<T: Scalar>(
    dim: PrimeDimension,
    vertices: &[DensityMatrix<T>],
    cfg: &SeesawConfig,
    restart: usize,
) -> SeesawTrace<T> {
    let d = dim.get();
    let mut rng = rng_for(cfg.seed, &[restart as u64]);
    let mut povms = [
        Povm::from_unitary(&linalg::random_unitary::<T>(d, &mut rng)),
        Povm::from_unitary(&linalg::random_unitary::<T>(d, &mut rng)),
    ];
    let mut values = Vec::new();
    let mut states = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        states = (0..d * d)
            .map(|i| {
                let target = &povms[0].effects()[i / d] + &povms[1].effects()[i % d];
                best_vertex(vertices, &target).clone()
            })
            .collect::<Vec<_>>();
        let strat = QracStrategy { dim, states: states.clone(), povms: povms.clone() };
        values.push(pd_value(&strat));

        for side in 0..2 {
            let targets: Vec<CMatrix<T>> = (0..d)
                .map(|b| {
                    let mut h = CMatrix::<T>::zeros(d, d);
                    for other in 0..d {
                        let i = if side == 0 { b * d + other } else { other * d + b };
                        h += states[i].matrix();
                    }
                    h
                })
                .collect();
            let incumbent = targets
                .iter()
                .zip(povms[side].effects())
                .fold(T::zero(), |acc, (h, m)| acc + linalg::trace_product_re(h, m));
            if let Ok(sol) = povm_optimize_from(&targets, &povms[side], &cfg.povm) {
                if sol.objective > incumbent {
                    povms[side] = sol.povm;
                }
            }
        }
        let strat = QracStrategy { dim, states: states.clone(), povms: povms.clone() };
        values.push(pd_value(&strat));

        let n = values.len();
        if n >= 4 && values[n - 1] - values[n - 3] < T::lit(cfg.tol) {
            converged = true;
            break;
        }
    }
    SeesawTrace {
        values,
        converged,
        final_strategy: QracStrategy { dim, states, povms },
        restart,
    }
}

fn best_vertex<'a, T: Scalar>(vertices: &'a [DensityMatrix<T>], target: &CMatrix<T>) -> &'a DensityMatrix<T> {
    let mut best = &vertices[0];
    let mut best_val = linalg::trace_product_re(best.matrix(), target);
    for v in &vertices[1..] {
        let val = linalg::trace_product_re(v.matrix(), target);
        if val > best_val {
            best = v;
            best_val = val;
        }
    }
    best
}
