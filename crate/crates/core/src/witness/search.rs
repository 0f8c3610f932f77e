//! Maximization of norm-sum witnesses over Bloch vectors.
//!
//! Continuous problems use alternating ascent: with weights w_k ≥ 0,
//! Σ_k w_k‖L_k(r)‖ = max_{‖u_k‖ ≤ 1} Σ_k w_k u_k·L_k(r), which is linear in
//! every r_x once the u_k are fixed. Alternating the exact u-step with an
//! exact per-slot best response never decreases the objective. Stabilizer
//! slots respond with the best octahedron vertex and level-set slots with the
//! best point of {‖r‖₂ = 1, ‖r‖₁ = c}, so constraints are handled exactly.

use nalgebra::Vector3;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::forms::NormSumForm;
use crate::error::{Error, Result};
use crate::report::{Argmax, BoundReport, RunMeta, Scenario};
use crate::rng::{rng_for, Rng};
use crate::scalar::Scalar;

/// Largest number of vertex assignments an exhaustive search visits.
pub const STABILIZER_CAPACITY: f64 = 1e7;
/// Values within this distance of the maximum count as maximizers.
pub const TIE_TOL: f64 = 1e-9;
/// Maximizers stored per exhaustive search (all are counted).
pub const MAX_STORED_MAXIMIZERS: usize = 1024;
/// Below this many vertex assignments, mixed problems enumerate stabilizer
/// slots explicitly and optimize only the free ones.
const OUTER_ENUMERATION_LIMIT: f64 = 1296.0;

/// Admissible set for one preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot<T: Scalar> {
    /// Any pure state (unit sphere).
    Free,
    /// One of the six octahedron vertices.
    Stabilizer,
    /// Pure states with ‖r‖₁ = c, i.e. facet witness (1 − c)/2.
    Level(T),
    /// A given vector.
    Fixed(Vector3<T>),
}

impl<T: Scalar> Slot<T> {
    /// Pure states whose facet witness equals `w` (w ≤ 0).
    pub fn at_facet_witness(w: T) -> Self {
        Slot::Level(T::one() - T::lit(2.0) * w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once an iteration improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self { restarts: 200, max_iters: 20_000, tol: 1e-13, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentResult<T: Scalar> {
    pub value: T,
    pub config: Vec<Vector3<T>>,
    /// Index of the restart that produced `value`.
    pub restart: usize,
    /// Final value of every restart.
    pub restart_values: Vec<T>,
    /// Whether every restart met the tolerance before `max_iters`.
    pub converged: bool,
}

/// Octahedron vertex k in the order +x, −x, +y, −y, +z, −z.
#[inline]
pub fn vertex<T: Scalar>(k: usize) -> Vector3<T> {
    let mut v = Vector3::zeros();
    v[k / 2] = if k % 2 == 0 { T::one() } else { -T::one() };
    v
}

/// Index of the vertex maximizing v·e (first one on ties).
#[inline]
pub fn best_vertex<T: Scalar>(v: &Vector3<T>) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    2 * best + usize::from(v[best] < T::zero())
}

pub(crate) fn random_unit<T: Scalar>(rng: &mut Rng) -> Vector3<T> {
    loop {
        let v = Vector3::from_fn(|_, _| T::lit(rng.sample::<f64, _>(StandardNormal)));
        let n = v.norm();
        if n > T::lit(1e-8) {
            return v / n;
        }
    }
}

/// argmax of v·r over pure states with ‖r‖₁ = c.
///
/// The set is a union of eight circular arcs, one per orthant, each cut from
/// the circle {‖r‖ = 1, q·r = c}. On an arc v·r is a sinusoid in the angle,
/// so its maximum is the free peak when that lies on the arc and an arc
/// endpoint (some r_i = 0) otherwise.
pub fn level_set_argmax<T: Scalar>(v: &Vector3<T>, c: T) -> Vector3<T> {
    let three = T::lit(3.0);
    let sqrt3 = three.sqrt();
    let eps = T::lit(1e-12);
    if c <= T::one() + eps {
        return vertex(best_vertex(v));
    }
    if c >= sqrt3 - eps {
        return Vector3::from_fn(|i, _| if v[i] < T::zero() { -T::one() } else { T::one() }) / sqrt3;
    }
    let radius = (T::one() - c * c / three).sqrt();
    let half_sqrt = T::lit(0.5).sqrt();
    let mut best: Option<(T, Vector3<T>)> = None;
    for orthant in 0..8 {
        let q = Vector3::from_fn(|i, _| if (orthant >> i) & 1 == 1 { -T::one() } else { T::one() });
        let normal = q / sqrt3;
        let center = q * (c / three);
        let e1 = Vector3::new(q[0], -q[1], T::zero()) * half_sqrt;
        let e2 = normal.cross(&e1);
        let (a, b) = (v.dot(&e1), v.dot(&e2));
        let mut angles = vec![b.atan2(a)];
        for i in 0..3 {
            let (alpha, beta) = (q[i] * e1[i], q[i] * e2[i]);
            let amp = (alpha * alpha + beta * beta).sqrt();
            if amp <= T::zero() {
                continue;
            }
            let cos_val = -(c / three) / (radius * amp);
            if cos_val.abs() <= T::one() {
                let phi = beta.atan2(alpha);
                let delta = cos_val.acos();
                angles.push(phi + delta);
                angles.push(phi - delta);
            }
        }
        for theta in angles {
            let r = center + (e1 * theta.cos() + e2 * theta.sin()) * radius;
            if (0..3).all(|i| q[i] * r[i] >= -eps) {
                let score = v.dot(&r);
                if best.as_ref().is_none_or(|(s, _)| score > *s) {
                    best = Some((score, r));
                }
            }
        }
    }
    best.expect("level set is non-empty for 1 < c < √3").1
}

fn best_response<T: Scalar>(slot: &Slot<T>, v: &Vector3<T>, current: &Vector3<T>) -> Vector3<T> {
    match slot {
        Slot::Free => {
            let n = v.norm();
            if n > T::zero() {
                v / n
            } else {
                *current
            }
        }
        Slot::Stabilizer => vertex(best_vertex(v)),
        Slot::Level(c) => level_set_argmax(v, *c),
        Slot::Fixed(f) => *f,
    }
}

fn initial_point<T: Scalar>(slot: &Slot<T>, rng: &mut Rng) -> Vector3<T> {
    match slot {
        Slot::Free => random_unit(rng),
        Slot::Stabilizer => vertex(rng.random_range(0..6)),
        Slot::Level(c) => level_set_argmax(&random_unit(rng), *c),
        Slot::Fixed(f) => *f,
    }
}

/// One ascent run from a random start; returns (value, configuration, converged).
pub fn ascend_once<T: Scalar>(
    form: &NormSumForm<T>,
    slots: &[Slot<T>],
    max_iters: usize,
    tol: f64,
    rng: &mut Rng,
) -> (T, Vec<Vector3<T>>, bool) {
    let mut r: Vec<Vector3<T>> = slots.iter().map(|s| initial_point(s, rng)).collect();
    ascend_from(form, slots, &mut r, max_iters, tol)
}

/// Alternating ascent from the given configuration, updated in place.
pub fn ascend_from<T: Scalar>(
    form: &NormSumForm<T>,
    slots: &[Slot<T>],
    r: &mut Vec<Vector3<T>>,
    max_iters: usize,
    tol: f64,
) -> (T, Vec<Vector3<T>>, bool) {
    let terms = form.terms();
    let tol = T::lit(tol);
    let mut value = form.value_unchecked(r);
    let mut best = r.clone();
    let mut u = vec![Vector3::<T>::zeros(); terms.len()];
    for _ in 0..max_iters {
        for (k, uk) in u.iter_mut().enumerate() {
            let l = form.term_vector(k, r);
            let n = l.norm();
            *uk = if n > T::zero() { l / n } else { Vector3::zeros() };
        }
        for (x, slot) in slots.iter().enumerate() {
            let v = terms
                .iter()
                .zip(&u)
                .fold(Vector3::zeros(), |acc, (t, uk)| acc + uk * (t.weight * t.coeffs[x]));
            r[x] = best_response(slot, &v, &r[x]);
        }
        let next = form.value_unchecked(r);
        if next > value {
            best.clone_from(r);
        }
        if next - value <= tol {
            return (value.max(next), best, true);
        }
        value = next;
    }
    (value, best, false)
}

/// Random-restart alternating ascent. Restart k draws from the stream
/// (seed, stream…, k); the best value wins, earliest restart on ties.
pub fn alternating_ascent<T: Scalar>(
    form: &NormSumForm<T>,
    slots: &[Slot<T>],
    cfg: &AscentConfig,
    stream: &[u64],
) -> Result<AscentResult<T>> {
    if slots.len() != form.n_slots() {
        return Err(Error::Shape(format!("{} slots for a form with {}", slots.len(), form.n_slots())));
    }
    let restarts = cfg.restarts.max(1);
    let runs: Vec<(T, Vec<Vector3<T>>, bool)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut path = stream.to_vec();
            path.push(k as u64);
            let mut rng = rng_for(cfg.seed, &path);
            ascend_once(form, slots, cfg.max_iters, cfg.tol, &mut rng)
        })
        .collect();
    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = k;
        }
    }
    Ok(AscentResult {
        value: runs[best].0,
        config: runs[best].1.clone(),
        restart: best,
        restart_values: runs.iter().map(|r| r.0).collect(),
        converged: runs.iter().all(|r| r.2),
    })
}

/// Best value with the marked slots restricted to stabilizer states and the
/// rest free.
///
/// Small problems enumerate the stabilizer assignments (the first one fixed
/// to +x by octahedral symmetry) and run the ascent over the free slots for
/// each; larger ones let stabilizer slots take exact vertex best responses
/// inside the ascent.
pub fn mixed_stabilizer_ascent<T: Scalar>(
    form: &NormSumForm<T>,
    stabilizer: &[bool],
    cfg: &AscentConfig,
    stream: &[u64],
) -> Result<AscentResult<T>> {
    if stabilizer.len() != form.n_slots() {
        return Err(Error::Shape(format!("{} flags for {} slots", stabilizer.len(), form.n_slots())));
    }
    let stab_slots: Vec<usize> = (0..stabilizer.len()).filter(|&x| stabilizer[x]).collect();
    let s = stab_slots.len();
    let n_free = form.n_slots() - s;
    if s == 0 || n_free == 0 || 6f64.powi(s as i32 - 1) > OUTER_ENUMERATION_LIMIT {
        let slots: Vec<Slot<T>> = stabilizer
            .iter()
            .map(|&st| if st { Slot::Stabilizer } else { Slot::Free })
            .collect();
        return alternating_ascent(form, &slots, cfg, stream);
    }
    let inner = AscentConfig { restarts: cfg.restarts.clamp(1, 16), ..*cfg };
    let count = 6usize.pow(s as u32 - 1);
    let mut best: Option<AscentResult<T>> = None;
    let mut restart_values = Vec::new();
    let mut converged = true;
    for code in 0..count {
        let mut slots = vec![Slot::Free; form.n_slots()];
        let mut rest = code;
        for (j, &x) in stab_slots.iter().enumerate().rev() {
            let k = if j == 0 { 0 } else { rest % 6 };
            if j > 0 {
                rest /= 6;
            }
            slots[x] = Slot::Fixed(vertex(k));
        }
        let mut path = stream.to_vec();
        path.push(code as u64);
        let res = alternating_ascent(form, &slots, &inner, &path)?;
        restart_values.extend_from_slice(&res.restart_values);
        converged &= res.converged;
        if best.as_ref().is_none_or(|b| res.value > b.value) {
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one assignment");
    best.restart_values = restart_values;
    best.converged = converged;
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult<T: Scalar> {
    pub value: T,
    /// Vertex index per slot for each maximizer, lexicographic in the
    /// enumeration order, first `MAX_STORED_MAXIMIZERS` of them.
    pub maximizers: Vec<Vec<usize>>,
    pub n_maximizers: usize,
    pub evaluated: u64,
}

/// Exhaustive search over octahedron vertices for every slot.
///
/// `antipodal` restricts to r_x̄ = −r_x over the form's slot pairing and
/// `fix_first` pins the first enumerated slot to +x; both reductions preserve
/// the maximum value.
pub fn exhaustive_stabilizer<T: Scalar>(
    form: &NormSumForm<T>,
    antipodal: bool,
    fix_first: bool,
) -> Result<ExhaustiveResult<T>> {
    let n = form.n_slots();
    let partners: Option<&[usize]> = if antipodal {
        Some(form.antipodal_partners().ok_or_else(|| {
            Error::Unsupported("antipodal reduction needs a witness with a slot pairing".into())
        })?)
    } else {
        None
    };
    let reps: Vec<usize> = match partners {
        Some(p) => (0..n).filter(|&x| x < p[x]).collect(),
        None => (0..n).collect(),
    };
    let digits = reps.len() - usize::from(fix_first && !reps.is_empty());
    let size = 6f64.powi(digits as i32);
    if size > STABILIZER_CAPACITY {
        return Err(Error::Capacity { size, capacity: STABILIZER_CAPACITY });
    }
    let count = size as u64;
    let decode = |code: u64, out: &mut [usize]| {
        let mut rest = code;
        for (j, &x) in reps.iter().enumerate().rev() {
            let k = if fix_first && j == 0 {
                0
            } else {
                let k = (rest % 6) as usize;
                rest /= 6;
                k
            };
            out[x] = k;
            if let Some(p) = partners {
                out[p[x]] = k ^ 1;
            }
        }
    };

    const CHUNK: u64 = 4096;
    let n_chunks = count.div_ceil(CHUNK);
    let chunks: Vec<(T, Vec<(u64, T)>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut idx = vec![0usize; n];
            let mut r = vec![Vector3::<T>::zeros(); n];
            let mut best = T::min_value().unwrap_or(-T::one());
            let mut near: Vec<(u64, T)> = Vec::new();
            let tie = T::lit(TIE_TOL);
            for code in c * CHUNK..((c + 1) * CHUNK).min(count) {
                decode(code, &mut idx);
                for (v, &k) in r.iter_mut().zip(&idx) {
                    *v = vertex(k);
                }
                let value = form.value_unchecked(&r);
                if value > best {
                    best = value;
                    near.retain(|(_, v)| *v >= best - tie);
                }
                if value >= best - tie {
                    near.push((code, value));
                }
            }
            (best, near)
        })
        .collect();

    let value = chunks.iter().map(|c| c.0).fold(chunks[0].0, |a, b| a.max(b));
    let tie = T::lit(TIE_TOL);
    let mut maximizers = Vec::new();
    let mut n_maximizers = 0;
    for (code, v) in chunks.iter().flat_map(|c| c.1.iter()) {
        if *v >= value - tie {
            n_maximizers += 1;
            if maximizers.len() < MAX_STORED_MAXIMIZERS {
                let mut idx = vec![0usize; n];
                decode(*code, &mut idx);
                maximizers.push(idx);
            }
        }
    }
    Ok(ExhaustiveResult { value, maximizers, n_maximizers, evaluated: count })
}

fn bloch_argmax<T: Scalar>(configs: impl IntoIterator<Item = Vec<Vector3<T>>>) -> Argmax {
    Argmax::Bloch(
        configs
            .into_iter()
            .map(|c| c.iter().map(|v| [v[0].as_f64(), v[1].as_f64(), v[2].as_f64()]).collect())
            .collect(),
    )
}

fn meta(cfg: &AscentConfig, restarts: usize, evaluated: u64) -> RunMeta {
    RunMeta { restarts, tolerance: cfg.tol, seed: Some(cfg.seed), evaluated }
}

/// Stabilizer bound with the last `n_free` slots unrestricted.
///
/// With `n_free = 0` the vertex assignments are enumerated exhaustively
/// (exact), using the antipodal reduction when the witness has one; beyond
/// [`STABILIZER_CAPACITY`] the ascent with vertex best responses is used and
/// the report is marked inexact. With `n_free > 0` the report carries
/// scenario (n_free + 1)-STAB.
pub fn stabilizer_bound_qubit<T: Scalar>(
    form: &NormSumForm<T>,
    n_free: usize,
    cfg: &AscentConfig,
) -> Result<BoundReport> {
    let n = form.n_slots();
    if n_free > n {
        return Err(Error::OutOfRange { name: "n_free", value: n_free as f64, range: "[0, number of slots]" });
    }
    if n_free == 0 {
        let antipodal = form.antipodal_partners().is_some();
        return match exhaustive_stabilizer(form, antipodal, true) {
            Ok(res) => Ok(BoundReport {
                scenario: Scenario::Stab,
                value: res.value.as_f64(),
                exact: true,
                argmax: bloch_argmax(
                    res.maximizers.iter().map(|m| m.iter().map(|&k| vertex::<T>(k)).collect()),
                ),
                meta: meta(cfg, 0, res.evaluated),
            }),
            Err(Error::Capacity { .. }) => {
                let res = alternating_ascent(form, &vec![Slot::Stabilizer; n], cfg, &[0])?;
                Ok(BoundReport {
                    scenario: Scenario::Stab,
                    value: res.value.as_f64(),
                    exact: false,
                    argmax: bloch_argmax([res.config]),
                    meta: meta(cfg, cfg.restarts, 0),
                })
            }
            Err(e) => Err(e),
        };
    }
    let mask: Vec<bool> = (0..n).map(|x| x < n - n_free).collect();
    let res = mixed_stabilizer_ascent(form, &mask, cfg, &[1])?;
    Ok(k_stab_report(n_free, res, cfg))
}

/// Like [`stabilizer_bound_qubit`] with `n_free > 0`, but maximized over
/// every choice of which `n_free` slots are unrestricted.
pub fn k_stabilizer_bound_any_slots<T: Scalar>(
    form: &NormSumForm<T>,
    n_free: usize,
    cfg: &AscentConfig,
) -> Result<BoundReport> {
    let n = form.n_slots();
    if n_free == 0 || n_free > n {
        return Err(Error::OutOfRange { name: "n_free", value: n_free as f64, range: "[1, number of slots]" });
    }
    let subsets = binomial(n, n_free);
    if subsets > 1e4 {
        return Err(Error::Capacity { size: subsets, capacity: 1e4 });
    }
    let mut best: Option<AscentResult<T>> = None;
    for (i, free) in combinations(n, n_free).into_iter().enumerate() {
        let mut mask = vec![true; n];
        for x in free {
            mask[x] = false;
        }
        let res = mixed_stabilizer_ascent(form, &mask, cfg, &[3, i as u64])?;
        if best.as_ref().is_none_or(|b| res.value > b.value) {
            best = Some(res);
        }
    }
    Ok(k_stab_report(n_free, best.expect("at least one subset"), cfg))
}

fn k_stab_report<T: Scalar>(n_free: usize, res: AscentResult<T>, cfg: &AscentConfig) -> BoundReport {
    BoundReport {
        scenario: Scenario::KStab(n_free + 1),
        value: res.value.as_f64(),
        exact: false,
        argmax: bloch_argmax([res.config]),
        meta: meta(cfg, cfg.restarts, 0),
    }
}

/// Quantum bound: every slot an arbitrary pure state.
pub fn quantum_bound_qubit<T: Scalar>(form: &NormSumForm<T>, cfg: &AscentConfig) -> Result<BoundReport> {
    let res = alternating_ascent(form, &vec![Slot::Free; form.n_slots()], cfg, &[2])?;
    Ok(BoundReport {
        scenario: Scenario::Q,
        value: res.value.as_f64(),
        exact: false,
        argmax: bloch_argmax([res.config]),
        meta: meta(cfg, cfg.restarts.max(1), 0),
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All k-subsets of 0..n in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
