//! Recovery of the S3 maximizers when two preparations are stabilizer states.

use nalgebra::Vector3;
use serde::Serialize;

use super::search::vertex;
use crate::qudit::qubit_clifford_orbits;
use crate::scalar::Scalar;

/// max over ordered vertex pairs (r1, r2) of ‖r1 + r2 − r‖ + ‖r1 − r2‖,
/// with the maximizing pair.
pub fn two_stab_objective<T: Scalar>(r: &Vector3<T>) -> (T, (usize, usize)) {
    let mut best = (T::min_value().unwrap_or(-T::one()), (0, 0));
    for i in 0..6 {
        for j in 0..6 {
            let (a, b) = (vertex::<T>(i), vertex::<T>(j));
            let v = (a + b - r).norm() + (a - b).norm();
            if v > best.0 {
                best = (v, (i, j));
            }
        }
    }
    best
}

/// `n` nearly uniform unit vectors on a Fibonacci spiral.
pub fn fibonacci_sphere<T: Scalar>(n: usize) -> Vec<Vector3<T>> {
    let golden = T::pi() * (T::lit(3.0) - T::lit(5.0).sqrt());
    let nf = T::from_usize_lossy(n);
    (0..n)
        .map(|k| {
            let kf = T::from_usize_lossy(k);
            let z = T::one() - T::lit(2.0) * (kf + T::lit(0.5)) / nf;
            let rho = (T::one() - z * z).max(T::zero()).sqrt();
            let phi = golden * kf;
            Vector3::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect()
}

/// Projected gradient ascent with backtracking on the unit sphere for
/// ‖a − r‖ + ‖b‖, with a = r1 + r2 and b = r1 − r2 fixed.
pub fn refine_on_sphere<T: Scalar>(start: Vector3<T>, pair: (usize, usize), max_iters: usize) -> Vector3<T> {
    let a = vertex::<T>(pair.0) + vertex::<T>(pair.1);
    let f = |r: &Vector3<T>| (a - r).norm();
    let mut r = start.normalize();
    let mut step = T::lit(0.5);
    for _ in 0..max_iters {
        let diff = r - a;
        let n = diff.norm();
        if n <= T::zero() {
            break;
        }
        let grad = diff / n;
        let tangent = grad - r * grad.dot(&r);
        if tangent.norm() < T::lit(1e-15) {
            break;
        }
        let f0 = f(&r);
        let mut accepted = false;
        while step > T::lit(1e-18) {
            let cand = (r + tangent * step).normalize();
            if f(&cand) >= f0 + T::lit(1e-4) * step * tangent.norm_squared() {
                r = cand;
                step *= T::lit(2.0);
                accepted = true;
                break;
            }
            step *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub grid_points: usize,
    pub grid_max: f64,
    /// Refined, deduplicated maximizers.
    pub maximizers: Vec<[f64; 3]>,
    pub values: Vec<f64>,
    /// Grid points within 1e-6 of 1 + 2√2.
    pub near_optimal_points: usize,
    /// Largest distance from such a point to the closest H-type vector.
    pub near_optimal_spread: f64,
    /// Maximizers coincide one-to-one with the 12 H-type vectors within 1e-6.
    pub matches_h_orbit: bool,
}

/// Scans a Fibonacci grid, clusters the near-maximal points, refines one
/// seed per cluster and compares the result with the H-type orbit.
pub fn selftest_h(grid_points: usize) -> SelfTestReport {
    let q = 1.0 + 2.0 * 2f64.sqrt();
    let grid = fibonacci_sphere::<f64>(grid_points);
    let scored: Vec<(f64, (usize, usize), Vector3<f64>)> = grid
        .iter()
        .map(|r| {
            let (v, pair) = two_stab_objective(r);
            (v, pair, *r)
        })
        .collect();
    let grid_max = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let (h, _) = qubit_clifford_orbits::<f64>();
    let nearest_h = |r: &Vector3<f64>| h.iter().map(|v| (v.vector() - r).norm()).fold(f64::INFINITY, f64::min);

    let mut near: Vec<&(f64, (usize, usize), Vector3<f64>)> = scored.iter().filter(|s| s.0 >= grid_max - 0.05).collect();
    near.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
    let mut seeds: Vec<&(f64, (usize, usize), Vector3<f64>)> = Vec::new();
    for cand in near {
        if seeds.iter().all(|s| (s.2 - cand.2).norm() > 0.3) {
            seeds.push(cand);
        }
    }

    let mut maximizers: Vec<Vector3<f64>> = Vec::new();
    for seed in seeds {
        let r = refine_on_sphere(seed.2, seed.1, 10_000);
        if maximizers.iter().all(|m| (m - r).norm() > 1e-6) {
            maximizers.push(r);
        }
    }
    maximizers.sort_by(|a, b| {
        a.iter().zip(b.iter()).map(|(x, y)| x.partial_cmp(y).expect("finite")).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = maximizers.iter().map(|r| two_stab_objective(r).0).collect();
    let matches_h_orbit = maximizers.len() == h.len()
        && h.iter().all(|v| maximizers.iter().any(|m| (m - v.vector()).norm() < 1e-6));

    let near_opt: Vec<f64> = scored.iter().filter(|s| s.0 >= q - 1e-6).map(|s| nearest_h(&s.2)).collect();
    SelfTestReport {
        grid_points,
        grid_max,
        maximizers: maximizers.iter().map(|m| [m[0], m[1], m[2]]).collect(),
        values,
        near_optimal_points: near_opt.len(),
        near_optimal_spread: near_opt.iter().copied().fold(0.0, f64::max),
        matches_h_orbit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_states_attain_the_quantum_value() {
        let (h, _) = qubit_clifford_orbits::<f64>();
        for v in h {
            let (val, _) = two_stab_objective(v.vector());
            assert!((val - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for r in fibonacci_sphere::<f64>(1000) {
            assert!((r.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_selftest_recovers_h_orbit() {
        let rep = selftest_h(20_000);
        assert!(rep.matches_h_orbit, "{rep:?}");
    }
}
