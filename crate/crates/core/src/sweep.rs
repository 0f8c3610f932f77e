//! Witness maxima over pure states pinned to a facet-witness level, and
//! T_N maxima with a prescribed number of stabilizer preparations.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::facet_witness_qubit_max;
use crate::scalar::Scalar;
use crate::witness::forms::NormSumForm;
use crate::witness::search::{
    alternating_ascent, exhaustive_stabilizer, level_set_argmax, mixed_stabilizer_ascent, vertex, AscentConfig,
    Slot,
};

const SWEEP_S3_ALL: u64 = 10;
const SWEEP_TN: u64 = 20;
const TABLE_TN: u64 = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    /// Facet-witness value shared by the constrained states (≤ 0).
    pub w: f64,
    /// |w| divided by its largest possible magnitude (√3 − 1)/2.
    pub w_normalized: f64,
    pub value: f64,
    pub argmax: Vec<[f64; 3]>,
}

/// `points` facet-witness values with |w|/max evenly spaced over [0, 1].
pub fn normalized_grid<T: Scalar>(points: usize) -> Vec<T> {
    let wmax = facet_witness_qubit_max::<T>();
    match points {
        0 => Vec::new(),
        1 => vec![T::zero()],
        _ => (0..points)
            .map(|i| -wmax * T::from_usize_lossy(i) / T::from_usize_lossy(points - 1))
            .collect(),
    }
}

fn check_grid<T: Scalar>(w_grid: &[T]) -> Result<()> {
    let wmax = facet_witness_qubit_max::<T>();
    for &w in w_grid {
        if !(w <= T::zero() && w >= -wmax - T::lit(1e-12)) {
            return Err(Error::OutOfRange { name: "w", value: w.as_f64(), range: "[-(√3-1)/2, 0]" });
        }
    }
    Ok(())
}

fn point<T: Scalar>(w: T, value: T, argmax: &[Vector3<T>]) -> SweepPoint {
    SweepPoint {
        w: w.as_f64(),
        w_normalized: (-w / facet_witness_qubit_max::<T>()).as_f64(),
        value: value.as_f64(),
        argmax: argmax.iter().map(|v| [v[0].as_f64(), v[1].as_f64(), v[2].as_f64()]).collect(),
    }
}

/// S3 with r1 = +x, r2 = +y and r3 free at facet-witness level w.
///
/// The objective is √2 + ‖(1, 1, 0) − r3‖, so the optimum is the point of
/// the level set that minimizes r3·(1, 1, 0): a single exact best response.
pub fn s3_sweep_one_free<T: Scalar>(w_grid: &[T]) -> Result<Vec<SweepPoint>> {
    check_grid(w_grid)?;
    let (e1, e2) = (vertex::<T>(0), vertex::<T>(2));
    let a = e1 + e2;
    Ok(w_grid
        .iter()
        .map(|&w| {
            let c = T::one() - T::lit(2.0) * w;
            let r3 = level_set_argmax(&(-a), c);
            let value = (a - r3).norm() + (e1 - e2).norm();
            point(w, value, &[e1, e2, r3])
        })
        .collect())
}

fn sweep_all<T: Scalar>(form: &NormSumForm<T>, w_grid: &[T], cfg: &AscentConfig, id: u64) -> Result<Vec<SweepPoint>> {
    check_grid(w_grid)?;
    w_grid
        .par_iter()
        .enumerate()
        .map(|(i, &w)| {
            let slots = vec![Slot::at_facet_witness(w); form.n_slots()];
            let res = alternating_ascent(form, &slots, cfg, &[id, i as u64])?;
            Ok(point(w, res.value, &res.config))
        })
        .collect()
}

/// S3 with all three preparations at facet-witness level w.
pub fn s3_sweep_all_at_w<T: Scalar>(w_grid: &[T], cfg: &AscentConfig) -> Result<Vec<SweepPoint>> {
    sweep_all(&NormSumForm::s3(), w_grid, cfg, SWEEP_S3_ALL)
}

/// T_N with all 2^N preparations at facet-witness level w, N ∈ {2, 3, 4}.
pub fn tn_sweep<T: Scalar>(n: usize, w_grid: &[T], cfg: &AscentConfig) -> Result<Vec<SweepPoint>> {
    if !(2..=4).contains(&n) {
        return Err(Error::OutOfRange { name: "N", value: n as f64, range: "{2, 3, 4}" });
    }
    sweep_all(&NormSumForm::tn(n)?, w_grid, cfg, SWEEP_TN + n as u64)
}

/// One row of the mixed stabilizer table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedRow {
    pub n: usize,
    /// Number of stabilizer preparations.
    pub s: usize,
    /// Maximum with the first s bitstrings (lexicographic) stabilizer.
    pub value: f64,
    /// Maximum over every choice of s stabilizer bitstrings.
    pub max_over_choices: f64,
    /// The choice of stabilizer bitstrings changes the maximum.
    pub choice_dependent: bool,
    /// Inequivalent choices examined (orbits under bit flips and permutations).
    pub orbits: usize,
    /// Only the all-stabilizer row is computed exhaustively.
    pub exact: bool,
}

/// Image of bitstring x under a permutation of bit positions then a flip mask.
fn act(x: usize, perm: &[usize], flip: usize) -> usize {
    let mut out = 0;
    for (i, &p) in perm.iter().enumerate() {
        if (x >> i) & 1 == 1 {
            out |= 1 << p;
        }
    }
    out ^ flip
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative (the lexicographically first subset) per orbit of
/// s-subsets of {0,1}^N under the hyperoctahedral group. T_N is invariant
/// under these relabelings, so every orbit shares one maximum.
pub fn slot_choice_orbits(n: usize, s: usize) -> Vec<Vec<usize>> {
    let nx = 1usize << n;
    let perms = permutations(n);
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for subset in crate::witness::search::combinations(nx, s) {
        let mask: u64 = subset.iter().fold(0, |m, &x| m | 1 << x);
        let canonical = perms
            .iter()
            .flat_map(|p| (0..nx).map(move |f| (p, f)))
            .map(|(p, f)| subset.iter().fold(0u64, |m, &x| m | 1 << act(x, p, f)))
            .min()
            .unwrap_or(mask);
        if seen.insert(canonical) {
            reps.push(subset);
        }
    }
    reps
}

/// T_N maximum with s stabilizer preparations, N ∈ {3, 4}, 0 ≤ s ≤ 2^N.
pub fn mixed_stab_table<T: Scalar>(n: usize, s: usize, cfg: &AscentConfig) -> Result<MixedRow> {
    if !(3..=4).contains(&n) {
        return Err(Error::OutOfRange { name: "N", value: n as f64, range: "{3, 4}" });
    }
    let nx = 1usize << n;
    if s > nx {
        return Err(Error::OutOfRange { name: "s", value: s as f64, range: "[0, 2^N]" });
    }
    let form = NormSumForm::<T>::tn(n)?;
    if s == nx {
        let res = exhaustive_stabilizer(&form, true, true)?;
        let v = res.value.as_f64();
        return Ok(MixedRow { n, s, value: v, max_over_choices: v, choice_dependent: false, orbits: 1, exact: true });
    }
    let orbits = slot_choice_orbits(n, s);
    let values: Vec<f64> = orbits
        .iter()
        .enumerate()
        .map(|(k, subset)| {
            let mut mask = vec![false; nx];
            for &x in subset {
                mask[x] = true;
            }
            mixed_stabilizer_ascent(&form, &mask, cfg, &[TABLE_TN, n as u64, s as u64, k as u64])
                .map(|r| r.value.as_f64())
        })
        .collect::<Result<_>>()?;
    // the lexicographically first subset {0, …, s−1} is always the first representative
    let value = values[0];
    let max_over_choices = values.iter().copied().fold(value, f64::max);
    Ok(MixedRow {
        n,
        s,
        value,
        max_over_choices,
        choice_dependent: max_over_choices > value + 1e-6,
        orbits: orbits.len(),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::BlochVector;
    use crate::polytope::facet_witness_qubit;

    #[test]
    fn grid_spans_full_range() {
        let g = normalized_grid::<f64>(5);
        assert_eq!(g[0], 0.0);
        assert!((g[4] + facet_witness_qubit_max::<f64>()).abs() < 1e-15);
        assert!(s3_sweep_one_free(&[0.1f64]).is_err());
    }

    #[test]
    fn one_free_endpoints_and_peak() {
        let pts = s3_sweep_one_free(&normalized_grid::<f64>(201)).unwrap();
        assert!((pts[0].value - (5f64.sqrt() + 2f64.sqrt())).abs() < 1e-12);
        let peak = pts.iter().fold(&pts[0], |a, b| if b.value > a.value { b } else { a });
        assert!((peak.value - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-4);
        assert!((peak.w_normalized - 0.5658).abs() < 0.01);
        for p in &pts {
            let r = BlochVector::new(p.argmax[2][0], p.argmax[2][1], p.argmax[2][2]).unwrap();
            assert!((facet_witness_qubit(&r) - p.w).abs() < 1e-10);
        }
    }

    #[test]
    fn hyperoctahedral_orbits() {
        // every single bitstring is equivalent to 000
        assert_eq!(slot_choice_orbits(3, 1).len(), 1);
        // pairs of cube vertices split by Hamming distance 1, 2, 3
        assert_eq!(slot_choice_orbits(3, 2).len(), 3);
        assert_eq!(slot_choice_orbits(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn small_table_rows_are_monotone() {
        let cfg = AscentConfig { restarts: 40, ..AscentConfig::default() };
        let rows: Vec<MixedRow> = (6..=8).map(|s| mixed_stab_table::<f64>(3, s, &cfg).unwrap()).collect();
        assert!(rows.windows(2).all(|w| w[1].value <= w[0].value + 1e-9));
        assert!((rows[2].value - (2.0 * 6f64.sqrt() + 2f64.sqrt())).abs() < 1e-12);
    }
}
