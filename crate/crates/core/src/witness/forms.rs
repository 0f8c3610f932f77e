//! Measurement-optimized qubit witnesses as weighted sums of Euclidean norms.

use nalgebra::Vector3;

use super::{bit, check_t, WitnessSpec};
use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One term w·‖Σ_x a_x r_x‖₂.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTerm<T: Scalar> {
    pub weight: T,
    pub coeffs: Vec<T>,
}

/// offset + Σ_k w_k ‖Σ_x a_{kx} r_x‖₂ over Bloch vectors r_x.
///
/// For a binary-outcome qubit witness, maximizing over the measurement of
/// setting y turns its contribution into the norm of Σ_x c_{xy} r_x.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSumForm<T: Scalar> {
    n_slots: usize,
    offset: T,
    terms: Vec<NormTerm<T>>,
    antipodal: Option<Vec<usize>>,
}

impl<T: Scalar> NormSumForm<T> {
    pub fn new(n_slots: usize, offset: T, terms: Vec<NormTerm<T>>) -> Result<Self> {
        for (k, t) in terms.iter().enumerate() {
            if t.coeffs.len() != n_slots {
                return Err(Error::Shape(format!("term {k} has {} coefficients, expected {n_slots}", t.coeffs.len())));
            }
            if t.weight < T::zero() || !t.weight.is_finite() {
                return Err(Error::Shape(format!("term {k} has weight {}", t.weight)));
            }
        }
        Ok(Self { n_slots, offset, terms, antipodal: None })
    }

    /// Measurement-optimized form of a binary-outcome qubit witness.
    pub fn from_qubit_spec(w: &WitnessSpec<T>) -> Result<Self> {
        let (nx, ny, nb) = w.shape();
        if !w.dim().is_qubit() || nb != 2 {
            return Err(Error::Unsupported("Bloch form needs a qubit witness with two outcomes".into()));
        }
        let half = T::lit(0.5);
        let mut offset = T::zero();
        let terms = (0..ny)
            .map(|y| {
                let coeffs = (0..nx)
                    .map(|x| {
                        offset += half * (w.coeff(0, x, y) + w.coeff(1, x, y));
                        half * (w.coeff(0, x, y) - w.coeff(1, x, y))
                    })
                    .collect();
                NormTerm { weight: T::one(), coeffs }
            })
            .collect();
        Self::new(nx, offset, terms)
    }

    /// ‖r1 + r2 − r3‖ + ‖r1 − r2‖.
    pub fn s3() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self::new(
            3,
            z,
            vec![
                NormTerm { weight: o, coeffs: vec![o, o, -o] },
                NormTerm { weight: o, coeffs: vec![o, -o, z] },
            ],
        )
        .expect("fixed shape")
    }

    /// 2t‖r1 + r2 − r3‖ + 2(1 − t)‖r1 − r2‖.
    pub fn tilted_s3(t: T) -> Result<Self> {
        check_t(t)?;
        let (o, z, two) = (T::one(), T::zero(), T::lit(2.0));
        Self::new(
            3,
            z,
            vec![
                NormTerm { weight: two * t, coeffs: vec![o, o, -o] },
                NormTerm { weight: two * (o - t), coeffs: vec![o, -o, z] },
            ],
        )
    }

    /// ½ Σ_y ‖Σ_x (−1)^{x_y} r_x‖ over the 2^N bitstrings in lexicographic order.
    pub fn tn(n: usize) -> Result<Self> {
        if !(2..=16).contains(&n) {
            return Err(Error::OutOfRange { name: "N", value: n as f64, range: "[2, 16]" });
        }
        let nx = 1usize << n;
        let terms = (0..n)
            .map(|y| NormTerm {
                weight: T::lit(0.5),
                coeffs: (0..nx).map(|x| if bit(x, y, n) { -T::one() } else { T::one() }).collect(),
            })
            .collect();
        let mut form = Self::new(nx, T::zero(), terms)?;
        form.antipodal = Some((0..nx).map(|x| x ^ (nx - 1)).collect());
        Ok(form)
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn terms(&self) -> &[NormTerm<T>] {
        &self.terms
    }

    /// Slot pairing x ↔ x̄ under which some optimum satisfies r_x̄ = −r_x.
    pub fn antipodal_partners(&self) -> Option<&[usize]> {
        self.antipodal.as_deref()
    }

    /// Σ_x a_{kx} r_x for term k.
    #[inline]
    pub fn term_vector(&self, k: usize, r: &[Vector3<T>]) -> Vector3<T> {
        self.terms[k]
            .coeffs
            .iter()
            .zip(r)
            .fold(Vector3::zeros(), |acc, (&a, v)| acc + v * a)
    }

    pub fn value(&self, r: &[Vector3<T>]) -> Result<T> {
        if r.len() != self.n_slots {
            return Err(Error::Shape(format!("{} vectors for {} slots", r.len(), self.n_slots)));
        }
        Ok(self.value_unchecked(r))
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, r: &[Vector3<T>]) -> T {
        (0..self.terms.len()).fold(self.offset, |acc, k| acc + self.terms[k].weight * self.term_vector(k, r).norm())
    }

    pub fn value_bloch(&self, r: &[BlochVector<T>]) -> Result<T> {
        let v: Vec<Vector3<T>> = r.iter().map(|b| *b.vector()).collect();
        self.value(&v)
    }
}

pub fn s3_bloch<T: Scalar>(r1: &BlochVector<T>, r2: &BlochVector<T>, r3: &BlochVector<T>) -> T {
    let (a, b, c) = (r1.vector(), r2.vector(), r3.vector());
    (a + b - c).norm() + (a - b).norm()
}

pub fn s3_tilted_bloch<T: Scalar>(t: T, r1: &BlochVector<T>, r2: &BlochVector<T>, r3: &BlochVector<T>) -> Result<T> {
    check_t(t)?;
    let (a, b, c) = (r1.vector(), r2.vector(), r3.vector());
    let two = T::lit(2.0);
    Ok(two * t * (a + b - c).norm() + two * (T::one() - t) * (a - b).norm())
}

/// ½ Σ_y ‖Σ_x (−1)^{x_y} r_x‖ with `r` indexed by bitstring in lexicographic order.
pub fn tn_bloch<T: Scalar>(n: usize, r: &[BlochVector<T>]) -> Result<T> {
    if !(2..=16).contains(&n) {
        return Err(Error::OutOfRange { name: "N", value: n as f64, range: "[2, 16]" });
    }
    if r.len() != 1 << n {
        return Err(Error::Shape(format!("T_{n} needs {} vectors, got {}", 1usize << n, r.len())));
    }
    let mut total = T::zero();
    for y in 0..n {
        let sum = r.iter().enumerate().fold(Vector3::zeros(), |acc, (x, v)| {
            if bit(x, y, n) {
                acc - v.vector()
            } else {
                acc + v.vector()
            }
        });
        total += sum.norm();
    }
    Ok(T::lit(0.5) * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_for;
    use proptest::prelude::*;

    fn bv(x: f64, y: f64, z: f64) -> BlochVector<f64> {
        BlochVector::new(x, y, z).unwrap()
    }

    #[test]
    fn s3_examples() {
        let s = 0.5f64.sqrt();
        let q = s3_bloch(&bv(1.0, 0.0, 0.0), &bv(0.0, 1.0, 0.0), &bv(-s, -s, 0.0));
        assert!((q - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        let st = s3_bloch(&bv(1.0, 0.0, 0.0), &bv(0.0, 1.0, 0.0), &bv(-1.0, 0.0, 0.0));
        assert!((st - (5f64.sqrt() + 2f64.sqrt())).abs() < 1e-12);
        let z = BlochVector::<f64>::zero();
        assert_eq!(s3_bloch(&z, &z, &z), 0.0);
    }

    #[test]
    fn tilted_examples() {
        let e3 = bv(0.0, 0.0, 1.0);
        assert!((s3_tilted_bloch(1.0, &e3, &e3, &-e3).unwrap() - 6.0).abs() < 1e-12);
        let e1 = bv(1.0, 0.0, 0.0);
        assert!((s3_tilted_bloch(0.0, &e1, &-e1, &e1).unwrap() - 4.0).abs() < 1e-12);
        assert!(s3_tilted_bloch(1.5, &e1, &e1, &e1).is_err());
    }

    #[test]
    fn tn_examples() {
        let sq = [bv(1.0, 0.0, 0.0), bv(0.0, 1.0, 0.0), bv(0.0, -1.0, 0.0), bv(-1.0, 0.0, 0.0)];
        assert!((tn_bloch(2, &sq).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(tn_bloch(3, &[BlochVector::<f64>::zero(); 8]).unwrap(), 0.0);
        assert!(tn_bloch(3, &sq).is_err());
    }

    #[test]
    fn spec_derived_forms_match_hand_written_ones() {
        let mut rng = rng_for(31, &[]);
        let cases: Vec<(NormSumForm<f64>, NormSumForm<f64>)> = vec![
            (NormSumForm::s3(), NormSumForm::from_qubit_spec(&WitnessSpec::s3()).unwrap()),
            (
                NormSumForm::tilted_s3(0.3).unwrap(),
                NormSumForm::from_qubit_spec(&WitnessSpec::tilted_s3(0.3).unwrap()).unwrap(),
            ),
            (NormSumForm::tn(3).unwrap(), NormSumForm::from_qubit_spec(&WitnessSpec::tn(3).unwrap()).unwrap()),
        ];
        for (hand, derived) in cases {
            for _ in 0..50 {
                let r: Vec<Vector3<f64>> = (0..hand.n_slots())
                    .map(|_| crate::witness::search::random_unit(&mut rng))
                    .collect();
                assert!((hand.value(&r).unwrap() - derived.value(&r).unwrap()).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn tilted_half_is_s3(v in prop::array::uniform9(-0.57f64..0.57)) {
            let r1 = bv(v[0], v[1], v[2]);
            let r2 = bv(v[3], v[4], v[5]);
            let r3 = bv(v[6], v[7], v[8]);
            prop_assert!((s3_tilted_bloch(0.5, &r1, &r2, &r3).unwrap() - s3_bloch(&r1, &r2, &r3)).abs() < 1e-12);
        }
    }
}
