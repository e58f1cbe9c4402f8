//! Operator norms, the witness function `f`, and non-distortion certificates.

mod certificate;
mod lattice;
mod select;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::absval::{AbsoluteValue, AvKind, LogMagnitude};
use crate::fields::logvalue::LogValue;
use crate::fields::FieldElement;
use crate::scalar::{Field, Rational};
use crate::Matrix;

pub use certificate::{
    certify_undistorted, verify_certificate, BasisElement, Certificate, CertifyFailure, CheckOutcome, CheckReport,
    FailureStage, VerificationReport, VerifyOptions,
};
pub use lattice::{apply as apply_v, lattice_bound, LatticeBound};
pub use select::{av_library, select_absolute_values, Selection, SelectionFailure, VRow};

/// Rationals as `"n/d"` strings.
pub(crate) mod rational_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::scalar::Rational;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| serde::de::Error::custom(format!("bad rational {text:?}")))
    }
}

/// Least valuation over the nonzero entries of `m`, for discrete kinds.
fn min_valuation(m: &Matrix, av: &AbsoluteValue) -> Result<Option<i64>> {
    let mut best: Option<i64> = None;
    for x in m.entries().iter().filter(|x| !x.vanishes()) {
        if let Some(v) = av.valuation(x)? {
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    Ok(best)
}

/// For archimedean `av`, the element whose embedding is the largest
/// absolute row sum of `m`.
fn max_row_sum(m: &Matrix, av: &AbsoluteValue) -> Result<FieldElement> {
    let desc = m.descriptor();
    let mut best: Option<FieldElement> = None;
    for row in m.rows() {
        let mut sum = FieldElement::zero_in(desc);
        for x in row {
            let y = av.embedded_abs(x).ok_or_else(|| Error::AbsoluteValueMismatch {
                av: av.to_string(),
                field: desc.to_string(),
            })?;
            sum = sum.add(&y);
        }
        best = Some(match best {
            Some(b) if av.cmp_embedded(&b, &sum) != Some(Ordering::Less) => b,
            _ => sum,
        });
    }
    Ok(best.expect("matrices are nonempty"))
}

fn check_av(m: &Matrix, av: &AbsoluteValue) -> Result<()> {
    if av.target() != m.descriptor() {
        return Err(Error::AbsoluteValueMismatch { av: av.to_string(), field: m.descriptor().to_string() });
    }
    Ok(())
}

/// Exact `log ||m||_op` for the max-norm on `F^d` under `av`.
pub fn operator_norm_log(m: &Matrix, av: &AbsoluteValue) -> Result<LogValue> {
    check_av(m, av)?;
    if av.is_archimedean() {
        return av.log_abs(&max_row_sum(m, av)?);
    }
    if matches!(av.kind(), AvKind::Trivial) {
        return Ok(LogValue::zero());
    }
    let v = min_valuation(m, av)?.ok_or(Error::NotInvertible)?;
    Ok(av.base_log().expect("discrete kind").scale(&Rational::from_integer((-v).into())))
}

/// Certified `log ||m||_op` under `av`.
pub fn operator_norm(m: &Matrix, av: &AbsoluteValue, precision: u64) -> Result<LogMagnitude> {
    Ok(LogMagnitude::from_value(operator_norm_log(m, av)?, precision))
}

/// `log max(||m||, ||m^-1||)` under `av`, decided exactly.
pub fn norm_pair_log(m: &Matrix, m_inv: &Matrix, av: &AbsoluteValue) -> Result<LogValue> {
    check_av(m, av)?;
    if av.is_archimedean() {
        let a = max_row_sum(m, av)?;
        let b = max_row_sum(m_inv, av)?;
        let larger = if av.cmp_embedded(&a, &b) == Some(Ordering::Less) { b } else { a };
        return av.log_abs(&larger);
    }
    if matches!(av.kind(), AvKind::Trivial) {
        return Ok(LogValue::zero());
    }
    let v = match (min_valuation(m, av)?, min_valuation(m_inv, av)?) {
        (Some(x), Some(y)) => x.min(y),
        _ => return Err(Error::NotInvertible),
    };
    Ok(av.base_log().expect("discrete kind").scale(&Rational::from_integer((-v).into())))
}

/// `f(M) = sum_i log max(||M||_i, ||M^-1||_i)` over a list of absolute values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFunction {
    pub absolute_values: Vec<AbsoluteValue>,
    /// Bits used for enclosures and the cap for deciding signs.
    pub precision: u64,
}

impl WitnessFunction {
    pub fn new(absolute_values: Vec<AbsoluteValue>, precision: u64) -> Self {
        WitnessFunction { absolute_values, precision }
    }

    /// Per-absolute-value terms of `f(m)`.
    pub fn contributions(&self, m: &Matrix) -> Result<Vec<LogValue>> {
        let inv = m.inverse().ok_or(Error::NotInvertible)?;
        self.absolute_values.iter().map(|av| norm_pair_log(m, &inv, av)).collect()
    }

    /// Exact symbolic `f(m)`.
    pub fn value(&self, m: &Matrix) -> Result<LogValue> {
        Ok(self.contributions(m)?.iter().fold(LogValue::zero(), |acc, c| acc.add(c)))
    }

    /// Certified enclosure of `f(m)`.
    pub fn eval(&self, m: &Matrix) -> Result<LogMagnitude> {
        Ok(LogMagnitude::from_value(self.value(m)?, self.precision))
    }

    /// Sign cap for comparisons: enclosures are refined up to this many bits.
    pub fn max_precision(&self) -> u64 {
        self.precision.max(8) * 4
    }
}

/// Certified `f(m)`.
pub fn witness_f(w: &WitnessFunction, m: &Matrix) -> Result<LogMagnitude> {
    w.eval(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDescriptor;

    fn q() -> FieldDescriptor {
        FieldDescriptor::Rationals
    }

    #[test]
    fn two_adic_norms() {
        let av = AbsoluteValue::p_adic(2).unwrap();
        let t = Matrix::from_ints(&q(), &[&[2, 0], &[0, 1]]);
        let t_inv = t.inverse().unwrap();
        assert_eq!(operator_norm_log(&t, &av).unwrap(), LogValue::zero());
        assert_eq!(operator_norm_log(&t_inv, &av).unwrap(), LogValue::ln_prime(2));
        assert_eq!(norm_pair_log(&t, &t_inv, &av).unwrap(), LogValue::ln_prime(2));
        let a = Matrix::from_ints(&q(), &[&[1, 1], &[0, 1]]);
        assert_eq!(norm_pair_log(&a, &a.inverse().unwrap(), &av).unwrap(), LogValue::zero());
        let id = Matrix::identity(3, &q());
        assert_eq!(operator_norm_log(&id, &AbsoluteValue::archimedean()).unwrap(), LogValue::zero());
    }

    #[test]
    fn worked_example_in_gl1() {
        let f = WitnessFunction::new(vec![AbsoluteValue::p_adic(2).unwrap(), AbsoluteValue::p_adic(3).unwrap()], 64);
        for (n1, n2) in [(3i64, -2i64), (-5, 0), (0, 4), (1, 1)] {
            let two = Matrix::from_ints(&q(), &[&[2]]).pow_signed(n1).unwrap();
            let m = two.mul(&Matrix::from_ints(&q(), &[&[3]]).pow_signed(n2).unwrap());
            let expected = LogValue::ln_prime(2)
                .scale(&Rational::from_integer(n1.abs().into()))
                .add(&LogValue::ln_prime(3).scale(&Rational::from_integer(n2.abs().into())));
            assert_eq!(f.value(&m).unwrap(), expected);
        }
        assert_eq!(f.value(&Matrix::identity(1, &q())).unwrap(), LogValue::zero());
    }

    #[test]
    fn archimedean_row_sums() {
        let d = FieldDescriptor::real_quadratic(5).unwrap();
        let b = Matrix::parse(&d, &[vec!["1".into(), "(-1 + sqrt(5))/2".into()], vec!["0".into(), "1".into()]]).unwrap();
        let av = AbsoluteValue::embedding(5, true).unwrap();
        let phi = d.parse_element("(1 + sqrt(5))/2").unwrap();
        assert_eq!(operator_norm_log(&b, &av).unwrap(), av.log_abs(&phi).unwrap());
    }
}
