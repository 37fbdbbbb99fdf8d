//! The Moussong triangle attached to a label `m`.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("label {0} is below 3")]
pub struct LabelOutOfClass(pub u32);

/// Exact symbolic side length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrigValue {
    One,
    /// `cot(π/n)`
    Cot(u32),
    /// `csc(π/n) = 1/sin(π/n)`
    Csc(u32),
}

impl TrigValue {
    pub fn value(self) -> f64 {
        match self {
            TrigValue::One => 1.0,
            TrigValue::Cot(n) => 1.0 / (std::f64::consts::PI / n as f64).tan(),
            TrigValue::Csc(n) => 1.0 / (std::f64::consts::PI / n as f64).sin(),
        }
    }
}

impl fmt::Display for TrigValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrigValue::One => f.write_str("1"),
            TrigValue::Cot(n) => write!(f, "cot(π/{n})"),
            TrigValue::Csc(n) => write!(f, "csc(π/{n})"),
        }
    }
}

/// Right triangle `{1} ⊂ ⟨a⟩ ⊂ A_ab`. Angles are rational multiples of `π`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoussongTriangle {
    pub m: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub angle_type0: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub angle_type1: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub angle_type2: Ratio<i64>,
    /// `d({1}, ⟨a⟩)`
    pub side_01: TrigValue,
    /// `d(⟨a⟩, A_ab)`
    pub side_12: TrigValue,
    /// `d({1}, A_ab)`
    pub side_02: TrigValue,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl MoussongTriangle {
    pub fn angle_sum(&self) -> Ratio<i64> {
        self.angle_type0 + self.angle_type1 + self.angle_type2
    }

    /// Decimal side lengths `(d01, d12, d02)`.
    pub fn decimal_sides(&self) -> (f64, f64, f64) {
        (self.side_01.value(), self.side_12.value(), self.side_02.value())
    }

    /// Decimal angles in radians `(type 0, type 1, type 2)`.
    pub fn decimal_angles(&self) -> (f64, f64, f64) {
        let pi = std::f64::consts::PI;
        let f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64 * pi;
        (f(self.angle_type0), f(self.angle_type1), f(self.angle_type2))
    }
}

pub fn moussong_geometry(m: u32) -> Result<MoussongTriangle, LabelOutOfClass> {
    if m < 3 {
        return Err(LabelOutOfClass(m));
    }
    let a2 = Ratio::new(1, 2 * m as i64);
    let a1 = Ratio::new(1, 2);
    Ok(MoussongTriangle {
        m,
        angle_type0: Ratio::from_integer(1) - a1 - a2,
        angle_type1: a1,
        angle_type2: a2,
        side_01: TrigValue::One,
        side_12: TrigValue::Cot(2 * m),
        side_02: TrigValue::Csc(2 * m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_three() {
        let t = moussong_geometry(3).unwrap();
        assert_eq!(t.angle_type0, Ratio::new(1, 3));
        assert_eq!(t.angle_type1, Ratio::new(1, 2));
        assert_eq!(t.angle_type2, Ratio::new(1, 6));
        let (a, b, c) = t.decimal_sides();
        assert!((a - 1.0).abs() < 1e-12);
        assert!((b - 3f64.sqrt()).abs() < 1e-12);
        assert!((c - 2.0).abs() < 1e-12);
        assert_eq!(t.side_12.to_string(), "cot(π/6)");
    }

    #[test]
    fn label_four() {
        let t = moussong_geometry(4).unwrap();
        assert_eq!(t.angle_type2, Ratio::new(1, 8));
        let expected = 1.0 / (std::f64::consts::PI / 8.0).sin();
        assert!((t.side_02.value() - expected).abs() < 1e-12);
    }

    #[test]
    fn angle_sums_and_pythagoras() {
        for m in 3..40 {
            let t = moussong_geometry(m).unwrap();
            assert_eq!(t.angle_sum(), Ratio::from_integer(1));
            let (a, b, c) = t.decimal_sides();
            assert!((a * a + b * b - c * c).abs() < 1e-9 * c * c);
        }
        assert_eq!(moussong_geometry(2), Err(LabelOutOfClass(2)));
    }
}
