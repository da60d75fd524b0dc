//! Magnitudes carried in log space.

use serde::Serialize;

/// A positive number stored by its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogMagnitude(pub f64);

impl LogMagnitude {
    pub fn from_value(x: f64) -> Self {
        Self(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log10(self) -> f64 {
        self.0 / std::f64::consts::LN_10
    }

    /// The value as an `f64`; underflows to zero for tiny magnitudes.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn scientific(self) -> Scientific {
        Scientific::from_log10(self.log10())
    }
}

/// `mantissa * 10^exponent` with `1 <= mantissa < 10`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scientific {
    pub mantissa: f64,
    pub exponent: i64,
}

impl Scientific {
    pub fn from_log10(l: f64) -> Self {
        let mut exponent = l.floor();
        let mut mantissa = 10f64.powf(l - exponent);
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exponent += 1.0;
        }
        Self {
            mantissa,
            exponent: exponent as i64,
        }
    }

    pub fn log10(&self) -> f64 {
        self.mantissa.log10() + self.exponent as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survives_underflow() {
        let m = LogMagnitude(-1.0e6);
        assert_eq!(m.value(), 0.0);
        let s = m.scientific();
        assert!((1.0..10.0).contains(&s.mantissa));
        assert!((s.log10() - m.log10()).abs() < 1e-9);
    }

    #[test]
    fn round_trip_ordinary_values() {
        let s = LogMagnitude::from_value(3.5e-7).scientific();
        assert_eq!(s.exponent, -7);
        assert!((s.mantissa - 3.5).abs() < 1e-12);
    }
}
