//! Polynomials and truncated power-series patches.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `c_0 + c_1 t + ... + c_d t^d`, leading coefficient nonzero unless `d = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped; an empty list is the zero polynomial.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("polynomial coefficients must be finite".into()));
        }
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(Polynomial { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    pub fn identity() -> Self {
        Polynomial { coeffs: vec![0.0, 1.0] }
    }

    /// `(t - c)^k` expanded by the binomial theorem.
    pub fn shifted_power(c: f64, k: u32) -> Self {
        let mut p = Polynomial::constant(1.0);
        let lin = Polynomial { coeffs: vec![-c, 1.0] };
        for _ in 0..k {
            p = p.mul(&lin);
        }
        p
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Horner evaluation.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Polynomial::new(c).expect("finite")
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            for (k, b) in other.coeffs.iter().enumerate() {
                c[j + k] += a * b;
            }
        }
        Polynomial::new(c).expect("finite")
    }

    /// `self ∘ inner`, i.e. `t ↦ self(inner(t))`, by Horner on coefficients.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::constant(0.0), |acc, &c| acc.mul(inner).add(&Polynomial::constant(c)))
    }

    pub fn derivative(&self) -> Polynomial {
        if self.is_constant() {
            return Polynomial::constant(0.0);
        }
        let c = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
        Polynomial::new(c).expect("finite")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("poly:")?;
        for c in &self.coeffs {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

fn numbers(body: &str) -> Result<Vec<f64>> {
    body.split_whitespace()
        .map(|w| w.parse::<f64>().map_err(|e| Error::Malformed(format!("bad coefficient '{w}': {e}"))))
        .collect()
}

impl FromStr for Polynomial {
    type Err = Error;

    /// `poly: c0 c1 c2 ...`
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix("poly:")
            .ok_or_else(|| Error::Malformed(format!("expected 'poly: c0 c1 ...', got '{s}'")))?;
        let c = numbers(body)?;
        if c.is_empty() {
            return Err(Error::Malformed("polynomial without coefficients".into()));
        }
        Polynomial::new(c)
    }
}

/// Relative size of the neglected remainder a patch must stay below.
pub const PATCH_REMAINDER: f64 = 1e-14;

/// `Σ_k c_k (y - y0)^k` on `|y - y0| <= radius`.
///
/// The coefficient list is the complete expansion when built with
/// [`new`](Self::new) or parsed, and a certified truncation when built with
/// [`from_terms`](Self::from_terms); `remainder` bounds what was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeriesPatch {
    pub center: f64,
    pub radius: f64,
    coeffs: Vec<f64>,
    remainder: f64,
}

impl PowerSeriesPatch {
    pub fn new(center: f64, radius: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidParameter(format!("patch needs finite center and radius > 0, got {center}, {radius}")));
        }
        if coeffs.is_empty() {
            return Err(Error::Malformed("patch without coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("patch coefficients must be finite".into()));
        }
        let envelope: f64 = coeffs.iter().enumerate().map(|(k, c)| c.abs() * radius.powi(k as i32)).sum();
        if !envelope.is_finite() {
            return Err(Error::NotSummable(format!("coefficients overflow at radius {radius}")));
        }
        Ok(PowerSeriesPatch { center, radius, coeffs, remainder: 0.0 })
    }

    /// Sums `term(k)` until the ratio envelope of `|c_k| r^k` certifies that
    /// the rest is below [`PATCH_REMAINDER`] of the accumulated scale.
    pub fn from_terms(center: f64, radius: f64, term: impl Fn(usize) -> f64) -> Result<Self> {
        const MAX_TERMS: usize = 4096;
        let mut coeffs = Vec::new();
        let mut scale = 0.0f64;
        let mut prev = f64::NAN;
        for k in 0..MAX_TERMS {
            let c = term(k);
            let mag = c.abs() * radius.powi(k as i32);
            if !mag.is_finite() {
                break;
            }
            coeffs.push(c);
            scale += mag;
            // Geometric envelope from the last ratio: rest <= mag ρ / (1 - ρ).
            if k >= 4 && prev > 0.0 {
                let rho = mag / prev;
                if rho < 0.5 && mag * rho / (1.0 - rho) <= PATCH_REMAINDER * scale.max(f64::MIN_POSITIVE) {
                    let mut p = PowerSeriesPatch::new(center, radius, coeffs)?;
                    p.remainder = mag * rho / (1.0 - rho);
                    return Ok(p);
                }
            }
            if mag == 0.0 && k >= 4 && prev == 0.0 {
                return PowerSeriesPatch::new(center, radius, coeffs);
            }
            prev = mag;
        }
        Err(Error::NotSummable(format!("terms do not decay fast enough at radius {radius}")))
    }

    /// `exp` expanded at `center`.
    pub fn exp(center: f64, radius: f64) -> Result<Self> {
        let e0 = center.exp();
        PowerSeriesPatch::from_terms(center, radius, move |k| e0 / factorial(k))
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Certified bound on the dropped tail over the whole patch.
    pub fn remainder(&self) -> f64 {
        self.remainder
    }

    pub fn contains(&self, y: f64) -> bool {
        (y - self.center).abs() <= self.radius
    }

    /// Horner in `y - center`; the caller ensures `y` lies in the patch.
    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        let d = y - self.center;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * d + c)
    }

    /// The term-wise derivative, on the same disc.
    pub fn derivative(&self) -> PowerSeriesPatch {
        let coeffs = if self.coeffs.len() == 1 {
            vec![0.0]
        } else {
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
        };
        // Differentiating the geometric envelope (ρ < 1/2) costs at most a factor (K + 2)/r.
        let remainder = self.remainder * (self.coeffs.len() + 2) as f64 / self.radius;
        PowerSeriesPatch { center: self.center, radius: self.radius, coeffs, remainder }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().skip(1).all(|&c| c == 0.0)
    }
}

impl fmt::Display for PowerSeriesPatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "patch: {} {}", self.center, self.radius)?;
        for c in &self.coeffs {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

impl FromStr for PowerSeriesPatch {
    type Err = Error;

    /// `patch: y0 radius c0 c1 ...`
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix("patch:")
            .ok_or_else(|| Error::Malformed(format!("expected 'patch: y0 radius c0 ...', got '{s}'")))?;
        let v = numbers(body)?;
        if v.len() < 3 {
            return Err(Error::Malformed("patch needs center, radius and at least one coefficient".into()));
        }
        PowerSeriesPatch::new(v[0], v[1], v[2..].to_vec())
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_trim() {
        let p = Polynomial::new(vec![1.0, -2.0, 3.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(Polynomial::new(vec![0.0, 0.0]).unwrap().degree(), 0);
    }

    #[test]
    fn compose_on_coefficients() {
        let p: Polynomial = "poly: 1 1".parse().unwrap();
        let q: Polynomial = "poly: 0 0 1".parse().unwrap();
        assert_eq!(q.compose(&p).coefficients(), &[1.0, 2.0, 1.0]);
        assert_eq!(p.compose(&q).coefficients(), &[1.0, 0.0, 1.0]);
        assert_eq!(Polynomial::shifted_power(2.0, 2).coefficients(), &[4.0, -4.0, 1.0]);
        assert_eq!(q.derivative().coefficients(), &[0.0, 2.0]);
    }

    #[test]
    fn parse_round_trip() {
        let p: Polynomial = "poly: 0.5 -1 2".parse().unwrap();
        assert_eq!(p.to_string().parse::<Polynomial>().unwrap(), p);
        assert!("poly:".parse::<Polynomial>().is_err());
        assert!("1 2".parse::<Polynomial>().is_err());
        let q: PowerSeriesPatch = "patch: 0 4 1 1 0.5".parse().unwrap();
        assert_eq!((q.center, q.radius, q.coefficients().len()), (0.0, 4.0, 3));
        assert!("patch: 0 -1 1".parse::<PowerSeriesPatch>().is_err());
        assert!("patch: 0 1".parse::<PowerSeriesPatch>().is_err());
    }

    #[test]
    fn exp_patch_accuracy() {
        let p = PowerSeriesPatch::exp(0.0, 4.0).unwrap();
        assert!(p.remainder() < 1e-14 * 4f64.exp());
        for y in [-4.0, -1.0, 0.0, 0.5, 1.644_934, 4.0] {
            // Accuracy is relative to the patch scale Σ|c_k| r^k = e^4.
            let err = (p.eval(y) - f64::exp(y)).abs() / 4f64.exp();
            assert!(err < 1e-14, "y={y}: {err}");
        }
        let d = p.derivative();
        assert!((d.eval(1.0) - 1f64.exp()).abs() < 1e-13);
        assert!(PowerSeriesPatch::from_terms(0.0, 2.0, |_| 1.0).is_err());
    }
}
