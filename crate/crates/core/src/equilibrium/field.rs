use num_complex::Complex64;

use crate::error::{Error, Result};

/// External field V.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    /// V(x) = x²/(2t)
    Quadratic { t: f64 },
    /// V(x) = x⁴/4 + u·x²/2 + x/2
    Quartic { u: f64 },
    /// V(x) = Σ coeffs[k]·x^k
    Polynomial { coeffs: Vec<f64> },
}

impl FieldSpec {
    pub fn quadratic(t: f64) -> Result<Self> {
        let f = FieldSpec::Quadratic { t };
        f.validate()?;
        Ok(f)
    }

    pub fn quartic(u: f64) -> Result<Self> {
        let f = FieldSpec::Quartic { u };
        f.validate()?;
        Ok(f)
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        let f = FieldSpec::Polynomial { coeffs };
        f.validate()?;
        Ok(f)
    }

    /// Checks the growth condition V(x)/|x| → ∞.
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Quadratic { t } => {
                if !(*t > 0.0) || !t.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "quadratic field needs t > 0, got {t}"
                    )));
                }
            }
            FieldSpec::Quartic { u } => {
                if !u.is_finite() {
                    return Err(Error::InvalidArgument(format!("quartic u={u} not finite")));
                }
            }
            FieldSpec::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite coefficient".into()));
                }
                let deg = coeffs.iter().rposition(|c| *c != 0.0);
                match deg {
                    Some(d) if d >= 2 && d % 2 == 0 && coeffs[d] > 0.0 => {}
                    _ => {
                        return Err(Error::InvalidArgument(
                            "polynomial field needs even degree >= 2 with positive leading \
                             coefficient (V(x)/|x| must grow without bound)"
                                .into(),
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    /// Ascending monomial coefficients of V.
    pub fn coeffs(&self) -> Vec<f64> {
        match self {
            FieldSpec::Quadratic { t } => vec![0.0, 0.0, 0.5 / t],
            FieldSpec::Quartic { u } => vec![0.0, 0.5, 0.5 * u, 0.0, 0.25],
            FieldSpec::Polynomial { coeffs } => {
                let d = coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0);
                coeffs[..=d].to_vec()
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs().len() - 1
    }

    fn derivative_coeffs(&self, order: usize) -> Vec<f64> {
        let mut c = self.coeffs();
        for _ in 0..order {
            if c.len() <= 1 {
                return vec![0.0];
            }
            c = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, v)| k as f64 * v)
                .collect();
        }
        c
    }

    pub fn v(&self, x: f64) -> f64 {
        horner(&self.coeffs(), x)
    }

    pub fn v1(&self, x: f64) -> f64 {
        horner(&self.derivative_coeffs(1), x)
    }

    pub fn v2(&self, x: f64) -> f64 {
        horner(&self.derivative_coeffs(2), x)
    }

    pub fn v_complex(&self, z: Complex64) -> Complex64 {
        horner_c(&self.coeffs(), z)
    }

    pub fn v1_complex(&self, z: Complex64) -> Complex64 {
        horner_c(&self.derivative_coeffs(1), z)
    }

    /// Whether V'' is bounded below by a positive constant.
    pub fn is_strongly_convex(&self) -> bool {
        match self {
            FieldSpec::Quadratic { .. } => true,
            FieldSpec::Quartic { u } => *u > 0.0,
            FieldSpec::Polynomial { coeffs } => coeffs.len() == 3 && coeffs[2] > 0.0,
        }
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

fn horner_c(c: &[f64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc * z + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluators() {
        let q = FieldSpec::quadratic(2.0).unwrap();
        assert_eq!(q.v(2.0), 1.0);
        assert_eq!(q.v1(2.0), 1.0);
        assert_eq!(q.v2(7.0), 0.5);
        let f = FieldSpec::quartic(-1.0).unwrap();
        let x = 1.3;
        assert!((f.v(x) - (x.powi(4) / 4.0 - x * x / 2.0 + x / 2.0)).abs() < 1e-15);
        assert!((f.v1(x) - (x.powi(3) - x + 0.5)).abs() < 1e-14);
        assert!((f.v2(x) - (3.0 * x * x - 1.0)).abs() < 1e-14);
        let z = Complex64::new(0.3, -0.7);
        assert!((f.v1_complex(z) - (z * z * z - z + 0.5)).norm() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(FieldSpec::quadratic(-1.0).is_err());
        assert!(FieldSpec::quadratic(0.0).is_err());
        assert!(FieldSpec::polynomial(vec![0.0, 1.0, 0.0, 1.0]).is_err());
        assert!(FieldSpec::polynomial(vec![0.0, 0.0, -1.0]).is_err());
        assert!(FieldSpec::polynomial(vec![1.0, 0.0, 1.0, 0.0]).is_ok());
        assert_eq!(
            FieldSpec::polynomial(vec![1.0, 0.0, 1.0, 0.0])
                .unwrap()
                .degree(),
            2
        );
    }
}
