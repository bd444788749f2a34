use super::field::FieldSpec;
use crate::error::{Error, Result};

/// k^V(t, s) = ½log|t−s|⁻¹ + ½log|eᵗ−eˢ|⁻¹ + ½V(t) + ½V(s)
pub fn kernel(field: &FieldSpec, t: f64, s: f64) -> f64 {
    let d = (t - s).abs();
    let log_exp = t.max(s) + (-(-d).exp_m1()).ln();
    -0.5 * d.ln() - 0.5 * log_exp + 0.5 * field.v(t) + 0.5 * field.v(s)
}

/// Energy of a discrete measure: Σ_{i≠j} mᵢmⱼ k^V(xᵢ, xⱼ). The diagonal is
/// dropped, so no self-energy term enters.
pub fn energy(field: &FieldSpec, atoms: &[(f64, f64)]) -> Result<f64> {
    if atoms.len() < 2 {
        return Err(Error::InvalidArgument(
            "energy needs at least two atoms".into(),
        ));
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if atoms.iter().any(|a| !(a.1 > 0.0) || !a.0.is_finite()) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "atom masses must be positive and sum to 1".into(),
        ));
    }
    let mut xs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("coincident atoms".into()));
    }
    let mut e = 0.0;
    for (i, &(xi, mi)) in atoms.iter().enumerate() {
        for &(xj, mj) in &atoms[i + 1..] {
            e += 2.0 * mi * mj * kernel(field, xi, xj);
        }
    }
    Ok(e)
}
