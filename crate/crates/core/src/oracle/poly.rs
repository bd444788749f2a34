use rug::Float;

use super::moments::MomentTable;
use crate::error::{Error, Result};

/// Variable in which an [`ExactPoly`] is monic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// p_j(x) = Σ cᵢ xⁱ
    MonomialX,
    /// q_j(eˣ) = Σ d_k e^{kx}
    Exponential,
}

/// Monic p_j^{(n)} or q_j^{(n)} with extended-precision coefficients,
/// ascending, leading coefficient 1.
#[derive(Debug, Clone)]
pub struct ExactPoly {
    pub basis: Basis,
    pub degree: usize,
    pub n: u32,
    pub coeffs: Vec<Float>,
    /// largest orthogonality residual relative to the size of its terms
    pub residual: f64,
    pub h: Option<Float>,
}

impl ExactPoly {
    fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    /// Value at x (for the exponential basis, q_j(eˣ)).
    pub fn eval_float(&self, x: &Float) -> Float {
        let prec = self.prec();
        let var = match self.basis {
            Basis::MonomialX => Float::with_val(prec, x),
            Basis::Exponential => Float::with_val(prec, x.exp_ref()),
        };
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= &var;
            acc += c;
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_float(&Float::with_val(self.prec(), x)).to_f64()
    }

    /// (sign, log|value|) at x; safe when the value overflows f64.
    pub fn eval_log(&self, x: f64) -> (f64, f64) {
        let v = self.eval_float(&Float::with_val(self.prec(), x));
        if v.is_zero() {
            return (0.0, f64::NEG_INFINITY);
        }
        let sign = if v.is_sign_negative() { -1.0 } else { 1.0 };
        (sign, v.abs().ln().to_f64())
    }
}

fn check_cover(m: &MomentTable, rows: usize, cols: usize) -> Result<()> {
    if rows > m.jmax || cols > m.kmax {
        return Err(Error::InvalidArgument(format!(
            "moment table {}x{} does not cover indices ({rows}, {cols})",
            m.jmax, m.kmax
        )));
    }
    Ok(())
}

/// Solves A·x = b by Gaussian elimination with row equilibration and partial
/// pivoting.
fn solve(mut a: Vec<Vec<Float>>, mut b: Vec<Float>, prec: u32) -> Result<Vec<Float>> {
    let n = b.len();
    for (row, rhs) in a.iter_mut().zip(b.iter_mut()) {
        let s = row
            .iter()
            .map(|v| Float::with_val(prec, v.abs_ref()))
            .fold(Float::new(prec), |m, v| if v > m { v } else { m });
        if s.is_zero() {
            return Err(Error::Degeneracy("zero row in moment system".into()));
        }
        for v in row.iter_mut() {
            *v /= &s;
        }
        *rhs /= &s;
    }
    let mut floor = Float::with_val(prec, 1);
    floor >>= prec - 8;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].cmp_abs(&a[j][col]).expect("finite entries"))
            .expect("nonempty");
        if Float::with_val(prec, a[piv][col].abs_ref()) <= floor {
            return Err(Error::Degeneracy(format!("pivot vanishes in column {col}")));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = Float::with_val(prec, &a[r][col] / &a[col][col]);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = Float::with_val(prec, &f * &a[col][c]);
                a[r][c] -= t;
            }
            let t = Float::with_val(prec, &f * &b[col]);
            b[r] -= t;
        }
    }
    let mut x = vec![Float::new(prec); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= Float::with_val(prec, &a[r][c] * &x[c]);
        }
        x[r] = acc / &a[r][r];
    }
    Ok(x)
}

/// Determinant by elimination with partial pivoting.
fn det(mut a: Vec<Vec<Float>>, prec: u32) -> Float {
    let n = a.len();
    let mut d = Float::with_val(prec, 1);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].cmp_abs(&a[j][col]).expect("finite entries"))
            .expect("nonempty");
        if a[piv][col].is_zero() {
            return Float::new(prec);
        }
        if piv != col {
            a.swap(col, piv);
            d = -d;
        }
        d *= &a[col][col];
        for r in col + 1..n {
            let f = Float::with_val(prec, &a[r][col] / &a[col][col]);
            for c in col..n {
                let t = Float::with_val(prec, &f * &a[col][c]);
                a[r][c] -= t;
            }
        }
    }
    d
}

/// max over conditions of |Σ terms| / Σ|terms|
fn relative_residual(rows: impl Iterator<Item = Vec<Float>>, prec: u32) -> f64 {
    let mut worst: f64 = 0.0;
    for terms in rows {
        let mut sum = Float::new(prec);
        let mut mag = Float::new(prec);
        for t in &terms {
            sum += t;
            mag += Float::with_val(prec, t.abs_ref());
        }
        if !mag.is_zero() {
            worst = worst.max((sum.abs() / mag).to_f64());
        }
    }
    worst
}

/// Monic p_j with ∫ p_j(x) e^{kx} e^{−nV(x)} dx = 0 for k = 0..j−1.
pub fn exact_p(m: &MomentTable, j: usize) -> Result<ExactPoly> {
    check_cover(m, j, j.saturating_sub(1))?;
    let prec = m.bits();
    let a: Vec<Vec<Float>> = (0..j)
        .map(|k| (0..j).map(|i| m.get(i, k).clone()).collect())
        .collect();
    let b: Vec<Float> = (0..j)
        .map(|k| Float::with_val(prec, -m.get(j, k)))
        .collect();
    let mut coeffs = solve(a, b, prec)?;
    coeffs.push(Float::with_val(prec, 1));
    let residual = relative_residual(
        (0..j).map(|k| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| Float::with_val(prec, c * m.get(i, k)))
                .collect()
        }),
        prec,
    );
    Ok(ExactPoly {
        basis: Basis::MonomialX,
        degree: j,
        n: m.n,
        coeffs,
        residual,
        h: None,
    })
}

fn q_residual(m: &MomentTable, coeffs: &[Float], j: usize, prec: u32) -> f64 {
    relative_residual(
        (0..j).map(|i| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, d)| Float::with_val(prec, d * m.get(i, k)))
                .collect()
        }),
        prec,
    )
}

/// Monic q_j with ∫ xⁱ q_j(eˣ) e^{−nV(x)} dx = 0 for i = 0..j−1, from the
/// linear system Σ_k d_k m[i][k] = −m[i][j].
pub fn exact_q(m: &MomentTable, j: usize) -> Result<ExactPoly> {
    check_cover(m, j.saturating_sub(1), j)?;
    let prec = m.bits();
    let a: Vec<Vec<Float>> = (0..j)
        .map(|i| (0..j).map(|k| m.get(i, k).clone()).collect())
        .collect();
    let b: Vec<Float> = (0..j)
        .map(|i| Float::with_val(prec, -m.get(i, j)))
        .collect();
    let mut coeffs = solve(a, b, prec)?;
    coeffs.push(Float::with_val(prec, 1));
    let residual = q_residual(m, &coeffs, j, prec);
    Ok(ExactPoly {
        basis: Basis::Exponential,
        degree: j,
        n: m.n,
        coeffs,
        residual,
        h: None,
    })
}

/// q_j from the determinant formula: rows m[i][0..=j] for i < j above the
/// row (1, eᶻ, …, e^{jz}), divided by the leading minor.
pub fn exact_q_det(m: &MomentTable, j: usize) -> Result<ExactPoly> {
    check_cover(m, j.saturating_sub(1), j)?;
    let prec = m.bits();
    let minor = |skip: usize| -> Float {
        let rows = (0..j)
            .map(|i| {
                (0..=j)
                    .filter(|&k| k != skip)
                    .map(|k| m.get(i, k).clone())
                    .collect()
            })
            .collect();
        det(rows, prec)
    };
    let lead = minor(j);
    if lead.is_zero() {
        return Err(Error::Degeneracy(format!(
            "leading {j}x{j} moment minor vanishes"
        )));
    }
    let coeffs: Vec<Float> = (0..=j)
        .map(|k| {
            let mut c = minor(k) / &lead;
            if (j + k) % 2 == 1 {
                c = -c;
            }
            c
        })
        .collect();
    let residual = q_residual(m, &coeffs, j, prec);
    Ok(ExactPoly {
        basis: Basis::Exponential,
        degree: j,
        n: m.n,
        coeffs,
        residual,
        h: None,
    })
}

/// ∫ p(x) q(eˣ) e^{−nV(x)} dx as the bilinear form Σ cᵢ d_k m[i][k].
pub fn pairing(m: &MomentTable, p: &ExactPoly, q: &ExactPoly) -> Result<Float> {
    if p.basis != Basis::MonomialX || q.basis != Basis::Exponential {
        return Err(Error::InvalidArgument(
            "pairing needs a p-type and a q-type".into(),
        ));
    }
    check_cover(m, p.degree, q.degree)?;
    let prec = m.bits();
    let mut acc = Float::new(prec);
    for (i, c) in p.coeffs.iter().enumerate() {
        for (k, d) in q.coeffs.iter().enumerate() {
            acc += Float::with_val(prec, c * d) * m.get(i, k);
        }
    }
    Ok(acc)
}

/// h_j = ∫ p_j(x) q_j(eˣ) e^{−nV(x)} dx.
pub fn exact_h(m: &MomentTable, p: &ExactPoly, q: &ExactPoly) -> Result<Float> {
    if p.degree != q.degree || p.n != q.n || p.n != m.n {
        return Err(Error::InvalidArgument(
            "h needs p and q of the same degree and n".into(),
        ));
    }
    let h = pairing(m, p, q)?;
    if h.is_zero() {
        return Err(Error::Degeneracy(format!("h_{} vanishes", p.degree)));
    }
    Ok(h)
}

/// Real zeros in [lo, hi]: sign changes on 50·degree cells refined by
/// bisection to 1e−12. For q-type polynomials the zeros are in x of q(eˣ).
pub fn real_zeros(p: &ExactPoly, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "empty interval [{lo}, {hi}]"
        )));
    }
    let cells = 50 * p.degree.max(1);
    let sign = |x: f64| p.eval_log(x).0;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut s0 = sign(x0);
    if s0 == 0.0 {
        out.push(x0);
    }
    for i in 1..=cells {
        let x1 = lo + (hi - lo) * i as f64 / cells as f64;
        let s1 = sign(x1);
        if s1 == 0.0 {
            out.push(x1);
        } else if s0 * s1 < 0.0 {
            out.push(bisect(&sign, x0, x1, s0));
        }
        x0 = x1;
        s0 = s1;
    }
    Ok(out)
}

fn bisect(sign: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, s_lo: f64) -> f64 {
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let s = sign(mid);
        if s == 0.0 {
            return mid;
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
