//! Jacobi polynomials with arbitrary real parameters, generalized binomial
//! coefficients and log-gamma.
//!
//! The primary evaluator is the explicit finite sum
//!
//! ```text
//! P_n^(a,b)(z) = 2^-n sum_{m=0}^{n} C(a+n, m) C(b+n, n-m) (z-1)^(n-m) (z+1)^m
//! ```
//!
//! which stays valid for the negative, non-integer parameters that appear in
//! the Eckart bound states. The three-term recurrence is kept only as an
//! independent cross-check.

use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Generalized binomial coefficient `a (a-1) ... (a-k+1) / k!` for real `a`.
pub fn gen_binomial(a: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc *= (a - j as f64) / (j + 1) as f64;
    }
    acc
}

/// A real number stored as `sign * exp(ln_abs)`.
///
/// `sign` is one of -1, 0, +1; a zero value has `ln_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog {
        ln_abs: 0.0,
        sign: 1.0,
    };
    pub const ZERO: SignedLog = SignedLog {
        ln_abs: f64::NEG_INFINITY,
        sign: 0.0,
    };

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                ln_abs: v.abs().ln(),
                sign: v.signum(),
            }
        }
    }

    /// `base^k` for a non-negative integer power; `0^0` is 1.
    pub fn pow(base: f64, k: usize) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        let s = Self::from_value(base);
        SignedLog {
            ln_abs: s.ln_abs * k as f64,
            sign: if k % 2 == 0 { s.sign.abs() } else { s.sign },
        }
    }

    pub fn mul(self, other: SignedLog) -> Self {
        if self.sign == 0.0 || other.sign == 0.0 {
            return Self::ZERO;
        }
        SignedLog {
            ln_abs: self.ln_abs + other.ln_abs,
            sign: self.sign * other.sign,
        }
    }

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

/// Sum of signed-log terms, factoring out the largest magnitude.
pub fn signed_log_sum<I: IntoIterator<Item = SignedLog>>(terms: I) -> SignedLog {
    let terms: Vec<SignedLog> = terms.into_iter().filter(|t| t.sign != 0.0).collect();
    let Some(max) = terms
        .iter()
        .map(|t| t.ln_abs)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
    else {
        return SignedLog::ZERO;
    };
    let scaled: f64 = terms.iter().map(|t| t.sign * (t.ln_abs - max).exp()).sum();
    let mut out = SignedLog::from_value(scaled);
    if out.sign != 0.0 {
        out.ln_abs += max;
    }
    out
}

/// Generalized binomial coefficient in signed-log form, for large `|a|`.
pub fn ln_gen_binomial(a: f64, k: usize) -> SignedLog {
    let mut out = SignedLog::ONE;
    for j in 0..k {
        let factor = SignedLog::from_value(a - j as f64);
        if factor.sign == 0.0 {
            return SignedLog::ZERO;
        }
        out = out.mul(factor);
        out.ln_abs -= ((j + 1) as f64).ln();
    }
    out
}

/// Degree and parameters of a Jacobi polynomial `P_n^(a,b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub degree: usize,
    pub a: f64,
    pub b: f64,
}

impl JacobiParams {
    pub fn new(degree: usize, a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "Jacobi parameters must be finite, got a={a}, b={b}"
            )));
        }
        Ok(Self { degree, a, b })
    }

    /// Coefficient of `(z-1)^(n-m) (z+1)^m` in the explicit sum, without the `2^-n`.
    pub fn sum_coefficient(&self, m: usize) -> SignedLog {
        let n = self.degree;
        ln_gen_binomial(self.a + n as f64, m).mul(ln_gen_binomial(self.b + n as f64, n - m))
    }

    fn shifted(&self) -> Option<JacobiParams> {
        (self.degree > 0).then(|| JacobiParams {
            degree: self.degree - 1,
            a: self.a + 1.0,
            b: self.b + 1.0,
        })
    }
}

/// `P_n^(a,b)(z)` by the explicit sum.
pub fn jacobi_eval(p: &JacobiParams, z: f64) -> f64 {
    jacobi_eval_split(p, z - 1.0, z + 1.0)
}

/// `P_n^(a,b)` evaluated from precomputed `z-1` and `z+1`.
///
/// Useful when `z = coth(alpha r)` and both factors are known in closed
/// form without the cancellation of forming `z` first.
pub fn jacobi_eval_split(p: &JacobiParams, zm1: f64, zp1: f64) -> f64 {
    let n = p.degree;
    let terms = (0..=n).map(|m| {
        p.sum_coefficient(m)
            .mul(SignedLog::pow(zm1, n - m))
            .mul(SignedLog::pow(zp1, m))
    });
    let mut s = signed_log_sum(terms);
    if s.sign != 0.0 {
        s.ln_abs -= n as f64 * std::f64::consts::LN_2;
    }
    s.value()
}

/// `d/dz` or `d^2/dz^2` of `P_n^(a,b)` at `z`.
///
/// Uses `P_n' = (n+a+b+1)/2 * P_{n-1}^(a+1,b+1)`. When the prefactor
/// vanishes to within 1e-12 the explicit sum is differentiated term by term.
pub fn jacobi_deriv(p: &JacobiParams, z: f64, order: u8) -> Result<f64> {
    match order {
        0 => Ok(jacobi_eval(p, z)),
        1 | 2 => Ok(deriv_by_identity(p, z, order).unwrap_or_else(|| explicit_sum_deriv(p, z, order))),
        _ => Err(Error::Domain(format!(
            "derivative order must be 0, 1 or 2, got {order}"
        ))),
    }
}

fn deriv_by_identity(p: &JacobiParams, z: f64, order: u8) -> Option<f64> {
    let mut current = *p;
    let mut factor = 1.0;
    for _ in 0..order {
        let Some(next) = current.shifted() else {
            return Some(0.0);
        };
        let f = current.degree as f64 + current.a + current.b + 1.0;
        if f.abs() < 1e-12 {
            return None;
        }
        factor *= 0.5 * f;
        current = next;
    }
    Some(factor * jacobi_eval(&current, z))
}

/// Term-by-term derivative of the explicit sum.
fn explicit_sum_deriv(p: &JacobiParams, z: f64, order: u8) -> f64 {
    let n = p.degree;
    let (u, v) = (z - 1.0, z + 1.0);
    let pw = |x: f64, k: i64| if k < 0 { 0.0 } else { x.powi(k as i32) };
    let mut acc = 0.0;
    for m in 0..=n {
        let c = p.sum_coefficient(m).value();
        let j = (n - m) as i64;
        let k = m as i64;
        let (jf, kf) = (j as f64, k as f64);
        let term = match order {
            1 => jf * pw(u, j - 1) * pw(v, k) + kf * pw(u, j) * pw(v, k - 1),
            _ => {
                jf * (jf - 1.0) * pw(u, j - 2) * pw(v, k)
                    + 2.0 * jf * kf * pw(u, j - 1) * pw(v, k - 1)
                    + kf * (kf - 1.0) * pw(u, j) * pw(v, k - 2)
            }
        };
        acc += c * term;
    }
    acc / 2f64.powi(n as i32)
}

/// `n / d` to double-double accuracy: one correction step on the leading
/// quotient, since `TwoFloat` division is only accurate to f64.
fn div(n: TwoFloat, d: TwoFloat) -> TwoFloat {
    let q1 = n.hi() / d.hi();
    let r = n - d * q1;
    TwoFloat::from(q1) + r.hi() / d.hi()
}

/// `P_n^(a,b)(z)` by the three-term recurrence, carried in double-double.
///
/// Forward recursion loses digits for negative parameters; the extra
/// precision keeps the result accurate to about 1e-16 relative to the sum's
/// term scale. Returns `None` when a recurrence denominator vanishes
/// (|2k+a+b| or |k+a+b+1| below 1e-8).
pub fn jacobi_eval_recurrence(p: &JacobiParams, z: f64) -> Option<f64> {
    let (a, b) = (TwoFloat::from(p.a), TwoFloat::from(p.b));
    let z = TwoFloat::from(z);
    let one = TwoFloat::from(1.0);
    let two = TwoFloat::from(2.0);
    let mut prev = one;
    if p.degree == 0 {
        return Some(1.0);
    }
    let mut cur = (a + 1.0) + (a + b + 2.0) * (z - 1.0) / two;
    for k in 1..p.degree {
        let k = TwoFloat::from(k as f64);
        let s = two * k + a + b;
        let t = k + a + b + 1.0;
        if f64::from(s).abs() < 1e-8 || f64::from(t).abs() < 1e-8 {
            return None;
        }
        let lhs = two * (k + 1.0) * t * s;
        let c1 = (s + 1.0) * ((s + 2.0) * s * z + a * a - b * b);
        let c2 = two * (k + a) * (k + b) * (s + 2.0);
        let next = div(c1 * cur - c2 * prev, lhs);
        prev = cur;
        cur = next;
    }
    Some(f64::from(cur))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn log_gamma_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-14);
        // 4! = 24
        assert!(rel(log_gamma(5.0).unwrap(), 24f64.ln()) < 1e-12);
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(gen_binomial(3.7, 0), 1.0);
        assert!((gen_binomial(5.0, 2) - 10.0).abs() < 1e-14);
        // (-2.5)(-3.5)/2
        assert!((gen_binomial(-2.5, 2) - 4.375).abs() < 1e-14);
        let l = ln_gen_binomial(-2.5, 3);
        assert!(rel(l.value(), gen_binomial(-2.5, 3)) < 1e-13);
        assert_eq!(ln_gen_binomial(2.0, 3).value(), 0.0);
    }

    #[test]
    fn jacobi_low_degree() {
        let p0 = JacobiParams::new(0, -3.2, 7.1).unwrap();
        assert_eq!(jacobi_eval(&p0, 4.2), 1.0);
        let (a, b, z) = (2.3, -6.4, 1.7);
        let p1 = JacobiParams::new(1, a, b).unwrap();
        let hand = (a + 1.0) + (a + b + 2.0) * (z - 1.0) / 2.0;
        assert!(rel(jacobi_eval(&p1, z), hand) < 1e-13);
        // Legendre P2(3) = (3*9 - 1)/2
        let p2 = JacobiParams::new(2, 0.0, 0.0).unwrap();
        assert!(rel(jacobi_eval(&p2, 3.0), 13.0) < 1e-13);
    }

    #[test]
    fn jacobi_derivatives() {
        let p0 = JacobiParams::new(0, 1.0, 2.0).unwrap();
        assert_eq!(jacobi_deriv(&p0, 3.0, 1).unwrap(), 0.0);
        let (a, b) = (1.5, -4.0);
        let p1 = JacobiParams::new(1, a, b).unwrap();
        assert!(rel(jacobi_deriv(&p1, 2.0, 1).unwrap(), (a + b + 2.0) / 2.0) < 1e-13);
        let p2 = JacobiParams::new(2, 0.0, 0.0).unwrap();
        assert!(rel(jacobi_deriv(&p2, 3.0, 2).unwrap(), 3.0) < 1e-13);
        assert!(jacobi_deriv(&p2, 3.0, 3).is_err());
    }

    #[test]
    fn degenerate_identity_falls_back_to_sum() {
        // n + a + b + 1 = 0: the polynomial drops a degree
        let p = JacobiParams::new(3, 1.25, -5.25).unwrap();
        let z = 1.9;
        let fd = |order: u8| explicit_sum_deriv(&p, z, order);
        assert!((jacobi_deriv(&p, z, 1).unwrap() - fd(1)).abs() < 1e-12);
        assert!((jacobi_deriv(&p, z, 2).unwrap() - fd(2)).abs() < 1e-12);
    }

    #[test]
    fn recurrence_matches_sum_on_fixed_cases() {
        let p = JacobiParams::new(5, 3.4, -12.2).unwrap();
        for z in [1.01, 1.5, 2.0, 4.5] {
            let r = jacobi_eval_recurrence(&p, z).unwrap();
            assert!(rel(jacobi_eval(&p, z), r) < 1e-10, "z={z}");
        }
    }

    #[test]
    fn signed_log_sum_handles_cancellation_sign() {
        let s = signed_log_sum([
            SignedLog::from_value(3.0),
            SignedLog::from_value(-5.0),
        ]);
        assert!((s.value() + 2.0).abs() < 1e-15);
        assert_eq!(signed_log_sum(std::iter::empty()).value(), 0.0);
    }
}
