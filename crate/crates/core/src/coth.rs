//! Closed-form radial functions of `z = coth(alpha r)`.
//!
//! Every wavefunction and seed in this crate has the shape
//!
//! ```text
//! (z-1)^(a/2) (z+1)^(b/2) N(z) / D(z)
//! ```
//!
//! with polynomials `N`, `D`. Forming `z` directly overflows as `r -> 0` and
//! loses all digits of `z-1` as `r -> inf`, so everything here is expressed
//! through `y = exp(-2 alpha r)`:
//!
//! ```text
//! z - 1 = 2y/(1-y),   z + 1 = 2/(1-y),   p(z) = (1-y)^-deg Q(y)
//! ```
//!
//! where `Q` is an ordinary polynomial in `y` of degree at most `deg`. Near
//! the origin `y -> 1` and the alternating coefficients of `Q` cancel, so
//! `Q` is also carried in `s = 1 - y` and evaluated there when `y > 1/2`.

use std::f64::consts::LN_2;

use crate::specfun::JacobiParams;

/// Something that can be evaluated on the half-line.
pub trait RadialFunction {
    fn value(&self, r: f64) -> f64;

    /// First derivative; five-point central difference unless overridden.
    fn derivative(&self, r: f64) -> f64 {
        let h = 1e-4 * r.abs().max(1e-2).min(1.0);
        let f = |t: f64| self.value(t);
        (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h)
    }

    /// `f'/f`.
    fn log_derivative(&self, r: f64) -> f64 {
        self.derivative(r) / self.value(r)
    }
}

/// Adapter turning a closure into a [`RadialFunction`].
pub struct FnRadial<F>(pub F);

impl<F: Fn(f64) -> f64> RadialFunction for FnRadial<F> {
    fn value(&self, r: f64) -> f64 {
        (self.0)(r)
    }
}

impl<T: RadialFunction + ?Sized> RadialFunction for &T {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        (**self).derivative(r)
    }
    fn log_derivative(&self, r: f64) -> f64 {
        (**self).log_derivative(r)
    }
}

/// The quantities derived from `y = exp(-2 alpha r)` at one radius.
#[derive(Debug, Clone, Copy)]
pub struct CothPoint {
    pub r: f64,
    pub y: f64,
    /// `1 - y`, computed without cancellation.
    pub one_minus_y: f64,
    pub ln_one_minus_y: f64,
    pub ln_zm1: f64,
    pub ln_zp1: f64,
}

impl CothPoint {
    pub fn new(r: f64, alpha: f64) -> Self {
        let t = -2.0 * alpha * r;
        let y = t.exp();
        let one_minus_y = -t.exp_m1();
        let ln_one_minus_y = if y < 0.5 {
            (-y).ln_1p()
        } else {
            one_minus_y.ln()
        };
        CothPoint {
            r,
            y,
            one_minus_y,
            ln_one_minus_y,
            ln_zm1: LN_2 + t - ln_one_minus_y,
            ln_zp1: LN_2 - ln_one_minus_y,
        }
    }

    pub fn z(&self) -> f64 {
        (1.0 + self.y) / self.one_minus_y
    }

    pub fn z_minus_1(&self) -> f64 {
        2.0 * self.y / self.one_minus_y
    }

    pub fn z_plus_1(&self) -> f64 {
        2.0 / self.one_minus_y
    }
}

/// A polynomial in `z` of nominal degree `degree`, stored as `(1-y)^-degree Q(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CothPoly {
    pub degree: usize,
    /// Coefficients of `Q`, ascending powers of `y`.
    pub coeffs: Vec<f64>,
    /// Coefficients of the same `Q`, ascending powers of `s = 1 - y`.
    pub s_coeffs: Vec<f64>,
}

impl CothPoly {
    pub fn constant(c: f64) -> Self {
        CothPoly {
            degree: 0,
            coeffs: vec![c],
            s_coeffs: vec![c],
        }
    }

    /// From `y`-coefficients alone; the `s` form is a Taylor shift, so
    /// only suitable for well-conditioned `Q`.
    pub fn from_y(degree: usize, coeffs: Vec<f64>) -> Self {
        let mut s_coeffs = vec![0.0; coeffs.len()];
        // y^j = (1 - s)^j
        for (j, &c) in coeffs.iter().enumerate() {
            let mut binom = 1.0;
            for (k, slot) in s_coeffs.iter_mut().enumerate().take(j + 1) {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                *slot += c * sign * binom;
                binom = binom * (j - k) as f64 / (k + 1) as f64;
            }
        }
        CothPoly {
            degree,
            coeffs,
            s_coeffs,
        }
    }

    /// `P_n^(a,b)(z)`: from the explicit sum,
    /// `Q(y) = sum_j C(a+n, n-j) C(b+n, j) y^j`, and from the expansion
    /// about `z = -1`, `[s^(n-k)] = (-1)^(n+k) C(n,k) (n+a+b+1)_k (b+k+1)_(n-k) / n!`.
    /// Each coefficient is one product, so neither form cancels internally.
    pub fn jacobi(p: &JacobiParams) -> Self {
        let n = p.degree;
        let coeffs = (0..=n).map(|j| p.sum_coefficient(n - j).value()).collect();
        let poch = |x: f64, k: usize| (0..k).fold(1.0, |acc, j| acc * (x + j as f64));
        let n_fact = poch(1.0, n);
        let mut s_coeffs = vec![0.0; n + 1];
        let mut binom = 1.0;
        for k in 0..=n {
            let sign = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
            s_coeffs[n - k] = sign
                * binom
                * poch(n as f64 + p.a + p.b + 1.0, k)
                * poch(p.b + k as f64 + 1.0, n - k)
                / n_fact;
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        CothPoly {
            degree: n,
            coeffs,
            s_coeffs,
        }
    }

    pub fn scale(mut self, c: f64) -> Self {
        self.coeffs.iter_mut().for_each(|x| *x *= c);
        self.s_coeffs.iter_mut().for_each(|x| *x *= c);
        self
    }

    pub fn mul(&self, other: &CothPoly) -> CothPoly {
        CothPoly {
            degree: self.degree + other.degree,
            coeffs: poly_mul(&self.coeffs, &other.coeffs),
            s_coeffs: poly_mul(&self.s_coeffs, &other.s_coeffs),
        }
    }

    /// Sum of two z-polynomials, lifted to the larger nominal degree.
    pub fn add(&self, other: &CothPoly) -> CothPoly {
        let degree = self.degree.max(other.degree);
        let lift = |c: &[f64], d: usize, factor: &[f64]| {
            let mut c = c.to_vec();
            for _ in d..degree {
                c = poly_mul(&c, factor);
            }
            c
        };
        let sum = |a: Vec<f64>, b: Vec<f64>| {
            let mut out = vec![0.0; a.len().max(b.len())];
            for (i, v) in a.iter().enumerate() {
                out[i] += v;
            }
            for (i, v) in b.iter().enumerate() {
                out[i] += v;
            }
            out
        };
        let y_factor = [1.0, -1.0];
        let s_factor = [0.0, 1.0];
        CothPoly {
            degree,
            coeffs: sum(
                lift(&self.coeffs, self.degree, &y_factor),
                lift(&other.coeffs, other.degree, &y_factor),
            ),
            s_coeffs: sum(
                lift(&self.s_coeffs, self.degree, &s_factor),
                lift(&other.s_coeffs, other.degree, &s_factor),
            ),
        }
    }

    /// `Q(y), Q'(y), Q''(y)`.
    pub fn eval_q(&self, y: f64) -> (f64, f64, f64) {
        self.eval_split(y, 1.0 - y)
    }

    /// As [`Self::eval_q`], given an accurate `1 - y` as well. Uses whichever
    /// basis has the smaller `sum |c_k| x^k`.
    pub fn eval_split(&self, y: f64, one_minus_y: f64) -> (f64, f64, f64) {
        let (vy, cy) = horner3(&self.coeffs, y);
        let (vs, cs) = horner3(&self.s_coeffs, one_minus_y);
        if cs < cy {
            (vs.0, -vs.1, vs.2)
        } else {
            vy
        }
    }

    pub fn eval_at(&self, pt: &CothPoint) -> (f64, f64, f64) {
        self.eval_split(pt.y, pt.one_minus_y)
    }

    /// Value at an arbitrary `z` (requires `z != -1`).
    pub fn value_z(&self, z: f64) -> f64 {
        let y = (z - 1.0) / (z + 1.0);
        self.eval_q(y).0 * ((z + 1.0) / 2.0).powi(self.degree as i32)
    }

    pub fn value_at(&self, pt: &CothPoint) -> f64 {
        self.eval_at(pt).0 * (-(self.degree as f64) * pt.ln_one_minus_y).exp()
    }
}

/// Value and first two derivatives, plus the condition sum `sum |c_k| x^k`.
fn horner3(coeffs: &[f64], x: f64) -> ((f64, f64, f64), f64) {
    let (mut q0, mut q1, mut q2, mut cond) = (0.0, 0.0, 0.0, 0.0);
    for &c in coeffs.iter().rev() {
        q2 = q2 * x + 2.0 * q1;
        q1 = q1 * x + q0;
        q0 = q0 * x + c;
        cond = cond * x.abs() + c.abs();
    }
    ((q0, q1, q2), cond)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `scale * (z-1)^(a/2) (z+1)^(b/2) N(z)/D(z)` with `z = coth(alpha r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CothProfile {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub numer: CothPoly,
    pub denom: CothPoly,
    pub scale: f64,
}

impl CothProfile {
    pub fn new(alpha: f64, a: f64, b: f64, numer: CothPoly, denom: CothPoly) -> Self {
        CothProfile {
            alpha,
            a,
            b,
            numer,
            denom,
            scale: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    fn excess_degree(&self) -> f64 {
        self.numer.degree as f64 - self.denom.degree as f64
    }

    /// Grouped as `(a/2) ln y + ((a+b)/2) ln(z+1)`, so large `a ~ -b` do not cancel.
    fn ln_prefactor(&self, pt: &CothPoint) -> f64 {
        -self.a * self.alpha * pt.r + 0.5 * (self.a + self.b) * pt.ln_zp1
            - self.excess_degree() * pt.ln_one_minus_y
    }

    /// d/dr of the log of the prefactor, including the `(1-y)^-deg` parts.
    fn ln_prefactor_deriv(&self, pt: &CothPoint) -> f64 {
        let s = self.a + self.b + 2.0 * self.excess_degree();
        -self.alpha * self.a - self.alpha * s * pt.y / pt.one_minus_y
    }

}

impl RadialFunction for CothProfile {
    fn value(&self, r: f64) -> f64 {
        let pt = CothPoint::new(r, self.alpha);
        let (n0, _, _) = self.numer.eval_at(&pt);
        let (d0, _, _) = self.denom.eval_at(&pt);
        self.scale * self.ln_prefactor(&pt).exp() * n0 / d0
    }

    fn derivative(&self, r: f64) -> f64 {
        let pt = CothPoint::new(r, self.alpha);
        let (n0, n1, _) = self.numer.eval_at(&pt);
        let (d0, d1, _) = self.denom.eval_at(&pt);
        let ratio = n0 / d0;
        let ratio_deriv = -2.0 * self.alpha * pt.y * (n1 * d0 - n0 * d1) / (d0 * d0);
        self.scale
            * self.ln_prefactor(&pt).exp()
            * (self.ln_prefactor_deriv(&pt) * ratio + ratio_deriv)
    }

    /// Analytic, and finite even where the value underflows.
    fn log_derivative(&self, r: f64) -> f64 {
        let pt = CothPoint::new(r, self.alpha);
        let (n0, n1, _) = self.numer.eval_at(&pt);
        let (d0, d1, _) = self.denom.eval_at(&pt);
        self.ln_prefactor_deriv(&pt) - 2.0 * self.alpha * pt.y * (n1 / n0 - d1 / d0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::jacobi_eval;

    #[test]
    fn coth_point_matches_direct_forms() {
        for r in [0.05, 0.7, 3.0] {
            let pt = CothPoint::new(r, 0.8);
            let z = 1.0 / (0.8 * r as f64).tanh();
            assert!((pt.z() - z).abs() < 1e-12 * z);
            assert!((pt.ln_zm1.exp() - (z - 1.0)).abs() < 1e-12 * z);
            assert!((pt.ln_zp1.exp() - (z + 1.0)).abs() < 1e-12 * z);
        }
        // tiny r stays finite, large r keeps z-1 accurate
        let near = CothPoint::new(1e-12, 1.0);
        assert!(near.ln_zm1.is_finite() && near.z().is_finite());
        let far = CothPoint::new(40.0, 1.0);
        assert!((far.z_minus_1() / (2.0 * (-80f64).exp()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_coth_poly_matches_explicit_sum() {
        let p = JacobiParams::new(4, 2.7, -11.3).unwrap();
        let poly = CothPoly::jacobi(&p);
        for z in [1.05, 1.6, 3.0, 9.0] {
            let want = jacobi_eval(&p, z);
            assert!((poly.value_z(z) - want).abs() < 1e-11 * want.abs().max(1.0));
        }
    }

    #[test]
    fn add_lifts_degree() {
        // (z) + (1) with z = (1 + y)/(1 - y)
        let z = CothPoly::from_y(1, vec![1.0, 1.0]);
        let s = z.add(&CothPoly::constant(1.0));
        for zz in [1.5, 2.0, 7.0] {
            assert!((s.value_z(zz) - (zz + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn profile_derivative_matches_finite_difference() {
        let p = JacobiParams::new(2, 3.1, -9.0).unwrap();
        let prof = CothProfile::new(0.6, 3.1, -9.0, CothPoly::jacobi(&p), CothPoly::constant(1.0));
        let fd = FnRadial(|r| prof.value(r));
        for r in [0.3, 1.1, 2.5] {
            let a = prof.derivative(r);
            let b = fd.derivative(r);
            assert!((a - b).abs() < 1e-7 * a.abs().max(1e-3), "r={r}: {a} vs {b}");
        }
    }
}
