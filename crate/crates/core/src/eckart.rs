//! The Eckart potential `U_{A,B}(r; alpha) = A(A-alpha) csch^2(alpha r) - 2B coth(alpha r)`
//! and its exact bound states.

use serde::Serialize;

use crate::coth::{CothPoint, CothPoly, CothProfile, RadialFunction};
use crate::error::{Error, Result};
use crate::specfun::{ln_gen_binomial, log_gamma, signed_log_sum, JacobiParams, SignedLog};

/// States within this distance of the count boundary `(sqrt(B)-A)/alpha` are excluded.
pub const BOUNDARY_SLACK: f64 = 1e-12;

/// Number of integers `n >= 0` with `n < x`, excluding a marginal state
/// within [`BOUNDARY_SLACK`] of `x`.
pub(crate) fn count_below(x: f64) -> usize {
    let x = x - BOUNDARY_SLACK;
    if x <= 0.0 {
        0
    } else {
        x.ceil() as usize
    }
}

/// Validated `(A, B, alpha)` with `A >= alpha` and `B > A^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EckartParams {
    a: f64,
    b: f64,
    alpha: f64,
}

impl EckartParams {
    pub fn new(a: f64, b: f64, alpha: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && alpha.is_finite()) {
            return Err(Error::violation(
                "finite A, B, alpha",
                format!("A={a}, B={b}, alpha={alpha}"),
            ));
        }
        if !(alpha > 0.0) {
            return Err(Error::violation("alpha > 0", format!("alpha={alpha}")));
        }
        if a < alpha {
            return Err(Error::violation("A >= alpha", format!("A={a}, alpha={alpha}")));
        }
        if !(b > a * a) {
            return Err(Error::violation("B > A^2", format!("A={a}, B={b}")));
        }
        let p = EckartParams { a, b, alpha };
        if p.num_bound_states() == 0 {
            return Err(Error::violation(
                "(sqrt(B)-A)/alpha > 0",
                format!("(sqrt(B)-A)/alpha = {:e} is within the boundary slack", p.count_bound()),
            ));
        }
        Ok(p)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn count_bound(&self) -> f64 {
        (self.b.sqrt() - self.a) / self.alpha
    }

    /// Number of bound states: all `n` with `0 <= n < (sqrt(B) - A)/alpha`.
    pub fn num_bound_states(&self) -> usize {
        count_below(self.count_bound())
    }

    /// The same family with `A` replaced by `A + i alpha`.
    pub fn shifted(&self, i: usize) -> Result<Self> {
        EckartParams::new(self.a + i as f64 * self.alpha, self.b, self.alpha)
    }

    fn check_index(&self, n: usize) -> Result<()> {
        let count = self.num_bound_states();
        if n >= count {
            return Err(Error::Index(format!(
                "state {n} requested but only {count} bound states exist"
            )));
        }
        Ok(())
    }
}

/// A bound state: index, energy and the constant that normalizes its wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub index: i64,
    pub energy: f64,
    pub norm_constant: f64,
}

/// Outcome of a spectrum request that may legitimately be empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumStatus {
    BoundStates,
    NoBoundStates,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub status: SpectrumStatus,
    pub states: Vec<BoundState>,
    /// Why the spectrum is empty, when it is.
    pub reason: Option<String>,
}

impl Spectrum {
    pub fn bound(states: Vec<BoundState>) -> Self {
        Spectrum {
            status: SpectrumStatus::BoundStates,
            states,
            reason: None,
        }
    }

    pub fn empty(reason: impl Into<String>) -> Self {
        Spectrum {
            status: SpectrumStatus::NoBoundStates,
            states: Vec::new(),
            reason: Some(reason.into()),
        }
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }
}

/// `A(A-alpha) csch^2(alpha r) - 2B coth(alpha r)` for any real `A`, `B`.
///
/// Unchecked: `r > 0` is the caller's responsibility.
pub fn eckart_potential(a: f64, b: f64, alpha: f64, r: f64) -> f64 {
    let pt = CothPoint::new(r, alpha);
    let csch2 = 4.0 * pt.y / (pt.one_minus_y * pt.one_minus_y);
    a * (a - alpha) * csch2 - 2.0 * b * pt.z()
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
    }
    Ok(())
}

pub fn potential(p: &EckartParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(eckart_potential(p.a, p.b, p.alpha, r))
}

pub fn num_bound_states(p: &EckartParams) -> usize {
    p.num_bound_states()
}

/// `-(A + n alpha)^2 - B^2/(A + n alpha)^2`.
pub fn energy(p: &EckartParams, n: usize) -> Result<f64> {
    p.check_index(n)?;
    Ok(level_energy(p.a + n as f64 * p.alpha, p.b))
}

/// `-k^2 - B^2/k^2`, the energy attached to an effective strength `k`.
pub(crate) fn level_energy(k: f64, b: f64) -> f64 {
    -k * k - b * b / (k * k)
}

/// Jacobi exponents `(alpha_n, beta_n)` attached to effective strength `k = A + n alpha`.
pub(crate) fn level_exponents(k: f64, b: f64, alpha: f64) -> (f64, f64) {
    ((-k + b / k) / alpha, (-k - b / k) / alpha)
}

/// `(alpha_n, beta_n)` of the `n`-th state.
pub fn exponents(p: &EckartParams, n: usize) -> Result<(f64, f64)> {
    p.check_index(n)?;
    let (an, bn) = level_exponents(p.a + n as f64 * p.alpha, p.b, p.alpha);
    let nf = n as f64;
    if !(an > 0.0 && an + nf > 0.0 && bn + nf < 0.0) {
        return Err(Error::Numeric(format!(
            "exponent invariants broken for n={n}: alpha_n={an}, beta_n={bn}"
        )));
    }
    Ok((an, bn))
}

/// Unnormalized `n`-th wavefunction as an evaluable profile.
pub fn wavefunction_profile(p: &EckartParams, n: usize) -> Result<CothProfile> {
    let (an, bn) = exponents(p, n)?;
    let jac = JacobiParams::new(n, an, bn)?;
    Ok(CothProfile::new(
        p.alpha,
        an,
        bn,
        CothPoly::jacobi(&jac),
        CothPoly::constant(1.0),
    ))
}

/// `(z-1)^(alpha_n/2) (z+1)^(beta_n/2) P_n^(alpha_n, beta_n)(z)`, `z = coth(alpha r)`.
pub fn wavefunction_unnorm(p: &EckartParams, n: usize, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(wavefunction_profile(p, n)?.value(r))
}

/// Normalization constant of the `n`-th state.
pub fn normalization(p: &EckartParams, n: usize) -> Result<f64> {
    let (an, bn) = exponents(p, n)?;
    normalization_from_exponents(an, bn, n, p.alpha)
}

/// `calN` for a degree-`n` Jacobi state with exponents `(an, bn)`, from the
/// gamma product
/// `calN^-2 = 2^(a+b-1) Gamma(n+a+1) Gamma(-n-a-b) (a+b) / (alpha n! Gamma(-n-b) a b)`.
///
/// Shared with the hierarchy, where the exponents are those of a shifted
/// level but the degree is unchanged.
pub(crate) fn normalization_from_exponents(an: f64, bn: f64, n: usize, alpha: f64) -> Result<f64> {
    Ok(ln_normalization_from_exponents(an, bn, n, alpha)?.exp())
}

/// Natural log of [`normalization_from_exponents`].
pub(crate) fn ln_normalization_from_exponents(
    an: f64,
    bn: f64,
    n: usize,
    alpha: f64,
) -> Result<f64> {
    let nf = n as f64;
    if !(an > 0.0 && bn + nf < 0.0 && an + bn + nf < 0.0) {
        return Err(Error::Numeric(format!(
            "exponents (a={an}, b={bn}) do not give a normalizable state of degree {n}"
        )));
    }
    let ln_norm2 = (an + bn - 1.0) * std::f64::consts::LN_2
        + log_gamma(nf + an + 1.0)?
        + log_gamma(-nf - an - bn)?
        - log_gamma(nf + 1.0)?
        - log_gamma(-nf - bn)?
        + ((an + bn) / (an * bn)).ln()
        - alpha.ln();
    Ok(-0.5 * ln_norm2)
}

/// `calN` from the double finite sum over `m, m'` of binomials and gamma ratios.
///
/// Equal to [`normalization`] in exact arithmetic. The sum alternates and
/// cancels by many orders of magnitude once `n` or the exponents grow, so in
/// floating point it is only a cross-check for small, well-conditioned cases.
pub fn normalization_double_sum(p: &EckartParams, n: usize) -> Result<f64> {
    let (an, bn) = exponents(p, n)?;
    let nf = n as f64;
    let g_mid = log_gamma(-an - bn - 2.0 * nf + 1.0)?;
    let mut terms = Vec::with_capacity((n + 1) * (n + 1));
    for m in 0..=n {
        let cm = ln_gen_binomial(an + nf, m).mul(ln_gen_binomial(-bn - m as f64 - 1.0, n - m));
        for mp in 0..=n {
            let cmp =
                ln_gen_binomial(an + nf, mp).mul(ln_gen_binomial(-bn - mp as f64 - 1.0, n - mp));
            let s = (m + mp) as f64;
            let gammas = SignedLog {
                ln_abs: log_gamma(an + 2.0 * nf - s)? + g_mid - log_gamma(-bn - s + 1.0)?,
                sign: if (m + mp) % 2 == 0 { 1.0 } else { -1.0 },
            };
            terms.push(cm.mul(cmp).mul(gammas));
        }
    }
    let sum = signed_log_sum(terms);
    if sum.sign <= 0.0 {
        return Err(Error::Numeric(format!(
            "normalization sum is not positive for n={n}"
        )));
    }
    let ln = (0.5 - 0.5 * (an + bn)) * std::f64::consts::LN_2 + 0.5 * p.alpha.ln()
        - 0.5 * sum.ln_abs;
    Ok(ln.exp())
}

/// Normalized `n`-th wavefunction.
pub fn wavefunction(p: &EckartParams, n: usize, r: f64) -> Result<f64> {
    Ok(normalization(p, n)? * wavefunction_unnorm(p, n, r)?)
}

/// Normalized wavefunction as a profile.
pub fn normalized_profile(p: &EckartParams, n: usize) -> Result<CothProfile> {
    Ok(wavefunction_profile(p, n)?.with_scale(normalization(p, n)?))
}

/// All bound states, ascending in energy.
pub fn spectrum(p: &EckartParams) -> Result<Vec<BoundState>> {
    (0..p.num_bound_states())
        .map(|n| {
            Ok(BoundState {
                index: n as i64,
                energy: energy(p, n)?,
                norm_constant: normalization(p, n)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, alpha: f64) -> EckartParams {
        EckartParams::new(a, b, alpha).unwrap()
    }

    #[test]
    fn validation_errors_name_conditions() {
        let e = EckartParams::new(1.0, 0.9, 1.0).unwrap_err();
        assert_eq!(e.condition(), Some("B > A^2"));
        let e = EckartParams::new(0.5, 4.0, 1.0).unwrap_err();
        assert_eq!(e.condition(), Some("A >= alpha"));
        assert!(EckartParams::new(1.0, 1.0, 1.0).is_err());
        // B just above A^2: a single bound state
        assert_eq!(params(1.0, 1.0 + 1e-9, 1.0).num_bound_states(), 1);
    }

    #[test]
    fn potential_values() {
        let p = params(1.0, 4.0, 1.0);
        assert!((potential(&p, 40.0).unwrap() + 8.0).abs() < 1e-12);
        // A = alpha: only the coth term survives
        let r = 0.7;
        let want = -8.0 / (r as f64).tanh();
        assert!((potential(&p, r).unwrap() - want).abs() < 1e-12);
        let q = params(2.0, 5.0, 1.0);
        let s = 1f64.sinh();
        let want = 2.0 / (s * s) - 10.0 / 1f64.tanh();
        assert!((potential(&q, 1.0).unwrap() - want).abs() < 1e-12);
        assert!((want + 11.682_229_533).abs() < 1e-8);
        assert!(potential(&p, 0.0).is_err());
    }

    #[test]
    fn counts_and_energies() {
        assert_eq!(params(1.0, 4.0, 1.0).num_bound_states(), 1);
        assert_eq!(params(0.5, 4.5, 0.5).num_bound_states(), 4);
        assert!((energy(&params(1.0, 4.0, 1.0), 0).unwrap() + 17.0).abs() < 1e-12);
        assert!((energy(&params(0.5, 1.0, 0.5), 0).unwrap() + 4.25).abs() < 1e-12);
        assert!(energy(&params(1.0, 4.0, 1.0), 1).is_err());
        let p = params(0.5, 4.5, 0.5);
        for n in 1..p.num_bound_states() {
            assert!(energy(&p, n).unwrap() > energy(&p, n - 1).unwrap());
        }
    }

    #[test]
    fn exponent_values() {
        assert_eq!(exponents(&params(1.0, 4.0, 1.0), 0).unwrap(), (3.0, -5.0));
        let (a, b) = exponents(&params(0.5, 1.0, 0.5), 0).unwrap();
        assert!((a - 3.0).abs() < 1e-14 && (b + 5.0).abs() < 1e-14);
        let p = params(0.5, 4.5, 0.5);
        for n in 0..4 {
            let (a, b) = exponents(&p, n).unwrap();
            let want = -2.0 * (0.5 + n as f64 * 0.5) / 0.5;
            assert!((a + b - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_state_matches_sinh_form() {
        let p = params(1.0, 4.0, 1.0);
        let v = wavefunction_unnorm(&p, 0, 1.0).unwrap();
        let want = 1f64.sinh() * (-4f64).exp();
        // proportional to sinh(r) e^{-4r}; fix the constant from a second point
        let v2 = wavefunction_unnorm(&p, 0, 2.0).unwrap();
        let want2 = 2f64.sinh() * (-8f64).exp();
        assert!((v / v2 - want / want2).abs() < 1e-12);
        assert!((want - 0.021_524_560_684).abs() < 1e-11);
    }

    #[test]
    fn wavefunctions_vanish_at_origin() {
        let p = params(0.5, 4.5, 0.5);
        for n in 0..4 {
            // phi ~ r^{A/alpha} = r at the origin
            let near = wavefunction_unnorm(&p, n, 1e-8).unwrap();
            let nearer = wavefunction_unnorm(&p, n, 1e-9).unwrap();
            assert!((near / nearer - 10.0).abs() < 1e-6, "n={n}: {near} vs {nearer}");
        }
    }

    #[test]
    fn ground_state_normalization_single_term() {
        // n = 0, (a, b) = (3, -5): N^-2 = 2^{a+b-1} Gamma(3) Gamma(3) / Gamma(6) = 1/240
        let p = params(1.0, 4.0, 1.0);
        let want = 240f64.sqrt();
        assert!((normalization(&p, 0).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn gamma_product_agrees_with_double_sum() {
        for (a, b, alpha) in [(1.0, 4.0, 1.0), (1.37, 6.3, 0.5), (0.5, 4.5, 0.5), (1.23, 9.1, 0.4)] {
            let p = params(a, b, alpha);
            for n in 0..p.num_bound_states().min(3) {
                let prod = normalization(&p, n).unwrap();
                let sum = normalization_double_sum(&p, n).unwrap();
                assert!((prod - sum).abs() < 1e-9 * prod, "({a},{b},{alpha}) n={n}: {prod} vs {sum}");
            }
        }
    }

    #[test]
    fn gamma_product_high_precision_values() {
        // 50-digit evaluations of the double sum
        let p = params(0.5, 50.0, 0.5);
        let want = 1914.489_623_433_997_4;
        assert!((normalization(&p, 6).unwrap() - want).abs() < 1e-11 * want);
        let p = params(2.0, 100.0, 0.5);
        let want = 970_138.773_260_288_8;
        assert!((normalization(&p, 8).unwrap() - want).abs() < 1e-11 * want);
    }
}
