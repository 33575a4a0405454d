//! Rational extensions of the Eckart potential.
//!
//! A nodeless seed `eta = chi(z) g_m(z)` of `U_{A',B}` below its ground state
//! gives the partner `U_{A,B} + U_rat`, with `U_rat = -2 (ln G)''` where
//! `g_m(z) = (1-y)^-m G(y)`. Kind I uses `A' = A - alpha` and is
//! isospectral to `U_{A-alpha,B}`; kinds II and III use `A' = A + alpha`.
//! Kinds I and II are isospectral to the base; kind III gains one extra
//! ground state `1/eta`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::coth::{CothPoint, CothPoly, CothProfile, RadialFunction};
use crate::eckart::{
    check_radius, count_below, eckart_potential, level_energy, level_exponents, BoundState,
    EckartParams,
};
use crate::error::{Error, Result, Violation};
use crate::oracle::integrate_to_infinity;
use crate::specfun::{jacobi_deriv, JacobiParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExtensionKind {
    I,
    II,
    III,
}

impl fmt::Display for ExtensionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtensionKind::I => "I",
            ExtensionKind::II => "II",
            ExtensionKind::III => "III",
        })
    }
}

impl FromStr for ExtensionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(ExtensionKind::I),
            "II" | "2" => Ok(ExtensionKind::II),
            "III" | "3" => Ok(ExtensionKind::III),
            _ => Err(Error::Domain(format!("unknown extension kind {s:?} (expected I, II or III)"))),
        }
    }
}

/// Kind, seed degree `m`, and the `(A, B, alpha)` of the extended potential.
///
/// `B` may lie below `A^2` for kind I, so these are plain numbers rather than
/// [`EckartParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtensionSpec {
    pub kind: ExtensionKind,
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
}

impl ExtensionSpec {
    pub fn new(kind: ExtensionKind, m: usize, a: f64, b: f64, alpha: f64) -> Self {
        ExtensionSpec {
            kind,
            m,
            a,
            b,
            alpha,
        }
    }

    /// The kind-specific parameter window, all inequalities strict except `A >= 2 alpha`.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let ExtensionSpec {
            kind,
            m,
            a,
            b,
            alpha,
        } = *self;
        let detail = || format!("kind {kind}, m={m}, A={a}, B={b}, alpha={alpha}");
        let check = |ok: bool, cond: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Violation::new(cond, detail()))
            }
        };
        check(a.is_finite() && b.is_finite() && alpha.is_finite(), "finite A, B, alpha")?;
        check(alpha > 0.0, "alpha > 0")?;
        let mf = m as f64;
        match kind {
            ExtensionKind::I => {
                check(m >= 1, "m >= 1")?;
                check(a >= 2.0 * alpha, "A >= 2 alpha")?;
                check((a - alpha).powi(2) < b, "(A - alpha)^2 < B")?;
                check(
                    b < (a - alpha) * (a + (mf - 1.0) * alpha),
                    "B < (A - alpha)(A + (m - 1) alpha)",
                )
            }
            ExtensionKind::II => {
                check(m >= 1, "m >= 1")?;
                check(0.5 * (mf - 1.0) * alpha < a, "(m - 1) alpha / 2 < A")?;
                check(a < mf * alpha, "A < m alpha")?;
                check(b > (a + alpha).powi(2), "B > (A + alpha)^2")
            }
            ExtensionKind::III => {
                check(m >= 2 && m % 2 == 0, "m even (m = 2, 4, 6, ...)")?;
                check(a > mf * alpha, "A > m alpha")?;
                check(b > (a + alpha).powi(2), "B > (A + alpha)^2")
            }
        }
    }
}

/// The seed `eta = chi(z) g_m(z)` behind an extension.
#[derive(Debug, Clone)]
pub struct SeedSolution {
    /// Parameters `A'` of the potential `eta` solves.
    pub base: EckartParams,
    pub energy: f64,
    pub profile: CothProfile,
}

/// A validated extension with its polynomials precomputed.
#[derive(Debug, Clone)]
pub struct Extension {
    spec: ExtensionSpec,
    seed: SeedSolution,
    g_params: JacobiParams,
    g: CothPoly,
    /// `g_{m-1}` (kind I) or `g_{m+1}` (kinds II, III) of the neighbouring
    /// extension; its Jacobi parameters coincide with those of `g_m`.
    g_neighbour: CothPoly,
    /// `N = G (G' + y G'') - y G'^2`, with `U_rat = -8 alpha^2 y N / G^2`,
    /// and `G`, each also re-expanded in `s = 1 - y` for use near the origin.
    urat_numerator: Vec<f64>,
    urat_numerator_s: Vec<f64>,
    g_s: Vec<f64>,
}

impl Extension {
    pub fn new(spec: ExtensionSpec) -> Result<Self> {
        spec.validate().map_err(Error::Validation)?;
        let ExtensionSpec {
            kind,
            m,
            a,
            b,
            alpha,
        } = spec;
        let mf = m as f64;
        let (base, ga, gb, energy, neighbour_degree) = match kind {
            ExtensionKind::I => {
                let s = a + (mf - 1.0) * alpha;
                let (ga, gb) = level_exponents(s, b, alpha);
                (EckartParams::new(a - alpha, b, alpha)?, ga, gb, level_energy(s, b), m - 1)
            }
            ExtensionKind::II | ExtensionKind::III => {
                let t = a - mf * alpha;
                let (ga, gb) = ((t - b / t) / alpha, (t + b / t) / alpha);
                (EckartParams::new(a + alpha, b, alpha)?, ga, gb, level_energy(t, b), m + 1)
            }
        };
        let g_params = JacobiParams::new(m, ga, gb)?;
        let g = CothPoly::jacobi(&g_params);
        let g_neighbour = CothPoly::jacobi(&JacobiParams::new(neighbour_degree, ga, gb)?);
        // g has no zeros on z > 1, so its sign at z = 1 (y = 0) is global
        let sign = g.coeffs[0].signum();
        let profile =
            CothProfile::new(alpha, ga, gb, g.clone(), CothPoly::constant(1.0)).with_scale(sign);
        let urat_numerator = rational_numerator(&g.coeffs);
        let g_s = g.s_coeffs.clone();
        Ok(Extension {
            spec,
            urat_numerator_s: rational_numerator_in_s(&g_s),
            g_s,
            urat_numerator,
            seed: SeedSolution {
                base,
                energy,
                profile,
            },
            g_params,
            g,
            g_neighbour,
        })
    }

    pub fn spec(&self) -> &ExtensionSpec {
        &self.spec
    }

    pub fn seed(&self) -> &SeedSolution {
        &self.seed
    }

    /// `U_{A',B}`, the potential the seed solves.
    pub fn base(&self) -> &EckartParams {
        &self.seed.base
    }

    pub fn seed_energy(&self) -> f64 {
        self.seed.energy
    }

    pub fn seed_eta(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.seed.profile.value(r))
    }

    /// Jacobi parameters of `g_m`.
    pub fn g_params(&self) -> &JacobiParams {
        &self.g_params
    }

    /// `g_m` as a polynomial in `z`.
    pub fn g(&self) -> &CothPoly {
        &self.g
    }

    /// `g_m(z)` or its first or second `z`-derivative.
    pub fn g_poly(&self, z: f64, deriv: u8) -> Result<f64> {
        jacobi_deriv(&self.g_params, z, deriv)
    }

    /// `U_rat(r) = -2 d^2/dr^2 ln G(y) = -8 alpha^2 y N(y) / G(y)^2`, `y = exp(-2 alpha r)`.
    ///
    /// `N` is precomputed so that the cancellation near `y = 1` happens inside
    /// one polynomial evaluation rather than between `G'/G` and `G''/G`.
    pub fn rational_part(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let alpha = self.spec.alpha;
        let y = (-2.0 * alpha * r).exp();
        let (g0, num) = if y < 0.5 {
            (horner(&self.g.coeffs, y), horner(&self.urat_numerator, y))
        } else {
            let s = -(-2.0 * alpha * r).exp_m1();
            (horner(&self.g_s, s), horner(&self.urat_numerator_s, s))
        };
        Ok(-8.0 * alpha * alpha * y * num / (g0 * g0))
    }

    /// `U_rat` from the `z`-space form
    /// `2 alpha^2 (1-z^2) {2z g'/g - (1-z^2)[g''/g - (g'/g)^2] - m}`.
    ///
    /// Loses precision where `z` is large or `1 - z^2` cancels; for comparison only.
    pub fn rational_part_direct(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let alpha = self.spec.alpha;
        let z = CothPoint::new(r, alpha).z();
        let g = self.g_poly(z, 0)?;
        let l1 = self.g_poly(z, 1)? / g;
        let l2 = self.g_poly(z, 2)? / g;
        let w = 1.0 - z * z;
        Ok(2.0 * alpha * alpha * w * (2.0 * z * l1 - w * (l2 - l1 * l1) - self.spec.m as f64))
    }

    /// `U_{A,B}(r) + U_rat(r)`.
    pub fn extended_potential(&self, r: f64) -> Result<f64> {
        let ExtensionSpec { a, b, alpha, .. } = self.spec;
        Ok(eckart_potential(a, b, alpha, r) + self.rational_part(r)?)
    }

    /// Continuum threshold `-2B`.
    pub fn threshold(&self) -> f64 {
        -2.0 * self.spec.b
    }

    /// Number of states with non-negative index.
    pub fn num_regular_states(&self) -> usize {
        let ExtensionSpec { kind, a, b, alpha, .. } = self.spec;
        let shift = match kind {
            ExtensionKind::I => alpha,
            _ => -alpha,
        };
        count_below((b.sqrt() - a + shift) / alpha)
    }

    /// Index of the extra kind III state, `-m-1`.
    pub fn extra_index(&self) -> Option<i64> {
        (self.spec.kind == ExtensionKind::III).then(|| -(self.spec.m as i64) - 1)
    }

    /// All state indices in ascending energy order.
    pub fn indices(&self) -> Vec<i64> {
        self.extra_index()
            .into_iter()
            .chain(0..self.num_regular_states() as i64)
            .collect()
    }

    /// Effective strength `k` of a regular state, whose energy is `-k^2 - B^2/k^2`.
    fn strength(&self, n: usize) -> f64 {
        let ExtensionSpec { kind, a, alpha, .. } = self.spec;
        let nf = n as f64;
        match kind {
            ExtensionKind::I => a + (nf - 1.0) * alpha,
            _ => a + (nf + 1.0) * alpha,
        }
    }

    fn regular(&self, n: i64) -> Result<Option<usize>> {
        if Some(n) == self.extra_index() {
            return Ok(None);
        }
        if n >= 0 && (n as usize) < self.num_regular_states() {
            return Ok(Some(n as usize));
        }
        Err(Error::Index(format!(
            "state {n} does not exist; indices are {:?}",
            self.indices()
        )))
    }

    pub fn energy(&self, n: i64) -> Result<f64> {
        Ok(match self.regular(n)? {
            Some(n) => level_energy(self.strength(n), self.spec.b),
            None => self.seed.energy,
        })
    }

    /// `y_{m+n-1}` (kind I) or `y_{m+n+1}` (kinds II, III) as a polynomial in `z`.
    pub fn y_poly(&self, n: usize) -> Result<CothPoly> {
        if n >= self.num_regular_states() {
            return Err(Error::Index(format!(
                "y-polynomial index {n} out of range 0..{}",
                self.num_regular_states()
            )));
        }
        let ExtensionSpec {
            kind,
            m,
            a,
            b,
            alpha,
        } = self.spec;
        let mf = m as f64;
        let k = self.strength(n);
        let (an, bn) = level_exponents(k, b, alpha);
        let (ap, c2) = match kind {
            ExtensionKind::I => {
                let ap = a - alpha;
                let s = a + (mf - 1.0) * alpha;
                (ap, (ap * ap * s * s - b * b) / (ap * s * s))
            }
            _ => {
                // carries a factor alpha that vanishes from sight when alpha = 1
                let ap = a + alpha;
                (ap, alpha * (mf + 1.0) * (2.0 * a - (mf - 1.0) * alpha) / ap)
            }
        };
        let c1 = -(ap * ap * k * k - b * b) / (ap * k * k);
        let pn = CothPoly::jacobi(&JacobiParams::new(n, an, bn)?);
        let second = self.g_neighbour.mul(&pn).scale(c2);
        if n == 0 {
            return Ok(second);
        }
        let pn1 = CothPoly::jacobi(&JacobiParams::new(n - 1, an, bn)?);
        Ok(self.g.mul(&pn1).scale(c1).add(&second))
    }

    /// Unnormalized state `n` as an evaluable profile.
    pub fn state_profile(&self, n: i64) -> Result<CothProfile> {
        let alpha = self.spec.alpha;
        Ok(match self.regular(n)? {
            Some(n) => {
                let (an, bn) = level_exponents(self.strength(n), self.spec.b, alpha);
                CothProfile::new(alpha, an, bn, self.y_poly(n)?, self.g.clone())
            }
            None => CothProfile::new(
                alpha,
                -self.seed.profile.a,
                -self.seed.profile.b,
                CothPoly::constant(1.0),
                self.g.clone(),
            ),
        })
    }

    pub fn wavefunction_unnorm(&self, n: i64, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.state_profile(n)?.value(r))
    }

    /// `c > 0` with `int |c phi_n|^2 dr = 1` for the unnormalized state, by adaptive quadrature.
    pub fn normalize_numerically(&self, n: i64) -> Result<f64> {
        normalize_profile(&self.state_profile(n)?)
    }

    /// Normalized state `n`.
    pub fn normalized_profile(&self, n: i64) -> Result<CothProfile> {
        let p = self.state_profile(n)?;
        let c = normalize_profile(&p)?;
        let s = p.scale;
        Ok(p.with_scale(c * s))
    }

    /// All bound states in ascending order, with numerical norm constants.
    pub fn spectrum(&self) -> Result<Vec<BoundState>> {
        self.indices()
            .into_iter()
            .map(|n| {
                Ok(BoundState {
                    index: n,
                    energy: self.energy(n)?,
                    norm_constant: self.normalize_numerically(n)?,
                })
            })
            .collect()
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * t + k)
}

fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `a + cb b`.
fn poly_add(a: &[f64], b: &[f64], cb: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &y) in b.iter().enumerate() {
        out[i] += cb * y;
    }
    out
}

/// `(1 - s) c(s)`.
fn one_minus_s_times(c: &[f64]) -> Vec<f64> {
    let shifted: Vec<f64> = std::iter::once(0.0).chain(c.iter().copied()).collect();
    poly_add(c, &shifted, -1.0)
}

/// The numerator below in `s = 1 - y`: `G (-G_s + (1-s) G_ss) - (1-s) G_s^2`.
fn rational_numerator_in_s(g: &[f64]) -> Vec<f64> {
    let g1 = poly_deriv(g);
    let g2 = poly_deriv(&g1);
    let inner = poly_add(&one_minus_s_times(&g2), &g1, -1.0);
    poly_add(&poly_mul(g, &inner), &one_minus_s_times(&poly_mul(&g1, &g1)), -1.0)
}

/// `G (G' + y G'') - y G'^2` from the coefficients of `G` in ascending powers of `y`.
fn rational_numerator(g: &[f64]) -> Vec<f64> {
    let d = g.len();
    if d == 0 {
        return Vec::new();
    }
    // G' + y G'' = sum k^2 g_k y^(k-1); y G'^2 = y (sum k g_k y^(k-1))^2
    let mut out = vec![0.0; 2 * d];
    for (j, &gj) in g.iter().enumerate() {
        for (k, &gk) in g.iter().enumerate().skip(1) {
            out[j + k - 1] += (k * k) as f64 * gj * gk - (j * k) as f64 * gj * gk;
        }
    }
    out
}

/// `c` with `int |c p|^2 dr = 1` over `(1e-10/alpha, inf)`, by quadrature.
pub fn normalize_profile(p: &CothProfile) -> Result<f64> {
    let r0 = 1e-10 / p.alpha;
    let norm2 = integrate_to_infinity(
        |r| {
            let v = p.value(r);
            v * v
        },
        r0,
        1.0 / p.alpha,
        1e-10,
    )?;
    if !(norm2 > 0.0 && norm2.is_finite()) {
        return Err(Error::Numeric(format!("state has squared norm {norm2}")));
    }
    Ok(1.0 / norm2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coth::FnRadial;
    use crate::eckart;
    use crate::oracle::{mixed_points, ode_residual, residual_grid, sign_changes};
    use ExtensionKind::*;

    fn ext(kind: ExtensionKind, m: usize, a: f64, b: f64, alpha: f64) -> Extension {
        Extension::new(ExtensionSpec::new(kind, m, a, b, alpha)).unwrap()
    }

    fn violated(kind: ExtensionKind, m: usize, a: f64, b: f64, alpha: f64) -> &'static str {
        ExtensionSpec::new(kind, m, a, b, alpha)
            .validate()
            .unwrap_err()
            .condition
    }

    #[test]
    fn validation_windows() {
        assert!(ExtensionSpec::new(I, 1, 1.0, 0.3, 0.5).validate().is_ok());
        assert_eq!(violated(III, 3, 3.0, 20.0, 0.5), "m even (m = 2, 4, 6, ...)");
        assert!(ExtensionSpec::new(II, 2, 0.9, 4.0, 1.0).validate().is_ok());
        assert_eq!(violated(II, 2, 2.1, 20.0, 1.0), "A < m alpha");
        assert_eq!(violated(I, 1, 0.9, 0.3, 0.5), "A >= 2 alpha");
        assert_eq!(violated(I, 1, 1.0, 0.25, 0.5), "(A - alpha)^2 < B");
        assert_eq!(violated(I, 1, 1.0, 0.5, 0.5), "B < (A - alpha)(A + (m - 1) alpha)");
        assert_eq!(violated(II, 2, 0.9, 3.61, 1.0), "B > (A + alpha)^2");
        assert_eq!(violated(II, 3, 0.9, 9.0, 1.0), "(m - 1) alpha / 2 < A");
        assert_eq!(violated(III, 2, 1.0, 9.0, 0.5), "A > m alpha");
        assert!(Extension::new(ExtensionSpec::new(III, 2, 1.0, 9.0, 0.5)).is_err());
    }

    #[test]
    fn seed_energies() {
        // kind I, m = 1: the ground-state energy of U_{A,B}
        let e = ext(I, 1, 1.0, 0.3, 0.5);
        assert!((e.seed_energy() - (-1.0 - 0.09)).abs() < 1e-14);
        let e = ext(III, 2, 1.5, 4.5, 0.5);
        assert!((e.seed_energy() + 81.25).abs() < 1e-12);
        for e in [ext(I, 2, 1.2, 0.6, 0.5), ext(II, 2, 0.8, 4.0, 0.5), ext(III, 4, 2.3, 9.0, 0.5)] {
            assert!(e.seed_energy() < eckart::energy(e.base(), 0).unwrap());
        }
    }

    fn sample_radii(alpha: f64) -> Vec<f64> {
        mixed_points(1e-6 / alpha, 1.0 / alpha, 50.0 / alpha, 400, 400)
    }

    #[test]
    fn seeds_are_nodeless_solutions() {
        for e in [
            ext(I, 1, 1.0, 0.3, 0.5),
            ext(I, 3, 1.2, 0.9, 0.5),
            ext(II, 2, 0.8, 4.0, 0.5),
            ext(III, 2, 1.5, 4.5, 0.5),
        ] {
            let alpha = e.spec().alpha;
            let vals: Vec<f64> = sample_radii(alpha).iter().map(|&r| e.seed_eta(r).unwrap()).collect();
            assert_eq!(sign_changes(&vals), 0);
            assert!(vals.iter().all(|v| *v >= 0.0));
            let base = *e.base();
            let v = |r| eckart::potential(&base, r).unwrap();
            let grid = residual_grid(v, e.seed_energy(), 0.05 / alpha, 12.0 / alpha).unwrap();
            let res = ode_residual(
                v,
                e.seed_energy(),
                |r| e.seed_eta(r).unwrap(),
                &grid,
                1.0,
            );
            assert!(res < 1e-5, "{:?}: {res}", e.spec());
        }
    }

    #[test]
    fn g_is_nodeless_and_derivative_matches() {
        let e = ext(II, 3, 1.2, 6.0, 0.5);
        let zs: Vec<f64> = (1..2000).map(|k| 1.0 + k as f64 * 0.01).collect();
        let g: Vec<f64> = zs.iter().map(|&z| e.g_poly(z, 0).unwrap()).collect();
        assert_eq!(sign_changes(&g), 0);
        let h = 1e-5;
        for z in [1.3, 2.0, 4.5] {
            let fd = (e.g_poly(z + h, 0).unwrap() - e.g_poly(z - h, 0).unwrap()) / (2.0 * h);
            let d = e.g_poly(z, 1).unwrap();
            assert!((fd - d).abs() < 1e-6 * d.abs());
        }
    }

    #[test]
    fn rational_part_forms_agree_and_decay() {
        for e in [ext(I, 2, 1.2, 0.6, 0.5), ext(II, 2, 0.8, 4.0, 0.5), ext(III, 2, 1.5, 4.5, 0.5)] {
            let alpha = e.spec().alpha;
            for r in [0.3, 1.0, 3.0, 8.0] {
                let y = e.rational_part(r / alpha).unwrap();
                let z = e.rational_part_direct(r / alpha).unwrap();
                assert!((y - z).abs() < 1e-8 * (1.0 + y.abs()), "{:?} r={r}: {y} vs {z}", e.spec());
            }
            assert!(e.rational_part(50.0 / alpha).unwrap().abs() < 1e-8);
            assert!(e.rational_part(1e-9).unwrap().is_finite());
        }
    }

    #[test]
    fn kind_one_example_spectrum() {
        let e = ext(I, 1, 1.0, 0.3, 0.5);
        assert_eq!(e.indices(), vec![0]);
        assert!((e.energy(0).unwrap() + 0.61).abs() < 1e-12);
        assert!(e.energy(1).is_err());
    }

    #[test]
    fn isospectral_and_extra_state_bookkeeping() {
        let e2 = ext(II, 2, 0.8, 9.0, 0.5);
        let base: Vec<f64> = eckart::spectrum(e2.base()).unwrap().iter().map(|s| s.energy).collect();
        let got: Vec<f64> = e2.indices().iter().map(|&n| e2.energy(n).unwrap()).collect();
        assert_eq!(base.len(), got.len());
        for (a, b) in base.iter().zip(&got) {
            assert!((a - b).abs() < 1e-12 * a.abs());
        }
        let e3 = ext(III, 2, 1.5, 9.0, 0.5);
        assert_eq!(e3.indices()[0], -3);
        assert_eq!(e3.indices().len(), e3.base().num_bound_states() + 1);
        assert_eq!(e3.energy(-3).unwrap(), e3.seed_energy());
    }

    #[test]
    fn y_poly_degree_and_n_zero() {
        let e = ext(II, 2, 0.8, 9.0, 0.5);
        for n in 0..e.num_regular_states() {
            let y = e.y_poly(n).unwrap();
            assert_eq!(y.degree, 2 + n + 1);
        }
        let y0 = e.y_poly(0).unwrap();
        let scaled = e.g_neighbour.clone().scale(0.5 * 3.0 * (2.0 * 0.8 - 0.5) / 1.3);
        for z in [1.2, 2.0, 5.0] {
            assert!((y0.value_z(z) - scaled.value_z(z)).abs() < 1e-12 * scaled.value_z(z).abs());
        }
        assert!(matches!(e.y_poly(99), Err(Error::Index(_))));
    }

    fn residual_of_state(e: &Extension, n: i64) -> f64 {
        let alpha = e.spec().alpha;
        let p = e.state_profile(n).unwrap();
        let v = |r| e.extended_potential(r).unwrap();
        let grid = residual_grid(v, e.energy(n).unwrap(), 0.05 / alpha, 15.0 / alpha).unwrap();
        ode_residual(
            v,
            e.energy(n).unwrap(),
            |r| p.value(r),
            &grid,
            1.0,
        )
    }

    #[test]
    fn extended_states_solve_extended_equation() {
        for e in [
            ext(I, 1, 1.0, 0.3, 0.5),
            ext(I, 2, 1.5, 1.4, 0.5),
            ext(II, 2, 0.8, 9.0, 0.5),
            ext(III, 2, 1.5, 9.0, 0.5),
        ] {
            for n in e.indices() {
                let res = residual_of_state(&e, n);
                assert!(res < 1e-5, "{:?} n={n}: {res}", e.spec());
            }
        }
    }

    #[test]
    fn node_counts_follow_energy_order() {
        let e = ext(III, 2, 1.5, 9.0, 0.5);
        for (pos, n) in e.indices().into_iter().enumerate() {
            let p = e.state_profile(n).unwrap();
            let vals: Vec<f64> = sample_radii(0.5).iter().map(|&r| p.value(r)).collect();
            assert_eq!(sign_changes(&vals), pos, "n={n}");
        }
    }

    #[test]
    fn numerical_norm_scaling() {
        let e = ext(II, 2, 0.8, 9.0, 0.5);
        let p = e.state_profile(0).unwrap();
        let c = normalize_profile(&p).unwrap();
        let c2 = normalize_profile(&p.clone().with_scale(2.0)).unwrap();
        assert!((2.0 * c2 - c).abs() < 1e-12 * c);
        let n = e.normalized_profile(0).unwrap();
        assert!((normalize_profile(&n).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn numeric_norm_matches_closed_form_without_extension() {
        let p = EckartParams::new(0.5, 4.5, 0.5).unwrap();
        for n in 0..p.num_bound_states() {
            let prof = eckart::wavefunction_profile(&p, n).unwrap();
            let num = normalize_profile(&prof).unwrap();
            let exact = eckart::normalization(&p, n).unwrap();
            assert!((num - exact).abs() < 1e-7 * exact, "n={n}: {num} vs {exact}");
        }
    }

    #[test]
    fn fd_derivative_adapter_is_consistent() {
        let e = ext(I, 2, 1.5, 1.4, 0.5);
        let p = e.state_profile(0).unwrap();
        let f = FnRadial(|r| p.value(r));
        for r in [0.5, 2.0] {
            assert!((f.derivative(r) - p.derivative(r)).abs() < 1e-7 * p.derivative(r).abs());
        }
    }
}
