//! First-order supersymmetric factorization of the Eckart family.
//!
//! With `W = -A coth(alpha r) + B/A` the Hamiltonian `-d^2/dr^2 + U_{A,B}`
//! factorizes as `(-d/dr + W)(d/dr + W) + E_0`, and the partner
//! `W^2 + W' + E_0` is `U_{A+alpha,B}` again. Repeating the step gives the
//! finite hierarchy `U^(i) = U_{A+i alpha,B}` whose spectra are those of the
//! base family with the lowest `i` levels removed.

use crate::coth::{CothPoint, CothProfile, RadialFunction};
use crate::eckart::{self, check_radius, BoundState, EckartParams};
use crate::error::{Error, Result};

/// `-A coth(alpha r) + B/A`.
pub fn superpotential(p: &EckartParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(-p.a() * CothPoint::new(r, p.alpha()).z() + p.b() / p.a())
}

/// `W'(r) = A alpha csch^2(alpha r)`.
pub fn superpotential_derivative(p: &EckartParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    let pt = CothPoint::new(r, p.alpha());
    Ok(p.a() * p.alpha() * 4.0 * pt.y / (pt.one_minus_y * pt.one_minus_y))
}

/// `W^2 + W' + E_0`, assembled from the superpotential.
pub fn partner_potential(p: &EckartParams, r: f64) -> Result<f64> {
    let w = superpotential(p, r)?;
    let dw = superpotential_derivative(p, r)?;
    Ok(w * w + dw + eckart::energy(p, 0)?)
}

/// Parameters of the `i`-th hierarchy member, which must still bind.
pub fn hierarchy_params(p: &EckartParams, i: usize) -> Result<EckartParams> {
    let count = p.num_bound_states();
    if i >= count.max(1) {
        return Err(Error::Index(format!(
            "hierarchy index {i} too deep: U^(i) binds only for A + i*alpha < sqrt(B), i.e. i < {count}"
        )));
    }
    p.shifted(i)
}

/// `U^(i)(r) = U_{A + i alpha, B}(r)`.
pub fn hierarchy_potential(p: &EckartParams, i: usize, r: f64) -> Result<f64> {
    let q = hierarchy_params(p, i)?;
    eckart::potential(&q, r)
}

/// Spectrum of `H_i`: the base levels `n + i`, normalized for `U^(i)`.
pub fn hierarchy_spectrum(p: &EckartParams, i: usize) -> Result<Vec<BoundState>> {
    let q = hierarchy_params(p, i)?;
    let states = eckart::spectrum(&q)?;
    debug_assert!(states
        .iter()
        .all(|s| (s.energy - eckart::energy(p, s.index as usize + i).unwrap()).abs()
            <= 1e-12 * s.energy.abs()));
    Ok(states)
}

/// Normalized `n`-th state of `H_i`.
pub fn hierarchy_wavefunction_profile(p: &EckartParams, i: usize, n: usize) -> Result<CothProfile> {
    eckart::normalized_profile(&hierarchy_params(p, i)?, n)
}

/// A factorization `H = A^+ A + energy` built from a nodeless solution `seed`
/// of `H` at `energy`, with `W = -seed'/seed`.
#[derive(Debug, Clone)]
pub struct Factorization<S> {
    pub energy: f64,
    pub seed: S,
}

impl Factorization<CothProfile> {
    /// The standard factorization of `U_{A,B}` at its ground state.
    pub fn ground_state(p: &EckartParams) -> Result<Self> {
        Ok(Factorization {
            energy: eckart::energy(p, 0)?,
            seed: eckart::wavefunction_profile(p, 0)?,
        })
    }
}

impl<S: RadialFunction> Factorization<S> {
    pub fn superpotential(&self, r: f64) -> f64 {
        -self.seed.log_derivative(r)
    }

    /// `(d/dr + W) phi` at `r`.
    pub fn intertwine<P: RadialFunction>(&self, phi: &P, r: f64) -> f64 {
        intertwine(|t| self.superpotential(t), phi, r)
    }

    /// `(d/dr + W) phi` as a radial function.
    pub fn apply<P: RadialFunction>(&self, phi: P) -> Intertwined<'_, S, P> {
        Intertwined { fac: self, phi }
    }
}

/// `W(r) phi(r) + phi'(r)`, which maps solutions of `H` at `E` to solutions
/// of the partner at `E` and annihilates the seed.
///
/// `phi'` comes from [`RadialFunction::derivative`], which is analytic for
/// closed-form profiles and a five-point difference otherwise.
pub fn intertwine<W: Fn(f64) -> f64, P: RadialFunction>(w: W, phi: &P, r: f64) -> f64 {
    w(r) * phi.value(r) + phi.derivative(r)
}

/// The image of `phi` under a factorization's intertwiner.
pub struct Intertwined<'a, S, P> {
    fac: &'a Factorization<S>,
    phi: P,
}

impl<S: RadialFunction, P: RadialFunction> RadialFunction for Intertwined<'_, S, P> {
    fn value(&self, r: f64) -> f64 {
        self.fac.intertwine(&self.phi, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coth::FnRadial;
    use crate::oracle::{correlation, ode_residual, Grid};

    fn params(a: f64, b: f64, alpha: f64) -> EckartParams {
        EckartParams::new(a, b, alpha).unwrap()
    }

    #[test]
    fn superpotential_values() {
        let p = params(1.0, 4.0, 1.0);
        assert!((superpotential(&p, 60.0).unwrap() - 3.0).abs() < 1e-12);
        let want = 4.0 - 1.0 / 1f64.tanh();
        assert!((superpotential(&p, 1.0).unwrap() - want).abs() < 1e-12);
        assert!((want - 2.686_96).abs() < 1e-5);
        assert!(superpotential(&p, -1.0).is_err());
    }

    #[test]
    fn superpotential_is_minus_log_derivative_of_ground_state() {
        let p = params(1.3, 6.0, 0.7);
        let phi0 = FnRadial(|r| eckart::wavefunction_unnorm(&p, 0, r).unwrap());
        for r in [0.2, 0.9, 2.4] {
            let w = superpotential(&p, r).unwrap();
            let fd = -phi0.derivative(r) / phi0.value(r);
            assert!((w - fd).abs() < 1e-6 * w.abs().max(1.0), "r={r}");
        }
    }

    #[test]
    fn partner_is_shifted_eckart() {
        let p = params(1.0, 4.0, 1.0);
        // B = A^2 for the partner: no bound state, but still an Eckart potential
        for r in [0.05, 0.5, 1.0, 3.0, 10.0] {
            let u = eckart::eckart_potential(2.0, 4.0, 1.0, r);
            assert!((partner_potential(&p, r).unwrap() - u).abs() < 1e-10 * (1.0 + u.abs()));
        }
        // A = alpha: partner csch^2 coefficient is 2 alpha^2
        let p = params(0.5, 2.0, 0.5);
        let r = 0.8f64;
        let s = (0.5 * r).sinh();
        let want = 0.5 / (s * s) - 4.0 / (0.5 * r).tanh();
        assert!((partner_potential(&p, r).unwrap() - want).abs() < 1e-10 * want.abs());
        // asymptote
        assert!((partner_potential(&p, 80.0).unwrap() + 4.0).abs() < 1e-10);
    }

    #[test]
    fn hierarchy_depth_and_spectrum() {
        let p = params(0.5, 4.5, 0.5);
        assert_eq!(p.num_bound_states(), 4);
        let r = 1.1;
        assert_eq!(
            hierarchy_potential(&p, 0, r).unwrap(),
            eckart::potential(&p, r).unwrap()
        );
        let want = eckart::potential(&params(1.5, 4.5, 0.5), r).unwrap();
        assert!((hierarchy_potential(&p, 2, r).unwrap() - want).abs() < 1e-12 * want.abs());
        let s1: Vec<f64> = hierarchy_spectrum(&p, 1).unwrap().iter().map(|s| s.energy).collect();
        let base: Vec<f64> = (1..4).map(|n| eckart::energy(&p, n).unwrap()).collect();
        assert_eq!(s1.len(), 3);
        for (a, b) in s1.iter().zip(&base) {
            assert!((a - b).abs() < 1e-12 * b.abs());
        }
        for i in 0..4 {
            assert_eq!(hierarchy_spectrum(&p, i).unwrap().len(), 4 - i);
        }
        assert!(matches!(hierarchy_spectrum(&p, 4), Err(Error::Index(_))));
        assert!(hierarchy_potential(&p, 9, r).is_err());
    }

    #[test]
    fn partner_of_member_is_next_member() {
        let p = params(0.5, 4.5, 0.5);
        for i in 0..3 {
            let q = hierarchy_params(&p, i).unwrap();
            for r in [0.1, 0.7, 2.0, 6.0] {
                let next = hierarchy_potential(&p, i + 1, r).unwrap();
                let got = partner_potential(&q, r).unwrap();
                assert!((got - next).abs() < 1e-10 * (1.0 + next.abs()));
            }
        }
    }

    #[test]
    fn ground_state_is_annihilated() {
        let p = params(1.0, 4.0, 1.0);
        let fac = Factorization::ground_state(&p).unwrap();
        for r in [0.3, 1.0, 2.5] {
            let scale = fac.seed.value(r).abs() * (1.0 + fac.superpotential(r).abs());
            assert!(fac.intertwine(&fac.seed, r).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn intertwined_first_excited_is_partner_ground_state() {
        let p = params(0.5, 4.5, 0.5);
        let fac = Factorization::ground_state(&p).unwrap();
        let phi1 = eckart::wavefunction_profile(&p, 1).unwrap();
        let image = fac.apply(&phi1);
        let target = eckart::wavefunction_profile(&p.shifted(1).unwrap(), 0).unwrap();
        let grid = Grid::new(0.05, 30.0, 3000).unwrap();
        let a: Vec<f64> = grid.points().map(|r| image.value(r)).collect();
        let b: Vec<f64> = grid.points().map(|r| target.value(r)).collect();
        assert!(correlation(&a, &b) > 1.0 - 1e-8);
        // and it solves the partner equation at E_1
        let q = p.shifted(1).unwrap();
        let e1 = eckart::energy(&p, 1).unwrap();
        let fine = Grid::new(0.1, 20.0, 19_801).unwrap();
        let res = ode_residual(
            |r| eckart::potential(&q, r).unwrap(),
            e1,
            |r| image.value(r),
            &fine,
            1.0,
        );
        assert!(res < 1e-4, "{res}");
    }

    #[test]
    fn telescoping_two_steps() {
        let p = params(0.5, 4.5, 0.5);
        let f0 = Factorization::ground_state(&p).unwrap();
        let f1 = Factorization::ground_state(&p.shifted(1).unwrap()).unwrap();
        let phi3 = eckart::wavefunction_profile(&p, 3).unwrap();
        let once = f0.apply(&phi3);
        let twice = f1.apply(&once);
        let target = eckart::wavefunction_profile(&p.shifted(2).unwrap(), 1).unwrap();
        let grid = Grid::new(0.05, 30.0, 3000).unwrap();
        let a: Vec<f64> = grid.points().map(|r| twice.value(r)).collect();
        let b: Vec<f64> = grid.points().map(|r| target.value(r)).collect();
        assert!(correlation(&a, &b) > 1.0 - 1e-6);
    }
}
