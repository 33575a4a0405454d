//! Independent numerical checks: a finite-difference bound-state solver,
//! adaptive quadrature and ODE residuals.
//!
//! The solver discretizes `-c d^2/dr^2 + V(r)` with the three-point stencil.
//! [`Grid`] is uniform with Dirichlet ends; [`HalfLineProblem`] uses a
//! [`MappedGrid`] that is logarithmic near the singular end. The symmetric
//! tridiagonal matrix is handled by Sturm-sequence bisection (eigenvalues)
//! and inverse iteration (eigenvectors). The O(h^2) error is removed by two
//! Richardson steps over grids with `M`, `2M` and `4M` intervals.

use crate::error::{Error, Result};

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 8000;

/// Environment variable overriding [`DEFAULT_GRID_POINTS`].
pub const GRID_POINTS_ENV: &str = "HULTHEN_SUSY_GRID_POINTS";

/// Uniform grid `r_min = r_0 < r_1 < ... < r_{N-1} = r_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    r_min: f64,
    r_max: f64,
    n_points: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 200;

    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite() && r_min < r_max) {
            return Err(Error::Domain(format!(
                "grid needs finite r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::Domain(format!(
                "grid needs at least {} points, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Grid {
            r_min,
            r_max,
            n_points,
        })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.r_max
        } else {
            self.r_min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Same interval, with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Grid {
        Grid {
            n_points: (self.n_points - 1) * factor + 1,
            ..*self
        }
    }
}

/// A bound state found on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericState {
    pub energy: f64,
    /// Abscissae of `values`.
    pub points: Vec<f64>,
    /// Eigenfunction at `points`, unit norm under the trapezoidal rule in
    /// the grid's own measure and positive just off the left end.
    pub values: Vec<f64>,
}

/// Symmetric tridiagonal matrix; `off[i]` couples unknowns `i` and `i + 1`.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// `-c d^2/dr^2 + V` on the interior of a uniform grid.
    fn build<V: Fn(f64) -> f64>(v: &V, grid: &Grid, kinetic: f64) -> Result<Self> {
        let h = grid.step();
        let k = kinetic / (h * h);
        let diag: Vec<f64> = (1..grid.n_points - 1)
            .map(|i| 2.0 * k + v(grid.point(i)))
            .collect();
        let off = vec![-k; diag.len().saturating_sub(1)];
        Tridiagonal { diag, off }.checked(|i| grid.point(i + 1))
    }

    fn checked(self, at: impl Fn(usize) -> f64) -> Result<Self> {
        if let Some(i) = self.diag.iter().position(|d| !d.is_finite()) {
            return Err(Error::Numeric(format!("potential not finite at r = {}", at(i))));
        }
        Ok(self)
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let emax = self.off.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let pivmin = f64::MIN_POSITIVE.sqrt() * (1.0 + emax * emax);
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 {
                d - x
            } else {
                d - x - self.off[i - 1] * self.off[i - 1] / q
            };
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin lower bound.
    fn lower_bound(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i] - left - right
            })
            .fold(f64::INFINITY, f64::min)
            - 1.0
    }

    /// All eigenvalues below `ceiling`, ascending, by bisection.
    fn eigenvalues_below(&self, ceiling: f64) -> Vec<f64> {
        let count = self.count_below(ceiling);
        let mut lo = vec![self.lower_bound(); count];
        let mut hi = vec![ceiling; count];
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            for _ in 0..400 {
                let (l, h) = (lo[k], hi[k]);
                let mid = 0.5 * (l + h);
                if h - l <= 4.0 * f64::EPSILON * l.abs().max(h.abs()) || mid <= l || mid >= h {
                    break;
                }
                let c = self.count_below(mid);
                // every eigenvalue j < c is below mid, every j >= c is above
                for j in k..count {
                    if j < c {
                        hi[j] = hi[j].min(mid);
                    } else {
                        lo[j] = lo[j].max(mid);
                    }
                }
            }
            out.push(0.5 * (lo[k] + hi[k]));
        }
        out
    }

    /// Unit eigenvector for a converged eigenvalue by inverse iteration.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let scale = self
            .diag
            .iter()
            .chain(&self.off)
            .fold(0.0f64, |m, d| m.max(d.abs()));
        let tiny = f64::EPSILON * scale;
        // LU of T - lambda I without pivoting, with a floor on the pivots.
        let mut piv = vec![0.0; n];
        for i in 0..n {
            let mut p = self.diag[i] - lambda;
            if i > 0 {
                p -= self.off[i - 1] * self.off[i - 1] / piv[i - 1];
            }
            if p.abs() < tiny {
                p = if p < 0.0 { -tiny } else { tiny };
            }
            piv[i] = p;
        }
        let mut x = vec![1.0; n];
        for _ in 0..3 {
            // forward: L w = x
            for i in 1..n {
                x[i] -= self.off[i - 1] / piv[i - 1] * x[i - 1];
            }
            // back: U v = w
            x[n - 1] /= piv[n - 1];
            for i in (0..n - 1).rev() {
                x[i] = (x[i] - self.off[i] * x[i + 1]) / piv[i];
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Eigenvectors for `energies`, each checked for finiteness.
    fn eigenvectors(&self, energies: &[f64]) -> Result<Vec<Vec<f64>>> {
        energies
            .iter()
            .map(|&e| {
                let x = self.eigenvector(e);
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Numeric(format!("inverse iteration diverged at E = {e}")));
                }
                Ok(x)
            })
            .collect()
    }
}

/// Flip `values` so the first significant entry is positive.
fn orient(values: &mut [f64]) {
    let max = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let first = values.iter().find(|x| x.abs() > 1e-8 * max).copied().unwrap_or(1.0);
    if first < 0.0 {
        values.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Eigenvalues below `ceiling` on a single grid.
pub fn eigenvalues_below<V: Fn(f64) -> f64>(
    v: V,
    grid: &Grid,
    kinetic: f64,
    ceiling: f64,
) -> Result<Vec<f64>> {
    check_kinetic(kinetic)?;
    Ok(Tridiagonal::build(&v, grid, kinetic)?.eigenvalues_below(ceiling))
}

fn check_kinetic(kinetic: f64) -> Result<()> {
    if !(kinetic > 0.0) {
        return Err(Error::Domain(format!("kinetic prefactor must be positive, got {kinetic}")));
    }
    Ok(())
}

/// Bound states below `ceiling` of `-c d^2/dr^2 + V` with Dirichlet ends.
pub fn solve_bound_states<V: Fn(f64) -> f64>(
    v: V,
    grid: &Grid,
    kinetic: f64,
    ceiling: f64,
) -> Result<Vec<NumericState>> {
    check_kinetic(kinetic)?;
    let t = Tridiagonal::build(&v, grid, kinetic)?;
    let h = grid.step();
    let energies = t.eigenvalues_below(ceiling);
    let vectors = t.eigenvectors(&energies)?;
    Ok(energies
        .into_iter()
        .zip(vectors)
        .map(|(energy, interior)| {
            let mut values = Vec::with_capacity(grid.n_points);
            values.push(0.0);
            values.extend(interior);
            values.push(0.0);
            let norm = (h * values.iter().map(|x| x * x).sum::<f64>()).sqrt();
            values.iter_mut().for_each(|x| *x /= norm);
            orient(&mut values);
            NumericState {
                energy,
                points: grid.points().collect(),
                values,
            }
        })
        .collect())
}

/// Richardson-extrapolated spectrum.
#[derive(Debug, Clone)]
pub struct OracleSpectrum {
    /// Extrapolated eigenvalues, ascending.
    pub energies: Vec<f64>,
    /// Relative change of each eigenvalue between the last two
    /// extrapolation levels, an estimate of the remaining error.
    pub doubling_shift: Vec<f64>,
    /// Points of the finest grid used.
    pub n_points: usize,
    pub warnings: Vec<String>,
}

impl OracleSpectrum {
    pub fn max_shift(&self) -> f64 {
        self.doubling_shift.iter().cloned().fold(0.0, f64::max)
    }
}

/// Largest relative move, measured from the ceiling, of a bound-state
/// eigenvalue when the box is widened.
pub const BOX_TOLERANCE: f64 = 1e-8;

/// Relative doubling shift above which a convergence warning is raised.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

/// Two Richardson steps over eigenvalues at step `h`, `h/2`, `h/4`.
fn richardson(levels: [Vec<f64>; 3], n_points: usize) -> OracleSpectrum {
    let mut warnings = Vec::new();
    let count = levels.iter().map(Vec::len).min().unwrap_or(0);
    if levels.iter().any(|l| l.len() != count) {
        warnings.push(format!(
            "eigenvalue count changes under refinement ({:?}); keeping {count}",
            levels.iter().map(Vec::len).collect::<Vec<_>>()
        ));
    }
    let mut energies = Vec::with_capacity(count);
    let mut doubling_shift = Vec::with_capacity(count);
    for k in 0..count {
        let (e1, e2, e4) = (levels[0][k], levels[1][k], levels[2][k]);
        let r1 = (4.0 * e2 - e1) / 3.0;
        let r2 = (4.0 * e4 - e2) / 3.0;
        let best = (16.0 * r2 - r1) / 15.0;
        let shift = (best - r2).abs() / best.abs().max(f64::MIN_POSITIVE);
        if shift > CONVERGENCE_TOLERANCE {
            warnings.push(format!(
                "state {k}: eigenvalue shifts by {shift:.2e} under grid doubling"
            ));
        }
        energies.push(best);
        doubling_shift.push(shift);
    }
    OracleSpectrum {
        energies,
        doubling_shift,
        n_points,
        warnings,
    }
}

/// Eigenvalues on `grid`, `2x` and `4x` refinements, extrapolated twice.
pub fn extrapolated_spectrum<V: Fn(f64) -> f64>(
    v: V,
    grid: &Grid,
    kinetic: f64,
    ceiling: f64,
) -> Result<OracleSpectrum> {
    let level = |f: usize| eigenvalues_below(&v, &grid.refined(f), kinetic, ceiling);
    Ok(richardson([level(1)?, level(2)?, level(4)?], grid.refined(4).n_points()))
}

/// Settings for [`HalfLineProblem::solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Lower bound on the points of the coarsest grid.
    pub n_points: usize,
    /// Largest `dr * kappa` allowed on the coarsest grid, where `kappa` is
    /// the decay rate of the deepest state.
    pub max_step_kappa: f64,
    /// Required `kappa * (r_max - r_tail)` for the shallowest state.
    pub tail_decay: f64,
    /// The potential counts as asymptotic once within this fraction of the ceiling.
    pub tail_tolerance: f64,
    /// Hard cap on the coarsest grid size.
    pub max_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_points: DEFAULT_GRID_POINTS,
            max_step_kappa: 0.05,
            tail_decay: 25.0,
            tail_tolerance: 1e-10,
            max_points: 400_000,
        }
    }
}

impl OracleConfig {
    /// Defaults, with `n_points` taken from the environment if set.
    pub fn from_env() -> Self {
        let mut cfg = OracleConfig::default();
        if let Some(n) = std::env::var(GRID_POINTS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
        {
            cfg.n_points = n.max(Grid::MIN_POINTS);
        }
        cfg
    }
}

/// `ln(1 + e^u)` without overflow.
fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

/// Inverse of [`softplus`] for `t > 0`.
fn softplus_inv(t: f64) -> f64 {
    if t > 30.0 {
        t + (-(-t).exp_m1()).ln()
    } else {
        t.exp_m1().ln()
    }
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Uniform grid in `u` for `r = origin + L ln(1 + e^u)`: logarithmic
/// spacing within `L` of the origin, uniform beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedGrid {
    origin: f64,
    length: f64,
    u_min: f64,
    u_max: f64,
    n_points: usize,
}

impl MappedGrid {
    fn new(origin: f64, length: f64, t_min: f64, t_max: f64, n_points: usize) -> Result<Self> {
        if !(0.0 < t_min && t_min < t_max && length > 0.0 && n_points >= Grid::MIN_POINTS) {
            return Err(Error::Domain(format!(
                "mapped grid needs 0 < t_min < t_max, L > 0 and {} points",
                Grid::MIN_POINTS
            )));
        }
        Ok(MappedGrid {
            origin,
            length,
            u_min: softplus_inv(t_min / length),
            u_max: softplus_inv(t_max / length),
            n_points,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.u_max - self.u_min) / (self.n_points - 1) as f64
    }

    fn u(&self, i: usize) -> f64 {
        self.u_min + i as f64 * self.step()
    }

    pub fn point(&self, i: usize) -> f64 {
        self.origin + self.length * softplus(self.u(i))
    }

    pub fn r_max(&self) -> f64 {
        self.origin + self.length * softplus(self.u_max)
    }

    /// `dr/du` at node `i`.
    fn jacobian(&self, i: usize) -> f64 {
        self.length * logistic(self.u(i))
    }

    fn refined(&self, factor: usize) -> Self {
        MappedGrid {
            n_points: (self.n_points - 1) * factor + 1,
            ..*self
        }
    }

    /// The same step, with the far end pushed out by `extra` steps.
    fn widened(&self, extra: usize) -> Self {
        MappedGrid {
            u_max: self.u_max + extra as f64 * self.step(),
            n_points: self.n_points + extra,
            ..*self
        }
    }

    /// `-c d^2/dr^2 + V` after `psi = (dr/du)^(1/2) chi`, symmetrized with the
    /// weight `(dr/du)^2`. The left end carries `chi ~ e^((s - 1/2) u)`.
    fn matrix<V: Fn(f64) -> f64>(&self, v: &V, kinetic: f64, s: f64) -> Result<Tridiagonal> {
        let h = self.step();
        let k = kinetic / (h * h);
        let n = self.n_points;
        let f: Vec<f64> = (0..n).map(|i| self.jacobian(i)).collect();
        // ghost value chi_0 = rho chi_1
        let rho = (-(s - 0.5) * h).exp();
        let diag: Vec<f64> = (1..n - 1)
            .map(|i| {
                let sigma = logistic(self.u(i));
                let q = 0.25 * (1.0 - sigma * sigma);
                let stencil = if i == 1 { 2.0 - rho } else { 2.0 };
                (stencil * k + kinetic * q) / (f[i] * f[i]) + v(self.point(i))
            })
            .collect();
        let off: Vec<f64> = (1..n - 2).map(|i| -k / (f[i] * f[i + 1])).collect();
        Tridiagonal { diag, off }.checked(|i| self.point(i + 1))
    }

    /// `psi` at the interior nodes from a unit eigenvector of [`Self::matrix`].
    fn wavefunction(&self, y: &[f64]) -> Vec<f64> {
        let h = self.step();
        let norm = h.sqrt();
        y.iter()
            .enumerate()
            .map(|(j, v)| v / (self.jacobian(j + 1).sqrt() * norm))
            .collect()
    }
}

/// A bound-state problem on `(origin, infinity)` with the domain picked automatically.
///
/// The solver works on a [`MappedGrid`], so a power-law start
/// `psi ~ (r - origin)^s` becomes a smooth exponential and the O(h^2)
/// expansion behind the Richardson steps holds for fractional `s`. The
/// exponent is read off the potential, `s = 1/2 + sqrt(1/4 + g/c)` with
/// `g = lim (r - origin)^2 V`, which selects the regular solution.
pub struct HalfLineProblem<V> {
    pub potential: V,
    /// The singular point.
    pub origin: f64,
    pub kinetic: f64,
    /// Continuum threshold `V(infinity)`; only states below it are sought.
    pub ceiling: f64,
    /// Rough size of the potential's range; also the mapping scale `L`.
    pub length_scale: f64,
}

/// Left end of the mapped grid, in units of the length scale.
pub const LEFT_END: f64 = 1e-10;

/// Widest box probed for shallow states, in units of the length scale.
pub const EXPLORE_SPAN: f64 = 400.0;

impl<V: Fn(f64) -> f64> HalfLineProblem<V> {
    fn tail_start(&self, cfg: &OracleConfig) -> f64 {
        let tol = cfg.tail_tolerance * self.ceiling.abs().max(1.0);
        let mut span = self.length_scale;
        for _ in 0..40 {
            let r = self.origin + span;
            if ((self.potential)(r) - self.ceiling).abs() < tol {
                return r;
            }
            span *= 1.5;
        }
        self.origin + span
    }

    fn decay(&self, energy: f64) -> f64 {
        ((self.ceiling - energy) / self.kinetic).max(0.0).sqrt()
    }

    /// Leading exponent `s` of `psi ~ t^s` at the origin.
    pub fn left_exponent(&self) -> Result<f64> {
        let t = LEFT_END * self.length_scale;
        let g = t * t * (self.potential)(self.origin + t);
        let disc = 0.25 + g / self.kinetic;
        if !(disc >= 0.0) {
            return Err(Error::Numeric(format!(
                "potential falls to the centre: r^2 V -> {g:e} below -c/4"
            )));
        }
        Ok(0.5 + disc.sqrt())
    }

    fn mapped(&self, t_max: f64, n: usize) -> Result<MappedGrid> {
        MappedGrid::new(
            self.origin,
            self.length_scale,
            LEFT_END * self.length_scale,
            t_max,
            n,
        )
    }

    fn levels(&self, grid: &MappedGrid, s: f64) -> Result<Vec<f64>> {
        Ok(grid.matrix(&self.potential, self.kinetic, s)?.eigenvalues_below(self.ceiling))
    }

    /// Pick `r_max` and the resolution, returning the coarsest grid.
    ///
    /// Only states that survive doubling the box set `r_max`; a level
    /// quantized by the box itself would otherwise push it out without end.
    pub fn grid(&self, cfg: &OracleConfig) -> Result<MappedGrid> {
        check_kinetic(self.kinetic)?;
        if cfg.n_points > cfg.max_points {
            return Err(Error::Numeric(format!(
                "oracle grid of {} points exceeds the cap of {}",
                cfg.n_points, cfg.max_points
            )));
        }
        let s = self.left_exponent()?;
        let tail = self.tail_start(cfg) - self.origin;
        let (mut t_max, mut energies) = self.settle(tail, tail + self.length_scale, s, cfg)?;
        // A shallow state looks box-quantized until r_max is several decay
        // lengths out; probe wider boxes and keep one only if it adds a state.
        let mut probe = t_max;
        while probe < EXPLORE_SPAN * self.length_scale {
            probe *= 2.0;
            let (found, unstable) = self.stable_levels(probe, s, cfg)?;
            if found.len() > energies.len() {
                (t_max, energies) = self.settle(tail, probe, s, cfg)?;
                probe = t_max;
            } else if unstable == 0 {
                break;
            }
        }
        let coarse = self.mapped(t_max, cfg.n_points)?;
        let kappa_max = energies.first().map_or(0.0, |&e| self.decay(e));
        // dr <= L du beyond the knee; (s - 1/2) du resolves the power-law start
        let h_kappa = cfg.max_step_kappa / (kappa_max * self.length_scale).max(1e-300);
        let h_start = 0.1 / (s - 0.5).max(1.0);
        let h = h_kappa.min(h_start);
        let span = coarse.u_max - coarse.u_min;
        let wanted = (span / h).ceil() as usize + 1;
        let n = cfg.n_points.max(wanted);
        if n > cfg.max_points {
            return Err(Error::Numeric(format!(
                "oracle grid would need {n} points (cap {})",
                cfg.max_points
            )));
        }
        self.mapped(t_max, n)
    }

    /// Levels on `(0, t)` that move by under a tenth of their depth when the
    /// box doubles at the same step, and the number that move more.
    fn stable_levels(&self, t: f64, s: f64, cfg: &OracleConfig) -> Result<(Vec<f64>, usize)> {
        let mut narrow = self.levels(&self.mapped(t, cfg.n_points)?, s)?;
        let wide = self.levels(&self.mapped(2.0 * t, 2 * cfg.n_points)?, s)?;
        let stable = narrow
            .iter()
            .zip(&wide)
            .take_while(|(a, b)| (*a - *b).abs() <= 0.1 * (self.ceiling - *a))
            .count();
        let unstable = narrow.len() - stable;
        narrow.truncate(stable);
        Ok((narrow, unstable))
    }

    /// Grow `t` from `start` until it covers `tail_decay` decay lengths of
    /// the shallowest stable level and that level count stops changing.
    fn settle(&self, tail: f64, start: f64, s: f64, cfg: &OracleConfig) -> Result<(f64, Vec<f64>)> {
        let mut t_max = start;
        let mut prev_count = None;
        let mut energies = Vec::new();
        for _ in 0..12 {
            energies = self.stable_levels(t_max, s, cfg)?.0;
            let needed = match energies.last() {
                Some(&e) => tail + cfg.tail_decay / self.decay(e).max(1e-300),
                None => t_max,
            };
            if t_max >= needed && prev_count == Some(energies.len()) {
                break;
            }
            prev_count = Some(energies.len());
            t_max = t_max.max(needed);
        }
        Ok((t_max, energies))
    }

    /// Extrapolated eigenvalues of the states that do not depend on `r_max`.
    pub fn solve(&self, cfg: &OracleConfig) -> Result<OracleSpectrum> {
        Ok(self.solve_on(cfg)?.0)
    }

    fn solve_on(&self, cfg: &OracleConfig) -> Result<(OracleSpectrum, MappedGrid, f64)> {
        let grid = self.grid(cfg)?;
        let s = self.left_exponent()?;
        let levels = [
            self.levels(&grid, s)?,
            self.levels(&grid.refined(2), s)?,
            self.levels(&grid.refined(4), s)?,
        ];
        let mut spec = richardson(levels, grid.refined(4).n_points());
        let below = spec.energies.iter().take_while(|&&e| e < self.ceiling).count();
        let keep = self.box_independent(&grid, s)?.min(below);
        if keep < spec.energies.len() {
            spec.warnings.push(format!(
                "{} state(s) at threshold move with r_max; discarded",
                spec.energies.len() - keep
            ));
            spec.energies.truncate(keep);
            spec.doubling_shift.truncate(keep);
        }
        Ok((spec, grid, s))
    }

    /// How many of the lowest eigenvalues on `grid` survive widening the
    /// box by half at the same step. A state at threshold is quantized by
    /// the box and moves like `1/r_max^2`; a bound state is fixed to within
    /// its exponential tail.
    fn box_independent(&self, grid: &MappedGrid, s: f64) -> Result<usize> {
        let narrow = self.levels(grid, s)?;
        let wide = self.levels(&grid.widened((grid.n_points() - 1) / 2), s)?;
        Ok(narrow
            .iter()
            .zip(&wide)
            .take_while(|(a, b)| (*a - *b).abs() <= BOX_TOLERANCE * (self.ceiling - *a).abs())
            .count())
    }

    /// Extrapolated eigenvalues plus eigenfunctions on the finest grid,
    /// normalized in `r` and sampled at the interior nodes.
    pub fn solve_states(&self, cfg: &OracleConfig) -> Result<(OracleSpectrum, Vec<NumericState>)> {
        let (spec, grid, s) = self.solve_on(cfg)?;
        let fine = grid.refined(4);
        let t = fine.matrix(&self.potential, self.kinetic, s)?;
        let raw: Vec<f64> = t.eigenvalues_below(self.ceiling).into_iter().take(spec.energies.len()).collect();
        let points: Vec<f64> = (1..fine.n_points() - 1).map(|i| fine.point(i)).collect();
        let states = t
            .eigenvectors(&raw)?
            .into_iter()
            .zip(&spec.energies)
            .map(|(y, &energy)| {
                let mut values = fine.wavefunction(&y);
                orient(&mut values);
                NumericState {
                    energy,
                    points: points.clone(),
                    values,
                }
            })
            .collect();
        Ok((spec, states))
    }
}

// Gauss-Kronrod 7/15 nodes and weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut fv = [(0.0, 0.0); 7];
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        fv[j] = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    // QUADPACK error scaling: ((200 |K - G|) / resasc)^1.5 relative to
    // resasc = int |f - mean|, floored at round-off
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let h_abs = h.abs();
    let (abs, asc) = (abs * h_abs, asc * h_abs);
    let mut error = ((kron - gauss) * h).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs);
    }
    Segment {
        a,
        b,
        value: kron * h,
        error,
        abs,
    }
}

/// Largest number of subintervals before giving up.
const MAX_SEGMENTS: usize = 20_000;

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]` to relative `rel_tol`.
///
/// For integrals that nearly cancel the target is `rel_tol` times one
/// hundredth of `int |f|`.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    quadrature_over(&f, &[a, b], rel_tol)
}

/// [`quadrature`] with an initial partition at `breaks` (sorted, at least two).
pub fn quadrature_over<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], rel_tol: f64) -> Result<f64> {
    if breaks.len() < 2 {
        return Err(Error::Domain("quadrature needs an interval".into()));
    }
    let mut segs: Vec<Segment> = breaks.windows(2).map(|w| gk15(f, w[0], w[1])).collect();
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let abs: f64 = segs.iter().map(|s| s.abs).sum();
        if !total.is_finite() {
            return Err(Error::Numeric("integrand is not finite".into()));
        }
        if err <= rel_tol * total.abs().max(1e-2 * abs) || err == 0.0 {
            return Ok(total);
        }
        if segs.len() >= MAX_SEGMENTS {
            return Err(Error::Numeric(format!(
                "quadrature did not converge: error {err:.3e} on {total:.6e}"
            )));
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            return Err(Error::Numeric("quadrature interval underflow".into()));
        }
        segs.push(gk15(f, s.a, mid));
        segs.push(gk15(f, mid, s.b));
    }
}

/// `int_{a}^{inf} f` for an integrand with an exponentially decaying tail.
///
/// The cutoff is where `|f|` has stayed below 1e-17 of its largest sampled
/// value for three successive doublings; `length_scale` sets the sampling.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    length_scale: f64,
    rel_tol: f64,
) -> Result<f64> {
    let mut breaks = vec![a];
    for k in -8..=0 {
        let r = a + length_scale * 10f64.powi(k);
        breaks.push(r);
    }
    let mut peak = breaks.iter().skip(1).map(|&r| f(r).abs()).fold(0.0, f64::max);
    let mut quiet = 0;
    let mut span = length_scale;
    for _ in 0..200 {
        span *= 1.4;
        let r = a + span;
        let v = f(r).abs();
        if !v.is_finite() {
            return Err(Error::Numeric(format!("integrand not finite at {r}")));
        }
        peak = peak.max(v);
        breaks.push(r);
        if v <= 1e-17 * peak {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if quiet < 3 {
        return Err(Error::Numeric("integrand tail does not decay".into()));
    }
    quadrature_over(&f, &breaks, rel_tol)
}

/// `max |-c psi'' + (V - E) psi| / max |psi|` over the grid interior,
/// with `psi''` from the five-point stencil on the grid spacing.
pub fn ode_residual<V, P>(v: V, energy: f64, psi: P, grid: &Grid, kinetic: f64) -> f64
where
    V: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let h = grid.step();
    let vals: Vec<f64> = grid.points().map(&psi).collect();
    let sup = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut worst = 0.0f64;
    for i in 2..vals.len() - 2 {
        let d2 = (-vals[i + 2] + 16.0 * vals[i + 1] - 30.0 * vals[i] + 16.0 * vals[i - 1]
            - vals[i - 2])
            / (12.0 * h * h);
        let res = -kinetic * d2 + (v(grid.point(i)) - energy) * vals[i];
        worst = worst.max(res.abs());
    }
    worst / sup
}

/// Residual of `psi` at each of `points`, with the stencil step chosen per point.
///
/// At `x` the five-point second difference is taken for steps
/// `h = f / k(x)`, `f` over a ladder from `1e-3` to `0.2`, where
/// `k = sqrt(|V - E| / c)` plus `1 / (x - edge)`. The step is
/// capped at `(x - edge) / 3` so the stencil stays in the domain. The same
/// ladder is also applied in `u = ln(x - edge)` with a nine-point stencil at
/// steps `f / (k (x - edge))`, using `psi'' = (phi_uu - phi_u) / (x - edge)^2`;
/// this resolves power laws `(x - edge)^s` at the edge, which no uniform step
/// can. The reported residual at `x` is the smallest over both ladders:
/// roundoff grows like `h^-2` and truncation like a power of `h`, and neither
/// meets the exact residual by chance at every step. Returns `(max |residual|, max |psi|)`.
pub fn adaptive_residual<V, P>(
    v: V,
    energy: f64,
    psi: P,
    points: &[f64],
    edge: f64,
    kinetic: f64,
) -> (f64, f64)
where
    V: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    const LADDER: [f64; 9] = [1e-3, 2e-3, 4e-3, 8e-3, 0.016, 0.032, 0.064, 0.125, 0.2];
    // eighth-order central weights, offsets 0..=4
    const D2_8: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    const D1_8: [f64; 5] = [0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let (mut worst, mut sup) = (0.0f64, 0.0f64);
    for &x in points {
        let p0 = psi(x);
        sup = sup.max(p0.abs());
        let gap = x - edge;
        let k = ((v(x) - energy).abs() / kinetic).sqrt() + 1.0 / gap;
        let pot = (v(x) - energy) * p0;
        let uniform = LADDER.iter().map(|f| (f / k).min(gap / 3.0)).map(|h| {
            let d2 = (-psi(x + 2.0 * h) + 16.0 * psi(x + h) - 30.0 * p0 + 16.0 * psi(x - h)
                - psi(x - 2.0 * h))
                / (12.0 * h * h);
            (-kinetic * d2 + pot).abs()
        });
        let logarithmic = LADDER.iter().map(|f| f / (k * gap)).map(|h| {
            let (mut duu, mut du) = (D2_8[0] * p0, 0.0);
            for j in 1..=4 {
                let plus = psi(edge + gap * (j as f64 * h).exp());
                let minus = psi(edge + gap * (-(j as f64) * h).exp());
                duu += D2_8[j] * (plus + minus);
                du += D1_8[j] * (plus - minus);
            }
            let (duu, du) = (duu / (h * h), du / h);
            (-kinetic * (duu - du) / (gap * gap) + pot).abs()
        });
        let best = uniform.chain(logarithmic).fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    (worst, sup)
}

pub fn residual_grid<V: Fn(f64) -> f64>(v: V, e: f64, lo: f64, hi: f64) -> Result<Grid> {
    let kappa = (0..=2000)
        .map(|k| (v(lo + (hi - lo) * k as f64 / 2000.0) - e).abs().sqrt())
        .fold(0.0f64, f64::max);
    let h = (0.01 / kappa.max(1e-12)).min((hi - lo) / 1000.0);
    let n = ((hi - lo) / h).ceil() as usize + 1;
    Grid::new(lo, hi, n.max(Grid::MIN_POINTS))
}

/// Sign changes in a sampled function, ignoring values below `1e-10` of the maximum.
pub fn sign_changes(values: &[f64]) -> usize {
    let max = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= 1e-10 * max {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            changes += 1;
        }
        last = v.signum();
    }
    changes
}

/// `|<a, b>| / (|a| |b|)` for two sampled functions.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot.abs() / (na * nb)
}

/// `n_log` log-spaced points on `[lo, knee]` followed by `n_lin` linear points on `(knee, hi]`.
pub fn mixed_points(lo: f64, knee: f64, hi: f64, n_log: usize, n_lin: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_log + n_lin);
    let (l0, l1) = (lo.ln(), knee.ln());
    for i in 0..n_log {
        let t = i as f64 / (n_log.max(2) - 1) as f64;
        out.push((l0 + t * (l1 - l0)).exp());
    }
    for i in 1..=n_lin {
        out.push(knee + (hi - knee) * i as f64 / n_lin as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 0.5, 1000).is_err());
        assert!(Grid::new(0.0, 1.0, 10).is_err());
        let g = Grid::new(0.0, 1.0, 201).unwrap();
        assert!((g.step() - 0.005).abs() < 1e-15);
        assert_eq!(g.refined(2).n_points(), 401);
        assert_eq!(g.point(200), 1.0);
    }

    #[test]
    fn half_line_oscillator_selects_odd_states() {
        let grid = Grid::new(1e-6, 12.0, 4001).unwrap();
        let spec = extrapolated_spectrum(|r| 0.5 * r * r, &grid, 0.5, 5.0).unwrap();
        assert_eq!(spec.energies.len(), 2);
        assert!((spec.energies[0] - 1.5).abs() < 1e-4);
        assert!((spec.energies[1] - 3.5).abs() < 1e-4);
    }

    #[test]
    fn eigenvectors_are_normalized_oscillator_states() {
        let grid = Grid::new(0.0, 10.0, 4001).unwrap();
        let states = solve_bound_states(|r| 0.5 * r * r, &grid, 0.5, 2.0).unwrap();
        assert_eq!(states.len(), 1);
        let exact: Vec<f64> = grid.points().map(|r| r * (-0.5 * r * r).exp()).collect();
        assert!(correlation(&states[0].values, &exact) > 1.0 - 1e-6);
        let h = grid.step();
        let norm: f64 = h * states[0].values.iter().map(|x| x * x).sum::<f64>();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_basics() {
        assert!((quadrature(|_| 1.0, 0.0, 1.0, 1e-12).unwrap() - 1.0).abs() < 1e-14);
        let v = integrate_to_infinity(|r| (-2.0 * r).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let s = quadrature(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn residual_of_exact_and_perturbed_solutions() {
        let grid = Grid::new(0.0, 10.0, 10_001).unwrap();
        let c = 0.5;
        let r = ode_residual(|_| 0.0, c, |x| x.sin(), &grid, c);
        assert!(r < 1e-6, "{r}");
        let r = ode_residual(|_| 0.0, c + 0.1, |x| x.sin(), &grid, c);
        assert!(r > 1e-2);
    }

    fn eckart_problem(a: f64, b: f64, alpha: f64) -> HalfLineProblem<impl Fn(f64) -> f64> {
        HalfLineProblem {
            potential: move |r: f64| {
                a * (a - alpha) / (alpha * r).sinh().powi(2) - 2.0 * b / (alpha * r).tanh()
            },
            origin: 0.0,
            kinetic: 1.0,
            ceiling: -2.0 * b,
            length_scale: 1.0 / alpha,
        }
    }

    #[test]
    fn mapped_grid_handles_fractional_exponents() {
        for (a, b, alpha) in [(0.7, 4.0, 1.0), (1.3, 6.0, 0.8), (2.0, 9.0, 1.0)] {
            let p = eckart_problem(a, b, alpha);
            assert!((p.left_exponent().unwrap() - a / alpha).abs() < 1e-8);
            let spec = p.solve(&OracleConfig::default()).unwrap();
            let exact: Vec<f64> = (0..)
                .map(|n| a + n as f64 * alpha)
                .take_while(|k| k * k < b)
                .map(|k| -k * k - b * b / (k * k))
                .collect();
            assert_eq!(spec.energies.len(), exact.len(), "{:?}", spec.energies);
            for (e, x) in spec.energies.iter().zip(&exact) {
                assert!((e - x).abs() < 1e-7 * x.abs(), "{e} vs {x}");
            }
        }
    }

    #[test]
    fn mapped_eigenvectors_are_normalized() {
        let p = eckart_problem(1.5, 6.0, 1.0);
        let (_, states) = p.solve_states(&OracleConfig::default()).unwrap();
        for st in &states {
            let norm: f64 = st
                .points
                .windows(2)
                .zip(st.values.windows(2))
                .map(|(r, v)| 0.5 * (r[1] - r[0]) * (v[0] * v[0] + v[1] * v[1]))
                .sum();
            assert!((norm - 1.0).abs() < 1e-6, "{norm}");
        }
    }

    #[test]
    fn attractive_inverse_square_beyond_limit_is_rejected() {
        let p = HalfLineProblem {
            potential: |r: f64| -0.3 / (r * r),
            origin: 0.0,
            kinetic: 1.0,
            ceiling: 0.0,
            length_scale: 1.0,
        };
        assert!(p.left_exponent().is_err());
    }

    #[test]
    fn adaptive_residual_separates_exact_and_perturbed_solutions() {
        // hydrogen-like ground state r e^{-r} of -psi'' - (2/r) psi, E = -1
        let pts = mixed_points(1e-4, 1.0, 30.0, 200, 500);
        let psi = |r: f64| r * (-r).exp();
        let v = |r: f64| -2.0 / r;
        let (w, sup) = adaptive_residual(v, -1.0, psi, &pts, 0.0, 1.0);
        assert!(w / sup < 1e-8, "{}", w / sup);
        let (w, sup) = adaptive_residual(v, -1.01, psi, &pts, 0.0, 1.0);
        assert!(w / sup > 1e-3);
    }

    #[test]
    fn sign_change_counting() {
        assert_eq!(sign_changes(&[0.0, 1.0, 2.0, -1.0, -3.0, 0.0, 2.0]), 2);
        assert_eq!(sign_changes(&[1.0, 1e-14, -1e-14, 1.0]), 0);
    }
}
