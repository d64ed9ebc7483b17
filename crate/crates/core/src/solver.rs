//! Equilibrium by minimisation of the total potential energy.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::contact::DiagonalContactState;
use crate::energy::{BearingModel, EnergyBreakdown, LoadCase, Phase, Problem};
use crate::error::{Error, Result};
use crate::geometry::{Kinematics, RigidBodyPose};

/// Descent method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Levenberg-Marquardt damped Newton on the analytic Hessian.
    #[default]
    Newton,
    /// Limited-memory BFGS.
    Lbfgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Infinity norm of the gradient, N (rotations scaled by the pitch radius).
    pub gradient_tolerance: f64,
    /// Infinity norm of the next step, mm.
    pub step_tolerance: f64,
    pub max_iterations: usize,
    pub method: Method,
    /// Sufficient-decrease constant of the backtracking line search.
    pub armijo: f64,
    /// Step reduction per backtrack.
    pub backtrack: f64,
    pub max_backtracks: usize,
    pub lbfgs_memory: usize,
    /// Longest trial step, mm; longer search directions are shortened.
    pub max_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gradient_tolerance: 1e-4,
            step_tolerance: 1e-10,
            max_iterations: 500,
            method: Method::Newton,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            lbfgs_memory: 20,
            max_step: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gradient_tolerance > 0.0
            && self.step_tolerance > 0.0
            && self.max_iterations > 0
            && self.armijo > 0.0
            && self.armijo < 0.5
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.lbfgs_memory > 0
            && self.max_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid solver settings: {self:?}")))
        }
    }
}

/// Outcome of one minimisation.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_inf: f64,
    pub step_inf: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest ratio `|g_i| / tol_i`.
fn scaled_norm(g: &[f64], tol: &[f64]) -> f64 {
    g.iter().zip(tol).fold(0.0, |m, (x, t)| m.max(x.abs() / t))
}

/// Minimises the energy of `problem` from `x0`.
///
/// Converged when every gradient entry is within its tolerance and the next
/// step is below the step tolerance. `tolerance` holds one entry per state
/// component.
pub fn minimize(problem: &Problem<'_, f64>, x0: &[f64], tolerance: &[f64], config: &SolverConfig) -> Result<Minimum> {
    config.validate()?;
    let mut x = x0.to_vec();
    problem.project(&mut x);
    if x.is_empty() {
        return Ok(Minimum {
            x,
            iterations: 0,
            converged: true,
            gradient_inf: 0.0,
            step_inf: 0.0,
        });
    }
    match config.method {
        Method::Newton => newton(problem, x, tolerance, config),
        Method::Lbfgs => lbfgs(problem, x, tolerance, config),
    }
}

fn projected_gradient(problem: &Problem<'_, f64>, x: &[f64]) -> Result<Vec<f64>> {
    let mut g = problem.gradient(x)?;
    problem.project(&mut g);
    Ok(g)
}

/// `P H P + s (I - P)` with `P` the projector off the ring rigid motions.
fn projected_hessian(problem: &Problem<'_, f64>, h: DMatrix<f64>) -> DMatrix<f64> {
    let n = h.nrows();
    let dirs = problem.model.rigid_directions(n, problem.pose_len());
    if dirs.is_empty() {
        return h;
    }
    let q = DMatrix::from_fn(n, dirs.len(), |i, j| dirs[j][i]);
    let hq = &h * &q;
    let qhq = q.transpose() * &hq;
    let s = (0..n).map(|i| h[(i, i)].abs()).sum::<f64>() / n as f64;
    let mut out = h - &q * hq.transpose() - &hq * q.transpose() + &q * qhq * q.transpose();
    out += &q * q.transpose() * s.max(1.0);
    out
}

/// Line search along `p` from `x`; returns the accepted point and step factor.
fn backtrack(
    problem: &Problem<'_, f64>,
    x: &[f64],
    e0: f64,
    g: &[f64],
    p: &[f64],
    tolerance: &[f64],
    config: &SolverConfig,
) -> Result<Option<(Vec<f64>, f64, f64)>> {
    let slope: f64 = g.iter().zip(p).map(|(a, b)| a * b).sum();
    if !(slope < 0.0) {
        return Ok(None);
    }
    let g0 = scaled_norm(g, tolerance);
    let mut t = (config.max_step / inf_norm(p)).min(1.0);
    for _ in 0..=config.max_backtracks {
        let mut xn: Vec<f64> = x.iter().zip(p).map(|(a, b)| a + t * b).collect();
        problem.project(&mut xn);
        let en = problem.energy(&xn)?;
        if en.is_finite() {
            if en <= e0 + config.armijo * t * slope {
                return Ok(Some((xn, t, en)));
            }
            // energy differences drown in round-off near the minimum; accept
            // a step that does not raise the energy beyond that noise and
            // reduces the gradient. The total is a small difference of large
            // contact, ring and load terms, so the noise scales with those.
            let parts = problem.breakdown(&xn)?;
            let magnitude = parts.contact.abs() + parts.rings.abs() + parts.loads.abs();
            let noise = 1e-11 * magnitude.max(e0.abs()).max(1e-300);
            if en <= e0 + noise {
                let gn = projected_gradient(problem, &xn)?;
                if scaled_norm(&gn, tolerance) < g0 {
                    return Ok(Some((xn, t, en)));
                }
            }
        }
        t *= config.backtrack;
    }
    Ok(None)
}

fn newton(problem: &Problem<'_, f64>, mut x: Vec<f64>, tolerance: &[f64], config: &SolverConfig) -> Result<Minimum> {
    let n = x.len();
    let mut lambda = 1e-12;
    let mut energy = problem.energy(&x)?;
    let mut g = projected_gradient(problem, &x)?;
    let mut step_inf = f64::INFINITY;
    for it in 0..config.max_iterations {
        let h = projected_hessian(problem, problem.hessian(&x)?);
        let scale = (0..n).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
        let rhs = -DVector::from_column_slice(&g);
        let mut p = None;
        while lambda < 1e12 {
            let mut m = h.clone();
            for i in 0..n {
                m[(i, i)] += lambda * scale;
            }
            if let Some(ch) = m.cholesky() {
                p = Some(ch.solve(&rhs));
                break;
            }
            lambda *= 10.0;
        }
        let Some(p) = p else {
            return Err(Error::Solver("damped Hessian not positive definite".into()));
        };
        let mut p: Vec<f64> = p.iter().copied().collect();
        problem.project(&mut p);
        step_inf = inf_norm(&p);
        let grad_ok = scaled_norm(&g, tolerance) <= 1.0;
        if grad_ok && step_inf <= config.step_tolerance {
            return Ok(Minimum {
                x,
                iterations: it,
                converged: true,
                gradient_inf: inf_norm(&g),
                step_inf,
            });
        }
        match backtrack(problem, &x, energy, &g, &p, tolerance, config)? {
            Some((xn, t, en)) => {
                x = xn;
                energy = en;
                g = projected_gradient(problem, &x)?;
                lambda = if t == 1.0 { (lambda * 0.1).max(1e-15) } else { lambda * 4.0 };
            }
            None if grad_ok => {
                // no further descent is resolvable at this precision
                log::debug!("line search stalled with the gradient inside tolerance");
                return Ok(Minimum {
                    x,
                    iterations: it,
                    converged: step_inf <= config.step_tolerance * 1e3,
                    gradient_inf: inf_norm(&g),
                    step_inf,
                });
            }
            None => {
                lambda *= 100.0;
                if lambda >= 1e12 {
                    break;
                }
            }
        }
    }
    Ok(Minimum {
        gradient_inf: inf_norm(&g),
        x,
        iterations: config.max_iterations,
        converged: false,
        step_inf,
    })
}

fn lbfgs(problem: &Problem<'_, f64>, mut x: Vec<f64>, tolerance: &[f64], config: &SolverConfig) -> Result<Minimum> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut energy = problem.energy(&x)?;
    let mut g = projected_gradient(problem, &x)?;
    let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = Default::default();
    let mut step_inf = f64::INFINITY;
    // initial inverse-Hessian scale from the diagonal of the Hessian
    let h0 = problem.hessian(&x)?;
    let mut gamma = 1.0 / (0..x.len()).map(|i| h0[(i, i)]).fold(1.0, f64::max);
    for it in 0..config.max_iterations {
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut p: Vec<f64> = q.iter().map(|v| -v).collect();
        problem.project(&mut p);
        step_inf = inf_norm(&p);
        let grad_ok = scaled_norm(&g, tolerance) <= 1.0;
        if grad_ok && step_inf <= config.step_tolerance {
            return Ok(Minimum {
                x,
                iterations: it,
                converged: true,
                gradient_inf: inf_norm(&g),
                step_inf,
            });
        }
        let accepted = match backtrack(problem, &x, energy, &g, &p, tolerance, config)? {
            Some(v) => Some(v),
            None => {
                // restart along the scaled steepest descent
                hist.clear();
                let p: Vec<f64> = g.iter().map(|v| -gamma * v).collect();
                backtrack(problem, &x, energy, &g, &p, tolerance, config)?
            }
        };
        let Some((xn, _, en)) = accepted else {
            return Ok(Minimum {
                converged: grad_ok && step_inf <= config.step_tolerance * 1e3,
                x,
                iterations: it,
                gradient_inf: inf_norm(&g),
                step_inf,
            });
        };
        let gn = projected_gradient(problem, &xn)?;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            gamma = sy / dot(&y, &y);
            hist.push_back((s, y, 1.0 / sy));
            if hist.len() > config.lbfgs_memory {
                hist.pop_front();
            }
        }
        x = xn;
        g = gn;
        energy = en;
    }
    Ok(Minimum {
        gradient_inf: inf_norm(&g),
        x,
        iterations: config.max_iterations,
        converged: false,
        step_inf,
    })
}

/// One diagonal of one ball at the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    /// 1 for contacts 1-3, 2 for contacts 2-4.
    pub diagonal: usize,
    pub delta_total: f64,
    /// Interference of the first and second contact of the diagonal.
    pub delta: [f64; 2],
    pub stiffness: [f64; 2],
    pub k_total: f64,
    pub force: f64,
    pub contact_angle: f64,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    /// 1-based.
    pub ball: usize,
    pub azimuth: f64,
    pub diagonals: [DiagonalReport; 2],
}

/// `∂(U_contact + U_rings)/∂(δ_a, δ_r, θ_t)` against the applied loads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub reactions: [f64; 3],
    pub loads: [f64; 3],
    pub residuals: [f64; 3],
    /// `1e-4 max(|load|, 1)` per component.
    pub tolerances: [f64; 3],
    pub satisfied: bool,
}

impl Equilibrium {
    pub fn new(reactions: [f64; 3], loads: [f64; 3]) -> Self {
        let residuals = std::array::from_fn(|i| reactions[i] - loads[i]);
        let tolerances = loads.map(equilibrium_tolerance);
        let satisfied = (0..3).all(|i| residuals[i].abs() <= tolerances[i]);
        Self {
            reactions,
            loads,
            residuals,
            tolerances,
            satisfied,
        }
    }
}

fn equilibrium_tolerance(load: f64) -> f64 {
    1e-4 * load.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// No contact closed: the ring position is indeterminate.
    FloatingRing,
    /// Fewer than three balls carry load.
    FewActiveBalls { active: usize },
    NotConverged,
    EquilibriumResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub phase: Phase,
    pub flexible: bool,
    pub kinematics: Kinematics,
    pub converged: bool,
    pub iterations: usize,
    /// Length of the state vector that was optimised.
    pub variables: usize,
    pub gradient_inf: f64,
    pub step_inf: f64,
    pub pose: RigidBodyPose<f64>,
    pub elastic_outer: Vec<f64>,
    pub elastic_inner: Vec<f64>,
    pub energy: EnergyBreakdown<f64>,
    pub load: LoadCase<f64>,
    /// Loads the bearing resists at this state, `[F_a, F_r, M_t]`.
    pub reactions: [f64; 3],
    pub equilibrium: Option<Equilibrium>,
    pub balls: Vec<BallReport>,
    pub warnings: Vec<Warning>,
    pub state: Vec<f64>,
}

impl Solution {
    pub fn active_balls(&self) -> usize {
        self.balls.iter().filter(|b| b.diagonals.iter().any(|d| d.active)).count()
    }

    /// `(ball, diagonal)` interferences in ball-major order.
    pub fn interferences(&self) -> impl Iterator<Item = f64> + '_ {
        self.balls.iter().flat_map(|b| b.diagonals.iter().map(|d| d.delta_total))
    }

    pub fn forces(&self) -> impl Iterator<Item = f64> + '_ {
        self.balls.iter().flat_map(|b| b.diagonals.iter().map(|d| d.force))
    }

    pub fn max_force(&self) -> f64 {
        self.forces().fold(0.0, f64::max)
    }
}

fn report(problem: &Problem<'_, f64>, min: Minimum) -> Result<Solution> {
    let x = &min.x;
    let model = problem.model;
    let pose = problem.pose(x);
    let states = problem.diagonals(x)?;
    let mut balls = Vec::with_capacity(states.len());
    for (b, st) in states.iter().enumerate() {
        let diagonals = [0, 1].map(|d| {
            let s = &st[d];
            let c: &DiagonalContactState<f64> = &s.contact;
            DiagonalReport {
                diagonal: d + 1,
                delta_total: c.delta_total,
                delta: [c.delta.0, c.delta.1],
                stiffness: if c.active { [c.stiffness.0, c.stiffness.1] } else { [0.0; 2] },
                k_total: c.k_total,
                force: c.force,
                contact_angle: s.direction.1.abs().atan2(s.direction.0.abs()),
                active: c.active,
            }
        });
        balls.push(BallReport {
            ball: b + 1,
            azimuth: model.initial_centers().azimuth[b],
            diagonals,
        });
    }
    let (outer, inner) = problem
        .elastic(x)
        .map_or((Vec::new(), Vec::new()), |(o, i)| (o.to_vec(), i.to_vec()));
    let reactions = problem.reactions(x)?;
    let equilibrium = (problem.phase == Phase::Loaded).then(|| Equilibrium::new(reactions, problem.load.generalized()));
    let mut sol = Solution {
        phase: problem.phase,
        flexible: model.is_flexible(),
        kinematics: model.kinematics,
        converged: min.converged,
        iterations: min.iterations,
        variables: x.len(),
        gradient_inf: min.gradient_inf,
        step_inf: min.step_inf,
        pose,
        elastic_outer: outer,
        elastic_inner: inner,
        energy: problem.breakdown(x)?,
        load: problem.load,
        reactions,
        equilibrium,
        balls,
        warnings: Vec::new(),
        state: min.x,
    };
    let active = sol.active_balls();
    if active == 0 {
        sol.warnings.push(Warning::FloatingRing);
    } else if active < 3 {
        sol.warnings.push(Warning::FewActiveBalls { active });
    }
    if !sol.converged {
        sol.warnings.push(Warning::NotConverged);
    }
    if sol.equilibrium.is_some_and(|e| !e.satisfied) {
        sol.warnings.push(Warning::EquilibriumResidual);
    }
    for w in &sol.warnings {
        log::warn!("{} solve: {w:?}", sol.phase.as_str());
    }
    Ok(sol)
}

fn tolerances(problem: &Problem<'_, f64>, config: &SolverConfig) -> Vec<f64> {
    let mut tol = vec![config.gradient_tolerance; problem.len()];
    if problem.phase == Phase::Loaded {
        // the equilibrium identities are stated per load component
        let scale = problem.model.rotation_scale();
        let loads = problem.load.generalized();
        for i in 0..3 {
            let per = if i == 2 { scale } else { 1.0 };
            tol[i] = tol[i].min(equilibrium_tolerance(loads[i]) / per);
        }
    }
    tol
}

/// Idling equilibrium from the zero state.
pub fn solve_idle(model: &BearingModel<f64>, config: &SolverConfig) -> Result<Solution> {
    let problem = Problem::idle(model);
    let x0 = vec![0.0; problem.len()];
    let min = minimize(&problem, &x0, &tolerances(&problem, config), config)?;
    report(&problem, min)
}

fn require_idle(model: &BearingModel<f64>, idle: &Solution) -> Result<()> {
    if idle.phase != Phase::Idle {
        return Err(Error::Solver("expected an idling solution".into()));
    }
    if !idle.converged {
        return Err(Error::Solver("idling solution did not converge".into()));
    }
    if idle.flexible != model.is_flexible() || idle.balls.len() != model.ball_count() {
        return Err(Error::Solver("idling solution belongs to a different model".into()));
    }
    Ok(())
}

/// Loaded equilibrium, starting from and keeping the idling pose.
pub fn solve_loaded(model: &BearingModel<f64>, idle: &Solution, load: &LoadCase<f64>, config: &SolverConfig) -> Result<Solution> {
    require_idle(model, idle)?;
    let problem = Problem::loaded(model, &idle.pose, *load);
    let mut x0 = vec![0.0; problem.len()];
    x0[3..].copy_from_slice(&idle.state[5..]);
    let min = minimize(&problem, &x0, &tolerances(&problem, config), config)?;
    report(&problem, min)
}

/// State at imposed `[δ_a, δ_r, θ_t]`: the rings relax, the pose is held.
/// The reactions of the solution are the loads needed to hold it.
pub fn solve_imposed(
    model: &BearingModel<f64>,
    idle: &Solution,
    imposed: [f64; 3],
    load_direction: f64,
    config: &SolverConfig,
) -> Result<Solution> {
    require_idle(model, idle)?;
    imposed_from(model, idle, imposed, load_direction, &idle.state[5..], config)
}

fn imposed_from(
    model: &BearingModel<f64>,
    idle: &Solution,
    imposed: [f64; 3],
    load_direction: f64,
    elastic: &[f64],
    config: &SolverConfig,
) -> Result<Solution> {
    let mut pose = idle.pose;
    pose.axial = imposed[0];
    pose.radial = imposed[1];
    pose.tilt = imposed[2];
    pose.load_direction = load_direction;
    let problem = Problem::imposed(model, &pose);
    let min = minimize(&problem, elastic, &tolerances(&problem, config), config)?;
    report(&problem, min)
}

/// One point of an axial load-deflection curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub axial_displacement: f64,
    pub axial_force: f64,
    /// `dF_a / dδ_a`, N/mm.
    pub stiffness: f64,
    pub converged: bool,
}

/// Axial force and stiffness over a sorted grid of imposed axial displacements.
pub fn axial_stiffness_curve(
    model: &BearingModel<f64>,
    idle: &Solution,
    grid: &[f64],
    config: &SolverConfig,
) -> Result<Vec<CurvePoint>> {
    require_idle(model, idle)?;
    if grid.is_empty() {
        return Err(Error::Config("empty displacement grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("displacement grid must be strictly increasing".into()));
    }
    let mut elastic = idle.state[5..].to_vec();
    let mut forces = Vec::with_capacity(grid.len());
    let mut converged = Vec::with_capacity(grid.len());
    for &da in grid {
        let sol = imposed_from(model, idle, [da, 0.0, 0.0], 0.0, &elastic, config)?;
        elastic.clone_from(&sol.state);
        forces.push(sol.reactions[0]);
        converged.push(sol.converged);
    }
    let stiffness = derivative(grid, &forces);
    Ok((0..grid.len())
        .map(|i| CurvePoint {
            axial_displacement: grid[i],
            axial_force: forces[i],
            stiffness: stiffness[i],
            converged: converged[i],
        })
        .collect())
}

/// Derivative of a sampled curve: three-point formula on a non-uniform
/// grid, one-sided at the ends.
pub fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![f64::NAN; n];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (y[1] - y[0]) / (x[1] - x[0])
            } else if i == n - 1 {
                (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2])
            } else {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                (y[i + 1] * h0 * h0 - y[i - 1] * h1 * h1 + y[i] * (h1 * h1 - h0 * h0)) / (h0 * h1 * (h0 + h1))
            }
        })
        .collect()
}
