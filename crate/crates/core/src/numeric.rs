//! Floating-point cross-check of first integrals: fixed-step RK4 on the
//! Euler-Lagrange equations and drift measurement along the trajectory.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{JetSpace, VarId};
use crate::noether::ConservationLaw;
use crate::variational::{reduce_mod_el, ELSystem};

/// Number of seeded initial conditions used by [`check_laws`].
pub const RUNS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    pub step: f64,
    pub horizon: f64,
    /// Bound on the relative drift `max|I(t) - I(0)| / max(1, |I(0)|)`.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { step: 1e-3, horizon: 10.0, tolerance: 1e-8, seed: 42 }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {}", self.step)));
        }
        if !(self.horizon >= 10.0 * self.step && self.horizon.is_finite()) {
            return Err(Error::InvalidConfig(format!("horizon {} must be at least 10 steps", self.horizon)));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.step).round() as usize
    }
}

/// A polynomial compiled to direct monomial evaluation over a slice indexed
/// by variable id.
#[derive(Debug, Clone)]
pub struct Compiled {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl Compiled {
    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, factors)| factors.iter().fold(*c, |acc, &(i, e)| acc * values[i].powi(e)))
            .sum()
    }

    /// Variable slots read by [`Compiled::eval`].
    pub fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().flat_map(|(_, f)| f.iter().map(|&(i, _)| i))
    }
}

pub fn compile(e: &Expr) -> Compiled {
    let terms = e
        .terms()
        .map(|(m, c)| {
            let c = c.to_f64().unwrap_or(f64::NAN);
            (c, m.factors().iter().map(|&(v, k)| (v.index(), k as i32)).collect())
        })
        .collect();
    Compiled { terms }
}

/// Layout of the first-order reduction: for each dependent, its jets of
/// order below the order of its solved equation.
#[derive(Debug, Clone)]
struct Layout {
    state: Vec<VarId>,
    /// `(index in state of the top stored derivative, rhs)` per dependent.
    top: Vec<(usize, Compiled)>,
    /// `state[k]' = state[k + 1]` for these `k`.
    chain: Vec<usize>,
    time: VarId,
}

fn layout(el: &ELSystem, space: &JetSpace) -> Result<Layout> {
    if !space.is_ode() {
        return Err(Error::Unsupported("numeric integration is for one independent variable only".into()));
    }
    let forms = el
        .solved_forms()
        .ok_or_else(|| Error::ReductionUnavailable(el.unsolved_reason().unwrap_or_default().to_string()))?;
    let mut orders = vec![None; space.n_dependents()];
    for f in forms {
        if orders[f.dep].replace(f.multi[0]).is_some() {
            return Err(Error::Unsupported(format!("two equations are solved for `{}`", space.dependents()[f.dep])));
        }
    }
    let mut state = Vec::new();
    let mut chain = Vec::new();
    let mut tops = Vec::new();
    for (dep, r) in orders.iter().enumerate() {
        let r = r.ok_or_else(|| Error::Unsupported(format!("no equation for `{}`", space.dependents()[dep])))?;
        for k in 0..r {
            if k + 1 < r {
                chain.push(state.len());
            }
            state.push(space.ode_jet(dep, k).expect("jet"));
        }
        tops.push(state.len() - 1);
    }
    let mut top = Vec::new();
    for f in forms {
        let rhs = reduce_mod_el(&f.rhs, el, space)?;
        if let Some(v) = rhs.vars().into_iter().find(|v| !state.contains(v) && !space.is_independent(*v)) {
            return Err(Error::ReductionUnavailable(format!("solved form depends on `{}`", space.name(v))));
        }
        top.push((tops[f.dep], compile(&rhs)));
    }
    Ok(Layout { state, top, chain, time: space.independent(0) })
}

/// Samples of an integrated trajectory. Each sample holds values indexed by
/// variable id; only the independent variable and the state jets are set.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Vec<f64>>,
    pub state: Vec<VarId>,
    /// Set when the solved form produced a non-finite value.
    pub truncated_at: Option<usize>,
}

impl Trajectory {
    pub fn value(&self, sample: usize, v: VarId) -> f64 {
        self.samples[sample][v.index()]
    }
}

/// Classical RK4 with fixed step on the first-order reduction, starting at
/// `t = 0`. `ic` lists `q, q', ...` for each dependent in turn, up to one
/// below the order of its equation.
pub fn integrate_el(el: &ELSystem, space: &JetSpace, cfg: &NumericConfig, ic: &[f64]) -> Result<Trajectory> {
    cfg.validate()?;
    let lay = layout(el, space)?;
    if ic.len() != lay.state.len() {
        return Err(Error::InvalidConfig(format!(
            "expected {} initial values, got {}",
            lay.state.len(),
            ic.len()
        )));
    }
    let mut buf = vec![f64::NAN; space.len()];
    let deriv = |t: f64, y: &[f64], buf: &mut [f64], out: &mut [f64]| {
        buf[lay.time.index()] = t;
        for (v, x) in lay.state.iter().zip(y) {
            buf[v.index()] = *x;
        }
        for &k in &lay.chain {
            out[k] = y[k + 1];
        }
        for (k, rhs) in &lay.top {
            out[*k] = rhs.eval(buf);
        }
    };
    let n = ic.len();
    let h = cfg.step;
    let to_sample = |t: f64, y: &[f64]| {
        let mut s = vec![f64::NAN; space.len()];
        s[lay.time.index()] = t;
        for (v, x) in lay.state.iter().zip(y) {
            s[v.index()] = *x;
        }
        s
    };
    let mut y = ic.to_vec();
    let mut samples = vec![to_sample(0.0, &y)];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut truncated_at = None;
    for i in 0..cfg.steps() {
        let t = i as f64 * h;
        deriv(t, &y, &mut buf, &mut k1);
        for j in 0..n {
            tmp[j] = y[j] + 0.5 * h * k1[j];
        }
        deriv(t + 0.5 * h, &tmp, &mut buf, &mut k2);
        for j in 0..n {
            tmp[j] = y[j] + 0.5 * h * k2[j];
        }
        deriv(t + 0.5 * h, &tmp, &mut buf, &mut k3);
        for j in 0..n {
            tmp[j] = y[j] + h * k3[j];
        }
        deriv(t + h, &tmp, &mut buf, &mut k4);
        for j in 0..n {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y.iter().any(|x| !x.is_finite()) {
            truncated_at = Some(i + 1);
            break;
        }
        samples.push(to_sample((i + 1) as f64 * h, &y));
    }
    Ok(Trajectory { samples, state: lay.state, truncated_at })
}

/// Per-law drift along one or more trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericReport {
    pub drifts: Vec<f64>,
    pub passed: Vec<bool>,
    pub samples: usize,
    pub tolerance: f64,
    /// Number of trajectories that were cut short by a non-finite value.
    pub truncated: usize,
}

impl NumericReport {
    pub fn all_passed(&self) -> bool {
        self.truncated == 0 && self.passed.iter().all(|&p| p)
    }
}

/// First integrals reduced modulo the equations and compiled.
fn compile_laws(laws: &[ConservationLaw], el: &ELSystem, space: &JetSpace) -> Result<Vec<Compiled>> {
    laws.iter()
        .map(|law| {
            let i = law
                .first_integral()
                .ok_or_else(|| Error::Unsupported("flux vectors are not validated numerically".into()))?;
            Ok(compile(&reduce_mod_el(i, el, space)?))
        })
        .collect()
}

fn drift(c: &Compiled, traj: &Trajectory) -> f64 {
    let Some(first) = traj.samples.first() else { return 0.0 };
    let i0 = c.eval(first);
    let scale = i0.abs().max(1.0);
    traj.samples.iter().map(|s| (c.eval(s) - i0).abs() / scale).fold(0.0, f64::max)
}

/// Drift of each law along `traj`.
pub fn drift_report(
    laws: &[ConservationLaw],
    traj: &Trajectory,
    el: &ELSystem,
    space: &JetSpace,
    cfg: &NumericConfig,
) -> Result<NumericReport> {
    let compiled = compile_laws(laws, el, space)?;
    if let Some(v) = compiled.iter().flat_map(Compiled::slots).find(|&i| traj.samples[0][i].is_nan()) {
        return Err(Error::ReductionUnavailable(format!("law depends on `{}` outside the state", space.name(VarId(v as u32)))));
    }
    let drifts: Vec<f64> = compiled.iter().map(|c| drift(c, traj)).collect();
    Ok(NumericReport {
        passed: drifts.iter().map(|&d| d <= cfg.tolerance).collect(),
        drifts,
        samples: traj.samples.len(),
        tolerance: cfg.tolerance,
        truncated: usize::from(traj.truncated_at.is_some()),
    })
}

/// `count` initial states with entries uniform in `[-1, 1]`.
pub fn initial_conditions(seed: u64, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect()
}

/// Dimension of the first-order state for `el`.
pub fn state_dimension(el: &ELSystem, space: &JetSpace) -> Result<usize> {
    Ok(layout(el, space)?.state.len())
}

/// Integrates from [`RUNS`] seeded initial conditions and keeps, per law,
/// the worst drift.
pub fn check_laws(laws: &[ConservationLaw], el: &ELSystem, space: &JetSpace, cfg: &NumericConfig) -> Result<NumericReport> {
    cfg.validate()?;
    let dim = state_dimension(el, space)?;
    let mut worst = NumericReport {
        drifts: vec![0.0; laws.len()],
        passed: vec![true; laws.len()],
        samples: 0,
        tolerance: cfg.tolerance,
        truncated: 0,
    };
    for ic in initial_conditions(cfg.seed, RUNS, dim) {
        let traj = integrate_el(el, space, cfg, &ic)?;
        let r = drift_report(laws, &traj, el, space, cfg)?;
        for (w, d) in worst.drifts.iter_mut().zip(&r.drifts) {
            *w = w.max(*d);
        }
        worst.samples += r.samples;
        worst.truncated += r.truncated;
    }
    worst.passed = worst.drifts.iter().map(|&d| d <= cfg.tolerance).collect();
    Ok(worst)
}
