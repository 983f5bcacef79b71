use serde::{Deserialize, Serialize};

use crate::classical::{gradients, HamiltonianModel, ParticleSet, Vec3};
use crate::error::{Error, Result};
use crate::units::UnitSystem;

/// Integration halts when two particles come closer than this.
pub const COLLISION_DISTANCE: f64 = 1e-9;
/// Adaptive steps below this size are treated as stiffness.
pub const MIN_STEP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    Rk45,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for RK4, initial step for RK45.
    pub dt: f64,
    /// Local error tolerance (RK45 only), used as both absolute and relative.
    pub tol: f64,
    pub t_end: f64,
    /// Keep every `record_every`-th accepted step (the first and last state
    /// are always kept).
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

fn default_record_every() -> usize {
    1
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_end: f64) -> Self {
        Self { method: Method::Rk4, dt, tol: 1e-10, t_end, record_every: 1 }
    }

    pub fn rk45(tol: f64, t_end: f64) -> Self {
        Self { method: Method::Rk45, dt: 1e-3, tol, t_end, record_every: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(what.to_string()))
            }
        };
        check(self.dt.is_finite() && self.dt > 0.0, "dt must be positive")?;
        check(self.tol.is_finite() && self.tol > 0.0, "tol must be positive")?;
        check(self.t_end.is_finite() && self.t_end > 0.0, "t_end must be positive")?;
        check(self.record_every >= 1, "record_every must be at least 1")
    }
}

/// Time-ordered phase-space snapshots.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<ParticleSet>,
    pub model: HamiltonianModel,
    /// Accepted integration steps, including those not recorded.
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &ParticleSet {
        self.snapshots.last().expect("trajectory holds the initial state")
    }
}

/// `(ṙ_i, ṗ_i) = (∂H/∂p_i, −∂H/∂r_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseVelocity {
    pub position_rate: Vec<Vec3>,
    pub momentum_rate: Vec<Vec3>,
}

impl PhaseVelocity {
    /// Same layout as [`ParticleSet::to_state`].
    pub fn to_flat(&self) -> Vec<f64> {
        self.position_rate
            .iter()
            .zip(&self.momentum_rate)
            .flat_map(|(r, p)| [r.x, r.y, r.z, p.x, p.y, p.z])
            .collect()
    }
}

pub fn hamilton_rhs(ps: &ParticleSet, model: &HamiltonianModel, u: &UnitSystem) -> Result<PhaseVelocity> {
    let g = gradients(ps, model, u)?;
    Ok(PhaseVelocity {
        position_rate: g.d_momentum,
        momentum_rate: g.d_position.into_iter().map(|d| -d).collect(),
    })
}

struct System<'a> {
    template: &'a ParticleSet,
    model: &'a HamiltonianModel,
    units: &'a UnitSystem,
}

impl System<'_> {
    fn rhs(&self, y: &[f64]) -> Result<Vec<f64>> {
        Ok(hamilton_rhs(&self.template.with_state(y), self.model, self.units)?.to_flat())
    }

    fn check_collision(&self, y: &[f64], t: f64) -> Result<()> {
        let n = self.template.len();
        for i in 1..n {
            for j in 0..i {
                let d = (0..3).map(|k| y[6 * i + k] - y[6 * j + k]);
                let sep = d.map(|x| x * x).sum::<f64>().sqrt();
                if sep < COLLISION_DISTANCE {
                    return Err(Error::Collision { t, i, j, separation: sep });
                }
            }
        }
        Ok(())
    }
}

fn axpy(y: &[f64], h: f64, terms: &[(&[f64], f64)]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (k, c) in terms {
        if *c != 0.0 {
            for (o, kv) in out.iter_mut().zip(k.iter()) {
                *o += h * c * kv;
            }
        }
    }
    out
}

fn rk4_step(sys: &System, y: &[f64], h: f64) -> Result<Vec<f64>> {
    let k1 = sys.rhs(y)?;
    let k2 = sys.rhs(&axpy(y, h, &[(&k1, 0.5)]))?;
    let k3 = sys.rhs(&axpy(y, h, &[(&k2, 0.5)]))?;
    let k4 = sys.rhs(&axpy(y, h, &[(&k3, 1.0)]))?;
    Ok(axpy(y, h, &[(&k1, 1.0 / 6.0), (&k2, 1.0 / 3.0), (&k3, 1.0 / 3.0), (&k4, 1.0 / 6.0)]))
}

// Dormand-Prince 5(4) tableau. The system is autonomous, so the nodes c_i
// are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince attempt: fifth-order solution and scaled error norm.
fn dopri_step(sys: &System, y: &[f64], h: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    for row in &A {
        let terms: Vec<(&[f64], f64)> =
            k.iter().zip(row.iter()).map(|(kv, a)| (kv.as_slice(), *a)).collect();
        let ys = axpy(y, h, &terms);
        k.push(sys.rhs(&ys)?);
    }
    let y5 = axpy(y, h, &k.iter().zip(B5).map(|(kv, b)| (kv.as_slice(), b)).collect::<Vec<_>>());
    // Max norm: every component's local error stays below tol·(1 + |y|).
    let mut worst = 0.0f64;
    for i in 0..y.len() {
        let err: f64 = (0..7).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>() * h;
        let scale = tol + tol * y[i].abs().max(y5[i].abs());
        worst = worst.max((err / scale).abs());
    }
    // f64::max drops NaN, so a non-finite proposal is flagged explicitly.
    if !y5.iter().all(|v| v.is_finite()) {
        worst = f64::INFINITY;
    }
    Ok((y5, worst))
}

/// Integrates from `t = 0` to `cfg.t_end`, recording accepted steps.
pub fn integrate(
    ps0: &ParticleSet,
    model: &HamiltonianModel,
    u: &UnitSystem,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    drive(ps0, model, u, cfg, &[cfg.t_end], false)
}

/// Integrates and records exactly at `times` (strictly increasing, the first
/// entry `0`). Steps are shortened to land on every requested time.
pub fn integrate_at(
    ps0: &ParticleSet,
    model: &HamiltonianModel,
    u: &UnitSystem,
    cfg: &IntegratorConfig,
    times: &[f64],
) -> Result<Trajectory> {
    cfg.validate()?;
    if times.first() != Some(&0.0) {
        return Err(Error::InvalidParameter("output times must start at 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("output times must be strictly increasing".into()));
    }
    drive(ps0, model, u, cfg, &times[1..], true)
}

fn drive(
    ps0: &ParticleSet,
    model: &HamiltonianModel,
    u: &UnitSystem,
    cfg: &IntegratorConfig,
    stops: &[f64],
    record_stops_only: bool,
) -> Result<Trajectory> {
    let sys = System { template: ps0, model, units: u };
    let mut y = ps0.to_state();
    // Fail fast on models without gradients.
    sys.rhs(&y)?;

    let mut t = 0.0;
    let mut h = cfg.dt;
    let mut times = vec![0.0];
    let mut snapshots = vec![ps0.clone()];
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let t_final = *stops.last().unwrap_or(&0.0);

    for (stop_index, &stop) in stops.iter().enumerate() {
        while t < stop {
            let remaining = stop - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            let (y_new, next_h) = match cfg.method {
                Method::Rk4 => (rk4_step(&sys, &y, step)?, h),
                Method::Rk45 => {
                    // A trial stage that lands on coincident or non-finite
                    // positions is treated as an infinitely bad step.
                    let (y_new, err) = match dopri_step(&sys, &y, step, cfg.tol) {
                        Ok((y_new, err)) if err.is_finite() => (y_new, err),
                        Ok(_) | Err(Error::Degenerate(_)) => (Vec::new(), f64::INFINITY),
                        Err(e) => return Err(e),
                    };
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    if err > 1.0 {
                        rejected += 1;
                        h = step * factor;
                        if h < MIN_STEP {
                            return Err(Error::Stiffness { t, dt: h });
                        }
                        continue;
                    }
                    // Do not let a clipped landing step shrink the controller.
                    let proposal = step * factor;
                    (y_new, if clipped { proposal.max(h) } else { proposal })
                }
            };
            t = if clipped { stop } else { t + step };
            y = y_new;
            h = next_h;
            accepted += 1;
            sys.check_collision(&y, t)?;
            let at_end = t == t_final;
            let keep = if record_stops_only { t == stop } else { at_end || accepted.is_multiple_of(cfg.record_every) };
            if keep {
                times.push(t);
                snapshots.push(ps0.with_state(&y));
            }
        }
        debug_assert!(!record_stops_only || times.len() == stop_index + 2);
    }

    Ok(Trajectory { times, snapshots, model: *model, accepted_steps: accepted, rejected_steps: rejected })
}
