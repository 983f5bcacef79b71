//! Direct 3D quadrature of the transverse pair bracket.
//!
//! With `r_j` at the origin and `r = r_i − r_j = R·n̂`, the tensor is
//!
//! ```text
//! T_μν(r) = δ_μν/R − (s/4π) ∫ dx |r − x|⁻¹ ∂_μ∂_ν |x|⁻¹
//! ```
//!
//! where `s = ±1` is the gradient-reading sign. The distributional second
//! derivative is split into its principal value `(3x̂x̂ − I)/|x|³` plus the
//! point term `−(4π/3) I δ(x)`. Space is cut into
//!
//! * a ball of radius `R/2` about the origin, integrated in shells with the
//!   angular sum taken first so the `1/|x|` pointwise singularity cancels,
//! * a ball of radius `R/2` about `r`, in spherical coordinates centred there,
//! * the remainder out to `R_max`, integrated ray by ray with the ball about
//!   `r` cut out analytically,
//! * the far field beyond `R_max`, where the angular integral of the pure
//!   quadrupole `(3x̂x̂ − I)` against `|r − x|⁻¹` is exact:
//!   `(4π/15)(R²/R_max³)(3n̂n̂ − I)`.
//!
//! This path is an oracle for the closed-form kernels; it is not
//! differentiated.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{GradientReading, PairKernel};
use super::{Mat3, Vec3};
use crate::error::{Error, Result};

/// Azimuthal nodes. The integrand is a trigonometric polynomial of degree 2
/// in the azimuth about `n̂`, so the trapezoid rule with 8 points is exact.
const AZIMUTH_NODES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSettings {
    /// `R_max = cutoff_factor · R`.
    pub cutoff_factor: f64,
    /// Gauss nodes per radial panel at refinement level 0.
    pub base_nodes: usize,
    /// Highest refinement level tried; each level doubles the node counts.
    pub max_level: u32,
    /// Relative change between successive levels accepted as converged.
    pub tolerance: f64,
    pub reading: GradientReading,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            cutoff_factor: 50.0,
            base_nodes: 8,
            max_level: 4,
            tolerance: 1e-6,
            reading: GradientReading::IntegrationPoint,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff_factor > 2.0 && self.cutoff_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cutoff_factor must exceed 2, got {}",
                self.cutoff_factor
            )));
        }
        if self.base_nodes < 2 {
            return Err(Error::InvalidParameter("base_nodes must be at least 2".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameter("quadrature tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Quadrature tensor with its convergence data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureKernel {
    pub kernel: PairKernel,
    /// Max entrywise change against the previous level, relative to `max|T|`.
    pub error_estimate: f64,
    pub level: u32,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule mapped onto `[lo, hi]`.
fn mapped_rule<'a>(
    nodes: &'a [f64],
    weights: &'a [f64],
    lo: f64,
    hi: f64,
) -> impl Iterator<Item = (f64, f64)> + 'a {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    nodes.iter().zip(weights).map(move |(x, w)| (mid + half * x, half * w))
}

/// Integrates `f` over `[lo, hi]` with panels doubling in length.
fn radial_panels(
    nodes: &[f64],
    weights: &[f64],
    lo: f64,
    hi: f64,
    mut f: impl FnMut(f64, f64),
) {
    if hi <= lo {
        return;
    }
    let mut a = lo;
    while a < hi {
        let b = (2.0 * a).min(hi);
        // Merge a sliver left at the end into the current panel.
        let b = if hi - b < 0.25 * (b - a) { hi } else { b };
        for (x, w) in mapped_rule(nodes, weights, a, b) {
            f(x, w);
        }
        a = b;
    }
}

/// Orthonormal `(e1, e2)` completing `n̂` to a right-handed frame.
fn transverse_frame(n: &Vec3) -> (Vec3, Vec3) {
    let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vec3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = n.cross(&axis).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// `3ω̂ω̂ − I` for a unit vector.
fn quadrupole(w: &Vec3) -> Mat3 {
    w * w.transpose() * 3.0 - Mat3::identity()
}

struct Geometry {
    r: Vec3,
    big_r: f64,
    n: Vec3,
    e1: Vec3,
    e2: Vec3,
    azimuths: Vec<(f64, f64)>,
}

impl Geometry {
    fn direction(&self, cos_t: f64, sin_t: f64, cos_p: f64, sin_p: f64) -> Vec3 {
        self.n * cos_t + (self.e1 * cos_p + self.e2 * sin_p) * sin_t
    }
}

/// Principal-value integral `∫ dx |r − x|⁻¹ (3x̂x̂ − I)/|x|³` at one level.
fn principal_value(geo: &Geometry, cfg: &QuadratureSettings, level: u32) -> Mat3 {
    let scale = 1usize << level;
    let nr = cfg.base_nodes * scale;
    let nth = 2 * cfg.base_nodes * scale;
    let (rn, rw) = gauss_legendre(nr);
    let (tn, tw) = gauss_legendre(nth);
    let big_r = geo.big_r;
    let inner = 0.5 * big_r;
    let r_max = cfg.cutoff_factor * big_r;

    // Ball about the origin: angular sum first at every radius.
    let mut near_origin = Mat3::zeros();
    for (rho, wr) in mapped_rule(&rn, &rw, 0.0, inner) {
        let mut shell = Mat3::zeros();
        for (ct, wt) in tn.iter().zip(&tw) {
            let st = (1.0 - ct * ct).sqrt();
            for &(cp, sp) in &geo.azimuths {
                let w = geo.direction(*ct, st, cp, sp);
                let dist = (geo.r - w * rho).norm();
                shell += quadrupole(&w) * (wt / dist);
            }
        }
        near_origin += shell * (wr / rho);
    }

    // Ball about r_i: x = r + s·ω, volume element s² ds dΩ cancels |r − x|⁻¹.
    let mut near_source = Mat3::zeros();
    for (s, ws) in mapped_rule(&rn, &rw, 0.0, inner) {
        for (ct, wt) in tn.iter().zip(&tw) {
            let st = (1.0 - ct * ct).sqrt();
            for &(cp, sp) in &geo.azimuths {
                let x = geo.r + geo.direction(*ct, st, cp, sp) * s;
                let rx = x.norm();
                let xh = x / rx;
                near_source += quadrupole(&xh) * (ws * wt * s / (rx * rx * rx));
            }
        }
    }

    // Remainder, ray by ray. Polar angle split at the tangent cone of the
    // excised ball, sin θc = 1/2; below it θ = θc(1 − u²) smooths the
    // square-root edge of the chord.
    let theta_c = PI / 6.0;
    let mut polar: Vec<(f64, f64, bool)> = Vec::with_capacity(2 * nth);
    for (u, wu) in mapped_rule(&tn, &tw, 0.0, 1.0) {
        let theta = theta_c * (1.0 - u * u);
        polar.push((theta, wu * 2.0 * theta_c * u, true));
    }
    for (theta, wt) in mapped_rule(&tn, &tw, theta_c, PI) {
        polar.push((theta, wt, false));
    }
    let rays: Vec<Mat3> = polar
        .par_iter()
        .map(|&(theta, wtheta, cut)| {
            let (st, ct) = theta.sin_cos();
            let mut acc = Mat3::zeros();
            for &(cp, sp) in &geo.azimuths {
                let w = geo.direction(ct, st, cp, sp);
                let q = quadrupole(&w);
                let mut radial = 0.0;
                let mut integrate = |lo: f64, hi: f64| {
                    radial_panels(&rn, &rw, lo, hi, |rho, wr| {
                        radial += wr / (rho * (geo.r - w * rho).norm());
                    });
                };
                if cut {
                    let half_chord = big_r * (0.25 - st * st).max(0.0).sqrt();
                    integrate(inner, big_r * ct - half_chord);
                    integrate(big_r * ct + half_chord, r_max);
                } else {
                    integrate(inner, r_max);
                }
                acc += q * radial;
            }
            acc * (wtheta * st)
        })
        .collect();
    let exterior = rays.into_iter().fold(Mat3::zeros(), |a, m| a + m);

    let nn = geo.n * geo.n.transpose();
    let far_field =
        (nn * 3.0 - Mat3::identity()) * (4.0 * PI / 15.0 * big_r * big_r / r_max.powi(3));

    let azimuth_weight = 2.0 * PI / AZIMUTH_NODES as f64;
    (near_origin + near_source + exterior) * azimuth_weight + far_field
}

fn evaluate_level(geo: &Geometry, cfg: &QuadratureSettings, level: u32) -> Mat3 {
    let pv = principal_value(geo, cfg, level);
    let point_term = Mat3::identity() * (-4.0 * PI / 3.0 / geo.big_r);
    let integral = pv + point_term;
    Mat3::identity() / geo.big_r - integral * (cfg.reading.sign() / (4.0 * PI))
}

/// Evaluates the transverse pair tensor at separation `r` by quadrature,
/// doubling the node counts until successive levels agree to
/// `cfg.tolerance` (relative to the largest entry).
pub fn kernel_quadrature(r: &Vec3, cfg: &QuadratureSettings) -> Result<QuadratureKernel> {
    cfg.validate()?;
    let big_r = r.norm();
    if big_r == 0.0 || !big_r.is_finite() {
        return Err(Error::Degenerate("zero separation".into()));
    }
    let n = r / big_r;
    let (e1, e2) = transverse_frame(&n);
    let azimuths = (0..AZIMUTH_NODES)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / AZIMUTH_NODES as f64;
            (phi.cos(), phi.sin())
        })
        .collect();
    let geo = Geometry { r: *r, big_r, n, e1, e2, azimuths };

    let mut previous = evaluate_level(&geo, cfg, 0);
    let mut estimate = f64::INFINITY;
    for level in 1..=cfg.max_level {
        let current = evaluate_level(&geo, cfg, level);
        let scale = current.abs().max();
        estimate = (current - previous).abs().max() / scale;
        if estimate < cfg.tolerance {
            return Ok(QuadratureKernel {
                kernel: PairKernel::from_tensor(current, n, big_r),
                error_estimate: estimate,
                level,
            });
        }
        previous = current;
    }
    Err(Error::Convergence { estimate, tolerance: cfg.tolerance })
}
