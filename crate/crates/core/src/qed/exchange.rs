use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::polarization::{polarization_pair, PolarizationPair};
use crate::error::{Error, Result};
use crate::fock::{current_current_coefficient, BoxGeometry, CouplingToggles, IVec3};
use crate::units::UnitSystem;

/// How the `h` in the field normalization `√(hc/Ω)` is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HReading {
    /// `h = 2πħ`.
    #[default]
    TwoPiHbar,
    /// `h` taken as `ħ`.
    Hbar,
}

impl HReading {
    fn planck(self, u: &UnitSystem) -> f64 {
        match self {
            Self::TwoPiHbar => 2.0 * PI * u.hbar,
            Self::Hbar => u.hbar,
        }
    }
}

/// Intermediate-state bookkeeping used by [`photon_exchange_amplitude`].
pub const BOOKKEEPING: &str = "two time orderings, static denominator -hbar*c*|q| each, \
times 1/2 because summands (k,p,q) and (p,k,-q) describe the same process";

/// Box, units, electron charge and mass, and the normalization reading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExchangeContext {
    pub geometry: BoxGeometry,
    pub units: UnitSystem,
    pub couplings: CouplingToggles,
    pub h_reading: HReading,
}

impl ExchangeContext {
    pub fn new(geometry: BoxGeometry, units: UnitSystem, couplings: CouplingToggles) -> Self {
        Self { geometry, units, couplings, h_reading: HReading::default() }
    }

    pub fn with_reading(self, h_reading: HReading) -> Self {
        Self { h_reading, ..self }
    }
}

/// Transverse photon `(q, λ)` with `ω = c|q|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhotonMode {
    pub q: IVec3,
    pub lambda: usize,
    pub omega: f64,
}

impl PhotonMode {
    pub fn new(q: IVec3, lambda: usize, geom: &BoxGeometry, u: &UnitSystem) -> Result<Self> {
        if q == [0, 0, 0] {
            return Err(Error::Degenerate("photon modes need q != 0".into()));
        }
        if !(lambda == 1 || lambda == 2) {
            return Err(Error::InvalidParameter(format!("polarization index must be 1 or 2, got {lambda}")));
        }
        Ok(Self { q, lambda, omega: u.c * geom.wavevector(&q).norm() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingPath {
    /// The current-current coefficient evaluated directly.
    Direct,
    /// Second-order single-photon exchange.
    PhotonExchange,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EffectiveAmplitude {
    pub value: f64,
    pub path: CouplingPath,
}

fn require_transfer(q: &IVec3) -> Result<()> {
    if *q == [0, 0, 0] {
        Err(Error::Degenerate("photon exchange needs q != 0".into()))
    } else {
        Ok(())
    }
}

fn vertex_with(ctx: &ExchangeContext, k: &IVec3, q: &IVec3, e: &crate::classical::Vec3) -> f64 {
    let (g, u, t) = (&ctx.geometry, &ctx.units, &ctx.couplings);
    let (kv, qv) = (g.wavevector(k), g.wavevector(q));
    let field = (ctx.h_reading.planck(u) * u.c / (g.volume() * qv.norm())).sqrt();
    -(t.charge / u.c) * (u.hbar / (2.0 * t.mass)) * (kv * 2.0 - qv).dot(e) * field
}

/// Amplitude for an electron `k → k − q` emitting the photon `(q, λ)`:
/// `−(e/c)(ħ/2m)(2k − q)·e_λ(q)·√(hc/(Ω|q|))`.
pub fn vertex_coefficient(ctx: &ExchangeContext, k: &IVec3, q: &IVec3, lambda: usize) -> Result<f64> {
    let mode = PhotonMode::new(*q, lambda, &ctx.geometry, &ctx.units)?;
    let pair = polarization_pair(&ctx.geometry.wavevector(q))?;
    Ok(vertex_with(ctx, k, &mode.q, &pair.get(lambda)))
}

/// Exchange amplitude for an explicit polarization pair of `q`.
pub fn photon_exchange_with(
    ctx: &ExchangeContext,
    k: &IVec3,
    p: &IVec3,
    q: &IVec3,
    pair: &PolarizationPair,
) -> Result<EffectiveAmplitude> {
    require_transfer(q)?;
    let minus_q = [-q[0], -q[1], -q[2]];
    let omega = ctx.units.c * ctx.geometry.wavevector(q).norm();
    let denominator = -ctx.units.hbar * omega;
    let orderings = 2.0;
    let double_count = 0.5;
    let value = (1..=2)
        .map(|lambda| {
            let e = pair.get(lambda);
            vertex_with(ctx, k, q, &e) * vertex_with(ctx, p, &minus_q, &e)
        })
        .sum::<f64>()
        * orderings
        * double_count
        / denominator;
    Ok(EffectiveAmplitude { value, path: CouplingPath::PhotonExchange })
}

/// `Σ_λ V(k, q, λ)·V(p, −q, λ) / (−ħω_q)` with the bookkeeping in
/// [`BOOKKEEPING`]; comparable term by term with the current-current
/// coefficient of the summand `(k, p, q)`.
pub fn photon_exchange_amplitude(ctx: &ExchangeContext, k: &IVec3, p: &IVec3, q: &IVec3) -> Result<EffectiveAmplitude> {
    require_transfer(q)?;
    let pair = polarization_pair(&ctx.geometry.wavevector(q))?;
    photon_exchange_with(ctx, k, p, q, &pair)
}

pub fn direct_amplitude(ctx: &ExchangeContext, k: &IVec3, p: &IVec3, q: &IVec3) -> Result<EffectiveAmplitude> {
    require_transfer(q)?;
    let value = current_current_coefficient(k, p, q, &ctx.geometry, &ctx.couplings, &ctx.units)?;
    Ok(EffectiveAmplitude { value, path: CouplingPath::Direct })
}

/// `|a − b| / max(|a|, |b|, floor)`, zero when all three vanish.
pub fn relative_difference(a: f64, b: f64, floor: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub samples: usize,
    pub seed: u64,
    pub max_rel_diff: f64,
    pub mean_rel_diff: f64,
    pub convention: String,
    pub h_reading: HReading,
}

/// `(k·p)|q|² − (q·k)(q·p)` in exact integer arithmetic.
fn transverse_numerator(k: &IVec3, p: &IVec3, q: &IVec3) -> i64 {
    let dot = |a: &IVec3, b: &IVec3| a.iter().zip(b).map(|(x, y)| *x as i64 * *y as i64).sum::<i64>();
    dot(k, p) * dot(q, q) - dot(q, k) * dot(q, p)
}

/// Largest lattice component drawn for `k`, `p` and `q`.
const SAMPLE_RANGE: i32 = 6;

fn draw(rng: &mut ChaCha8Rng) -> IVec3 {
    [0; 3].map(|_| rng.random_range(-SAMPLE_RANGE..=SAMPLE_RANGE))
}

/// Compares both paths on `samples` random lattice triples. Sample `i` uses
/// its own stream of the seeded generator, so results do not depend on
/// thread scheduling.
pub fn equivalence_report(ctx: &ExchangeContext, samples: usize, seed: u64) -> Result<EquivalenceReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let g = &ctx.geometry;
    let diffs: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (k, p) = (draw(&mut rng), draw(&mut rng));
            let q = loop {
                let q = draw(&mut rng);
                if q != [0, 0, 0] {
                    break q;
                }
            };
            let direct = direct_amplitude(ctx, &k, &p, &q)?.value;
            let exchange = photon_exchange_amplitude(ctx, &k, &p, &q)?.value;
            let (kv, pv, qv) = (g.wavevector(&k), g.wavevector(&p), g.wavevector(&q));
            let natural = (ctx.couplings.charge * ctx.units.hbar / (ctx.couplings.mass * ctx.units.c)).powi(2)
                * 2.0
                * PI
                / (g.volume() * qv.norm_squared())
                * (kv.norm() * pv.norm()).max((kv * 2.0 - qv).norm() * (pv * 2.0 + qv).norm() / 4.0);
            // Exactly transverse-cancelled samples are measured against the
            // natural coupling size instead of their rounding noise.
            if transverse_numerator(&k, &p, &q) == 0 {
                return Ok(if natural == 0.0 { 0.0 } else { (direct - exchange).abs() / natural });
            }
            Ok(relative_difference(direct, exchange, 0.0))
        })
        .collect::<Result<_>>()?;
    let max_rel_diff = diffs.iter().copied().fold(0.0, f64::max);
    let mean_rel_diff = diffs.iter().sum::<f64>() / samples as f64;
    Ok(EquivalenceReport {
        samples,
        seed,
        max_rel_diff,
        mean_rel_diff,
        convention: BOOKKEEPING.to_string(),
        h_reading: ctx.h_reading,
    })
}
