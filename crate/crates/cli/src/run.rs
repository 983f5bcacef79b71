use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use cgauge_core::classical::{
    h_total, kernel_closed, kernel_quadrature, HamiltonianModel, Mat3, ModelKind, Particle,
    ParticleSet, QuadratureSettings, Vec3,
};
use cgauge_core::dynamics::{
    conservation_report, integrate, integrate_at, trajectory_divergence, write_divergence_csv,
    write_trajectory_csv, Trajectory,
};
use cgauge_core::fock::{
    assemble_hamiltonian, assemble_with_field, diagonalize, enumerate_sector_basis, write_spectrum_csv,
    BoxGeometry, SectorSpec, SymmetricMatrix, VectorPotential,
};
use cgauge_core::format::sci17;
use cgauge_core::qed::{equivalence_report, ExchangeContext, HReading};
use cgauge_core::UnitSystem;
use serde_json::{json, Map, Value};

use crate::config::{ClassicalSection, KernelSection, Mode, QedSection, QuantumSection, ScenarioConfig};
use crate::error::CliError;

/// Command-line inputs shared by `run` and `compare`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

/// Where the artifacts went and how each check came out.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub dir: PathBuf,
    pub checks: BTreeMap<String, bool>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|ok| *ok)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Command {
    Run,
    Compare,
}

pub fn run(opts: &RunOptions) -> Result<Outcome, CliError> {
    execute(opts, Command::Run)
}

pub fn compare(opts: &RunOptions) -> Result<Outcome, CliError> {
    execute(opts, Command::Compare)
}

fn execute(opts: &RunOptions, command: Command) -> Result<Outcome, CliError> {
    let cfg = ScenarioConfig::load(&opts.config)?;
    if command == Command::Compare && cfg.mode != Mode::Classical {
        return Err(CliError::Config("compare needs a classical config".into()));
    }
    let name = match &cfg.name {
        Some(n) => n.clone(),
        None => opts
            .config
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| CliError::Config("cannot derive a run name from the config path".into()))?,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let dir = opts.out.join(&name);
    fs::create_dir_all(&dir)?;
    let start = Instant::now();
    let mut report = Report::new(&cfg, &name)?;
    pool.install(|| match (cfg.mode, command) {
        (Mode::Kernel, _) => run_kernel(cfg.kernel.as_ref().expect("validated"), &dir, &mut report),
        (Mode::Classical, Command::Run) => {
            run_classical(cfg.classical.as_ref().expect("validated"), &cfg.units, &dir, &mut report)
        }
        (Mode::Classical, Command::Compare) => {
            run_compare(cfg.classical.as_ref().expect("validated"), &cfg.units, &dir, &mut report)
        }
        (Mode::Quantum, _) => run_quantum(cfg.quantum.as_ref().expect("validated"), &cfg.units, &dir, &mut report),
        (Mode::Qed, _) => run_qed(cfg.qed.as_ref().expect("validated"), &cfg.units, opts.seed, &mut report),
    })?;
    let elapsed = start.elapsed().as_secs_f64();
    let checks = report.checks.clone();
    write_json(&dir.join("report.json"), &report.finish())?;
    write_json(&dir.join("timing.json"), &json!({ "elapsed_seconds": elapsed }))?;
    Ok(Outcome { dir, checks })
}

struct Report {
    fields: Map<String, Value>,
    checks: BTreeMap<String, bool>,
}

impl Report {
    fn new(cfg: &ScenarioConfig, name: &str) -> Result<Self, CliError> {
        let mut fields = Map::new();
        fields.insert("name".into(), json!(name));
        fields.insert("mode".into(), serde_json::to_value(cfg.mode).expect("serializable"));
        fields.insert("inputs".into(), serde_json::to_value(cfg).expect("serializable"));
        Ok(Self { fields, checks: BTreeMap::new() })
    }

    fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.into(), ok);
    }

    fn finish(mut self) -> Value {
        let passed = self.checks.values().all(|ok| *ok);
        self.fields.insert("checks".into(), serde_json::to_value(&self.checks).expect("serializable"));
        self.fields.insert("passed".into(), json!(passed));
        Value::Object(self.fields)
    }
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn max_abs(m: &Mat3) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn run_kernel(section: &KernelSection, dir: &Path, report: &mut Report) -> Result<(), CliError> {
    if section.separations.is_empty() || section.directions.is_empty() || section.readings.is_empty() {
        return Err(CliError::Config("kernel needs at least one R, direction and reading".into()));
    }
    let mut kernel_csv = create(&dir.join("kernel.csv"))?;
    let mut discrepancy_csv = create(&dir.join("discrepancy.csv"))?;
    writeln!(kernel_csv, "reading,R,nx,ny,nz,closed_a,closed_b,quad_a,quad_b,quad_err,rel_diff")?;
    writeln!(discrepancy_csv, "reading,R,nx,ny,nz,darwin_a,darwin_b,literal_a,literal_b,delta_a,delta_b,error_bar")?;

    let mut max_rel_diff = 0.0f64;
    let mut darwin_max_diff = 0.0f64;
    let mut findings = Map::new();
    let mut rows = 0usize;
    for &reading in &section.readings {
        let settings = QuadratureSettings { reading, ..section.quadrature };
        let mut max_delta = 0.0f64;
        let mut max_bar = 0.0f64;
        let mut resolved = 0usize;
        for &big_r in &section.separations {
            for dir3 in &section.directions {
                let d = Vec3::from(*dir3);
                if d.norm().is_nan() || d.norm() <= 0.0 || big_r.is_nan() || big_r <= 0.0 {
                    return Err(CliError::Config("R and directions must be nonzero".into()));
                }
                let n = d.normalize();
                let r = n * big_r;
                let closed = kernel_closed(ModelKind::TransverseLiteral, reading, &r)?;
                let quad = kernel_quadrature(&r, &settings)?;
                let scale = max_abs(&closed.tensor);
                let rel = max_abs(&(closed.tensor - quad.kernel.tensor)) / scale;
                max_rel_diff = max_rel_diff.max(rel);

                let darwin = kernel_closed(ModelKind::Darwin, reading, &r)?;
                let reference = (Mat3::identity() + n * n.transpose()) / (2.0 * big_r);
                darwin_max_diff = darwin_max_diff.max(max_abs(&(darwin.tensor - reference)) / max_abs(&reference));

                let q = &quad.kernel;
                let bar = quad.error_estimate * max_abs(&q.tensor);
                let (da, db) = (q.a - darwin.a, q.b - darwin.b);
                max_delta = max_delta.max(da.abs()).max(db.abs());
                max_bar = max_bar.max(bar);
                if da.abs().max(db.abs()) > 10.0 * bar {
                    resolved += 1;
                }
                let head = format!("{},{},{},{},{}", reading.label(), sci17(big_r), sci17(n.x), sci17(n.y), sci17(n.z));
                writeln!(
                    kernel_csv,
                    "{head},{},{},{},{},{},{}",
                    sci17(closed.a),
                    sci17(closed.b),
                    sci17(q.a),
                    sci17(q.b),
                    sci17(quad.error_estimate),
                    sci17(rel)
                )?;
                writeln!(
                    discrepancy_csv,
                    "{head},{},{},{},{},{},{},{}",
                    sci17(darwin.a),
                    sci17(darwin.b),
                    sci17(q.a),
                    sci17(q.b),
                    sci17(da),
                    sci17(db),
                    sci17(bar)
                )?;
                rows += 1;
            }
        }
        findings.insert(
            reading.label().into(),
            json!({
                "max_abs_delta": max_delta,
                "max_error_bar": max_bar,
                "points_resolved_above_error_bar": resolved,
            }),
        );
    }
    kernel_csv.flush()?;
    discrepancy_csv.flush()?;
    report.set("rows", json!(rows));
    report.set("max_rel_diff", json!(max_rel_diff));
    report.set("darwin_reference_max_rel_diff", json!(darwin_max_diff));
    report.set("discrepancy", Value::Object(findings));
    report.check("closed_form_matches_quadrature", max_rel_diff <= section.tolerance);
    report.check("darwin_kernel_reference", darwin_max_diff <= 4.0 * f64::EPSILON);
    Ok(())
}

fn particle_set(section: &ClassicalSection) -> Result<ParticleSet, CliError> {
    let particles = section.particles.iter().map(|p| Particle::new(p.m, p.e, p.r, p.p)).collect();
    ParticleSet::new(particles).map_err(|e| CliError::Config(e.to_string()))
}

/// `0 = t_0 < … < t_n = t_end` with spacing at most `interval`.
fn output_grid(t_end: f64, interval: f64) -> Result<Vec<f64>, CliError> {
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(CliError::Config("output_interval must be positive".into()));
    }
    let n = ((t_end / interval) - 1e-9).ceil().max(1.0) as usize;
    Ok((0..=n).map(|i| t_end * i as f64 / n as f64).collect())
}

fn trajectory(
    section: &ClassicalSection,
    kind: ModelKind,
    u: &UnitSystem,
    grid: Option<&[f64]>,
) -> Result<Trajectory, CliError> {
    let ps = particle_set(section)?;
    let model = HamiltonianModel::new(kind).with_reading(section.reading);
    let traj = match grid {
        Some(times) => integrate_at(&ps, &model, u, &section.integrator, times)?,
        None => integrate(&ps, &model, u, &section.integrator)?,
    };
    Ok(traj)
}

fn conservation_checks(section: &ClassicalSection, label: &str, c: &cgauge_core::dynamics::ConservationReport, report: &mut Report) {
    if let Some(max) = section.checks.max_energy_drift {
        report.check(&format!("{label}energy_drift"), c.energy_drift <= max);
    }
    if let Some(max) = section.checks.max_momentum_drift {
        report.check(&format!("{label}momentum_drift"), c.momentum_drift <= max);
    }
}

fn run_classical(section: &ClassicalSection, u: &UnitSystem, dir: &Path, report: &mut Report) -> Result<(), CliError> {
    let kind = section.model.ok_or_else(|| CliError::Config("run needs classical.model".into()))?;
    let grid = section.output_interval.map(|dt| output_grid(section.integrator.t_end, dt)).transpose()?;
    let traj = trajectory(section, kind, u, grid.as_deref())?;
    let mut out = create(&dir.join("trajectory.csv"))?;
    write_trajectory_csv(&traj, &mut out)?;
    out.flush()?;
    let cons = conservation_report(&traj, u)?;
    report.set("model", json!(kind.label()));
    report.set("initial_energy", json!(h_total(&traj.snapshots[0], &traj.model, u)?));
    report.set("accepted_steps", json!(traj.accepted_steps));
    report.set("rejected_steps", json!(traj.rejected_steps));
    report.set("snapshots", json!(traj.len()));
    report.set("conservation", serde_json::to_value(cons).expect("serializable"));
    conservation_checks(section, "", &cons, report);
    Ok(())
}

fn run_compare(section: &ClassicalSection, u: &UnitSystem, dir: &Path, report: &mut Report) -> Result<(), CliError> {
    let models = match section.models.as_deref() {
        Some([a, b]) => [*a, *b],
        _ => return Err(CliError::Config("compare needs classical.models with exactly two entries".into())),
    };
    let t_end = section.integrator.t_end;
    let grid = output_grid(t_end, section.output_interval.unwrap_or(t_end / 200.0))?;
    let mut reports = Vec::new();
    let mut trajectories = Vec::new();
    for (tag, kind) in ["a", "b"].iter().zip(models) {
        let traj = trajectory(section, kind, u, Some(&grid))?;
        let mut out = create(&dir.join(format!("trajectory_{tag}.csv")))?;
        write_trajectory_csv(&traj, &mut out)?;
        out.flush()?;
        let cons = conservation_report(&traj, u)?;
        conservation_checks(section, &format!("{tag}_"), &cons, report);
        reports.push(json!({
            "model": kind.label(),
            "accepted_steps": traj.accepted_steps,
            "conservation": serde_json::to_value(cons).expect("serializable"),
        }));
        trajectories.push(traj);
    }
    let div = trajectory_divergence(&trajectories[0], &trajectories[1])?;
    let mut out = create(&dir.join("divergence.csv"))?;
    write_divergence_csv(&div, &mut out)?;
    out.flush()?;
    let max_div = div.distance.iter().copied().fold(0.0, f64::max);
    report.set("runs", Value::Array(reports));
    report.set("max_divergence", json!(max_div));
    report.set("final_divergence", json!(div.distance.last().copied().unwrap_or(0.0)));
    if let Some(max) = section.checks.max_divergence {
        report.check("divergence", max_div <= max);
    }
    Ok(())
}

fn is_exactly_symmetric(h: &SymmetricMatrix) -> bool {
    (0..h.dim()).all(|i| h.row(i).iter().all(|&(j, v)| v.to_bits() == h.get(j, i).to_bits()))
}

fn run_quantum(section: &QuantumSection, u: &UnitSystem, dir: &Path, report: &mut Report) -> Result<(), CliError> {
    let geom = BoxGeometry::new(section.edge).map_err(|e| CliError::Config(e.to_string()))?;
    let two_sz = match section.sz {
        Some(sz) => {
            let twice = 2.0 * sz;
            if twice.fract() != 0.0 || !twice.is_finite() {
                return Err(CliError::Config(format!("Sz must be a multiple of 1/2, got {sz}")));
            }
            Some(twice as i32)
        }
        None => None,
    };
    let spec = SectorSpec { particles: section.particles, momentum: section.momentum, two_sz };
    let basis = enumerate_sector_basis(&geom, section.n_max, spec, section.capacity)?;
    if basis.dim() == 0 {
        return Err(CliError::Config("the requested sector is empty".into()));
    }
    let h = match section.field {
        Some(a) => assemble_with_field(&basis, &section.toggles, u, &VectorPotential::Uniform(a))?,
        None => assemble_hamiltonian(&basis, &section.toggles, u)?,
    };
    let spectrum = diagonalize(&h, &section.eigen)?;
    let mut out = create(&dir.join("spectrum.csv"))?;
    write_spectrum_csv(&spectrum, &mut out)?;
    out.flush()?;
    report.set(
        "sector",
        json!({ "N": section.particles, "P": section.momentum, "Sz": section.sz, "n_max": section.n_max }),
    );
    report.set("toggles", serde_json::to_value(section.toggles).expect("serializable"));
    report.set("dimension", json!(basis.dim()));
    report.set("e0", json!(spectrum.ground_energy()));
    report.set("gap", json!(spectrum.gap()));
    report.set("method", serde_json::to_value(spectrum.method).expect("serializable"));
    report.set("residual", json!(spectrum.residual));
    report.set("nonzeros", json!(h.nonzeros()));
    report.check("hermitian", is_exactly_symmetric(&h));
    report.check("residual", spectrum.residual <= section.eigen.tolerance * h.norm_inf().max(f64::MIN_POSITIVE));
    Ok(())
}

fn run_qed(section: &QedSection, u: &UnitSystem, seed: Option<u64>, report: &mut Report) -> Result<(), CliError> {
    let geom = BoxGeometry::new(section.edge).map_err(|e| CliError::Config(e.to_string()))?;
    if section.samples == 0 {
        return Err(CliError::Config("qed.samples must be at least 1".into()));
    }
    let couplings = cgauge_core::fock::CouplingToggles { charge: section.charge, mass: section.mass, ..Default::default() };
    couplings.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let ctx = ExchangeContext::new(geom, *u, couplings).with_reading(section.h_reading);
    let eq = equivalence_report(&ctx, section.samples, seed.unwrap_or(section.seed))?;
    if let Value::Object(map) = serde_json::to_value(&eq).expect("serializable") {
        for (k, v) in map {
            report.set(&k, v);
        }
    }
    if section.h_reading == HReading::Hbar {
        report.set(
            "h_reading_note",
            json!("h read as hbar: field normalization is 2*pi smaller than the standard mode expansion"),
        );
    }
    report.check("equivalence", eq.max_rel_diff <= section.tolerance);
    Ok(())
}
