use std::io;
use std::sync::Arc;

use serde::Serialize;

use cryptoherm::linalg::{self, hermiticity_residual};
use cryptoherm::metric::{dyson_from_metric_with_gauge, quasi_hermiticity_residual, Warning};
use cryptoherm::models::scenarios;
use cryptoherm::quasistationary::samplers;
use cryptoherm::registry::{Named, Registry};
use cryptoherm::{
    biorthogonal_decompose, crosscheck_pictures, dyson_from_metric, hermitize, metric_from_spectral, propagate_naive,
    propagate_pair, qs_certify, qs_scan, DerivativeSource, DysonFamily, Error, Matrix, QsStatus, StateTrajectory,
    TaylorHamiltonian, TimeGrid, Vector,
};

use crate::config::{ModelSource, RunConfig};
use crate::output::{self, JsonComplex, Sink};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    pub fn name(&self) -> &'static str {
        match self {
            RunError::Numerical(e) => e.name(),
            RunError::Io(_) => "Io",
        }
    }
}

/// Human-readable lines for the terminal.
pub type Summary = Vec<String>;

pub trait Subcommand: Named + Send + Sync {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError>;
}

pub fn commands() -> Registry<dyn Subcommand> {
    let mut reg: Registry<dyn Subcommand> = Registry::new("command");
    reg.register(Arc::new(Decompose))
        .register(Arc::new(MetricCmd))
        .register(Arc::new(Hermitize))
        .register(Arc::new(Evolve))
        .register(Arc::new(NaiveEvolve))
        .register(Arc::new(Crosscheck))
        .register(Arc::new(QsCheck))
        .register(Arc::new(QsScan))
        .register(Arc::new(Demo));
    reg
}

fn single_matrix(cfg: &RunConfig) -> Result<&Matrix, Error> {
    match &cfg.model {
        Some(ModelSource::Matrix(m)) => Ok(m),
        _ => Err(Error::InvalidArgument("command needs model.matrix".into())),
    }
}

fn weights(cfg: &RunConfig, n: usize) -> Vec<f64> {
    cfg.kappa.clone().unwrap_or_else(|| vec![1.0; n])
}

struct EvolutionInputs {
    label: String,
    hamiltonian: TaylorHamiltonian,
    dyson: Arc<dyn DysonFamily>,
    phi0: Vector,
    grid: TimeGrid,
    step: f64,
}

/// Scenario defaults, overridden by explicit grid/step/phi0.
fn evolution_inputs(cfg: &RunConfig) -> Result<EvolutionInputs, Error> {
    let grid = cfg
        .grid
        .map(|g| TimeGrid::uniform(g.t_start, g.t_end, g.n_samples))
        .transpose()?;
    match &cfg.model {
        Some(ModelSource::Scenario(name)) => {
            let s = scenarios().get(name)?.build(cfg.seed)?;
            Ok(EvolutionInputs {
                label: s.name,
                hamiltonian: s.hamiltonian,
                dyson: s.dyson,
                phi0: cfg.phi0.clone().unwrap_or(s.phi0),
                grid: grid.unwrap_or(s.grid),
                step: cfg.step.unwrap_or(s.step),
            })
        }
        Some(model) => {
            let hamiltonian = match model {
                ModelSource::Matrix(m) => TaylorHamiltonian::constant(m.clone())?,
                ModelSource::Taylor(h) => h.clone(),
                ModelSource::Scenario(_) => unreachable!(),
            };
            let missing = |what: &str| Error::InvalidArgument(format!("missing {what}"));
            Ok(EvolutionInputs {
                label: "inline".into(),
                hamiltonian,
                dyson: cfg.dyson.clone().ok_or_else(|| missing("dyson"))?,
                phi0: cfg.phi0.clone().ok_or_else(|| missing("phi0"))?,
                grid: grid.ok_or_else(|| missing("grid"))?,
                step: cfg.step.ok_or_else(|| missing("step"))?,
            })
        }
        None => Err(Error::InvalidArgument("missing model".into())),
    }
}

struct Decompose;

impl Named for Decompose {
    fn name(&self) -> &'static str {
        "decompose"
    }
}

#[derive(Serialize)]
struct DecomposeDoc {
    dim: usize,
    eigenvalues: Vec<JsonComplex>,
    right_vectors: Vec<Vec<JsonComplex>>,
    left_vectors: Vec<Vec<JsonComplex>>,
    condition_estimate: f64,
    biorthonormality_residual: f64,
    completeness_residual: f64,
}

impl Subcommand for Decompose {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let m = single_matrix(cfg)?;
        let sys = biorthogonal_decompose(m, cfg.tolerances.decompose)?;
        let doc = DecomposeDoc {
            dim: sys.dim(),
            eigenvalues: sys.eigenvalues().iter().copied().map(output::complex).collect(),
            right_vectors: output::columns(sys.right_vectors()),
            left_vectors: output::columns(sys.left_vectors()),
            condition_estimate: sys.condition_estimate(),
            biorthonormality_residual: sys.biorthonormality_residual(),
            completeness_residual: sys.completeness_residual(),
        };
        sink.json("decompose", &doc)?;
        let ev: Vec<String> = sys
            .eigenvalues()
            .iter()
            .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
            .collect();
        Ok(vec![
            format!("eigenvalues: {}", ev.join(", ")),
            format!("condition estimate: {:.3e}", doc.condition_estimate),
        ])
    }
}

struct MetricCmd;

impl Named for MetricCmd {
    fn name(&self) -> &'static str {
        "metric"
    }
}

#[derive(Serialize)]
struct MetricDoc {
    kappa: Vec<f64>,
    theta: Vec<Vec<JsonComplex>>,
    min_eig: f64,
    max_eig: f64,
    condition: f64,
    quasi_hermiticity_residual: f64,
    warning: Option<Warning>,
}

impl Subcommand for MetricCmd {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let m = single_matrix(cfg)?;
        let sys = biorthogonal_decompose(m, cfg.tolerances.decompose)?;
        let kappa = weights(cfg, sys.dim());
        let theta = metric_from_spectral(&sys, &kappa)?;
        let doc = MetricDoc {
            theta: output::matrix(theta.matrix()),
            min_eig: theta.min_eig(),
            max_eig: theta.max_eig(),
            condition: theta.condition(),
            quasi_hermiticity_residual: quasi_hermiticity_residual(m, &theta),
            warning: theta.warning(),
            kappa,
        };
        sink.json("metric", &doc)?;
        Ok(vec![format!(
            "metric eigenvalues in [{:.6e}, {:.6e}], quasi-Hermiticity residual {:.3e}",
            doc.min_eig, doc.max_eig, doc.quasi_hermiticity_residual
        )])
    }
}

struct Hermitize;

impl Named for Hermitize {
    fn name(&self) -> &'static str {
        "hermitize"
    }
}

#[derive(Serialize)]
struct HermitizeDoc {
    kappa: Vec<f64>,
    omega: Vec<Vec<JsonComplex>>,
    h: Vec<Vec<JsonComplex>>,
    hermiticity_residual: f64,
    spectrum: Vec<f64>,
}

impl Subcommand for Hermitize {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let m = single_matrix(cfg)?;
        let sys = biorthogonal_decompose(m, cfg.tolerances.decompose)?;
        let kappa = weights(cfg, sys.dim());
        let theta = metric_from_spectral(&sys, &kappa)?;
        let omega = match &cfg.gauge {
            Some(u) => dyson_from_metric_with_gauge(&theta, u)?,
            None => dyson_from_metric(&theta)?,
        };
        let h = hermitize(m, &omega)?;
        let doc = HermitizeDoc {
            kappa,
            omega: output::matrix(&omega),
            hermiticity_residual: hermiticity_residual(&h),
            spectrum: linalg::hermitian_eigenvalues(&linalg::hermitian_part(&h)),
            h: output::matrix(&h),
        };
        sink.json("hermitize", &doc)?;
        Ok(vec![format!(
            "relative hermiticity residual {:.3e}",
            doc.hermiticity_residual
        )])
    }
}

#[derive(Serialize)]
struct TrajectoryDoc {
    model: String,
    picture: &'static str,
    derivative_source: DerivativeSource,
    dim: usize,
    samples: usize,
    t_start: f64,
    t_end: f64,
    step: f64,
    max_norm_drift: f64,
    final_overlap: JsonComplex,
}

impl TrajectoryDoc {
    fn new(inp: &EvolutionInputs, traj: &StateTrajectory) -> Self {
        Self {
            model: inp.label.clone(),
            picture: traj.picture,
            derivative_source: traj.derivative_source,
            dim: traj.dim(),
            samples: traj.times.len(),
            t_start: inp.grid.start(),
            t_end: inp.grid.end(),
            step: inp.step,
            max_norm_drift: traj.max_norm_drift,
            final_overlap: output::complex(*traj.overlap.last().expect("grid has >= 2 samples")),
        }
    }
}

struct Evolve;

impl Named for Evolve {
    fn name(&self) -> &'static str {
        "evolve"
    }
}

impl Subcommand for Evolve {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let inp = evolution_inputs(cfg)?;
        let traj = propagate_pair(
            &inp.hamiltonian,
            inp.dyson.as_ref(),
            &inp.phi0,
            cfg.psi0.as_ref(),
            &inp.grid,
            inp.step,
        )?;
        sink.trajectory("trajectory", &traj)?;
        sink.json("evolve", &TrajectoryDoc::new(&inp, &traj))?;
        Ok(vec![format!("covariant max norm drift {:.3e}", traj.max_norm_drift)])
    }
}

struct NaiveEvolve;

impl Named for NaiveEvolve {
    fn name(&self) -> &'static str {
        "naive-evolve"
    }
}

impl Subcommand for NaiveEvolve {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let inp = evolution_inputs(cfg)?;
        let traj = propagate_naive(&inp.hamiltonian, inp.dyson.as_ref(), &inp.phi0, &inp.grid, inp.step)?;
        sink.trajectory("trajectory_naive", &traj)?;
        sink.json("naive_evolve", &TrajectoryDoc::new(&inp, &traj))?;
        Ok(vec![format!("naive max norm drift {:.3e}", traj.max_norm_drift)])
    }
}

struct Crosscheck;

impl Named for Crosscheck {
    fn name(&self) -> &'static str {
        "crosscheck"
    }
}

impl Subcommand for Crosscheck {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let inp = evolution_inputs(cfg)?;
        let report = crosscheck_pictures(&inp.hamiltonian, inp.dyson.as_ref(), &inp.phi0, &inp.grid, inp.step)?;
        sink.json("crosscheck", &report)?;
        Ok(vec![
            format!("max pairwise deviation {:.3e}", report.max_pairwise()),
            format!("naive vs covariant {:.3e}", report.pair_vs_naive),
        ])
    }
}

struct QsCheck;

impl Named for QsCheck {
    fn name(&self) -> &'static str {
        "qs-check"
    }
}

#[derive(Serialize)]
struct CertificateDoc {
    status: QsStatus,
    tol_qs: f64,
    kappa: Option<Vec<f64>>,
    metric: Option<Vec<Vec<JsonComplex>>>,
    first_violation_order: Option<usize>,
    residuals: Vec<f64>,
    extracted_weights: Vec<JsonComplex>,
    detail: String,
}

impl Subcommand for QsCheck {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let h = match &cfg.model {
            Some(ModelSource::Taylor(h)) => h.clone(),
            Some(ModelSource::Scenario(name)) => scenarios().get(name)?.build(cfg.seed)?.hamiltonian,
            _ => return Err(Error::InvalidArgument("qs-check needs a Taylor model".into()).into()),
        };
        let cert = qs_certify(&h, cfg.tolerances.qs)?;
        let doc = CertificateDoc {
            status: cert.status,
            tol_qs: cfg.tolerances.qs,
            kappa: cert.kappa.clone(),
            metric: cert.metric.as_ref().map(|m| output::matrix(m.matrix())),
            first_violation_order: cert.first_violation_order,
            residuals: cert.residuals.clone(),
            extracted_weights: cert.extracted_weights.iter().copied().map(output::complex).collect(),
            detail: cert.detail.clone(),
        };
        sink.json("certificate", &doc)?;
        let mut lines = vec![format!("status: {:?}", cert.status).to_lowercase()];
        if let Some(k) = cert.first_violation_order {
            lines.push(format!("first violation at order {k}"));
        }
        Ok(lines)
    }
}

struct QsScan;

impl Named for QsScan {
    fn name(&self) -> &'static str {
        "qs-scan"
    }
}

impl Subcommand for QsScan {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let scan = cfg
            .scan
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("qs-scan needs a scan section".into()))?;
        let sampler = samplers().get(&scan.sampler)?;
        let stats = qs_scan(sampler.as_ref(), scan.trials, scan.dim, cfg.seed, cfg.tolerances.qs)?;
        sink.json("scan", &stats)?;
        Ok(vec![
            format!(
                "pairs: {} compatible, {} incompatible, {} exceptional",
                stats.pair_compatible, stats.pair_incompatible, stats.pair_exceptional
            ),
            format!(
                "degree-2 extensions: {} compatible, {} incompatible, {} fail first at order 2",
                stats.extended_compatible, stats.extended_incompatible, stats.extended_first_violation_2
            ),
        ])
    }
}

pub const DEMO_SCENARIO: &str = "falsification";

struct Demo;

impl Named for Demo {
    fn name(&self) -> &'static str {
        "demo"
    }
}

#[derive(Serialize)]
struct DemoDoc {
    scenario: String,
    seed: u64,
    dim: usize,
    samples: usize,
    step: f64,
    covariant_drift: f64,
    naive_drift: f64,
    /// `null` when the covariant drift is exactly zero.
    drift_gap: Option<f64>,
}

impl Subcommand for Demo {
    fn run(&self, cfg: &RunConfig, sink: &mut Sink) -> Result<Summary, RunError> {
        let mut cfg = cfg.clone();
        if cfg.model.is_none() {
            cfg.model = Some(ModelSource::Scenario(DEMO_SCENARIO.into()));
        }
        let inp = evolution_inputs(&cfg)?;
        let fam = inp.dyson.as_ref();
        let cov = propagate_pair(&inp.hamiltonian, fam, &inp.phi0, None, &inp.grid, inp.step)?;
        let naive = propagate_naive(&inp.hamiltonian, fam, &inp.phi0, &inp.grid, inp.step)?;
        sink.trajectory("trajectory_covariant", &cov)?;
        sink.trajectory("trajectory_naive", &naive)?;
        let doc = DemoDoc {
            scenario: inp.label.clone(),
            seed: cfg.seed,
            dim: cov.dim(),
            samples: cov.times.len(),
            step: inp.step,
            covariant_drift: cov.max_norm_drift,
            naive_drift: naive.max_norm_drift,
            drift_gap: (cov.max_norm_drift > 0.0).then(|| naive.max_norm_drift / cov.max_norm_drift),
        };
        sink.json("summary", &doc)?;
        Ok(vec![
            format!("scenario {}", doc.scenario),
            format!("covariant max norm drift {:.3e}", doc.covariant_drift),
            format!("naive max norm drift     {:.3e}", doc.naive_drift),
        ])
    }
}
