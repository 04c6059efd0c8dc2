//! Run configuration: a JSON document, parsed strictly and then validated.
//!
//! Complex numbers are `[re, im]` pairs, matrices are row-major nested
//! arrays of them.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use cryptoherm::biorthogonal::DEFAULT_TOL;
use cryptoherm::models::scenarios;
use cryptoherm::quasistationary::samplers;
use cryptoherm::quasistationary::DEFAULT_TOL_QS;
use cryptoherm::{ConstantDyson, DysonFamily, ExpPolyDyson, Matrix, TaylorHamiltonian, TimeGrid, Vector};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

impl ConfigError {
    pub fn violations(&self) -> &[String] {
        match self {
            ConfigError::Validation(v) => v,
            ConfigError::Parse { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Decompose,
    Metric,
    Hermitize,
    Evolve,
    NaiveEvolve,
    Crosscheck,
    QsCheck,
    QsScan,
    Demo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Metric => "metric",
            Command::Hermitize => "hermitize",
            Command::Evolve => "evolve",
            Command::NaiveEvolve => "naive-evolve",
            Command::Crosscheck => "crosscheck",
            Command::QsCheck => "qs-check",
            Command::QsScan => "qs-scan",
            Command::Demo => "demo",
        }
    }

    fn is_evolution(self) -> bool {
        matches!(self, Command::Evolve | Command::NaiveEvolve | Command::Crosscheck)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

type RawComplex = [f64; 2];
type RawMatrix = Vec<Vec<RawComplex>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Command,
    model: Option<RawModel>,
    dyson: Option<RawDyson>,
    grid: Option<RawGrid>,
    step: Option<f64>,
    phi0: Option<Vec<RawComplex>>,
    psi0: Option<Vec<RawComplex>>,
    kappa: Option<Vec<f64>>,
    gauge: Option<RawMatrix>,
    seed: Option<u64>,
    tolerances: Option<RawTolerances>,
    scan: Option<RawScan>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    matrix: Option<RawMatrix>,
    taylor: Option<Vec<RawMatrix>>,
    scenario: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDyson {
    Constant { matrix: RawMatrix },
    ExpPoly { generator: RawMatrix, theta: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    t_start: f64,
    t_end: f64,
    n_samples: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    qs: Option<f64>,
    decompose: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    sampler: String,
    trials: usize,
    dim: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    format: Option<TableFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    #[default]
    Csv,
    Tsv,
}

impl TableFormat {
    pub fn delimiter(self) -> char {
        match self {
            TableFormat::Csv => ',',
            TableFormat::Tsv => '\t',
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Tsv => "tsv",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModelSource {
    Matrix(Matrix),
    Taylor(TaylorHamiltonian),
    Scenario(String),
}

#[derive(Debug, Clone, Copy)]
pub struct GridConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub qs: f64,
    pub decompose: f64,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub sampler: String,
    pub trials: usize,
    pub dim: usize,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub model: Option<ModelSource>,
    pub dyson: Option<Arc<dyn DysonFamily>>,
    pub grid: Option<GridConfig>,
    pub step: Option<f64>,
    pub phi0: Option<Vector>,
    pub psi0: Option<Vector>,
    pub kappa: Option<Vec<f64>>,
    pub gauge: Option<Matrix>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub scan: Option<ScanConfig>,
    pub output_dir: Option<PathBuf>,
    pub format: TableFormat,
}

impl RunConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

pub fn parse_config(document: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(document).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Validator::default().finish(raw)
}

#[derive(Default)]
struct Validator {
    violations: Vec<String>,
}

impl Validator {
    fn fail(&mut self, field: &str, msg: impl fmt::Display) {
        self.violations.push(format!("{field}: {msg}"));
    }

    fn number(&mut self, field: &str, x: f64) -> Option<f64> {
        if x.is_finite() {
            Some(x)
        } else {
            self.fail(field, "must be finite");
            None
        }
    }

    fn positive(&mut self, field: &str, x: f64) -> Option<f64> {
        let x = self.number(field, x)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.fail(field, format!("must be > 0, got {x}"));
            None
        }
    }

    fn matrix(&mut self, field: &str, raw: &RawMatrix) -> Option<Matrix> {
        let n = raw.len();
        if n == 0 {
            self.fail(field, "empty matrix");
            return None;
        }
        let mut ok = true;
        for (i, row) in raw.iter().enumerate() {
            if row.len() != n {
                self.fail(
                    &format!("{field}[{i}]"),
                    format!("row has {} entries, matrix must be {n}x{n}", row.len()),
                );
                ok = false;
            }
        }
        if raw.iter().flatten().any(|z| !(z[0].is_finite() && z[1].is_finite())) {
            self.fail(field, "non-finite entry");
            ok = false;
        }
        ok.then(|| Matrix::from_fn(n, n, |i, j| Complex64::new(raw[i][j][0], raw[i][j][1])))
    }

    fn vector(&mut self, field: &str, raw: &[RawComplex]) -> Option<Vector> {
        if raw.is_empty() {
            self.fail(field, "empty vector");
            return None;
        }
        if raw.iter().any(|z| !(z[0].is_finite() && z[1].is_finite())) {
            self.fail(field, "non-finite entry");
            return None;
        }
        Some(Vector::from_iterator(
            raw.len(),
            raw.iter().map(|z| Complex64::new(z[0], z[1])),
        ))
    }

    fn dim(&mut self, field: &str, actual: usize, expected: Option<usize>) {
        if let Some(n) = expected {
            if actual != n {
                self.fail(field, format!("dimension {actual} does not match model dimension {n}"));
            }
        }
    }

    fn model(&mut self, raw: &RawModel) -> Option<ModelSource> {
        let given = [raw.matrix.is_some(), raw.taylor.is_some(), raw.scenario.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if given != 1 {
            self.fail("model", "exactly one of matrix, taylor, scenario is required");
            return None;
        }
        if let Some(m) = &raw.matrix {
            return self.matrix("model.matrix", m).map(ModelSource::Matrix);
        }
        if let Some(name) = &raw.scenario {
            let reg = scenarios();
            if !reg.contains(name) {
                self.fail(
                    "model.scenario",
                    format!("unknown scenario '{name}', known: {}", reg.names().join(", ")),
                );
                return None;
            }
            return Some(ModelSource::Scenario(name.clone()));
        }
        let coeffs = raw.taylor.as_ref()?;
        if coeffs.is_empty() {
            self.fail("model.taylor", "needs at least one coefficient");
            return None;
        }
        let mats: Vec<Option<Matrix>> = coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| self.matrix(&format!("model.taylor[{m}]"), c))
            .collect();
        let mats: Vec<Matrix> = mats.into_iter().collect::<Option<_>>()?;
        let n = mats[0].nrows();
        let mut ok = true;
        for (m, c) in mats.iter().enumerate().skip(1) {
            if c.nrows() != n {
                self.fail(
                    &format!("model.taylor[{m}]"),
                    format!("is {0}x{0}, expected {n}x{n}", c.nrows()),
                );
                ok = false;
            }
        }
        if !ok {
            return None;
        }
        match TaylorHamiltonian::new(mats) {
            Ok(h) => Some(ModelSource::Taylor(h)),
            Err(e) => {
                self.fail("model.taylor", e);
                None
            }
        }
    }

    fn dyson(&mut self, raw: &RawDyson, n: Option<usize>) -> Option<Arc<dyn DysonFamily>> {
        match raw {
            RawDyson::Constant { matrix } => {
                let m = self.matrix("dyson.matrix", matrix)?;
                self.dim("dyson.matrix", m.nrows(), n);
                Some(Arc::new(ConstantDyson::new(m)))
            }
            RawDyson::ExpPoly { generator, theta } => {
                let g = self.matrix("dyson.generator", generator)?;
                self.dim("dyson.generator", g.nrows(), n);
                if theta.is_empty() {
                    self.fail("dyson.theta", "needs at least one coefficient");
                    return None;
                }
                if theta.iter().any(|x| !x.is_finite()) {
                    self.fail("dyson.theta", "non-finite coefficient");
                    return None;
                }
                match ExpPolyDyson::new(g, theta.clone()) {
                    Ok(f) => Some(Arc::new(f)),
                    Err(e) => {
                        self.fail("dyson", e);
                        None
                    }
                }
            }
        }
    }

    fn finish(mut self, raw: RawConfig) -> Result<RunConfig, ConfigError> {
        let cmd = raw.command;
        let model = raw.model.as_ref().and_then(|m| self.model(m));
        let scenario = matches!(model, Some(ModelSource::Scenario(_)));
        let n = match &model {
            Some(ModelSource::Matrix(m)) => Some(m.nrows()),
            Some(ModelSource::Taylor(h)) => Some(h.dim()),
            _ => None,
        };

        match cmd {
            Command::Decompose | Command::Metric | Command::Hermitize => match &raw.model {
                None => self.fail("model.matrix", format!("required for {cmd}")),
                Some(r) if r.matrix.is_none() => self.fail("model.matrix", format!("{cmd} takes a single matrix")),
                _ => {}
            },
            Command::QsCheck => match &model {
                Some(ModelSource::Matrix(_)) => self.fail("model.taylor", "qs-check needs a Taylor model"),
                Some(ModelSource::Taylor(h)) if h.degree() == 0 => {
                    self.fail("model.taylor", "qs-check needs at least two coefficients")
                }
                None if raw.model.is_none() => self.fail("model", "required for qs-check"),
                _ => {}
            },
            Command::Evolve | Command::NaiveEvolve | Command::Crosscheck => {
                if raw.model.is_none() {
                    self.fail("model", format!("required for {cmd}"));
                }
            }
            Command::Demo => {
                if model.is_some() && !scenario {
                    self.fail("model", "demo only accepts a named scenario");
                }
            }
            Command::QsScan => {
                if raw.model.is_some() {
                    self.fail("model", "not used by qs-scan");
                }
            }
        }

        let dyson = match (&raw.dyson, scenario) {
            (Some(_), true) => {
                self.fail("dyson", "a scenario brings its own Dyson family");
                None
            }
            (Some(d), false) => self.dyson(d, n),
            (None, false) if cmd.is_evolution() && raw.model.is_some() => {
                self.fail("dyson", format!("required for {cmd}"));
                None
            }
            (None, _) => None,
        };

        let grid = raw.grid.as_ref().and_then(|g| {
            let (a, b) = (
                self.number("grid.t_start", g.t_start)?,
                self.number("grid.t_end", g.t_end)?,
            );
            let mut ok = true;
            if g.n_samples < 2 {
                self.fail("grid.n_samples", format!("must be >= 2, got {}", g.n_samples));
                ok = false;
            }
            if b <= a {
                self.fail("grid.t_end", "must exceed grid.t_start");
                ok = false;
            }
            ok.then_some(GridConfig {
                t_start: a,
                t_end: b,
                n_samples: g.n_samples,
            })
        });
        let step = raw.step.and_then(|s| self.positive("step", s));
        if cmd.is_evolution() && !scenario {
            if raw.grid.is_none() {
                self.fail("grid", format!("required for {cmd}"));
            }
            if raw.step.is_none() {
                self.fail("step", format!("required for {cmd}"));
            }
            if raw.phi0.is_none() {
                self.fail("phi0", format!("required for {cmd}"));
            }
        }
        if let (Some(g), Some(s)) = (grid, step) {
            if let Err(e) = TimeGrid::uniform(g.t_start, g.t_end, g.n_samples).and_then(|tg| tg.substeps(s)) {
                self.fail("step", e);
            }
        }

        let phi0 = raw.phi0.as_ref().and_then(|v| self.vector("phi0", v));
        if let Some(v) = &phi0 {
            self.dim("phi0", v.len(), n);
        }
        let psi0 = raw.psi0.as_ref().and_then(|v| self.vector("psi0", v));
        if let Some(v) = &psi0 {
            self.dim("psi0", v.len(), n);
            if cmd == Command::NaiveEvolve {
                self.fail("psi0", "naive-evolve derives the dual from the metric");
            }
        }

        let kappa = raw.kappa.clone().inspect(|k| {
            for (j, &x) in k.iter().enumerate() {
                self.positive(&format!("kappa[{j}]"), x);
            }
            self.dim("kappa", k.len(), n);
        });
        let gauge = raw.gauge.as_ref().and_then(|g| self.matrix("gauge", g));
        if let Some(g) = &gauge {
            self.dim("gauge", g.nrows(), n);
            if cmd != Command::Hermitize {
                self.fail("gauge", "only used by hermitize");
            }
        }

        let tol = raw.tolerances.unwrap_or_default();
        let tolerances = Tolerances {
            qs: tol
                .qs
                .and_then(|x| self.positive("tolerances.qs", x))
                .unwrap_or(DEFAULT_TOL_QS),
            decompose: tol
                .decompose
                .and_then(|x| self.positive("tolerances.decompose", x))
                .unwrap_or(DEFAULT_TOL),
        };

        let scan = raw.scan.map(|s| {
            if !samplers().contains(&s.sampler) {
                self.fail(
                    "scan.sampler",
                    format!(
                        "unknown sampler '{}', known: {}",
                        s.sampler,
                        samplers().names().join(", ")
                    ),
                );
            }
            if s.trials == 0 {
                self.fail("scan.trials", "must be >= 1");
            }
            if s.dim < 2 {
                self.fail("scan.dim", format!("must be >= 2, got {}", s.dim));
            }
            ScanConfig {
                sampler: s.sampler,
                trials: s.trials,
                dim: s.dim,
            }
        });
        if cmd == Command::QsScan && scan.is_none() {
            self.fail("scan", "required for qs-scan");
        }

        let output = raw.output.unwrap_or_default();
        if !self.violations.is_empty() {
            return Err(ConfigError::Validation(self.violations));
        }
        Ok(RunConfig {
            command: cmd,
            model,
            dyson,
            grid,
            step,
            phi0,
            psi0,
            kappa,
            gauge,
            seed: raw.seed.unwrap_or(0),
            tolerances,
            scan,
            output_dir: output.dir,
            format: output.format.unwrap_or_default(),
        })
    }
}
