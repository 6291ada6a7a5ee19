//! Config-driven verification runs, JSON reports and point-cloud export.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{self, integrate_frame, FrameField};
use crate::gauss::{conformality_diagnostics, ConformalityDiagnostics, GaussKind};
use crate::loopgroup::{
    self, flatness_scan, gauge_transform, loop_connection, twisted_symmetry_residual,
    FlatnessEntry, GaugeReadback, PrimitivityReport, Twisting,
};
use crate::surface::{
    Classification, Rect, SurfaceModel, SurfaceSpec, DEFAULT_LAMBDAS, DEFAULT_TOLERANCE,
};
use crate::{Mat4, C64};

pub const SCHEMA_VERSION: u32 = 1;
/// Spectral parameter used for the twisted-symmetry check.
pub const SYMMETRY_LAMBDA: (f64, f64) = (0.7, 0.3);
/// Spectral parameter used for the gauge readback.
pub const GAUGE_LAMBDA: f64 = 2.0;
/// Relative tolerance for closed-form inner products.
pub const CLOSED_FORM_TOL: f64 = 1e-7;

/// On-disk configuration for one surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub name: String,
    pub b: String,
    pub c: String,
    pub p: String,
    pub q: String,
    pub domain: Rect,
    pub grid: [usize; 2],
    #[serde(default = "default_lambdas")]
    pub lambda_samples: Vec<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Frame at the lower-left corner; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_frame: Option<[[f64; 4]; 4]>,
}

fn default_lambdas() -> Vec<f64> {
    DEFAULT_LAMBDAS.to_vec()
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// Command-line overrides of config values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub grid: Option<(usize, usize)>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(t) = o.tolerance {
            self.tolerance = t;
        }
        if let Some(l) = &o.lambdas {
            self.lambda_samples = l.clone();
        }
        if let Some((nx, ny)) = o.grid {
            self.grid = [nx, ny];
        }
        self
    }

    pub fn to_spec(&self) -> Result<SurfaceSpec> {
        let mut spec = SurfaceSpec::parse(&self.name, &self.b, &self.c, &self.p, &self.q)?
            .with_domain(self.domain)
            .with_grid(self.grid[0], self.grid[1]);
        spec.lambda_samples = self.lambda_samples.clone();
        spec.tolerance = self.tolerance;
        spec.validate()?;
        Ok(spec)
    }

    pub fn initial_frame(&self) -> Mat4 {
        self.initial_frame
            .map(Mat4::new)
            .unwrap_or_else(Mat4::identity)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathIndependence {
    pub steps: usize,
    pub residual: f64,
    pub residual_half_steps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatnessTable {
    pub entries: Vec<FlatnessEntry>,
    pub max_residual: f64,
    pub flat: bool,
}

impl FlatnessTable {
    fn new(entries: Vec<FlatnessEntry>, tol: f64) -> Self {
        let max_residual = entries.iter().map(|e| e.max_residual).fold(0.0, f64::max);
        Self {
            entries,
            max_residual,
            flat: max_residual <= tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalitySummary {
    /// Diagnostics at the domain centre.
    pub at_center: ConformalityDiagnostics,
    /// Grid sup of `|computed − closed form| / (1 + |closed form|)`.
    pub max_closed_form_deviation: f64,
    pub max_abs_exx: f64,
    pub max_abs_eyy: f64,
    pub conformal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Symmetry {
    pub lambda: [f64; 2],
    pub max_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Primitivity {
    pub worst: PrimitivityReport,
    pub primitive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Equivalence {
    pub statement: String,
    pub lhs: bool,
    pub rhs: bool,
    /// `iff` or `implies`.
    pub relation: &'static str,
    pub holds: bool,
}

impl Equivalence {
    fn iff(statement: &str, lhs: bool, rhs: bool) -> Self {
        Self {
            statement: statement.into(),
            lhs,
            rhs,
            relation: "iff",
            holds: lhs == rhs,
        }
    }

    fn implies(statement: &str, lhs: bool, rhs: bool) -> Self {
        Self {
            statement: statement.into(),
            lhs,
            rhs,
            relation: "implies",
            holds: !lhs || rhs,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub spec: Config,
    pub classification: Classification,
    pub mc_residual_sup: f64,
    pub path_independence: PathIndependence,
    pub max_det_drift: f64,
    pub flatness_tau1: FlatnessTable,
    pub flatness_tau2: FlatnessTable,
    pub first_order_gauss: ConformalitySummary,
    pub conformal_gauss: ConformalitySummary,
    pub twisted_symmetry: Option<Symmetry>,
    pub primitivity: Option<Primitivity>,
    pub gauge: GaugeReadback,
    pub equivalences: Vec<Equivalence>,
    pub all_verified: bool,
    pub timing: Timing,
}

impl DiagnosticsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn interior_nodes(spec: &SurfaceSpec) -> Vec<(usize, usize)> {
    let (nx, ny) = spec.grid;
    spec.nodes()
        .into_iter()
        .filter(|&(i, j)| i > 0 && j > 0 && i + 1 < nx && j + 1 < ny)
        .collect()
}

fn fd_step(spec: &SurfaceSpec) -> f64 {
    let (hx, hy) = spec.spacing();
    frame::DEFAULT_FD_STEP.min(0.5 * hx.min(hy))
}

fn conformality_summary(
    model: &SurfaceModel,
    field: &FrameField,
    kind: GaussKind,
) -> Result<ConformalitySummary> {
    let spec = model.spec();
    let (cx, cy) = spec.domain.center();
    let f_center = frame::integrate_to(
        model,
        &field.initial,
        field.base,
        (cx, cy),
        spec.spacing().0.min(spec.spacing().1) / frame::SUBSTEPS_PER_CELL as f64,
    )?;
    let at_center = conformality_diagnostics(&f_center, &model.invariants_at(cx, cy)?, kind)?;
    let mut dev: f64 = 0.0;
    let mut exx: f64 = 0.0;
    let mut eyy: f64 = 0.0;
    for (i, j) in spec.nodes() {
        let (x, y) = spec.node(i, j);
        let d = conformality_diagnostics(field.at(i, j), &model.invariants_at(x, y)?, kind)?;
        for (a, b) in d.computed().iter().zip(d.closed_form) {
            dev = dev.max((a - b).abs() / (1.0 + b.abs()));
        }
        exx = exx.max(d.exx.abs());
        eyy = eyy.max(d.eyy.abs());
    }
    Ok(ConformalitySummary {
        at_center,
        max_closed_form_deviation: dev,
        max_abs_exx: exx,
        max_abs_eyy: eyy,
        conformal: exx <= spec.tolerance && eyy <= spec.tolerance,
    })
}

/// Runs every diagnostic for one config.
pub fn run(config: &Config) -> Result<DiagnosticsReport> {
    let started = Instant::now();
    let spec = config.to_spec()?;
    let model = SurfaceModel::new(spec.clone())?;
    let tol = spec.tolerance;
    let classification = model.classify()?;

    let h = fd_step(&spec);
    let mut mc_residual_sup: f64 = 0.0;
    for (i, j) in interior_nodes(&spec) {
        let (x, y) = spec.node(i, j);
        mc_residual_sup = mc_residual_sup.max(frame::mc_residual(&model, x, y, h)?.max_abs());
    }

    let steps = (spec.grid.0.max(spec.grid.1) - 1) * frame::SUBSTEPS_PER_CELL;
    let path_independence = PathIndependence {
        steps,
        residual: frame::path_independence_residual(&model, spec.domain, steps)?,
        residual_half_steps: frame::path_independence_residual(
            &model,
            spec.domain,
            (steps / 2).max(1),
        )?,
    };

    let field = integrate_frame(&model, &config.initial_frame())?;
    let flatness_tau1 = FlatnessTable::new(
        flatness_scan(&model, Twisting::Tau1, &spec.lambda_samples, h)?,
        tol,
    );
    let flatness_tau2 = FlatnessTable::new(
        flatness_scan(&model, Twisting::Tau2, &spec.lambda_samples, h)?,
        tol,
    );
    let first_order_gauss = conformality_summary(&model, &field, GaussKind::FirstOrder)?;
    let conformal_gauss = conformality_summary(&model, &field, GaussKind::Conformal)?;

    let (twisted_symmetry, primitivity) = if classification.demoulin {
        let lambda = C64::new(SYMMETRY_LAMBDA.0, SYMMETRY_LAMBDA.1);
        let mut sym: f64 = 0.0;
        let mut worst = PrimitivityReport {
            grading_leakage: 0.0,
            imaginary_leakage: 0.0,
        };
        for (i, j) in spec.nodes() {
            let (x, y) = spec.node(i, j);
            let jet = model.invariants_at(x, y)?;
            sym = sym.max(twisted_symmetry_residual(&jet, lambda, tol)?);
            let p = loopgroup::primitivity(&jet);
            worst.grading_leakage = worst.grading_leakage.max(p.grading_leakage);
            worst.imaginary_leakage = worst.imaginary_leakage.max(p.imaginary_leakage);
        }
        (
            Some(Symmetry {
                lambda: [lambda.re, lambda.im],
                max_residual: sym,
            }),
            Some(Primitivity {
                primitive: worst.is_primitive(tol),
                worst,
            }),
        )
    } else {
        (None, None)
    };

    let (cx, cy) = spec.domain.center();
    let gauge = gauge_transform(&loop_connection(
        &model.invariants_at(cx, cy)?,
        C64::new(GAUGE_LAMBDA, 0.0),
        Twisting::Tau1,
    )?)?;

    let c = &classification;
    let mut equivalences = vec![
        Equivalence::iff(
            "first-order Gauss map conformal <=> Demoulin",
            first_order_gauss.conformal,
            c.demoulin,
        ),
        Equivalence::iff(
            "tau1 family flat for all sampled lambda <=> Demoulin or coincidence-flat",
            flatness_tau1.flat,
            c.demoulin || c.coincidence_flat,
        ),
        Equivalence::iff(
            "tau2 family flat for all sampled lambda <=> projective minimal",
            flatness_tau2.flat,
            c.projective_minimal,
        ),
        Equivalence::implies(
            "Demoulin => projective minimal",
            c.demoulin,
            c.projective_minimal,
        ),
        Equivalence::implies(
            "valid surface => conformal Gauss map conformal",
            c.valid_surface,
            conformal_gauss.conformal,
        ),
        Equivalence::implies(
            "always => closed-form inner products match",
            true,
            first_order_gauss.max_closed_form_deviation <= CLOSED_FORM_TOL
                && conformal_gauss.max_closed_form_deviation <= CLOSED_FORM_TOL,
        ),
    ];
    if let (Some(sym), Some(prim)) = (&twisted_symmetry, &primitivity) {
        equivalences.push(Equivalence::implies(
            "Demoulin => twisted (order six) symmetry",
            true,
            sym.max_residual <= tol,
        ));
        equivalences.push(Equivalence::implies(
            "Demoulin => Lorentz primitive",
            true,
            prim.primitive,
        ));
    }
    let all_verified = equivalences.iter().all(|e| e.holds);

    Ok(DiagnosticsReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        spec: config.clone(),
        classification,
        mc_residual_sup,
        path_independence,
        max_det_drift: field.max_det_drift,
        flatness_tau1,
        flatness_tau2,
        first_order_gauss,
        conformal_gauss,
        twisted_symmetry,
        primitivity,
        gauge,
        equivalences,
        all_verified,
        timing: Timing {
            elapsed_ms: started.elapsed().as_millis() as u64,
        },
    })
}

/// Loads `config_path`, runs [`run`] and writes the JSON report when
/// `out` is given.
pub fn run_report(
    config_path: impl AsRef<Path>,
    overrides: &Overrides,
    out: Option<&Path>,
) -> Result<DiagnosticsReport> {
    let config = Config::load(config_path)?.apply(overrides);
    let report = run(&config)?;
    if let Some(out) = out {
        report.write(out)?;
    }
    Ok(report)
}

/// One row of the exported point cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    pub s: [f64; 3],
}

/// Affine chart `S = (f¹, f², f³)/f⁰` of the lift at every grid node.
pub fn surface_points(config: &Config) -> Result<Vec<SurfacePoint>> {
    let spec = config.to_spec()?;
    let model = SurfaceModel::new(spec.clone())?;
    let class = model.classify()?;
    if !class.valid_surface {
        return Err(Error::InvalidSurface {
            residual: class.sup.compatibility,
        });
    }
    let field = integrate_frame(&model, &config.initial_frame())?;
    let mut out = Vec::with_capacity(field.frames.len());
    for (i, j) in spec.nodes() {
        let (x, y) = spec.node(i, j);
        let f = field.lift(i, j);
        if !(f[0].abs() > spec.tolerance) {
            return Err(Error::ChartFailure {
                i,
                j,
                x,
                y,
                f0: f[0],
            });
        }
        out.push(SurfacePoint {
            x,
            y,
            s: [f[1] / f[0], f[2] / f[0], f[3] / f[0]],
        });
    }
    Ok(out)
}

pub fn write_csv(points: &[SurfacePoint], mut w: impl Write) -> Result<()> {
    writeln!(w, "x,y,s1,s2,s3")?;
    for p in points {
        writeln!(w, "{},{},{},{},{}", p.x, p.y, p.s[0], p.s[1], p.s[2])?;
    }
    Ok(())
}

/// Writes the point cloud for `config_path` to `out_path` as CSV.
pub fn export_surface(
    config_path: impl AsRef<Path>,
    overrides: &Overrides,
    out_path: impl AsRef<Path>,
) -> Result<usize> {
    let config = Config::load(config_path)?.apply(overrides);
    let points = surface_points(&config)?;
    let file = std::fs::File::create(out_path)?;
    let mut w = std::io::BufWriter::new(file);
    write_csv(&points, &mut w)?;
    w.flush()?;
    Ok(points.len())
}
