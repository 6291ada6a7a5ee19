//! Projective invariants of a canonical system and the classification of
//! the surface it describes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};

/// Closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self {
            x: [x0, x1],
            y: [y0, y1],
        }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x[0] <= x && x <= self.x[1] && self.y[0] <= y && y <= self.y[1]
    }

    pub fn width(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn height(&self) -> f64 {
        self.y[1] - self.y[0]
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x[0] + self.x[1]), 0.5 * (self.y[0] + self.y[1]))
    }
}

/// Default spectral parameters sampled by flatness scans.
pub const DEFAULT_LAMBDAS: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// A surface given by the coefficients `b, c, p, q` of its canonical system,
/// plus the sampling settings used to verify it.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec {
    pub name: String,
    pub b: Expr,
    pub c: Expr,
    pub p: Expr,
    pub q: Expr,
    pub domain: Rect,
    pub grid: (usize, usize),
    pub lambda_samples: Vec<f64>,
    pub tolerance: f64,
}

impl SurfaceSpec {
    /// Spec on the unit square with a 33×33 grid and the default λ samples.
    pub fn new(name: &str, b: Expr, c: Expr, p: Expr, q: Expr) -> Self {
        Self {
            name: name.to_string(),
            b,
            c,
            p,
            q,
            domain: Rect::unit(),
            grid: (33, 33),
            lambda_samples: DEFAULT_LAMBDAS.to_vec(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Parses the four coefficient strings.
    pub fn parse(name: &str, b: &str, c: &str, p: &str, q: &str) -> Result<Self> {
        Ok(Self::new(
            name,
            b.parse()?,
            c.parse()?,
            p.parse()?,
            q.parse()?,
        ))
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_grid(mut self, nx: usize, ny: usize) -> Self {
        self.grid = (nx, ny);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (nx, ny) = self.grid;
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidSpec(format!(
                "grid {nx}x{ny} needs at least 2x2 nodes"
            )));
        }
        if self
            .lambda_samples
            .iter()
            .any(|l| *l == 0.0 || !l.is_finite())
        {
            return Err(Error::InvalidSpec(
                "lambda samples must be finite and nonzero".into(),
            ));
        }
        let d = &self.domain;
        if !(d.x[0] < d.x[1] && d.y[0] < d.y[1]) {
            return Err(Error::InvalidSpec(format!("empty domain {d:?}")));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidSpec("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> (f64, f64) {
        let (nx, ny) = self.grid;
        (
            self.domain.width() / (nx - 1) as f64,
            self.domain.height() / (ny - 1) as f64,
        )
    }

    /// Coordinates of grid node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let (hx, hy) = self.spacing();
        let (nx, ny) = self.grid;
        // pin the far edge exactly
        let x = if i + 1 == nx {
            self.domain.x[1]
        } else {
            self.domain.x[0] + i as f64 * hx
        };
        let y = if j + 1 == ny {
            self.domain.y[1]
        } else {
            self.domain.y[0] + j as f64 * hy
        };
        (x, y)
    }

    /// All nodes, row by row (`j` outer).
    pub fn nodes(&self) -> Vec<(usize, usize)> {
        let (nx, ny) = self.grid;
        (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect()
    }
}

/// Pointwise values of the coefficients, their partials and the derived
/// invariants.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct InvariantJet {
    pub x: f64,
    pub y: f64,
    pub b: f64,
    pub c: f64,
    pub p: f64,
    pub q: f64,
    pub b_x: f64,
    pub b_y: f64,
    pub b_yy: f64,
    pub b_xy: f64,
    pub c_x: f64,
    pub c_y: f64,
    pub c_xx: f64,
    pub c_xy: f64,
    pub p_y: f64,
    pub q_x: f64,
    pub k: f64,
    pub l: f64,
    pub big_p: f64,
    pub big_q: f64,
    pub big_p_x: f64,
    pub big_p_y: f64,
    pub big_q_x: f64,
    pub big_q_y: f64,
    pub k_y: f64,
    pub l_x: f64,
    /// `(log b/c)_xy`.
    pub log_ratio_xy: f64,
}

impl InvariantJet {
    /// Builds a jet for constant coefficients directly; all derivatives vanish.
    pub fn constant(b: f64, c: f64, p: f64, q: f64) -> Self {
        Self {
            b,
            c,
            p,
            q,
            k: 0.5 * b * c,
            l: 0.5 * b * c,
            big_p: p,
            big_q: q,
            ..Self::default()
        }
    }

    /// Density `8bc` of the projective metric `8bc dx dy`.
    pub fn metric_density(&self) -> f64 {
        8.0 * self.b * self.c
    }

    /// Fubini–Pick invariant; vanishes exactly on ruled surfaces.
    pub fn fubini_pick(&self) -> f64 {
        8.0 * self.b * self.c
    }

    /// Coefficients of the cubic form `b dx³ + c dy³`.
    pub fn cubic_form(&self) -> (f64, f64) {
        (self.b, self.c)
    }

    pub fn projective_minimal_terms(&self) -> (f64, f64) {
        (
            self.b * self.big_q_y + 2.0 * self.b_y * self.big_q,
            self.c * self.big_p_x + 2.0 * self.c_x * self.big_p,
        )
    }

    /// Left-hand sides of the two Toda-type equations `k_y + k b_y/b` and
    /// `ℓ_x + ℓ c_x/c`.
    pub fn toda_terms(&self) -> (f64, f64) {
        (
            self.k_y + self.k * self.b_y / self.b,
            self.l_x + self.l * self.c_x / self.c,
        )
    }

    pub fn compatibility(&self) -> Compatibility {
        let (toda_k, toda_l) = self.toda_terms();
        let (qm, pm) = self.projective_minimal_terms();
        Compatibility {
            r1a: self.big_q_x - toda_k,
            r1b: self.big_p_y - toda_l,
            r2: qm - pm,
        }
    }
}

/// Residuals of the projective Gauss–Codazzi equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Compatibility {
    pub r1a: f64,
    pub r1b: f64,
    pub r2: f64,
}

impl Compatibility {
    pub fn max_abs(&self) -> f64 {
        self.r1a.abs().max(self.r1b.abs()).max(self.r2.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub valid_surface: bool,
    pub demoulin: bool,
    pub projective_minimal: bool,
    pub isothermally_asymptotic: bool,
    pub coincidence_flat: bool,
    pub sup: ClassificationSup,
}

/// Grid sup-norms behind each classification flag.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ClassificationSup {
    pub compatibility: f64,
    pub demoulin: f64,
    pub projective_minimal: f64,
    pub isothermal: f64,
    pub coincidence: f64,
}

impl ClassificationSup {
    fn max(self, o: Self) -> Self {
        Self {
            compatibility: self.compatibility.max(o.compatibility),
            demoulin: self.demoulin.max(o.demoulin),
            projective_minimal: self.projective_minimal.max(o.projective_minimal),
            isothermal: self.isothermal.max(o.isothermal),
            coincidence: self.coincidence.max(o.coincidence),
        }
    }

    fn at(jet: &InvariantJet) -> Self {
        let (qm, pm) = jet.projective_minimal_terms();
        let (tk, tl) = jet.toda_terms();
        let projective_minimal = qm.abs().max(pm.abs());
        Self {
            compatibility: jet.compatibility().max_abs(),
            demoulin: jet.big_p.abs().max(jet.big_q.abs()),
            projective_minimal,
            isothermal: jet.log_ratio_xy.abs(),
            coincidence: [jet.big_q_x, jet.big_p_y, tk, tl]
                .iter()
                .fold(projective_minimal, |m, v| m.max(v.abs())),
        }
    }
}

/// Symbolic derivatives compiled once per spec.
#[derive(Debug, Clone)]
struct Derived {
    b_x: Expr,
    b_y: Expr,
    b_yy: Expr,
    b_xy: Expr,
    c_x: Expr,
    c_y: Expr,
    c_xx: Expr,
    c_xy: Expr,
    p_y: Expr,
    q_x: Expr,
    k: Expr,
    l: Expr,
    big_p: Expr,
    big_q: Expr,
    big_p_x: Expr,
    big_p_y: Expr,
    big_q_x: Expr,
    big_q_y: Expr,
    k_y: Expr,
    l_x: Expr,
    log_ratio_xy: Expr,
}

fn c(v: f64) -> Expr {
    Expr::constant(v)
}

/// `(log f)_xy = f_xy/f − f_x f_y/f²`.
fn log_xy(f: &Expr, fx: &Expr, fy: &Expr, fxy: &Expr) -> Expr {
    Expr::sub(
        Expr::div(fxy.clone(), f.clone()),
        Expr::div(Expr::mul(fx.clone(), fy.clone()), Expr::pow(f.clone(), 2)),
    )
}

impl Derived {
    fn new(spec: &SurfaceSpec) -> Self {
        use Var::{X, Y};
        let (b, cc, p, q) = (&spec.b, &spec.c, &spec.p, &spec.q);
        let b_x = b.differentiate(X);
        let b_y = b.differentiate(Y);
        let b_yy = b_y.differentiate(Y);
        let b_xy = b_x.differentiate(Y);
        let c_x = cc.differentiate(X);
        let c_y = cc.differentiate(Y);
        let c_xx = c_x.differentiate(X);
        let c_xy = c_x.differentiate(Y);
        let bc = Expr::mul(b.clone(), cc.clone());
        let log_b_xy = log_xy(b, &b_x, &b_y, &b_xy);
        let log_c_xy = log_xy(cc, &c_x, &c_y, &c_xy);
        let k = Expr::div(Expr::sub(bc.clone(), log_b_xy.clone()), c(2.0));
        let l = Expr::div(Expr::sub(bc, log_c_xy.clone()), c(2.0));
        // P = p + b_y/2 − c_xx/(2c) + c_x²/(4c²)
        let big_p = Expr::add(
            Expr::sub(
                Expr::add(p.clone(), Expr::div(b_y.clone(), c(2.0))),
                Expr::div(c_xx.clone(), Expr::mul(c(2.0), cc.clone())),
            ),
            Expr::div(
                Expr::pow(c_x.clone(), 2),
                Expr::mul(c(4.0), Expr::pow(cc.clone(), 2)),
            ),
        );
        // Q = q + c_x/2 − b_yy/(2b) + b_y²/(4b²)
        let big_q = Expr::add(
            Expr::sub(
                Expr::add(q.clone(), Expr::div(c_x.clone(), c(2.0))),
                Expr::div(b_yy.clone(), Expr::mul(c(2.0), b.clone())),
            ),
            Expr::div(
                Expr::pow(b_y.clone(), 2),
                Expr::mul(c(4.0), Expr::pow(b.clone(), 2)),
            ),
        );
        Self {
            p_y: p.differentiate(Y),
            q_x: q.differentiate(X),
            big_p_x: big_p.differentiate(X),
            big_p_y: big_p.differentiate(Y),
            big_q_x: big_q.differentiate(X),
            big_q_y: big_q.differentiate(Y),
            k_y: k.differentiate(Y),
            l_x: l.differentiate(X),
            log_ratio_xy: Expr::sub(log_b_xy, log_c_xy),
            b_x,
            b_y,
            b_yy,
            b_xy,
            c_x,
            c_y,
            c_xx,
            c_xy,
            k,
            l,
            big_p,
            big_q,
        }
    }
}

/// A validated [`SurfaceSpec`] together with its compiled symbolic
/// derivatives. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    spec: SurfaceSpec,
    d: Derived,
}

impl SurfaceModel {
    pub fn new(spec: SurfaceSpec) -> Result<Self> {
        spec.validate()?;
        let d = Derived::new(&spec);
        Ok(Self { spec, d })
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn domain(&self) -> Rect {
        self.spec.domain
    }

    pub fn tolerance(&self) -> f64 {
        self.spec.tolerance
    }

    /// Exact jet of invariants at `(x, y)`.
    pub fn invariants_at(&self, x: f64, y: f64) -> Result<InvariantJet> {
        let s = &self.spec;
        let b = s.b.eval(x, y)?;
        let c = s.c.eval(x, y)?;
        if !(b.abs() > s.tolerance && c.abs() > s.tolerance) {
            return Err(Error::Degenerate { x, y, b, c });
        }
        let d = &self.d;
        let ev = |e: &Expr| e.eval(x, y);
        Ok(InvariantJet {
            x,
            y,
            b,
            c,
            p: s.p.eval(x, y)?,
            q: s.q.eval(x, y)?,
            b_x: ev(&d.b_x)?,
            b_y: ev(&d.b_y)?,
            b_yy: ev(&d.b_yy)?,
            b_xy: ev(&d.b_xy)?,
            c_x: ev(&d.c_x)?,
            c_y: ev(&d.c_y)?,
            c_xx: ev(&d.c_xx)?,
            c_xy: ev(&d.c_xy)?,
            p_y: ev(&d.p_y)?,
            q_x: ev(&d.q_x)?,
            k: ev(&d.k)?,
            l: ev(&d.l)?,
            big_p: ev(&d.big_p)?,
            big_q: ev(&d.big_q)?,
            big_p_x: ev(&d.big_p_x)?,
            big_p_y: ev(&d.big_p_y)?,
            big_q_x: ev(&d.big_q_x)?,
            big_q_y: ev(&d.big_q_y)?,
            k_y: ev(&d.k_y)?,
            l_x: ev(&d.l_x)?,
            log_ratio_xy: ev(&d.log_ratio_xy)?,
        })
    }

    pub fn compatibility_residual(&self, x: f64, y: f64) -> Result<Compatibility> {
        Ok(self.invariants_at(x, y)?.compatibility())
    }

    /// Grid sup-norm classification with the spec tolerance.
    pub fn classify(&self) -> Result<Classification> {
        let sups = self
            .spec
            .nodes()
            .into_par_iter()
            .map(|(i, j)| {
                let (x, y) = self.spec.node(i, j);
                self.invariants_at(x, y)
                    .map(|jet| ClassificationSup::at(&jet))
            })
            .collect::<Result<Vec<_>>>()?;
        let sup = sups
            .into_iter()
            .fold(ClassificationSup::default(), ClassificationSup::max);
        let tol = self.spec.tolerance;
        Ok(Classification {
            valid_surface: sup.compatibility <= tol,
            demoulin: sup.demoulin <= tol,
            projective_minimal: sup.projective_minimal <= tol,
            isothermally_asymptotic: sup.isothermal <= tol,
            coincidence_flat: sup.coincidence <= tol,
            sup,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(b: &str, c: &str, p: &str, q: &str) -> SurfaceModel {
        SurfaceModel::new(SurfaceSpec::parse("t", b, c, p, q).unwrap()).unwrap()
    }

    #[test]
    fn trivial_constants() {
        let j = model("1", "1", "0", "0").invariants_at(0.3, 0.8).unwrap();
        assert_eq!((j.k, j.l, j.big_p, j.big_q), (0.5, 0.5, 0.0, 0.0));
        let j = model("1", "1", "1", "2").invariants_at(0.3, 0.8).unwrap();
        assert_eq!((j.k, j.l, j.big_p, j.big_q), (0.5, 0.5, 1.0, 2.0));
        assert_eq!(j.metric_density(), 8.0);
    }

    #[test]
    fn exponential_coefficients_at_origin() {
        let j = model("exp(x+y)", "exp(x+y)", "0", "0")
            .invariants_at(0.0, 0.0)
            .unwrap();
        assert!((j.k - 0.5).abs() < 1e-15);
        assert!((j.l - 0.5).abs() < 1e-15);
        assert!((j.big_p - 0.25).abs() < 1e-15);
        assert!((j.big_q - 0.25).abs() < 1e-15);
    }

    #[test]
    fn compatibility_examples() {
        let r = model("1", "1", "1", "2")
            .compatibility_residual(0.2, 0.2)
            .unwrap();
        assert_eq!(r.max_abs(), 0.0);
        let r = model("1", "1", "x", "y")
            .compatibility_residual(0.2, 0.7)
            .unwrap();
        assert_eq!(r.max_abs(), 0.0);
        let r = model("1", "1", "x", "0")
            .compatibility_residual(0.2, 0.7)
            .unwrap();
        assert_eq!((r.r1a, r.r1b, r.r2), (0.0, 0.0, -1.0));
    }

    #[test]
    fn classification_examples() {
        let c = model("1", "1", "0", "0").classify().unwrap();
        assert!(c.valid_surface && c.demoulin && c.projective_minimal);
        assert!(c.isothermally_asymptotic && c.coincidence_flat);

        let c = model("1", "1", "1", "2").classify().unwrap();
        assert!(c.valid_surface && !c.demoulin && c.projective_minimal && c.coincidence_flat);

        let c = model("1", "1", "x", "y").classify().unwrap();
        assert!(c.valid_surface && !c.demoulin && !c.projective_minimal && !c.coincidence_flat);
        assert_eq!(c.sup.projective_minimal, 1.0);
    }

    #[test]
    fn ruled_surfaces_are_rejected() {
        let m = model("x", "1", "0", "0");
        assert!(matches!(
            m.invariants_at(0.0, 0.5),
            Err(Error::Degenerate { .. })
        ));
        assert!(matches!(m.classify(), Err(Error::Degenerate { x, .. }) if x == 0.0));
    }

    #[test]
    fn spec_validation() {
        let s = SurfaceSpec::parse("t", "1", "1", "0", "0").unwrap();
        assert!(SurfaceModel::new(s.clone().with_grid(1, 5)).is_err());
        let mut bad = s.clone();
        bad.lambda_samples.push(0.0);
        assert!(SurfaceModel::new(bad).is_err());
        assert!(SurfaceModel::new(s.with_domain(Rect::new(1.0, 0.0, 0.0, 1.0))).is_err());
    }

    #[test]
    fn grid_nodes_cover_the_domain() {
        let s = SurfaceSpec::parse("t", "1", "1", "0", "0")
            .unwrap()
            .with_domain(Rect::new(-1.0, 0.3, 2.0, 2.7))
            .with_grid(4, 3);
        assert_eq!(s.node(0, 0), (-1.0, 2.0));
        assert_eq!(s.node(3, 2), (0.3, 2.7));
        assert_eq!(s.nodes().len(), 12);
    }
}
