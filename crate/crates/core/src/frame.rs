//! Wilczynski connection, Maurer–Cartan residuals and frame integration.
//!
//! Frames follow the column convention `F = (f, f₁, f₂, η)`, so that
//! `F_x = F U` and `F_y = F V`. Cross-differentiating gives the flatness
//! condition `U_y − V_x − [U, V] = 0`.

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::surface::{InvariantJet, Rect, SurfaceModel};
use crate::Mat4;

/// RK4 substeps per grid cell.
pub const SUBSTEPS_PER_CELL: usize = 4;
/// Default central-difference step for Maurer–Cartan residuals.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
const DET_WARN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionPair {
    pub x: f64,
    pub y: f64,
    pub u: Mat4,
    pub v: Mat4,
}

impl ConnectionPair {
    pub fn from_jet(j: &InvariantJet) -> Self {
        let hu = j.c_x / (2.0 * j.c);
        let hv = j.b_y / (2.0 * j.b);
        let (k, l, p, q) = (j.k, j.l, j.big_p, j.big_q);
        let u = Mat4::new([
            [hu, p, k, j.b * q],
            [1.0, -hu, 0.0, k],
            [0.0, j.b, hu, p],
            [0.0, 0.0, 1.0, -hu],
        ]);
        let v = Mat4::new([
            [hv, l, q, j.c * p],
            [0.0, hv, j.c, q],
            [1.0, 0.0, -hv, l],
            [0.0, 1.0, 0.0, -hv],
        ]);
        Self {
            x: j.x,
            y: j.y,
            u,
            v,
        }
    }
}

/// Connection matrices `U, V` at `(x, y)`.
pub fn connection_at(model: &SurfaceModel, x: f64, y: f64) -> Result<ConnectionPair> {
    Ok(ConnectionPair::from_jet(&model.invariants_at(x, y)?))
}

/// `U_y − V_x − [U, V]` from supplied derivatives.
pub fn maurer_cartan<T: crate::Field>(
    u: &crate::Matrix4<T>,
    v: &crate::Matrix4<T>,
    u_y: &crate::Matrix4<T>,
    v_x: &crate::Matrix4<T>,
) -> crate::Matrix4<T> {
    *u_y - *v_x - u.commutator(v)
}

/// Central-difference stencil points `(x±h, y)`, `(x, y±h)` checked
/// against the domain.
pub(crate) fn stencil(model: &SurfaceModel, x: f64, y: f64, h: f64) -> Result<[(f64, f64); 4]> {
    let d = model.domain();
    let pts = [(x + h, y), (x - h, y), (x, y + h), (x, y - h)];
    if !(h > 0.0) || pts.iter().any(|&(px, py)| !d.contains(px, py)) {
        return Err(Error::OutOfDomain { x, y, h });
    }
    Ok(pts)
}

/// Maurer–Cartan residual of the untwisted connection, with `U_y` and
/// `V_x` taken by central differences of step `h`.
pub fn mc_residual(model: &SurfaceModel, x: f64, y: f64, h: f64) -> Result<Mat4> {
    let [xp, xm, yp, ym] = stencil(model, x, y, h)?;
    let at = |(px, py): (f64, f64)| connection_at(model, px, py);
    let c = at((x, y))?;
    let u_y = (at(yp)?.u - at(ym)?.u).scale(0.5 / h);
    let v_x = (at(xp)?.v - at(xm)?.v).scale(0.5 / h);
    Ok(maurer_cartan(&c.u, &c.v, &u_y, &v_x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Classical RK4 for `F' = F A(t)`.
pub fn rk4_step<A>(f: &Mat4, t: f64, h: f64, a: &A) -> Result<Mat4>
where
    A: Fn(f64) -> Result<Mat4>,
{
    let a0 = a(t)?;
    let am = a(t + 0.5 * h)?;
    let a1 = a(t + h)?;
    let k1 = *f * a0;
    let k2 = (*f + k1.scale(0.5 * h)) * am;
    let k3 = (*f + k2.scale(0.5 * h)) * am;
    let k4 = (*f + k3.scale(h)) * a1;
    Ok(*f + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0))
}

/// Transports `f0` from `start` along one coordinate direction by the
/// signed distance `length`, in `steps` equal RK4 steps.
pub fn integrate_segment(
    model: &SurfaceModel,
    f0: &Mat4,
    start: (f64, f64),
    axis: Axis,
    length: f64,
    steps: usize,
) -> Result<Mat4> {
    if steps == 0 || length == 0.0 {
        return Ok(*f0);
    }
    let (x0, y0) = start;
    let h = length / steps as f64;
    let mut f = *f0;
    match axis {
        Axis::X => {
            let a = |t: f64| Ok(connection_at(model, t, y0)?.u);
            for s in 0..steps {
                f = rk4_step(&f, x0 + s as f64 * h, h, &a)?;
            }
        }
        Axis::Y => {
            let a = |t: f64| Ok(connection_at(model, x0, t)?.v);
            for s in 0..steps {
                f = rk4_step(&f, y0 + s as f64 * h, h, &a)?;
            }
        }
    }
    Ok(f)
}

/// Transports `f0` from `base` to `target` along the x-then-y path, with
/// steps no longer than `max_step`.
pub fn integrate_to(
    model: &SurfaceModel,
    f0: &Mat4,
    base: (f64, f64),
    target: (f64, f64),
    max_step: f64,
) -> Result<Mat4> {
    let steps = |len: f64| (len.abs() / max_step).ceil() as usize;
    let dx = target.0 - base.0;
    let dy = target.1 - base.1;
    let f = integrate_segment(model, f0, base, Axis::X, dx, steps(dx))?;
    integrate_segment(model, &f, (target.0, base.1), Axis::Y, dy, steps(dy))
}

/// Frame values on the spec grid.
#[derive(Debug, Clone)]
pub struct FrameField {
    pub nx: usize,
    pub ny: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major by `j`: node `(i, j)` lives at `j * nx + i`.
    pub frames: Vec<Mat4>,
    pub base: (f64, f64),
    pub initial: Mat4,
    pub max_det_drift: f64,
}

impl FrameField {
    pub fn at(&self, i: usize, j: usize) -> &Mat4 {
        &self.frames[j * self.nx + i]
    }

    /// First column of the frame, i.e. the lift `f` of the surface.
    pub fn lift(&self, i: usize, j: usize) -> [f64; 4] {
        let f = self.at(i, j);
        [f.m[0][0], f.m[1][0], f.m[2][0], f.m[3][0]]
    }
}

/// Integrates the frame over the spec grid from the lower-left corner:
/// first along the bottom edge with `U`, then up every column with `V`.
///
/// The result is only path independent on surfaces that satisfy the
/// compatibility equations.
pub fn integrate_frame(model: &SurfaceModel, f0: &Mat4) -> Result<FrameField> {
    let det0 = f0.determinant();
    if (det0 - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnimodular { det: det0 });
    }
    let spec = model.spec();
    let (nx, ny) = spec.grid;
    let xs: Vec<f64> = (0..nx).map(|i| spec.node(i, 0).0).collect();
    let ys: Vec<f64> = (0..ny).map(|j| spec.node(0, j).1).collect();
    let y0 = ys[0];

    let mut bottom = Vec::with_capacity(nx);
    bottom.push(*f0);
    for i in 1..nx {
        let prev = bottom[i - 1];
        let f = integrate_segment(
            model,
            &prev,
            (xs[i - 1], y0),
            Axis::X,
            xs[i] - xs[i - 1],
            SUBSTEPS_PER_CELL,
        )?;
        bottom.push(f);
    }

    let columns = (0..nx)
        .into_par_iter()
        .map(|i| {
            let mut col = Vec::with_capacity(ny);
            col.push(bottom[i]);
            for j in 1..ny {
                let f = integrate_segment(
                    model,
                    &col[j - 1],
                    (xs[i], ys[j - 1]),
                    Axis::Y,
                    ys[j] - ys[j - 1],
                    SUBSTEPS_PER_CELL,
                )?;
                col.push(f);
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut frames = vec![Mat4::zero(); nx * ny];
    for (i, col) in columns.into_iter().enumerate() {
        for (j, f) in col.into_iter().enumerate() {
            frames[j * nx + i] = f;
        }
    }
    let max_det_drift = frames
        .iter()
        .map(|f| (f.determinant() - det0).abs())
        .fold(0.0, f64::max);
    if max_det_drift > DET_WARN {
        warn!(
            "frame determinant drifted by {max_det_drift:e} on `{}`",
            spec.name
        );
    }
    Ok(FrameField {
        nx,
        ny,
        xs,
        ys,
        frames,
        base: (spec.domain.x[0], y0),
        initial: *f0,
        max_det_drift,
    })
}

/// Transports the identity around the boundary of `rect` (bottom, right,
/// top reversed, left reversed) with `steps` RK4 steps per edge and returns
/// `‖F_loop − I‖∞`.
pub fn path_independence_residual(model: &SurfaceModel, rect: Rect, steps: usize) -> Result<f64> {
    let d = model.domain();
    for (x, y) in [(rect.x[0], rect.y[0]), (rect.x[1], rect.y[1])] {
        if !d.contains(x, y) {
            return Err(Error::OutOfDomain { x, y, h: 0.0 });
        }
    }
    let (w, h) = (rect.width(), rect.height());
    let mut f = Mat4::identity();
    f = integrate_segment(model, &f, (rect.x[0], rect.y[0]), Axis::X, w, steps)?;
    f = integrate_segment(model, &f, (rect.x[1], rect.y[0]), Axis::Y, h, steps)?;
    f = integrate_segment(model, &f, (rect.x[1], rect.y[1]), Axis::X, -w, steps)?;
    f = integrate_segment(model, &f, (rect.x[0], rect.y[1]), Axis::Y, -h, steps)?;
    Ok((f - Mat4::identity()).max_abs())
}
