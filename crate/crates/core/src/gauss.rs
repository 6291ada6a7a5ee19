//! First-order and conformal Gauss maps into the space of unimodular
//! quadrics of signature (2, 2), with their conformality diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{integrate_segment, Axis};
use crate::linalg::{j1, j2, QuadricCheck};
use crate::surface::{InvariantJet, SurfaceModel};
use crate::Mat4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussKind {
    /// `g₁ = F J₁ Fᵗ`.
    FirstOrder,
    /// `g₂ = F J₂ Fᵗ`, the Lie quadric.
    Conformal,
}

impl GaussKind {
    pub fn base_point(self) -> Mat4 {
        match self {
            GaussKind::FirstOrder => j1(),
            GaussKind::Conformal => j2(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadric {
    pub matrix: Mat4,
    pub kind: GaussKind,
    pub point: Option<(f64, f64)>,
    pub check: QuadricCheck,
}

impl Quadric {
    pub fn at(mut self, x: f64, y: f64) -> Self {
        self.point = Some((x, y));
        self
    }
}

/// `F J Fᵗ` for the chosen kind. Requires `|det F − 1| ≤ tol` and checks
/// that the result is a symmetric unimodular quadric of signature (2, 2).
pub fn gauss_map(f: &Mat4, kind: GaussKind, tol: f64) -> Result<Quadric> {
    let det = f.determinant();
    if !((det - 1.0).abs() <= tol) {
        return Err(Error::NonUnimodular { det });
    }
    let matrix = kind.base_point().congruence(f);
    let check = matrix.quadric_check(tol);
    if !check.is_split_quadric() {
        return Err(Error::Quadric(format!("{check:?}")));
    }
    Ok(Quadric {
        matrix,
        kind,
        point: None,
        check,
    })
}

/// Invariant inner product `Tr(p⁻¹ X p⁻¹ Y)` on the tangent space at `p`.
pub fn inner_product(p: &Mat4, x: &Mat4, y: &Mat4) -> Result<f64> {
    let pi = p.inverse()?;
    Ok((pi * *x * pi * *y).trace())
}

/// Middle factors `A` in `g_x = 2 F A Fᵗ`, `g_y = 2 F B Fᵗ`.
pub fn derivative_kernels(jet: &InvariantJet, kind: GaussKind) -> (Mat4, Mat4) {
    let (b, c, k, l, p, q) = (jet.b, jet.c, jet.k, jet.l, jet.big_p, jet.big_q);
    match kind {
        GaussKind::FirstOrder => (
            Mat4::new([
                [b * q, k, p, 0.0],
                [k, 0.0, 0.0, 1.0],
                [p, 0.0, b, 0.0],
                [0.0, 1.0, 0.0, 0.0],
            ]),
            Mat4::new([
                [c * p, q, l, 0.0],
                [q, c, 0.0, 0.0],
                [l, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
            ]),
        ),
        GaussKind::Conformal => (
            Mat4::diag([b * q, 0.0, -b, 0.0]),
            Mat4::diag([c * p, -c, 0.0, 0.0]),
        ),
    }
}

/// Closed-form partial derivatives of the Gauss map at a point whose frame
/// is `f` and whose invariants are `jet`.
pub fn gauss_derivatives_closed_form(
    f: &Mat4,
    jet: &InvariantJet,
    kind: GaussKind,
) -> (Mat4, Mat4) {
    let (a, b) = derivative_kernels(jet, kind);
    (a.congruence(f).scale(2.0), b.congruence(f).scale(2.0))
}

/// Central-difference partials of `F J Fᵗ`, where the neighbouring frames
/// are obtained by transporting `f` a distance `h` with the frame equations.
pub fn gauss_derivatives_fd(
    model: &SurfaceModel,
    f: &Mat4,
    x: f64,
    y: f64,
    h: f64,
    kind: GaussKind,
) -> Result<(Mat4, Mat4)> {
    crate::frame::stencil(model, x, y, h)?;
    let j = kind.base_point();
    let g = |axis, d: f64| -> Result<Mat4> {
        Ok(j.congruence(&integrate_segment(model, f, (x, y), axis, d, 4)?))
    };
    let gx = (g(Axis::X, h)? - g(Axis::X, -h)?).scale(0.5 / h);
    let gy = (g(Axis::Y, h)? - g(Axis::Y, -h)?).scale(0.5 / h);
    Ok((gx, gy))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConformalityDiagnostics {
    pub exx: f64,
    pub eyy: f64,
    pub exy: f64,
    /// Expected `(⟨g_x,g_x⟩, ⟨g_y,g_y⟩, ⟨g_x,g_y⟩)`.
    pub closed_form: [f64; 3],
}

impl ConformalityDiagnostics {
    pub fn computed(&self) -> [f64; 3] {
        [self.exx, self.eyy, self.exy]
    }

    pub fn max_deviation(&self) -> f64 {
        self.computed()
            .iter()
            .zip(self.closed_form)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Both coordinate directions are null.
    pub fn is_conformal(&self, tol: f64) -> bool {
        self.exx.abs() <= tol && self.eyy.abs() <= tol
    }
}

/// Evaluates the inner products of the closed-form derivatives at the
/// quadric `F J Fᵗ` next to their predicted values: `(16P, 16Q,
/// 8(k+ℓ)+4bc)` for `g₁` and `(0, 0, 4bc)` for `g₂`.
pub fn conformality_diagnostics(
    f: &Mat4,
    jet: &InvariantJet,
    kind: GaussKind,
) -> Result<ConformalityDiagnostics> {
    let p = kind.base_point().congruence(f);
    let (gx, gy) = gauss_derivatives_closed_form(f, jet, kind);
    let bc = jet.b * jet.c;
    let closed_form = match kind {
        GaussKind::FirstOrder => [
            16.0 * jet.big_p,
            16.0 * jet.big_q,
            8.0 * (jet.k + jet.l) + 4.0 * bc,
        ],
        GaussKind::Conformal => [0.0, 0.0, 4.0 * bc],
    };
    Ok(ConformalityDiagnostics {
        exx: inner_product(&p, &gx, &gx)?,
        eyy: inner_product(&p, &gy, &gy)?,
        exy: inner_product(&p, &gx, &gy)?,
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceSpec;

    #[test]
    fn identity_frame_gives_base_points() {
        let g = gauss_map(&Mat4::identity(), GaussKind::FirstOrder, 1e-9).unwrap();
        assert_eq!(g.matrix, j1());
        let g = gauss_map(&Mat4::identity(), GaussKind::Conformal, 1e-9).unwrap();
        assert_eq!(g.matrix, j2());
    }

    #[test]
    fn stabilizing_diagonal_frame() {
        let f = Mat4::diag([2.0, 1.0, 1.0, 0.5]);
        let g = gauss_map(&f, GaussKind::FirstOrder, 1e-9).unwrap();
        assert_eq!(g.matrix, j1());
    }

    #[test]
    fn non_unimodular_frame_rejected() {
        let f = Mat4::diag([2.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            gauss_map(&f, GaussKind::FirstOrder, 1e-9),
            Err(Error::NonUnimodular { .. })
        ));
    }

    #[test]
    fn inner_product_examples() {
        let i = Mat4::identity();
        assert_eq!(inner_product(&i, &i, &i).unwrap(), 4.0);
        let x = Mat4::diag([1.0, 0.0, 0.0, -1.0]);
        assert_eq!(inner_product(&j1(), &x, &x).unwrap(), -2.0);
        assert!(inner_product(&Mat4::zero(), &x, &x).is_err());
    }

    #[test]
    fn closed_form_derivatives_trivial_demoulin() {
        let jet = InvariantJet::constant(1.0, 1.0, 0.0, 0.0);
        let (gx, _) = gauss_derivatives_closed_form(&Mat4::identity(), &jet, GaussKind::FirstOrder);
        let expected = Mat4::new([
            [0.0, 0.5, 0.0, 0.0],
            [0.5, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ])
        .scale(2.0);
        assert_eq!(gx, expected);
        let (gx, _) = gauss_derivatives_closed_form(&Mat4::identity(), &jet, GaussKind::Conformal);
        assert_eq!(gx, Mat4::diag([0.0, 0.0, -2.0, 0.0]));
    }

    #[test]
    fn diagnostics_for_constant_jets() {
        let i = Mat4::identity();
        let d = conformality_diagnostics(
            &i,
            &InvariantJet::constant(1.0, 1.0, 0.0, 0.0),
            GaussKind::FirstOrder,
        )
        .unwrap();
        assert_eq!(d.computed(), [0.0, 0.0, 12.0]);
        assert_eq!(d.closed_form, [0.0, 0.0, 12.0]);
        let d = conformality_diagnostics(
            &i,
            &InvariantJet::constant(1.0, 1.0, 1.0, 2.0),
            GaussKind::FirstOrder,
        )
        .unwrap();
        assert_eq!(d.computed(), [16.0, 32.0, 12.0]);
        let d = conformality_diagnostics(
            &i,
            &InvariantJet::constant(1.0, 1.0, 1.0, 2.0),
            GaussKind::Conformal,
        )
        .unwrap();
        assert_eq!(d.computed(), [0.0, 0.0, 4.0]);
    }

    #[test]
    fn fd_derivatives_match_closed_form() {
        let spec = SurfaceSpec::parse("t", "1", "1", "x", "y").unwrap();
        let m = SurfaceModel::new(spec).unwrap();
        let f =
            crate::frame::integrate_to(&m, &Mat4::identity(), (0.0, 0.0), (0.5, 0.4), 1.0 / 64.0)
                .unwrap();
        let jet = m.invariants_at(0.5, 0.4).unwrap();
        for kind in [GaussKind::FirstOrder, GaussKind::Conformal] {
            let (ax, ay) = gauss_derivatives_closed_form(&f, &jet, kind);
            let (nx, ny) = gauss_derivatives_fd(&m, &f, 0.5, 0.4, 1e-3, kind).unwrap();
            assert!((ax - nx).max_abs() < 1e-4 * ax.max_abs(), "{kind:?}");
            assert!((ay - ny).max_abs() < 1e-4 * ay.max_abs(), "{kind:?}");
        }
    }
}
