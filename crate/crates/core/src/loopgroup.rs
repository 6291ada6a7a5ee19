//! Spectral families of connections and the automorphisms that grade them.
//!
//! For a twisting involution `τ` with eigenspaces `𝔨 ⊕ 𝔭`, the family is
//!
//! ```text
//! U^λ = U_𝔨 + λ⁻¹ U_𝔭,    V^λ = V_𝔨 + λ V_𝔭.
//! ```
//!
//! `τ₁` is tied to the first-order Gauss map and flattens exactly the
//! Demoulin and projective minimal coincidence surfaces; `τ₂` is tied to the
//! conformal Gauss map and flattens exactly the projective minimal ones.
//!
//! The order-six automorphism `κ = τ₁ ∘ σ`, with `σ = Ad(diag(1, ε², ε, 1))`
//! and `ε = e^{2πi/3}`, grades `𝔰𝔩₄ℂ` into `𝔤_j` (eigenvalue `(−ε)^j`).
//! Demoulin families are `κ`-equivariant, `κ U(λ) = U(−ελ)`, and their
//! Maurer–Cartan form is primitive with respect to this grading.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{stencil, ConnectionPair};
use crate::linalg::{j1, j2};
use crate::scalar::Field;
use crate::surface::{InvariantJet, SurfaceModel};
use crate::{CMat4, Mat4, Matrix4, C64};

const CROSS_CHECK_TOL: f64 = 1e-12;

/// Primitive cube root of unity `ε = e^{2πi/3}`.
pub fn epsilon() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// `E = diag(1, ε², ε, 1)`, generator of `σ`.
pub fn sigma_generator() -> CMat4 {
    let e = epsilon();
    let one = C64::new(1.0, 0.0);
    CMat4::diag([one, e * e, e, one])
}

/// Outer involution `X ↦ −J Xᵗ J` defining a twisting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Twisting {
    /// `J = J₁`, paired with the first-order Gauss map.
    Tau1,
    /// `J = J₂`, paired with the conformal Gauss map.
    Tau2,
}

impl Twisting {
    pub fn j<T: Field>(self) -> Matrix4<T> {
        match self {
            Twisting::Tau1 => j1(),
            Twisting::Tau2 => j2(),
        }
    }

    pub fn apply<T: Field>(self, x: &Matrix4<T>) -> Matrix4<T> {
        let j = self.j::<T>();
        -(j * x.transpose() * j)
    }

    /// Splits `x` into its `+1` and `−1` eigenparts.
    pub fn split<T: Field>(self, x: &Matrix4<T>) -> (Matrix4<T>, Matrix4<T>) {
        let half = T::from_real(0.5);
        let t = self.apply(x);
        ((*x + t).scale(half), (*x - t).scale(half))
    }

    pub fn automorphism(self) -> Automorphism {
        match self {
            Twisting::Tau1 => Automorphism::Tau1,
            Twisting::Tau2 => Automorphism::Tau2,
        }
    }
}

/// Finite-order automorphisms of `𝔰𝔩₄ℂ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Automorphism {
    Tau1,
    Tau2,
    /// `Ad(E)` with `E = diag(1, ε², ε, 1)`.
    Sigma,
    /// `τ₁ ∘ σ`, acting as `X ↦ −J₁ E⁻¹ Xᵗ E J₁`.
    Kappa,
}

impl Automorphism {
    pub fn order(self) -> usize {
        match self {
            Automorphism::Tau1 | Automorphism::Tau2 => 2,
            Automorphism::Sigma => 3,
            Automorphism::Kappa => 6,
        }
    }

    /// Eigenvalue labelling component `j`: `ω^j` with `ω` = −1, ε or −ε.
    pub fn eigenvalue(self, j: i32) -> C64 {
        let omega = match self {
            Automorphism::Tau1 | Automorphism::Tau2 => C64::new(-1.0, 0.0),
            Automorphism::Sigma => epsilon(),
            Automorphism::Kappa => -epsilon(),
        };
        omega.powi(j.rem_euclid(self.order() as i32))
    }

    pub fn apply(self, x: &CMat4) -> CMat4 {
        match self {
            Automorphism::Tau1 => Twisting::Tau1.apply(x),
            Automorphism::Tau2 => Twisting::Tau2.apply(x),
            Automorphism::Sigma => sigma(x),
            Automorphism::Kappa => Twisting::Tau1.apply(&sigma(x)),
        }
    }

    /// `self` applied `n` times.
    pub fn power(self, x: &CMat4, n: usize) -> CMat4 {
        (0..n).fold(*x, |acc, _| self.apply(&acc))
    }
}

fn sigma(x: &CMat4) -> CMat4 {
    let e = epsilon();
    let one = C64::new(1.0, 0.0);
    x.diag_conjugate([one, e * e, e, one])
}

/// Eigencomponents `X_j = (1/n) Σ_m ω^{−jm} a^m(X)` for `j = 0..n`, where
/// `n` is the order of `a`. For the involutions this is `[(X+τX)/2,
/// (X−τX)/2]`; for `κ`, index `j` is the `(−ε)^j`-eigenspace, so `g₋₁` is
/// index 5.
pub fn eigenprojection(x: &CMat4, a: Automorphism) -> Result<Vec<CMat4>> {
    let trace = x.trace().norm();
    if trace > 1e-12 * (1.0 + x.max_abs()) {
        return Err(Error::NonzeroTrace { trace });
    }
    Ok(eigencomponents(x, a))
}

fn eigencomponents(x: &CMat4, a: Automorphism) -> Vec<CMat4> {
    let n = a.order();
    let orbit: Vec<CMat4> = (0..n)
        .scan(*x, |acc, _| {
            let cur = *acc;
            *acc = a.apply(&cur);
            Some(cur)
        })
        .collect();
    let inv_n = C64::new(1.0 / n as f64, 0.0);
    (0..n as i32)
        .map(|j| {
            orbit
                .iter()
                .enumerate()
                .fold(CMat4::zero(), |acc, (m, am)| {
                    acc + am.scale(a.eigenvalue(-j * m as i32))
                })
                .scale(inv_n)
        })
        .collect()
}

/// Basis of `𝔰𝔩₄ℂ`: the twelve off-diagonal units and three diagonal
/// differences.
pub fn sl4_basis() -> Vec<CMat4> {
    let one = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(15);
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                out.push(CMat4::unit(i, j));
            }
        }
    }
    for i in 0..3 {
        let mut d = [C64::new(0.0, 0.0); 4];
        d[i] = one;
        d[i + 1] = -one;
        out.push(CMat4::diag(d));
    }
    out
}

fn hermitian_dot(a: &CMat4, b: &CMat4) -> C64 {
    a.m.iter()
        .flatten()
        .zip(b.m.iter().flatten())
        .fold(C64::new(0.0, 0.0), |acc, (p, q)| acc + p.conj() * q)
}

/// Orthonormal basis of every eigenspace of `a`, built by projecting the
/// standard basis and orthonormalizing. Dimensions sum to 15.
pub fn eigenbasis(a: Automorphism) -> Vec<Vec<CMat4>> {
    let n = a.order();
    let mut spaces: Vec<Vec<CMat4>> = vec![Vec::new(); n];
    for x in sl4_basis() {
        for (j, comp) in eigencomponents(&x, a).into_iter().enumerate() {
            let mut v = comp;
            for e in &spaces[j] {
                v = v - e.scale(hermitian_dot(e, &v));
            }
            let norm = hermitian_dot(&v, &v).re.sqrt();
            if norm > 1e-9 {
                spaces[j].push(v.scale(C64::new(1.0 / norm, 0.0)));
            }
        }
    }
    spaces
}

/// λ-family of connections at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopConnectionPair {
    pub x: f64,
    pub y: f64,
    pub lambda: C64,
    pub u: CMat4,
    pub v: CMat4,
    pub twisting: Twisting,
}

/// The family written out entrywise.
pub fn explicit_loop_connection(
    jet: &InvariantJet,
    lambda: C64,
    twisting: Twisting,
) -> (CMat4, CMat4) {
    let r = |v: f64| C64::new(v, 0.0);
    let li = lambda.inv();
    let hu = r(jet.c_x / (2.0 * jet.c));
    let hv = r(jet.b_y / (2.0 * jet.b));
    let (b, c, k, l, p, q) = (
        r(jet.b),
        r(jet.c),
        r(jet.k),
        r(jet.l),
        r(jet.big_p),
        r(jet.big_q),
    );
    let z = r(0.0);
    let one = r(1.0);
    match twisting {
        Twisting::Tau1 => (
            CMat4::new([
                [hu, li * p, li * k, li * b * q],
                [li, -hu, z, li * k],
                [z, li * b, hu, li * p],
                [z, z, li, -hu],
            ]),
            CMat4::new([
                [hv, lambda * l, lambda * q, lambda * c * p],
                [z, hv, lambda * c, lambda * q],
                [lambda, z, -hv, lambda * l],
                [z, lambda, z, -hv],
            ]),
        ),
        Twisting::Tau2 => (
            CMat4::new([
                [hu, p, k, li * b * q],
                [one, -hu, z, k],
                [z, li * b, hu, p],
                [z, z, one, -hu],
            ]),
            CMat4::new([
                [hv, l, q, lambda * c * p],
                [z, hv, lambda * c, q],
                [one, z, -hv, l],
                [z, one, z, -hv],
            ]),
        ),
    }
}

/// The family obtained by scaling the `−1` eigenparts of `U` and `V`.
pub fn spectral_insertion(
    pair: &ConnectionPair,
    lambda: C64,
    twisting: Twisting,
) -> (CMat4, CMat4) {
    let (uk, up) = twisting.split(&pair.u.to_complex());
    let (vk, vp) = twisting.split(&pair.v.to_complex());
    (uk + up.scale(lambda.inv()), vk + vp.scale(lambda))
}

/// Builds the λ-family at the jet's point, both entrywise and by eigenspace
/// insertion, and insists the two agree.
pub fn loop_connection(
    jet: &InvariantJet,
    lambda: C64,
    twisting: Twisting,
) -> Result<LoopConnectionPair> {
    if lambda.norm() == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroLambda);
    }
    let (u, v) = explicit_loop_connection(jet, lambda, twisting);
    let (ui, vi) = spectral_insertion(&ConnectionPair::from_jet(jet), lambda, twisting);
    let scale = 1.0 + u.max_abs().max(v.max_abs());
    let deviation = (u - ui).max_abs().max((v - vi).max_abs());
    if deviation > CROSS_CHECK_TOL * scale {
        return Err(Error::Consistency {
            what: "loop connection",
            deviation,
        });
    }
    Ok(LoopConnectionPair {
        x: jet.x,
        y: jet.y,
        lambda,
        u,
        v,
        twisting,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatnessEntry {
    pub lambda: f64,
    pub max_residual: f64,
}

/// Jets at a point and its four central-difference neighbours.
struct StencilJets {
    center: InvariantJet,
    xp: InvariantJet,
    xm: InvariantJet,
    yp: InvariantJet,
    ym: InvariantJet,
    h: f64,
}

impl StencilJets {
    fn new(model: &SurfaceModel, x: f64, y: f64, h: f64) -> Result<Self> {
        let [xp, xm, yp, ym] = stencil(model, x, y, h)?;
        let jet = |(px, py): (f64, f64)| model.invariants_at(px, py);
        Ok(Self {
            center: jet((x, y))?,
            xp: jet(xp)?,
            xm: jet(xm)?,
            yp: jet(yp)?,
            ym: jet(ym)?,
            h,
        })
    }

    fn residual(&self, lambda: C64, twisting: Twisting) -> Result<CMat4> {
        let c = loop_connection(&self.center, lambda, twisting)?;
        let at = |j: &InvariantJet| explicit_loop_connection(j, lambda, twisting);
        let s = C64::new(0.5 / self.h, 0.0);
        let u_y = (at(&self.yp).0 - at(&self.ym).0).scale(s);
        let v_x = (at(&self.xp).1 - at(&self.xm).1).scale(s);
        Ok(crate::frame::maurer_cartan(&c.u, &c.v, &u_y, &v_x))
    }
}

/// Maurer–Cartan residual of the λ-family at one point.
pub fn loop_mc_residual(
    model: &SurfaceModel,
    x: f64,
    y: f64,
    lambda: C64,
    twisting: Twisting,
    h: f64,
) -> Result<CMat4> {
    StencilJets::new(model, x, y, h)?.residual(lambda, twisting)
}

/// For each λ, the sup over interior grid nodes of the λ-family
/// Maurer–Cartan residual. Falls back to the domain centre when the grid
/// has no interior nodes.
pub fn flatness_scan(
    model: &SurfaceModel,
    twisting: Twisting,
    lambdas: &[f64],
    h: f64,
) -> Result<Vec<FlatnessEntry>> {
    if lambdas.contains(&0.0) {
        return Err(Error::ZeroLambda);
    }
    let spec = model.spec();
    let (nx, ny) = spec.grid;
    let mut points: Vec<(f64, f64)> = (1..ny.saturating_sub(1))
        .flat_map(|j| (1..nx.saturating_sub(1)).map(move |i| (i, j)))
        .map(|(i, j)| spec.node(i, j))
        .collect();
    if points.is_empty() {
        points.push(spec.domain.center());
    }
    let per_point = points
        .into_par_iter()
        .map(|(x, y)| {
            let st = StencilJets::new(model, x, y, h)?;
            lambdas
                .iter()
                .map(|&l| Ok(st.residual(C64::new(l, 0.0), twisting)?.max_abs()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(n, &lambda)| FlatnessEntry {
            lambda,
            max_residual: per_point.iter().map(|r| r[n]).fold(0.0, f64::max),
        })
        .collect())
}

/// `max(‖κ(U^λ) − U^{−ελ}‖∞, ‖κ(V^λ) − V^{−ελ}‖∞)` for the `τ₁` family.
/// Only defined for Demoulin jets (`|P|, |Q| ≤ tol`).
pub fn twisted_symmetry_residual(jet: &InvariantJet, lambda: C64, tol: f64) -> Result<f64> {
    if jet.big_p.abs() > tol || jet.big_q.abs() > tol {
        return Err(Error::NotDemoulin {
            p: jet.big_p,
            q: jet.big_q,
        });
    }
    let here = loop_connection(jet, lambda, Twisting::Tau1)?;
    let there = loop_connection(jet, -epsilon() * lambda, Twisting::Tau1)?;
    let k = Automorphism::Kappa;
    Ok((k.apply(&here.u) - there.u)
        .max_abs()
        .max((k.apply(&here.v) - there.v).max_abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimitivityReport {
    /// Largest component outside the allowed `κ`-eigenspaces.
    pub grading_leakage: f64,
    /// Largest imaginary entry inside the allowed components.
    pub imaginary_leakage: f64,
}

impl PrimitivityReport {
    pub fn is_primitive(&self, tol: f64) -> bool {
        self.grading_leakage <= tol && self.imaginary_leakage <= tol
    }
}

/// Grades the four pieces of the `τ₁` family under `κ`: the λ-free parts of
/// `U` and `V` must lie in `𝔤₀`, the λ⁻¹ part of `U` in `𝔤₋₁`, and the λ
/// part of `V` in `𝔤₁`.
pub fn primitivity(jet: &InvariantJet) -> PrimitivityReport {
    let pair = ConnectionPair::from_jet(jet);
    let (uk, up) = Twisting::Tau1.split(&pair.u);
    let (vk, vp) = Twisting::Tau1.split(&pair.v);
    let mut grading_leakage: f64 = 0.0;
    let mut imaginary_leakage: f64 = 0.0;
    for (part, allowed) in [(uk, 0), (up, 5), (vk, 0), (vp, 1)] {
        let comps = eigencomponents(&part.to_complex(), Automorphism::Kappa);
        for (j, comp) in comps.iter().enumerate() {
            if j == allowed {
                imaginary_leakage = imaginary_leakage.max(comp.map(|z| z.im).max_abs());
            } else {
                grading_leakage = grading_leakage.max(comp.max_abs());
            }
        }
    }
    PrimitivityReport {
        grading_leakage,
        imaginary_leakage,
    }
}

pub fn primitivity_check(jet: &InvariantJet, tol: f64) -> bool {
    primitivity(jet).is_primitive(tol)
}

/// Coefficients read back from a gauge-transformed family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeReadback {
    pub lambda: f64,
    #[serde(skip)]
    pub u: Mat4,
    #[serde(skip)]
    pub v: Mat4,
    pub b: f64,
    pub c: f64,
    pub big_p: f64,
    pub big_q: f64,
    pub k: f64,
    pub l: f64,
}

/// Conjugates a real `τ₁` family by `D = diag(1, λ, λ⁻¹, 1)`, checks that
/// the result has the exact Wilczynski pattern, and reads off the new
/// coefficients. Expected: `b̃ = λ⁻³b`, `c̃ = λ³c`, `P̃ = λ⁻²P`, `Q̃ = λ²Q`,
/// `k̃ = k`, `ℓ̃ = ℓ`.
pub fn gauge_transform(pair: &LoopConnectionPair) -> Result<GaugeReadback> {
    if pair.twisting != Twisting::Tau1 {
        return Err(Error::Unsupported(
            "gauge transform is defined for the tau1 family".into(),
        ));
    }
    if pair.lambda.im != 0.0 || pair.lambda.re == 0.0 {
        return Err(Error::Unsupported(format!(
            "gauge transform needs real nonzero λ, got {}",
            pair.lambda
        )));
    }
    let lambda = pair.lambda.re;
    let d = [1.0, lambda, 1.0 / lambda, 1.0];
    let real = |m: &CMat4| -> Result<Mat4> {
        let im = m.map(|z| z.im).max_abs();
        if im != 0.0 {
            return Err(Error::Consistency {
                what: "real gauge input",
                deviation: im,
            });
        }
        Ok(m.map(|z| z.re))
    };
    let u = real(&pair.u)?.diag_conjugate(d);
    let v = real(&pair.v)?.diag_conjugate(d);

    let b = u.m[2][1];
    let c = v.m[1][2];
    let (big_p, k) = (u.m[0][1], u.m[0][2]);
    let (big_q, l) = (v.m[0][2], v.m[0][1]);
    let (hu, hv) = (u.m[0][0], v.m[0][0]);
    let tol = 1e-12 * (1.0 + u.max_abs().max(v.max_abs()));

    let expect_u = Mat4::new([
        [hu, big_p, k, b * big_q],
        [1.0, -hu, 0.0, k],
        [0.0, b, hu, big_p],
        [0.0, 0.0, 1.0, -hu],
    ]);
    let expect_v = Mat4::new([
        [hv, l, big_q, c * big_p],
        [0.0, hv, c, big_q],
        [1.0, 0.0, -hv, l],
        [0.0, 1.0, 0.0, -hv],
    ]);
    for (name, got, want) in [("U", &u, &expect_u), ("V", &v, &expect_v)] {
        for i in 0..4 {
            for j in 0..4 {
                if (got.m[i][j] - want.m[i][j]).abs() > tol {
                    return Err(Error::PatternViolation {
                        matrix: name,
                        row: i,
                        col: j,
                        found: got.m[i][j],
                        expected: want.m[i][j],
                    });
                }
            }
        }
    }
    Ok(GaugeReadback {
        lambda,
        u,
        v,
        b,
        c,
        big_p,
        big_q,
        k,
        l,
    })
}
