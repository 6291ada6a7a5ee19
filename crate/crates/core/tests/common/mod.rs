#![allow(dead_code)]

use wilczynski::{Mat4, Rect, SurfaceModel, SurfaceSpec};

pub fn model(
    name: &str,
    b: &str,
    c: &str,
    p: &str,
    q: &str,
    domain: Rect,
    n: usize,
) -> SurfaceModel {
    let spec = SurfaceSpec::parse(name, b, c, p, q)
        .unwrap()
        .with_domain(domain)
        .with_grid(n, n);
    SurfaceModel::new(spec).unwrap()
}

pub fn trivial() -> SurfaceModel {
    model("trivial", "1", "1", "0", "0", Rect::unit(), 33)
}

pub fn coincidence() -> SurfaceModel {
    model("coincidence", "1", "1", "1", "2", Rect::unit(), 33)
}

pub fn non_minimal() -> SurfaceModel {
    model("non-minimal", "1", "1", "x", "y", Rect::unit(), 33)
}

pub fn reference_surfaces() -> [SurfaceModel; 3] {
    [trivial(), coincidence(), non_minimal()]
}

/// Matrix exponential by scaling and squaring of a degree-20 Taylor sum.
pub fn expm(a: &Mat4) -> Mat4 {
    let norm = a.max_abs() * 4.0;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let s = a.scale(0.5f64.powi(squarings as i32));
    let mut term = Mat4::identity();
    let mut sum = Mat4::identity();
    for k in 1..=20 {
        term = (term * s).scale(1.0 / k as f64);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Fourth-order central difference.
pub fn central5(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}
