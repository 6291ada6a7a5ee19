//! Fixed-size 4×4 matrices over real or complex scalars.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

/// Dense 4×4 matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix4<T> {
    pub m: [[T; 4]; 4],
}

impl<T: Field> fmt::Debug for Matrix4<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.m.iter()).finish()
    }
}

impl<T: Field> Default for Matrix4<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Field> Matrix4<T> {
    pub const fn new(m: [[T; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self::new([[T::zero(); 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diag([T::one(); 4])
    }

    pub fn diag(d: [T; 4]) -> Self {
        let mut out = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            out.m[i][i] = v;
        }
        out
    }

    /// Anti-diagonal matrix with `a` in the top-right corner, then `b`, `c`,
    /// and `d` in the bottom-left corner.
    pub fn offdiag(a: T, b: T, c: T, d: T) -> Self {
        let mut out = Self::zero();
        out.m[0][3] = a;
        out.m[1][2] = b;
        out.m[2][1] = c;
        out.m[3][0] = d;
        out
    }

    /// Elementary matrix with a single one at `(row, col)`, zero-based.
    pub fn unit(row: usize, col: usize) -> Self {
        let mut out = Self::zero();
        out.m[row][col] = T::one();
        out
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] = f(i, j);
            }
        }
        out
    }

    pub fn map<S: Field>(&self, mut f: impl FnMut(T) -> S) -> Matrix4<S> {
        Matrix4::from_fn(|i, j| f(self.m[i][j]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i])
    }

    pub fn trace(&self) -> T {
        (0..4).fold(T::zero(), |acc, i| acc + self.m[i][i])
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.modulus())
            .fold(0.0, f64::max)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn determinant(&self) -> T {
        let m = &self.m;
        // 2×2 minors of the top two and bottom two rows
        let s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
        let s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
        let s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
        let s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
        let s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
        let s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
        let c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
        let c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
        let c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
        let c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
        let c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
        let c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
        s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
    }

    /// Inverse via Gauss–Jordan elimination with partial pivoting.
    ///
    /// Fails when a pivot falls below `1e-14` times the largest entry.
    pub fn inverse(&self) -> Result<Self> {
        let scale = self.max_abs();
        let mut a = self.m;
        let mut inv = Self::identity().m;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&r, &s| a[r][col].modulus().total_cmp(&a[s][col].modulus()))
                .unwrap_or(col);
            if !(a[pivot][col].modulus() > 1e-14 * scale) {
                return Err(Error::Singular {
                    det: self.determinant().modulus(),
                });
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col];
            for j in 0..4 {
                a[col][j] = a[col][j] / p;
                inv[col][j] = inv[col][j] / p;
            }
            for r in 0..4 {
                if r == col {
                    continue;
                }
                let f = a[r][col];
                if f == T::zero() {
                    continue;
                }
                for j in 0..4 {
                    a[r][j] = a[r][j] - f * a[col][j];
                    inv[r][j] = inv[r][j] - f * inv[col][j];
                }
            }
        }
        Ok(Self::new(inv))
    }

    /// Determinant, inverse and trace in one call.
    pub fn det_inv_trace(&self) -> Result<(T, Self, T)> {
        Ok((self.determinant(), self.inverse()?, self.trace()))
    }

    /// Congruence `G M Gᵗ`.
    pub fn congruence(&self, g: &Self) -> Self {
        *g * *self * g.transpose()
    }

    /// Conjugation `G M G⁻¹` with a diagonal `G`.
    pub fn diag_conjugate(&self, d: [T; 4]) -> Self {
        Self::from_fn(|i, j| d[i] * self.m[i][j] / d[j])
    }
}

impl<T: Real> Matrix4<T> {
    pub fn to_complex(&self) -> Matrix4<Complex<T>>
    where
        Complex<T>: Field,
    {
        self.map(|v| Complex::new(v, T::zero()))
    }

    /// Eigenvalues of the symmetric part, ascending, by cyclic Jacobi sweeps.
    pub fn symmetric_eigenvalues(&self) -> [T; 4] {
        let half = T::from_real(0.5);
        let mut a = Self::from_fn(|i, j| (self.m[i][j] + self.m[j][i]) * half).m;
        for _sweep in 0..64 {
            let (mut off, mut total) = (T::zero(), T::zero());
            for (i, row) in a.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    total = total + *v * *v;
                    if i != j {
                        off = off + *v * *v;
                    }
                }
            }
            if off <= T::epsilon() * T::epsilon() * total {
                break;
            }
            for p in 0..3 {
                for q in p + 1..4 {
                    if a[p][q] == T::zero() {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (T::from_real(2.0) * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..4 {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..4 {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev = [a[0][0], a[1][1], a[2][2], a[3][3]];
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// Structural test for membership in the space of unimodular quadrics.
    pub fn quadric_check(&self, tol: f64) -> QuadricCheck {
        let asym = (*self - self.transpose()).max_abs();
        let det = self.determinant().to_f64().unwrap_or(f64::NAN);
        let eigenvalues: Vec<f64> = self
            .symmetric_eigenvalues()
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .collect();
        let signature = if eigenvalues.iter().any(|v| !(v.abs() > tol)) {
            None
        } else {
            let pos = eigenvalues.iter().filter(|v| **v > 0.0).count();
            Some((pos, 4 - pos))
        };
        QuadricCheck {
            symmetric: asym <= tol,
            unit_det: (det - 1.0).abs() <= tol,
            determinant: det,
            signature,
            eigenvalues,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadricCheck {
    pub symmetric: bool,
    pub unit_det: bool,
    pub determinant: f64,
    /// Counts of positive and negative eigenvalues; `None` when an eigenvalue
    /// is within tolerance of zero.
    pub signature: Option<(usize, usize)>,
    pub eigenvalues: Vec<f64>,
}

impl QuadricCheck {
    pub fn is_split_quadric(&self) -> bool {
        self.symmetric && self.unit_det && self.signature == Some((2, 2))
    }
}

impl<T: Field> Add for Matrix4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] + rhs.m[i][j])
    }
}

impl<T: Field> AddAssign for Matrix4<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Field> Sub for Matrix4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] - rhs.m[i][j])
    }
}

impl<T: Field> Neg for Matrix4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|v| -v)
    }
}

impl<T: Field> Mul for Matrix4<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..4).fold(T::zero(), |acc, k| acc + self.m[i][k] * rhs.m[k][j]))
    }
}

impl<T: Field> Index<(usize, usize)> for Matrix4<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.m[i][j]
    }
}

impl<T: Field> IndexMut<(usize, usize)> for Matrix4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.m[i][j]
    }
}

/// `J₁ = offdiag(1, 1, 1, 1)`, the exchange matrix.
pub fn j1<T: Field>() -> Matrix4<T> {
    Matrix4::offdiag(T::one(), T::one(), T::one(), T::one())
}

/// `J₂ = offdiag(1, −1, −1, 1)`.
pub fn j2<T: Field>() -> Matrix4<T> {
    Matrix4::offdiag(T::one(), -T::one(), -T::one(), T::one())
}

/// Commutator `AB − BA`.
pub fn commutator<T: Field>(a: &Matrix4<T>, b: &Matrix4<T>) -> Matrix4<T> {
    a.commutator(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CMat4, Mat4};
    use proptest::prelude::*;

    fn arb_mat() -> impl Strategy<Value = Mat4> {
        proptest::array::uniform4(proptest::array::uniform4(-2.0..2.0_f64)).prop_map(Mat4::new)
    }

    #[test]
    fn identity_commutes() {
        let b = Mat4::from_fn(|i, j| (i * 4 + j) as f64);
        assert_eq!(commutator(&Mat4::identity(), &b), Mat4::zero());
    }

    #[test]
    fn commutator_of_projector_with_elementary() {
        let a = Mat4::diag([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(a.commutator(&Mat4::unit(0, 1)), Mat4::unit(0, 1));
    }

    #[test]
    fn exchange_matrices_are_split_quadrics() {
        for j in [j1::<f64>(), j2::<f64>()] {
            let q = j.quadric_check(1e-9);
            assert!(q.symmetric && q.unit_det);
            assert_eq!(q.signature, Some((2, 2)));
            for (e, w) in q.eigenvalues.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
                assert!((e - w).abs() < 1e-14);
            }
        }
        let q = Mat4::identity().quadric_check(1e-9);
        assert_eq!(q.signature, Some((4, 0)));
        assert!(q.unit_det);
    }

    #[test]
    fn singular_signature_is_degenerate() {
        let q = Mat4::diag([1.0, -1.0, 0.0, 2.0]).quadric_check(1e-9);
        assert_eq!(q.signature, None);
        assert!(!q.unit_det);
    }

    #[test]
    fn det_inv_trace_examples() {
        let (d, inv, t) = Mat4::identity().det_inv_trace().unwrap();
        assert_eq!((d, inv, t), (1.0, Mat4::identity(), 4.0));

        let j = j1::<f64>();
        let (d, inv, t) = j.det_inv_trace().unwrap();
        assert_eq!((d, inv, t), (1.0, j, 0.0));
        assert_eq!(j * j, Mat4::identity());

        let m = Mat4::diag([1.0, 2.0, 3.0, 1.0 / 6.0]);
        let (d, inv, t) = m.det_inv_trace().unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!((inv - Mat4::diag([1.0, 0.5, 1.0 / 3.0, 6.0])).max_abs() < 1e-15);
        assert!((t - (6.0 + 1.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn singular_inverse_is_rejected() {
        let m = Mat4::diag([1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(m.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn complex_determinant_and_inverse() {
        let i = Complex::new(0.0, 1.0);
        let m = CMat4::diag([i, -i, Complex::new(2.0, 0.0), Complex::new(0.5, 0.0)]);
        assert!((m.determinant() - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m * m.inverse().unwrap() - CMat4::identity()).max_abs() < 1e-15);
    }

    #[test]
    fn single_precision_matrices() {
        let m = Matrix4::<f32>::diag([2.0, 0.5, 1.0, 1.0]);
        assert_eq!(m.determinant(), 1.0);
        assert_eq!(j1::<f32>().quadric_check(1e-5).signature, Some((2, 2)));
    }

    proptest! {
        #[test]
        fn commutator_is_antisymmetric(a in arb_mat(), b in arb_mat()) {
            prop_assert_eq!(a.commutator(&b), -b.commutator(&a));
        }

        #[test]
        fn inverse_round_trip(a in arb_mat()) {
            // shift toward diagonal dominance to stay well-conditioned
            let m = a + Mat4::identity().scale(9.0);
            let inv = m.inverse().unwrap();
            prop_assert!((m * inv - Mat4::identity()).max_abs() <= 1e-10);
        }

        #[test]
        fn signature_is_congruence_invariant(a in arb_mat(), d in proptest::array::uniform4(0.5..3.0_f64)) {
            let g = a.scale(0.1) + Mat4::identity();
            let base = Mat4::diag([d[0], -d[1], d[2], -d[3]]);
            let moved = base.congruence(&g);
            prop_assert_eq!(moved.quadric_check(1e-9).signature, Some((2, 2)));
        }

        #[test]
        fn determinant_is_multiplicative(a in arb_mat(), b in arb_mat()) {
            let lhs = (a * b).determinant();
            let rhs = a.determinant() * b.determinant();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }
}
