//! Dense complex linear algebra for the two Hilbert spaces used here: a
//! single qubit (dimension 2, path or polarization) and the joint
//! path ⊗ polarization space (dimension 4).
//!
//! Matrices are stored row-major in fixed-size arrays. Hermitian
//! eigendecomposition is analytic for 2×2 and uses cyclic complex Jacobi
//! rotations for larger sizes.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::QmathError;

/// Elementwise tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Off-diagonal Frobenius threshold at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A ket with `N` complex amplitudes. No implicit normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector<const N: usize>(pub [C64; N]);

/// An `N`×`N` complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>(pub [[C64; N]; N]);

pub type Vector2 = Vector<2>;
pub type Vector4 = Vector<4>;
pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

impl<const N: usize> Vector<N> {
    pub fn zeros() -> Self {
        Vector([ZERO; N])
    }

    /// Standard basis vector `|i⟩`.
    pub fn basis(i: usize) -> Self {
        let mut v = Self::zeros();
        v.0[i] = ONE;
        v
    }

    pub fn from_real(xs: [f64; N]) -> Self {
        Vector(xs.map(|x| C64::new(x, 0.0)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Vector(self.0.map(|z| z * c))
    }

    /// Returns `self / |self|`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// Outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> Matrix<N> {
        let mut m = Matrix::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * other.0[j].conj();
            }
        }
        m
    }

    /// Projector `|self⟩⟨self|`.
    pub fn projector(&self) -> Matrix<N> {
        self.outer(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl<const N: usize> Index<usize> for Vector<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for Vector<N> {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl<const N: usize> Add for Vector<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            out.0[i] += rhs.0[i];
        }
        out
    }
}

impl<const N: usize> Sub for Vector<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            out.0[i] -= rhs.0[i];
        }
        out
    }
}

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diag(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, x) in d.into_iter().enumerate() {
            m.0[i][i] = C64::new(x, 0.0);
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, c: C64) -> Self {
        Matrix(self.0.map(|row| row.map(|z| z * c)))
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn mul_vec(&self, v: &Vector<N>) -> Vector<N> {
        let mut out = Vector::zeros();
        for i in 0..N {
            out.0[i] = (0..N).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        out
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// Largest elementwise modulus of `M − M†`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.dagger() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    /// `(M + M†) / 2`.
    pub fn symmetrized(&self) -> Self {
        (*self + self.dagger()).scale_real(0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    s += self.0[i][j].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Matrix(self.0.map(|row| row.map(|z| -z)))
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<const N: usize> Mul<Vector<N>> for Matrix<N> {
    type Output = Vector<N>;
    fn mul(self, rhs: Vector<N>) -> Vector<N> {
        self.mul_vec(&rhs)
    }
}

/// Kronecker product with the left operand as the slow (path) index.
pub trait Tensor<Rhs = Self> {
    type Output;
    fn tensor(&self, rhs: &Rhs) -> Self::Output;
}

impl Tensor for Vector2 {
    type Output = Vector4;
    fn tensor(&self, rhs: &Vector2) -> Vector4 {
        let mut out = Vector4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out.0[2 * i + j] = self.0[i] * rhs.0[j];
            }
        }
        out
    }
}

impl Tensor for Matrix2 {
    type Output = Matrix4;
    fn tensor(&self, rhs: &Matrix2) -> Matrix4 {
        let mut out = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.0[2 * i + k][2 * j + l] = self.0[i][j] * rhs.0[k][l];
                    }
                }
            }
        }
        out
    }
}

/// `a ⊗ b`, path factor first.
pub fn tensor<T: Tensor>(a: &T, b: &T) -> T::Output {
    a.tensor(b)
}

/// Traces out the second (polarization) factor of a path ⊗ polarization
/// operator.
pub fn partial_trace_pol(m: &Matrix4) -> Matrix2 {
    let mut out = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out.0[i][j] = (0..2).map(|k| m.0[2 * i + k][2 * j + k]).sum();
        }
    }
    out
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, Copy)]
pub struct Eigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: [Vector<N>; N],
}

impl<const N: usize> Eigen<N> {
    /// `Σ λᵢ |vᵢ⟩⟨vᵢ|`.
    pub fn reconstruct(&self) -> Matrix<N> {
        self.values
            .iter()
            .zip(self.vectors.iter())
            .fold(Matrix::zeros(), |acc, (&l, v)| acc + v.projector().scale_real(l))
    }
}

fn check_hermitian<const N: usize>(m: &Matrix<N>) -> Result<(), QmathError> {
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(QmathError::NotHermitian { deviation });
    }
    Ok(())
}

/// Rotation diagonalizing the Hermitian block `[[a, c], [c̄, d]]`.
///
/// Returns `(λ_hi, λ_lo, v_hi, v_lo)` with `v_hi = (cos t, e^{-iφ} sin t)`
/// where `c = |c| e^{iφ}` and `t = ½ atan2(2|c|, a − d)`.
fn jacobi_2x2(a: f64, d: f64, c: C64) -> (f64, f64, [C64; 2], [C64; 2]) {
    let r = c.norm();
    let mean = 0.5 * (a + d);
    let half_gap = (0.5 * (a - d)).hypot(r);
    let t = 0.5 * (2.0 * r).atan2(a - d);
    let (s, co) = t.sin_cos();
    let phase = if r > 0.0 { c / r } else { ONE };
    let v_hi = [C64::new(co, 0.0), phase.conj() * s];
    let v_lo = [-phase * s, C64::new(co, 0.0)];
    (mean + half_gap, mean - half_gap, v_hi, v_lo)
}

fn eig_2x2<const N: usize>(m: &Matrix<N>) -> Eigen<N> {
    debug_assert_eq!(N, 2);
    let a = m.0[0][0].re;
    let d = m.0[1][1].re;
    let (hi, lo, v_hi, v_lo) = jacobi_2x2(a, d, m.0[0][1]);
    let mut values = [0.0; N];
    let mut vectors = [Vector::zeros(); N];
    values[0] = lo;
    values[1] = hi;
    vectors[0].0[0] = v_lo[0];
    vectors[0].0[1] = v_lo[1];
    vectors[1].0[0] = v_hi[0];
    vectors[1].0[1] = v_hi[1];
    Eigen { values, vectors }
}

fn eig_jacobi<const N: usize>(m: &Matrix<N>) -> Eigen<N> {
    let mut a = *m;
    let mut v = Matrix::<N>::identity();
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let c = a.0[p][q];
                if c.norm() == 0.0 {
                    continue;
                }
                let (_, _, v_hi, v_lo) = jacobi_2x2(a.0[p][p].re, a.0[q][q].re, c);
                // J is the identity except on rows/cols p, q, whose columns
                // are the 2×2 eigenvectors; A ← J† A J, V ← V J.
                let (jpp, jqp, jpq, jqq) = (v_hi[0], v_hi[1], v_lo[0], v_lo[1]);
                for k in 0..N {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * jpp + akq * jqp;
                    a.0[k][q] = akp * jpq + akq * jqq;
                }
                for k in 0..N {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a.0[q][k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p].im = 0.0;
                a.0[q][q].im = 0.0;
                for k in 0..N {
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = vkp * jpp + vkq * jqp;
                    v.0[k][q] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let values = order.map(|i| a.0[i][i].re);
    let vectors = order.map(|i| Vector(std::array::from_fn(|k| v.0[k][i])));
    Eigen { values, vectors }
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// before decomposition; eigenvalues are returned in ascending order.
pub fn eig_hermitian<const N: usize>(m: &Matrix<N>) -> Result<Eigen<N>, QmathError> {
    check_hermitian(m)?;
    let h = m.symmetrized();
    Ok(if N == 2 { eig_2x2(&h) } else { eig_jacobi(&h) })
}

/// `Tr|M| = Σ|λᵢ|` for Hermitian `M`.
pub fn trace_norm<const N: usize>(m: &Matrix<N>) -> Result<f64, QmathError> {
    Ok(eig_hermitian(m)?.values.iter().map(|l| l.abs()).sum())
}
