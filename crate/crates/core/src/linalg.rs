//! Dense complex vectors and operators on a finite-dimensional Hilbert space.
//!
//! Everything is row-major `Vec<Complex<T>>` storage. Dimensions in this crate
//! stay at desk scale (d ≤ 100), so the solvers are plain cyclic Jacobi
//! iterations: a two-sided sweep for Hermitian eigendecompositions and a
//! one-sided (Hestenes) sweep for singular values. Both are generic over the
//! real scalar and converge to near machine precision at these sizes.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;
use std::ops::{Add, Mul, Sub};

const MAX_JACOBI_SWEEPS: usize = 64;

/// Column vector in the d-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<T: Scalar> {
    data: Vec<Complex<T>>,
}

impl<T: Scalar> Vector<T> {
    pub fn zeros(dim: usize) -> Self {
        Vector {
            data: vec![Complex::new(T::zero(), T::zero()); dim],
        }
    }

    /// Standard basis vector e_k.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut v = Self::zeros(dim);
        v.data[k] = Complex::new(T::one(), T::zero());
        v
    }

    pub fn from_entries(data: Vec<Complex<T>>) -> Self {
        Vector { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn get(&self, i: usize) -> Complex<T> {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, v: Complex<T>) {
        self.data[i] = v;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Inner product ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    pub fn norm(&self) -> T {
        self.inner(self).re.sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scaled(Complex::new(T::one() / n, T::zero()))
    }

    pub fn scaled(&self, w: Complex<T>) -> Self {
        Vector {
            data: self.data.iter().map(|z| z * w).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Vector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Tensor product, first factor most significant: (u ⊗ v)[i·dim(v)+j] = u_i v_j.
    pub fn kron(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Vector { data }
    }
}

/// Dense square complex matrix acting on the d-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Scalar> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> Operator<T> {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Operator { dim, data }
    }

    /// Rank-one operator |u⟩⟨v|.
    pub fn outer(u: &Vector<T>, v: &Vector<T>) -> Self {
        assert_eq!(u.dim(), v.dim());
        Self::from_fn(u.dim(), |r, c| u.get(r) * v.get(c).conj())
    }

    /// Projection |u⟩⟨u| onto (the ray of) a vector.
    pub fn projector(u: &Vector<T>) -> Self {
        Self::outer(u, u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex<T>) {
        self.data[r * self.dim + c] = v;
    }

    pub fn row_major_entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim)
            .map(|i| self.get(i, i))
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim, other.dim);
        let mut acc = Complex::new(T::zero(), T::zero());
        for r in 0..self.dim {
            for c in 0..self.dim {
                acc = acc + self.get(r, c) * other.get(c, r);
            }
        }
        acc
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let v = out.get(r, c) + a * rhs.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// u · self · u†.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn apply(&self, v: &Vector<T>) -> Vector<T> {
        assert_eq!(self.dim, v.dim());
        let mut out = Vector::zeros(self.dim);
        for r in 0..self.dim {
            let mut acc = Complex::new(T::zero(), T::zero());
            for c in 0..self.dim {
                acc = acc + self.get(r, c) * v.get(c);
            }
            out.set(r, acc);
        }
        out
    }

    pub fn scaled(&self, w: Complex<T>) -> Self {
        Operator {
            dim: self.dim,
            data: self.data.iter().map(|z| z * w).collect(),
        }
    }

    pub fn scaled_re(&self, w: T) -> Self {
        self.scaled(Complex::new(w, T::zero()))
    }

    /// self += w · other, the accumulation workhorse for effect sums.
    pub fn add_assign_scaled(&mut self, other: &Self, w: Complex<T>) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + b * w;
        }
    }

    /// Tensor product, first factor most significant.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        Self::from_fn(da * db, |r, c| {
            self.get(r / db, c / db) * other.get(r % db, c % db)
        })
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.max_abs_diff(&self.adjoint()) < tol
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Eigendecomposition of a Hermitian operator by cyclic Jacobi sweeps.
    ///
    /// The input is symmetrized first, so stray anti-Hermitian rounding dust is
    /// harmless; genuinely non-Hermitian input gives meaningless results.
    /// Eigenvalues come back ascending, `vectors` holds the eigenvectors as
    /// columns of a unitary.
    pub fn hermitian_eigen(&self) -> Result<HermitianEigen<T>> {
        let n = self.dim;
        let half = T::of(0.5);
        // symmetrize: a ← (a + a†)/2
        let mut a = Self::from_fn(n, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()).scale(half)
        });
        let mut v = Self::identity(n);
        if n <= 1 {
            return Ok(HermitianEigen {
                values: (0..n).map(|i| a.get(i, i).re).collect(),
                vectors: v,
            });
        }
        let stop = a.frobenius_norm() * T::epsilon();
        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    if apq.norm() <= stop {
                        continue;
                    }
                    rotated = true;
                    let (c, s, phase) = jacobi_rotation(a.get(p, p).re, a.get(q, q).re, apq);
                    apply_rotation_two_sided(&mut a, p, q, c, s, phase);
                    apply_rotation_columns(&mut v, p, q, c, s, phase);
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(MAX_JACOBI_SWEEPS));
        }
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
        let values = order.iter().map(|&i| diag[i]).collect();
        let vectors = Self::from_fn(n, |r, c| v.get(r, order[c]));
        Ok(HermitianEigen { values, vectors })
    }

    /// Smallest eigenvalue of a Hermitian operator.
    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.hermitian_eigen()?.values[0])
    }

    /// Operator norm of a Hermitian operator (largest |eigenvalue|).
    pub fn hermitian_norm(&self) -> Result<T> {
        let ev = self.hermitian_eigen()?.values;
        Ok(ev.iter().map(|x| x.abs()).fold(T::zero(), |a, b| a.max(b)))
    }

    /// Positive square root of a positive semidefinite Hermitian operator.
    ///
    /// Eigenvalues in [−psd_floor, 0) are clamped to zero; anything below the
    /// floor is an error.
    pub fn sqrt_psd(&self, psd_floor: T) -> Result<Self> {
        let eig = self.hermitian_eigen()?;
        let n = self.dim;
        let mut roots = Vec::with_capacity(n);
        for &ev in &eig.values {
            if ev < -psd_floor {
                return Err(Error::SqrtOfIndefinite(format!(
                    "eigenvalue {ev} below floor -{psd_floor}"
                )));
            }
            roots.push(ev.max(T::zero()).sqrt());
        }
        let mut out = Self::zeros(n);
        for (k, &r) in roots.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let col = Vector::from_entries((0..n).map(|i| eig.vectors.get(i, k)).collect());
            out.add_assign_scaled(&Self::projector(&col), Complex::new(r, T::zero()));
        }
        Ok(out)
    }
}

impl<T: Scalar> Add for &Operator<T> {
    type Output = Operator<T>;
    fn add(self, rhs: &Operator<T>) -> Operator<T> {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Operator<T> {
    type Output = Operator<T>;
    fn sub(self, rhs: &Operator<T>) -> Operator<T> {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<T: Scalar> Mul for &Operator<T> {
    type Output = Operator<T>;
    fn mul(self, rhs: &Operator<T>) -> Operator<T> {
        self.matmul(rhs)
    }
}

/// Result of a Hermitian eigendecomposition.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Scalar> {
    /// Eigenvalues, ascending.
    pub values: Vec<T>,
    /// Unitary whose k-th column is the eigenvector of `values[k]`.
    pub vectors: Operator<T>,
}

impl<T: Scalar> HermitianEigen<T> {
    pub fn eigenvector(&self, k: usize) -> Vector<T> {
        let n = self.vectors.dim();
        Vector::from_entries((0..n).map(|i| self.vectors.get(i, k)).collect())
    }
}

/// 2×2 Jacobi rotation annihilating the off-diagonal entry of the Hermitian
/// block [[app, apq], [apq*, aqq]]. Returns (cos, sin, phase) with
/// phase = apq/|apq|.
fn jacobi_rotation<T: Scalar>(app: T, aqq: T, apq: Complex<T>) -> (T, T, Complex<T>) {
    let b = apq.norm();
    let phase = apq.unscale(b);
    let zeta = (app - aqq) / (b + b);
    let t = if zeta.is_zero() {
        T::one()
    } else {
        let sign = if zeta > T::zero() {
            T::one()
        } else {
            -T::one()
        };
        sign / (zeta.abs() + (zeta * zeta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    (c, t * c, phase)
}

/// a ← U† a U for the plane rotation U acting on columns/rows (p, q).
fn apply_rotation_two_sided<T: Scalar>(
    a: &mut Operator<T>,
    p: usize,
    q: usize,
    c: T,
    s: T,
    phase: Complex<T>,
) {
    apply_rotation_columns(a, p, q, c, s, phase);
    // rows, left multiplication by U†
    let n = a.dim();
    let cc = Complex::new(c, T::zero());
    let sp = phase.scale(s);
    for r in 0..n {
        let xp = a.get(p, r);
        let xq = a.get(q, r);
        a.set(p, r, xp * cc + xq * sp);
        a.set(q, r, xq * cc - xp * sp.conj());
    }
}

/// m ← m U, i.e. mix columns p and q by the plane rotation.
fn apply_rotation_columns<T: Scalar>(
    m: &mut Operator<T>,
    p: usize,
    q: usize,
    c: T,
    s: T,
    phase: Complex<T>,
) {
    let n = m.dim();
    let cc = Complex::new(c, T::zero());
    let sp = phase.scale(s);
    for r in 0..n {
        let xp = m.get(r, p);
        let xq = m.get(r, q);
        m.set(r, p, xp * cc + xq * sp.conj());
        m.set(r, q, xq * cc - xp * sp);
    }
}

/// Singular values (descending) of the matrix whose rows are the vectorized
/// operators, via one-sided Jacobi orthogonalization. Used for numerical rank
/// of operator spans; exact zero singular values come out at rounding level
/// rather than being squared through a Gram matrix.
#[allow(clippy::needless_range_loop)] // paired indexing of two columns of the same buffer
pub fn span_singular_values<T: Scalar>(mats: &[Operator<T>]) -> Vec<T> {
    if mats.is_empty() {
        return Vec::new();
    }
    let m = mats[0].dim() * mats[0].dim();
    let k = mats.len();
    // columns[j] = vectorization of mats[j]
    let mut cols: Vec<Vec<Complex<T>>> = mats
        .iter()
        .map(|op| op.row_major_entries().to_vec())
        .collect();
    let scale: T = cols
        .iter()
        .flat_map(|c| c.iter())
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt();
    if scale.is_zero() {
        return vec![T::zero(); k];
    }
    let stop = scale * scale * T::epsilon();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..k.saturating_sub(1) {
            for q in p + 1..k {
                let mut g = Complex::new(T::zero(), T::zero());
                let mut a = T::zero();
                let mut b = T::zero();
                for i in 0..m {
                    g = g + cols[p][i].conj() * cols[q][i];
                    a += cols[p][i].norm_sqr();
                    b += cols[q][i].norm_sqr();
                }
                if g.norm() <= stop || a.is_zero() || b.is_zero() {
                    continue;
                }
                if g.norm() <= T::epsilon() * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(a, b, g);
                let cc = Complex::new(c, T::zero());
                let sp = phase.scale(s);
                for i in 0..m {
                    let xp = cols[p][i];
                    let xq = cols[q][i];
                    cols[p][i] = xp * cc + xq * sp.conj();
                    cols[q][i] = xq * cc - xp * sp;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols
        .iter()
        .map(|col| {
            col.iter()
                .map(|z| z.norm_sqr())
                .fold(T::zero(), |x, y| x + y)
                .sqrt()
        })
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    sv
}

/// Numerical rank of the span of the given operators: the number of singular
/// values above `rel_tol` times the largest one.
pub fn span_rank<T: Scalar>(mats: &[Operator<T>], rel_tol: T) -> usize {
    let sv = span_singular_values(mats);
    match sv.first() {
        None => 0,
        Some(&top) if top.is_zero() => 0,
        Some(&top) => sv.iter().filter(|&&s| s > rel_tol * top).count(),
    }
}

/// Positive unit-trace operator: a quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Scalar> {
    op: Operator<T>,
}

impl<T: Scalar> DensityOperator<T> {
    /// Wrap without checking; call [`DensityOperator::validate`] explicitly.
    pub fn new(op: Operator<T>) -> Self {
        DensityOperator { op }
    }

    /// Maximally mixed state 𝟙/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(Operator::identity(dim).scaled_re(T::one() / T::of_usize(dim)))
    }

    /// Pure state |u⟩⟨u| of a unit vector.
    pub fn pure(u: &Vector<T>) -> Self {
        Self::new(Operator::projector(u))
    }

    pub fn op(&self) -> &Operator<T> {
        &self.op
    }

    pub fn into_op(self) -> Operator<T> {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Hermiticity, positivity (floor `psd`) and unit trace (slack `eq`).
    pub fn validate(&self, eq: T, psd: T) -> Result<()> {
        if !self.op.is_hermitian(eq) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let min = self.op.min_eigenvalue()?;
        if min < -psd {
            return Err(Error::InvalidState(format!(
                "eigenvalue {min} below -{psd}"
            )));
        }
        let tr = self.op.trace();
        if (tr.re - T::one()).abs() > eq || tr.im.abs() > eq {
            return Err(Error::InvalidState(format!("trace {tr} is not one")));
        }
        Ok(())
    }
}
