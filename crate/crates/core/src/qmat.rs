//! Dense complex-matrix kernel.
//!
//! Row-major complex matrices with the handful of operations the rest of the
//! crate needs: Kronecker products, partial traces over arbitrary factors,
//! subsystem permutations, a cyclic Jacobi eigensolver for Hermitian matrices,
//! spectral matrix functions and the trace/operator norms.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = &self.data[r * self.cols + c];
                write!(f, "({:?}, {:?}) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = creal(T::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = creal(d);
        }
        m
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| creal(rows[i][j])))
    }

    /// Column vector from amplitudes.
    pub fn column(v: &[Complex<T>]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex<T>], b: &[Complex<T>]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    /// Projector `|k⟩⟨k|` in dimension `n`.
    pub fn basis_projector(n: usize, k: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(k, k)] = creal(T::one());
        m
    }

    /// `|i⟩⟨j|` in dimension `rows x cols`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = creal(T::one());
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_c(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        let n = self.rows.min(self.cols);
        (0..n).fold(creal(T::zero()), |acc, i| acc + self[(i, i)])
    }

    /// Real part of the trace.
    pub fn tr(&self) -> T {
        self.trace().re
    }

    pub fn diag_real(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    /// Maximum of `|M[i][j] - conj(M[j][i])|`.
    pub fn hermiticity_error(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `(M + M†)/2`.
    pub fn hermitize(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * half
        })
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        (self - other).frobenius_norm()
    }

    pub fn mat_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(v).fold(creal(T::zero()), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn column_vec(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = creal(T::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Expectation `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &[Complex<T>]) -> Complex<T> {
        let mv = self.mat_vec(v);
        v.iter().zip(&mv).fold(creal(T::zero()), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn check_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{what} must be square, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    /// Errors unless the matrix is square and Hermitian within a scale-aware tolerance.
    pub fn check_hermitian(&self) -> Result<()> {
        self.check_square("matrix")?;
        let dev = self.hermiticity_error();
        if dev > T::tol(1e-9) * (T::one() + self.max_abs()) {
            return Err(Error::NotHermitian {
                deviation: dev.as_f64(),
            });
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> AddAssign<&CMatrix<T>> for CMatrix<T> {
    fn add_assign(&mut self, rhs: &CMatrix<T>) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + *b;
        }
    }
}

impl<T: Real> SubAssign<&CMatrix<T>> for CMatrix<T> {
    fn sub_assign(&mut self, rhs: &CMatrix<T>) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a - *b;
        }
    }
}

impl<T: Real> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matmul");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * *b;
                }
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Real> $tr for CMatrix<T> {
            type Output = CMatrix<T>;
            fn $m(self, rhs: CMatrix<T>) -> CMatrix<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Real> $tr<&CMatrix<T>> for CMatrix<T> {
            type Output = CMatrix<T>;
            fn $m(self, rhs: &CMatrix<T>) -> CMatrix<T> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    let oc = ac * bc;
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s.re == T::zero() && s.im == T::zero() {
                continue;
            }
            for k in 0..br {
                let row = (i * br + k) * oc + j * bc;
                for l in 0..bc {
                    out.data[row + l] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of matrices, left to right.
pub fn kron_all<T: Real>(factors: &[&CMatrix<T>]) -> CMatrix<T> {
    factors
        .iter()
        .fold(CMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Kronecker product of two vectors.
pub fn kron_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().flat_map(|x| b.iter().map(move |y| *x * *y)).collect()
}

fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn check_dims<T: Real>(m: &CMatrix<T>, dims: &[usize]) -> Result<()> {
    m.check_square("operator")?;
    let total: usize = dims.iter().product();
    if total != m.rows || dims.contains(&0) {
        return Err(Error::Dimension(format!(
            "subsystem dimensions {dims:?} do not factor a {}x{} operator",
            m.rows, m.cols
        )));
    }
    Ok(())
}

/// Traces out every subsystem not listed in `keep`.
///
/// `dims` lists the subsystem dimensions in tensor order; the kept factors
/// appear in the output in their original order.
pub fn partial_trace<T: Real>(m: &CMatrix<T>, dims: &[usize], keep: &[usize]) -> Result<CMatrix<T>> {
    check_dims(m, dims)?;
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::Dimension(format!("subsystem index {k} out of range")));
        }
        kept[k] = true;
    }
    let n = m.rows;
    let out_dim: usize = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();
    // split each full index into (kept, traced) composite indices
    let mut split = Vec::with_capacity(n);
    let mut dig = vec![0; dims.len()];
    for idx in 0..n {
        digits(idx, dims, &mut dig);
        let (mut ki, mut ti) = (0usize, 0usize);
        for (k, (&d, &x)) in dims.iter().zip(&dig).enumerate() {
            if kept[k] {
                ki = ki * d + x;
            } else {
                ti = ti * d + x;
            }
        }
        split.push((ki, ti));
    }
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for i in 0..n {
        let (ki, ti) = split[i];
        for j in 0..n {
            let (kj, tj) = split[j];
            if ti == tj {
                out[(ki, kj)] = out[(ki, kj)] + m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of `m`.
pub fn permute_subsystems<T: Real>(m: &CMatrix<T>, dims: &[usize], perm: &[usize]) -> Result<CMatrix<T>> {
    check_dims(m, dims)?;
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Dimension(format!("{perm:?} is not a permutation of {} factors", dims.len())));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let n = m.rows;
    let mut map = vec![0usize; n];
    let mut dig = vec![0; dims.len()];
    for (idx, slot) in map.iter_mut().enumerate() {
        digits(idx, &new_dims, &mut dig);
        // dig[k] is the digit of old factor perm[k]
        let mut old = vec![0; dims.len()];
        for (k, &p) in perm.iter().enumerate() {
            old[p] = dig[k];
        }
        *slot = old.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x);
    }
    Ok(CMatrix::from_fn(n, n, |i, j| m[(map[i], map[j])]))
}

/// Spectral decomposition `m = V diag(values) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column_vec(k)
    }

    /// Rebuilds `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(creal(T::zero()), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * fv[k])
        })
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.reconstruct_with(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn eig_hermitian<T: Real>(m: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    m.check_hermitian()?;
    Ok(jacobi(m.hermitize()))
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>> {
    eig_hermitian(m).map(|e| e.values)
}

fn jacobi<T: Real>(mut a: CMatrix<T>) -> HermitianEigen<T> {
    let n = a.rows;
    let mut v = CMatrix::<T>::identity(n);
    let two = T::lit(2.0);
    for i in 0..n {
        a[(i, i)] = creal(a[(i, i)].re);
    }
    let scale = a.frobenius_norm();
    let target = T::epsilon() * T::epsilon() * scale * scale;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off <= target || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs <= T::min_positive_value() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // skip rotations that cannot change the diagonal at working precision
                if abs < T::epsilon() * T::epsilon() * (app.abs() + aqq.abs()) {
                    a[(p, q)] = creal(T::zero());
                    a[(q, p)] = creal(T::zero());
                    continue;
                }
                let phase_conj = (apq / abs).conj();
                let tau = (aqq - app) / (two * abs);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let vqp = -phase_conj * s; // V[q][p]
                let vqq = phase_conj * c; // V[q][q]
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    let nrp = arp * c + arq * vqp;
                    let nrq = arp * s + arq * vqq;
                    a[(r, p)] = nrp;
                    a[(r, q)] = nrq;
                    a[(p, r)] = nrp.conj();
                    a[(q, r)] = nrq.conj();
                }
                a[(p, p)] = creal(app - t * abs);
                a[(q, q)] = creal(aqq + t * abs);
                a[(p, q)] = creal(T::zero());
                a[(q, p)] = creal(T::zero());
                for r in 0..n {
                    let erp = v[(r, p)];
                    let erq = v[(r, q)];
                    v[(r, p)] = erp * c + erq * vqp;
                    v[(r, q)] = erp * s + erq * vqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    HermitianEigen { values, vectors }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn psd_min_eig<T: Real>(m: &CMatrix<T>) -> Result<T> {
    Ok(eigvals_hermitian(m)?.first().copied().unwrap_or(T::zero()))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max<T: Real>(m: &CMatrix<T>) -> Result<T> {
    Ok(eigvals_hermitian(m)?.last().copied().unwrap_or(T::zero()))
}

/// PSD verdict: smallest eigenvalue ≥ −1e−9·(1 + ‖m‖∞).
pub fn is_psd<T: Real>(m: &CMatrix<T>) -> Result<bool> {
    let vals = eigvals_hermitian(m)?;
    let (lo, hi) = match (vals.first(), vals.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Ok(true),
    };
    let norm = lo.abs().max(hi.abs());
    Ok(lo >= -T::tol(1e-9) * (T::one() + norm))
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn herm_fn<T: Real>(m: &CMatrix<T>, f: impl Fn(T) -> T) -> Result<CMatrix<T>> {
    Ok(eig_hermitian(m)?.reconstruct_with(f))
}

/// Real power of a Hermitian PSD matrix via its spectrum.
///
/// Negative powers require every eigenvalue to exceed `1e-12`; tiny negative
/// eigenvalues from round-off are clamped to zero for non-negative powers.
pub fn herm_pow<T: Real>(m: &CMatrix<T>, p: T) -> Result<CMatrix<T>> {
    let eig = eig_hermitian(m)?;
    if p == T::zero() {
        return Ok(CMatrix::identity(m.rows));
    }
    if p < T::zero() {
        let floor = T::tol(1e-12);
        if let Some(&lo) = eig.values.first() {
            if lo <= floor {
                return Err(Error::Singular(format!(
                    "negative power of a matrix with eigenvalue {:.3e}",
                    lo.as_f64()
                )));
            }
        }
    }
    Ok(eig.reconstruct_with(|x| x.max(T::zero()).powf(p)))
}

/// Sum of singular values.
pub fn trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    if m.is_square() && m.hermiticity_error() <= T::tol(1e-12) * (T::one() + m.max_abs()) {
        let e = jacobi(m.hermitize());
        return e.values.iter().map(|x| x.abs()).sum();
    }
    let g = &m.adjoint() * m;
    jacobi(g.hermitize())
        .values
        .iter()
        .map(|&x| x.max(T::zero()).sqrt())
        .sum()
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn op_norm<T: Real>(m: &CMatrix<T>) -> Result<T> {
    let vals = eigvals_hermitian(m)?;
    Ok(vals.iter().fold(T::zero(), |acc, x| acc.max(x.abs())))
}

/// Purity `Tr ρ²`.
pub fn purity<T: Real>(rho: &CMatrix<T>) -> T {
    rho.trace_product(rho).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMatrix<f64> {
        CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn pauli_z() -> CMatrix<f64> {
        CMatrix::<f64>::from_real_diag(&[1.0, -1.0])
    }

    fn pseudo_random_hermitian(n: usize, seed: u64) -> CMatrix<f64> {
        // small LCG keeps this unit test free of the sampling module
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let g = CMatrix::from_fn(n, n, |_, _| cplx(next(), next()));
        (&g + &g.adjoint()).scale(0.5)
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = eig_hermitian(&CMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let e = eig_hermitian(&CMatrix::<f64>::from_real_diag(&[0.75, 0.25])).unwrap();
        assert!((e.values[0] - 0.25).abs() < 1e-15 && (e.values[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn eig_pauli_x() {
        // characteristic polynomial λ² − 1 = 0
        let e = eig_hermitian(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&pauli_x()) < 1e-14);
    }

    #[test]
    fn eig_complex_reconstruction_and_unitarity() {
        for n in 1..=12 {
            let m = pseudo_random_hermitian(n, n as u64);
            let e = eig_hermitian(&m).unwrap();
            assert!(e.reconstruct().max_abs_diff(&m) < 1e-12, "n={n}");
            let vv = &e.vectors.adjoint() * &e.vectors;
            assert!(vv.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = CMatrix::<f64>::zeros(2, 3);
        assert!(matches!(eig_hermitian(&rect), Err(Error::Dimension(_))));
        let skew = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(eig_hermitian(&skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn kron_examples() {
        let two = CMatrix::<f64>::from_real_diag(&[2.0]);
        let m = pauli_x();
        assert_eq!(kron(&two, &m), m.scale(2.0));
        let g = CMatrix::<f64>::from_real_diag(&[0.75, 0.25]);
        let gg = kron(&g, &g);
        assert_eq!(gg.diag_real(), vec![0.5625, 0.1875, 0.1875, 0.0625]);
        assert_eq!(kron(&CMatrix::<f64>::identity(2), &CMatrix::identity(3)), CMatrix::identity(6));
    }

    #[test]
    fn kron_acts_factorwise() {
        let a = pseudo_random_hermitian(2, 3);
        let b = pseudo_random_hermitian(3, 4);
        let x = vec![cplx(0.3, -0.1), cplx(0.2, 0.9)];
        let y = vec![cplx(1.0, 0.0), cplx(-0.5, 0.5), cplx(0.0, 2.0)];
        let lhs = kron(&a, &b).mat_vec(&kron_vec(&x, &y));
        let rhs = kron_vec(&a.mat_vec(&x), &b.mat_vec(&y));
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-13);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let ga = CMatrix::<f64>::from_real_diag(&[0.75, 0.25]);
        let gb = CMatrix::<f64>::from_real_diag(&[0.5, 0.3, 0.2]);
        let ab = kron(&ga, &gb);
        let a = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert!(a.max_abs_diff(&ga) < 1e-15);
        let b = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(b.max_abs_diff(&gb) < 1e-15);
        let all = partial_trace(&ab, &[2, 3], &[]).unwrap();
        assert_eq!((all.rows(), all.cols()), (1, 1));
        assert!((all[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(matches!(partial_trace(&ab, &[2, 2], &[0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn permute_swaps_kron_factors() {
        let a = pseudo_random_hermitian(2, 7);
        let b = pseudo_random_hermitian(3, 8);
        let ab = kron(&a, &b);
        let ba = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(ba.max_abs_diff(&kron(&b, &a)) < 1e-15);
        let c = pseudo_random_hermitian(2, 9);
        let abc = kron(&ab, &c);
        let cab = permute_subsystems(&abc, &[2, 3, 2], &[2, 0, 1]).unwrap();
        assert!(cab.max_abs_diff(&kron_all(&[&c, &a, &b])) < 1e-14);
    }

    #[test]
    fn psd_min_eig_examples() {
        assert!((psd_min_eig(&CMatrix::<f64>::from_real_diag(&[0.75, 0.25])).unwrap() - 0.25).abs() < 1e-15);
        assert!((psd_min_eig(&pauli_z()).unwrap() + 1.0).abs() < 1e-15);
        assert!(!is_psd(&pauli_z()).unwrap());
        assert!(is_psd(&CMatrix::<f64>::from_real_diag(&[1.0, -1e-12])).unwrap());
    }

    #[test]
    fn herm_pow_examples() {
        let m = CMatrix::<f64>::from_real_diag(&[0.25, 0.75]);
        let r = herm_pow(&m, -0.5).unwrap();
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!((r[(1, 1)].re - 1.154_700_538_379_251_5).abs() < 1e-14);
        assert_eq!(herm_pow(&m, 0.0).unwrap(), CMatrix::identity(2));
        let h = pseudo_random_hermitian(4, 11);
        let psd = &h * &h;
        let root = herm_pow(&psd, 0.5).unwrap();
        assert!((&root * &root).max_abs_diff(&psd) < 1e-10);
        assert!(herm_pow(&psd, 1.0).unwrap().max_abs_diff(&psd) < 1e-12);
        let singular = CMatrix::<f64>::from_real_diag(&[1.0, 0.0]);
        assert!(matches!(herm_pow(&singular, -1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn norms() {
        assert!((trace_norm(&CMatrix::<f64>::from_real_diag(&[0.3, -0.3])) - 0.6).abs() < 1e-15);
        assert!((op_norm(&CMatrix::<f64>::from_real_diag(&[2.0 / 3.0, 2.0])).unwrap() - 2.0).abs() < 1e-15);
        let rho = CMatrix::<f64>::from_real_diag(&[0.4, 0.6]);
        assert_eq!(trace_norm(&(&rho - &rho)), 0.0);
        // non-Hermitian: singular values of [[0, 2], [0, 0]] are {2, 0}
        let nilpotent = CMatrix::<f64>::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert!((trace_norm(&nilpotent) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn generic_over_f32() {
        let m = CMatrix::<f32>::from_real_diag(&[0.25, 0.75]);
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] - 0.25).abs() < 1e-6);
        let r = herm_pow(&m, -0.5).unwrap();
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-5);
    }
}
