//! Dense primal–dual interior-point solver for small complex LMIs.
//!
//! Problems are stated in inequality form
//!
//! ```text
//!   minimise  cᵀx   subject to   F(x) = F₀ + Σ xᵢ Fᵢ ⪰ 0   (block diagonal, Hermitian)
//!                                A x = b
//! ```
//!
//! with dual `max −Tr(F₀Z) + bᵀy` subject to `Tr(FᵢZ) + (Aᵀy)ᵢ = cᵢ`, `Z ⪰ 0`.
//! The iteration follows the HKM search direction with a Mehrotra
//! predictor–corrector, starting from a caller-supplied strictly feasible `x₀`
//! and `Z = 1`. Hermitian unknowns are parametrised by `d²` reals: the
//! diagonal first, then real and imaginary parts of the upper triangle.

use std::sync::{Arc, Mutex};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::qmat::{cplx, creal, eig_hermitian, kron, op_norm, partial_trace, CMatrix};
use crate::thermo::ThermalState;

type CMat = CMatrix<f64>;

/// One linear matrix inequality `F₀ + Σ xᵢ Fᵢ ⪰ 0`.
#[derive(Clone, Debug)]
pub struct LmiBlock {
    pub f0: CMat,
    pub coeffs: Vec<CMat>,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub c: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    /// Rows of the equality constraints `A x = b`.
    pub eq_a: Vec<Vec<f64>>,
    pub eq_b: Vec<f64>,
    /// Strictly feasible starting point for the LMIs.
    pub x0: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: Vec<f64>,
    pub z: Vec<CMat>,
    pub y: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    /// `|primal − dual|`.
    pub gap: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    /// Smallest eigenvalue of `F(x)` over all blocks.
    pub min_lmi_eig: f64,
    /// Largest entry of `|Ax − b|`.
    pub eq_residual: f64,
    /// Largest entry of `|c − F*(Z) − Aᵀy|`.
    pub dual_residual: f64,
}

/// Running record of every solve it is attached to.
#[derive(Debug, Default)]
pub struct SdpAudit {
    inner: Mutex<AuditSummary>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AuditSummary {
    pub solves: usize,
    pub non_optimal: usize,
    pub worst_gap: f64,
    pub worst_min_lmi_eig: f64,
    pub worst_eq_residual: f64,
}

impl SdpAudit {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn record(&self, sol: &SdpSolution) {
        let mut s = self.inner.lock().expect("audit lock poisoned");
        if s.solves == 0 {
            s.worst_min_lmi_eig = f64::INFINITY;
        }
        s.solves += 1;
        if sol.status != SdpStatus::Optimal {
            s.non_optimal += 1;
        }
        s.worst_gap = s.worst_gap.max(sol.gap);
        s.worst_min_lmi_eig = s.worst_min_lmi_eig.min(sol.min_lmi_eig);
        s.worst_eq_residual = s.worst_eq_residual.max(sol.eq_residual);
    }

    pub fn summary(&self) -> AuditSummary {
        *self.inner.lock().expect("audit lock poisoned")
    }
}

#[derive(Clone, Debug)]
pub struct SdpOptions {
    pub max_iter: usize,
    /// Target for `|primal − dual| / max(1, |primal|)`.
    pub gap_tol: f64,
    /// Target for the equality and dual residuals.
    pub feas_tol: f64,
    pub audit: Option<Arc<SdpAudit>>,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            gap_tol: 1e-11,
            feas_tol: 1e-11,
            audit: None,
        }
    }
}

impl SdpOptions {
    pub fn with_audit(audit: Arc<SdpAudit>) -> Self {
        Self {
            audit: Some(audit),
            ..Self::default()
        }
    }
}

impl SdpProblem {
    pub fn n_vars(&self) -> usize {
        self.c.len()
    }

    /// `F(x)` block by block.
    pub fn lmi_value(&self, x: &[f64]) -> Vec<CMat> {
        self.blocks
            .iter()
            .map(|b| {
                let mut s = b.f0.clone();
                for (xi, fi) in x.iter().zip(&b.coeffs) {
                    if *xi != 0.0 {
                        s += &fi.scale(*xi);
                    }
                }
                s.hermitize()
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.x0.len() != n {
            return Err(Error::Dimension(format!("x0 has {} entries for {n} variables", self.x0.len())));
        }
        if self.eq_a.len() != self.eq_b.len() || self.eq_a.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("equality constraints do not match the variable count".into()));
        }
        for blk in &self.blocks {
            if blk.coeffs.len() != n {
                return Err(Error::Dimension("LMI block has the wrong number of coefficients".into()));
            }
            blk.f0.check_hermitian()?;
            for f in &blk.coeffs {
                if f.rows() != blk.f0.rows() {
                    return Err(Error::Dimension("LMI coefficient of inconsistent size".into()));
                }
                f.check_hermitian()?;
            }
        }
        Ok(())
    }
}

/// Real symmetric positive-definite factorisation, row-major `n × n`.
struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    fn new(a: &[f64], n: usize) -> Result<Self> {
        let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max).max(1e-300);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a[j * n + j] - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
            if d <= 1e-15 * scale {
                // tiny pivots come from nearly dependent directions near the optimum
                d = 1e-15 * scale;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let s = a[i * n + j] - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
                l[i * n + j] = s / d;
            }
        }
        if l.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver("Schur complement factorisation failed".into()));
        }
        Ok(Self { n, l })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let s = (0..i).map(|k| self.l[i * n + k] * y[k]).sum::<f64>();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let s = (i + 1..n).map(|k| self.l[k * n + i] * y[k]).sum::<f64>();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        y
    }
}

/// `BᵀB = RᵀR` from a Householder QR of the tall matrix `B` (row-major `rows × n`).
struct GramFactor {
    n: usize,
    r: Vec<f64>,
}

impl GramFactor {
    fn new(mut b: Vec<f64>, rows: usize, n: usize) -> Option<Self> {
        if rows < n {
            return None;
        }
        for k in 0..n {
            let norm = (k..rows).map(|i| b[i * n + k] * b[i * n + k]).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return None;
            }
            let alpha = if b[k * n + k] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (k..rows).map(|i| b[i * n + k]).collect();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 > 0.0 {
                for j in k..n {
                    let dot: f64 = v.iter().enumerate().map(|(t, vi)| vi * b[(k + t) * n + j]).sum();
                    let f = 2.0 * dot / vnorm2;
                    for (t, vi) in v.iter().enumerate() {
                        b[(k + t) * n + j] -= f * vi;
                    }
                }
            }
        }
        let mut r = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                r[i * n + j] = b[i * n + j];
            }
        }
        let big = (0..n).map(|i| r[i * n + i].abs()).fold(0.0, f64::max);
        if (0..n).any(|i| r[i * n + i].abs() <= 1e-14 * big) {
            return None;
        }
        Some(Self { n, r })
    }

    /// Solves `RᵀR x = b`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.r[k * n + i] * y[k]).sum();
            y[i] = (y[i] - s) / self.r[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.r[i * n + k] * y[k]).sum();
            y[i] = (y[i] - s) / self.r[i * n + i];
        }
        y
    }
}

/// Orthonormalises the equality rows, dropping dependent ones.
fn reduce_equalities(a: &[Vec<f64>], b: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut qa: Vec<Vec<f64>> = Vec::new();
    let mut qb: Vec<f64> = Vec::new();
    for (row, &rhs) in a.iter().zip(b) {
        let norm0 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut r = row.clone();
        let mut rb = rhs;
        for _ in 0..2 {
            for (q, &qbv) in qa.iter().zip(&qb) {
                let p: f64 = q.iter().zip(&r).map(|(x, y)| x * y).sum();
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= p * qi;
                }
                rb -= p * qbv;
            }
        }
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-10 * norm0.max(1.0) {
            if rb.abs() > 1e-8 * (1.0 + rhs.abs()) {
                return Err(Error::Solver("inconsistent equality constraints".into()));
            }
            continue;
        }
        qa.push(r.iter().map(|v| v / norm).collect());
        qb.push(rb / norm);
    }
    Ok((qa, qb))
}

struct Spectral {
    inv: CMat,
    inv_sqrt: CMat,
    sqrt: CMat,
    min: f64,
}

fn spectral(m: &CMat) -> Result<Spectral> {
    let e = eig_hermitian(m)?;
    let min = e.values.first().copied().unwrap_or(0.0);
    if min <= 0.0 {
        return Ok(Spectral {
            inv: CMat::zeros(0, 0),
            inv_sqrt: CMat::zeros(0, 0),
            sqrt: CMat::zeros(0, 0),
            min,
        });
    }
    Ok(Spectral {
        inv: e.reconstruct_with(|v| 1.0 / v),
        inv_sqrt: e.reconstruct_with(|v| 1.0 / v.sqrt()),
        sqrt: e.reconstruct_with(f64::sqrt),
        min,
    })
}

/// Largest `α` with `M + α·D ⪰ 0`, given `M^{-1/2}`.
fn max_step(inv_sqrt: &CMat, d: &CMat) -> Result<f64> {
    let w = (&(inv_sqrt * d) * inv_sqrt).hermitize();
    let lo = crate::qmat::psd_min_eig(&w)?;
    Ok(if lo >= 0.0 { f64::INFINITY } else { -1.0 / lo })
}

fn sym(m: &CMat) -> CMat {
    m.hermitize()
}

fn re_tr(a: &CMat, b: &CMat) -> f64 {
    a.trace_product(b).re
}

/// Solves the problem; the status must be inspected before trusting the answer.
pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    p.validate()?;
    let sol = solve_inner(p, opts)?;
    if let Some(a) = &opts.audit {
        a.record(&sol);
    }
    Ok(sol)
}

fn solve_inner(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let n = p.n_vars();
    let (qa, qb) = reduce_equalities(&p.eq_a, &p.eq_b)?;
    // particular solution: x0 projected onto {Ax = b} along the row space
    let mut xp = p.x0.clone();
    for (q, &bq) in qa.iter().zip(&qb) {
        let r = bq - q.iter().zip(&xp).map(|(a, b)| a * b).sum::<f64>();
        for (xi, qi) in xp.iter_mut().zip(q) {
            *xi += r * qi;
        }
    }
    let null = null_space(&qa, n);
    let reduced = Reduced::new(p, &xp, &null);
    let core = interior_point(&reduced, opts)?;

    let mut x = xp.clone();
    for (w, col) in core.w.iter().zip(&null) {
        for (xi, ci) in x.iter_mut().zip(col) {
            *xi += w * ci;
        }
    }
    let s = p.lmi_value(&x);
    let mut min_lmi_eig = f64::INFINITY;
    for blk in &s {
        min_lmi_eig = min_lmi_eig.min(crate::qmat::psd_min_eig(blk)?);
    }
    let eq_residual = p
        .eq_a
        .iter()
        .zip(&p.eq_b)
        .map(|(row, bi)| (bi - row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()).abs())
        .fold(0.0, f64::max);
    let primal_value: f64 = p.c.iter().zip(&x).map(|(a, b)| a * b).sum();
    // constant objective offset cᵀx_p enters the reduced dual value
    let offset: f64 = p.c.iter().zip(&xp).map(|(a, b)| a * b).sum();
    let dual_value = offset + core.dual_value;
    let gap = (primal_value - dual_value).abs();
    let status = if gap <= 1e-7 && eq_residual <= 1e-8 && core.dual_residual <= 1e-7 && min_lmi_eig >= -1e-8 {
        SdpStatus::Optimal
    } else if eq_residual > 1e-6 {
        SdpStatus::Infeasible
    } else {
        SdpStatus::MaxIter
    };
    // multipliers of the original equalities from the dual residual in the row space
    let fz: Vec<f64> = (0..n)
        .map(|i| p.blocks.iter().zip(&core.z).map(|(b, zb)| re_tr(&b.coeffs[i], zb)).sum())
        .collect();
    let resid: Vec<f64> = p.c.iter().zip(&fz).map(|(a, b)| a - b).collect();
    let y = least_squares_rows(&p.eq_a, &resid);
    Ok(SdpSolution {
        x,
        z: core.z,
        y,
        primal_value,
        dual_value,
        gap,
        status,
        iterations: core.iterations,
        min_lmi_eig,
        eq_residual,
        dual_residual: core.dual_residual,
    })
}

/// Orthonormal basis of the complement of the (orthonormal) rows `q`.
fn null_space(q: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = q.to_vec();
    let mut out = Vec::with_capacity(n - q.len());
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let p: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
            basis.push(v.clone());
            out.push(v);
        }
    }
    out
}

/// Least-squares `y` minimising `‖Aᵀy − r‖` (normal equations, tiny systems only).
fn least_squares_rows(a: &[Vec<f64>], r: &[f64]) -> Vec<f64> {
    let k = a.len();
    if k == 0 {
        return Vec::new();
    }
    let mut g = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        rhs[i] = a[i].iter().zip(r).map(|(x, y)| x * y).sum();
        for j in 0..k {
            g[i * k + j] = a[i].iter().zip(&a[j]).map(|(x, y)| x * y).sum();
        }
        g[i * k + i] += 1e-12;
    }
    Cholesky::new(&g, k).map(|c| c.solve(&rhs)).unwrap_or_else(|_| vec![0.0; k])
}

/// Equality-free problem in the coordinates `x = x_p + N w`.
struct Reduced {
    c: Vec<f64>,
    f0: Vec<CMat>,
    coeffs: Vec<Vec<CMat>>,
}

impl Reduced {
    fn new(p: &SdpProblem, xp: &[f64], null: &[Vec<f64>]) -> Self {
        let c = null
            .iter()
            .map(|col| col.iter().zip(&p.c).map(|(a, b)| a * b).sum())
            .collect();
        let f0 = p.lmi_value(xp);
        let coeffs = p
            .blocks
            .iter()
            .map(|blk| {
                null.iter()
                    .map(|col| {
                        let mut m = CMat::zeros(blk.f0.rows(), blk.f0.cols());
                        for (ci, fi) in col.iter().zip(&blk.coeffs) {
                            if ci.abs() > 1e-15 {
                                m += &fi.scale(*ci);
                            }
                        }
                        m.hermitize()
                    })
                    .collect()
            })
            .collect();
        Self { c, f0, coeffs }
    }

    fn lmi(&self, w: &[f64]) -> Vec<CMat> {
        self.f0
            .iter()
            .zip(&self.coeffs)
            .map(|(f0, fs)| {
                let mut s = f0.clone();
                for (wi, fi) in w.iter().zip(fs) {
                    if *wi != 0.0 {
                        s += &fi.scale(*wi);
                    }
                }
                s.hermitize()
            })
            .collect()
    }

    fn adjoint(&self, z: &[CMat]) -> Vec<f64> {
        (0..self.c.len())
            .map(|i| self.coeffs.iter().zip(z).map(|(fs, zb)| re_tr(&fs[i], zb)).sum())
            .collect()
    }

    fn combine(&self, block: usize, w: &[f64]) -> CMat {
        let f0 = &self.f0[block];
        let mut m = CMat::zeros(f0.rows(), f0.cols());
        for (wi, fi) in w.iter().zip(&self.coeffs[block]) {
            if *wi != 0.0 {
                m += &fi.scale(*wi);
            }
        }
        m.hermitize()
    }
}

struct CoreResult {
    w: Vec<f64>,
    z: Vec<CMat>,
    dual_value: f64,
    dual_residual: f64,
    iterations: usize,
}

fn interior_point(r: &Reduced, opts: &SdpOptions) -> Result<CoreResult> {
    let n = r.c.len();
    let nb = r.f0.len();
    let m_tot: usize = r.f0.iter().map(|f| f.rows()).sum();
    let mut w = vec![0.0; n];
    let mut s = r.lmi(&w);
    for blk in &s {
        if crate::qmat::psd_min_eig(blk)? <= 0.0 {
            return Err(Error::Solver("starting point is not strictly feasible".into()));
        }
    }
    let mut z: Vec<CMat> = s.iter().map(|b| CMat::identity(b.rows())).collect();
    let cnorm = 1.0 + r.c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let objectives = |w: &[f64], z: &[CMat]| -> (f64, f64) {
        let pobj: f64 = r.c.iter().zip(w).map(|(a, b)| a * b).sum();
        let dobj: f64 = -r.f0.iter().zip(z).map(|(f, zb)| re_tr(f, zb)).sum::<f64>();
        (pobj, dobj)
    };
    let dual_res = |z: &[CMat]| -> Vec<f64> { r.c.iter().zip(r.adjoint(z)).map(|(a, b)| a - b).collect() };
    let coeff_gram = {
        let rows: usize = r.f0.iter().map(|f| 2 * f.rows() * f.cols()).sum();
        let mut bmat = vec![0.0; rows * n];
        let mut offset = 0;
        for bi in 0..nb {
            for (j, f) in r.coeffs[bi].iter().enumerate() {
                for (k, c) in f.data().iter().enumerate() {
                    bmat[(offset + 2 * k) * n + j] = c.re;
                    bmat[(offset + 2 * k + 1) * n + j] = c.im;
                }
            }
            offset += 2 * r.f0[bi].rows() * r.f0[bi].cols();
        }
        GramFactor::new(bmat, rows, n)
    };

    let mut iterations = 0;
    let mut stall = 0;
    let mut best = f64::INFINITY;
    let mut best_state = (w.clone(), z.clone());
    loop {
        let (pobj, dobj) = objectives(&w, &z);
        let rd = dual_res(&z);
        let gap = (pobj - dobj).abs();
        let merit = gap.max(inf_norm(&rd));
        if merit < best {
            best = merit;
            best_state = (w.clone(), z.clone());
        }
        let converged = gap <= opts.gap_tol * pobj.abs().max(1.0) && inf_norm(&rd) <= opts.feas_tol * cnorm;
        if converged || iterations >= opts.max_iter || stall >= 5 {
            break;
        }
        iterations += 1;

        let specs: Vec<Spectral> = s.iter().map(spectral).collect::<Result<_>>()?;
        let zspecs: Vec<Spectral> = z.iter().map(spectral).collect::<Result<_>>()?;
        if specs.iter().chain(&zspecs).any(|sp| sp.min <= 0.0) {
            break;
        }
        let mu: f64 = s.iter().zip(&z).map(|(a, b)| re_tr(a, b)).sum::<f64>() / m_tot as f64;

        // M_ij = Re Tr(F_i S⁻¹ F_j Z) = Re⟨G_i, G_j⟩ with G_j = S^{-1/2} F_j Z^{1/2};
        // factoring the stacked G_j by QR avoids squaring the condition number
        let rows: usize = r.f0.iter().map(|f| 2 * f.rows() * f.cols()).sum();
        let mut bmat = vec![0.0; rows * n];
        let mut offset = 0;
        for bi in 0..nb {
            let (sis, zs) = (&specs[bi].inv_sqrt, &zspecs[bi].sqrt);
            for (j, f) in r.coeffs[bi].iter().enumerate() {
                let g = &(sis * f) * zs;
                for (k, c) in g.data().iter().enumerate() {
                    bmat[(offset + 2 * k) * n + j] = c.re;
                    bmat[(offset + 2 * k + 1) * n + j] = c.im;
                }
            }
            offset += 2 * r.f0[bi].rows() * r.f0[bi].cols();
        }
        let Some(chol) = GramFactor::new(bmat, rows, n) else {
            break;
        };

        // M Δw = F*(T) − r_d, ΔS = F(Δw), ΔZ = T − sym(S⁻¹ ΔS Z)
        let newton = |t: &[CMat]| -> (Vec<f64>, Vec<CMat>, Vec<CMat>) {
            let ft = r.adjoint(t);
            let rhs: Vec<f64> = ft.iter().zip(&rd).map(|(a, b)| a - b).collect();
            let mut dw = chol.solve(&rhs);
            let build = |dw: &[f64]| -> (Vec<CMat>, Vec<CMat>) {
                let mut ds = Vec::with_capacity(nb);
                let mut dz = Vec::with_capacity(nb);
                for bi in 0..nb {
                    let d = r.combine(bi, dw);
                    let h = sym(&(&(&specs[bi].inv * &d) * &z[bi]));
                    dz.push((&t[bi] - &h).hermitize());
                    ds.push(d);
                }
                (ds, dz)
            };
            let (mut ds, mut dz) = build(&dw);
            // iterative refinement against the exact dual-feasibility equation F*(ΔZ) = r_d
            for _ in 0..3 {
                let fz = r.adjoint(&dz);
                let err: Vec<f64> = fz.iter().zip(&rd).map(|(a, b)| a - b).collect();
                if inf_norm(&err) <= 1e-15 * cnorm {
                    break;
                }
                let corr = chol.solve(&err);
                for (a, b) in dw.iter_mut().zip(&corr) {
                    *a += b;
                }
                (ds, dz) = build(&dw);
            }
            (dw, ds, dz)
        };
        let steps = |ds: &[CMat], dz: &[CMat]| -> Result<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for bi in 0..nb {
                ap = ap.min(max_step(&specs[bi].inv_sqrt, &ds[bi])?);
                ad = ad.min(max_step(&zspecs[bi].inv_sqrt, &dz[bi])?);
            }
            Ok((ap, ad))
        };

        let t_aff: Vec<CMat> = z.iter().map(|zb| -zb).collect();
        let (_, ds_a, dz_a) = newton(&t_aff);
        let (ap, ad) = steps(&ds_a, &dz_a)?;
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mu_aff: f64 = (0..nb)
            .map(|bi| re_tr(&(&s[bi] + &ds_a[bi].scale(ap)), &(&z[bi] + &dz_a[bi].scale(ad))))
            .sum::<f64>()
            / m_tot as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let t: Vec<CMat> = (0..nb)
            .map(|bi| {
                let sinv = &specs[bi].inv;
                let cross = sym(&(&(sinv * &ds_a[bi]) * &dz_a[bi]));
                &(&sinv.scale(sigma * mu) - &z[bi]) - &cross
            })
            .collect();
        let (dw, ds, dz) = newton(&t);
        let finite = dw.iter().all(|v| v.is_finite()) && dz.iter().all(|m| m.data().iter().all(|c| c.is_finite()));
        if !finite {
            break;
        }
        let (ap, ad) = steps(&ds, &dz)?;
        let frac = if mu < 1e-6 { 0.98 } else { 0.95 };
        let ap = (frac * ap).min(1.0);
        let ad = (frac * ad).min(1.0);

        let w_new: Vec<f64> = w.iter().zip(&dw).map(|(a, b)| a + ap * b).collect();
        let s_new = r.lmi(&w_new);
        let mut interior = true;
        for blk in &s_new {
            if crate::qmat::psd_min_eig(blk)? <= 0.0 {
                interior = false;
            }
        }
        if !interior {
            break;
        }
        w = w_new;
        s = s_new;
        for (zb, dzb) in z.iter_mut().zip(&dz) {
            *zb = (&*zb + &dzb.scale(ad)).hermitize();
        }
        // restore dual feasibility exactly by the least-norm correction Σ δ_i F_i
        if let Some(gram) = &coeff_gram {
            let delta = gram.solve(&dual_res(&z));
            let fixed: Vec<CMat> = (0..nb).map(|bi| (&z[bi] + &r.combine(bi, &delta)).hermitize()).collect();
            let mut ok = true;
            for zb in &fixed {
                if crate::qmat::psd_min_eig(zb)? <= 0.0 {
                    ok = false;
                }
            }
            if ok {
                z = fixed;
            }
        }
        let (pn, dn) = objectives(&w, &z);
        let merit = (pn - dn).abs().max(inf_norm(&dual_res(&z)));
        if merit < 0.7 * best {
            stall = 0;
        } else {
            stall += 1;
        }
    }
    let (w, z) = best_state;
    let (_, dobj) = objectives(&w, &z);
    let dual_residual = inf_norm(&dual_res(&z));
    Ok(CoreResult {
        w,
        z,
        dual_value: dobj,
        dual_residual,
        iterations,
    })
}

/// Basis of Hermitian `d × d` matrices matching the real parametrisation.
pub fn herm_basis(d: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        out.push(CMat::unit(d, d, k, k));
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut re = CMat::zeros(d, d);
            re[(k, l)] = creal(1.0);
            re[(l, k)] = creal(1.0);
            out.push(re);
            let mut im = CMat::zeros(d, d);
            im[(k, l)] = cplx(0.0, 1.0);
            im[(l, k)] = cplx(0.0, -1.0);
            out.push(im);
        }
    }
    out
}

/// Hermitian matrix from its `d²` real parameters.
pub fn herm_from_params(x: &[f64], d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for k in 0..d {
        m[(k, k)] = creal(x[k]);
    }
    let mut idx = d;
    for k in 0..d {
        for l in k + 1..d {
            let z = cplx(x[idx], x[idx + 1]);
            m[(k, l)] = z;
            m[(l, k)] = z.conj();
            idx += 2;
        }
    }
    m
}

/// Real parameters of a Hermitian matrix (inverse of [`herm_from_params`]).
pub fn herm_to_params(m: &CMat) -> Vec<f64> {
    let d = m.rows();
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        out.push(m[(k, k)].re);
    }
    for k in 0..d {
        for l in k + 1..d {
            out.push(m[(k, l)].re);
            out.push(m[(k, l)].im);
        }
    }
    out
}

/// Signalling robustness program: minimise `Tr X` subject to `1 ⊗ X ⪰ J_Λ`.
pub fn build_rs(ch: &QuantumChannel<f64>) -> Result<SdpProblem> {
    let (di, dout) = (ch.d_in(), ch.d_out());
    let j = ch.choi();
    let basis = herm_basis(dout);
    let id = CMat::identity(di);
    let coeffs: Vec<CMat> = basis.iter().map(|e| kron(&id, e)).collect();
    let mut c = vec![0.0; dout * dout];
    c[..dout].fill(1.0);
    let tau = op_norm(j)? + 1.0;
    let x0 = herm_to_params(&CMat::identity(dout).scale(tau));
    Ok(SdpProblem {
        c,
        blocks: vec![LmiBlock { f0: -j, coeffs }],
        eq_a: Vec::new(),
        eq_b: Vec::new(),
        x0,
    })
}

/// Channel athermality program in Choi form: minimise `λ` subject to `J ⪰ J_Λ`,
/// `Tr_out J = λ·1` and `Tr_in[(γ_in⊗1)J] = λ·γ_out`, with `λ = Tr J / d_in` eliminated.
pub fn build_rt_channel(
    ch: &QuantumChannel<f64>,
    gamma_in: &ThermalState<f64>,
    gamma_out: &ThermalState<f64>,
) -> Result<SdpProblem> {
    let (di, dout) = (ch.d_in(), ch.d_out());
    if gamma_in.dim() != di || gamma_out.dim() != dout {
        return Err(Error::Dimension("thermal states do not match the channel".into()));
    }
    let big = di * dout;
    let basis = herm_basis(big);
    let nv = basis.len();
    let inv_di = 1.0 / di as f64;
    let mut c = vec![0.0; nv];
    c[..big].fill(inv_di);
    let gi_lift = kron(&gamma_in.matrix(), &CMat::identity(dout));
    let g_out = gamma_out.matrix();
    let dims = [di, dout];
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(nv);
    for e in &basis {
        let lam = e.tr() * inv_di;
        let l1 = &partial_trace(e, &dims, &[0])? - &CMat::identity(di).scale(lam);
        let l2 = &partial_trace(&(&gi_lift * e), &dims, &[1])? - &g_out.scale(lam);
        let mut col = herm_to_params(&l1.hermitize());
        col.extend(herm_to_params(&l2.hermitize()));
        cols.push(col);
    }
    let rows = di * di + dout * dout;
    let eq_a: Vec<Vec<f64>> = (0..rows).map(|r| cols.iter().map(|col| col[r]).collect()).collect();
    let eq_b = vec![0.0; rows];
    let lam0 = op_norm(ch.choi())? / gamma_out.g_min() + 1.0;
    let start = kron(&CMat::identity(di), &g_out).scale(lam0);
    Ok(SdpProblem {
        c,
        blocks: vec![LmiBlock {
            f0: -ch.choi(),
            coeffs: basis,
        }],
        eq_a,
        eq_b,
        x0: herm_to_params(&start),
    })
}

/// Whether `min{f | X ⪯ fY} = 1`: `Y − X` is PSD with a zero eigenvalue, both within `1e-9`.
pub fn check_tight(x_op: &CMat, y_op: &CMat) -> Result<bool> {
    let lo = crate::qmat::psd_min_eig(&(y_op - x_op).hermitize())?;
    Ok(lo.abs() <= 1e-9)
}
