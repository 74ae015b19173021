//! Quantum channels in Kraus and Choi form, canonical constructors and samplers.
//!
//! Choi convention: `J = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`, input factor first, `Tr J = d_in`.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qmat::{
    cplx, creal, eig_hermitian, herm_pow, kron, partial_trace, permute_subsystems, trace_norm, CMatrix,
};
use crate::scalar::Real;
use crate::thermo::ThermalState;

/// CPTP map with a Choi matrix and, when known, a Kraus decomposition.
#[derive(Clone, Debug)]
pub struct QuantumChannel<T> {
    d_in: usize,
    d_out: usize,
    kraus: Option<Vec<CMatrix<T>>>,
    choi: CMatrix<T>,
}

fn cptp_tol<T: Real>() -> T {
    T::tol(1e-9)
}

impl<T: Real> QuantumChannel<T> {
    /// Builds a channel from Kraus operators, checking `Σ K†K = 1`.
    pub fn from_kraus(kraus: Vec<CMatrix<T>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::Representation("empty Kraus list".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(Error::Dimension("Kraus operators of mixed shapes".into()));
        }
        let mut sum = CMatrix::zeros(d_in, d_in);
        for k in &kraus {
            sum += &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&CMatrix::identity(d_in));
        if dev > cptp_tol() {
            return Err(Error::Representation(format!(
                "Kraus operators are not trace preserving (deviation {:.3e})",
                dev.as_f64()
            )));
        }
        let choi = kraus_to_choi(&kraus, d_in, d_out);
        Ok(Self {
            d_in,
            d_out,
            kraus: Some(kraus),
            choi,
        })
    }

    /// Builds a channel from its Choi matrix, checking Hermiticity, positivity and `Tr_out J = 1`.
    pub fn from_choi(d_in: usize, d_out: usize, choi: CMatrix<T>) -> Result<Self> {
        if choi.rows() != d_in * d_out || !choi.is_square() {
            return Err(Error::Dimension(format!(
                "Choi matrix is {}x{}, expected {n}x{n}",
                choi.rows(),
                choi.cols(),
                n = d_in * d_out
            )));
        }
        choi.check_hermitian()?;
        let choi = choi.hermitize();
        let lo = crate::qmat::psd_min_eig(&choi)?;
        let scale = T::one() + crate::qmat::op_norm(&choi)?;
        if lo < -cptp_tol::<T>() * scale {
            return Err(Error::Representation(format!(
                "Choi matrix has negative eigenvalue {:.3e}",
                lo.as_f64()
            )));
        }
        let marg = partial_trace(&choi, &[d_in, d_out], &[0])?;
        let dev = marg.max_abs_diff(&CMatrix::identity(d_in));
        if dev > cptp_tol() {
            return Err(Error::Representation(format!(
                "Choi matrix is not trace preserving (deviation {:.3e})",
                dev.as_f64()
            )));
        }
        Ok(Self {
            d_in,
            d_out,
            kraus: None,
            choi,
        })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn choi(&self) -> &CMatrix<T> {
        &self.choi
    }

    /// Stored Kraus list, if the channel was built from one.
    pub fn kraus(&self) -> Option<&[CMatrix<T>]> {
        self.kraus.as_deref()
    }

    /// Stored Kraus list, or one extracted from the Choi matrix.
    pub fn kraus_ops(&self) -> Result<Vec<CMatrix<T>>> {
        match &self.kraus {
            Some(k) => Ok(k.clone()),
            None => choi_to_kraus(&self.choi, self.d_in, self.d_out),
        }
    }

    /// `Λ(ρ) = Σ_ij ρ_ij Λ(|i⟩⟨j|)`.
    pub fn apply(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>> {
        if rho.rows() != self.d_in || rho.cols() != self.d_in {
            return Err(Error::Dimension(format!(
                "input is {}x{}, channel expects dimension {}",
                rho.rows(),
                rho.cols(),
                self.d_in
            )));
        }
        Ok(apply_choi(&self.choi, self.d_in, self.d_out, rho))
    }

    /// Largest deviation between the Choi matrices of two channels.
    pub fn choi_distance(&self, other: &Self) -> T {
        if (self.d_in, self.d_out) != (other.d_in, other.d_out) {
            return T::infinity();
        }
        self.choi.frobenius_distance(&other.choi)
    }

    pub fn cast<U: Real>(&self) -> QuantumChannel<U> {
        QuantumChannel {
            d_in: self.d_in,
            d_out: self.d_out,
            kraus: self.kraus.as_ref().map(|ks| ks.iter().map(CMatrix::cast).collect()),
            choi: self.choi.cast(),
        }
    }
}

fn apply_choi<T: Real>(choi: &CMatrix<T>, d_in: usize, d_out: usize, rho: &CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(d_out, d_out);
    for i in 0..d_in {
        for j in 0..d_in {
            let w = rho[(i, j)];
            if w.re == T::zero() && w.im == T::zero() {
                continue;
            }
            for a in 0..d_out {
                for b in 0..d_out {
                    out[(a, b)] = out[(a, b)] + w * choi[(i * d_out + a, j * d_out + b)];
                }
            }
        }
    }
    out
}

/// Choi matrix of a Kraus list: `J = Σ_k |K_k⟩⟩⟨⟨K_k|` with `|K⟩⟩[i·d_out+o] = K[o][i]`.
pub fn kraus_to_choi<T: Real>(kraus: &[CMatrix<T>], d_in: usize, d_out: usize) -> CMatrix<T> {
    let n = d_in * d_out;
    let mut choi = CMatrix::zeros(n, n);
    let mut v = vec![creal(T::zero()); n];
    for k in kraus {
        for i in 0..d_in {
            for o in 0..d_out {
                v[i * d_out + o] = k[(o, i)];
            }
        }
        choi += &CMatrix::outer(&v, &v);
    }
    choi
}

/// Kraus operators from the spectral decomposition of a Choi matrix (eigenvalues above `1e-10`).
pub fn choi_to_kraus<T: Real>(choi: &CMatrix<T>, d_in: usize, d_out: usize) -> Result<Vec<CMatrix<T>>> {
    let eig = eig_hermitian(choi)?;
    let floor = T::tol(1e-10);
    if let Some(&lo) = eig.values.first() {
        if lo < -cptp_tol::<T>() * (T::one() + eig.values.last().copied().unwrap_or(T::zero()).abs()) {
            return Err(Error::Representation(format!(
                "Choi matrix has negative eigenvalue {:.3e}",
                lo.as_f64()
            )));
        }
    }
    let mut out = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate().rev() {
        if lam <= floor {
            continue;
        }
        let s = lam.sqrt();
        out.push(CMatrix::from_fn(d_out, d_in, |o, i| eig.vectors[(i * d_out + o, k)] * s));
    }
    Ok(out)
}

/// Applies `I_A ⊗ Λ` to an operator on `A ⊗ A'` with `dim A = d_a`.
pub fn apply_on_second<T: Real>(ch: &QuantumChannel<T>, tau: &CMatrix<T>, d_a: usize) -> Result<CMatrix<T>> {
    let d = ch.d_in;
    if tau.rows() != d_a * d || !tau.is_square() {
        return Err(Error::Dimension("operator does not factor as A ⊗ input".into()));
    }
    let e = ch.d_out;
    let mut out = CMatrix::zeros(d_a * e, d_a * e);
    for a in 0..d_a {
        for b in 0..d_a {
            let block = CMatrix::from_fn(d, d, |i, j| tau[(a * d + i, b * d + j)]);
            let img = apply_choi(&ch.choi, d, e, &block);
            for x in 0..e {
                for y in 0..e {
                    out[(a * e + x, b * e + y)] = img[(x, y)];
                }
            }
        }
    }
    Ok(out)
}

/// `ch2 ∘ ch1`.
pub fn compose<T: Real>(ch2: &QuantumChannel<T>, ch1: &QuantumChannel<T>) -> Result<QuantumChannel<T>> {
    if ch1.d_out != ch2.d_in {
        return Err(Error::Dimension(format!(
            "cannot compose: inner output {} vs outer input {}",
            ch1.d_out, ch2.d_in
        )));
    }
    let (d_in, mid, d_out) = (ch1.d_in, ch1.d_out, ch2.d_out);
    if let (Some(k1), Some(k2)) = (&ch1.kraus, &ch2.kraus) {
        let ks: Vec<_> = k2.iter().flat_map(|b| k1.iter().map(move |a| b * a)).collect();
        let choi = kraus_to_choi(&ks, d_in, d_out);
        return Ok(QuantumChannel {
            d_in,
            d_out,
            kraus: Some(ks),
            choi,
        });
    }
    // link product: block (i,j) of the result is Λ2 applied to block (i,j) of J1
    let mut choi = CMatrix::zeros(d_in * d_out, d_in * d_out);
    for i in 0..d_in {
        for j in 0..d_in {
            let block = CMatrix::from_fn(mid, mid, |a, b| ch1.choi[(i * mid + a, j * mid + b)]);
            let img = apply_choi(&ch2.choi, mid, d_out, &block);
            for a in 0..d_out {
                for b in 0..d_out {
                    choi[(i * d_out + a, j * d_out + b)] = img[(a, b)];
                }
            }
        }
    }
    Ok(QuantumChannel {
        d_in,
        d_out,
        kraus: None,
        choi,
    })
}

/// `ch1 ⊗ ch2` acting on `A1 ⊗ A2 → B1 ⊗ B2`.
pub fn tensor<T: Real>(ch1: &QuantumChannel<T>, ch2: &QuantumChannel<T>) -> QuantumChannel<T> {
    let d_in = ch1.d_in * ch2.d_in;
    let d_out = ch1.d_out * ch2.d_out;
    let raw = kron(&ch1.choi, &ch2.choi);
    let choi = permute_subsystems(&raw, &[ch1.d_in, ch1.d_out, ch2.d_in, ch2.d_out], &[0, 2, 1, 3])
        .expect("dimensions factor by construction");
    let kraus = match (&ch1.kraus, &ch2.kraus) {
        (Some(a), Some(b)) => Some(a.iter().flat_map(|x| b.iter().map(move |y| kron(x, y))).collect()),
        _ => None,
    };
    QuantumChannel {
        d_in,
        d_out,
        kraus,
        choi,
    }
}

/// Identity channel on dimension `d`.
pub fn make_identity<T: Real>(d: usize) -> QuantumChannel<T> {
    QuantumChannel::from_kraus(vec![CMatrix::identity(d)]).expect("identity is CPTP")
}

/// Unitary channel `ρ ↦ UρU†`.
pub fn make_unitary<T: Real>(u: &CMatrix<T>) -> Result<QuantumChannel<T>> {
    QuantumChannel::from_kraus(vec![u.clone()])
}

/// Completely thermalising channel `Γ(ρ) = Tr(ρ) γ` from dimension `d_in`.
pub fn make_gamma<T: Real>(gamma_out: &ThermalState<T>, d_in: usize) -> QuantumChannel<T> {
    let d_out = gamma_out.dim();
    let mut kraus = Vec::with_capacity(d_in * d_out);
    for i in 0..d_in {
        for (j, g) in gamma_out.populations().iter().enumerate() {
            kraus.push(CMatrix::unit(d_out, d_in, j, i).scale(g.sqrt()));
        }
    }
    QuantumChannel::from_kraus(kraus).expect("thermalising channel is CPTP")
}

/// Trace-and-replace channel `Φ_σ(ρ) = Tr(ρ) σ` from dimension `d_in`.
pub fn make_replace<T: Real>(sigma: &CMatrix<T>, d_in: usize) -> Result<QuantumChannel<T>> {
    check_density(sigma)?;
    let eig = eig_hermitian(sigma)?;
    let d_out = sigma.rows();
    let mut kraus = Vec::new();
    for (k, &p) in eig.values.iter().enumerate() {
        if p <= T::tol(1e-14) {
            continue;
        }
        let v = eig.vector(k);
        for i in 0..d_in {
            let mut e = vec![creal(T::zero()); d_in];
            e[i] = creal(p.sqrt());
            kraus.push(CMatrix::outer(&v, &e));
        }
    }
    let mut ch = QuantumChannel::from_kraus(kraus)?;
    // the exact Choi 1⊗σ avoids eigenvector round-off
    ch.choi = kron(&CMatrix::identity(d_in), &sigma.hermitize());
    debug_assert_eq!(ch.d_out, d_out);
    Ok(ch)
}

/// Signalling GPO `G = sΓ + (1−s)I` with Kraus list `√(s g_j)|j⟩⟨i|` followed by `√(1−s)·1`.
///
/// Zero-weight operators are dropped, so `s = 1` yields `d²` operators and `s = 0` a single one.
pub fn make_signalling_gpo<T: Real>(gibbs: &ThermalState<T>, s: T) -> Result<QuantumChannel<T>> {
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::OutOfRange(format!("thermalising strength {s} outside [0, 1]")));
    }
    let d = gibbs.dim();
    let mut kraus = Vec::with_capacity(d * d + 1);
    if s > T::zero() {
        for i in 0..d {
            for (j, g) in gibbs.populations().iter().enumerate() {
                kraus.push(CMatrix::unit(d, d, j, i).scale((s * *g).sqrt()));
            }
        }
    }
    if s < T::one() {
        kraus.push(CMatrix::identity(d).scale((T::one() - s).sqrt()));
    }
    QuantumChannel::from_kraus(kraus)
}

/// Measure-and-prepare channel `Λ(ρ) = Σ_i ⟨i|ρ|i⟩ σ_i` in the computational basis.
pub fn make_measure_prepare<T: Real>(states: &[CMatrix<T>]) -> Result<QuantumChannel<T>> {
    let d_in = states.len();
    let first = states
        .first()
        .ok_or_else(|| Error::Representation("no prepared states".into()))?;
    let d_out = first.rows();
    let mut kraus = Vec::new();
    for (i, sigma) in states.iter().enumerate() {
        check_density(sigma)?;
        if sigma.rows() != d_out {
            return Err(Error::Dimension("prepared states of mixed dimension".into()));
        }
        let eig = eig_hermitian(sigma)?;
        for (k, &p) in eig.values.iter().enumerate() {
            if p <= T::tol(1e-14) {
                continue;
            }
            let mut e = vec![creal(T::zero()); d_in];
            e[i] = creal(p.sqrt());
            kraus.push(CMatrix::outer(&eig.vector(k), &e));
        }
    }
    QuantumChannel::from_kraus(kraus)
}

/// Gibbs-preservation verdict and residual `‖Λ(γ_in) − γ_out‖₁`.
pub fn is_gibbs_preserving<T: Real>(
    ch: &QuantumChannel<T>,
    gamma_in: &ThermalState<T>,
    gamma_out: &ThermalState<T>,
) -> Result<(bool, T)> {
    if ch.d_in != gamma_in.dim() || ch.d_out != gamma_out.dim() {
        return Err(Error::Dimension("thermal states do not match the channel".into()));
    }
    let out = ch.apply(&gamma_in.matrix())?;
    let residual = trace_norm(&(&out - &gamma_out.matrix()));
    Ok((residual <= T::tol(1e-9), residual))
}

/// Errors unless `rho` is Hermitian, positive semidefinite and of unit trace.
pub fn check_density<T: Real>(rho: &CMatrix<T>) -> Result<()> {
    rho.check_hermitian()?;
    let tr = rho.trace();
    if (tr.re - T::one()).abs() > T::tol(1e-9) || tr.im.abs() > T::tol(1e-9) {
        return Err(Error::InvalidState(format!("trace {} differs from 1", tr.re)));
    }
    if !crate::qmat::is_psd(rho)? {
        return Err(Error::InvalidState("state is not positive semidefinite".into()));
    }
    Ok(())
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    cplx(T::lit(re), T::lit(im))
}

/// Ginibre matrix with standard complex normal entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary from Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    loop {
        let g = ginibre::<T, R>(d, d, rng);
        let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(d);
        let mut ok = true;
        for c in 0..d {
            let mut v = g.column_vec(c);
            // two passes of modified Gram-Schmidt for orthogonality at machine precision
            for _ in 0..2 {
                for q in &cols {
                    let proj = q.iter().zip(&v).fold(creal(T::zero()), |acc, (a, b)| acc + a.conj() * *b);
                    for (x, y) in v.iter_mut().zip(q) {
                        *x = *x - *y * proj;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm <= T::tol(1e-8) {
                ok = false;
                break;
            }
            for x in &mut v {
                *x = *x / norm;
            }
            cols.push(v);
        }
        if ok {
            return CMatrix::from_fn(d, d, |r, c| cols[c][r]);
        }
    }
}

/// Hilbert–Schmidt random density matrix `GG†/Tr(GG†)`.
pub fn random_density<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    let g = ginibre::<T, R>(d, d, rng);
    let w = &g * &g.adjoint();
    let tr = w.tr();
    w.scale(T::one() / tr).hermitize()
}

/// Haar-random state vector.
pub fn random_pure_vector<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex<T>> {
    let mut v: Vec<Complex<T>> = (0..d).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    for x in &mut v {
        *x = *x / norm;
    }
    v
}

/// Haar-random pure state as a density matrix.
pub fn random_pure<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    let v = random_pure_vector(d, rng);
    CMatrix::outer(&v, &v)
}

/// Channel drawn from the flat measure: normalised Wishart Choi matrix of full environment rank.
pub fn random_channel_flat<T: Real, R: Rng + ?Sized>(d_in: usize, d_out: usize, rng: &mut R) -> QuantumChannel<T> {
    let n = d_in * d_out;
    loop {
        let w = ginibre::<T, R>(n, n, rng);
        let rho = (&w * &w.adjoint()).hermitize();
        let y = partial_trace(&rho, &[d_in, d_out], &[0]).expect("dimensions factor");
        let Ok(y_inv) = herm_pow(&y, T::lit(-0.5)) else {
            continue;
        };
        let lift = kron(&y_inv, &CMatrix::identity(d_out));
        let choi = (&(&lift * &rho) * &lift).hermitize();
        return QuantumChannel {
            d_in,
            d_out,
            kraus: None,
            choi,
        };
    }
}

fn project_psd<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    eig_hermitian(m)
        .expect("iterates stay Hermitian")
        .reconstruct_with(|x| x.max(T::zero()))
}

/// Frobenius projection onto `{Tr_out J = 1, Tr_in[(γ_in⊗1)J] = γ_out}`.
fn project_affine<T: Real>(j: &CMatrix<T>, gamma_in: &ThermalState<T>, gamma_out: &ThermalState<T>) -> CMatrix<T> {
    let (di, dout) = (gamma_in.dim(), gamma_out.dim());
    let dims = [di, dout];
    let gi = gamma_in.matrix();
    let r1 = &partial_trace(j, &dims, &[0]).expect("dims") - &CMatrix::identity(di);
    let weighted = &kron(&gi, &CMatrix::identity(dout)) * j;
    let r2 = &partial_trace(&weighted, &dims, &[1]).expect("dims") - &gamma_out.matrix();
    let inv_dout = T::one() / T::lit(dout as f64);
    let x = r1.scale(inv_dout);
    let u = gi.trace_product(&r1).re * inv_dout;
    let g2: T = gamma_in.populations().iter().map(|g| *g * *g).sum();
    let y = (&r2 - &CMatrix::identity(dout).scale(u)).scale(T::one() / g2);
    let corr = &kron(&x, &CMatrix::identity(dout)) + &kron(&gi, &y);
    (j - &corr).hermitize()
}

/// Projects a Choi matrix onto the Gibbs-preserving channels by Dykstra's alternating projections.
///
/// The final iterate satisfies the affine constraints exactly; any residual negativity is
/// removed by mixing in the thermalising channel with the smallest sufficient weight.
pub fn project_gpo<T: Real>(
    choi: &CMatrix<T>,
    gamma_in: &ThermalState<T>,
    gamma_out: &ThermalState<T>,
) -> Result<QuantumChannel<T>> {
    const MAX_SWEEPS: usize = 500;
    let (di, dout) = (gamma_in.dim(), gamma_out.dim());
    if choi.rows() != di * dout {
        return Err(Error::Dimension("Choi matrix does not match the thermal states".into()));
    }
    let mut x = choi.hermitize();
    let mut p = CMatrix::zeros(x.rows(), x.cols());
    let mut q = CMatrix::zeros(x.rows(), x.cols());
    let mut deficit = T::infinity();
    for _ in 0..MAX_SWEEPS {
        let y = project_psd(&(&x + &p));
        p = &(&x + &p) - &y;
        let next = project_affine(&(&y + &q), gamma_in, gamma_out);
        q = &(&y + &q) - &next;
        x = next;
        deficit = (-crate::qmat::psd_min_eig(&x)?).max(T::zero());
        if deficit <= T::tol(1e-12) {
            break;
        }
    }
    if deficit > T::tol(1e-6) {
        return Err(Error::Convergence {
            iterations: MAX_SWEEPS,
            residual: deficit.as_f64(),
        });
    }
    let j_gamma = kron(&CMatrix::identity(di), &gamma_out.matrix());
    if deficit > T::zero() {
        let eps = deficit / (deficit + gamma_out.g_min());
        x = &x.scale(T::one() - eps) + &j_gamma.scale(eps);
    }
    QuantumChannel::from_choi(di, dout, x)
}

/// Random Gibbs-preserving channel: the GPO projection of a flat random channel.
pub fn random_gpo<T: Real, R: Rng + ?Sized>(
    gamma_in: &ThermalState<T>,
    gamma_out: &ThermalState<T>,
    rng: &mut R,
) -> Result<QuantumChannel<T>> {
    let seed = random_channel_flat::<T, R>(gamma_in.dim(), gamma_out.dim(), rng);
    project_gpo(seed.choi(), gamma_in, gamma_out)
}
