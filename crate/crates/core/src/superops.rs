//! Higher-order constructions: the quantum switch, coherent control of two channel
//! uses, the two-level GPO dilation, and the closed-form resource values that go with them.
//!
//! Every joint map orders the control qubit first: inputs are `C⊗A`, outputs `C′⊗B`.
//! Induced channels `ρ ↦ S(ρ_C⊗ρ)` therefore map `A → C′⊗B`.

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::measures::{athermality_lambda, r_t_channel};
use crate::qmat::{cplx, creal, eig_hermitian, kron, CMatrix};
use crate::scalar::Real;
use crate::thermo::ThermalState;

/// Control-qubit preparation `ρ_C = r|ψ⟩⟨ψ| + (1−r)·1/2`, `|ψ⟩ = √α|0⟩ + e^{iφ}√(1−α)|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlQubitSpec<T> {
    pub alpha: T,
    pub phi: T,
    pub r: T,
}

fn check_unit<T: Real>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} outside [0, 1]")))
    }
}

impl<T: Real> ControlQubitSpec<T> {
    pub fn new(alpha: T, phi: T, r: T) -> Result<Self> {
        let spec = Self { alpha, phi, r };
        spec.validate()?;
        Ok(spec)
    }

    /// Pure control (`r = 1`).
    pub fn pure(alpha: T, phi: T) -> Result<Self> {
        Self::new(alpha, phi, T::one())
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("alpha", self.alpha)?;
        check_unit("r", self.r)?;
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        if !(self.phi >= T::zero() && self.phi <= two_pi) {
            return Err(Error::OutOfRange(format!("phi = {} outside [0, 2π]", self.phi)));
        }
        Ok(())
    }

    pub fn rho_c(&self) -> CMatrix<T> {
        let a = self.alpha.sqrt();
        let b = (T::one() - self.alpha).sqrt();
        let psi = [creal(a), cplx(b * self.phi.cos(), b * self.phi.sin())];
        let half = T::lit(0.5);
        CMatrix::outer(&psi, &psi).scale(self.r) + CMatrix::identity(2).scale((T::one() - self.r) * half)
    }

    /// `R_T(ρ_C)` with respect to `γ_C = 1/2`, which equals `r`.
    pub fn athermality(&self) -> T {
        self.r
    }
}

fn square_kraus<T: Real>(ch: &QuantumChannel<T>, what: &str) -> Result<Vec<CMatrix<T>>> {
    if ch.d_in() != ch.d_out() {
        return Err(Error::Dimension(format!(
            "{what} needs a channel with equal input and output dimension, got {} -> {}",
            ch.d_in(),
            ch.d_out()
        )));
    }
    ch.kraus_ops()
}

fn control_projectors<T: Real>() -> (CMatrix<T>, CMatrix<T>) {
    (CMatrix::basis_projector(2, 0), CMatrix::basis_projector(2, 1))
}

/// Quantum switch `S[Λ,Λ]` with Kraus operators `|0⟩⟨0|⊗K_nK_m + |1⟩⟨1|⊗K_mK_n`.
pub fn switch<T: Real>(ch: &QuantumChannel<T>) -> Result<QuantumChannel<T>> {
    let k = square_kraus(ch, "quantum switch")?;
    let (p0, p1) = control_projectors();
    let mut ops = Vec::with_capacity(k.len() * k.len());
    for km in &k {
        for kn in &k {
            ops.push(kron(&p0, &(kn * km)) + kron(&p1, &(km * kn)));
        }
    }
    QuantumChannel::from_kraus(ops)
}

/// Coherent control `(|0⟩⟨0|⊗K_m + |1⟩⟨1|⊗K_n)/√N` over the Kraus list as stored.
pub fn coherent_control<T: Real>(ch: &QuantumChannel<T>) -> Result<QuantumChannel<T>> {
    let k = square_kraus(ch, "coherent control")?;
    let (p0, p1) = control_projectors();
    let norm = T::one() / T::lit(k.len() as f64).sqrt();
    let mut ops = Vec::with_capacity(k.len() * k.len());
    for km in &k {
        for kn in &k {
            ops.push((kron(&p0, km) + kron(&p1, kn)).scale(norm));
        }
    }
    QuantumChannel::from_kraus(ops)
}

/// Plugs a control state into a joint map on `C⊗A`, giving `ρ ↦ S(ρ_C⊗ρ)`.
fn plug_control<T: Real>(joint: &QuantumChannel<T>, rho_c: &CMatrix<T>) -> Result<QuantumChannel<T>> {
    let d = joint.d_in() / 2;
    let eig = eig_hermitian(rho_c)?;
    let mut ops = Vec::new();
    for (idx, &p) in eig.values.iter().enumerate() {
        if p <= T::tol(1e-15) {
            continue;
        }
        let lift = kron(&CMatrix::column(&eig.vector(idx)), &CMatrix::identity(d)).scale(p.sqrt());
        for s in joint.kraus_ops()? {
            ops.push(&s * &lift);
        }
    }
    QuantumChannel::from_kraus(ops)
}

/// `Λ_S(ρ) = S[Λ,Λ](ρ_C⊗ρ)`, mapping `A → C′⊗B`.
pub fn induced_switch<T: Real>(ch: &QuantumChannel<T>, ctrl: &ControlQubitSpec<T>) -> Result<QuantumChannel<T>> {
    ctrl.validate()?;
    plug_control(&switch(ch)?, &ctrl.rho_c())
}

/// `Λ_C(ρ) = C[Λ,Λ](ρ_C⊗ρ)`, mapping `A → C′⊗B`.
pub fn induced_coherent_control<T: Real>(
    ch: &QuantumChannel<T>,
    ctrl: &ControlQubitSpec<T>,
) -> Result<QuantumChannel<T>> {
    ctrl.validate()?;
    plug_control(&coherent_control(ch)?, &ctrl.rho_c())
}

/// Thermal state `γ_C ⊗ γ` of the induced channels' output, with `γ_C = 1/2`.
pub fn control_output_gibbs<T: Real>(gamma: &ThermalState<T>) -> ThermalState<T> {
    ThermalState::uniform(2).tensor(gamma)
}

/// `r·√(1 − 4(1−g²)[2−(1−g²)s²]s²α(1−α))` with `g = g_max`: `R_T` of the switch-induced
/// channel built from `G = sΓ + (1−s)I`.
pub fn rt_switch_analytic<T: Real>(ctrl: &ControlQubitSpec<T>, s: T, g_max: T) -> Result<T> {
    ctrl.validate()?;
    check_unit("s", s)?;
    if !(g_max > T::zero() && g_max <= T::one()) {
        return Err(Error::OutOfRange(format!("g_max = {g_max} outside (0, 1]")));
    }
    let one = T::one();
    let c = one - g_max * g_max;
    let s2 = s * s;
    let arg = one - T::lit(4.0) * c * (T::lit(2.0) - c * s2) * s2 * ctrl.alpha * (one - ctrl.alpha);
    Ok(ctrl.r * arg.max(T::zero()).sqrt())
}

/// `P_T(I) = Tr γ⁻¹ − 1`, the preservability of the identity channel.
pub fn p_t_identity<T: Real>(gamma: &ThermalState<T>) -> T {
    gamma.trace_inverse() - T::one()
}

/// `P_T(sΓ + (1−s)I) = (1−s)P_T(I)`.
pub fn p_t_signalling_gpo<T: Real>(gamma: &ThermalState<T>, s: T) -> T {
    (T::one() - s) * p_t_identity(gamma)
}

/// Upper bound `r + (1+r)(1−s)²P_T(I)` on `R(Λ_S‖Γ)`.
pub fn switch_upper_bound<T: Real>(ctrl: &ControlQubitSpec<T>, s: T, gamma: &ThermalState<T>) -> T {
    let r = ctrl.r;
    let q = T::one() - s;
    r + (T::one() + r) * q * q * p_t_identity(gamma)
}

/// `√((1−2α)² + 4α(1−α)/d²)`: `R_T` of the coherently controlled `Γ` (`s = 1`).
pub fn rt_cc_analytic<T: Real>(alpha: T, d: usize) -> Result<T> {
    check_unit("alpha", alpha)?;
    if d < 2 {
        return Err(Error::OutOfRange(format!("dimension {d} below 2")));
    }
    let one = T::one();
    let lin = one - T::lit(2.0) * alpha;
    let dd = T::lit((d * d) as f64);
    Ok((lin * lin + T::lit(4.0) * alpha * (one - alpha) / dd).sqrt())
}

/// `χ = (e^{-iφ}|0⟩⟨1| + e^{iφ}|1⟩⟨0|) ⊗ τ` on `C⊗B⊗A` with
/// `τ = |γ̂⟩⟩⟨γ̃| + |γ̃⟩⟨⟨γ̂|`.
pub fn cc_chi<T: Real>(phi: T, gamma: &ThermalState<T>) -> CMatrix<T> {
    let sq: Vec<T> = gamma.populations().iter().map(|g| g.sqrt()).collect();
    let d = sq.len();
    let mut hat = vec![creal(T::zero()); d * d];
    let mut tfd = vec![creal(T::zero()); d * d];
    for k in 0..d {
        for l in 0..d {
            hat[k * d + l] = creal(sq[k] * sq[l]);
        }
        tfd[k * d + k] = creal(sq[k]);
    }
    let tau = CMatrix::outer(&hat, &tfd) + CMatrix::outer(&tfd, &hat);
    let mut flip = CMatrix::zeros(2, 2);
    flip[(0, 1)] = cplx(phi.cos(), -phi.sin());
    flip[(1, 0)] = cplx(phi.cos(), phi.sin());
    kron(&flip, &tau)
}

/// Coherent-control bound `r + 2P_T(G) + √(α(1−α)s(1−s))·f(γ)`, `f = [1 + R_T(χ)]/(d²+1)`.
///
/// `χ` is Hermitian but not a state, so `R_T(χ)` here is the spectral extension
/// [`athermality_lambda`] against `γ_C⊗γ⊗γ`. Only a pure control is covered.
pub fn cc_upper_bound<T: Real>(ctrl: &ControlQubitSpec<T>, s: T, gamma: &ThermalState<T>) -> Result<T> {
    ctrl.validate()?;
    check_unit("s", s)?;
    if ctrl.r != T::one() {
        return Err(Error::Precondition("coherent-control bound requires a pure control (r = 1)".into()));
    }
    let d = gamma.dim();
    let joint = ThermalState::uniform(2).tensor(gamma).tensor(gamma);
    let chi = athermality_lambda(&cc_chi(ctrl.phi, gamma), &joint)?;
    let f = (T::one() + chi) / T::lit((d * d + 1) as f64);
    let mix = (ctrl.alpha * (T::one() - ctrl.alpha) * s * (T::one() - s)).sqrt();
    Ok(ctrl.athermality() + T::lit(2.0) * p_t_signalling_gpo(gamma, s) + mix * f)
}

/// Two-level GPO dilation `G̃(τ⊗ρ) = ⟨0|τ|0⟩Λ(ρ) + ⟨1|τ|1⟩σ_B` of a channel.
#[derive(Clone, Debug)]
pub struct GpoDilation<T> {
    /// Resource state, `|0⟩⟨0|` (or the trivial `1×1` state when degenerate).
    pub rho_c: CMatrix<T>,
    pub gamma_c: ThermalState<T>,
    /// Joint map on `C⊗A → B`.
    pub g_tilde: QuantumChannel<T>,
    /// `R_T(Λ)` the construction was built for.
    pub r_t: T,
    /// Set when `R_T(Λ) ≤ 1e-10`: `C` is one-dimensional and `G̃ = Λ`.
    pub degenerate: bool,
}

pub fn gpo_dilation<T: Real>(
    ch: &QuantumChannel<T>,
    gamma_in: &ThermalState<T>,
    gamma_out: &ThermalState<T>,
) -> Result<GpoDilation<T>> {
    let r_t = r_t_channel(ch, gamma_in, gamma_out)?;
    if r_t <= T::tol(1e-10) {
        return Ok(GpoDilation {
            rho_c: CMatrix::identity(1),
            gamma_c: ThermalState::uniform(1),
            g_tilde: ch.clone(),
            r_t,
            degenerate: true,
        });
    }
    let one = T::one();
    let gamma_c = ThermalState::new(vec![one / (one + r_t), r_t / (one + r_t)])?;
    let lam_gamma = ch.apply(&gamma_in.matrix())?;
    let sigma = ((gamma_out.matrix().scale(one + r_t) - lam_gamma).scale(one / r_t)).hermitize();

    let d_in = ch.d_in();
    let bra0 = CMatrix::unit(1, 2, 0, 0);
    let bra1 = CMatrix::unit(1, 2, 0, 1);
    let mut ops: Vec<CMatrix<T>> = ch.kraus_ops()?.iter().map(|k| kron(&bra0, k)).collect();
    let eig = eig_hermitian(&sigma)?;
    for (idx, &p) in eig.values.iter().enumerate() {
        if p <= T::tol(1e-15) {
            continue;
        }
        let v = eig.vector(idx);
        for i in 0..d_in {
            let mut e = vec![creal(T::zero()); d_in];
            e[i] = creal(p.sqrt());
            ops.push(kron(&bra1, &CMatrix::outer(&v, &e)));
        }
    }
    Ok(GpoDilation {
        rho_c: CMatrix::basis_projector(2, 0),
        gamma_c,
        g_tilde: QuantumChannel::from_kraus(ops)?,
        r_t,
        degenerate: false,
    })
}

impl<T: Real> GpoDilation<T> {
    /// Input thermal state `γ_C⊗γ_A` of `G̃`.
    pub fn joint_gibbs_in(&self, gamma_in: &ThermalState<T>) -> ThermalState<T> {
        self.gamma_c.tensor(gamma_in)
    }

    /// `G̃(ρ_C⊗·)`, which reproduces the dilated channel.
    pub fn simulated(&self) -> Result<QuantumChannel<T>> {
        if self.degenerate {
            return Ok(self.g_tilde.clone());
        }
        plug_control(&self.g_tilde, &self.rho_c)
    }
}
