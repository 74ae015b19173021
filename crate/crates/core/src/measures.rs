//! Resource monotones: athermality `R_T`, signalling `R_S`, the joint measure `R(Λ‖Γ)`
//! and the athermality preservability `P_T` of Gibbs-preserving maps.
//!
//! `R_T` and `R` have eigenvalue closed forms because `γ` and `1⊗γ` are full rank;
//! `R_S` always goes through the SDP solver.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channels::{is_gibbs_preserving, QuantumChannel};
use crate::error::{Error, Result};
use crate::qmat::{creal, eig_hermitian, lambda_max, trace_norm, CMatrix};
use crate::scalar::Real;
use crate::sdp::{build_rs, build_rt_channel, solve, SdpOptions, SdpSolution, SdpStatus};
use crate::thermo::ThermalState;

/// `γ^{-1/2} M γ^{-1/2}` for diagonal `γ`.
fn conjugate_by_gibbs<T: Real>(m: &CMatrix<T>, weights: &[T]) -> CMatrix<T> {
    let inv: Vec<T> = weights.iter().map(|g| T::one() / g.sqrt()).collect();
    CMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * (inv[i] * inv[j]))
}

fn check_dim<T: Real>(m: &CMatrix<T>, d: usize) -> Result<()> {
    if m.rows() != d || m.cols() != d {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, thermal state has dimension {d}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// `λ_max(γ^{-1/2} H γ^{-1/2}) − 1` for any Hermitian `H`.
///
/// Coincides with the athermality robustness when `H` is a state; for other
/// Hermitian operators it is only this spectral extension.
pub fn athermality_lambda<T: Real>(h: &CMatrix<T>, gamma: &ThermalState<T>) -> Result<T> {
    check_dim(h, gamma.dim())?;
    h.check_hermitian()?;
    Ok(lambda_max(&conjugate_by_gibbs(h, gamma.populations()).hermitize())? - T::one())
}

/// Robustness of athermality of a state.
pub fn r_t_state<T: Real>(rho: &CMatrix<T>, gamma: &ThermalState<T>) -> Result<T> {
    athermality_lambda(rho, gamma)
}

/// Optimal rank-one dual witness for `R_T`.
#[derive(Clone, Debug)]
pub struct DualWitness<T> {
    /// `Tr(Sρ) = 1 + R_T(ρ)`.
    pub value: T,
    pub witness: CMatrix<T>,
}

/// Dual optimum `max{Tr Sρ | S ⪰ 0, Tr Sγ = 1}` with `S = γ^{-1/2}|φ⟩⟨φ|γ^{-1/2}`,
/// `φ` the top eigenvector of `γ^{-1/2}ργ^{-1/2}`.
pub fn r_t_state_dual<T: Real>(rho: &CMatrix<T>, gamma: &ThermalState<T>) -> Result<DualWitness<T>> {
    check_dim(rho, gamma.dim())?;
    rho.check_hermitian()?;
    let lifted = conjugate_by_gibbs(rho, gamma.populations()).hermitize();
    let eig = eig_hermitian(&lifted)?;
    let top = eig.values.len() - 1;
    let phi = eig.vector(top);
    let v: Vec<_> = phi
        .iter()
        .zip(gamma.populations())
        .map(|(a, g)| *a / g.sqrt())
        .collect();
    let witness = CMatrix::outer(&v, &v);
    Ok(DualWitness {
        value: witness.trace_product(rho).re,
        witness,
    })
}

/// Channel athermality `R_T(Λ) = R_T(Λ(γ_in))`.
pub fn r_t_channel<T: Real>(
    ch: &QuantumChannel<T>,
    gamma_in: &ThermalState<T>,
    gamma_out: &ThermalState<T>,
) -> Result<T> {
    if ch.d_in() != gamma_in.dim() {
        return Err(Error::Dimension("input thermal state does not match the channel".into()));
    }
    r_t_state(&ch.apply(&gamma_in.matrix())?, gamma_out)
}

/// Joint measure `R(Λ‖Γ) = λ_max((1⊗γ_out^{-1/2}) J (1⊗γ_out^{-1/2})) − 1`.
pub fn r_joint<T: Real>(ch: &QuantumChannel<T>, gamma_out: &ThermalState<T>) -> Result<T> {
    if ch.d_out() != gamma_out.dim() {
        return Err(Error::Dimension("output thermal state does not match the channel".into()));
    }
    let weights: Vec<T> = (0..ch.d_in()).flat_map(|_| gamma_out.populations().iter().copied()).collect();
    let lifted = conjugate_by_gibbs(ch.choi(), &weights).hermitize();
    Ok(lambda_max(&lifted)? - T::one())
}

/// Athermality preservability of a Gibbs-preserving map.
pub fn p_t<T: Real>(ch: &QuantumChannel<T>, gamma_in: &ThermalState<T>, gamma_out: &ThermalState<T>) -> Result<T> {
    let (ok, residual) = is_gibbs_preserving(ch, gamma_in, gamma_out)?;
    if !ok {
        return Err(Error::Precondition(format!(
            "channel is not Gibbs preserving (residual {:.3e})",
            residual.as_f64()
        )));
    }
    r_joint(ch, gamma_out)
}

fn require_optimal(sol: SdpSolution, what: &str) -> Result<SdpSolution> {
    if sol.status == SdpStatus::Optimal {
        return Ok(sol);
    }
    Err(Error::Solver(format!(
        "{what}: status {:?} after {} iterations (gap {:.3e}, min LMI eigenvalue {:.3e}, equality residual {:.3e})",
        sol.status, sol.iterations, sol.gap, sol.min_lmi_eig, sol.eq_residual
    )))
}

/// Robustness of signalling, `min{Tr X | 1⊗X ⪰ J_Λ} − 1`.
pub fn r_signalling(ch: &QuantumChannel<f64>, opts: &SdpOptions) -> Result<f64> {
    let sol = require_optimal(solve(&build_rs(ch)?, opts)?, "signalling robustness")?;
    Ok(sol.primal_value - 1.0)
}

/// Channel athermality from its defining SDP (cross-check of [`r_t_channel`]).
pub fn r_t_channel_sdp(
    ch: &QuantumChannel<f64>,
    gamma_in: &ThermalState<f64>,
    gamma_out: &ThermalState<f64>,
    opts: &SdpOptions,
) -> Result<f64> {
    let sol = require_optimal(
        solve(&build_rt_channel(ch, gamma_in, gamma_out)?, opts)?,
        "channel athermality",
    )?;
    Ok(sol.primal_value - 1.0)
}

/// Slacks of `R ≥ R_S ≥ 2(g_min^{AB})²(R − R_T)²`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Thm4Slacks {
    pub upper: f64,
    pub lower: f64,
}

/// `g_min(γ_in)·g_min(γ_out)`.
pub fn g_min_ab<T: Real>(gamma_in: &ThermalState<T>, gamma_out: &ThermalState<T>) -> T {
    gamma_in.g_min() * gamma_out.g_min()
}

pub fn thm4_slacks(r_t: f64, r_s: f64, r: f64, g_ab: f64) -> Thm4Slacks {
    Thm4Slacks {
        upper: r - r_s,
        lower: r_s - 2.0 * g_ab * g_ab * (r - r_t).powi(2),
    }
}

pub fn thm4_bounds(
    ch: &QuantumChannel<f64>,
    gamma_in: &ThermalState<f64>,
    gamma_out: &ThermalState<f64>,
    opts: &SdpOptions,
) -> Result<Thm4Slacks> {
    let r_t = r_t_channel(ch, gamma_in, gamma_out)?;
    let r = r_joint(ch, gamma_out)?;
    let r_s = r_signalling(ch, opts)?;
    Ok(thm4_slacks(r_t, r_s, r, g_min_ab(gamma_in, gamma_out)))
}

/// `(|R_T(ρ) − R_T(σ)|, ‖ρ − σ‖₁ / (2 g_min))`.
pub fn continuity_gap<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>, gamma: &ThermalState<T>) -> Result<(T, T)> {
    let lhs = (r_t_state(rho, gamma)? - r_t_state(sigma, gamma)?).abs();
    let rhs = trace_norm(&(rho - sigma)) / (T::lit(2.0) * gamma.g_min());
    Ok((lhs, rhs))
}

#[derive(Clone, Debug)]
pub struct MostAthermal<T> {
    pub state: CMatrix<T>,
    /// `1/g_min − 1`.
    pub value: T,
    /// Set when the smallest population is shared, so the maximiser is not unique.
    pub degenerate: bool,
}

/// Energy eigenstate of smallest population, which maximises `R_T`.
pub fn most_athermal<T: Real>(gamma: &ThermalState<T>) -> MostAthermal<T> {
    let (idx, degenerate) = gamma.min_level();
    let d = gamma.dim();
    let mut v = vec![creal(T::zero()); d];
    v[idx] = creal(T::one());
    MostAthermal {
        state: CMatrix::outer(&v, &v),
        value: T::one() / gamma.g_min() - T::one(),
        degenerate,
    }
}

/// All four measures of one channel plus the bound slacks that tie them together.
#[derive(Clone, Debug, Serialize)]
pub struct ResourceReport {
    pub r_t: f64,
    pub r_s: f64,
    pub r_joint: f64,
    pub p_t: Option<f64>,
    pub transmission: f64,
    pub gibbs_residual: f64,
    pub bound_slacks: BTreeMap<String, f64>,
}

pub fn resource_report(
    ch: &QuantumChannel<f64>,
    gamma_in: &ThermalState<f64>,
    gamma_out: &ThermalState<f64>,
    opts: &SdpOptions,
) -> Result<ResourceReport> {
    let r_t = r_t_channel(ch, gamma_in, gamma_out)?;
    let r = r_joint(ch, gamma_out)?;
    let r_s = r_signalling(ch, opts)?;
    let (gpo, residual) = is_gibbs_preserving(ch, gamma_in, gamma_out)?;
    let t4 = thm4_slacks(r_t, r_s, r, g_min_ab(gamma_in, gamma_out));
    let mut slacks = BTreeMap::new();
    slacks.insert("joint_ge_max".to_string(), r - r_t.max(r_s));
    slacks.insert("joint_cap".to_string(), gamma_out.trace_inverse() - 1.0 - r);
    slacks.insert("signalling_upper".to_string(), t4.upper);
    slacks.insert("signalling_lower".to_string(), t4.lower);
    Ok(ResourceReport {
        r_t,
        r_s,
        r_joint: r,
        p_t: gpo.then_some(r),
        transmission: r - r_t,
        gibbs_residual: residual,
        bound_slacks: slacks,
    })
}
