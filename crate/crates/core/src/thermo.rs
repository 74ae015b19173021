//! Thermal states, purifications and entropic quantities (natural-log units).

use num_complex::Complex;

use crate::channels::{apply_on_second, QuantumChannel};
use crate::error::{Error, Result};
use crate::qmat::{creal, eigvals_hermitian, kron, partial_trace, CMatrix};
use crate::scalar::Real;

/// Full-rank diagonal Gibbs state given by its populations.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalState<T> {
    populations: Vec<T>,
}

impl<T: Real> ThermalState<T> {
    /// Validates strict positivity and normalisation to within `1e-9`.
    pub fn new(populations: Vec<T>) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::InvalidGibbs("empty population list".into()));
        }
        if let Some(p) = populations.iter().find(|p| **p <= T::zero() || !p.is_finite()) {
            return Err(Error::InvalidGibbs(format!("population {p} is not strictly positive")));
        }
        let total: T = populations.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-9) {
            return Err(Error::InvalidGibbs(format!("populations sum to {total}, not 1")));
        }
        Ok(Self { populations })
    }

    /// Infinite-temperature state `I/d`.
    pub fn uniform(d: usize) -> Self {
        let p = T::one() / T::lit(d as f64);
        Self {
            populations: vec![p; d],
        }
    }

    pub fn from_f64(populations: &[f64]) -> Result<Self> {
        Self::new(populations.iter().map(|&p| T::lit(p)).collect())
    }

    pub fn dim(&self) -> usize {
        self.populations.len()
    }

    pub fn populations(&self) -> &[T] {
        &self.populations
    }

    pub fn g_min(&self) -> T {
        self.populations.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn g_max(&self) -> T {
        self.populations.iter().copied().fold(T::zero(), T::max)
    }

    /// `Tr γ⁻¹`.
    pub fn trace_inverse(&self) -> T {
        self.populations.iter().map(|&g| T::one() / g).sum()
    }

    /// Density matrix `γ`.
    pub fn matrix(&self) -> CMatrix<T> {
        CMatrix::from_real_diag(&self.populations)
    }

    /// Diagonal power `γ^p`.
    pub fn power(&self, p: T) -> CMatrix<T> {
        let d: Vec<T> = self.populations.iter().map(|g| g.powf(p)).collect();
        CMatrix::from_real_diag(&d)
    }

    /// `γ ⊗ σ`, populations in tensor order.
    pub fn tensor(&self, other: &Self) -> Self {
        let populations = self
            .populations
            .iter()
            .flat_map(|a| other.populations.iter().map(move |b| *a * *b))
            .collect();
        Self { populations }
    }

    /// Index of the smallest population and whether it is shared with another level.
    pub fn min_level(&self) -> (usize, bool) {
        let g = self.g_min();
        let idx = self.populations.iter().position(|&p| p == g).unwrap_or(0);
        let degenerate = self
            .populations
            .iter()
            .enumerate()
            .any(|(k, &p)| k != idx && (p - g).abs() <= T::tol(1e-12));
        (idx, degenerate)
    }

    pub fn cast<U: Real>(&self) -> ThermalState<U> {
        ThermalState {
            populations: self.populations.iter().map(|p| U::lit(p.as_f64())).collect(),
        }
    }
}

/// Thermofield double `|γ̃⟩ = Σ √gᵢ |i⟩⊗|i⟩` as a density matrix on `d²`.
pub fn thermofield_double<T: Real>(gamma: &ThermalState<T>) -> CMatrix<T> {
    let d = gamma.dim();
    let mut v = vec![creal(T::zero()); d * d];
    for (i, g) in gamma.populations().iter().enumerate() {
        v[i * d + i] = creal(g.sqrt());
    }
    CMatrix::outer(&v, &v)
}

/// Purification `(1⊗U)|γ̃⟩⟨γ̃|(1⊗U†)`.
pub fn purify<T: Real>(gamma: &ThermalState<T>, u: &CMatrix<T>) -> Result<CMatrix<T>> {
    let d = gamma.dim();
    if u.rows() != d || u.cols() != d {
        return Err(Error::Dimension(format!(
            "unitary is {}x{}, thermal state has dimension {d}",
            u.rows(),
            u.cols()
        )));
    }
    let mut v = vec![creal(T::zero()); d * d];
    for (i, g) in gamma.populations().iter().enumerate() {
        let s = g.sqrt();
        for k in 0..d {
            v[i * d + k] = u[(k, i)] * s;
        }
    }
    Ok(CMatrix::outer(&v, &v))
}

fn entropy_of<T: Real>(values: &[T]) -> T {
    let floor = T::lit(1e-14);
    values
        .iter()
        .filter(|&&p| p > floor)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Von Neumann entropy in nats.
pub fn von_neumann<T: Real>(rho: &CMatrix<T>) -> Result<T> {
    Ok(entropy_of(&eigvals_hermitian(rho)?))
}

/// `Tr ρ(ln ρ − ln σ)`; errors when the support of `ρ` leaves that of `σ`.
pub fn rel_entropy<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>) -> Result<T> {
    if rho.rows() != sigma.rows() {
        return Err(Error::Dimension("relative entropy of unequal dimensions".into()));
    }
    let floor = T::lit(1e-14);
    let se = crate::qmat::eig_hermitian(sigma)?;
    let d = rho.rows();
    // Tr ρ ln σ = Σ_k ln s_k ⟨v_k|ρ|v_k⟩
    let mut cross = T::zero();
    for k in 0..d {
        let w = rho.expectation(&se.vector(k)).re;
        let s = se.values[k];
        if s <= floor {
            if w > T::tol(1e-12) {
                return Err(Error::Divergence(format!(
                    "weight {:.3e} on a null direction of the reference state",
                    w.as_f64()
                )));
            }
            continue;
        }
        cross = cross + w * s.ln();
    }
    let neg_entropy = -von_neumann(rho)?;
    Ok(neg_entropy - cross)
}

/// Quantum mutual information of a bipartite state with factors `dims = [d_a, d_b]`.
pub fn mutual_information<T: Real>(rho_ab: &CMatrix<T>, dims: [usize; 2]) -> Result<T> {
    let ra = partial_trace(rho_ab, &dims, &[0])?;
    let rb = partial_trace(rho_ab, &dims, &[1])?;
    Ok(von_neumann(&ra)? + von_neumann(&rb)? - von_neumann(rho_ab)?)
}

/// Max-relative entropy `ln λ_max(σ^{-1/2} ρ σ^{-1/2})`.
pub fn d_max<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>) -> Result<T> {
    let inv = crate::qmat::herm_pow(sigma, T::lit(-0.5))?;
    let lifted = (&(&inv * rho) * &inv).hermitize();
    Ok(crate::qmat::lambda_max(&lifted)?.ln())
}

/// `(I⊗Λ)(τ)` for the purification `τ = (1⊗U)γ̃(1⊗U†)`; `None` means the thermofield double.
pub fn channel_on_purification<T: Real>(
    ch: &QuantumChannel<T>,
    gamma: &ThermalState<T>,
    u: Option<&CMatrix<T>>,
) -> Result<CMatrix<T>> {
    if ch.d_in() != gamma.dim() {
        return Err(Error::Dimension(format!(
            "channel input {} vs thermal dimension {}",
            ch.d_in(),
            gamma.dim()
        )));
    }
    match u {
        None => {
            let half = gamma.power(T::lit(0.5));
            let lift = kron(&half, &CMatrix::identity(ch.d_out()));
            Ok((&(&lift * ch.choi()) * &lift).hermitize())
        }
        Some(u) => apply_on_second(ch, &purify(gamma, u)?, gamma.dim()),
    }
}

/// Mutual information of `(I⊗Λ)(γ̃)`.
pub fn mutual_info_at_tfd<T: Real>(ch: &QuantumChannel<T>, gamma: &ThermalState<T>) -> Result<T> {
    let out = channel_on_purification(ch, gamma, None)?;
    mutual_information(&out, [ch.d_in(), ch.d_out()])
}

/// Bloch-vector style helper: `|v⟩⟨v|` from real amplitudes.
pub fn pure_from_real<T: Real>(amps: &[T]) -> CMatrix<T> {
    let v: Vec<Complex<T>> = amps.iter().map(|&a| creal(a)).collect();
    CMatrix::outer(&v, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_gamma, make_identity};
    use crate::qmat::purity;

    fn g75() -> ThermalState<f64> {
        ThermalState::from_f64(&[0.75, 0.25]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(ThermalState::<f64>::from_f64(&[0.5, 0.5]).is_ok());
        assert!(ThermalState::<f64>::from_f64(&[1.0, 0.0]).is_err());
        assert!(ThermalState::<f64>::from_f64(&[0.6, 0.6]).is_err());
        assert!(ThermalState::<f64>::from_f64(&[]).is_err());
        let g = ThermalState::<f64>::from_f64(&[0.5, 0.3, 0.2]).unwrap();
        assert_eq!(g.g_min(), 0.2);
        assert_eq!(g.g_max(), 0.5);
        assert_eq!(g.min_level(), (2, false));
        assert!(ThermalState::<f64>::uniform(2).min_level().1);
    }

    #[test]
    fn tfd_uniform_is_bell_state() {
        let tfd = thermofield_double(&ThermalState::<f64>::uniform(2));
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((tfd[(i, j)].re - 0.5).abs() < 1e-15);
        }
        assert!((purity(&tfd) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tfd_marginals_are_thermal() {
        let g = g75();
        let tfd = thermofield_double(&g);
        for keep in [0, 1] {
            let m = partial_trace(&tfd, &[2, 2], &[keep]).unwrap();
            assert!(m.max_abs_diff(&g.matrix()) < 1e-15);
        }
    }

    #[test]
    fn entropies() {
        let pure = pure_from_real::<f64>(&[0.6, 0.8]);
        assert!(von_neumann(&pure).unwrap().abs() < 1e-12);
        let g = g75();
        let prod = kron(&g.matrix(), &g.matrix());
        assert!(mutual_information(&prod, [2, 2]).unwrap().abs() < 1e-12);
        let tfd = thermofield_double(&ThermalState::<f64>::uniform(2));
        let mi = mutual_information(&tfd, [2, 2]).unwrap();
        assert!((mi - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_support() {
        let one = CMatrix::<f64>::basis_projector(2, 1);
        let zero = CMatrix::<f64>::basis_projector(2, 0);
        assert!(matches!(rel_entropy(&one, &zero), Err(Error::Divergence(_))));
        let g = g75();
        // D(|1⟩⟨1| || γ) = −ln 0.25
        assert!((rel_entropy(&one, &g.matrix()).unwrap() - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn d_max_examples() {
        let g = g75();
        let rho = g.matrix();
        assert!(d_max(&rho, &rho).unwrap().abs() < 1e-12);
        let one = CMatrix::<f64>::basis_projector(2, 1);
        assert!((d_max(&one, &g.matrix()).unwrap() - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn mutual_info_at_tfd_examples() {
        let g = g75();
        let gamma = make_gamma(&g, 2);
        assert!(mutual_info_at_tfd(&gamma, &g).unwrap().abs() < 1e-12);
        let id = make_identity::<f64>(2);
        let mi = mutual_info_at_tfd(&id, &ThermalState::uniform(2)).unwrap();
        assert!((mi - 2.0 * 2f64.ln()).abs() < 1e-12);
    }
}
