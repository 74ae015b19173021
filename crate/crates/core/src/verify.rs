//! Seeded verification suites for the structural results tying `R_T`, `R_S`, `R` and `P_T`
//! together.
//!
//! Every check records a signed slack per trial (`≥ 0` means satisfied); the violation of
//! a check is `max(0, −slack)` and a suite passes when each check's worst violation is
//! within that check's tolerance. Trials draw from independent ChaCha substreams indexed
//! by `(family, trial)`, so results do not depend on thread scheduling.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{
    compose, is_gibbs_preserving, make_gamma, make_identity, make_measure_prepare, make_replace,
    make_signalling_gpo, make_unitary, random_channel_flat, random_density, random_gpo, random_pure,
    random_unitary, QuantumChannel,
};
use crate::error::{Error, Result};
use crate::measures::{
    continuity_gap, g_min_ab, most_athermal, p_t, r_joint, r_t_channel, r_t_state, r_t_state_dual, thm4_slacks,
};
use crate::qmat::{eigvals_hermitian, kron, lambda_max, trace_norm, CMatrix};
use crate::sdp::{build_rs, build_rt_channel, solve, SdpOptions, SdpSolution};
use crate::superops::{
    cc_upper_bound, control_output_gibbs, gpo_dilation, induced_coherent_control, induced_switch,
    p_t_identity, rt_cc_analytic, rt_switch_analytic, switch_upper_bound, ControlQubitSpec,
};
use crate::thermo::{channel_on_purification, mutual_info_at_tfd, thermofield_double, ThermalState};

/// Version tag written into serialized reports.
pub const REPORT_SCHEMA: &str = "athermal-report/1";

/// Inclusive grid `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 || !start.is_finite() || !stop.is_finite() || (count == 1 && start != stop) {
            return Err(Error::Parse(format!("invalid grid {start}:{stop}:{count}")));
        }
        Ok(Self { start, stop, count })
    }

    /// The unit interval sampled at `count` points.
    pub fn unit(count: usize) -> Self {
        Self { start: 0.0, stop: 1.0, count }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("grid '{s}' is not start:stop:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Grid::new(start, stop, count)
    }
}

/// Solver settings and an optional uniform tolerance that replaces every per-check tolerance.
#[derive(Clone, Debug, Default)]
pub struct VerifyConfig {
    pub sdp: SdpOptions,
    pub tol: Option<f64>,
}

/// Signed slacks of one trial.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub label: String,
    pub slacks: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    fn new(index: usize, label: impl Into<String>) -> Self {
        Self {
            index,
            label: label.into(),
            slacks: BTreeMap::new(),
            values: BTreeMap::new(),
            error: None,
        }
    }

    fn slack(&mut self, check: &str, slack: f64) {
        let s = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        let e = self.slacks.entry(check.to_string()).or_insert(f64::INFINITY);
        *e = e.min(s);
    }

    /// `lhs ≤ rhs`.
    fn le(&mut self, check: &str, lhs: f64, rhs: f64) {
        self.slack(check, rhs - lhs);
    }

    /// `a = b`.
    fn eq(&mut self, check: &str, a: f64, b: f64) {
        self.slack(check, -(a - b).abs());
    }

    fn value(&mut self, name: &str, v: f64) {
        self.values.insert(name.to_string(), v);
    }

    fn sdp(&mut self, sol: &SdpSolution) {
        self.slack("sdp_gap", -sol.gap);
        self.slack("sdp_lmi", sol.min_lmi_eig);
    }
}

/// Aggregate of one named check across trials.
#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub tolerance: f64,
    pub trials: usize,
    pub min_slack: f64,
    pub max_violation: f64,
    pub worst_trial: Option<usize>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub schema: &'static str,
    pub id: String,
    pub trials: usize,
    pub seed: u64,
    pub max_violation: f64,
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
    pub notes: BTreeMap<String, f64>,
    pub flags: Vec<String>,
    pub details: Vec<TrialRecord>,
}

impl TheoremReport {
    pub fn failing_checks(&self) -> Vec<&CheckSummary> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<18} {} trials={} max_violation={:.3e}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.trials,
            self.max_violation
        )?;
        for c in self.failing_checks() {
            write!(f, " [{}: {:.3e} > {:.1e}]", c.name, c.max_violation, c.tolerance)?;
        }
        Ok(())
    }
}

/// Generator for trial `index` of sample family `family`: one ChaCha stream per pair.
pub fn trial_rng(seed: u64, family: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((family << 32) | index as u64);
    rng
}

fn run_family<F>(seed: u64, family: u64, n: usize, offset: usize, f: F) -> Vec<TrialRecord>
where
    F: Fn(&mut TrialRecord, &mut ChaCha8Rng) -> Result<()> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rec = TrialRecord::new(offset + i, "");
            let mut rng = trial_rng(seed, family, i);
            if let Err(e) = f(&mut rec, &mut rng) {
                rec.error = Some(e.to_string());
            }
            rec
        })
        .collect()
}

fn single<F>(index: usize, label: &str, f: F) -> TrialRecord
where
    F: FnOnce(&mut TrialRecord) -> Result<()>,
{
    let mut rec = TrialRecord::new(index, label);
    if let Err(e) = f(&mut rec) {
        rec.error = Some(e.to_string());
    }
    rec
}

struct Builder {
    id: &'static str,
    seed: u64,
    tolerances: Vec<(&'static str, f64)>,
    records: Vec<TrialRecord>,
    notes: BTreeMap<String, f64>,
    flags: Vec<String>,
}

impl Builder {
    fn new(id: &'static str, seed: u64, tolerances: &[(&'static str, f64)]) -> Self {
        Self {
            id,
            seed,
            tolerances: tolerances.to_vec(),
            records: Vec::new(),
            notes: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    fn push(&mut self, rec: TrialRecord) {
        self.records.push(rec);
    }

    fn extend(&mut self, recs: Vec<TrialRecord>) {
        self.records.extend(recs);
    }

    fn finish(mut self, cfg: &VerifyConfig) -> TheoremReport {
        self.records.sort_by_key(|r| r.index);
        let mut checks = Vec::new();
        let mut names: Vec<&str> = self.tolerances.iter().map(|(n, _)| *n).collect();
        for rec in &self.records {
            for k in rec.slacks.keys() {
                if !names.contains(&k.as_str()) {
                    names.push(k.as_str());
                }
            }
        }
        for name in names {
            let default_tol = self
                .tolerances
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, t)| *t)
                .unwrap_or(1e-6);
            let tolerance = cfg.tol.unwrap_or(default_tol);
            let mut min_slack = f64::INFINITY;
            let mut worst = None;
            let mut count = 0;
            for rec in &self.records {
                if let Some(&s) = rec.slacks.get(name) {
                    count += 1;
                    if s < min_slack || worst.is_none() {
                        min_slack = s.min(min_slack);
                        worst = Some(rec.index);
                    }
                }
            }
            if count == 0 {
                continue;
            }
            let max_violation = (-min_slack).max(0.0);
            checks.push(CheckSummary {
                name: name.to_string(),
                tolerance,
                trials: count,
                min_slack,
                max_violation,
                worst_trial: worst,
                passed: max_violation <= tolerance,
            });
        }
        let errors: Vec<usize> = self.records.iter().filter(|r| r.error.is_some()).map(|r| r.index).collect();
        checks.push(CheckSummary {
            name: "evaluation".to_string(),
            tolerance: 0.0,
            trials: self.records.len(),
            min_slack: if errors.is_empty() { 0.0 } else { f64::NEG_INFINITY },
            max_violation: if errors.is_empty() { 0.0 } else { f64::INFINITY },
            worst_trial: errors.first().copied(),
            passed: errors.is_empty(),
        });
        let max_violation = checks.iter().map(|c| c.max_violation).fold(0.0, f64::max);
        let passed = checks.iter().all(|c| c.passed);
        TheoremReport {
            schema: REPORT_SCHEMA,
            id: self.id.to_string(),
            trials: self.records.len(),
            seed: self.seed,
            max_violation,
            passed,
            checks,
            notes: self.notes,
            flags: self.flags,
            details: self.records,
        }
    }
}

fn g75() -> ThermalState<f64> {
    ThermalState::from_f64(&[0.75, 0.25]).expect("valid populations")
}

fn g532() -> ThermalState<f64> {
    ThermalState::from_f64(&[0.5, 0.3, 0.2]).expect("valid populations")
}

/// Qubit `diag(0.75, 0.25)` for even trials, qutrit `diag(0.5, 0.3, 0.2)` for odd ones.
fn alternating_gibbs(i: usize) -> ThermalState<f64> {
    if i.is_multiple_of(2) {
        g75()
    } else {
        g532()
    }
}

fn signalling(ch: &QuantumChannel<f64>, rec: &mut TrialRecord, cfg: &VerifyConfig) -> Result<f64> {
    let sol = solve(&build_rs(ch)?, &cfg.sdp)?;
    rec.sdp(&sol);
    Ok(sol.primal_value - 1.0)
}

/// `R_T(Λ)` from its SDP against the closed form `R_T(Λ(γ))`.
pub fn verify_thm1(n_trials: usize, seed: u64, cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "thm1",
        seed,
        &[("sdp_vs_closed_form", 1e-6), ("sdp_gap", 1e-7), ("sdp_lmi", 1e-8)],
    );
    b.extend(run_family(seed, 1, n_trials, 0, |rec, rng| {
        let (d, g) = if rec.index < n_trials / 2 { (2, g75()) } else { (3, g532()) };
        rec.label = format!("flat d={d}");
        let ch = random_channel_flat::<f64, _>(d, d, rng);
        let sol = solve(&build_rt_channel(&ch, &g, &g)?, &cfg.sdp)?;
        rec.sdp(&sol);
        let closed = r_t_channel(&ch, &g, &g)?;
        rec.value("r_t", closed);
        rec.eq("sdp_vs_closed_form", sol.primal_value - 1.0, closed);
        Ok(())
    }));
    b.push(single(n_trials, "thermalising", |rec| {
        let g = g75();
        let ch = make_gamma(&g, 2);
        let sol = solve(&build_rt_channel(&ch, &g, &g)?, &cfg.sdp)?;
        rec.sdp(&sol);
        rec.eq("sdp_vs_closed_form", sol.primal_value - 1.0, r_t_channel(&ch, &g, &g)?);
        rec.eq("thermalising_zero", sol.primal_value - 1.0, 0.0);
        Ok(())
    }));
    b.finish(cfg)
}

/// `R(Λ‖Γ) = R_T[(I⊗Λ)(τ)]` for the thermofield double and random purifications, the cap
/// `Tr γ⁻¹ − 1` with saturation by unitaries, and the local no-go.
pub fn verify_thm2_thm3(n_trials: usize, seed: u64, cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "thm2-3",
        seed,
        &[
            ("tfd_equality", 1e-8),
            ("purification_equality", 1e-8),
            ("joint_cap", 1e-7),
            ("no_go", 1e-7),
            ("unitary_saturation", 1e-7),
            ("unitary_signalling", 1e-6),
            ("most_energetic", 1e-9),
            ("sdp_gap", 1e-7),
            ("sdp_lmi", 1e-8),
        ],
    );
    b.extend(run_family(seed, 1, n_trials, 0, |rec, rng| {
        let g = alternating_gibbs(rec.index);
        let d = g.dim();
        rec.label = format!("flat d={d}");
        let ch = random_channel_flat::<f64, _>(d, d, rng);
        let r = r_joint(&ch, &g)?;
        let joint = g.tensor(&g);
        rec.value("r_joint", r);
        rec.eq("tfd_equality", r, r_t_state(&channel_on_purification(&ch, &g, None)?, &joint)?);
        for _ in 0..5 {
            let u = random_unitary::<f64, _>(d, rng);
            let out = channel_on_purification(&ch, &g, Some(&u))?;
            rec.eq("purification_equality", r, r_t_state(&out, &joint)?);
        }
        let cap = g.trace_inverse() - 1.0;
        rec.le("joint_cap", r, cap);
        rec.le("no_go", r, r_t_state(&thermofield_double(&g), &joint)?);
        Ok(())
    }));
    let n_unitaries = 100;
    b.extend(run_family(seed, 2, n_unitaries, n_trials, |rec, rng| {
        let g = if rec.index - n_trials < n_unitaries / 2 { ThermalState::uniform(2) } else { g75() };
        rec.label = "haar unitary".into();
        let ch = make_unitary(&random_unitary::<f64, _>(2, rng))?;
        let r = r_joint(&ch, &g)?;
        rec.eq("unitary_saturation", r, g.trace_inverse() - 1.0);
        let rs = signalling(&ch, rec, cfg)?;
        rec.eq("unitary_signalling", rs, 3.0);
        Ok(())
    }));
    let base = n_trials + n_unitaries;
    b.push(single(base, "identity", |rec| {
        let g = ThermalState::uniform(2);
        let ch = make_identity::<f64>(2);
        let r = r_joint(&ch, &g)?;
        rec.eq("unitary_saturation", r, 3.0);
        rec.eq("tfd_equality", r, r_t_state(&channel_on_purification(&ch, &g, None)?, &g.tensor(&g))?);
        Ok(())
    }));
    b.push(single(base + 1, "most energetic", |rec| {
        let g = g75();
        let ch = make_replace(&CMatrix::basis_projector(2, 1), 2)?;
        rec.eq("most_energetic", r_t_channel(&ch, &g, &g)?, 3.0);
        Ok(())
    }));
    b.finish(cfg)
}

/// `R ≥ R_S ≥ 2(g_min^{AB})²(R − R_T)²` on random channels and
/// `P_T ≥ R_S ≥ 2(g_min^{AB})²P_T²` on projected GPOs.
pub fn verify_thm4(n_trials: usize, seed: u64, cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "thm4",
        seed,
        &[
            ("upper", 1e-6),
            ("lower", 1e-6),
            ("gpo_upper", 1e-6),
            ("gpo_lower", 1e-6),
            ("gpo_athermality", 1e-9),
            ("thermalising_signalling", 1e-7),
            ("sdp_gap", 1e-7),
            ("sdp_lmi", 1e-8),
        ],
    );
    let g = g75();
    let gab = g_min_ab(&g, &g);
    b.extend(run_family(seed, 1, n_trials, 0, |rec, rng| {
        rec.label = "flat qubit".into();
        let ch = random_channel_flat::<f64, _>(2, 2, rng);
        let rt = r_t_channel(&ch, &g, &g)?;
        let r = r_joint(&ch, &g)?;
        let rs = signalling(&ch, rec, cfg)?;
        let s = thm4_slacks(rt, rs, r, gab);
        rec.value("r_t", rt);
        rec.value("r_s", rs);
        rec.value("r_joint", r);
        rec.slack("upper", s.upper);
        rec.slack("lower", s.lower);
        Ok(())
    }));
    let n_gpo = 100;
    b.extend(run_family(seed, 2, n_gpo, n_trials, |rec, rng| {
        rec.label = "projected gpo".into();
        let gpo = random_gpo::<f64, _>(&g, &g, rng)?;
        let pt = p_t(&gpo, &g, &g)?;
        let rs = signalling(&gpo, rec, cfg)?;
        rec.le("gpo_upper", rs, pt);
        rec.le("gpo_lower", 2.0 * gab * gab * pt * pt, rs);
        rec.eq("gpo_athermality", r_t_channel(&gpo, &g, &g)?, 0.0);
        Ok(())
    }));
    b.push(single(n_trials + n_gpo, "thermalising", |rec| {
        let rs = signalling(&make_gamma(&g, 2), rec, cfg)?;
        rec.eq("thermalising_signalling", rs, 0.0);
        Ok(())
    }));
    b.finish(cfg)
}

/// Two-level GPO dilation: exact simulation, Gibbs preservation, `R_T(ρ_C) = R_T(Λ)` and
/// `R ≤ P_T(G̃) ≤ max{1/R_T, R}` with equality whenever `R_T·R ≥ 1`.
pub fn verify_thm5(n_trials: usize, seed: u64, cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "thm5",
        seed,
        &[
            ("simulation", 1e-10),
            ("gibbs_preserving", 1e-10),
            ("resource_state", 1e-8),
            ("bracket_lower", 1e-6),
            ("bracket_upper", 1e-6),
            ("equality", 1e-5),
        ],
    );
    let recs = run_family(seed, 1, n_trials, 0, |rec, rng| {
        let g = alternating_gibbs(rec.index);
        let d = g.dim();
        rec.label = format!("flat d={d}");
        let ch = random_channel_flat::<f64, _>(d, d, rng);
        let dil = gpo_dilation(&ch, &g, &g)?;
        let joint_in = dil.joint_gibbs_in(&g);
        rec.slack("simulation", -dil.simulated()?.choi_distance(&ch));
        let (_, residual) = is_gibbs_preserving(&dil.g_tilde, &joint_in, &g)?;
        rec.slack("gibbs_preserving", -residual);
        rec.eq("resource_state", r_t_state(&dil.rho_c, &dil.gamma_c)?, dil.r_t);
        let pt = p_t(&dil.g_tilde, &joint_in, &g)?;
        let r = r_joint(&ch, &g)?;
        rec.value("r_t", dil.r_t);
        rec.value("r_joint", r);
        rec.value("p_t", pt);
        rec.le("bracket_lower", r, pt);
        rec.le("bracket_upper", pt, (1.0 / dil.r_t).max(r));
        if dil.r_t * r >= 1.0 {
            rec.eq("equality", r, pt);
        }
        Ok(())
    });
    let regime: Vec<&TrialRecord> = recs
        .iter()
        .filter(|r| r.values.get("r_t").zip(r.values.get("r_joint")).is_some_and(|(a, b)| a * b >= 1.0))
        .collect();
    let others: Vec<&TrialRecord> = recs
        .iter()
        .filter(|r| r.values.get("r_t").zip(r.values.get("r_joint")).is_some_and(|(a, b)| a * b < 1.0))
        .collect();
    let equal_elsewhere = others
        .iter()
        .filter(|r| (r.values["r_joint"] - r.values["p_t"]).abs() <= 1e-5)
        .count();
    b.notes.insert("rt_r_ge_1_count".into(), regime.len() as f64);
    b.notes.insert("rt_r_lt_1_count".into(), others.len() as f64);
    b.notes.insert(
        "rt_r_lt_1_equality_fraction".into(),
        if others.is_empty() { f64::NAN } else { equal_elsewhere as f64 / others.len() as f64 },
    );
    b.flags
        .push("equality P_T(G) = R for R_T*R < 1 is recorded, not asserted".into());
    b.extend(recs);
    b.finish(cfg)
}

fn switch_channel(alpha: f64, phi: f64, s: f64, g: &ThermalState<f64>) -> Result<QuantumChannel<f64>> {
    induced_switch(&make_signalling_gpo(g, s)?, &ControlQubitSpec::pure(alpha, phi)?)
}

fn cc_channel(alpha: f64, phi: f64, s: f64, g: &ThermalState<f64>) -> Result<QuantumChannel<f64>> {
    induced_coherent_control(&make_signalling_gpo(g, s)?, &ControlQubitSpec::pure(alpha, phi)?)
}

fn is_edge(x: f64) -> bool {
    x == 0.0 || x == 1.0
}

/// Quantum-switch grid over `(α, s)` at `γ = 1/2`, pure control.
pub fn verify_thm6(grid: &Grid, cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "thm6",
        0,
        &[
            ("rt_formula", 1e-6),
            ("upper_bound", 1e-6),
            ("sandwich_upper", 1e-6),
            ("sandwich_lower", 1e-6),
            ("upper_tight", 1e-6),
            ("joint_at_s1", 1e-8),
            ("phi_invariance", 1e-8),
            ("sdp_gap", 1e-7),
            ("sdp_lmi", 1e-8),
        ],
    );
    let g = ThermalState::<f64>::uniform(2);
    let gout = control_output_gibbs(&g);
    let gab = g_min_ab(&g, &gout);
    let pts = grid.points();
    let cells: Vec<(f64, f64)> = pts.iter().flat_map(|&a| pts.iter().map(move |&s| (a, s))).collect();
    let recs: Vec<TrialRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(alpha, s))| {
            single(i, &format!("alpha={alpha} s={s}"), |rec| {
                let mut measured = Vec::new();
                for phi in [0.0, PI / 3.0, PI] {
                    let ch = switch_channel(alpha, phi, s, &g)?;
                    let rt = r_t_channel(&ch, &g, &gout)?;
                    let r = r_joint(&ch, &gout)?;
                    let rs = signalling(&ch, rec, cfg)?;
                    measured.push((rt, r, rs));
                }
                let (rt, r, rs) = measured[0];
                for m in &measured[1..] {
                    rec.eq("phi_invariance", m.0, rt);
                    rec.eq("phi_invariance", m.1, r);
                    rec.eq("phi_invariance", m.2, rs);
                }
                let ctrl = ControlQubitSpec::pure(alpha, 0.0)?;
                let ub = switch_upper_bound(&ctrl, s, &g);
                rec.value("r_t", rt);
                rec.value("r_s", rs);
                rec.value("r_joint", r);
                rec.eq("rt_formula", rt, rt_switch_analytic(&ctrl, s, g.g_max())?);
                rec.le("upper_bound", r, ub);
                let t = thm4_slacks(rt, rs, r, gab);
                rec.slack("sandwich_upper", t.upper);
                rec.slack("sandwich_lower", t.lower);
                if is_edge(alpha) || is_edge(s) {
                    rec.eq("upper_tight", r, ub);
                }
                if s == 1.0 {
                    rec.eq("joint_at_s1", r, 1.0);
                }
                Ok(())
            })
        })
        .collect();
    b.extend(recs);
    b.finish(cfg)
}

/// Coherent control of `G = sΓ + (1−s)I` for `d ∈ {2, 3}` at `γ = 1/d`.
pub fn verify_cc(grid: &Grid, cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "cc",
        0,
        &[
            ("rt_formula", 1e-6),
            ("rt_edges", 1e-6),
            ("upper_bound_chi", 1e-6),
            ("upper_tight", 1e-6),
            ("sandwich_upper", 1e-6),
            ("sandwich_lower", 1e-6),
            ("sdp_gap", 1e-7),
            ("sdp_lmi", 1e-8),
        ],
    );
    let pts = grid.points();
    let mut cells = Vec::new();
    for d in [2usize, 3] {
        for &a in &pts {
            for &s in &pts {
                cells.push((d, a, s));
            }
        }
    }
    let recs: Vec<TrialRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(d, alpha, s))| {
            single(i, &format!("d={d} alpha={alpha} s={s}"), |rec| {
                let g = ThermalState::<f64>::uniform(d);
                let gout = control_output_gibbs(&g);
                let ch = cc_channel(alpha, 0.0, s, &g)?;
                let rt = r_t_channel(&ch, &g, &gout)?;
                let r = r_joint(&ch, &gout)?;
                let rs = signalling(&ch, rec, cfg)?;
                rec.value("r_t", rt);
                rec.value("r_s", rs);
                rec.value("r_joint", r);
                if s == 1.0 {
                    rec.eq("rt_formula", rt, rt_cc_analytic(alpha, d)?);
                    if is_edge(alpha) {
                        rec.eq("rt_edges", rt, 1.0);
                    }
                }
                let ub = cc_upper_bound(&ControlQubitSpec::pure(alpha, 0.0)?, s, &g)?;
                rec.le("upper_bound_chi", r, ub);
                if is_edge(s) {
                    rec.eq("upper_tight", r, ub);
                }
                let t = thm4_slacks(rt, rs, r, g_min_ab(&g, &gout));
                rec.slack("sandwich_upper", t.upper);
                rec.slack("sandwich_lower", t.lower);
                Ok(())
            })
        })
        .collect();
    b.extend(recs);
    b.flags.push(
        "upper_bound_chi evaluates R_T of the Hermitian operator chi through the lambda_max extension".into(),
    );
    b.finish(cfg)
}

/// `2(g_min^{AB})²(R − R_T)² ≤ I(A:B)_{TFD} ≤ ln(1 + R_S) ≤ R_S`.
pub fn verify_mutual_info(n_trials: usize, seed: u64, cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "mutual-info",
        seed,
        &[
            ("lower", 1e-6),
            ("log_upper", 1e-6),
            ("linear_upper", 1e-6),
            ("thermalising_zero", 1e-7),
            ("identity_tight", 1e-6),
            ("sdp_gap", 1e-7),
            ("sdp_lmi", 1e-8),
        ],
    );
    let g = g75();
    let gab = g_min_ab(&g, &g);
    let chain = |ch: &QuantumChannel<f64>, g: &ThermalState<f64>, gab: f64, rec: &mut TrialRecord| -> Result<(f64, f64)> {
        let rt = r_t_channel(ch, g, g)?;
        let r = r_joint(ch, g)?;
        let rs = signalling(ch, rec, cfg)?;
        let info = mutual_info_at_tfd(ch, g)?;
        rec.value("mutual_info", info);
        rec.value("r_s", rs);
        rec.le("lower", 2.0 * gab * gab * (r - rt).powi(2), info);
        rec.le("log_upper", info, rs.max(0.0).ln_1p());
        rec.le("linear_upper", rs.max(0.0).ln_1p(), rs.max(0.0));
        Ok((info, rs))
    };
    b.extend(run_family(seed, 1, n_trials, 0, |rec, rng| {
        rec.label = "flat qubit".into();
        let ch = random_channel_flat::<f64, _>(2, 2, rng);
        chain(&ch, &g, gab, rec).map(|_| ())
    }));
    b.push(single(n_trials, "thermalising", |rec| {
        let (info, rs) = chain(&make_gamma(&g, 2), &g, gab, rec)?;
        rec.eq("thermalising_zero", info, 0.0);
        rec.eq("thermalising_zero", rs, 0.0);
        Ok(())
    }));
    b.push(single(n_trials + 1, "identity", |rec| {
        let u = ThermalState::uniform(2);
        let (info, rs) = chain(&make_identity(2), &u, g_min_ab(&u, &u), rec)?;
        rec.eq("identity_tight", info, 4f64.ln());
        rec.eq("identity_tight", rs.ln_1p(), 4f64.ln());
        Ok(())
    }));
    b.finish(cfg)
}

/// Entanglement-breaking qutrit channel at `γ = 1/3` whose joint and output athermality coincide.
pub fn zero_transmission_channel() -> Result<QuantumChannel<f64>> {
    let states = [
        [0.5, 0.25, 0.25],
        [0.5, 0.3, 0.2],
        [0.5, 0.2, 0.3],
    ];
    let prepared: Vec<CMatrix<f64>> = states.iter().map(|p| CMatrix::from_real_diag(p)).collect();
    make_measure_prepare(&prepared)
}

pub fn verify_zero_transmission(cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "zero-transmission",
        0,
        &[
            ("joint_norm", 1e-9),
            ("output_norm", 1e-9),
            ("transmission", 1e-9),
            ("signalling", 0.0),
            ("sdp_gap", 1e-7),
            ("sdp_lmi", 1e-8),
        ],
    );
    b.push(single(0, "measure-prepare d=3", |rec| {
        let g = ThermalState::<f64>::uniform(3);
        let ch = zero_transmission_channel()?;
        let r = r_joint(&ch, &g)?;
        let rt = r_t_channel(&ch, &g, &g)?;
        rec.eq("joint_norm", 1.0 + r, 1.5);
        rec.eq("output_norm", 1.0 + rt, 1.5);
        rec.eq("transmission", r, rt);
        let rs = signalling(&ch, rec, cfg)?;
        rec.value("r_s", rs);
        rec.le("signalling", 0.01, rs);
        Ok(())
    }));
    b.finish(cfg)
}

/// Faithfulness, GPO monotonicity, convexity, multiplicity, continuity, the most-athermal
/// cap, rank-one dual witnesses and `P_T(sΓ + (1−s)I) = (1−s)P_T(I)`.
pub fn verify_properties(n_trials: usize, seed: u64, cfg: &VerifyConfig) -> TheoremReport {
    let mut b = Builder::new(
        "properties",
        seed,
        &[
            ("faithful_gibbs", 1e-12),
            ("faithful_lower", 1e-9),
            ("monotone_state", 1e-8),
            ("monotone_joint", 1e-8),
            ("convexity", 1e-7),
            ("multiplicity", 1e-8),
            ("continuity", 1e-9),
            ("cap", 1e-9),
            ("cap_attained", 1e-9),
            ("witness_rank_one", 1e-9),
            ("witness_psd", 1e-9),
            ("witness_normalised", 1e-9),
            ("witness_value", 1e-9),
            ("preservability_lemma", 1e-8),
        ],
    );
    let n = n_trials;
    let mut offset = 0;
    // faithfulness and convexity
    b.extend(run_family(seed, 1, n, offset, |rec, rng| {
        let g = alternating_gibbs(rec.index);
        let d = g.dim();
        rec.label = format!("states d={d}");
        rec.eq("faithful_gibbs", r_t_state(&g.matrix(), &g)?, 0.0);
        let rho = random_density::<f64, _>(d, rng);
        let sigma = random_density::<f64, _>(d, rng);
        let rt_rho = r_t_state(&rho, &g)?;
        rec.le("faithful_lower", 0.5 * trace_norm(&(&rho - &g.matrix())), rt_rho);
        let p = 0.37;
        let mix = rho.scale(p) + sigma.scale(1.0 - p);
        rec.le("convexity", r_t_state(&mix, &g)?, p * rt_rho + (1.0 - p) * r_t_state(&sigma, &g)?);
        Ok(())
    }));
    offset += n;
    // monotonicity under projected GPOs
    let n_gpo = 100;
    b.extend(run_family(seed, 2, n_gpo, offset, |rec, rng| {
        let g = alternating_gibbs(rec.index);
        let d = g.dim();
        rec.label = format!("gpo d={d}");
        let gpo = random_gpo::<f64, _>(&g, &g, rng)?;
        let (_, residual) = is_gibbs_preserving(&gpo, &g, &g)?;
        let budget = residual / g.g_min();
        let rho = random_density::<f64, _>(d, rng);
        rec.le("monotone_state", r_t_state(&gpo.apply(&rho)?, &g)?, r_t_state(&rho, &g)? + budget);
        let ch = random_channel_flat::<f64, _>(d, d, rng);
        rec.le("monotone_joint", r_joint(&compose(&gpo, &ch)?, &g)?, r_joint(&ch, &g)? + budget);
        Ok(())
    }));
    offset += n_gpo;
    // multiplicity on qubit ⊗ qutrit pairs
    b.extend(run_family(seed, 3, n, offset, |rec, rng| {
        rec.label = "product".into();
        let (ga, gb) = (g75(), g532());
        let rho = random_density::<f64, _>(2, rng);
        let sigma = random_density::<f64, _>(3, rng);
        let lhs = 1.0 + r_t_state(&kron(&rho, &sigma), &ga.tensor(&gb))?;
        let rhs = (1.0 + r_t_state(&rho, &ga)?) * (1.0 + r_t_state(&sigma, &gb)?);
        rec.eq("multiplicity", lhs, rhs);
        Ok(())
    }));
    offset += n;
    // continuity
    let n_cont = 5 * n;
    b.extend(run_family(seed, 4, n_cont, offset, |rec, rng| {
        let g = alternating_gibbs(rec.index);
        rec.label = "continuity".into();
        let rho = random_density::<f64, _>(g.dim(), rng);
        let sigma = random_density::<f64, _>(g.dim(), rng);
        let (lhs, rhs) = continuity_gap(&rho, &sigma, &g)?;
        rec.le("continuity", lhs, rhs);
        Ok(())
    }));
    offset += n_cont;
    // most-athermal cap over random pure states
    let n_cap = 25 * n;
    b.extend(run_family(seed, 5, n_cap, offset, |rec, rng| {
        let g = alternating_gibbs(rec.index);
        rec.label = "pure".into();
        let psi = random_pure::<f64, _>(g.dim(), rng);
        rec.le("cap", r_t_state(&psi, &g)?, 1.0 / g.g_min() - 1.0);
        Ok(())
    }));
    offset += n_cap;
    for (k, g) in [g75(), g532()].into_iter().enumerate() {
        b.push(single(offset + k, "most athermal", |rec| {
            let m = most_athermal(&g);
            rec.eq("cap_attained", r_t_state(&m.state, &g)?, m.value);
            Ok(())
        }));
    }
    offset += 2;
    // dual witnesses
    b.extend(run_family(seed, 6, n, offset, |rec, rng| {
        let g = alternating_gibbs(rec.index);
        rec.label = "witness".into();
        let rho = random_density::<f64, _>(g.dim(), rng);
        let w = r_t_state_dual(&rho, &g)?;
        let ev = eigvals_hermitian(&w.witness)?;
        let top = lambda_max(&w.witness)?;
        let second = ev[ev.len() - 2].abs();
        rec.le("witness_rank_one", second, 1e-9 * top.max(1.0));
        rec.le("witness_psd", -ev[0], 0.0);
        rec.eq("witness_normalised", w.witness.trace_product(&g.matrix()).re, 1.0);
        rec.eq("witness_value", w.value, 1.0 + r_t_state(&rho, &g)?);
        Ok(())
    }));
    offset += n;
    let qs = [0.0, 0.25, 0.5, 0.75, 1.0];
    for (k, &q) in qs.iter().enumerate() {
        b.push(single(offset + k, &format!("lemma q={q}"), |rec| {
            for g in [g75(), g532(), ThermalState::uniform(2)] {
                let gpo = make_signalling_gpo(&g, q)?;
                rec.eq("preservability_lemma", p_t(&gpo, &g, &g)?, (1.0 - q) * p_t_identity(&g));
            }
            Ok(())
        }));
    }
    b.finish(cfg)
}

/// Measures of one flat-measure random channel.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub r_t: f64,
    pub r_s: f64,
    pub r_joint: f64,
}

impl SampleRow {
    pub fn rt_r_ge_1(&self) -> bool {
        self.r_t * self.r_joint >= 1.0
    }
}

const SAMPLE_FAMILY: u64 = 100;

/// `n` random square channels of dimension `gamma.dim()`, channel `i` drawn from
/// `trial_rng(seed, SAMPLE_FAMILY, i)`.
pub fn sample_flat(n: usize, seed: u64, gamma: &ThermalState<f64>, opts: &SdpOptions) -> Result<Vec<SampleRow>> {
    let d = gamma.dim();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let ch = random_channel_flat::<f64, _>(d, d, &mut trial_rng(seed, SAMPLE_FAMILY, i));
            let sol = solve(&build_rs(&ch)?, opts)?;
            Ok(SampleRow {
                index: i,
                r_t: r_t_channel(&ch, gamma, gamma)?,
                r_s: sol.primal_value - 1.0,
                r_joint: r_joint(&ch, gamma)?,
            })
        })
        .collect()
}

/// Named suite selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Thm1,
    Thm2Thm3,
    Thm4,
    Thm5,
    Thm6,
    Cc,
    MutualInfo,
    Properties,
    ZeroTransmission,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 10] = [
        "thm1",
        "thm2-3",
        "thm4",
        "thm5",
        "thm6",
        "cc",
        "mutual-info",
        "properties",
        "zero-transmission",
        "all",
    ];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Thm1,
                Suite::Thm2Thm3,
                Suite::Thm4,
                Suite::Thm5,
                Suite::Thm6,
                Suite::Cc,
                Suite::MutualInfo,
                Suite::Properties,
                Suite::ZeroTransmission,
            ],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "thm1" => Suite::Thm1,
            "thm2-3" => Suite::Thm2Thm3,
            "thm4" => Suite::Thm4,
            "thm5" => Suite::Thm5,
            "thm6" => Suite::Thm6,
            "cc" => Suite::Cc,
            "mutual-info" => Suite::MutualInfo,
            "properties" => Suite::Properties,
            "zero-transmission" => Suite::ZeroTransmission,
            "all" => Suite::All,
            other => {
                return Err(Error::Parse(format!(
                    "unknown suite '{other}', expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Runs a suite with its standard trial counts.
pub fn run_suite(suite: Suite, seed: u64, cfg: &VerifyConfig) -> Vec<TheoremReport> {
    let grid = Grid::unit(11);
    suite
        .members()
        .into_iter()
        .map(|s| match s {
            Suite::Thm1 => verify_thm1(200, seed, cfg),
            Suite::Thm2Thm3 => verify_thm2_thm3(200, seed, cfg),
            Suite::Thm4 => verify_thm4(1000, seed, cfg),
            Suite::Thm5 => verify_thm5(200, seed, cfg),
            Suite::Thm6 => verify_thm6(&grid, cfg),
            Suite::Cc => verify_cc(&grid, cfg),
            Suite::MutualInfo => verify_mutual_info(500, seed, cfg),
            Suite::Properties => verify_properties(200, seed, cfg),
            Suite::ZeroTransmission => verify_zero_transmission(cfg),
            Suite::All => unreachable!("expanded by members"),
        })
        .collect()
}
