use std::f64::consts::PI;

use athermal::channels::*;
use athermal::measures::{p_t, r_joint, r_signalling, r_t_channel, r_t_state};
use athermal::qmat::kron;
use athermal::superops::*;
use athermal::{CMat, Channel, ControlQubitSpec, SdpOptions, Thermal};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn mix(parts: &[(f64, &Channel)]) -> CMat {
    let n = parts[0].1.choi().rows();
    parts.iter().fold(CMat::zeros(n, n), |acc, (w, ch)| &acc + &ch.choi().scale(*w))
}

#[test]
fn switch_examples() {
    let u = Thermal::uniform(2);
    let id2 = make_identity::<f64>(2);
    assert!(switch(&id2).unwrap().choi_distance(&make_identity(4)) < 1e-12);

    let g = Thermal::from_f64(&[0.75, 0.25]).unwrap();
    let s = 0.35;
    let sg = switch(&make_signalling_gpo(&g, s).unwrap()).unwrap();
    let gamma = make_gamma(&g, 2);
    let sw_gamma = switch(&gamma).unwrap();
    let ic_gamma = tensor(&make_identity(2), &gamma);
    let ic_id = make_identity(4);
    let expect = mix(&[(s * s, &sw_gamma), (2.0 * s * (1.0 - s), &ic_gamma), ((1.0 - s) * (1.0 - s), &ic_id)]);
    assert!(sg.choi().max_abs_diff(&expect) <= 1e-9);

    let gc = u.tensor(&u);
    let (ok, res) = is_gibbs_preserving(&switch(&make_gamma(&u, 2)).unwrap(), &gc, &gc).unwrap();
    assert!(ok && res <= 1e-12);
    assert!(switch(&random_channel_flat::<f64, _>(2, 3, &mut rng(1))).is_err());
}

#[test]
fn induced_switch_examples() {
    let u = Thermal::uniform(2);
    let gout = control_output_gibbs(&u);
    let s = 0.6;
    let ctrl = ControlQubitSpec::pure(0.0, 0.0).unwrap();
    let ls = induced_switch(&make_signalling_gpo(&u, s).unwrap(), &ctrl).unwrap();
    let q = (1.0 - s) * (1.0 - s);
    let inner = Channel::from_choi(2, 2, mix(&[(1.0 - q, &make_gamma(&u, 2)), (q, &make_identity(2))])).unwrap();
    let expect = make_replace(&ctrl.rho_c(), 1).unwrap();
    let expect = tensor(&expect, &inner);
    assert!(ls.choi().max_abs_diff(expect.choi()) <= 1e-9);
    assert_eq!((ls.d_in(), ls.d_out()), (2, 4));

    for alpha in [0.0, 0.2, 0.5, 0.9, 1.0] {
        let c = ControlQubitSpec::pure(alpha, 0.3).unwrap();
        let ls = induced_switch(&make_gamma(&u, 2), &c).unwrap();
        assert!(close(r_joint(&ls, &gout).unwrap(), 1.0, 1e-12));
    }
    let half = ControlQubitSpec::pure(0.5, 0.0).unwrap();
    let ls = induced_switch(&make_gamma(&u, 2), &half).unwrap();
    assert!(close(r_t_channel(&ls, &u, &gout).unwrap(), 0.25, 1e-12));
}

#[test]
fn control_spec_validation() {
    assert!(ControlQubitSpec::new(1.1, 0.0, 1.0).is_err());
    assert!(ControlQubitSpec::new(0.5, 7.0, 1.0).is_err());
    assert!(ControlQubitSpec::new(0.5, 0.0, -0.1).is_err());
    let c = ControlQubitSpec::new(0.3, 1.0, 0.7).unwrap();
    assert!(close(r_t_state(&c.rho_c(), &Thermal::uniform(2)).unwrap(), 0.7, 1e-12));
}

#[test]
fn rt_switch_analytic_examples() {
    for alpha in [0.0, 1.0] {
        let c = ControlQubitSpec::pure(alpha, 0.0).unwrap();
        assert!(close(rt_switch_analytic(&c, 0.7, 0.5).unwrap(), 1.0, 1e-15));
    }
    let c = ControlQubitSpec::pure(0.5, 0.0).unwrap();
    assert!(close(rt_switch_analytic(&c, 1.0, 0.5).unwrap(), 0.25, 1e-15));
    for (alpha, s) in [(0.1, 0.2), (0.5, 0.9), (0.7, 1.0)] {
        let thermal = ControlQubitSpec::new(alpha, 0.0, 0.0).unwrap();
        assert_eq!(rt_switch_analytic(&thermal, s, 0.5).unwrap(), 0.0);
    }
    assert!(rt_switch_analytic(&c, 1.5, 0.5).is_err());
}

#[test]
fn switch_upper_bound_examples() {
    let u = Thermal::uniform(2);
    let c = ControlQubitSpec::pure(0.3, 0.0).unwrap();
    assert!(close(switch_upper_bound(&c, 1.0, &u), 1.0, 1e-15));
    assert!(close(switch_upper_bound(&c, 0.0, &u), 7.0, 1e-15));
    let gout = control_output_gibbs(&u);
    for k in 0..=10 {
        for m in 0..=10 {
            let (alpha, s) = (k as f64 / 10.0, m as f64 / 10.0);
            let c = ControlQubitSpec::pure(alpha, 0.0).unwrap();
            let ls = induced_switch(&make_signalling_gpo(&u, s).unwrap(), &c).unwrap();
            let r = r_joint(&ls, &gout).unwrap();
            let ub = switch_upper_bound(&c, s, &u);
            assert!(ub - r >= -1e-7);
            if k % 10 == 0 || m % 10 == 0 {
                assert!(close(ub, r, 1e-6), "edge ({alpha}, {s}): {ub} vs {r}");
            }
        }
    }
}

#[test]
fn general_control_scaling() {
    let u = Thermal::uniform(2);
    let gout = control_output_gibbs(&u);
    for (alpha, s, r) in [(0.3, 0.4, 0.5), (0.8, 1.0, 0.25), (0.5, 0.0, 0.9)] {
        let c = ControlQubitSpec::new(alpha, 1.1, r).unwrap();
        let ls = induced_switch(&make_signalling_gpo(&u, s).unwrap(), &c).unwrap();
        assert!(close(r_t_channel(&ls, &u, &gout).unwrap(), rt_switch_analytic(&c, s, 0.5).unwrap(), 1e-10));
        assert!(r_joint(&ls, &gout).unwrap() <= switch_upper_bound(&c, s, &u) + 1e-9);
    }
}

#[test]
fn coherent_control_examples() {
    assert!(coherent_control(&make_identity::<f64>(2)).unwrap().choi_distance(&make_identity(4)) < 1e-12);
    let u = Thermal::uniform(2);
    let g = make_signalling_gpo(&u, 0.4).unwrap();
    assert_eq!(g.kraus().unwrap().len(), 5);
    let cc = coherent_control(&g).unwrap();
    let sum = cc.kraus_ops().unwrap().iter().fold(CMat::zeros(4, 4), |a, k| &a + &(&k.adjoint() * k));
    assert!(sum.max_abs_diff(&CMat::identity(4)) <= 1e-9);
    let c0 = ControlQubitSpec::pure(0.0, 0.0).unwrap();
    let lc = induced_coherent_control(&make_gamma(&u, 2), &c0).unwrap();
    assert!(close(r_t_channel(&lc, &u, &control_output_gibbs(&u)).unwrap(), 1.0, 1e-12));
    assert!(coherent_control(&random_channel_flat::<f64, _>(3, 2, &mut rng(2))).is_err());
}

#[test]
fn rt_cc_analytic_examples() {
    assert!(close(rt_cc_analytic(0.0, 2).unwrap(), 1.0, 1e-15));
    assert!(close(rt_cc_analytic(0.5, 2).unwrap(), 0.5, 1e-15));
    let vals: Vec<f64> = [2, 3, 4, 8].iter().map(|&d| rt_cc_analytic(0.5, d).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
    assert!(rt_cc_analytic(0.5, 1).is_err());
    assert!(rt_cc_analytic(-0.1, 2).is_err());
    for d in [2usize, 3] {
        let g = Thermal::uniform(d);
        for k in 0..=10 {
            let alpha = k as f64 / 10.0;
            let lc = induced_coherent_control(&make_gamma(&g, d), &ControlQubitSpec::pure(alpha, 0.0).unwrap()).unwrap();
            let rt = r_t_channel(&lc, &g, &control_output_gibbs(&g)).unwrap();
            assert!(close(rt, rt_cc_analytic(alpha, d).unwrap(), 1e-6));
        }
    }
}

#[test]
fn cc_upper_bound_requires_pure_control() {
    let u = Thermal::uniform(2);
    let mixed = ControlQubitSpec::new(0.5, 0.0, 0.5).unwrap();
    assert!(cc_upper_bound(&mixed, 0.5, &u).is_err());
    let pure = ControlQubitSpec::pure(0.5, 0.0).unwrap();
    let ub = cc_upper_bound(&pure, 0.5, &u).unwrap();
    let lc = induced_coherent_control(&make_signalling_gpo(&u, 0.5).unwrap(), &pure).unwrap();
    assert!(r_joint(&lc, &control_output_gibbs(&u)).unwrap() <= ub + 1e-9);
}

#[test]
fn phi_independence() {
    let u = Thermal::uniform(2);
    let gout = control_output_gibbs(&u);
    let opts = SdpOptions::default();
    let g = make_signalling_gpo(&u, 0.55).unwrap();
    let measure = |phi: f64| {
        let ls = induced_switch(&g, &ControlQubitSpec::pure(0.35, phi).unwrap()).unwrap();
        [
            r_t_channel(&ls, &u, &gout).unwrap(),
            r_joint(&ls, &gout).unwrap(),
            r_signalling(&ls, &opts).unwrap(),
        ]
    };
    let base = measure(0.0);
    for phi in [PI / 3.0, PI] {
        let m = measure(phi);
        for (a, b) in base.iter().zip(&m) {
            assert!(close(*a, *b, 1e-8));
        }
    }
}

#[test]
fn dilation_examples() {
    let u = Thermal::uniform(2);
    // R_T = 1 yields γ_C = I/2
    let replace1 = make_replace(&CMat::basis_projector(2, 1), 2).unwrap();
    assert!(close(r_t_channel(&replace1, &u, &u).unwrap(), 1.0, 1e-12));
    let dil = gpo_dilation(&replace1, &u, &u).unwrap();
    assert!(close(dil.gamma_c.populations()[0], 0.5, 1e-12) && close(dil.gamma_c.populations()[1], 0.5, 1e-12));

    let g = Thermal::from_f64(&[0.75, 0.25]).unwrap();
    let mut r = rng(3);
    for _ in 0..30 {
        let ch = random_channel_flat::<f64, _>(2, 2, &mut r);
        let dil = gpo_dilation(&ch, &g, &g).unwrap();
        let jin = dil.joint_gibbs_in(&g);
        assert!(dil.simulated().unwrap().choi_distance(&ch) <= 1e-10);
        assert!(is_gibbs_preserving(&dil.g_tilde, &jin, &g).unwrap().1 <= 1e-10);
        assert!(close(r_t_state(&dil.rho_c, &dil.gamma_c).unwrap(), dil.r_t, 1e-8));
        let pt = p_t(&dil.g_tilde, &jin, &g).unwrap();
        let rj = r_joint(&ch, &g).unwrap();
        assert!(rj <= pt + 1e-6 && pt <= (1.0 / dil.r_t).max(rj) + 1e-6);
    }

    let gpo = make_signalling_gpo(&g, 0.5).unwrap();
    let dil = gpo_dilation(&gpo, &g, &g).unwrap();
    assert!(dil.degenerate && dil.gamma_c.dim() == 1);
    assert!(dil.g_tilde.choi_distance(&gpo) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructions_are_cptp(seed in any::<u64>(), alpha in 0.0f64..=1.0, phi in 0.0f64..std::f64::consts::TAU, r in 0.0f64..=1.0) {
        let mut rg = rng(seed);
        let ch = random_channel_flat::<f64, _>(2, 2, &mut rg);
        let c = ControlQubitSpec::new(alpha, phi, r).unwrap();
        for built in [switch(&ch).unwrap(), coherent_control(&ch).unwrap()] {
            let sum = built.kraus_ops().unwrap().iter().fold(CMat::zeros(4, 4), |a, k| &a + &(&k.adjoint() * k));
            prop_assert!(sum.max_abs_diff(&CMat::identity(4)) <= 1e-9);
        }
        for induced in [induced_switch(&ch, &c).unwrap(), induced_coherent_control(&ch, &c).unwrap()] {
            let rho = random_density::<f64, _>(2, &mut rg);
            let out = induced.apply(&rho).unwrap();
            prop_assert!((out.tr() - 1.0).abs() <= 1e-10);
            prop_assert!(check_density(&out).is_ok());
        }
    }

    #[test]
    fn switch_of_gpo_preserves_joint_gibbs(seed in any::<u64>()) {
        let g = Thermal::from_f64(&[0.6, 0.4]).unwrap();
        let gpo = random_gpo::<f64, _>(&g, &g, &mut rng(seed)).unwrap();
        let gc = Thermal::uniform(2).tensor(&g);
        let out = switch(&gpo).unwrap().apply(&gc.matrix()).unwrap();
        prop_assert!(out.max_abs_diff(&kron(&CMat::identity(2).scale(0.5), &g.matrix())) <= 1e-9);
    }
}
