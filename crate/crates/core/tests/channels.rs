use athermal::channels::*;
use athermal::qmat::{eigvals_hermitian, kron, partial_trace, permute_subsystems};
use athermal::{CMat, Channel, Thermal};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn g75() -> Thermal {
    Thermal::from_f64(&[0.75, 0.25]).unwrap()
}

#[test]
fn choi_examples() {
    let id: Channel = make_identity(2);
    let j = id.choi();
    assert!((j.tr() - 2.0).abs() < 1e-15);
    for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        assert!((j[(r, c)].re - 1.0).abs() < 1e-15);
    }
    let g = g75();
    let gamma = make_gamma(&g, 2);
    assert!(gamma.choi().max_abs_diff(&kron(&CMat::identity(2), &g.matrix())) < 1e-15);

    let mut r = rng(1);
    let ks: Vec<CMat> = {
        let w: CMat = ginibre(6, 2, &mut r);
        let s = athermal::qmat::herm_pow(&(&w.adjoint() * &w), -0.5).unwrap();
        let v = &w * &s;
        (0..3)
            .map(|k| CMat::from_fn(2, 2, |i, j| v[(2 * k + i, j)]))
            .collect()
    };
    let ch = Channel::from_kraus(ks).unwrap();
    let back = Channel::from_kraus(choi_to_kraus(ch.choi(), 2, 2).unwrap()).unwrap();
    assert!(back.choi_distance(&ch) <= 1e-9);
}

#[test]
fn representation_errors() {
    assert!(Channel::from_kraus(vec![CMat::identity(2).scale(0.5)]).is_err());
    let mut bad = make_identity::<f64>(2).choi().clone();
    bad[(1, 1)].re = -0.5;
    assert!(Channel::from_choi(2, 2, bad).is_err());
}

#[test]
fn apply_compose_tensor_examples() {
    let g = g75();
    let mut r = rng(2);
    let rho = random_density::<f64, _>(2, &mut r);
    assert!(make_gamma(&g, 2).apply(&rho).unwrap().max_abs_diff(&g.matrix()) < 1e-15);
    let ch = random_channel_flat::<f64, _>(2, 3, &mut r);
    assert!(compose(&make_identity(3), &ch).unwrap().choi_distance(&ch) < 1e-12);
    let u = random_unitary::<f64, _>(2, &mut r);
    let out = make_unitary(&u).unwrap().apply(&rho).unwrap();
    let (a, b) = (eigvals_hermitian(&rho).unwrap(), eigvals_hermitian(&out).unwrap());
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    assert!(compose(&ch, &ch).is_err());
    assert!(ch.apply(&random_density::<f64, _>(3, &mut r)).is_err());
}

#[test]
fn constructor_examples() {
    let u = Thermal::uniform(2);
    let zero = CMat::basis_projector(2, 0);
    assert!(make_gamma(&u, 2).apply(&zero).unwrap().max_abs_diff(&CMat::identity(2).scale(0.5)) < 1e-15);
    let rs = athermal::measures::r_signalling(
        &make_replace(&CMat::from_real_diag(&[0.3, 0.7]), 2).unwrap(),
        &Default::default(),
    )
    .unwrap();
    assert!(rs.abs() < 1e-7);
    assert!((make_identity::<f64>(2).choi().tr() - 2.0).abs() < 1e-15);
    let g = g75();
    assert!(make_replace(&g.matrix(), 2).unwrap().choi_distance(&make_gamma(&g, 2)) < 1e-15);
    assert!(make_replace(&CMat::from_real_diag(&[1.5, -0.5]), 2).is_err());
}

#[test]
fn signalling_gpo_examples() {
    let g = g75();
    assert!(make_signalling_gpo(&g, 1.0).unwrap().choi_distance(&make_gamma(&g, 2)) < 1e-15);
    assert!(make_signalling_gpo(&g, 0.0).unwrap().choi_distance(&make_identity(2)) < 1e-15);
    let half = make_signalling_gpo(&Thermal::uniform(2), 0.5).unwrap();
    let out = half.apply(&CMat::basis_projector(2, 0)).unwrap();
    assert!(out.max_abs_diff(&CMat::from_real_diag(&[0.75, 0.25])) < 1e-15);
    for s in [0.0, 0.3, 1.0] {
        let (ok, res) = is_gibbs_preserving(&make_signalling_gpo(&g, s).unwrap(), &g, &g).unwrap();
        assert!(ok && res <= 1e-10);
    }
    assert!(make_signalling_gpo(&g, 1.2).is_err());
    assert!(make_signalling_gpo(&g, -0.1).is_err());
}

#[test]
fn gibbs_preservation_examples() {
    let g = g75();
    let (ok, res) = is_gibbs_preserving(&make_gamma(&g, 2), &g, &g).unwrap();
    assert!(ok && res <= 1e-15);
    let u = Thermal::uniform(2);
    let unitary = make_unitary(&random_unitary::<f64, _>(2, &mut rng(3))).unwrap();
    assert!(is_gibbs_preserving(&unitary, &u, &u).unwrap().0);
    let replace0 = make_replace(&CMat::basis_projector(2, 0), 2).unwrap();
    assert!(!is_gibbs_preserving(&replace0, &g, &g).unwrap().0);
}

#[test]
fn sampler_examples() {
    let mut r = rng(4);
    let u = random_unitary::<f64, _>(4, &mut r);
    assert!((&u.adjoint() * &u).max_abs_diff(&CMat::identity(4)) <= 1e-10);
    let n = 10_000;
    let mut mean = CMat::zeros(2, 2);
    for _ in 0..n {
        mean += &random_density::<f64, _>(2, &mut r);
    }
    assert!(mean.scale(1.0 / n as f64).max_abs_diff(&CMat::identity(2).scale(0.5)) <= 0.02);
    let psi = random_pure::<f64, _>(3, &mut r);
    assert!((athermal::qmat::purity(&psi) - 1.0).abs() <= 1e-12);
}

#[test]
fn flat_channels_are_trace_preserving_and_deterministic() {
    let a = random_channel_flat::<f64, _>(2, 3, &mut rng(5));
    let b = random_channel_flat::<f64, _>(2, 3, &mut rng(5));
    assert_eq!(a.choi(), b.choi());
    let tr_out = partial_trace(a.choi(), &[2, 3], &[0]).unwrap();
    assert!(tr_out.max_abs_diff(&CMat::identity(2)) <= 1e-9);
}

#[test]
fn flat_channel_marginal_mean() {
    let mut r = rng(6);
    let n = 5000;
    let mut mean = CMat::zeros(4, 4);
    for _ in 0..n {
        mean += random_channel_flat::<f64, _>(2, 2, &mut r).choi();
    }
    let target = kron(&CMat::identity(2), &CMat::identity(2).scale(0.5));
    assert!(mean.scale(1.0 / n as f64).max_abs_diff(&target) <= 0.05);
}

#[test]
fn gpo_projection_examples() {
    let g = g75();
    let gamma = make_gamma(&g, 2);
    assert!(project_gpo(gamma.choi(), &g, &g).unwrap().choi_distance(&gamma) <= 1e-9);
    let mut r = rng(7);
    for _ in 0..20 {
        let gpo = random_gpo::<f64, _>(&g, &g, &mut r).unwrap();
        let (ok, res) = is_gibbs_preserving(&gpo, &g, &g).unwrap();
        assert!(ok && res <= 1e-8);
    }
    let u = Thermal::uniform(2);
    let w = 0.4;
    let unital = Channel::from_choi(
        2,
        2,
        &make_unitary(&random_unitary::<f64, _>(2, &mut r)).unwrap().choi().scale(w)
            + &make_unitary(&random_unitary::<f64, _>(2, &mut r)).unwrap().choi().scale(1.0 - w),
    )
    .unwrap();
    assert!(project_gpo(unital.choi(), &u, &u).unwrap().choi_distance(&unital) <= 1e-8);
}

#[test]
fn measure_prepare_is_entanglement_breaking_channel() {
    let states = [CMat::from_real_diag(&[0.5, 0.5]), CMat::basis_projector(2, 1)];
    let ch = make_measure_prepare(&states).unwrap();
    let out = ch.apply(&CMat::basis_projector(2, 1)).unwrap();
    assert!(out.max_abs_diff(&states[1]) < 1e-15);
    assert!(make_measure_prepare(&[CMat::identity(2)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructors_are_cptp(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4) {
        let mut r = rng(seed);
        let ch = random_channel_flat::<f64, _>(din, dout, &mut r);
        let sum = ch.kraus_ops().unwrap().iter().fold(CMat::zeros(din, din), |acc, k| &acc + &(&k.adjoint() * k));
        prop_assert!(sum.max_abs_diff(&CMat::identity(din)) <= 1e-9);
        let rho = random_density::<f64, _>(din, &mut r);
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.tr() - 1.0).abs() <= 1e-10);
        prop_assert!(check_density(&out).is_ok());
    }

    #[test]
    fn compose_is_link_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_channel_flat::<f64, _>(2, 3, &mut r);
        let b = random_channel_flat::<f64, _>(3, 2, &mut r);
        let ab = compose(&b, &a).unwrap();
        // J_{B∘A} = Tr_M[(J_A^{T_M} ⊗ 1)(1 ⊗ J_B)] on input ⊗ middle ⊗ output
        let ja = kron(a.choi(), &CMat::identity(2));
        let jb = kron(&CMat::identity(2), b.choi());
        let ja_pt = partial_transpose_middle(&ja, [2, 3, 2]);
        let link = partial_trace(&(&ja_pt * &jb), &[2, 3, 2], &[0, 2]).unwrap();
        prop_assert!(link.max_abs_diff(ab.choi()) <= 1e-9);
        let rho = random_density::<f64, _>(2, &mut r);
        prop_assert!(ab.apply(&rho).unwrap().max_abs_diff(&b.apply(&a.apply(&rho).unwrap()).unwrap()) <= 1e-12);
    }

    #[test]
    fn tensor_is_reshuffled_kron(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_channel_flat::<f64, _>(2, 3, &mut r);
        let b = random_channel_flat::<f64, _>(2, 2, &mut r);
        let t = tensor(&a, &b);
        let k = permute_subsystems(&kron(a.choi(), b.choi()), &[2, 3, 2, 2], &[0, 2, 1, 3]).unwrap();
        prop_assert!(t.choi().max_abs_diff(&k) <= 1e-9);
    }
}

fn partial_transpose_middle(m: &CMat, dims: [usize; 3]) -> CMat {
    let [a, b, c] = dims;
    let n = a * b * c;
    CMat::from_fn(n, n, |row, col| {
        let (i1, j1, k1) = (row / (b * c), (row / c) % b, row % c);
        let (i2, j2, k2) = (col / (b * c), (col / c) % b, col % c);
        m[(i1 * b * c + j2 * c + k1, i2 * b * c + j1 * c + k2)]
    })
}
