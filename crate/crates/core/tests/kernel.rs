use athermal::channels::{ginibre, make_gamma, make_identity, random_density, random_pure, random_unitary};
use athermal::qmat::{
    eig_hermitian, eigvals_hermitian, herm_pow, kron, op_norm, partial_trace, permute_subsystems, psd_min_eig,
    trace_norm, CMatrix,
};
use athermal::thermo::{
    d_max, mutual_info_at_tfd, mutual_information, purify, rel_entropy, thermofield_double, von_neumann,
};
use athermal::{CMat, Thermal};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_herm(d: usize, seed: u64) -> CMat {
    let g: CMat = ginibre(d, d, &mut rng(seed));
    (&g + &g.adjoint()).scale(0.5)
}

fn pauli_x() -> CMat {
    CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn eig_examples() {
    let e = eig_hermitian(&CMat::identity(2)).unwrap();
    assert_eq!(e.values, vec![1.0, 1.0]);
    assert_eq!(eigvals_hermitian(&CMat::from_real_diag(&[0.75, 0.25])).unwrap(), vec![0.25, 0.75]);
    let v = eigvals_hermitian(&pauli_x()).unwrap();
    assert!(close(v[0], -1.0, 1e-14) && close(v[1], 1.0, 1e-14));
}

#[test]
fn eig_rejects_bad_input() {
    assert!(eig_hermitian(&CMat::zeros(2, 3)).is_err());
    let mut m = CMat::zeros(2, 2);
    m[(0, 1)] = Complex64::new(1.0, 0.0);
    assert!(eig_hermitian(&m).is_err());
}

#[test]
fn kron_examples() {
    let two = CMat::from_real_diag(&[2.0]);
    let m = random_herm(3, 1);
    assert!(kron(&two, &m).max_abs_diff(&m.scale(2.0)) < 1e-15);
    let g = CMat::from_real_diag(&[0.75, 0.25]);
    let gg = kron(&g, &g);
    assert!(gg.max_abs_diff(&CMat::from_real_diag(&[0.5625, 0.1875, 0.1875, 0.0625])) < 1e-15);
    assert!(kron(&CMat::identity(2), &CMat::identity(3)).max_abs_diff(&CMat::identity(6)) < 1e-15);
}

#[test]
fn partial_trace_examples() {
    let ga = CMat::from_real_diag(&[0.75, 0.25]);
    let gb = CMat::from_real_diag(&[0.5, 0.3, 0.2]);
    let p = partial_trace(&kron(&ga, &gb), &[2, 3], &[0]).unwrap();
    assert!(p.max_abs_diff(&ga) < 1e-15);
    let tfd = thermofield_double(&Thermal::from_f64(&[0.75, 0.25]).unwrap());
    assert!(partial_trace(&tfd, &[2, 2], &[1]).unwrap().max_abs_diff(&ga) < 1e-15);
    let m = random_herm(6, 2);
    let all = partial_trace(&m, &[2, 3], &[]).unwrap();
    assert_eq!((all.rows(), all.cols()), (1, 1));
    assert!(close(all[(0, 0)].re, m.tr(), 1e-13));
    assert!(partial_trace(&m, &[2, 2], &[0]).is_err());
}

#[test]
fn psd_min_eig_examples() {
    assert!(close(psd_min_eig(&CMat::from_real_diag(&[0.75, 0.25])).unwrap(), 0.25, 1e-15));
    assert!(close(psd_min_eig(&CMat::from_real_diag(&[1.0, -1.0])).unwrap(), -1.0, 1e-15));
    // γ⊗γ dominates the symmetric operator σ from the switch Kraus algebra at γ = I/2
    let g = CMat::from_real_diag(&[0.5, 0.5]);
    let mut sigma = CMat::zeros(4, 4);
    for (i, j) in [(0, 0), (3, 3), (1, 1), (2, 2), (1, 2), (2, 1)] {
        sigma[(i, j)] = Complex64::new(0.125, 0.0);
    }
    assert!(psd_min_eig(&(&kron(&g, &g) - &sigma)).unwrap() >= -1e-12);
}

#[test]
fn herm_pow_examples() {
    let m = CMat::from_real_diag(&[0.25, 0.75]);
    let r = herm_pow(&m, -0.5).unwrap();
    assert!(close(r[(0, 0)].re, 2.0, 1e-12) && close(r[(1, 1)].re, 1.154_700_538_379_251_5, 1e-12));
    assert!(herm_pow(&m, 0.0).unwrap().max_abs_diff(&CMat::identity(2)) < 1e-14);
    let h = herm_pow(&m, 0.5).unwrap();
    assert!((&h * &h).max_abs_diff(&m) < 1e-10);
    assert!(herm_pow(&CMat::from_real_diag(&[1.0, 0.0]), -1.0).is_err());
}

#[test]
fn norm_examples() {
    assert!(close(trace_norm(&CMat::from_real_diag(&[0.3, -0.3])), 0.6, 1e-15));
    assert!(close(op_norm(&CMat::from_real_diag(&[2.0 / 3.0, 2.0])).unwrap(), 2.0, 1e-15));
    let rho = random_density::<f64, _>(3, &mut rng(3));
    assert!(trace_norm(&(&rho - &rho)) < 1e-15);
}

#[test]
fn f32_kernel_agrees_with_f64() {
    let m = random_herm(4, 5);
    let v64 = eigvals_hermitian(&m).unwrap();
    let v32 = eigvals_hermitian(&m.cast::<f32>()).unwrap();
    for (a, b) in v64.iter().zip(&v32) {
        assert!((a - *b as f64).abs() < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(d in 1usize..=16, seed in any::<u64>()) {
        let m = random_herm(d, seed);
        let e = eig_hermitian(&m).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&m) <= 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>(), a in -2.0f64..2.0) {
        let x = random_herm(6, seed);
        let y = random_herm(6, seed ^ 0x9e37);
        let lin = &x.scale(a) + &y;
        let lhs = partial_trace(&lin, &[2, 3], &[1]).unwrap();
        let rhs = &partial_trace(&x, &[2, 3], &[1]).unwrap().scale(a) + &partial_trace(&y, &[2, 3], &[1]).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        prop_assert!((lhs.tr() - lin.tr()).abs() <= 1e-12);
    }

    #[test]
    fn kron_associative_and_mixed_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a: CMat = ginibre(2, 2, &mut r);
        let b: CMat = ginibre(3, 3, &mut r);
        let c: CMat = ginibre(2, 2, &mut r);
        prop_assert!(kron(&kron(&a, &b), &c).max_abs_diff(&kron(&a, &kron(&b, &c))) <= 1e-12);
        // swapping factors is a subsystem permutation
        let ab = kron(&a, &b);
        let ba = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        prop_assert!(ba.max_abs_diff(&kron(&b, &a)) <= 1e-12);
        let x: Vec<Complex64> = ginibre::<f64, _>(2, 1, &mut r).into_data();
        let y: Vec<Complex64> = ginibre::<f64, _>(3, 1, &mut r).into_data();
        let lhs = ab.mat_vec(&athermal::qmat::kron_vec(&x, &y));
        let rhs = athermal::qmat::kron_vec(&a.mat_vec(&x), &b.mat_vec(&y));
        for (u, v) in lhs.iter().zip(&rhs) {
            prop_assert!((u - v).norm() <= 1e-12);
        }
    }

    #[test]
    fn herm_pow_adds_exponents(seed in any::<u64>(), p in -1.5f64..1.5, q in -1.5f64..1.5) {
        let m = &random_density::<f64, _>(3, &mut rng(seed)) + &CMat::identity(3).scale(0.05);
        let lhs = &herm_pow(&m, p).unwrap() * &herm_pow(&m, q).unwrap();
        prop_assert!(lhs.max_abs_diff(&herm_pow(&m, p + q).unwrap()) <= 1e-9);
    }

    #[test]
    fn pinsker_and_dmax_dominance(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density::<f64, _>(3, &mut r);
        let sigma = &random_density::<f64, _>(3, &mut r).scale(0.9) + &CMat::identity(3).scale(0.1 / 3.0);
        let d = rel_entropy(&rho, &sigma).unwrap();
        prop_assert!(d + 1e-12 >= 0.5 * trace_norm(&(&rho - &sigma)).powi(2));
        prop_assert!(d_max(&rho, &sigma).unwrap() + 1e-10 >= d);
    }

    #[test]
    fn purifications_are_locally_thermal(seed in any::<u64>()) {
        let g = Thermal::from_f64(&[0.5, 0.3, 0.2]).unwrap();
        let u = random_unitary::<f64, _>(3, &mut rng(seed));
        let tau = purify(&g, &u).unwrap();
        prop_assert!(partial_trace(&tau, &[3, 3], &[0]).unwrap().max_abs_diff(&g.matrix()) <= 1e-10);
        let rt = athermal::measures::r_t_state(&tau, &g.tensor(&g)).unwrap();
        prop_assert!((rt - (g.trace_inverse() - 1.0)).abs() <= 1e-9);
    }
}

#[test]
fn thermofield_examples() {
    let u = Thermal::uniform(2);
    let bell = thermofield_double(&u);
    let mut expect = CMat::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        expect[(i, j)] = Complex64::new(0.5, 0.0);
    }
    assert!(bell.max_abs_diff(&expect) < 1e-15);
    let g = Thermal::from_f64(&[0.75, 0.25]).unwrap();
    let tfd = thermofield_double(&g);
    assert!(close(athermal::qmat::purity(&tfd), 1.0, 1e-12));
    assert!(partial_trace(&tfd, &[2, 2], &[0]).unwrap().max_abs_diff(&g.matrix()) < 1e-15);
    assert!(close(athermal::measures::r_t_state(&bell, &u.tensor(&u)).unwrap(), 3.0, 1e-12));
    assert!(purify(&g, &CMat::identity(2)).unwrap().max_abs_diff(&tfd) < 1e-15);
    assert!(purify(&g, &CMat::identity(3)).is_err());
}

#[test]
fn entropy_examples() {
    let psi = random_pure::<f64, _>(3, &mut rng(8));
    assert!(von_neumann(&psi).unwrap().abs() < 1e-10);
    let g = Thermal::from_f64(&[0.75, 0.25]).unwrap();
    assert!(mutual_information(&g.tensor(&g).matrix(), [2, 2]).unwrap().abs() < 1e-12);
    let bell = thermofield_double(&Thermal::uniform(2));
    assert!(close(mutual_information(&bell, [2, 2]).unwrap(), 2.0 * 2f64.ln(), 1e-10));
    assert!(rel_entropy(&g.matrix(), &CMat::from_real_diag(&[1.0, 0.0])).is_err());
}

#[test]
fn dmax_examples() {
    let g = Thermal::from_f64(&[0.75, 0.25]).unwrap();
    let rho = random_density::<f64, _>(2, &mut rng(4));
    assert!(d_max(&rho, &rho).unwrap().abs() < 1e-9);
    let one = CMat::basis_projector(2, 1);
    assert!(close(d_max(&one, &g.matrix()).unwrap(), 4f64.ln(), 1e-12));
    let rt = athermal::measures::r_t_state(&rho, &g).unwrap();
    assert!(close(d_max(&rho, &g.matrix()).unwrap().exp() - 1.0, rt, 1e-12));
}

#[test]
fn mutual_info_at_tfd_examples() {
    let u = Thermal::uniform(2);
    assert!(mutual_info_at_tfd(&make_gamma(&u, 2), &u).unwrap().abs() < 1e-12);
    assert!(close(mutual_info_at_tfd(&make_identity(2), &u).unwrap(), 4f64.ln(), 1e-10));
    assert!(mutual_info_at_tfd(&make_identity(3), &u).is_err());
}
