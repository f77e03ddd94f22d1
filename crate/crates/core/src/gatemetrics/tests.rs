use super::*;
use crate::interaction::accumulated_phase_dipole;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn pair(sep: f64) -> PulsePair {
    PulsePair::new(GateGeometry::reference(sep).unwrap())
}

// |C0000| = 0.9 for the far-field phase; 2√(ig) K₁(2√(ig)) evaluated independently
const G_MODES: f64 = 0.088_416_902_262_679_37;
const C0000_CLOSED_FORM: Complex64 = Complex64::new(0.875_944_335_617_400_1, -0.206_691_850_104_912_7);

#[test]
fn zero_strength_is_identity() {
    for sep in [0.0, 3.0, 26.0] {
        for spec in [
            InteractionSpec::dipole(0.0),
            InteractionSpec::simplified(0.0),
            InteractionSpec::contact(0.0, 0.1),
        ] {
            let r = fidelity_phase(&pair(sep), &spec, 1e-11).unwrap();
            assert!((r.overlap - 1.0).norm() < 1e-11, "{spec:?} R={sep}: {:?}", r.overlap);
            assert!((r.fidelity - 1.0).abs() < 1e-10);
            assert!(r.phase.abs() < 1e-10);
        }
    }
}

#[test]
fn simplified_head_on_matches_bessel_closed_form() {
    let r = fidelity_phase(&pair(0.0), &InteractionSpec::simplified(G_MODES), 1e-11).unwrap();
    assert!((r.overlap - C0000_CLOSED_FORM).norm() < 1e-10, "{:?}", r.overlap);
}

#[test]
fn strength_reversal_conjugates() {
    for (sep, g) in [(0.0, 0.7), (4.0, 20.0), (26.0, 900.0)] {
        let p = pair(sep);
        let a = fidelity_phase(&p, &InteractionSpec::dipole(g), 1e-10).unwrap();
        let b = fidelity_phase(&p, &InteractionSpec::dipole(-g), 1e-10).unwrap();
        assert!((a.overlap - b.overlap.conj()).norm() < 1e-14, "R={sep}");
        assert_eq!(a.fidelity.to_bits(), b.fidelity.to_bits());
    }
}

#[test]
fn overlap_is_bounded() {
    for sep in [0.0, 1.0, 10.0, 26.0] {
        for g in [0.01, 0.3, 3.0, 100.0, 2000.0] {
            let r = fidelity_phase(&pair(sep), &InteractionSpec::dipole(g), 1e-9).unwrap();
            assert!(r.overlap.norm() <= 1.0 + 1e-9, "R={sep} g={g}");
            assert!(r.phase > -PI && r.phase <= PI);
        }
    }
}

#[test]
fn principal_branch_includes_pi() {
    assert_eq!(principal_arg(Complex64::new(-1.0, -0.0)), PI);
    assert_eq!(principal_arg(Complex64::new(-1.0, 0.0)), PI);
    assert!((principal_arg(Complex64::new(0.0, -1.0)) + PI / 2.0).abs() < 1e-15);
}

#[test]
fn rejects_bad_inputs() {
    let p = pair(0.0);
    assert!(fidelity_phase(&p, &InteractionSpec::dipole(1.0), 0.0).is_err());
    assert!(fidelity_phase(&p, &InteractionSpec::dipole(f64::NAN), 1e-8).is_err());
    let aniso = InteractionSpec::dipole_anisotropic(1.0, [1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(fidelity_phase(&p, &aniso, 1e-8), Err(GateError::Unsupported(_))));
}

#[test]
fn reduced_matches_direct_tensor_quadrature() {
    // separated dipole: the phase is smooth across the support
    let p = pair(26.0);
    let spec = InteractionSpec::dipole(1345.52);
    let reduced = fidelity_phase(&p, &spec, 1e-11).unwrap().overlap;
    let d3 = overlap_tensor_3d(&p, &spec, 48).unwrap();
    let d6 = overlap_tensor_6d(&p, &spec, 12).unwrap();
    assert!((reduced - d3).norm() < 1e-10, "{:?} vs {:?}", reduced, d3);
    assert!((reduced - d6).norm() < 1e-10, "{:?} vs {:?}", reduced, d6);

    // head-on contact: smooth, narrow core
    let p = pair(0.0);
    let spec = InteractionSpec::contact(0.5, 1.0);
    let reduced = fidelity_phase(&p, &spec, 1e-11).unwrap().overlap;
    let d3 = overlap_tensor_3d(&p, &spec, 48).unwrap();
    let d6 = overlap_tensor_6d(&p, &spec, 16).unwrap();
    assert!((reduced - d3).norm() < 1e-9, "{:?} vs {:?}", reduced, d3);
    assert!((reduced - d6).norm() < 1e-6, "{:?} vs {:?}", reduced, d6);
}

/// Plain Monte-Carlo estimate of `E[e^{-iφ}]` over the relative law, with
/// its standard error.
fn monte_carlo_head_on(g: f64, samples: usize, seed: u64) -> (Complex64, f64) {
    let geom = GateGeometry::reference(0.0).unwrap();
    let chunks = 64;
    let per = samples / chunks;
    let sums: Vec<(Complex64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(c as u64));
            let mut s = Complex64::new(0.0, 0.0);
            let mut s2 = 0.0;
            for _ in 0..per {
                let x: f64 = StandardNormal.sample(&mut rng);
                let y: f64 = StandardNormal.sample(&mut rng);
                let z: f64 = StandardNormal.sample(&mut rng);
                let rho = x.hypot(y);
                let phi = accumulated_phase_dipole(z + geom.l, rho, &geom, g).unwrap();
                let v = Complex64::from_polar(1.0, -phi);
                s += v;
                s2 += v.norm_sqr();
            }
            (s, s2)
        })
        .collect();
    let n = (per * chunks) as f64;
    let (s, s2) = sums.iter().fold((Complex64::new(0.0, 0.0), 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = s / n;
    let var = s2 / n - mean.norm_sqr();
    (mean, (var / n).sqrt())
}

// frozen after agreement with the Monte-Carlo estimate below
const HEAD_ON_G05: Complex64 = Complex64::new(0.482_914_019_638_612_7, -0.436_634_701_891_165_77);

#[test]
fn head_on_regression_against_monte_carlo() {
    let r = fidelity_phase(&pair(0.0), &InteractionSpec::dipole(0.5), 1e-10).unwrap();
    let (mc, se) = monte_carlo_head_on(0.5, 10_000_000, 0x5eed);
    assert!((r.overlap - mc).norm() < 5.0 * se, "quadrature {:?} vs MC {:?} ± {se}", r.overlap, mc);
    assert!((r.overlap - HEAD_ON_G05).norm() < 1e-9, "{:?}", r.overlap);
}

#[test]
fn result_is_thread_count_independent() {
    let p = pair(0.0);
    let spec = InteractionSpec::dipole(1.3);
    let a = fidelity_phase(&p, &spec, 1e-10).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| fidelity_phase(&p, &spec, 1e-10).unwrap());
    assert_eq!(a.overlap.re.to_bits(), b.overlap.re.to_bits());
    assert_eq!(a.overlap.im.to_bits(), b.overlap.im.to_bits());
}

mod modes {
    use super::*;
    use crate::mathcore::gauss_hermite_rule;

    #[test]
    fn transfer_coefficients_match_rotated_projection() {
        // ∫∫ ψ_m(x₁) ψ_l(x₂) ψ₀(x₁) ψ₀(x₂) f((x₁ - x₂)/√2) = T_ml ∫ ψ_{m+l}(u) ψ₀(u) f(u)
        let rule = gauss_hermite_rule(60).unwrap();
        let f = |u: f64| (0.7 * u).cos() + 0.3 * u * (1.3 * u).sin();
        let s2 = std::f64::consts::SQRT_2;
        for m in 0..7 {
            for l in 0..7 {
                let mut lhs = 0.0;
                for (i, &x1) in rule.nodes.iter().enumerate() {
                    let h1 = hermite_functions(m, x1);
                    for (j, &x2) in rule.nodes.iter().enumerate() {
                        let h2 = hermite_functions(l, x2);
                        // the Gauss-Hermite weight e^{-x²} equals π^{1/2} ψ₀(x)²
                        let w = rule.weights[i] * rule.weights[j] * (x1 * x1 + x2 * x2).exp();
                        lhs += w * h1[m] * h1[0] * h2[l] * h2[0] * f((x1 - x2) / s2);
                    }
                }
                let mut rhs = 0.0;
                for (i, &u) in rule.nodes.iter().enumerate() {
                    let h = hermite_functions(m + l, u);
                    rhs += rule.weights[i] * (u * u).exp() * h[m + l] * h[0] * f(u);
                }
                let t = transfer_coefficient(m, l);
                assert!((lhs - t * rhs).abs() < 1e-12, "m={m} l={l}: {lhs} vs {}", t * rhs);
            }
        }
    }

    use crate::mathcore::hermite_functions;

    #[test]
    fn zero_strength_is_identity() {
        let t = mode_mix_tensor(&InteractionSpec::simplified(0.0), 0.0, 6, 1e-11).unwrap();
        for (i, c) in t.coefficients.iter().enumerate() {
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert!((c - expect).norm() < 1e-11, "index {i}: {c}");
        }
        let s = schmidt_spectrum(&t).unwrap();
        assert!((s.singular_values[0] - 1.0).abs() < 1e-11);
        assert!(s.entropy < 1e-12);
    }

    #[test]
    fn head_on_symmetries_and_consistency() {
        let spec = InteractionSpec::simplified(G_MODES);
        let t = mode_mix_tensor(&spec, 0.0, 8, 1e-11).unwrap();
        assert!(t.parity_violation() <= 1e-10);
        for m in 0..=8 {
            for n in 0..=8 {
                for l in 0..=8 {
                    for k in 0..=8 {
                        let a = t.get(m, n, l, k);
                        let b = t.get(n, m, k, l);
                        assert!((a - b).norm() < 1e-12);
                    }
                }
            }
        }
        assert!((t.get(0, 0, 0, 0) - C0000_CLOSED_FORM).norm() < 1e-9);
        let reduced = fidelity_phase(&pair(0.0), &spec, 1e-11).unwrap();
        assert!((t.get(0, 0, 0, 0) - reduced.overlap).norm() < 1e-9);
        assert!(t.unitarity_deficit() > 0.0);
        let s = schmidt_spectrum(&t).unwrap();
        assert!(s.entropy > 0.0);
        assert!(s.purity < 1.0);
    }

    #[test]
    fn separated_integrals_match_cartesian_quadrature() {
        // singular point u₀ = R/√2 sits where the Gaussian weight is ~e^{-50}
        let (g, r) = (1.0, 10.0);
        let p_max = 6;
        let (a, _) = relative_mode_integrals(g, r, p_max, 1e-12).unwrap();
        let rule = gauss_hermite_rule(80).unwrap();
        let u0 = r / std::f64::consts::SQRT_2;
        for p in 0..=p_max {
            for q in 0..=p_max {
                let mut direct = Complex64::new(0.0, 0.0);
                for (i, &x) in rule.nodes.iter().enumerate() {
                    let hx = hermite_functions(p_max, x);
                    for (j, &y) in rule.nodes.iter().enumerate() {
                        let hy = hermite_functions(p_max, y);
                        let w = rule.weights[i] * rule.weights[j] / PI;
                        let phase = g / ((x - u0).powi(2) + y * y);
                        // ψ_p ψ₀ divided by the rule weight e^{-x²}
                        let fx = hx[p] * (0.5 * x * x).exp() * PI.powf(0.25);
                        let fy = hy[q] * (0.5 * y * y).exp() * PI.powf(0.25);
                        direct += Complex64::from_polar(w * fx * fy, -phase);
                    }
                }
                let got = a[p * (p_max + 1) + q];
                assert!((got - direct).norm() < 1e-10, "p={p} q={q}: {got} vs {direct}");
            }
        }
    }

    #[test]
    fn rank_one_tensor_has_zero_entropy() {
        let d = 4;
        let a: Vec<Complex64> = (0..d * d).map(|i| Complex64::new(1.0 / (1.0 + i as f64), 0.3 * i as f64)).collect();
        let b: Vec<Complex64> = (0..d * d).map(|i| Complex64::new((i as f64).cos(), 0.1)).collect();
        let mut c = Vec::new();
        for x in &a {
            for y in &b {
                c.push(x * y);
            }
        }
        let t = ModeMixTensor::from_coefficients(d - 1, c).unwrap();
        let s = schmidt_spectrum(&t).unwrap();
        assert!(s.entropy < 1e-12, "{}", s.entropy);
        assert!((s.purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_match_reduced_density_eigenvalues() {
        let t = mode_mix_tensor(&InteractionSpec::simplified(0.4), 0.0, 5, 1e-11).unwrap();
        let s = schmidt_spectrum(&t).unwrap();
        let d = 6;
        let norm = t.norm_squared().sqrt();
        let m = nalgebra::DMatrix::from_fn(d * d, d * d, |row, col| t.get(row / d, row % d, col / d, col % d) / norm);
        let rho = &m * m.adjoint();
        let mut eig: Vec<f64> = rho.symmetric_eigenvalues().iter().map(|x| x.max(0.0)).collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        for (sv, e) in s.singular_values.iter().zip(&eig) {
            assert!((sv * sv - e).abs() < 1e-12);
        }
        let entropy: f64 = eig.iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum();
        assert!((entropy - s.entropy).abs() < 1e-10);
    }

    #[test]
    fn guards() {
        assert!(mode_mix_tensor(&InteractionSpec::dipole(0.1), 0.0, 4, 1e-8).is_err());
        assert!(mode_mix_tensor(&InteractionSpec::simplified(0.1), 0.0, 17, 1e-8).is_err());
        let zero = ModeMixTensor::from_coefficients(1, vec![Complex64::new(0.0, 0.0); 16]).unwrap();
        assert_eq!(schmidt_spectrum(&zero), Err(GateError::ZeroTensor));
    }
}
