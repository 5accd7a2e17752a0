//! The flux derivative against hand-differentiated references: a corpus of
//! analytic pairs (omega, d omega), Richardson refinement, convergence-order
//! estimation, and the mean-value locator on a transcendental field.

use fluxform_core::chains::Block;
use fluxform_core::deriv::{
    convergence_order, exterior_derivative_at, exterior_derivative_refined, ConvergenceOrder,
    DerivConfig,
};
use fluxform_core::forms::parse_form;
use fluxform_core::integrate::QuadratureSpec;
use fluxform_core::verify::{compatibility_check, mvt_locate};
use fluxform_core::FormField;

fn field(text: &str, n: usize, degree: usize) -> FormField {
    parse_form(text, n, degree).unwrap().to_field()
}

/// Each entry hand-differentiates omega; the stencil must land within
/// second-order range of it at every probe point.
struct Pair {
    omega: &'static str,
    n: usize,
    degree: usize,
    d_omega: &'static str,
    probes: &'static [&'static [f64]],
}

const CORPUS: &[Pair] = &[
    Pair {
        omega: "sin(x1)*cos(x2)",
        n: 2,
        degree: 0,
        d_omega: "cos(x1)*cos(x2)*dx1-sin(x1)*sin(x2)*dx2",
        probes: &[&[0.0, 0.0], &[0.7, -0.3], &[2.0, 1.5]],
    },
    Pair {
        omega: "x1^3*dx2",
        n: 2,
        degree: 1,
        d_omega: "3*x1^2*dx1^dx2",
        probes: &[&[1.0, 0.0], &[-0.5, 2.0]],
    },
    Pair {
        omega: "exp(x1*x2)*dx1",
        n: 2,
        degree: 1,
        d_omega: "-x1*exp(x1*x2)*dx1^dx2",
        probes: &[&[0.5, 0.5], &[1.0, -1.0]],
    },
    Pair {
        omega: "x1*x2*dx3+sin(x3)*dx1",
        n: 3,
        degree: 1,
        d_omega: "(x2-cos(x3))*dx1^dx3+x1*dx2^dx3",
        probes: &[&[0.3, 0.6, 0.9], &[-1.0, 0.5, 0.0]],
    },
    Pair {
        omega: "x1*x3*dx1^dx2+x2^2*dx1^dx3",
        n: 3,
        degree: 2,
        d_omega: "(x1-2*x2)*dx1^dx2^dx3",
        probes: &[&[0.4, 0.2, -0.6], &[1.0, 1.0, 1.0]],
    },
];

#[test]
fn stencil_matches_hand_derivatives_on_the_corpus() {
    let cfg = DerivConfig::default().with_eps(1e-4);
    for pair in CORPUS {
        let omega = field(pair.omega, pair.n, pair.degree);
        let d_ref = parse_form(pair.d_omega, pair.n, pair.degree + 1).unwrap();
        for probe in pair.probes {
            let got = exterior_derivative_at(&omega, probe, &cfg).unwrap();
            let want = d_ref.sample_tensor(probe).unwrap();
            let gap = got.max_component_diff(&want);
            assert!(
                gap <= 1e-6 * (1.0 + want.max_abs()),
                "{} at {probe:?}: gap {gap}",
                pair.omega
            );
        }
    }
}

#[test]
fn compatibility_check_agrees_with_the_corpus() {
    let cfg = DerivConfig::default().with_eps(1e-4);
    for pair in CORPUS {
        let d_ref = parse_form(pair.d_omega, pair.n, pair.degree + 1).unwrap();
        let omega = field(pair.omega, pair.n, pair.degree)
            .with_analytic_derivative(move |x: &[f64]| d_ref.sample_tensor(x));
        for probe in pair.probes {
            let gap = compatibility_check(&omega, probe, &cfg).unwrap();
            assert!(gap <= 1e-6, "{} at {probe:?}: gap {gap}", pair.omega);
        }
    }
}

#[test]
fn richardson_refinement_beats_the_raw_stencil() {
    // coarse eps on a trigonometric field: extrapolation should strip the
    // leading eps^2 term and win by orders of magnitude
    let omega = field("sin(2*x1)*dx2", 2, 1);
    let d_ref = field("2*cos(2*x1)*dx1^dx2", 2, 2);
    let x = [0.4, 0.1];
    let want = d_ref.sample(&x).unwrap();
    let coarse = DerivConfig {
        richardson_levels: 3,
        ..DerivConfig::default().with_eps(0.05)
    };
    let raw_err = exterior_derivative_at(&omega, &x, &coarse)
        .unwrap()
        .max_component_diff(&want);
    let refined = exterior_derivative_refined(&omega, &x, &coarse).unwrap();
    let ref_err = refined.tensor.max_component_diff(&want);
    assert!(
        ref_err < raw_err / 100.0,
        "raw {raw_err}, refined {ref_err}"
    );
    assert!(refined.reliable);
    assert!(
        refined.error_estimate < raw_err,
        "estimate {} vs raw {raw_err}",
        refined.error_estimate
    );
}

#[test]
fn convergence_order_is_two_on_smooth_fields_and_exact_on_linear() {
    let cfg = DerivConfig::default();
    let eps_seq = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

    let omega = field("exp(x1)*sin(x2)*dx2", 2, 1);
    let d_ref = field("exp(x1)*sin(x2)*dx1^dx2", 2, 2);
    let x = [0.3, 1.1];
    let want = d_ref.sample(&x).unwrap();
    match convergence_order(&omega, &x, &eps_seq, &want, &cfg).unwrap() {
        ConvergenceOrder::Slope(s) => {
            assert!((s - 2.0).abs() <= 0.2, "slope {s}")
        }
        ConvergenceOrder::Exact => panic!("transcendental field reported exact"),
    }

    let linear = field("(2*x1+3*x2)*dx2", 2, 1);
    let d_lin = field("2*dx1^dx2", 2, 2);
    let want = d_lin.sample(&[0.0, 0.0]).unwrap();
    match convergence_order(&linear, &[0.7, -0.4], &eps_seq, &want, &cfg).unwrap() {
        ConvergenceOrder::Exact => {}
        ConvergenceOrder::Slope(s) => panic!("linear field gave slope {s} instead of exact"),
    }
}

#[test]
fn refinement_flags_a_discontinuous_derivative() {
    // the derivative of step(x1)*x1*dx2 jumps at x1 = 0; extrapolating
    // across the jump cannot look second-order
    let omega = field("step(x1)*x1*dx2", 2, 1);
    let cfg = DerivConfig {
        richardson_levels: 2,
        ..DerivConfig::default().with_eps(1e-3)
    };
    let r = exterior_derivative_refined(&omega, &[1e-5, 0.0], &cfg).unwrap();
    assert!(!r.reliable, "jump at the probe passed as reliable: {r:?}");
}

#[test]
fn mean_value_point_on_an_exponential_field() {
    // exp(x1) dx2 over [0,1]^2: average flux e - 1, attained where
    // exp(xi_1) = e - 1, i.e. xi_1 = log(e - 1) = 0.54132...
    let omega = field("exp(x1)*dx2", 2, 1);
    let r = mvt_locate(
        &omega,
        &Block::unit(2),
        &DerivConfig::default(),
        &QuadratureSpec::new(64).unwrap(),
        9,
        0.0,
    )
    .unwrap();
    let e = std::f64::consts::E;
    assert!((r.target - (e - 1.0)).abs() <= 1e-9, "target {}", r.target);
    let xi_ref = (e - 1.0_f64).ln();
    assert!(
        (r.xi[0] - xi_ref).abs() <= 1e-4,
        "xi {:?} vs {xi_ref}",
        r.xi
    );
    assert!(r.residual <= 1e-6, "residual {}", r.residual);
    for avg in &r.level_averages {
        assert!((avg - r.target).abs() <= 1e-9, "average drifted: {avg}");
    }
}
