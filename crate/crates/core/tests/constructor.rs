use dno_core::analysis::{ball_points, direct_bound, GridSpec, MODULUS_RESOLUTION};
use dno_core::constructor::{
    build_dno, build_dno_with, build_univariate, construct_poly_net, make_nodes, norm_net, product_gate, square_net,
    DnoForm, DnoOperator, PolyNetSpec,
};
use dno_core::{DnoError, Precision};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid_sup(net: &dno_core::LayeredNetwork, f: impl Fn(f64) -> f64, precision: Precision) -> f64 {
    (0..=10_000)
        .map(|i| {
            let t = -1.0 + i as f64 * 2e-4;
            (net.evaluate_with(&[t], precision).unwrap() - f(t)).abs()
        })
        .fold(0.0, f64::max)
}

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[test]
fn constant_polynomial_is_exact() {
    let net = construct_poly_net(&PolyNetSpec::new(vec![0.37], 0.1)).unwrap();
    for t in [-1.0, -0.2, 0.0, 0.9] {
        assert_eq!(net.evaluate(&[t]).unwrap(), 0.37);
    }
}

#[test]
fn square_net_examples() {
    for eps in [0.1, 0.05, 0.02] {
        let net = square_net(eps).unwrap();
        assert_eq!(net.widths(), vec![3]);
        assert!(net.evaluate(&[0.0]).unwrap().abs() <= eps);
        assert!((net.evaluate(&[1.0]).unwrap() - 1.0).abs() <= eps);
        assert!((net.evaluate(&[0.7]).unwrap() - 0.49).abs() <= eps);
        assert!(grid_sup(&net, |t| t * t, Precision::Standard) <= eps);
    }
    let net = square_net(0.01).unwrap();
    assert!(grid_sup(&net, |t| t * t, Precision::Extended) <= 0.01);
}

#[test]
fn square_net_weights_stay_below_the_polynomial_bound() {
    // (1 + 1)^6 * eps^-6 with the constant taken as 1
    let eps: f64 = 0.05;
    let net = square_net(eps).unwrap();
    assert!(net.max_abs_weight() <= 64.0 * eps.powi(-6), "{}", net.max_abs_weight());
}

#[test]
fn general_polynomial_is_within_eps() {
    let coefficients = vec![0.2, -0.5, 0.3, 0.8];
    let net = construct_poly_net(&PolyNetSpec::new(coefficients.clone(), 0.05)).unwrap();
    let p = |t: f64| coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c);
    assert!(grid_sup(&net, p, net.min_precision()) <= 0.05);
    assert_eq!(net.widths(), vec![4]);
}

#[test]
fn accuracy_preconditions() {
    assert!(matches!(square_net(0.0), Err(DnoError::Precondition(_))));
    assert!(matches!(square_net(1.0), Err(DnoError::Precondition(_))));
    assert!(matches!(square_net(1e-5), Err(DnoError::Conditioning(_))));
}

#[test]
fn norm_net_examples() {
    let eps = 0.01;
    for d in [1, 2, 5] {
        let net = norm_net(d, eps).unwrap();
        assert_eq!(net.widths(), vec![3 * d]);
        assert!(net.evaluate(&vec![0.0; d]).unwrap().abs() <= d as f64 * eps);
        let worst = ball_points(d, &GridSpec::default())
            .unwrap()
            .iter()
            .map(|x| (net.evaluate(x).unwrap() - sq_norm(x)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= d as f64 * eps, "d = {d}: {worst}");
    }
    let net = norm_net(2, eps).unwrap();
    assert!((net.evaluate(&[0.6, 0.8]).unwrap() - 1.0).abs() <= 0.02);
}

#[test]
fn product_gate_examples() {
    let eps = 0.05;
    let gate = product_gate(eps).unwrap();
    assert_eq!(gate.widths(), vec![9]);
    for t in [-1.0, -0.3, 0.0, 0.6, 1.0] {
        assert!(gate.evaluate(&[t, 0.0]).unwrap().abs() <= eps);
    }
    assert!((gate.evaluate(&[1.0, 1.0]).unwrap() - 1.0).abs() <= eps);
    assert!((gate.evaluate(&[0.5, -0.5]).unwrap() + 0.25).abs() <= eps);
    let mut worst = 0.0f64;
    for i in 0..200 {
        for j in 0..200 {
            let (t, s) = (-1.0 + 2.0 * i as f64 / 199.0, -1.0 + 2.0 * j as f64 / 199.0);
            worst = worst.max((gate.evaluate(&[t, s]).unwrap() - t * s).abs());
        }
    }
    assert!(worst <= eps, "{worst}");
}

#[test]
fn node_layout() {
    let nodes = make_nodes(2, 3).unwrap();
    assert_eq!(nodes.len(), 9);
    assert_eq!(nodes[0], vec![0.0, 0.0, -1.0]);
    assert_eq!(nodes[4], vec![0.0, 0.0, 0.0]);
    assert_eq!(nodes[8], vec![0.0, 0.0, 1.0]);
    assert!(nodes.iter().all(|x| sq_norm(x) <= 1.0));
    assert!(matches!(make_nodes(0, 2), Err(DnoError::Precondition(_))));
}

#[test]
fn univariate_coefficients_for_identity() {
    let op = build_univariate(|t| t, 4).unwrap();
    let want = [
        -1.0, -1.0, -1.0, -1.0, -1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0, 1.0, 1.0, 1.0,
    ];
    assert_eq!(op.coefficients(), &want);
}

#[test]
fn univariate_zero_and_one() {
    let zero = build_univariate(|_| 0.0, 6).unwrap();
    assert!(zero.coefficients().iter().all(|&b| b == 0.0));
    assert_eq!(zero.evaluate(0.4), 0.0);
    let one = build_univariate(|_| 1.0, 10).unwrap();
    // oracle: 3 e^{-10} = 1.36199789287454e-4 (mpmath)
    assert!((one.evaluate(0.3) - 1.0).abs() <= 1.361_997_892_874_54e-4 + 1e-9);
}

#[test]
fn univariate_network_matches_direct_evaluation() {
    let op = build_univariate(|t| (3.0 * t).sin(), 12).unwrap();
    let net = op.to_network().unwrap();
    assert_eq!(net.widths(), vec![2 * (4 * 12 + 1)]);
    for i in 0..=200 {
        let t = -1.0 + i as f64 * 0.01;
        assert!((net.evaluate(&[t]).unwrap() - op.evaluate(t)).abs() < 1e-10);
    }
}

#[test]
fn constant_function_tail() {
    let op = build_dno(|_| 1.0, 10, 0.01, 2).unwrap();
    let worst = ball_points(2, &GridSpec::default())
        .unwrap()
        .iter()
        .map(|x| (op.evaluate(x).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1.361_997_892_874_54e-4 + 1e-9, "{worst}");
}

#[test]
fn operator_is_linear_in_samples() {
    let f = |x: &[f64]| x[1].powi(3) - 0.2;
    let g = |x: &[f64]| (2.0 * x[1]).cos();
    let (a, b) = (build_dno(f, 9, 0.01, 2).unwrap(), build_dno(g, 9, 0.01, 2).unwrap());
    let s = build_dno(|x: &[f64]| f(x) + g(x), 9, 0.01, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let x = [rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7)];
        let lhs = s.evaluate(&x).unwrap();
        let rhs = a.evaluate(&x).unwrap() + b.evaluate(&x).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn flattened_network_agrees_with_direct_evaluation() {
    let op = build_dno(|x: &[f64]| sq_norm(x).sqrt(), 16, 1e-3, 3).unwrap();
    let net = op.flatten().unwrap();
    assert_eq!(net.widths(), vec![9, 2 * 65]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let x = dno_core::analysis::random_ball_point(&mut rng, 3);
        assert!((net.evaluate(&x).unwrap() - op.evaluate(&x).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn radial_operator_factors_through_the_norm_net() {
    let g = |t: f64| (1.0 - t).powi(2);
    let op = build_dno(|x: &[f64]| g(sq_norm(x)), 20, 0.01, 2).unwrap();
    let uni = build_univariate(|t| g((t + 1.0) / 2.0), 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let x = dno_core::analysis::random_ball_point(&mut rng, 2);
        let inner = 2.0 * op.norm_net().evaluate(&x).unwrap() - 1.0;
        assert!((op.evaluate(&x).unwrap() - uni.evaluate(inner)).abs() <= 1e-10);
    }
}

#[test]
fn printed_form_converges_to_the_fourth_power_profile() {
    let g = |t: f64| t;
    let f = |x: &[f64]| g(sq_norm(x));
    let rescaled = build_dno(f, 128, 1e-4, 2).unwrap();
    let printed = build_dno_with(f, 128, 1e-4, 2, DnoForm::AsPrinted).unwrap();
    let x = [0.5, 0.5];
    // |x|^2 = 0.5
    assert!((rescaled.evaluate(&x).unwrap() - 0.5).abs() < 0.02);
    assert!((printed.evaluate(&x).unwrap() - 0.25).abs() < 0.02);
}

#[test]
fn direct_theorem_example() {
    let (n, eps, d) = (64, 1e-3, 2);
    let op = build_dno(|x: &[f64]| sq_norm(x), n, eps, d).unwrap();
    let worst = ball_points(d, &GridSpec::default())
        .unwrap()
        .iter()
        .map(|x| (op.evaluate(x).unwrap() - sq_norm(x)).abs())
        .fold(0.0, f64::max);
    let bound = direct_bound(0.0, d, |t| t, n, eps, 1.0, &GridSpec::new(MODULUS_RESOLUTION, 0, 0)).unwrap();
    assert!(worst <= bound.total, "{worst} > {}", bound.total);
}

#[test]
fn sampler_failure_names_the_node() {
    let err = build_dno(|x: &[f64]| if x[1] > 0.6 { f64::NAN } else { 0.0 }, 4, 0.01, 2).unwrap_err();
    match err {
        DnoError::Data { index, point } => {
            assert!(point[1] > 0.6);
            assert!(index <= 16);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(build_univariate(|t| 1.0 / t, 2), Err(DnoError::Data { index: 4, .. })));
}

#[test]
fn operator_json_round_trip() {
    let op = build_dno(|x: &[f64]| x[0] - x[1], 6, 0.02, 2).unwrap();
    let text = op.to_json().unwrap();
    let back = DnoOperator::from_json(&text).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
    assert_eq!(back.evaluate(&[0.1, 0.2]).unwrap(), op.evaluate(&[0.1, 0.2]).unwrap());
    let tampered = text.replacen("\"n\": 6", "\"n\": 7", 1);
    assert!(DnoOperator::from_json(&tampered).is_err());
}

#[test]
fn operator_rejects_eps_at_the_floor() {
    assert!(matches!(build_dno(|_| 0.0, 4, 1e-5, 2), Err(DnoError::Conditioning(_))));
}
