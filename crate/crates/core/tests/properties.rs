use dno_core::activation::{bell, sigmoid, sigmoid_derivative};
use dno_core::analysis::{modulus_on_grid, rate_fit};
use dno_core::constructor::{build_univariate, UnivariateOperator};
use dno_core::precision::{two_prod, two_sum};
use dno_core::LayeredNetwork;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sigmoid_symmetry(t in -700.0f64..700.0) {
        let s = sigmoid(t).unwrap() + sigmoid(-t).unwrap();
        prop_assert!((s - 1.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn bell_is_even_and_positive(t in -30.0f64..30.0) {
        prop_assert_eq!(bell(t).unwrap(), bell(-t).unwrap());
        prop_assert!(bell(t).unwrap() > 0.0);
    }

    #[test]
    fn odd_derivatives_are_even(j in 1usize..8, t in -20.0f64..20.0) {
        let (a, b) = (sigmoid_derivative(j, t).unwrap(), sigmoid_derivative(j, -t).unwrap());
        let same = j % 2 == 1;
        let diff = if same { a - b } else { a + b };
        prop_assert!(diff.abs() <= 1e-10 * a.abs().max(1e-300) + 1e-300);
    }

    #[test]
    fn two_sum_is_error_free(a in -1e10f64..1e10, b in -1e10f64..1e10) {
        let (s, e) = two_sum(a, b);
        prop_assert_eq!(s, a + b);
        // Dekker's fast form is exact when the larger operand comes first
        let (x, y) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
        prop_assert_eq!(e, y - (s - x));
        prop_assert!(e.abs() <= 0.5 * f64::EPSILON * s.abs());
    }

    #[test]
    fn two_prod_is_error_free(a in -1e6f64..1e6, b in -1e6f64..1e6) {
        let (p, e) = two_prod(a, b);
        prop_assert_eq!(p, a * b);
        prop_assert_eq!(a.mul_add(b, -p), e);
    }

    #[test]
    fn univariate_operator_is_linear(
        beta in prop::collection::vec(-2.0f64..2.0, 17),
        gamma in prop::collection::vec(-2.0f64..2.0, 17),
        lambda in -3.0f64..3.0,
        t in -1.0f64..1.0,
    ) {
        let mix: Vec<f64> = beta.iter().zip(&gamma).map(|(b, g)| b + lambda * g).collect();
        let a = UnivariateOperator::from_coefficients(4, beta).unwrap();
        let b = UnivariateOperator::from_coefficients(4, gamma).unwrap();
        let c = UnivariateOperator::from_coefficients(4, mix).unwrap();
        prop_assert!((c.evaluate(t) - a.evaluate(t) - lambda * b.evaluate(t)).abs() < 1e-12);
    }

    #[test]
    fn operator_stays_within_sample_range(n in 1usize..40, t in -1.0f64..1.0, shift in -5.0f64..5.0) {
        let op = build_univariate(|s| (4.0 * s).sin() + shift, n).unwrap();
        let lo = op.coefficients().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = op.coefficients().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let v = op.evaluate(t);
        let slack = 3.0 * (-(n as f64)).exp() * (hi.abs().max(lo.abs())) + 1e-12;
        prop_assert!(v >= lo - slack && v <= hi + slack);
    }

    #[test]
    fn modulus_is_monotone(values in prop::collection::vec(-1.0f64..1.0, 2..200), h1 in 0.001f64..1.0, h2 in 0.001f64..1.0) {
        let spacing = 1.0 / (values.len() - 1) as f64;
        let (lo, hi) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
        prop_assert!(modulus_on_grid(&values, spacing, lo).unwrap() <= modulus_on_grid(&values, spacing, hi).unwrap());
    }

    #[test]
    fn rate_fit_recovers_power_laws(alpha in 0.1f64..3.0, c in 0.01f64..100.0) {
        let n = [4usize, 8, 16, 32, 64];
        let errors: Vec<f64> = n.iter().map(|&k| c * (k as f64).powf(-alpha)).collect();
        let r = rate_fit(&n, &errors, 0).unwrap();
        prop_assert!((r.alpha_hat - alpha).abs() < 1e-10);
    }

    #[test]
    fn network_json_round_trips(
        w in prop::collection::vec(-1e3f64..1e3, 6),
        b in prop::collection::vec(-1e3f64..1e3, 3),
        a in prop::collection::vec(-1e3f64..1e3, 3),
        k in -1e3f64..1e3,
    ) {
        let layer = dno_core::Layer::new(3, 2, w, b).unwrap();
        let net = LayeredNetwork::new(2, vec![layer], a, k).unwrap();
        let back = LayeredNetwork::from_json(&net.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, net);
    }
}
