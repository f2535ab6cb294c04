use approx::assert_relative_eq;
use dno_core::activation::{bell, bell_derivative, bell_envelope, sigmoid, sigmoid_derivative, BELL_ENVELOPE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sigmoid_spec_examples() {
    assert_eq!(sigmoid(0.0).unwrap(), 0.5);
    // mpmath, 25 digits: 0.7310585786300048792511592
    assert_relative_eq!(sigmoid(1.0).unwrap(), 0.731_058_578_630_004_9, max_relative = 1e-16);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let t: f64 = rng.random_range(-50.0..50.0);
        assert!((sigmoid(t).unwrap() + sigmoid(-t).unwrap() - 1.0).abs() <= 2.0 * f64::EPSILON);
    }
}

#[test]
fn sigmoid_is_strictly_increasing_on_a_grid() {
    let values: Vec<f64> = (-3000..=3000).map(|i| sigmoid(i as f64 * 0.01).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
    assert!(values.iter().all(|&v| v > 0.0 && v < 1.0));
}

#[test]
fn derivative_spec_examples() {
    assert_eq!(sigmoid_derivative(1, 0.0).unwrap(), 0.25);
    assert!(sigmoid_derivative(2, 0.0).unwrap().abs() <= f64::EPSILON);
    assert!(sigmoid_derivative(4, 0.0).unwrap().abs() <= f64::EPSILON);
}

#[test]
fn bell_spec_examples() {
    // mpmath: (sigma(1) - sigma(-1)) / 2 = 0.2310585786300048792511592
    assert_relative_eq!(bell(0.0).unwrap(), 0.231_058_578_630_004_88, max_relative = 1e-15);
    for t in [0.1, 1.7, 33.0] {
        assert_eq!(bell(t).unwrap(), bell(-t).unwrap());
    }
    assert_eq!(bell_derivative(0.0).unwrap(), 0.0);
    assert!(bell_derivative(0.5).unwrap() < 0.0);
    // mpmath: (e^2 - 1) / (2e) = sinh(1) = 1.175201193643801456882382
    assert_relative_eq!(BELL_ENVELOPE, 1.175_201_193_643_801_4, max_relative = 1e-16);
}

#[test]
fn bell_integrates_to_one() {
    // composite Simpson on [-60, 60]; mpmath quad gives 1 - 2e-26
    let m = 120_000;
    let h = 120.0 / m as f64;
    let mut acc = bell(-60.0).unwrap() + bell(60.0).unwrap();
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * bell(-60.0 + i as f64 * h).unwrap();
    }
    assert!((acc * h / 3.0 - 1.0).abs() < 1e-8);
}

#[test]
fn partition_of_unity_on_seeded_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let worst = (0..1000)
        .map(|_| {
            let t: f64 = rng.random_range(-5.0..5.0);
            ((-60..=60).map(|i| bell(t - i as f64).unwrap()).sum::<f64>() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn bell_decays_under_its_envelope() {
    for i in -6000..=6000 {
        let t = i as f64 * 0.01;
        assert!(bell(t).unwrap() <= bell_envelope(t) * (1.0 + 1e-12));
        assert!(bell_derivative(t).unwrap().abs() <= bell_envelope(t) * (1.0 + 1e-12));
    }
}

#[test]
fn bell_derivative_matches_differences_on_minus_ten_to_ten() {
    let h = 1e-5;
    for i in 0..=2000 {
        let t = -10.0 + i as f64 * 0.01;
        if t == 0.0 || i == 1000 {
            continue;
        }
        let fd = (bell(t + h).unwrap() - bell(t - h).unwrap()) / (2.0 * h);
        let d = bell_derivative(t).unwrap();
        assert!(((fd - d) / d).abs() < 1e-7, "t = {t}");
    }
}
