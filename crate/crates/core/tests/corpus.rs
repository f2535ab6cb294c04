use dno_core::corpus::{
    default_corpus, lookup, make_nonradial, make_radial, parse_manifest, univariate_suite, NonRadialKind, Profile,
    DEFAULT_MANIFEST,
};
use dno_core::DnoError;

#[test]
fn radial_examples() {
    let f = make_radial(Profile::Power { alpha: 0.5 }, 3, 0.0, 0).unwrap();
    assert!((f.evaluate(&[0.0, 0.0, 0.9]) - 0.9).abs() < 1e-15);
    let g = make_radial(Profile::ShiftedAbs { alpha: 1.0 }, 1, 0.0, 0).unwrap();
    assert_eq!(g.evaluate(&[1.0]), 0.5);
    let h = make_radial(Profile::SmoothCos, 2, 0.0, 0).unwrap();
    assert!((h.evaluate(&[0.0, 0.0]) - 0.5).abs() < 1e-15);
}

#[test]
fn injected_defect_is_recovered_by_the_audit() {
    let f = make_radial(Profile::Linear, 2, 0.05, 3).unwrap();
    let audit = f.audit(11).unwrap();
    assert!((0.049..=0.051).contains(&audit.radial_defect), "{}", audit.radial_defect);
    assert_eq!(f.perturbed_coordinate(), Some(0));
    // the last axis carries the profile untouched
    assert!((f.axis_slice(0.36) - 0.36).abs() < 1e-15);
}

#[test]
fn unperturbed_entries_have_no_defect() {
    for profile in [Profile::Linear, Profile::Power { alpha: 0.5 }, Profile::ShiftedAbs { alpha: 0.5 }, Profile::SmoothCos] {
        for d in [1, 2, 4] {
            let f = make_radial(profile, d, 0.0, 5).unwrap();
            assert!(f.audit(2).unwrap().radial_defect <= 1e-12);
        }
    }
}

#[test]
fn power_profile_quotient_stays_under_one() {
    let f = make_radial(Profile::Power { alpha: 0.5 }, 2, 0.0, 0).unwrap();
    assert!(f.audit(4).unwrap().holder_quotient <= 1.0 + 1e-9);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(make_radial(Profile::Power { alpha: 0.0 }, 2, 0.0, 0), Err(DnoError::Domain(_))));
    assert!(matches!(make_radial(Profile::Power { alpha: 1.5 }, 2, 0.0, 0), Err(DnoError::Domain(_))));
    assert!(matches!(make_radial(Profile::Linear, 2, -0.1, 0), Err(DnoError::Domain(_))));
    assert!(matches!(make_nonradial(NonRadialKind::Coordinate, 1), Err(DnoError::Domain(_))));
}

#[test]
fn nonradial_examples() {
    let c = make_nonradial(NonRadialKind::Coordinate, 2).unwrap();
    assert_eq!(c.evaluate(&[0.3, -0.4]), 0.3);
    assert!(!c.metadata.is_radial);
    assert!(c.audit(0).unwrap().radial_defect >= 0.3);
    let b = make_nonradial(NonRadialKind::Bilinear, 2).unwrap();
    assert_eq!(b.evaluate(&[0.5, 0.5]), 0.25);
}

#[test]
fn default_manifest_builds() {
    let corpus = default_corpus().unwrap();
    assert_eq!(corpus.len(), parse_manifest(DEFAULT_MANIFEST).unwrap().len());
    let tau = lookup("power-half-tau").unwrap();
    assert_eq!(tau.metadata.tau, 0.05);
    assert!(matches!(lookup("nope"), Err(DnoError::Config(_))));
}

#[test]
fn manifest_errors_name_the_line() {
    let err = parse_manifest("# header\nx linear 2 - 0\n").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    let entries = parse_manifest("a power 2 0.5 0.01 4\n").unwrap();
    assert_eq!(entries[0].alpha, Some(0.5));
    let bad = parse_manifest("a power 2 - 0 4\n").unwrap()[0].build();
    assert!(matches!(bad, Err(DnoError::Config(_))));
}

#[test]
fn univariate_suite_is_finite_on_the_interval() {
    let suite = univariate_suite();
    assert_eq!(suite.len(), 5);
    for (name, g) in suite {
        assert!((0..=200).all(|i| g(-1.0 + i as f64 * 0.01).is_finite()), "{name}");
    }
}
