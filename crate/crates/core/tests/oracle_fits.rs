use critspectra::fitting::{exponent_vs_size, fit_power_law, FitWindow, StudyTemplate};
use critspectra::oracle::{circulant_eigenvalues, fit_circulant, theoretical_zeta, CirculantSpec};
use critspectra::spectra::{eigenvalues_symmetric, zipf_series};

fn assert_dense_matches(spec: CirculantSpec) {
    let fft = circulant_eigenvalues(&spec).unwrap();
    let dense = eigenvalues_symmetric(spec.sites(), &spec.materialize().unwrap()).unwrap();
    let scale = fft.values()[0].abs();
    for (a, b) in fft.values().iter().zip(dense.values()) {
        assert!((a - b).abs() <= 1e-8 * scale, "{a} vs {b}");
    }
}

#[test]
fn fft_matches_dense_in_one_dimension() {
    assert_dense_matches(CirculantSpec::new(1, 64, 0.25));
}

#[test]
fn fft_matches_dense_in_two_dimensions() {
    assert_dense_matches(CirculantSpec::new(2, 8, 0.25));
    assert_dense_matches(CirculantSpec {
        prefactor: 0.4,
        f0: 2.0,
        ..CirculantSpec::new(2, 6, 0.7)
    });
}

#[test]
fn two_dimensional_exponent_near_theory() {
    let fit = fit_circulant(&CirculantSpec::new(2, 64, 0.25), None).unwrap();
    assert!((fit.zeta - theoretical_zeta(2, 0.25).unwrap()).abs() < 0.03, "{}", fit.zeta);
}

#[test]
fn prefactor_does_not_move_the_exponent() {
    let base = CirculantSpec::new(2, 32, 0.25);
    let window = FitWindow::new(3, 40).unwrap();
    let a = fit_circulant(&base, Some(window)).unwrap();
    let scaled = CirculantSpec {
        prefactor: 3.0,
        f0: 3.0,
        ..base
    };
    let b = fit_circulant(&scaled, Some(window)).unwrap();
    assert!((a.zeta - b.zeta).abs() < 1e-10);
    assert!((b.log_prefactor - a.log_prefactor - 3f64.ln()).abs() < 1e-10);
}

#[test]
fn default_window_at_small_size_is_rejected() {
    let spec = CirculantSpec::new(2, 8, 0.25);
    assert!(fit_circulant(&spec, None).is_err());
    let zipf = zipf_series(&circulant_eigenvalues(&spec).unwrap());
    assert!(fit_power_law(&zipf.points, FitWindow::new(2, 20).unwrap()).is_ok());
}

#[test]
fn study_is_deterministic_and_ordered() {
    let template = StudyTemplate {
        beta2j: 0.6,
        tau_per_site: 2.0,
        equilibration_steps: 20,
        seed: 4,
        window: Some(FitWindow::new(2, 12).unwrap()),
    };
    let a = exponent_vs_size(&[8, 6], 2, &template).unwrap();
    let b = exponent_vs_size(&[8, 6], 2, &template).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.iter().map(|s| s.side).collect::<Vec<_>>(), [8, 6]);
    assert!(a.iter().all(|s| s.runs.len() == 2 && s.stderr > 0.0));
    assert_ne!(a[0].runs[0].seed, a[0].runs[1].seed);
}
