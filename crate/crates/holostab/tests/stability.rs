use holostab::bounds::ip1_bound;
use holostab::field::{GridSpec, SupportSpec};
use holostab::fresnel::FresnelNumber;
use holostab::spectral::dense::{sigma_min, t_matrix};
use holostab::spectral::{
    gram_lambda_max, least_stable_mode, prolate_eigs, smallest_sv_t, smallest_sv_t_with, stability_constant_ip1,
    SvdMethod, SvdOptions,
};

fn desk() -> GridSpec {
    GridSpec::new(1, 16384, 256.0).unwrap()
}

fn fbar(v: f64) -> FresnelNumber {
    FresnelNumber::from_fbar(v).unwrap()
}

#[test]
fn sigma_min_tracks_complement_constant_at_fbar_10() {
    let s = SupportSpec::stripe();
    let sigma = smallest_sv_t(fbar(10.0), &s, desk(), 1e-10).unwrap().value;
    let c = stability_constant_ip1(fbar(10.0), &s, desk(), 1e-10).unwrap().value;
    assert!(sigma >= 0.98 * c, "σ_min {sigma:e} vs C {c:e}");
    assert!(sigma > 1.72e-3 / 2.0 && sigma < 1.72e-3 * 2.0, "σ_min {sigma:e}");
}

#[test]
fn matrix_free_sigma_min_matches_dense_svd() {
    let grid = GridSpec::new(1, 1024, 16.0).unwrap();
    let s = SupportSpec::stripe();
    let f = fbar(4.0);
    let dense = sigma_min(t_matrix(f, &s, grid).unwrap());
    let lanczos = smallest_sv_t(f, &s, grid, 1e-12).unwrap().value;
    let shifted = smallest_sv_t_with(
        f,
        &s,
        grid,
        &SvdOptions { method: SvdMethod::ShiftedPower { shift: 4.0 }, tol: 1e-13, ..SvdOptions::default() },
    )
    .unwrap()
    .value;
    assert!((lanczos - dense).abs() <= 1e-6 * dense, "{lanczos:e} vs {dense:e}");
    assert!((shifted - dense).abs() <= 1e-3 * dense, "{shifted:e} vs {dense:e}");
}

#[test]
fn least_stable_mode_is_a_chirped_prolate() {
    let m = least_stable_mode(fbar(10.0), &SupportSpec::stripe(), desk()).unwrap();
    assert!(m.correlation >= 0.95, "correlation {}", m.correlation);
    assert!((m.mode.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn gram_top_eigenvalue_matches_prolate_kernel() {
    // 128 samples across the unit stripe.
    let grid = GridSpec::new(1, 65536, 512.0).unwrap();
    let f = fbar(5.0);
    let gram = gram_lambda_max(f, &SupportSpec::stripe(), grid, 1e-12).unwrap().value;
    let kernel = prolate_eigs(f.value() / 8.0, 1, 1024).unwrap().eigenvalues[0];
    assert!((gram - kernel).abs() <= 1e-3 * kernel, "{gram} vs {kernel}");
}

#[test]
fn complement_constant_sits_below_two_term_bound_and_decays() {
    let s = SupportSpec::stripe();
    let cs: Vec<f64> =
        [4.0, 6.0, 8.0].iter().map(|&v| stability_constant_ip1(fbar(v), &s, desk(), 1e-10).unwrap().value).collect();
    assert!(cs.windows(2).all(|w| w[1] < w[0]));
    for (&v, &c) in [6.0, 8.0].iter().zip(&cs[1..]) {
        let b = ip1_bound(fbar(v).value()).unwrap();
        assert!(c < b && c > 0.75 * b, "fbar {v}: {c:e} vs {b:e}");
    }
}

#[test]
fn asymptotic_regime_is_flagged() {
    let r = stability_constant_ip1(fbar(20.0), &SupportSpec::stripe(), desk(), 1e-10).unwrap();
    assert!(r.warning.is_some());
    assert_eq!(r.value, ip1_bound(fbar(20.0).value()).unwrap());
}
