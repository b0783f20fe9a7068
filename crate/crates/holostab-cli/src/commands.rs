use std::f64::consts::PI;
use std::path::Path;

use holostab::bounds::{ip1_bound, ip1_report, ip2_bound, ip3_bound, prolate_asymptotic, BOUND_CSV_HEADER};
use holostab::ctf::{compose_h, forward_s2, forward_s_alpha, homogeneous_h, nonlinear_forward, CtfSpec, TwoDistanceSpec};
use holostab::field::{apply_support, GridSpec, SampledField, SupportSpec};
use holostab::fresnel::FresnelNumber;
use holostab::io::{fmt_float, read_field, write_csv, write_field};
use holostab::phantom::{add_noise, make_phantom_pair, PhantomSpec};
use holostab::recon::{
    invert_ctf_single, invert_two_distance, masked_spectral_error, recon_metrics, zero_band_mask, ReconConfig,
    ReconMetrics,
};
use holostab::spectral::{
    least_stable_mode, prolate_eigs, smallest_sv_t, stability_constant_ip1, VALIDITY_FBAR,
};
use holostab::verify::{run_all, Mutation, VerifyOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::manifest::Manifest;
use crate::CliError;

type Outcome = Result<(), CliError>;

fn json_out<T: Serialize>(m: &mut Manifest, dir: &Path, name: &str, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(dir.join(name), text + "\n").map_err(|e| CliError::Io(dir.join(name), e))?;
    m.output(name);
    Ok(())
}

fn field_out(m: &mut Manifest, dir: &Path, name: &str, field: &SampledField) -> Outcome {
    write_field(&dir.join(name), field)?;
    m.output(name);
    Ok(())
}

fn csv_out(m: &mut Manifest, dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Outcome {
    write_csv(&dir.join(name), header, rows)?;
    m.output(name);
    Ok(())
}

fn fbar_number(v: f64) -> Result<FresnelNumber, CliError> {
    Ok(FresnelNumber::from_fbar(v)?)
}

pub const SWEEP_HEADER: [&str; 6] = ["fbar", "sigma_min_numeric", "c_ip1_numeric", "ip1_bound", "ratio", "status"];

fn sweep_row(fbar: f64, grid: GridSpec, support: &SupportSpec, tol: f64) -> Vec<String> {
    let nan = || fmt_float(f64::NAN);
    let f = match FresnelNumber::from_fbar(fbar) {
        Ok(f) => f,
        Err(e) => return vec![fmt_float(fbar), nan(), nan(), nan(), nan(), format!("error: {e}")],
    };
    let bound = ip1_bound(f.value()).map(fmt_float).unwrap_or_else(|_| nan());
    let beyond = fbar > VALIDITY_FBAR;
    let sigma = if beyond { Ok(f64::NAN) } else { smallest_sv_t(f, support, grid, tol).map(|r| r.value) };
    let c = stability_constant_ip1(f, support, grid, tol);
    let mut notes = Vec::new();
    if beyond {
        notes.push("asymptotic".to_string());
    }
    let sigma = sigma.unwrap_or_else(|e| {
        notes.push(format!("sigma_min error: {e}"));
        f64::NAN
    });
    let (c, ratio) = match c {
        Ok(r) => (r.value, r.value / ip1_bound(f.value()).unwrap_or(f64::NAN)),
        Err(e) => {
            notes.push(format!("c_ip1 error: {e}"));
            (f64::NAN, f64::NAN)
        }
    };
    let status = if notes.is_empty() { "ok".to_string() } else { notes.join("; ") };
    vec![fmt_float(fbar), fmt_float(sigma), fmt_float(c), bound, fmt_float(ratio), status]
}

pub fn sweep_ip1(s: &Settings, m: &mut Manifest) -> Outcome {
    let grid = s.grid()?;
    let support = s.support();
    support.check_fits(&grid)?;
    let rows: Vec<Vec<String>> = s.fbars.par_iter().map(|&fb| sweep_row(fb, grid, &support, s.tol)).collect();
    for r in &rows {
        log::info!("fbar {} C {} ratio {} ({})", r[0], r[2], r[4], r[5]);
    }
    csv_out(m, &s.out, "sweep_ip1.csv", &SWEEP_HEADER, &rows)
}

#[derive(Serialize)]
struct ModeReport {
    fbar: f64,
    f: f64,
    sigma_min: f64,
    correlation: f64,
    iterations: usize,
    residual: f64,
    mode_norm: f64,
    outside_norm: f64,
}

pub fn mode(s: &Settings, m: &mut Manifest) -> Outcome {
    let fbar = s.fbars[0];
    let f = fbar_number(fbar)?;
    let grid = s.grid()?;
    let support = s.support();
    let lsm = least_stable_mode(f, &support, grid)?;
    field_out(m, &s.out, "mode.fld", &lsm.mode)?;
    field_out(m, &s.out, "mode_demodulated.fld", &lsm.demodulated)?;
    field_out(m, &s.out, "psi0.fld", &lsm.psi0)?;
    let report = ModeReport {
        fbar,
        f: f.value(),
        sigma_min: lsm.sigma_min,
        correlation: lsm.correlation,
        iterations: lsm.iterations,
        residual: lsm.residual,
        mode_norm: lsm.mode.norm(),
        outside_norm: apply_support(&lsm.mode, &support, true)?.norm(),
    };
    json_out(m, &s.out, "mode_report.json", &report)
}

pub const PROLATE_HEADER: [&str; 9] = [
    "f",
    "c",
    "j",
    "lambda",
    "one_minus_lambda",
    "asymptotic_one_minus_lambda",
    "relative_difference",
    "node_count",
    "modal_constant_0j",
];

pub fn prolate(s: &Settings, m: &mut Manifest) -> Outcome {
    let mut rows = Vec::new();
    for &f in &s.fresnel {
        let sys = prolate_eigs(f / 8.0, s.modes, s.nodes)?;
        for j in 0..sys.len() {
            let asym = prolate_asymptotic(f, j)?;
            rows.push(vec![
                fmt_float(f),
                fmt_float(sys.c),
                j.to_string(),
                fmt_float(sys.eigenvalues[j]),
                fmt_float(sys.one_minus[j]),
                fmt_float(asym),
                fmt_float((sys.one_minus[j] - asym).abs() / asym),
                sys.node_count(j).to_string(),
                fmt_float(sys.modal_constant(&[0, j])?),
            ]);
        }
    }
    csv_out(m, &s.out, "prolate.csv", &PROLATE_HEADER, &rows)
}

pub fn bounds(s: &Settings, m: &mut Manifest) -> Outcome {
    let mut rows = Vec::new();
    for &fbar in &s.fbars {
        let f = 2.0 * PI * fbar;
        rows.push(ip1_report(f)?.csv_row());
        for &dim in &s.dims {
            for &alpha in &s.alphas {
                rows.push(ip2_bound(f, alpha, dim)?.csv_row());
            }
        }
        let spec = TwoDistanceSpec::new(FresnelNumber::new(f)?, FresnelNumber::new(f * s.ip3_ratio)?)?;
        for &dim in &s.dims {
            rows.push(ip3_bound(&spec, dim)?.csv_row());
        }
    }
    csv_out(m, &s.out, "bounds.csv", &BOUND_CSV_HEADER, &rows)
}

/// Parameters of a simulated data set, read back by `reconstruct`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub grid: GridSpec,
    pub support: SupportSpec,
    pub fbar1: f64,
    pub fbar2: Option<f64>,
    pub alpha: f64,
    pub noise: f64,
    pub seed: u64,
    pub phantom: PhantomSpec,
    pub h_norm: f64,
    /// `‖(I_j - 1) - T_j h‖` per distance.
    pub nonlinear_minus_linear: Vec<f64>,
}

pub const SIMULATION_FILE: &str = "simulation.json";

pub fn simulate(s: &Settings, m: &mut Manifest) -> Outcome {
    let grid = s.grid()?;
    let support = s.phantom.support;
    let (phi, mu) = make_phantom_pair(&s.phantom, grid)?;
    let f1 = fbar_number(s.fbars[0])?;
    let (h, contrasts, fs) = match s.fbar2 {
        Some(fb2) => {
            let f2 = fbar_number(fb2)?;
            let spec = TwoDistanceSpec::new(f1, f2)?;
            let (c1, c2) = forward_s2(&phi, &mu, &spec)?;
            field_out(m, &s.out, "mu.fld", &mu)?;
            (compose_h(&phi, &mu)?, vec![c1, c2], vec![f1, f2])
        }
        None => {
            let spec = CtfSpec::new(f1, s.alpha)?;
            (homogeneous_h(&phi, s.alpha), vec![forward_s_alpha(&phi, &spec)?], vec![f1])
        }
    };
    field_out(m, &s.out, "phi.fld", &phi)?;
    let mut divergence = Vec::new();
    for (j, (c, f)) in contrasts.iter().zip(&fs).enumerate() {
        let hologram = nonlinear_forward(&h, *f)?;
        let nonlinear = hologram.map(|v| v - 1.0);
        divergence.push(nonlinear.distance(c)?);
        let noisy = add_noise(c, s.noise * c.norm(), s.seed.wrapping_add(100 + j as u64))?;
        field_out(m, &s.out, &format!("contrast_{}.fld", j + 1), &noisy)?;
        field_out(m, &s.out, &format!("hologram_{}.fld", j + 1), &hologram)?;
    }
    let record = SimulationRecord {
        grid,
        support,
        fbar1: s.fbars[0],
        fbar2: s.fbar2,
        alpha: s.alpha,
        noise: s.noise,
        seed: s.seed,
        phantom: s.phantom,
        h_norm: h.norm(),
        nonlinear_minus_linear: divergence,
    };
    json_out(m, &s.out, SIMULATION_FILE, &record)
}

#[derive(Serialize)]
struct ReconReport {
    kind: &'static str,
    reg: Option<f64>,
    phi: Option<ReconMetrics>,
    mu: Option<ReconMetrics>,
    /// Relative spectral error outside 3-bin bands around the zeros of
    /// `sin(|ξ|²/(2f₋))`.
    banded_error_phi: Option<f64>,
    banded_error_mu: Option<f64>,
}

fn read_input(dir: &Path, name: &str) -> Result<SampledField, CliError> {
    let path = dir.join(name);
    if !path.exists() {
        return Err(CliError::MissingInput(path));
    }
    Ok(read_field(&path)?)
}

fn read_truth(dir: &Path, name: &str) -> Result<Option<SampledField>, CliError> {
    let path = dir.join(name);
    Ok(if path.exists() { Some(read_field(&path)?) } else { None })
}

pub fn reconstruct(s: &Settings, m: &mut Manifest) -> Outcome {
    let rec_path = s.input.join(SIMULATION_FILE);
    if !rec_path.exists() {
        return Err(CliError::MissingInput(rec_path));
    }
    let text = std::fs::read_to_string(&rec_path).map_err(|e| CliError::Io(rec_path.clone(), e))?;
    let rec: SimulationRecord =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", rec_path.display())))?;
    let c1 = read_input(&s.input, "contrast_1.fld")?;
    let phi_true = read_truth(&s.input, "phi.fld")?;
    let f1 = fbar_number(rec.fbar1)?;
    let report = match rec.fbar2 {
        Some(fb2) => {
            let c2 = read_input(&s.input, "contrast_2.fld")?;
            let spec = TwoDistanceSpec::new(f1, fbar_number(fb2)?)?;
            let mut cfg = ReconConfig::two_distance(spec);
            cfg.reg = s.reg;
            let (phi, mu) = invert_two_distance(&c1, &c2, &cfg)?;
            field_out(m, &s.out, "phi_est.fld", &phi)?;
            field_out(m, &s.out, "mu_est.fld", &mu)?;
            let (p1, _) = forward_s2(&phi, &mu, &spec)?;
            let mu_true = read_truth(&s.input, "mu.fld")?;
            let mask = zero_band_mask(c1.grid(), &spec, 3.0);
            let metrics = |truth: &Option<SampledField>, est: &SampledField| -> Result<_, CliError> {
                match truth {
                    Some(t) => Ok((
                        Some(recon_metrics(t, est, Some(&rec.support))?.with_residual(&p1, &c1)?),
                        Some(masked_spectral_error(t, est, &mask)?),
                    )),
                    None => Ok((None, None)),
                }
            };
            let (phi_m, phi_b) = metrics(&phi_true, &phi)?;
            let (mu_m, mu_b) = metrics(&mu_true, &mu)?;
            ReconReport { kind: "two_distance", reg: s.reg, phi: phi_m, mu: mu_m, banded_error_phi: phi_b, banded_error_mu: mu_b }
        }
        None => {
            let spec = CtfSpec::new(f1, rec.alpha)?;
            let mut cfg = ReconConfig::single(spec);
            cfg.reg = s.reg;
            let phi = invert_ctf_single(&c1, &cfg)?;
            field_out(m, &s.out, "phi_est.fld", &phi)?;
            let predicted = forward_s_alpha(&phi, &spec)?;
            let phi_m = match &phi_true {
                Some(t) => Some(recon_metrics(t, &phi, Some(&rec.support))?.with_residual(&predicted, &c1)?),
                None => None,
            };
            ReconReport { kind: "single", reg: s.reg, phi: phi_m, mu: None, banded_error_phi: None, banded_error_mu: None }
        }
    };
    json_out(m, &s.out, "metrics.json", &report)
}

fn parse_mutation(name: &str) -> Result<Mutation, CliError> {
    match name.replace('-', "_").as_str() {
        "flip_ctf_phase_sign" => Ok(Mutation::FlipCtfPhaseSign),
        _ => Err(CliError::Usage(format!("unknown mutation {name:?}; known: flip-ctf-phase-sign"))),
    }
}

/// Returns the number of failed suites.
pub fn verify(s: &Settings, m: &mut Manifest) -> Result<usize, CliError> {
    let mutation = s.mutation.as_deref().map(parse_mutation).transpose()?;
    let opts = VerifyOptions { trials: s.trials, seed: s.seed, mutation };
    let results = run_all(&opts);
    let lines: Vec<String> = results.iter().map(|r| r.line()).collect();
    for l in &lines {
        println!("{l}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} suites, {} failed", results.len(), failed);
    std::fs::write(s.out.join("verify.txt"), lines.join("\n") + "\n")
        .map_err(|e| CliError::Io(s.out.join("verify.txt"), e))?;
    m.output("verify.txt");
    json_out(m, &s.out, "verify.json", &results)?;
    Ok(failed)
}
