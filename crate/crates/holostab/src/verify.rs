//! Property suites run by the `verify` command and the acceptance harness.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bounds::{
    empirical_ip2_check, ip2_bound, ip2_switch_points, optimality_check, two_distance_check, uncertainty_check,
    FrequencyRegion,
};
use crate::ctf::{
    adjoint_t, forward_s_alpha, forward_t, forward_t_ctf_signed, homogeneous_h, compose_h, CtfSpec, TwoDistanceSpec,
};
use crate::error::Result;
use crate::field::{apply_support, unitary_ft, unitary_ift, Domain, GridSpec, SampledField, SupportSpec};
use crate::fresnel::{propagate, propagate_chirp, FresnelNumber};
use crate::random::{self, FieldRng};
use crate::recon::twin_free_data;
use crate::spectral::dense::{assemble, gram_matrix, spectral_relative_difference, t_matrix};
use crate::spectral::ops::{GramOperator, SupportCoords};
use crate::spectral::{gram_lambda_max, prolate_eigs, stability_constant_ip1};

/// Faults that can be injected to confirm a suite is sensitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Flips the sign of the phase transfer function in the CTF route.
    FlipCtfPhaseSign,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Random fields per suite.
    pub trials: usize,
    pub seed: u64,
    pub mutation: Option<Mutation>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { trials: 100, seed: 2024, mutation: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub module: &'static str,
    pub property: &'static str,
    pub passed: bool,
    pub observed: f64,
    pub relation: Relation,
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SuiteResult {
    fn new(module: &'static str, property: &'static str, observed: f64, relation: Relation, limit: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => observed <= limit,
            Relation::AtLeast => observed >= limit,
        };
        SuiteResult { module, property, passed, observed, relation, limit, error: None }
    }

    /// `"≤ 1e-12"` style requirement text.
    pub fn required(&self) -> String {
        let op = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        format!("{op} {:e}", self.limit)
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        match &self.error {
            Some(e) => format!("{status} {}::{} error: {e}", self.module, self.property),
            None => format!(
                "{status} {}::{} observed {:e} required {}",
                self.module,
                self.property,
                self.observed,
                self.required()
            ),
        }
    }
}

type Suite = fn(&VerifyOptions, &mut FieldRng) -> Result<SuiteResult>;

struct Entry {
    module: &'static str,
    property: &'static str,
    run: Suite,
}

fn rel(a: &SampledField, b: &SampledField) -> f64 {
    a.distance(b).expect("same grid") / b.norm().max(f64::MIN_POSITIVE)
}

fn grid1() -> GridSpec {
    GridSpec::new(1, 256, 8.0).expect("valid grid")
}

fn grid2() -> GridSpec {
    GridSpec::new(2, 64, 4.0).expect("valid grid")
}

fn complex_on(grid: GridSpec, support: &SupportSpec, rng: &mut FieldRng) -> Result<SampledField> {
    random::white_field(grid, support, true, rng)
}

fn unitarity(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for t in 0..o.trials {
        let g = if t % 2 == 0 { grid1() } else { grid2() };
        let h = random::white_full(g, true, rng);
        let fh = unitary_ft(&h)?;
        worst = worst.max((fh.norm() - h.norm()).abs() / h.norm()).max(rel(&unitary_ift(&fh)?, &h));
    }
    Ok(SuiteResult::new("field-core", "unitary_transform", worst, Relation::AtMost, 1e-12))
}

fn projection(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for t in 0..o.trials {
        let (g, s) = if t % 2 == 0 { (grid1(), SupportSpec::stripe()) } else { (grid2(), SupportSpec::ball()) };
        let a = random::white_full(g, true, rng);
        let b = random::white_full(g, true, rng);
        let pa = apply_support(&a, &s, false)?;
        let pb = apply_support(&b, &s, false)?;
        let sym = (pa.inner(&b)? - a.inner(&pb)?).norm() / (a.norm() * b.norm());
        let idem = apply_support(&pa, &s, false)?.distance(&pa)?;
        let shrink = (pa.norm() - a.norm()).max(0.0);
        worst = worst.max(sym).max(idem).max(shrink);
    }
    Ok(SuiteResult::new("field-core", "support_projection", worst, Relation::AtMost, 1e-14))
}

fn fresnel_identities(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let f = FresnelNumber::new(64.0)?;
    let g = grid1();
    let one = SampledField::from_fn(g, Domain::Real, |_| Complex64::new(1.0, 0.0));
    let mut worst = rel(&propagate(&one, f, false)?, &one);
    for _ in 0..o.trials {
        let h = complex_on(g, &SupportSpec::stripe(), rng)?;
        let dh = propagate(&h, f, false)?;
        worst = worst.max((dh.norm() - h.norm()).abs() / h.norm());
        let twice = propagate(&dh, f, false)?;
        worst = worst.max(rel(&twice, &propagate(&h, f.compose(f), false)?));
    }
    Ok(SuiteResult::new("fresnel", "unitary_semigroup", worst, Relation::AtMost, 1e-12))
}

fn chirp_form(_o: &VerifyOptions, _rng: &mut FieldRng) -> Result<SuiteResult> {
    let g = GridSpec::new(1, 4096, 24.0)?;
    let f = FresnelNumber::new(20.0 * PI)?;
    let s = SupportSpec::stripe();
    let h = apply_support(
        &SampledField::from_fn(g, Domain::Real, |x| {
            Complex64::new(1.0, 0.3 * x[0]) * (-(x[0] * x[0]) / (2.0 * 0.08 * 0.08)).exp()
        }),
        &s,
        false,
    )?;
    let a = propagate(&h, f, false)?;
    let b = propagate_chirp(&h, f)?;
    let central = SupportSpec::stripe().with_diameter(g.extent() / 2.0);
    let err = apply_support(&a.sub(&b)?, &central, false)?.max_abs() / a.max_abs();
    Ok(SuiteResult::new("fresnel", "chirp_form_equivalence", err, Relation::AtMost, 1e-6))
}

fn ctf_equivalence(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let sign = if o.mutation == Some(Mutation::FlipCtfPhaseSign) { -1.0 } else { 1.0 };
    let mut worst = 0.0f64;
    for t in 0..o.trials {
        let (g, s) = if t % 2 == 0 { (grid1(), SupportSpec::stripe()) } else { (grid2(), SupportSpec::ball()) };
        let f = FresnelNumber::new(64.0)?;
        let phi = random::white_field(g, &s, false, rng)?;
        let mu = random::white_field(g, &s, false, rng)?;
        let direct = forward_t(&compose_h(&phi, &mu)?, f)?;
        worst = worst.max(rel(&forward_t_ctf_signed(&phi, &mu, f, sign)?, &direct));
    }
    Ok(SuiteResult::new("ctf-forward", "ctf_equals_real_part_form", worst, Relation::AtMost, 1e-12))
}

fn homogeneous(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for t in 0..o.trials {
        let (g, s) = if t % 2 == 0 { (grid1(), SupportSpec::stripe()) } else { (grid2(), SupportSpec::ball()) };
        let alpha = rng.gen_range(0.0..=FRAC_PI_2);
        let spec = CtfSpec::new(FresnelNumber::new(64.0)?, alpha)?;
        let phi = random::white_field(g, &s, false, rng)?;
        let via_t = forward_t(&homogeneous_h(&phi, alpha), spec.f())?;
        worst = worst.max(rel(&forward_s_alpha(&phi, &spec)?, &via_t));
    }
    Ok(SuiteResult::new("ctf-forward", "s_alpha_is_t_of_homogeneous_object", worst, Relation::AtMost, 1e-12))
}

fn adjoint(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let f = FresnelNumber::new(64.0)?;
    let mut worst = 0.0f64;
    for _ in 0..o.trials {
        let g = grid1();
        let h = random::white_full(g, true, rng);
        let y = random::white_full(g, false, rng);
        let lhs = forward_t(&h, f)?.real_inner(&y)?;
        let rhs = h.real_inner(&adjoint_t(&y, f)?)?;
        worst = worst.max((lhs - rhs).abs() / (h.norm() * y.norm()));
    }
    Ok(SuiteResult::new("ctf-forward", "adjoint_identity", worst, Relation::AtMost, 1e-12))
}

fn operator_norm(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let f = FresnelNumber::new(64.0)?;
    let mut worst = 0.0f64;
    for t in 0..o.trials {
        let g = if t % 2 == 0 { grid1() } else { grid2() };
        let h = random::white_full(g, true, rng);
        worst = worst.max(forward_t(&h, f)?.norm() / h.norm());
    }
    Ok(SuiteResult::new("ctf-forward", "norm_at_most_two", worst, Relation::AtMost, 2.0 * (1.0 + 1e-12)))
}

fn twin_elimination(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let f = FresnelNumber::new(64.0)?;
    let half = f.compose(f);
    let mut worst = 0.0f64;
    for t in 0..o.trials {
        let (g, s) = if t % 2 == 0 { (grid1(), SupportSpec::stripe()) } else { (grid2(), SupportSpec::unit_box()) };
        let h = complex_on(g, &s, rng)?;
        let th = forward_t(&h, f)?;
        let twin = twin_free_data(&th, f, &s)?;
        let d2 = apply_support(&propagate(&h, half, false)?, &s, true)?;
        worst = worst.max(twin.distance(&d2)? / h.norm());
        if th.norm() < d2.norm() {
            worst = f64::INFINITY;
        }
    }
    Ok(SuiteResult::new("recon", "twin_image_elimination", worst, Relation::AtMost, 1e-12))
}

fn real_form(c: &DMatrix<Complex64>) -> DMatrix<f64> {
    DMatrix::from_fn(2 * c.nrows(), 2 * c.ncols(), |i, j| {
        let z = c[(i / 2, j / 2)];
        match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

fn oracle_cases() -> Result<Vec<(GridSpec, SupportSpec, FresnelNumber)>> {
    Ok(vec![
        (GridSpec::new(1, 256, 8.0)?, SupportSpec::stripe(), FresnelNumber::new(40.0)?),
        (GridSpec::new(2, 16, 2.0)?, SupportSpec::unit_box(), FresnelNumber::new(30.0)?),
    ])
}

fn dense_gram(_o: &VerifyOptions, _rng: &mut FieldRng) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for (g, s, f) in oracle_cases()? {
        let fast = assemble(&GramOperator::new(f, &s, g)?);
        worst = worst.max(spectral_relative_difference(&fast, &real_form(&gram_matrix(f, &s, g)?)));
    }
    Ok(SuiteResult::new("spectral", "gram_matches_dense_matrix", worst, Relation::AtMost, 1e-10))
}

/// Matrix of `T` on the support built column by column from the
/// FFT-based forward map.
pub fn matrix_free_t(f: FresnelNumber, support: &SupportSpec, grid: GridSpec) -> Result<DMatrix<f64>> {
    let coords = SupportCoords::new(grid, support)?;
    let mut m = DMatrix::zeros(grid.len(), coords.dim());
    let mut e = vec![0.0; coords.dim()];
    for j in 0..coords.dim() {
        e[j] = 1.0;
        let col = forward_t(&coords.scatter(&e), f)?;
        m.column_mut(j).iter_mut().zip(col.values()).for_each(|(a, b)| *a = b.re);
        e[j] = 0.0;
    }
    Ok(m)
}

fn dense_t(_o: &VerifyOptions, _rng: &mut FieldRng) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for (g, s, f) in oracle_cases()? {
        worst = worst.max(spectral_relative_difference(&matrix_free_t(f, &s, g)?, &t_matrix(f, &s, g)?));
    }
    Ok(SuiteResult::new("spectral", "t_matches_dense_matrix", worst, Relation::AtMost, 1e-10))
}

fn prolate_nodes(_o: &VerifyOptions, _rng: &mut FieldRng) -> Result<SuiteResult> {
    let mut bad = 0usize;
    for c in [2.5, 5.0, 7.5] {
        let sys = prolate_eigs(c, 6, 1024)?;
        bad += (0..6).filter(|&j| sys.node_count(j) != j).count();
        bad += usize::from(!sys.eigenvalues.windows(2).all(|w| w[0] > w[1]));
        bad += usize::from(!(sys.eigenvalues[0] < 1.0));
    }
    Ok(SuiteResult::new("spectral", "prolate_nodes_and_order", bad as f64, Relation::AtMost, 0.0))
}

fn gram_spectrum(_o: &VerifyOptions, _rng: &mut FieldRng) -> Result<SuiteResult> {
    let g = GridSpec::new(1, 2048, 32.0)?;
    let s = SupportSpec::stripe();
    let mut worst = 0.0f64;
    for fbar in [1.0, 2.0, 4.0] {
        let f = FresnelNumber::from_fbar(fbar)?;
        let lam = gram_lambda_max(f, &s, g, 1e-12)?.value;
        let c = stability_constant_ip1(f, &s, g, 1e-12)?.value;
        if !(lam > 0.0 && lam < 1.0 && c <= 1.0) {
            worst = f64::INFINITY;
        }
        worst = worst.max((c * c + lam - 1.0).abs());
    }
    Ok(SuiteResult::new("spectral", "gram_spectrum_and_complement_route", worst, Relation::AtMost, 1e-10))
}

fn uncertainty(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let g = grid2();
    let s = SupportSpec::ball();
    let mut worst = f64::NEG_INFINITY;
    for t in 0..o.trials {
        let h = if t % 2 == 0 { random::white_field(g, &s, true, rng)? } else { random::smooth_field(g, &s, true, rng)? };
        let region = match t % 4 {
            0 => FrequencyRegion::Ball { radius: rng.gen_range(1.0..40.0) },
            1 => {
                let a = rng.gen_range(0.0..30.0);
                FrequencyRegion::Annulus { inner: a, outer: a + rng.gen_range(1.0..30.0) }
            }
            2 => FrequencyRegion::Box { half_width: rng.gen_range(1.0..40.0) },
            _ => FrequencyRegion::All,
        };
        let (lhs, rhs) = uncertainty_check(&h, 0.5, &region)?;
        worst = worst.max((lhs - rhs) / rhs);
    }
    Ok(SuiteResult::new("bounds", "uncertainty_inequality", worst, Relation::AtMost, 0.02))
}

fn optimality(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let g = GridSpec::new(1, 512, 16.0)?;
    let s = SupportSpec::stripe();
    let mut worst = f64::NEG_INFINITY;
    for t in 0..o.trials {
        let fbar = [1.0, 10.0, 100.0][t % 3];
        let phi = random::smooth_field(g, &s, false, rng)?;
        let (lhs, rhs) = optimality_check(&phi, FresnelNumber::from_fbar(fbar)?)?;
        worst = worst.max((lhs - rhs) / rhs);
    }
    Ok(SuiteResult::new("bounds", "optimality_inequality", worst, Relation::AtMost, 1e-12))
}

fn ip2_lower(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let g = grid2();
    let mut violations = 0usize;
    let alphas = [0.0, 0.3, FRAC_PI_2];
    let trials = 2 * o.trials;
    for (k, &alpha) in alphas.iter().enumerate() {
        let n = trials / alphas.len() + usize::from(k < trials % alphas.len());
        let spec = CtfSpec::new(FresnelNumber::from_fbar(10.0)?, alpha)?;
        violations += empirical_ip2_check(&SupportSpec::ball(), &spec, g, n, rng.gen())?.violations;
    }
    Ok(SuiteResult::new("bounds", "ip2_lower_bound", violations as f64, Relation::AtMost, 0.0))
}

fn ip3_lower(o: &VerifyOptions, rng: &mut FieldRng) -> Result<SuiteResult> {
    let g = grid2();
    let s = SupportSpec::ball();
    let spec = TwoDistanceSpec::new(FresnelNumber::from_fbar(10.0)?, FresnelNumber::from_fbar(30.0)?)?;
    let mut violations = 0usize;
    for t in 0..2 * o.trials {
        let (phi, mu) = if t % 2 == 0 {
            (random::white_field(g, &s, false, rng)?, random::white_field(g, &s, false, rng)?)
        } else {
            (random::smooth_field(g, &s, false, rng)?, random::smooth_field(g, &s, false, rng)?)
        };
        let (lhs, rhs) = two_distance_check(&phi, &mu, &spec)?;
        if lhs < rhs * (1.0 - 1e-10) {
            violations += 1;
        }
    }
    Ok(SuiteResult::new("bounds", "ip3_lower_bound", violations as f64, Relation::AtMost, 0.0))
}

fn ip2_shape(_o: &VerifyOptions, _rng: &mut FieldRng) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    let fs: Vec<f64> = (0..60).map(|i| 0.1 * 1.25f64.powi(i)).collect();
    let alphas: Vec<f64> = (0..=16).map(|i| FRAC_PI_2 * i as f64 / 16.0).collect();
    for m in [1, 2] {
        for &a in &alphas {
            let vals: Vec<f64> = fs.iter().map(|&f| ip2_bound(f, a, m).map(|r| r.value)).collect::<Result<_>>()?;
            worst = worst.max(vals.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max));
        }
        for &f in &fs {
            let vals: Vec<f64> = alphas.iter().map(|&a| ip2_bound(f, a, m).map(|r| r.value)).collect::<Result<_>>()?;
            worst = worst.max(vals.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max));
        }
        for &a in &alphas {
            let (s1, s2) = ip2_switch_points(a, m)?;
            for s in std::iter::once(s1).chain(s2) {
                let lo = crate::bounds::ip2_branch_squares(s * (1.0 - 1e-15), a, m)?;
                let hi = crate::bounds::ip2_branch_squares(s, a, m)?;
                worst = worst.max((lo.0 - hi.0).abs()).max((lo.1 - hi.1).abs());
            }
        }
    }
    Ok(SuiteResult::new("bounds", "ip2_monotone_and_continuous", worst, Relation::AtMost, 1e-12))
}

fn two_distance_identity(_o: &VerifyOptions, _rng: &mut FieldRng) -> Result<SuiteResult> {
    let spec = TwoDistanceSpec::new(FresnelNumber::from_fbar(10.0)?, FresnelNumber::from_fbar(30.0)?)?;
    let g = grid2();
    let mut worst = 0.0f64;
    for i in 0..g.len() {
        let q = g.xi_sq(i);
        let (a, m) = (spec.adjugate(q), spec.matrix(q));
        let s2 = 2.0 * spec.s_minus(q);
        for r in 0..2 {
            for c in 0..2 {
                let p = a[r][0] * m[0][c] + a[r][1] * m[1][c];
                let e = if r == c { s2 } else { 0.0 };
                worst = worst.max((p - e).abs());
            }
        }
    }
    Ok(SuiteResult::new("recon", "two_distance_adjugate_identity", worst, Relation::AtMost, 1e-12))
}

const SUITES: &[Entry] = &[
    Entry { module: "field-core", property: "unitary_transform", run: unitarity },
    Entry { module: "field-core", property: "support_projection", run: projection },
    Entry { module: "fresnel", property: "unitary_semigroup", run: fresnel_identities },
    Entry { module: "fresnel", property: "chirp_form_equivalence", run: chirp_form },
    Entry { module: "ctf-forward", property: "ctf_equals_real_part_form", run: ctf_equivalence },
    Entry { module: "ctf-forward", property: "s_alpha_is_t_of_homogeneous_object", run: homogeneous },
    Entry { module: "ctf-forward", property: "adjoint_identity", run: adjoint },
    Entry { module: "ctf-forward", property: "norm_at_most_two", run: operator_norm },
    Entry { module: "recon", property: "twin_image_elimination", run: twin_elimination },
    Entry { module: "spectral", property: "gram_matches_dense_matrix", run: dense_gram },
    Entry { module: "spectral", property: "t_matches_dense_matrix", run: dense_t },
    Entry { module: "spectral", property: "prolate_nodes_and_order", run: prolate_nodes },
    Entry { module: "spectral", property: "gram_spectrum_and_complement_route", run: gram_spectrum },
    Entry { module: "bounds", property: "uncertainty_inequality", run: uncertainty },
    Entry { module: "bounds", property: "optimality_inequality", run: optimality },
    Entry { module: "bounds", property: "ip2_lower_bound", run: ip2_lower },
    Entry { module: "bounds", property: "ip3_lower_bound", run: ip3_lower },
    Entry { module: "bounds", property: "ip2_monotone_and_continuous", run: ip2_shape },
    Entry { module: "recon", property: "two_distance_adjugate_identity", run: two_distance_identity },
];

/// `(module, property)` of every suite, in run order.
pub fn suite_names() -> Vec<(&'static str, &'static str)> {
    SUITES.iter().map(|e| (e.module, e.property)).collect()
}

/// Runs a single suite by property name.
pub fn run_suite(property: &str, opts: &VerifyOptions) -> Option<SuiteResult> {
    SUITES.iter().enumerate().find(|(_, e)| e.property == property).map(|(k, e)| run_entry(k, e, opts))
}

fn run_entry(k: usize, e: &Entry, opts: &VerifyOptions) -> SuiteResult {
    let mut rng = random::rng(opts.seed.wrapping_add(k as u64));
    match (e.run)(opts, &mut rng) {
        Ok(r) => r,
        Err(err) => SuiteResult {
            module: e.module,
            property: e.property,
            passed: false,
            observed: f64::NAN,
            relation: Relation::AtMost,
            limit: f64::NAN,
            error: Some(err.to_string()),
        },
    }
}

/// Runs every suite; a suite that errors is reported as failed.
pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteResult> {
    SUITES.iter().enumerate().map(|(k, e)| run_entry(k, e, opts)).collect()
}
