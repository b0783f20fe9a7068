//! Closed-form stability bounds and their constants.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::ctf::TwoDistanceSpec;
use crate::error::{Error, Result};
use crate::io::fmt_float;

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive and finite")))
    }
}

/// `(2πf)^{1/4} (1 - 3/(8f)) e^{-f/8}`, the two-term asymptotic of the
/// single-hologram stability constant with a stripe support.
pub fn ip1_bound(f: f64) -> Result<f64> {
    positive("f", f)?;
    if f < 8.0 {
        log::warn!("ip1_bound: f = {f} is outside the asymptotic regime");
    }
    Ok((2.0 * PI * f).powf(0.25) * (1.0 - 3.0 / (8.0 * f)) * (-f / 8.0).exp())
}

/// Two-term asymptotic of `1 - λ_{c,j}` at `c = f/8`:
/// `(2π)^{1/2} f^{j+1/2} / j! · (1 - (6j² - 2j + 3)/(4f)) · e^{-f/4}`.
pub fn prolate_asymptotic(f: f64, j: usize) -> Result<f64> {
    positive("f", f)?;
    let jf = j as f64;
    let log_fact: f64 = (1..=j).map(|k| (k as f64).ln()).sum();
    let lead = (0.5 * (2.0 * PI).ln() + (jf + 0.5) * f.ln() - log_fact - f / 4.0).exp();
    Ok(lead * (1.0 - (6.0 * jf * jf - 2.0 * jf + 3.0) / (4.0 * f)))
}

/// Proof constants of the homogeneous-object bound in dimension `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ip2Constants {
    pub m: usize,
    #[serde(rename = "C_0")]
    pub c0: f64,
    #[serde(rename = "C_1")]
    pub c1_big: f64,
    #[serde(rename = "zeta_0")]
    pub zeta0: f64,
    #[serde(rename = "c_1")]
    pub c1: f64,
    #[serde(rename = "c_2")]
    pub c2: f64,
    #[serde(rename = "c_3")]
    pub c3: f64,
    #[serde(rename = "c_4")]
    pub c4: f64,
}

impl Ip2Constants {
    /// Name/value pairs in report order.
    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("C_0", self.c0),
            ("C_1", self.c1_big),
            ("zeta_0", self.zeta0),
            ("c_1", self.c1),
            ("c_2", self.c2),
            ("c_3", self.c3),
            ("c_4", self.c4),
        ]
    }
}

pub fn ip2_constants(m: usize) -> Result<Ip2Constants> {
    if m == 0 {
        return Err(Error::InvalidParameter("dimension m must be at least 1".into()));
    }
    let e = PI / 6.0;
    let c0 = (e.sin() / e).powi(2);
    let delta = if m == 2 { 1.0 / 384.0 } else { 0.0 };
    let c1_big = 121.0 / 576.0 * ((5.0f64 / 6.0).powi(m as i32 - 1) - delta);
    let mf = m as f64;
    let zeta0 = c1_big.min(mf / (mf + 4.0));
    Ok(Ip2Constants {
        m,
        c0,
        c1_big,
        zeta0,
        c1: (PI * PI * c0 * zeta0 / 27.0).sqrt(),
        c2: (1600.0 * c0 * zeta0.powi(3) / 27.0).sqrt(),
        c3: (2.0 * c0 * c1_big / 9.0).sqrt(),
        c4: (32.0 * PI * c0).sqrt() * c1_big,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Problem {
    #[serde(rename = "IP1")]
    Ip1,
    #[serde(rename = "IP2")]
    Ip2,
    #[serde(rename = "IP3")]
    Ip3,
}

impl Problem {
    pub fn tag(&self) -> &'static str {
        match self {
            Problem::Ip1 => "IP1",
            Problem::Ip2 => "IP2",
            Problem::Ip3 => "IP3",
        }
    }
}

/// Which term of `max{min{c₁, c₂/f}, min{c₃α, c₄/√f}}` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Asymptotic,
    Plateau,
    InverseF,
    LinearAlpha,
    InverseSqrtF,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::Asymptotic => "asymptotic",
            Regime::Plateau => "plateau",
            Regime::InverseF => "inverse_f",
            Regime::LinearAlpha => "linear_alpha",
            Regime::InverseSqrtF => "inverse_sqrt_f",
        }
    }
}

/// An analytic bound with the constants that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub problem: Problem,
    pub f: f64,
    pub alpha: f64,
    pub m: usize,
    pub value: f64,
    pub regime: Regime,
    pub constants: Option<Ip2Constants>,
    pub eps_opt: Option<f64>,
}

/// Column order of [`BoundReport::csv_row`].
pub const BOUND_CSV_HEADER: [&str; 14] =
    ["problem", "f", "alpha", "m", "value", "regime", "C_0", "C_1", "zeta_0", "c_1", "c_2", "c_3", "c_4", "eps_opt"];

impl BoundReport {
    pub fn csv_row(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        let mut row = vec![
            self.problem.tag().to_string(),
            fmt_float(self.f),
            fmt_float(self.alpha),
            self.m.to_string(),
            fmt_float(self.value),
            self.regime.tag().to_string(),
        ];
        match &self.constants {
            Some(c) => row.extend(c.named().iter().map(|(_, v)| fmt_float(*v))),
            None => row.extend(std::iter::repeat(String::new()).take(7)),
        }
        row.push(opt(self.eps_opt));
        row
    }
}

pub fn ip1_report(f: f64) -> Result<BoundReport> {
    Ok(BoundReport {
        problem: Problem::Ip1,
        f,
        alpha: 0.0,
        m: 1,
        value: ip1_bound(f)?,
        regime: Regime::Asymptotic,
        constants: None,
        eps_opt: None,
    })
}

/// `max{min{c₁, c₂/f}, min{c₃α, c₄/√f}}` for homogeneous objects supported
/// in a ball of diameter 1 in `ℝ^m`.
pub fn ip2_bound(f: f64, alpha: f64, m: usize) -> Result<BoundReport> {
    positive("f", f)?;
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("homogeneity angle {alpha} outside [0, π/2]")));
    }
    let k = ip2_constants(m)?;
    let (first, r1) = if k.c1 <= k.c2 / f { (k.c1, Regime::Plateau) } else { (k.c2 / f, Regime::InverseF) };
    let (second, r2) = if k.c3 * alpha <= k.c4 / f.sqrt() {
        (k.c3 * alpha, Regime::LinearAlpha)
    } else {
        (k.c4 / f.sqrt(), Regime::InverseSqrtF)
    };
    let (value, regime, eps) = if first >= second {
        (first, r1, (PI / 6.0).min(20.0 * k.zeta0 / (3.0 * f)))
    } else {
        (second, r2, (alpha / 3.0).min((16.0 * PI * k.c1_big / f).sqrt()))
    };
    Ok(BoundReport { problem: Problem::Ip2, f, alpha, m, value, regime, constants: Some(k), eps_opt: Some(eps) })
}

/// Squared lower bounds before the final simplification, one per branch of
/// the maximum: `(α = 0 branch, α > 0 branch)`. Each is piecewise with a
/// switch point and continuous there.
pub fn ip2_branch_squares(f: f64, alpha: f64, m: usize) -> Result<(f64, f64)> {
    positive("f", f)?;
    let k = ip2_constants(m)?;
    let first = if f < 40.0 * k.zeta0 / PI {
        PI * PI * k.c0 / 9.0 * (k.zeta0 - PI * f / 60.0)
    } else {
        1600.0 * k.c0 * k.zeta0.powi(3) / (27.0 * f * f)
    };
    let second = if alpha == 0.0 {
        0.0
    } else if f < 144.0 * PI * k.c1_big / (alpha * alpha) {
        4.0 * k.c0 * alpha * alpha / 9.0 * (k.c1_big - alpha * alpha * f / (288.0 * PI))
    } else {
        32.0 * PI * k.c0 * k.c1_big * k.c1_big / f
    };
    Ok((first, second))
}

/// Switch points of [`ip2_branch_squares`] in `f`.
pub fn ip2_switch_points(alpha: f64, m: usize) -> Result<(f64, Option<f64>)> {
    let k = ip2_constants(m)?;
    let second = (alpha > 0.0).then(|| 144.0 * PI * k.c1_big / (alpha * alpha));
    Ok((40.0 * k.zeta0 / PI, second))
}

/// `2^{-1/2}` times the pure-phase bound at `|f₋|`.
pub fn ip3_bound(spec: &TwoDistanceSpec, m: usize) -> Result<BoundReport> {
    let inner = ip2_bound(spec.f_minus_abs().value(), 0.0, m)?;
    Ok(BoundReport { problem: Problem::Ip3, value: FRAC_1_SQRT_2 * inner.value, ..inner })
}
