//! Run configuration: defaults per command, overridden by a TOML file and
//! then by command-line flags.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use holostab::field::{GridSpec, SupportSpec};
use holostab::phantom::{PhantomKind, PhantomSpec, Target};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SweepIp1,
    Mode,
    Prolate,
    Bounds,
    Simulate,
    Reconstruct,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SweepIp1 => "sweep-ip1",
            Command::Mode => "mode",
            Command::Prolate => "prolate",
            Command::Bounds => "bounds",
            Command::Simulate => "simulate",
            Command::Reconstruct => "reconstruct",
            Command::Verify => "verify",
        }
    }
}

/// Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub fbar_min: Option<f64>,
    pub fbar_max: Option<f64>,
    pub fbar_steps: Option<usize>,
    pub fbar: Option<f64>,
    pub fbar2: Option<f64>,
    /// Raw Fresnel numbers `f`, used by `prolate` instead of the `fbar` range.
    pub fresnel: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub dims: Option<Vec<usize>>,
    pub ip3_ratio: Option<f64>,
    pub dim: Option<usize>,
    pub grid_n: Option<usize>,
    pub support_n: Option<usize>,
    pub reg: Option<f64>,
    pub seed: Option<u64>,
    pub paper_scale: Option<bool>,
    pub tol: Option<f64>,
    pub distances: Option<usize>,
    pub noise: Option<f64>,
    pub phantom: Option<PhantomSpec>,
    pub modes: Option<usize>,
    pub nodes: Option<usize>,
    pub trials: Option<usize>,
    pub mutation: Option<String>,
}

impl Overrides {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Layers `top` over `self`, key by key.
    pub fn merged(self, top: Overrides) -> Overrides {
        macro_rules! pick {
            ($($k:ident),*) => { Overrides { $($k: top.$k.or(self.$k)),* } };
        }
        pick!(
            out, input, fbar_min, fbar_max, fbar_steps, fbar, fbar2, fresnel, alpha, alphas, dims, ip3_ratio, dim,
            grid_n, support_n, reg, seed, paper_scale, tol, distances, noise, phantom, modes, nodes, trials, mutation
        )
    }
}

/// Fully resolved settings echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub command: Command,
    pub out: PathBuf,
    pub input: PathBuf,
    pub fbars: Vec<f64>,
    pub fresnel: Vec<f64>,
    pub fbar2: Option<f64>,
    pub alpha: f64,
    pub alphas: Vec<f64>,
    pub dims: Vec<usize>,
    pub ip3_ratio: f64,
    pub dim: usize,
    pub grid_n: usize,
    pub support_n: usize,
    pub reg: Option<f64>,
    pub seed: u64,
    pub paper_scale: bool,
    pub tol: f64,
    pub noise: f64,
    pub phantom: PhantomSpec,
    pub modes: usize,
    pub nodes: usize,
    pub trials: usize,
    pub mutation: Option<String>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect();
    if n > 0 {
        v[0] = a;
        v[n - 1] = if n > 1 { b } else { a };
    }
    v
}

impl Settings {
    pub fn resolve(command: Command, o: Overrides) -> Result<Self, String> {
        let paper = o.paper_scale.unwrap_or(false);
        let (dim_default, n_default, support_default) = match command {
            Command::Simulate | Command::Reconstruct => (2, 128, 32),
            _ if paper => (1, 262144, 512),
            _ => (1, 16384, 64),
        };
        let single = o.fbar.map(|v| vec![v]);
        let fbars = match command {
            Command::Bounds => {
                let (a, b) = (o.fbar_min.unwrap_or(0.1), o.fbar_max.unwrap_or(1000.0));
                if !(a > 0.0 && b >= a) {
                    return Err(format!("bounds needs 0 < fbar-min <= fbar-max, got {a}..{b}"));
                }
                geomspace(a, b, o.fbar_steps.unwrap_or(41))
            }
            Command::Mode | Command::Simulate | Command::Reconstruct => single.unwrap_or_else(|| vec![10.0]),
            _ => single.unwrap_or_else(|| {
                linspace(o.fbar_min.unwrap_or(1.0), o.fbar_max.unwrap_or(10.0), o.fbar_steps.unwrap_or(19))
            }),
        };
        if fbars.is_empty() {
            return Err("the fbar range is empty".into());
        }
        if fbars.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err("fbar values must be positive and finite".into());
        }
        let range_given = o.fbar.is_some() || o.fbar_min.is_some() || o.fbar_max.is_some() || o.fbar_steps.is_some();
        let fresnel = match (o.fresnel, range_given) {
            (Some(v), _) => v,
            (None, true) => fbars.iter().map(|v| 2.0 * PI * v).collect(),
            (None, false) => vec![20.0, 40.0, 60.0],
        };
        let distances = o.distances.unwrap_or(2);
        if !(1..=2).contains(&distances) {
            return Err(format!("distances must be 1 or 2, got {distances}"));
        }
        let fbar2 = (distances == 2).then(|| o.fbar2.unwrap_or(30.0));
        let dim = o.dim.unwrap_or(dim_default);
        let support_shape = if dim == 1 { SupportSpec::stripe() } else { SupportSpec::ball() };
        let seed = o.seed.unwrap_or(if command == Command::Verify { 2024 } else { 0 });
        let phantom = o.phantom.unwrap_or(PhantomSpec {
            seed,
            mu_scale: 0.3,
            ..PhantomSpec::new(PhantomKind::GaussBlobs { count: 5, amplitude: 1.0 }, Target::ComplexH, support_shape, seed)
        });
        let s = Settings {
            command,
            out: o.out.unwrap_or_else(|| PathBuf::from("holostab-out")),
            input: o.input.unwrap_or_else(|| PathBuf::from("holostab-out")),
            fbars,
            fresnel,
            fbar2,
            alpha: o.alpha.unwrap_or(0.0),
            alphas: o.alphas.unwrap_or_else(|| o.alpha.map(|a| vec![a]).unwrap_or(vec![0.0, 0.3, FRAC_PI_2])),
            dims: o.dims.unwrap_or(vec![1, 2, 3]),
            ip3_ratio: o.ip3_ratio.unwrap_or(3.0),
            dim,
            grid_n: o.grid_n.unwrap_or(n_default),
            support_n: o.support_n.unwrap_or(support_default),
            reg: o.reg,
            seed,
            paper_scale: paper,
            tol: o.tol.unwrap_or(1e-10),
            noise: o.noise.unwrap_or(0.0),
            phantom,
            modes: o.modes.unwrap_or(6),
            nodes: o.nodes.unwrap_or(holostab::spectral::prolate::DEFAULT_NODES),
            trials: o.trials.unwrap_or(100),
            mutation: o.mutation,
        };
        if s.support_n == 0 || s.support_n > s.grid_n {
            return Err(format!("support-n {} must lie in 1..=grid-n ({})", s.support_n, s.grid_n));
        }
        if !(s.ip3_ratio > 0.0 && s.ip3_ratio != 1.0) {
            return Err(format!("ip3_ratio {} must be positive and differ from 1", s.ip3_ratio));
        }
        Ok(s)
    }

    /// Grid with the unit support covering `support_n` samples per axis.
    pub fn grid(&self) -> Result<GridSpec, holostab::Error> {
        GridSpec::new(self.dim, self.grid_n, self.grid_n as f64 / self.support_n as f64)
    }

    pub fn support(&self) -> SupportSpec {
        if self.dim == 1 {
            SupportSpec::stripe()
        } else {
            SupportSpec::ball()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_defaults_match_desk_grid() {
        let s = Settings::resolve(Command::SweepIp1, Overrides::default()).unwrap();
        assert_eq!(s.fbars.len(), 19);
        assert_eq!((s.grid_n, s.support_n), (16384, 64));
        assert_eq!(s.grid().unwrap().extent(), 256.0);
        let p = Settings::resolve(Command::SweepIp1, Overrides { paper_scale: Some(true), ..Default::default() }).unwrap();
        assert_eq!((p.grid_n, p.support_n), (262144, 512));
    }

    #[test]
    fn flags_override_file() {
        let file: Overrides = toml::from_str("fbar_min = 3.0\nfbar_steps = 4\nseed = 9").unwrap();
        let flags = Overrides { fbar_steps: Some(2), ..Default::default() };
        let s = Settings::resolve(Command::SweepIp1, file.merged(flags)).unwrap();
        assert_eq!(s.fbars, vec![3.0, 10.0]);
        assert_eq!(s.seed, 9);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<Overrides>("fbar_mni = 3.0").is_err());
    }

    #[test]
    fn bounds_lattice_is_geometric() {
        let s = Settings::resolve(Command::Bounds, Overrides::default()).unwrap();
        assert_eq!(s.fbars.len(), 41);
        assert!((s.fbars[0] - 0.1).abs() < 1e-12 && (s.fbars[40] - 1000.0).abs() < 1e-9);
    }
}
