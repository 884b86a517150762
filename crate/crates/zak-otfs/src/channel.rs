//! Physical delay-Doppler channels: tapped-delay-line profiles, the built-in
//! Vehicular-A power-delay profile, text-file TDL loading, and seeded
//! per-trial channel draws.

use crate::error::Error;
use crate::{Result, C64};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use std::path::Path as FsPath;

/// One propagation path: complex gain, delay in seconds, Doppler in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: C64,
    pub delay: f64,
    pub doppler: f64,
}

/// A finite set of paths; the discrete DD impulse response of the channel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet {
    pub paths: Vec<Path>,
}

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        for (i, p) in paths.iter().enumerate() {
            if !p.gain.re.is_finite()
                || !p.gain.im.is_finite()
                || !p.delay.is_finite()
                || !p.doppler.is_finite()
            {
                return Err(Error::InvalidParameter(format!("path {i} has non-finite parameters")));
            }
            if p.delay < 0.0 {
                return Err(Error::InvalidParameter(format!("path {i} has negative delay")));
            }
        }
        Ok(Self { paths })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn max_delay(&self) -> f64 {
        self.paths.iter().map(|p| p.delay).fold(0.0, f64::max)
    }

    pub fn max_abs_doppler(&self) -> f64 {
        self.paths.iter().map(|p| p.doppler.abs()).fold(0.0, f64::max)
    }

    /// Single path with unit gain; used for basis responses.
    pub fn single(delay: f64, doppler: f64) -> Self {
        Self { paths: vec![Path { gain: C64::new(1.0, 0.0), delay, doppler }] }
    }
}

/// Per-tap Doppler law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DopplerModel {
    /// `nu_i = nu_max * cos(theta_i)` with `theta_i ~ U[0, 2*pi)`.
    CosineUniform,
}

/// Tapped-delay-line profile: per-tap delays and relative powers plus the
/// Doppler law shared by all taps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    pub name: String,
    pub delays: Vec<f64>,
    pub powers_db: Vec<f64>,
    pub nu_max: f64,
    pub doppler_model: DopplerModel,
}

impl ChannelProfile {
    /// Linearized tap powers normalized to unit total.
    pub fn normalized_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self.powers_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
        let total: f64 = lin.iter().sum();
        lin.iter().map(|p| p / total).collect()
    }

    pub fn num_taps(&self) -> usize {
        self.delays.len()
    }

    pub fn max_delay(&self) -> f64 {
        self.delays.iter().copied().fold(0.0, f64::max)
    }
}

/// Built-in six-tap Vehicular-A profile.
///
/// Delays (us): 0, 0.31, 0.71, 1.09, 1.73, 2.51;
/// powers (dB): 0, -1, -9, -10, -15, -20; `nu_max` = 815 Hz.
pub fn veh_a_profile() -> ChannelProfile {
    ChannelProfile {
        name: "veh-a".into(),
        delays: vec![0.0, 0.31e-6, 0.71e-6, 1.09e-6, 1.73e-6, 2.51e-6],
        powers_db: vec![0.0, -1.0, -9.0, -10.0, -15.0, -20.0],
        nu_max: 815.0,
        doppler_model: DopplerModel::CosineUniform,
    }
}

/// Load a TDL profile from a plain text file: one tap per line,
/// `normalized_delay power_dB`, with `#` comments and blank lines ignored.
/// Delays are multiplied by `delay_scaling` (seconds).
pub fn load_tdl_profile(
    path: impl AsRef<FsPath>,
    delay_scaling: f64,
    nu_max: f64,
) -> Result<ChannelProfile> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_tdl(&text, delay_scaling, nu_max, path.as_ref().display().to_string())
}

fn parse_tdl(text: &str, delay_scaling: f64, nu_max: f64, name: String) -> Result<ChannelProfile> {
    let mut delays = Vec::new();
    let mut powers_db = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let d: f64 = it
            .next()
            .ok_or_else(|| Error::Parse { line: lineno + 1, msg: "missing delay".into() })?
            .parse()
            .map_err(|_| Error::Parse { line: lineno + 1, msg: format!("bad delay in {line:?}") })?;
        let p: f64 = it
            .next()
            .ok_or_else(|| Error::Parse { line: lineno + 1, msg: "missing power".into() })?
            .parse()
            .map_err(|_| Error::Parse { line: lineno + 1, msg: format!("bad power in {line:?}") })?;
        if it.next().is_some() {
            return Err(Error::Parse { line: lineno + 1, msg: "expected two columns".into() });
        }
        delays.push(d * delay_scaling);
        powers_db.push(p);
    }
    if delays.is_empty() {
        return Err(Error::EmptyProfile);
    }
    Ok(ChannelProfile { name, delays, powers_db, nu_max, doppler_model: DopplerModel::CosineUniform })
}

/// Draw one channel realization. Per tap: `theta ~ U[0, 2*pi)` gives the
/// Doppler `nu_max * cos(theta)`, and the gain is circularly-symmetric
/// complex Gaussian with variance equal to the normalized tap power.
/// Fully determined by `(seed, stream)`.
pub fn draw_channel(profile: &ChannelProfile, seed: u64, stream: u64) -> PathSet {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let powers = profile.normalized_powers();
    let mut paths = Vec::with_capacity(profile.num_taps());
    for (i, &delay) in profile.delays.iter().enumerate() {
        let theta: f64 = rng.gen_range(0.0..2.0 * PI);
        let doppler = match profile.doppler_model {
            DopplerModel::CosineUniform => profile.nu_max * theta.cos(),
        };
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let sigma = (powers[i] / 2.0).sqrt();
        paths.push(Path { gain: C64::new(sigma * z1, sigma * z2), delay, doppler });
    }
    PathSet { paths }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn veh_a_table_values() {
        let p = veh_a_profile();
        assert_eq!(p.num_taps(), 6);
        assert!((p.delays[5] - 2.51e-6).abs() < 1e-18);
        assert!((p.powers_db[1] + 1.0).abs() < 1e-12);
        assert!((p.nu_max - 815.0).abs() < 1e-12);
        let total: f64 = p.normalized_powers().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crystallization_margins() {
        // Veh-A against the default grid: delay spread far below tau_p and
        // Doppler spread far below nu_p.
        let p = veh_a_profile();
        let grid = crate::GridConfig::new(64, 24, 15e3).unwrap();
        assert!(p.max_delay() < 0.25 * grid.tau_p());
        assert!(2.0 * p.nu_max < 0.25 * grid.nu_p());
    }

    #[test]
    fn tdl_single_tap() {
        let p = parse_tdl("0.0 0.0\n", 302e-9, 3000.0, "t".into()).unwrap();
        assert_eq!(p.num_taps(), 1);
        assert_eq!(p.delays[0], 0.0);
        assert!((p.normalized_powers()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tdl_23_taps_scaled() {
        let mut text = String::from("# synthetic 23-tap profile\n");
        for i in 0..23 {
            text.push_str(&format!("{} {}\n", i as f64 * 0.45, -(i as f64) * 0.9));
        }
        let p = parse_tdl(&text, 302e-9, 3000.0, "t".into()).unwrap();
        assert_eq!(p.num_taps(), 23);
        let expect_max = 302e-9 * 22.0 * 0.45;
        assert!((p.max_delay() - expect_max).abs() < 1e-18);
        assert!((p.normalized_powers().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tdl_parse_error_names_line() {
        let err = parse_tdl("0.0 0.0\nnot_a_number -3.0\n", 1.0, 100.0, "t".into()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(matches!(parse_tdl("# only comments\n", 1.0, 1.0, "t".into()), Err(Error::EmptyProfile)));
    }

    #[test]
    fn draw_is_deterministic() {
        let p = veh_a_profile();
        let a = draw_channel(&p, 42, 7);
        let b = draw_channel(&p, 42, 7);
        assert_eq!(a, b);
        let c = draw_channel(&p, 42, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn draw_normalization_monte_carlo() {
        let p = veh_a_profile();
        let trials = 100_000;
        let mut acc = 0.0;
        for t in 0..trials {
            let ch = draw_channel(&p, 1, t);
            acc += ch.paths.iter().map(|q| q.gain.norm_sqr()).sum::<f64>();
        }
        let mean = acc / trials as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean total power {mean}");
    }

    #[test]
    fn doppler_follows_arcsine_law() {
        // nu/nu_max = cos(U[0,2pi)) has CDF F(x) = 1/2 + asin(x)/pi.
        // Kolmogorov-Smirnov against it; critical value for alpha = 0.01
        // at n = 1e5 is 1.628/sqrt(n).
        let p = veh_a_profile();
        let n = 100_000usize;
        let mut xs: Vec<f64> = (0..n).map(|t| draw_channel(&p, 2, t as u64).paths[0].doppler / p.nu_max).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let f = 0.5 + x.clamp(-1.0, 1.0).asin() / PI;
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            d = d.max((f - lo).abs()).max((hi - f).abs());
        }
        let crit = 1.628 / (n as f64).sqrt();
        assert!(d < crit, "KS statistic {d} exceeds {crit}");
    }

    #[test]
    fn rejects_non_finite_paths() {
        let bad = vec![Path { gain: C64::new(f64::NAN, 0.0), delay: 0.0, doppler: 0.0 }];
        assert!(PathSet::new(bad).is_err());
        let neg = vec![Path { gain: C64::new(1.0, 0.0), delay: -1e-6, doppler: 0.0 }];
        assert!(PathSet::new(neg).is_err());
    }
}
