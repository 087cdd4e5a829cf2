use crate::dsmc::{InitialSpec, RunConfig};
use crate::error::{Error, Result};
use crate::interp::InterpKind;
use crate::spectral::{Frame, SolverConfig};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

/// Every parameter of an experiment, resolved from defaults, an optional
/// `key = value` file and command-line flags, in increasing precedence.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub e: f64,
    /// Moment order `2 + α` in the decay rate `γ(α, e)`.
    pub alpha: f64,
    /// Weight exponent of the `sup_δ` norm.
    pub delta: f64,
    pub grid_n: usize,
    pub x_max: f64,
    pub dt: f64,
    pub t_max: f64,
    pub quad_order: usize,
    pub interp: InterpKind,
    pub frame: Frame,
    pub drift_interval: f64,
    pub init: InitialSpec,
    pub particles: usize,
    pub dsmc_dt: f64,
    pub record_every: f64,
    pub seed: u64,
    pub replicas: usize,
    /// Random collision triples per restitution in the kinematics audit.
    pub triples: usize,
    /// Samples per Monte Carlo change-of-variables estimate.
    pub mc_samples: usize,
    pub steady_tol: f64,
    pub steady_t_max: f64,
    /// Inelasticities `ε = (1 - e)/2` for the sweep, descending.
    pub eps: Vec<f64>,
    /// Decay fits ignore samples before this time.
    pub fit_start: f64,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            e: 0.95,
            alpha: 0.9,
            delta: 0.5,
            grid_n: s.n,
            x_max: s.x_max,
            dt: s.dt,
            t_max: s.t_max,
            quad_order: s.quad_order,
            interp: s.interp,
            frame: s.frame,
            drift_interval: s.drift_interval,
            init: InitialSpec::default(),
            particles: 100_000,
            dsmc_dt: 0.01,
            record_every: 0.5,
            seed: 1,
            replicas: 1,
            triples: 1_000_000,
            mc_samples: 1_000_000,
            steady_tol: 1e-10,
            steady_t_max: 200.0,
            eps: vec![0.1, 0.05, 0.02, 0.01],
            fit_start: 5.0,
            out: None,
            report: None,
        }
    }
}

const KEYS: &[&str] = &[
    "e",
    "alpha",
    "delta",
    "grid_n",
    "x_max",
    "dt",
    "t_max",
    "quad_order",
    "interp",
    "frame",
    "drift_interval",
    "init",
    "particles",
    "dsmc_dt",
    "record_every",
    "seed",
    "replicas",
    "triples",
    "mc_samples",
    "steady_tol",
    "steady_t_max",
    "eps",
    "fit_start",
    "out",
    "report",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value `{value}` for `{key}`")))
}

fn range(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, expected })
    }
}

impl ExperimentConfig {
    /// A grid and step that keep the full verification run to minutes on one
    /// core: `n = 2048`, `x_max = 25`, `dt = 0.01`.
    pub fn desk() -> Self {
        Self {
            grid_n: 2048,
            x_max: 25.0,
            dt: 0.01,
            ..Self::default()
        }
    }

    pub fn keys() -> &'static [&'static str] {
        KEYS
    }

    /// Sets one field from its textual form. An empty value clears an optional path.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "e" => self.e = parse(key, v)?,
            "alpha" => self.alpha = parse(key, v)?,
            "delta" => self.delta = parse(key, v)?,
            "grid_n" => self.grid_n = parse(key, v)?,
            "x_max" => self.x_max = parse(key, v)?,
            "dt" => self.dt = parse(key, v)?,
            "t_max" => self.t_max = parse(key, v)?,
            "quad_order" => self.quad_order = parse(key, v)?,
            "interp" => self.interp = v.parse()?,
            "frame" => self.frame = v.parse()?,
            "drift_interval" => self.drift_interval = parse(key, v)?,
            "init" => self.init = v.parse()?,
            "particles" => self.particles = parse(key, v)?,
            "dsmc_dt" => self.dsmc_dt = parse(key, v)?,
            "record_every" => self.record_every = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "replicas" => self.replicas = parse(key, v)?,
            "triples" => self.triples = parse(key, v)?,
            "mc_samples" => self.mc_samples = parse(key, v)?,
            "steady_tol" => self.steady_tol = parse(key, v)?,
            "steady_t_max" => self.steady_t_max = parse(key, v)?,
            "eps" => {
                self.eps = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse(key, s))
                    .collect::<Result<_>>()?
            }
            "fit_start" => self.fit_start = parse(key, v)?,
            "out" => self.out = (!v.is_empty()).then(|| PathBuf::from(v)),
            "report" => self.report = (!v.is_empty()).then(|| PathBuf::from(v)),
            _ => return Err(Error::Parse(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Textual form of one field, as accepted by [`set`](Self::set).
    pub fn get(&self, key: &str) -> Option<String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        Some(match key {
            "e" => self.e.to_string(),
            "alpha" => self.alpha.to_string(),
            "delta" => self.delta.to_string(),
            "grid_n" => self.grid_n.to_string(),
            "x_max" => self.x_max.to_string(),
            "dt" => self.dt.to_string(),
            "t_max" => self.t_max.to_string(),
            "quad_order" => self.quad_order.to_string(),
            "interp" => self.interp.to_string(),
            "frame" => self.frame.to_string(),
            "drift_interval" => self.drift_interval.to_string(),
            "init" => self.init.to_string(),
            "particles" => self.particles.to_string(),
            "dsmc_dt" => self.dsmc_dt.to_string(),
            "record_every" => self.record_every.to_string(),
            "seed" => self.seed.to_string(),
            "replicas" => self.replicas.to_string(),
            "triples" => self.triples.to_string(),
            "mc_samples" => self.mc_samples.to_string(),
            "steady_tol" => self.steady_tol.to_string(),
            "steady_t_max" => self.steady_t_max.to_string(),
            "eps" => self.eps.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            "fit_start" => self.fit_start.to_string(),
            "out" => path(&self.out),
            "report" => path(&self.report),
            _ => return None,
        })
    }

    /// `(key, value)` pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        KEYS.iter().map(|k| (*k, self.get(k).expect("known key"))).collect()
    }

    /// Flat `key = value` text; blank lines and `#` comments are ignored on input.
    pub fn to_kv(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Applies the assignments in `text` on top of `self`.
    pub fn merge_kv(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_kv(text)?;
        Ok(cfg)
    }

    /// Hex SHA-256 of the resolved configuration text.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_kv().as_bytes()))
    }

    /// The configuration as `# key = value` comment lines followed by the hash.
    pub fn header_comment(&self) -> String {
        let mut s: String = self.entries().iter().map(|(k, v)| format!("# {k} = {v}\n")).collect();
        s.push_str(&format!("# config_sha256 = {}\n", self.content_hash()));
        s
    }

    pub fn validate(&self) -> Result<()> {
        range("e", self.e, self.e > 0.0 && self.e <= 1.0, "0 < e <= 1")?;
        range(
            "alpha",
            self.alpha,
            self.alpha > 0.0 && self.alpha <= 1.0,
            "0 < alpha <= 1",
        )?;
        range(
            "delta",
            self.delta,
            self.delta > 0.0 && self.delta <= 1.0,
            "0 < delta <= 1",
        )?;
        range(
            "dsmc_dt",
            self.dsmc_dt,
            self.dsmc_dt > 0.0 && self.dsmc_dt <= 0.1,
            "0 < dsmc_dt <= 0.1",
        )?;
        range(
            "particles",
            self.particles as f64,
            self.particles >= 2,
            "particles >= 2",
        )?;
        range("replicas", self.replicas as f64, self.replicas >= 1, "replicas >= 1")?;
        range("steady_tol", self.steady_tol, self.steady_tol > 0.0, "steady_tol > 0")?;
        range(
            "record_every",
            self.record_every,
            self.record_every > 0.0,
            "record_every > 0",
        )?;
        range("fit_start", self.fit_start, self.fit_start >= 0.0, "fit_start >= 0")?;
        for &eps in &self.eps {
            range("eps", eps, eps > 0.0 && eps <= 0.25, "0 < eps <= 0.25")?;
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Parse("eps values must be strictly descending".into()));
        }
        self.init.validate()?;
        self.solver()?;
        Ok(())
    }

    /// Spectral solver settings.
    pub fn solver(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            n: self.grid_n,
            x_max: self.x_max,
            dt: self.dt,
            t_max: self.t_max,
            quad_order: self.quad_order,
            interp: self.interp,
            frame: self.frame,
            drift_interval: self.drift_interval,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Particle run settings; the characteristic function is sampled on
    /// `0, 0.25, ..., 10`.
    pub fn dsmc_run(&self) -> RunConfig {
        RunConfig {
            t_max: self.t_max,
            dt: self.dsmc_dt,
            record_every: self.record_every,
            x_grid: (0..=40).map(|k| 0.25 * k as f64).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::desk();
        cfg.out = Some("trace.csv".into());
        cfg.init = "maxwellian:1.5".parse().unwrap();
        cfg.eps = vec![0.2, 0.1];
        let back = ExperimentConfig::from_kv(&cfg.to_kv()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.content_hash(), cfg.content_hash());
    }

    #[test]
    fn later_assignments_win() {
        let mut cfg = ExperimentConfig::default();
        cfg.merge_kv("# comment\n e = 0.5\n\ngrid_n=1024\n").unwrap();
        cfg.set("e", "0.7").unwrap();
        assert_eq!(cfg.e, 0.7);
        assert_eq!(cfg.grid_n, 1024);
    }

    #[test]
    fn bad_input_is_reported() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.set("colour", "red").is_err());
        assert!(cfg.set("e", "high").is_err());
        assert!(cfg.merge_kv("e 0.5").is_err());
        cfg.e = 1.5;
        assert!(matches!(cfg.validate(), Err(Error::OutOfRange { name: "e", .. })));
        let cfg = ExperimentConfig {
            eps: vec![0.01, 0.1],
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.seed = 2;
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash().len(), 64);
    }
}
