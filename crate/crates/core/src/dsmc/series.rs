use super::ecf::estimate;
use super::Ensemble;
use crate::error::{Error, Result};
use crate::Vec3;
use std::io::{BufRead, Write};

const MAGIC: &str = "# maxcool-dsmc v1";

/// Which density the estimates of a series describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFrame {
    /// The particle law `f(v, t)` itself.
    Unscaled,
    /// `g(v, t) = e^{-3Et} f(e^{-Et} v, t)`, with constant temperature.
    Rescaled,
}

impl std::fmt::Display for SeriesFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SeriesFrame::Unscaled => "unscaled-f",
            SeriesFrame::Rescaled => "rescaled-g",
        })
    }
}

impl std::str::FromStr for SeriesFrame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unscaled-f" | "unscaled" => Ok(SeriesFrame::Unscaled),
            "rescaled-g" | "rescaled" => Ok(SeriesFrame::Rescaled),
            _ => Err(Error::Parse(format!("unknown frame `{s}`"))),
        }
    }
}

/// Estimates at one recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct DsmcRecord {
    pub t: f64,
    pub m1: Vec3,
    pub m2: f64,
    pub m4: f64,
    /// Empirical characteristic function on the series grid, in the series frame.
    pub ecf: Vec<f64>,
    pub ecf_stderr: Vec<f64>,
    /// The same estimate in the other frame; empty when read back from CSV.
    pub ecf_alt: Vec<f64>,
    pub ecf_alt_stderr: Vec<f64>,
}

impl DsmcRecord {
    pub(super) fn measure(ens: &Ensemble, x_grid: &[f64], directions: &[Vec3], dissipation: f64) -> Self {
        let plain = estimate(&ens.velocities, x_grid, 1.0, directions);
        let dilated = estimate(&ens.velocities, x_grid, (dissipation * ens.t).exp(), directions);
        Self {
            t: ens.t,
            m1: ens.mean_velocity(),
            m2: ens.m2(),
            m4: ens.m4(),
            ecf: plain.values,
            ecf_stderr: plain.stderr,
            ecf_alt: dilated.values,
            ecf_alt_stderr: dilated.stderr,
        }
    }
}

/// Output of [`run`](super::run).
#[derive(Debug, Clone, PartialEq)]
pub struct DsmcSeries {
    pub e: f64,
    /// Energy dissipation constant `E` of the run's rate.
    pub dissipation: f64,
    pub n: usize,
    pub seed: u64,
    pub x_grid: Vec<f64>,
    pub frame: SeriesFrame,
    pub records: Vec<DsmcRecord>,
}

impl DsmcSeries {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// `(t, m2)` pairs.
    pub fn m2_series(&self) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t, r.m2)).collect()
    }

    /// The record closest to time `t`.
    pub fn at(&self, t: f64) -> Option<&DsmcRecord> {
        self.records
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

/// Maps the series to the temperature-rescaled frame: `m1 e^{Et}`,
/// `m2 e^{2Et}`, `m4 e^{4Et}`, and the characteristic function at `e^{Et}x`.
pub fn rescaled_estimates(series: &DsmcSeries) -> DsmcSeries {
    if series.frame == SeriesFrame::Rescaled {
        return series.clone();
    }
    let big_e = series.dissipation;
    let records = series
        .records
        .iter()
        .map(|r| {
            let s = (big_e * r.t).exp();
            DsmcRecord {
                t: r.t,
                m1: r.m1 * s,
                m2: r.m2 * s * s,
                m4: r.m4 * s.powi(4),
                ecf: r.ecf_alt.clone(),
                ecf_stderr: r.ecf_alt_stderr.clone(),
                ecf_alt: r.ecf.clone(),
                ecf_alt_stderr: r.ecf_stderr.clone(),
            }
        })
        .collect();
    DsmcSeries {
        frame: SeriesFrame::Rescaled,
        records,
        ..series.clone()
    }
}

/// CSV with columns `t,m1x,m1y,m1z,m2,m4,ecf_x0,...` after two header lines
/// naming the run and the frequency grid.
pub fn write_series<W: Write>(mut out: W, series: &DsmcSeries) -> Result<()> {
    writeln!(
        out,
        "{MAGIC} e={} E={} n={} seed={} frame={}",
        series.e, series.dissipation, series.n, series.seed, series.frame
    )?;
    let grid: Vec<String> = series.x_grid.iter().map(|x| x.to_string()).collect();
    writeln!(out, "# x_grid={}", grid.join(","))?;
    let mut cols = vec!["t", "m1x", "m1y", "m1z", "m2", "m4"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    cols.extend((0..series.x_grid.len()).map(|k| format!("ecf_x{k}")));
    writeln!(out, "{}", cols.join(","))?;
    for r in &series.records {
        let mut row = vec![r.t, r.m1.x, r.m1.y, r.m1.z, r.m2, r.m4];
        row.extend(&r.ecf);
        let row: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a series written by [`write_series`]. Other `#` lines are skipped;
/// standard errors and the alternate-frame estimates are not stored in the
/// file and come back empty.
pub fn read_series<R: BufRead>(input: R) -> Result<DsmcSeries> {
    let mut series = DsmcSeries {
        e: f64::NAN,
        dissipation: f64::NAN,
        n: 0,
        seed: 0,
        x_grid: Vec::new(),
        frame: SeriesFrame::Unscaled,
        records: Vec::new(),
    };
    let mut seen_magic = false;
    let mut seen_columns = false;
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number `{v}`")))
    };
    for line in input.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix(MAGIC) {
            seen_magic = true;
            for field in rest.split_whitespace() {
                let (k, v) = field
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
                match k {
                    "e" => series.e = num(v)?,
                    "E" => series.dissipation = num(v)?,
                    "n" => series.n = num(v)? as usize,
                    "seed" => series.seed = v.parse().map_err(|_| Error::Parse(format!("bad seed `{v}`")))?,
                    "frame" => series.frame = v.parse()?,
                    _ => return Err(Error::Parse(format!("unknown header key `{k}`"))),
                }
            }
        } else if let Some(grid) = line.strip_prefix("# x_grid=") {
            series.x_grid = grid
                .split(',')
                .filter(|s| !s.is_empty())
                .map(num)
                .collect::<Result<_>>()?;
        } else if line.starts_with('#') || line.trim().is_empty() {
            continue;
        } else if !seen_columns {
            seen_columns = true;
        } else {
            let vals = line.split(',').map(num).collect::<Result<Vec<_>>>()?;
            if vals.len() != 6 + series.x_grid.len() {
                return Err(Error::GridMismatch(format!(
                    "row has {} columns, expected {}",
                    vals.len(),
                    6 + series.x_grid.len()
                )));
            }
            series.records.push(DsmcRecord {
                t: vals[0],
                m1: Vec3::new(vals[1], vals[2], vals[3]),
                m2: vals[4],
                m4: vals[5],
                ecf: vals[6..].to_vec(),
                ecf_stderr: Vec::new(),
                ecf_alt: Vec::new(),
                ecf_alt_stderr: Vec::new(),
            });
        }
    }
    if !seen_magic {
        return Err(Error::Parse(format!("missing `{MAGIC}` header")));
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsmc::{run, sample_initial, InitialSpec, RunConfig};
    use crate::kinematics::RatePair;

    fn short_run(e: f64) -> DsmcSeries {
        let mut ens = sample_initial(InitialSpec::default(), 4000, e, 2).unwrap();
        let cfg = RunConfig {
            t_max: 2.0,
            x_grid: vec![0.0, 0.5, 1.0, 1.5],
            ..RunConfig::default()
        };
        run(&mut ens, &cfg, &RatePair::constant()).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let s = short_run(0.5);
        let mut buf = Vec::new();
        write_series(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with("t,m1x,m1y,m1z,m2,m4,ecf_x0"));
        let back = read_series(buf.as_slice()).unwrap();
        assert_eq!(back.x_grid, s.x_grid);
        assert_eq!(back.records.len(), s.records.len());
        for (a, b) in back.records.iter().zip(&s.records) {
            assert_eq!(a.m2, b.m2);
            assert_eq!(a.ecf, b.ecf);
        }
        assert_eq!(back.seed, s.seed);
    }

    #[test]
    fn rescaling_maps_moments_and_frequencies() {
        let s = short_run(0.5);
        let g = rescaled_estimates(&s);
        assert_eq!(g.frame, SeriesFrame::Rescaled);
        let last = g.records.last().unwrap();
        let raw = s.records.last().unwrap();
        let f = (s.dissipation * raw.t).exp();
        assert!((last.m2 - raw.m2 * f * f).abs() < 1e-12 * last.m2);
        assert_eq!(last.ecf, raw.ecf_alt);
        // temperature is held near 1 in the rescaled frame
        assert!((last.m2 - 3.0).abs() < 0.15, "{}", last.m2);
        assert_eq!(rescaled_estimates(&g), g);
    }

    #[test]
    fn records_start_at_zero_and_end_at_t_max() {
        let s = short_run(0.9);
        assert_eq!(s.records[0].t, 0.0);
        assert!((s.records.last().unwrap().t - 2.0).abs() < 1e-12);
        assert_eq!(s.records.len(), 5);
        assert!(s.at(1.01).unwrap().t == 1.0);
    }
}
