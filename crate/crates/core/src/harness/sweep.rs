use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::kinematics::Restitution;
use crate::realspace::{default_r_grid, l1_distance, reconstruct, RadialDensity};
use crate::spectral::{steady_profile, Frame};
use serde::Serialize;

/// `ε^{1/2} (1 + |ln ε|^{1/2})`.
pub fn envelope(eps: f64) -> f64 {
    eps.sqrt() * (1.0 + eps.ln().abs().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub e: f64,
    pub cauchy_residual: f64,
    /// `‖g∞ − M‖₁` against the Maxwellian of the same temperature.
    pub distance: f64,
    pub envelope: f64,
    /// `distance / envelope`.
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Points whose steady state did not converge, with the reason.
    pub dropped: Vec<(f64, String)>,
}

impl SweepTable {
    /// Distances strictly decrease along the (descending) `ε` list.
    pub fn decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].distance < w[0].distance)
    }

    /// `max(C_i/C_{i+1}, C_{i+1}/C_i)` for consecutive rows.
    pub fn constant_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| {
                let r = w[0].constant / w[1].constant;
                r.max(1.0 / r)
            })
            .collect()
    }

    /// Least-squares slope of `ln distance` against `ln ε`: the observed
    /// order of convergence to the Maxwellian. `NaN` with fewer than two rows.
    pub fn order(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.eps.ln(), r.distance.ln())).collect();
        if pts.len() < 2 {
            return f64::NAN;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,e,distance,envelope,constant,cauchy_residual\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{:e},{:e},{:e},{:e}\n",
                r.eps, r.e, r.distance, r.envelope, r.constant, r.cauchy_residual
            ));
        }
        s
    }
}

fn sweep_point(eps: f64, cfg: &ExperimentConfig) -> Result<SweepRow> {
    let e = 1.0 - 2.0 * eps;
    let r = Restitution::new(e)?;
    let mut solver = cfg.solver()?;
    solver.frame = Frame::Rescaled;
    solver.t_max = cfg.steady_t_max;
    let steady = steady_profile(&r, &solver, cfg.steady_tol)?;
    if !steady.converged {
        return Err(Error::Parse(format!(
            "steady state at e = {e} not converged (Cauchy residual {:.3e})",
            steady.cauchy_residual
        )));
    }
    let f = reconstruct(&steady.profile, default_r_grid(&steady.profile)?)?;
    let m = RadialDensity::maxwellian(f.grid, f.temperature());
    let distance = l1_distance(&f, &m)?;
    let envelope = envelope(eps);
    log::info!("sweep: eps = {eps}, e = {e}, distance {distance:.6e}");
    Ok(SweepRow {
        eps,
        e,
        cauchy_residual: steady.cauchy_residual,
        distance,
        envelope,
        constant: distance / envelope,
    })
}

/// Steady profile, reconstruction and `L¹` distance to the Maxwellian for each
/// `ε` (restitution `e = 1 - 2ε`). Points run on a bounded pool of worker
/// threads; rows keep the order of `eps_list`.
pub fn sweep_epsilon(eps_list: &[f64], cfg: &ExperimentConfig) -> Result<SweepTable> {
    if eps_list.iter().any(|&x| !(x > 0.0 && x <= 0.25)) {
        return Err(Error::Parse("eps values must lie in (0, 0.25]".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parse("eps values must be strictly descending".into()));
    }
    let workers = std::thread::available_parallelism()
        .map_or(1, |w| w.get())
        .min(eps_list.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<Option<Result<SweepRow>>> = (0..eps_list.len()).map(|_| None).collect();
    let slots = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= eps_list.len() {
                    break;
                }
                let row = sweep_point(eps_list[i], cfg);
                slots.lock().expect("sweep worker panicked")[i] = Some(row);
            });
        }
    });
    let mut table = SweepTable {
        rows: Vec::new(),
        dropped: Vec::new(),
    };
    for (eps, res) in eps_list.iter().zip(results) {
        match res.expect("every sweep point is evaluated") {
            Ok(row) => table.rows.push(row),
            Err(err) => {
                log::warn!("sweep: dropping eps = {eps}: {err}");
                table.dropped.push((*eps, err.to_string()));
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_values() {
        assert!((envelope(0.01) - 0.1 * (1.0 + 100f64.ln().sqrt())).abs() < 1e-15);
        assert!(envelope(1e-12) < 1e-5);
    }

    #[test]
    fn input_order_is_enforced() {
        let cfg = ExperimentConfig::desk();
        assert!(sweep_epsilon(&[0.01, 0.1], &cfg).is_err());
        assert!(sweep_epsilon(&[0.5], &cfg).is_err());
    }

    #[test]
    fn ratios_and_monotonicity() {
        let row = |eps: f64, distance: f64| SweepRow {
            eps,
            e: 1.0 - 2.0 * eps,
            cauchy_residual: 0.0,
            distance,
            envelope: envelope(eps),
            constant: distance / envelope(eps),
        };
        let t = SweepTable {
            rows: vec![row(0.1, 0.04), row(0.05, 0.02), row(0.02, 0.008)],
            dropped: vec![],
        };
        assert!(t.decreasing());
        assert!(t.constant_ratios().iter().all(|r| *r >= 1.0 && *r < 3.0));
        assert!((t.order() - 1.0).abs() < 1e-12);
        let quadratic = SweepTable {
            rows: vec![row(0.1, 0.03), row(0.01, 0.0003)],
            dropped: vec![],
        };
        assert!((quadratic.order() - 2.0).abs() < 1e-12);
    }
}
