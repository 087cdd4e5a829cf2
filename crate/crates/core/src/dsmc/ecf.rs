use super::Ensemble;
use crate::Vec3;

/// Number of directions averaged by [`ecf`].
pub const ECF_DIRECTIONS: usize = 64;

/// Direction-averaged empirical characteristic function on a radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EcfEstimate {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    /// Standard error of each value, treating particles as independent.
    pub stderr: Vec<f64>,
}

/// `n` points of the spherical Fibonacci lattice.
pub fn fibonacci_directions(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * k as f64;
            Vec3::new(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

/// `φ̂(x) = (1/64) Σ_d (1/N) Σ_i cos(x d·v_i)`.
pub fn ecf(ens: &Ensemble, x_grid: &[f64]) -> EcfEstimate {
    ecf_dilated(ens, x_grid, 1.0)
}

/// The estimate of `φ(λx)` for each `x` in `x_grid`.
pub fn ecf_dilated(ens: &Ensemble, x_grid: &[f64], lambda: f64) -> EcfEstimate {
    estimate(&ens.velocities, x_grid, lambda, &fibonacci_directions(ECF_DIRECTIONS))
}

/// Spacing of `x_grid` when it is `0, Δ, 2Δ, ...`.
fn uniform_from_zero(x_grid: &[f64]) -> Option<f64> {
    let h = *x_grid.get(1)?;
    let ok = x_grid[0] == 0.0
        && h > 0.0
        && x_grid
            .iter()
            .enumerate()
            .all(|(k, x)| (x - k as f64 * h).abs() <= 1e-12 * h * k as f64);
    ok.then_some(h)
}

pub(super) fn estimate(velocities: &[Vec3], x_grid: &[f64], lambda: f64, directions: &[Vec3]) -> EcfEstimate {
    let nx = x_grid.len();
    let mut sum = vec![0.0; nx];
    let mut sumsq = vec![0.0; nx];
    let mut acc = vec![0.0; nx];
    let step = uniform_from_zero(x_grid);
    let nd = directions.len() as f64;
    for v in velocities {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for d in directions {
            let proj = lambda * d.dot(v);
            match step {
                Some(h) => {
                    // cos(kφ) by the Chebyshev recurrence
                    let c1 = (h * proj).cos();
                    let (mut prev, mut cur) = (c1, 1.0);
                    for a in acc.iter_mut() {
                        *a += cur;
                        let next = 2.0 * c1 * cur - prev;
                        prev = cur;
                        cur = next;
                    }
                }
                None => {
                    for (a, x) in acc.iter_mut().zip(x_grid) {
                        *a += (x * proj).cos();
                    }
                }
            }
        }
        for ((s, q), a) in sum.iter_mut().zip(sumsq.iter_mut()).zip(&acc) {
            let c = a / nd;
            *s += c;
            *q += c * c;
        }
    }
    let n = velocities.len() as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let stderr = values
        .iter()
        .zip(&sumsq)
        .map(|(m, q)| ((q / n - m * m).max(0.0) / (n - 1.0).max(1.0)).sqrt())
        .collect();
    EcfEstimate {
        x: x_grid.to_vec(),
        values,
        stderr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsmc::{sample_initial, InitialSpec};

    fn ensemble(velocities: Vec<Vec3>) -> Ensemble {
        Ensemble::from_velocities(velocities, 1.0, 0).unwrap()
    }

    #[test]
    fn lattice_is_on_the_sphere_and_balanced() {
        let d = fibonacci_directions(ECF_DIRECTIONS);
        assert!(d.iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
        // second-moment tensor close to I/3, so the x² term of the estimate is isotropic
        let t = d.iter().map(|v| v * v.transpose()).sum::<nalgebra::Matrix3<f64>>() / d.len() as f64;
        assert!((t - nalgebra::Matrix3::identity() / 3.0).abs().max() < 2e-3, "{t}");
    }

    #[test]
    fn recurrence_matches_direct_cosines() {
        let vs = vec![Vec3::new(0.3, -1.2, 2.5), Vec3::new(-0.7, 0.1, 0.4)];
        let uniform: Vec<f64> = (0..60).map(|k| 0.25 * k as f64).collect();
        let mut jittered = uniform.clone();
        jittered[0] = 1e-300;
        let dirs = fibonacci_directions(ECF_DIRECTIONS);
        let a = estimate(&vs, &uniform, 1.3, &dirs);
        let b = estimate(&vs, &jittered, 1.3, &dirs);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn value_at_zero_is_one() {
        let ens = sample_initial(InitialSpec::default(), 1000, 0.5, 1).unwrap();
        let est = ecf(&ens, &[0.0, 0.5]);
        assert_eq!(est.values[0], 1.0);
        assert_eq!(est.stderr[0], 0.0);
    }

    #[test]
    fn gaussian_characteristic_function() {
        let n = 100_000;
        let ens = sample_initial(InitialSpec::Maxwellian { theta: 1.0 }, n, 1.0, 11).unwrap();
        let est = ecf(&ens, &[0.0, 1.0]);
        assert!((est.values[1] - (-0.5f64).exp()).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn axis_aligned_ensemble_matches_sinc() {
        let vs = vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)];
        let ens = ensemble(vs);
        let xs: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
        let est = ecf(&ens, &xs);
        let dirs = fibonacci_directions(ECF_DIRECTIONS);
        for (x, v) in xs.iter().zip(&est.values) {
            let exact = dirs.iter().map(|d| (x * d.x).cos()).sum::<f64>() / dirs.len() as f64;
            assert!((v - exact).abs() < 1e-12);
            let sinc = if *x == 0.0 { 1.0 } else { x.sin() / x };
            assert!((v - sinc).abs() < 0.02, "x={x} {v} {sinc}");
        }
    }
}
