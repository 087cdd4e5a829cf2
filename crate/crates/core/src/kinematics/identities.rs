use super::UnitVector3;
use crate::error::{Error, Result};
use crate::Vec3;

/// Bobylev split `η₋ = ((1+e)/4)(η - |η|σ)`, `η₊ = η - η₋`.
pub fn bobylev_split(eta: &Vec3, sigma: &UnitVector3, e: f64) -> (Vec3, Vec3) {
    let minus = 0.25 * (1.0 + e) * (eta - eta.norm() * sigma.as_vec());
    (eta - minus, minus)
}

/// `P_{σ,k}x = (σ·x)k + (k·σ)x - (k·x)σ`
fn p_sigma_k(sigma: &Vec3, k: &Vec3, x: &Vec3) -> Vec3 {
    sigma.dot(x) * k + k.dot(sigma) * x - k.dot(x) * sigma
}

/// The combination `Z(η₊, η₋)` from the Fourier form of the gain term, with `k = η̂`.
pub fn z_combination(plus: &Vec3, minus: &Vec3, sigma: &UnitVector3, k: &Vec3, e: f64) -> Vec3 {
    let s = sigma.as_vec();
    let a = (3.0 * e - 1.0) / (4.0 * e);
    let b = (1.0 + e) / (4.0 * e);
    a * plus + b * p_sigma_k(s, k, plus) + b * minus - b * p_sigma_k(s, k, minus)
}

/// Residual `|Z(η₊,η₋) - η - ((1-e²)/(4e))((η·σ)η̂ - |η|σ)|`.
pub fn check_z_identity(eta: &Vec3, sigma: &UnitVector3, e: f64) -> Result<f64> {
    let norm = eta.norm();
    if !(norm > 0.0) {
        return Err(Error::Degenerate("eta must be non-zero"));
    }
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::OutOfRange {
            name: "e",
            value: e,
            expected: "0 < e <= 1",
        });
    }
    let k = eta / norm;
    let s = sigma.as_vec();
    let (plus, minus) = bobylev_split(eta, sigma, e);
    let z = z_combination(&plus, &minus, sigma, &k, e);
    let rhs = eta + (1.0 - e * e) / (4.0 * e) * (eta.dot(s) * k - norm * s);
    Ok((z - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Domain};

    #[test]
    fn elastic_and_random_residuals() {
        let mut rng = substream(11, Domain::TripleSample, 0);
        let eta = Vec3::new(1.0, 2.0, -1.0);
        for _ in 0..200 {
            let sigma = UnitVector3::random(&mut rng);
            assert!(check_z_identity(&eta, &sigma, 1.0).unwrap() < 1e-14);
            assert!(check_z_identity(&eta, &sigma, 0.6).unwrap() < 1e-10 * eta.norm());
        }
    }

    #[test]
    fn collinear_correction_vanishes() {
        let eta = Vec3::new(0.0, 0.0, 2.5);
        let sigma = UnitVector3::from_components(0.0, 0.0, 1.0).unwrap();
        let s = sigma.as_vec();
        let k = eta / eta.norm();
        assert_eq!(eta.dot(s) * k - eta.norm() * s, Vec3::zeros());
    }

    #[test]
    fn split_norms_match_radial_factors() {
        let e: f64 = 0.4;
        let eta = Vec3::new(0.3, -1.2, 0.8);
        let sigma = UnitVector3::from_components(0.1, 0.9, 0.2).unwrap();
        let s = sigma.dot(&(eta / eta.norm()));
        let (plus, minus) = bobylev_split(&eta, &sigma, e);
        let am = 0.25 * (1.0 + e) * (2.0 * (1.0 - s)).sqrt();
        let ap = ((0.25 * (3.0 - e)).powi(2) + (0.25 * (1.0 + e)).powi(2) + s * (3.0 - e) * (1.0 + e) / 8.0).sqrt();
        assert!((minus.norm() - am * eta.norm()).abs() < 1e-14);
        assert!((plus.norm() - ap * eta.norm()).abs() < 1e-14);
    }

    #[test]
    fn zero_eta_rejected() {
        let sigma = UnitVector3::from_components(1.0, 0.0, 0.0).unwrap();
        assert!(check_z_identity(&Vec3::zeros(), &sigma, 0.5).is_err());
    }
}
