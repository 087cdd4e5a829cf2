use super::{CollisionTriple, Param, Restitution, UnitVector3};
use crate::error::{Error, Result};
use nalgebra::Matrix6;

/// Result of applying a collision map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionOutcome {
    pub triple: CollisionTriple,
    /// Set when `v = w` under the swapping map: the relative direction is
    /// undefined and the triple is returned unchanged.
    pub grazing: bool,
}

impl CollisionOutcome {
    fn unchanged(triple: &CollisionTriple) -> Self {
        Self {
            triple: *triple,
            grazing: true,
        }
    }
}

/// Forward collision map `C_{r,e}` or `C_{s,e}` selected by the triple's tag.
///
/// Swapping branch:
/// `v' = z + (1-e)/4 u + (1+e)/4 |u| σ`,
/// `σ' = ((1+e)k + (1-e)σ) / sqrt(2(1+e²) + 2(1-e²) k·σ)`.
pub fn collide(triple: &CollisionTriple, restitution: &Restitution) -> CollisionOutcome {
    let e = restitution.e();
    match triple.param {
        Param::Reflection => reflect(triple, 0.5 * (1.0 + e)),
        Param::Swap => {
            let u = triple.relative();
            let un = u.norm();
            if un == 0.0 {
                return CollisionOutcome::unchanged(triple);
            }
            let k = u / un;
            let sigma = *triple.omega;
            let z = 0.5 * triple.momentum();
            let half = 0.25 * (1.0 - e) * u + 0.25 * (1.0 + e) * un * sigma;
            let d2 = 2.0 * (1.0 + e * e) + 2.0 * (1.0 - e * e) * k.dot(&sigma);
            let (omega, grazing) = if d2 > 0.0 {
                (
                    UnitVector3::new(((1.0 + e) * k + (1.0 - e) * sigma) / d2.sqrt()).unwrap_or(triple.omega),
                    false,
                )
            } else {
                // e = 0 and σ = -k: the pair comes to rest in the centre of mass frame
                (UnitVector3(k), true)
            };
            CollisionOutcome {
                triple: CollisionTriple {
                    v: z + half,
                    w: z - half,
                    omega,
                    param: Param::Swap,
                },
                grazing,
            }
        }
    }
}

/// Inverse collision map; undefined at `e = 0`.
pub fn precollide(triple: &CollisionTriple, restitution: &Restitution) -> Result<CollisionOutcome> {
    let e = restitution.e();
    if e == 0.0 {
        return Err(Error::NonInvertible);
    }
    Ok(match triple.param {
        // the reflection map is inverted by restitution 1/e
        Param::Reflection => reflect(triple, 0.5 * (1.0 + e) / e),
        Param::Swap => {
            let u = triple.relative();
            let un = u.norm();
            if un == 0.0 {
                return Ok(CollisionOutcome::unchanged(triple));
            }
            let k = u / un;
            let sigma = *triple.omega;
            let z = 0.5 * triple.momentum();
            let half = -(1.0 - e) / (4.0 * e) * u + (1.0 + e) / (4.0 * e) * un * sigma;
            let d2 = 2.0 * (1.0 + e * e) - 2.0 * (1.0 - e * e) * k.dot(&sigma);
            let omega = UnitVector3::new(((1.0 + e) * k - (1.0 - e) * sigma) / d2.sqrt()).unwrap_or(triple.omega);
            CollisionOutcome {
                triple: CollisionTriple {
                    v: z + half,
                    w: z - half,
                    omega,
                    param: Param::Swap,
                },
                grazing: false,
            }
        }
    })
}

fn reflect(triple: &CollisionTriple, factor: f64) -> CollisionOutcome {
    let n = *triple.omega;
    let z = 0.5 * triple.momentum();
    let u = triple.relative();
    let half = 0.5 * u - factor * u.dot(&n) * n;
    CollisionOutcome {
        triple: CollisionTriple {
            v: z + half,
            w: z - half,
            omega: triple.omega,
            param: Param::Reflection,
        },
        grazing: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conversion {
    /// `σ = k - 2(k·n)n`
    NormalToSigma,
    /// `n = (k - σ)/|k - σ|`, determined up to sign
    SigmaToNormal,
}

/// Convert the collision vector between the two parameterisations for a
/// relative direction `k`.
pub fn convert_param(k: &UnitVector3, omega: &UnitVector3, dir: Conversion) -> Result<UnitVector3> {
    match dir {
        Conversion::NormalToSigma => {
            let n = omega.as_vec();
            UnitVector3::new(k.as_vec() - 2.0 * k.dot(n) * n)
        }
        Conversion::SigmaToNormal => {
            let diff = k.as_vec() - omega.as_vec();
            if diff.norm() <= 1e-14 {
                return Err(Error::Degenerate("sigma equals k: contact normal undefined"));
            }
            UnitVector3::new(diff)
        }
    }
}

/// Determinant of `(v, w) ↦ (v', w')` at fixed collision vector, by central
/// differences. The reflection map has determinant `-e`, its inverse `-1/e`.
pub fn velocity_jacobian_det(
    triple: &CollisionTriple,
    restitution: &Restitution,
    inverse: bool,
    step: f64,
) -> Result<f64> {
    let apply = |t: &CollisionTriple| -> Result<[f64; 6]> {
        let out = if inverse {
            precollide(t, restitution)?
        } else {
            collide(t, restitution)
        };
        let (v, w) = (out.triple.v, out.triple.w);
        Ok([v.x, v.y, v.z, w.x, w.y, w.z])
    };
    let mut jac = Matrix6::<f64>::zeros();
    for col in 0..6 {
        let mut plus = *triple;
        let mut minus = *triple;
        let bump = |t: &mut CollisionTriple, d: f64| {
            if col < 3 {
                t.v[col] += d;
            } else {
                t.w[col - 3] += d;
            }
        };
        bump(&mut plus, step);
        bump(&mut minus, -step);
        let fp = apply(&plus)?;
        let fm = apply(&minus)?;
        for row in 0..6 {
            jac[(row, col)] = (fp[row] - fm[row]) / (2.0 * step);
        }
    }
    Ok(jac.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vec3;

    fn v3(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn unit(x: f64, y: f64, z: f64) -> UnitVector3 {
        UnitVector3::from_components(x, y, z).unwrap()
    }

    #[test]
    fn elastic_swap_head_on() {
        let t = CollisionTriple::new(v3(1., 0., 0.), v3(-1., 0., 0.), unit(0., 1., 0.), Param::Swap);
        let out = collide(&t, &Restitution::new(1.0).unwrap());
        assert!((out.triple.v - v3(0., 1., 0.)).norm() < 1e-15);
        assert!((out.triple.w - v3(0., -1., 0.)).norm() < 1e-15);
        assert!((out.triple.omega.as_vec() - v3(1., 0., 0.)).norm() < 1e-15);
        assert!(!out.grazing);
    }

    #[test]
    fn perfectly_inelastic_head_on_reflection() {
        let t = CollisionTriple::new(v3(1., 0., 0.), v3(-1., 0., 0.), unit(1., 0., 0.), Param::Reflection);
        let out = collide(&t, &Restitution::new(0.0).unwrap());
        assert_eq!(out.triple.v, Vec3::zeros());
        assert_eq!(out.triple.w, Vec3::zeros());
        assert_eq!(out.triple.omega, t.omega);
    }

    #[test]
    fn grazing_swap_is_flagged_noop() {
        let t = CollisionTriple::new(v3(0.3, 0.2, 0.1), v3(0.3, 0.2, 0.1), unit(0., 0., 1.), Param::Swap);
        let r = Restitution::new(0.7).unwrap();
        let out = collide(&t, &r);
        assert!(out.grazing);
        assert_eq!(out.triple, t);
        let back = precollide(&t, &r).unwrap();
        assert!(back.grazing);
    }

    #[test]
    fn inverse_rejected_at_zero_restitution() {
        let t = CollisionTriple::new(v3(1., 0., 0.), v3(0., 0., 0.), unit(1., 0., 0.), Param::Reflection);
        assert!(matches!(
            precollide(&t, &Restitution::new(0.0).unwrap()),
            Err(Error::NonInvertible)
        ));
    }

    #[test]
    fn conversion_examples() {
        let k = unit(1., 0., 0.);
        let s = convert_param(&k, &unit(0., 1., 0.), Conversion::NormalToSigma).unwrap();
        assert!((s.as_vec() - v3(1., 0., 0.)).norm() < 1e-15);
        let s = convert_param(&k, &unit(1., 0., 0.), Conversion::NormalToSigma).unwrap();
        assert!((s.as_vec() - v3(-1., 0., 0.)).norm() < 1e-15);
        assert!(matches!(
            convert_param(&k, &k, Conversion::SigmaToNormal),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn reflection_jacobian_is_e() {
        let r = Restitution::new(0.37).unwrap();
        let t = CollisionTriple::new(
            v3(0.4, -1.1, 0.2),
            v3(-0.3, 0.5, 0.9),
            unit(0.2, 0.7, -0.4),
            Param::Reflection,
        );
        let det = velocity_jacobian_det(&t, &r, false, 1e-5).unwrap();
        assert!((det.abs() - 0.37).abs() < 1e-8, "{det}");
        let det_inv = velocity_jacobian_det(&t, &r, true, 1e-5).unwrap();
        assert!((det_inv.abs() - 1.0 / 0.37).abs() < 1e-8, "{det_inv}");
    }
}
