use maxcool::kinematics::{collide, convert_param, precollide, Conversion};
use maxcool::{CollisionTriple, Param, Restitution, UnitVector3, Vec3};
use proptest::prelude::*;

fn vec3(range: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-range..range).prop_map(|a| Vec3::new(a[0], a[1], a[2]))
}

fn unit() -> impl Strategy<Value = UnitVector3> {
    vec3(1.0)
        .prop_filter("away from the origin", |v| v.norm() > 1e-3)
        .prop_map(|v| UnitVector3::new(v).unwrap())
}

fn param() -> impl Strategy<Value = Param> {
    prop_oneof![Just(Param::Reflection), Just(Param::Swap)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn momentum_is_conserved(v in vec3(10.0), w in vec3(10.0), om in unit(), p in param(), e in 0.0f64..=1.0) {
        let t = CollisionTriple::new(v, w, om, p);
        let out = collide(&t, &Restitution::new(e).unwrap()).triple;
        prop_assert!((out.momentum() - t.momentum()).norm() <= 1e-12 * (1.0 + t.momentum().norm() + t.relative().norm()));
    }

    #[test]
    fn energy_loss_matches_the_normal_component(v in vec3(10.0), w in vec3(10.0), om in unit(), p in param(), e in 0.0f64..=1.0) {
        let t = CollisionTriple::new(v, w, om, p);
        let out = collide(&t, &Restitution::new(e).unwrap());
        prop_assume!(!out.grazing);
        let u = t.relative();
        let loss = match p {
            Param::Reflection => 0.5 * (1.0 - e * e) * u.dot(om.as_vec()).powi(2),
            Param::Swap => 0.25 * (1.0 - e * e) * u.norm_squared() * (1.0 - om.dot(&u.normalize())),
        };
        let scale = 1.0 + t.energy();
        prop_assert!((t.energy() - out.triple.energy() - loss).abs() <= 1e-12 * scale);
        prop_assert!(out.triple.energy() <= t.energy() + 1e-12 * scale);
    }

    #[test]
    fn precollide_inverts_collide(v in vec3(10.0), w in vec3(10.0), om in unit(), p in param(), e in 0.05f64..=1.0) {
        let r = Restitution::new(e).unwrap();
        let t = CollisionTriple::new(v, w, om, p);
        prop_assume!(t.relative().norm() > 1e-3);
        let out = collide(&t, &r);
        prop_assume!(!out.grazing);
        let back = precollide(&out.triple, &r).unwrap().triple;
        let scale = 1.0 + v.norm() + w.norm();
        prop_assert!((back.v - v).norm() <= 1e-9 * scale / e);
        prop_assert!((back.w - w).norm() <= 1e-9 * scale / e);
    }

    #[test]
    fn normal_sigma_round_trip(k in unit(), n in unit()) {
        let sigma = convert_param(&k, &n, Conversion::NormalToSigma).unwrap();
        prop_assume!((k.as_vec() - sigma.as_vec()).norm() > 1e-6);
        let n2 = convert_param(&k, &sigma, Conversion::SigmaToNormal).unwrap();
        // the normal is recovered up to sign
        prop_assert!((n2.dot(n.as_vec()).abs() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn elastic_reflection_is_an_involution() {
    let r = Restitution::new(1.0).unwrap();
    let n = UnitVector3::from_components(1.0, 2.0, -0.5).unwrap();
    let t = CollisionTriple::new(
        Vec3::new(1.0, 0.0, 0.3),
        Vec3::new(-0.2, 1.5, 0.0),
        n,
        Param::Reflection,
    );
    let twice = collide(&collide(&t, &r).triple, &r).triple;
    assert!((twice.v - t.v).norm() < 1e-14 && (twice.w - t.w).norm() < 1e-14);
}
