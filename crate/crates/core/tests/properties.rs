mod common;

use flexokit::geometry::{decode, encode, extensional_recipe, flexional_recipe, FeatureOptions};
use flexokit::joint_limits::{
    extensional_inverse, extensional_jam_angle, flexional_inverse, flexional_jam_angle, ExtensionalLimitSpec,
    FlexionalLimitSpec,
};
use flexokit::limb::{equilibrium_solve, BasePose, JointDef, LimbSpec, Segment, Sense};
use flexokit::material::{FlexureSpec, LaminateStack, Layer, Material, RibPattern};
use flexokit::stiffness::{height_plateau, solve_width_ratio, tip_stiffness};
use flexokit::sweep::SweepSpec;
use proptest::prelude::*;

const MM: f64 = 1e-3;

fn flexure() -> impl Strategy<Value = FlexureSpec> {
    (10.0..60.0f64, 5.0..50.0f64, 0.1..0.2f64, 0.1..0.4f64, 2usize..30, 0.05..0.95f64, 0.2..2.0f64).prop_map(
        |(l, w, pc, pla, n, ratio, h)| {
            let base = LaminateStack::new(vec![
                Layer::new(Material::pc(), pc * MM),
                Layer::new(Material::pla(), pla * MM),
            ])
            .unwrap();
            let ribs = RibPattern::new(l * MM / n as f64, ratio, h * MM).unwrap();
            FlexureSpec::new(l * MM, w * MM, base, Some(ribs), Material::pla()).unwrap()
        },
    )
}

fn joint() -> impl Strategy<Value = JointDef> {
    (0.002..0.2f64, 0.0..20.0f64, 0.05..1.6f64, any::<bool>(), 0.5..6.0f64).prop_map(|(k, len, cap, pos, r)| {
        let sense = if pos { Sense::Positive } else { Sense::Negative };
        JointDef::new(k, len * MM, cap, sense, r * MM).unwrap()
    })
}

fn limb() -> impl Strategy<Value = LimbSpec> {
    prop::collection::vec(joint(), 1..6).prop_map(|joints| {
        let mut segments = vec![Segment::Link(5.0 * MM)];
        for j in joints {
            segments.push(Segment::Joint(j));
            segments.push(Segment::Link(12.0 * MM));
        }
        LimbSpec::new(segments, BasePose::default()).unwrap()
    })
}

proptest! {
    #[test]
    fn stiffness_increases_with_width_ratio(f in flexure(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let k_lo = tip_stiffness(&f.with_width_ratio(lo).unwrap());
        let k_hi = tip_stiffness(&f.with_width_ratio(hi).unwrap());
        prop_assert!(k_lo < k_hi);
    }

    #[test]
    fn stiffness_stays_below_plateau(f in flexure(), h in 0.0..500.0f64) {
        let k = tip_stiffness(&f.with_feature_height(h * MM).unwrap());
        prop_assert!(k <= height_plateau(&f));
    }

    #[test]
    fn width_ratio_round_trip(f in flexure(), w in 0.02..0.98f64) {
        let k = tip_stiffness(&f.with_width_ratio(w).unwrap());
        let got = solve_width_ratio(k, &f).unwrap();
        prop_assert!((got - w).abs() <= 1e-6 * w);
    }

    #[test]
    fn flexional_round_trip(r in 0.5..3.0f64, d_over_r in 2.05..10.0f64, h in 0.1..15.0f64) {
        let spec = FlexionalLimitSpec::new(d_over_r * r * MM, r * MM, h * MM).unwrap();
        if let Ok(alpha) = flexional_jam_angle(&spec) {
            let back = flexional_inverse(alpha, spec.head_radius, spec.spacing).unwrap();
            prop_assert!((back - spec.height).abs() <= 1e-6 * spec.height);
        }
    }

    #[test]
    fn extensional_round_trip(b in 2.0..8.0f64, r in 0.5..3.0f64, h in 0.5..5.0f64, g in 20.0..70.0f64, s in 1.01..2.0f64) {
        let gamma = g.to_radians();
        let l = (b + 2.0 * r) / (2.0 * gamma.cos()) * s;
        let spec = ExtensionalLimitSpec::new(l * MM, b * MM, r * MM, h * MM, gamma).unwrap();
        let beta = extensional_jam_angle(&spec).unwrap();
        prop_assert!(beta > 0.0);
        let back = extensional_inverse(beta, spec.base_width, spec.head_radius, spec.height, gamma).unwrap();
        prop_assert!((back - spec.length).abs() <= 1e-9 * spec.length);
    }

    #[test]
    fn equilibrium_meets_constraint_and_caps(limb in limb(), frac in 0.0..=1.0f64) {
        let pull = limb.capacity() * frac;
        let s = equilibrium_solve(&limb, pull).unwrap();
        prop_assert!(s.constraint_residual(&limb).abs() < 1e-9);
        prop_assert!(s.tension >= 0.0);
        for (j, &t) in limb.joints().zip(&s.theta) {
            prop_assert!(t.abs() <= j.jam_angle);
            prop_assert!(t == 0.0 || t.signum() == j.sense.sign());
        }
    }

    #[test]
    fn loading_is_monotone(limb in limb(), a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let s_lo = equilibrium_solve(&limb, limb.capacity() * lo).unwrap();
        let s_hi = equilibrium_solve(&limb, limb.capacity() * hi).unwrap();
        prop_assert!(s_lo.tension <= s_hi.tension);
        for (x, y) in s_lo.theta.iter().zip(&s_hi.theta) {
            prop_assert!(x.abs() <= y.abs());
        }
    }

    #[test]
    fn feature_meshes_are_closed_and_round_trip(
        r in 0.5..3.0f64, d_over_r in 2.05..10.0f64, h in 0.0..12.0f64, facets in 8usize..40, count in 2usize..6,
    ) {
        let spec = FlexionalLimitSpec::new(d_over_r * r * MM, r * MM, h * MM).unwrap();
        let opts = FeatureOptions { facets, ..FeatureOptions::default() };
        let recipe = flexional_recipe(&spec, count, &opts).unwrap();
        let mesh = recipe.mesh().unwrap();
        mesh.validate().unwrap();
        let bytes = encode(&mesh).unwrap();
        prop_assert_eq!(bytes.len(), 84 + 50 * mesh.len());
        let stl = decode(&bytes).unwrap();
        prop_assert_eq!(encode(&mesh).unwrap(), bytes);
        prop_assert_eq!(stl.facets.len(), mesh.len());
    }

    #[test]
    fn standoff_meshes_are_closed(b in 2.0..8.0f64, r in 0.5..3.0f64, g in 20.0..70.0f64, s in 1.01..2.0f64, pairs in 1usize..4) {
        let gamma = g.to_radians();
        let l = (b + 2.0 * r) / (2.0 * gamma.cos()) * s;
        let spec = ExtensionalLimitSpec::new(l * MM, b * MM, r * MM, 2.0 * MM, gamma).unwrap();
        let (recipe, placements) = extensional_recipe(&spec, 2 * pairs, &FeatureOptions::default()).unwrap();
        let mesh = recipe.mesh().unwrap();
        mesh.validate().unwrap();
        let v = mesh.signed_volume();
        prop_assert!((v - recipe.analytic_volume()).abs() <= 1e-9 * v);
        for pair in placements.chunks(2) {
            let gap = (pair[1].top_center_x - pair[0].top_center_x).abs() - 2.0 * r;
            prop_assert!((gap - spec.rest_gap() / MM).abs() <= 1e-9 * l);
        }
    }

    #[test]
    fn stl_decoder_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..400)) {
        let _ = decode(&bytes);
    }

    #[test]
    fn sweep_parser_round_trips(start in -100i32..100, span in 0i32..200, step in 1i32..50, scale in 0u32..4) {
        let div = 10f64.powi(scale as i32);
        let text = format!("x={}:{}:{}", start as f64 / div, (start + span) as f64 / div, step as f64 / div);
        let spec = SweepSpec::parse(&text).unwrap();
        let values = spec.values();
        prop_assert_eq!(values.len(), spec.count().unwrap());
        prop_assert_eq!(values[0], spec.start);
        prop_assert!(values.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(values.last().unwrap() <= &spec.stop);
        prop_assert_eq!(SweepSpec::parse(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn design_parser_never_panics(text in "\\PC{0,200}") {
        let _ = flexokit::parse_design(&text);
    }
}

#[test]
fn bundled_designs_round_trip_through_json() {
    for name in ["hind_leg.json", "reference_sample.json", "quadruped.json"] {
        let doc = common::load(name);
        let again = flexokit::parse_design(&doc.to_json()).unwrap();
        assert_eq!(again.to_json(), doc.to_json(), "{name}");
        assert_eq!(again.flexures, doc.flexures);
        assert_eq!(again.limbs, doc.limbs);
    }
}
