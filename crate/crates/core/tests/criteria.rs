use cohsteer::coherence::CoherenceMeasure;
use cohsteer::states::{bell_like, random_two_qubit_state, DensityMatrix};
use cohsteer::steering::{exceeds, sigeur_lhs, Assemblage, CriterionValues};

fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|x| **x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

/// (S0, S12/2) on the Bell-like family for each measure.
fn closed_form(measure: CoherenceMeasure, theta: f64) -> (f64, f64) {
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    match measure {
        CoherenceMeasure::L1c => (2.0 * c2.abs(), 2.0 + s2.abs()),
        CoherenceMeasure::Rec => (
            2.0 * binary_entropy((1.0 + s2) / 2.0),
            2.0 + binary_entropy(theta.cos().powi(2)),
        ),
        CoherenceMeasure::Sic => (2.0 * c2 * c2, 2.0 + s2 * s2),
    }
}

fn criteria(rho: &DensityMatrix) -> Vec<(CoherenceMeasure, CriterionValues)> {
    let a = Assemblage::from_state(rho).unwrap();
    CoherenceMeasure::ALL
        .iter()
        .map(|&q| (q, a.criteria(q).unwrap()))
        .collect()
}

fn check_bound_and_complementarity(rho: &DensityMatrix, label: &str) {
    for (q, v) in criteria(rho) {
        assert!(
            v.s012_third <= q.bound() + 1e-9,
            "{label}: {q} three-setting {} above {}",
            v.s012_third,
            q.bound()
        );
        if exceeds(v.s12_half, q.bound()) {
            assert!(!exceeds(v.s0, q.bound()), "{label}: {q} violates both");
        }
        assert!((3.0 * v.s012_third - v.s0 - 2.0 * v.s12_half).abs() < 1e-9);
    }
}

#[test]
fn closed_forms_on_reference_angles() {
    for deg in [
        0.0, 10.0, 20.0, 30.0, 40.0, 45.0, 50.0, 60.0, 70.0, 80.0, 90.0f64,
    ] {
        let theta = deg.to_radians();
        let rho = bell_like(theta);
        for (q, v) in criteria(&rho) {
            let (s0, s12) = closed_form(q, theta);
            assert!((v.s0 - s0).abs() < 1e-9, "{deg} {q} S0 {} vs {s0}", v.s0);
            assert!(
                (v.s12_half - s12).abs() < 1e-9,
                "{deg} {q} S12/2 {} vs {s12}",
                v.s12_half
            );
        }
        let sig = sigeur_lhs(&rho, 2.0).unwrap();
        assert!((sig - (2.0 * theta).cos().powi(2)).abs() < 1e-9);
    }
}

#[test]
fn three_setting_bound_on_bell_like_grid() {
    for deg in 0..=360 {
        check_bound_and_complementarity(
            &bell_like((deg as f64).to_radians()),
            &format!("{deg} deg"),
        );
    }
}

#[test]
fn three_setting_bound_on_random_states() {
    for seed in 0..10_000u64 {
        let rho = random_two_qubit_state(seed, 1 + (seed % 4) as usize).unwrap();
        check_bound_and_complementarity(&rho, &format!("seed {seed}"));
    }
}

#[test]
fn one_and_two_setting_values_are_anticorrelated() {
    let h = 1e-4;
    for q in CoherenceMeasure::ALL {
        for deg in 1..45 {
            let t = (deg as f64).to_radians();
            let (a0, a12) = closed_form(q, t - h);
            let (b0, b12) = closed_form(q, t + h);
            let d0 = b0 - a0;
            let d12 = b12 - a12;
            assert!(d0 * d12 < 0.0, "{q} at {deg} deg: {d0} {d12}");
        }
    }
}

#[test]
fn no_signalling_on_random_states() {
    for seed in 0..500u64 {
        let rho = random_two_qubit_state(seed, 1 + (seed % 4) as usize).unwrap();
        let bob = rho.reduced(cohsteer::matcore::Subsystem::B).unwrap();
        for e in Assemblage::from_state(&rho).unwrap().ensembles() {
            assert!(e.average_state().max_abs_diff(bob.matrix()) < 1e-10);
        }
    }
}

#[test]
fn sic_alone_certifies_steering_at_10_and_80_degrees() {
    for deg in [10.0f64, 80.0] {
        let vals = criteria(&bell_like(deg.to_radians()));
        let get = |q| vals.iter().find(|(m, _)| *m == q).unwrap().1.s12_half;
        assert!(exceeds(get(CoherenceMeasure::Sic), 2.0));
        assert!(!exceeds(get(CoherenceMeasure::L1c), 6f64.sqrt()));
        assert!(!exceeds(get(CoherenceMeasure::Rec), 2.23));
    }
}
