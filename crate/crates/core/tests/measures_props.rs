use a2_core::measures::{
    carnap, good, keynes, l_keynes, qualitative_to_probability, QualitativeLevel,
};
use a2_testkit::joint::Joint;
use proptest::prelude::*;

fn joint(seed: u64) -> Joint {
    Joint::sample(&mut a2_testkit::rng(seed), 1e-3)
}

#[test]
fn keynes_neutral_to_confident() {
    let prior = qualitative_to_probability(QualitativeLevel::Neutral);
    let posterior = qualitative_to_probability(QualitativeLevel::Confident);
    let k = keynes(prior, posterior, 10.0).unwrap().value.get();
    // log10(0.9 / 0.5)
    assert!((k - 1.8f64.log10()).abs() < 1e-15);
    assert!((k - 0.26).abs() <= 0.005);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn keynes_forms_agree(seed in any::<u64>(), base in prop::sample::select(vec![2.0, std::f64::consts::E, 10.0])) {
        let j = joint(seed);
        let k = keynes(j.p_c(), j.p_c_given_e(), base).unwrap().value.get();
        let l = l_keynes(j.p_e_given_c(), j.p_e(), base).unwrap().value.get();
        prop_assert!((k - l).abs() <= 1e-9, "{k} vs {l}");
        prop_assert!((k - j.log_association(base)).abs() <= 1e-9);
    }

    #[test]
    fn good_is_log_odds_ratio(seed in any::<u64>()) {
        let j = joint(seed);
        let g = good(j.p_e_given_c(), j.p_e_given_not_c(), 10.0).unwrap().value.get();
        prop_assert!((g - j.log_odds_ratio(10.0)).abs() <= 1e-9, "{g} vs {}", j.log_odds_ratio(10.0));
    }

    #[test]
    fn carnap_is_covariance(seed in any::<u64>()) {
        let j = joint(seed);
        let c = carnap(j.c_e, j.p_c(), j.p_e()).unwrap().value.get();
        prop_assert!((c - j.covariance()).abs() <= 1e-12);
    }

    #[test]
    fn measures_share_a_sign(seed in any::<u64>()) {
        let j = joint(seed);
        let k = keynes(j.p_c(), j.p_c_given_e(), 10.0).unwrap().value.get();
        let g = good(j.p_e_given_c(), j.p_e_given_not_c(), 10.0).unwrap().value.get();
        let c = j.covariance();
        // skip the measure-zero neighbourhood where rounding decides the sign
        prop_assume!(c.abs() > 1e-12);
        prop_assert_eq!(k > 0.0, c > 0.0);
        prop_assert_eq!(g > 0.0, c > 0.0);
    }

    #[test]
    fn keynes_monotone(a in 0.001f64..0.999, b in 0.001f64..0.999, fixed in 0.001f64..0.999) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        // increasing in the posterior
        prop_assert!(keynes(fixed, lo, 10.0).unwrap().value.get() < keynes(fixed, hi, 10.0).unwrap().value.get());
        // decreasing in the prior
        prop_assert!(keynes(lo, fixed, 10.0).unwrap().value.get() > keynes(hi, fixed, 10.0).unwrap().value.get());
    }

    #[test]
    fn irrelevance_is_zero(p in 0.001f64..=1.0) {
        prop_assert_eq!(keynes(p, p, 10.0).unwrap().value.get(), 0.0);
    }
}

#[test]
fn zero_posterior_is_minus_infinity() {
    let k = keynes(0.5, 0.0, 10.0).unwrap();
    assert_eq!(k.value.get(), f64::NEG_INFINITY);
    assert_eq!(serde_json::to_string(&k.value).unwrap(), "\"-inf\"");
    let up: a2_core::measures::MeasureValue = serde_json::from_str("\"+inf\"").unwrap();
    assert_eq!(up.get(), f64::INFINITY);
    assert_eq!(serde_json::to_string(&up).unwrap(), "\"+inf\"");
}
