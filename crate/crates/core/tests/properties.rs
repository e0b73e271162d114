use proptest::prelude::*;

use polyent::geometry::{
    bloch_of_omega, chordal_distance, identity_residual, ExtendedComplex, RootOptions, RootProfile,
};
use polyent::measures::{slocc_covariance_check, PolynomialMeasure};
use polyent::oracle::wootters_concurrence;
use polyent::quantum::{spectral_decompose_rank2, DensityMatrix};
use polyent::roof::roof_dispatch;
use polyent::sample::{random_local_unitary, random_rank2, random_slocc, random_state, rng_for};

fn extended() -> impl Strategy<Value = ExtendedComplex> {
    prop_oneof![
        9 => (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(re, im)| ExtendedComplex::finite(re, im)),
        1 => Just(ExtendedComplex::Infinity),
    ]
}

fn measure() -> impl Strategy<Value = PolynomialMeasure> {
    prop_oneof![
        Just(PolynomialMeasure::concurrence()),
        Just(PolynomialMeasure::tangle()),
        Just(PolynomialMeasure::sqrt_tangle()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chordal_distance_is_bloch_distance(a in extended(), b in extended()) {
        let chord = chordal_distance(a, b);
        let euclid = bloch_of_omega(a).distance(&bloch_of_omega(b));
        prop_assert!((chord - euclid).abs() < 1e-12, "{chord} vs {euclid}");
    }

    #[test]
    fn concurrence_roof_is_below_the_spectral_average(seed in any::<u64>()) {
        let m = PolynomialMeasure::concurrence();
        let rho = random_rank2(2, &mut rng_for(seed, 0));
        let basis = spectral_decompose_rank2(&rho).unwrap();
        let spectral = basis.lambda0() * m.eval(basis.phi0()).unwrap()
            + basis.lambda1() * m.eval(basis.phi1()).unwrap();
        let roof = roof_dispatch(&m, &rho).unwrap().value;
        prop_assert!(roof <= spectral + 1e-12, "{roof} > {spectral}");
        prop_assert!(roof >= -1e-15);
    }

    #[test]
    fn measures_are_slocc_covariant(m in measure(), seed in any::<u64>(), eps in 0.0..0.5f64) {
        let n = m.arity().trailing_zeros() as usize;
        let mut rng = rng_for(seed, 1);
        let psi = random_state(n, &mut rng);
        let l = random_slocc(n, eps, &mut rng);
        let (lhs, rhs) = slocc_covariance_check(&m, &l, &psi).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn wootters_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 2);
        let rho = random_rank2(2, &mut rng);
        let u = random_local_unitary(2, &mut rng);
        let (moved, _) = u.apply_density(&rho).unwrap();
        let a = wootters_concurrence(&rho).unwrap();
        let b = wootters_concurrence(&moved).unwrap();
        prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn root_product_reproduces_the_measure(m in measure(), seed in any::<u64>()) {
        let n = m.arity().trailing_zeros() as usize;
        let rho: DensityMatrix = random_rank2(n, &mut rng_for(seed, 3));
        let basis = spectral_decompose_rank2(&rho).unwrap();
        let p = RootProfile::compute(&m, &basis, &RootOptions::default()).unwrap();
        let residual = identity_residual(&m, &basis, &p.roots, p.normalization, 200).unwrap();
        prop_assert!(residual < 1e-8, "residual {residual}");
    }
}
