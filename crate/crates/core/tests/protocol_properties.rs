use proptest::prelude::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use qstlab::pauli::{apply_key, key_matrix, PauliKey};
use qstlab::protocol::{
    eavesdropper_state, keygen_correlated_run, run_with_keys, HopKeys, ProtocolConfig, RunOptions,
};
use qstlab::randomizer::{channel_apply_average, sample_key_set, KeySet};
use qstlab::rng::{self, domain};
use qstlab::security::distinguishing_advantage;
use qstlab::state::{random_pure_state, DensityMatrix};

fn small_config(parties: usize, n: usize, seed: u64) -> ProtocolConfig {
    let sets = (0..parties - 1)
        .map(|h| {
            let set = sample_key_set(n, 3, &mut rng::stream(seed, domain::KEYSET, h as u64)).unwrap();
            (set, format!("hop{h}"))
        })
        .collect();
    ProtocolConfig::build(parties, n, 1.0, seed, HopKeys::Given(sets)).unwrap()
}

/// Averages over every key tuple of the first `hops` sets by enumeration.
fn enumerate_view(sets: &[KeySet], hops: usize, rho: &DensityMatrix) -> DensityMatrix {
    let mut out = rho.clone();
    for set in &sets[..hops] {
        out = channel_apply_average(set, &out).unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_is_identity(parties in 2usize..=6, n in 1usize..=8, seed in any::<u64>(), run in 0u64..1000) {
        let config = ProtocolConfig::build(parties, n, 0.5, seed, HopKeys::Sampled).unwrap();
        let keys = keygen_correlated_run(&config, run);
        let input = random_pure_state(n, seed ^ run).unwrap();
        let t = run_with_keys(&config, &keys, &input, &RunOptions::default()).unwrap();
        prop_assert!(t.outcome.fidelity >= 1.0 - 1e-12);
        prop_assert_eq!(t.hops.len(), parties - 1);
    }

    #[test]
    fn keys_cancel_to_a_phase_times_identity(parties in 2usize..=6, n in 1usize..=3, seed in any::<u64>()) {
        let config = ProtocolConfig::build(parties, n, 0.5, seed, HopKeys::Sampled).unwrap();
        let keys = keygen_correlated_run(&config, 0);
        prop_assert!(keys.xor_is_zero());
        let product = keys.operator_product();
        prop_assert!(product.key.is_identity());
        let dim = 1usize << n;
        let mut dense = DMatrix::<Complex64>::identity(dim, dim);
        for key in keys.keys() {
            dense = key_matrix(key).unwrap() * dense;
        }
        let expected = DMatrix::<Complex64>::identity(dim, dim) * product.phase.to_complex();
        prop_assert!((dense - expected).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn ciphertexts_are_the_running_key_applications(parties in 2usize..=5, n in 1usize..=4, seed in any::<u64>()) {
        let config = ProtocolConfig::build(parties, n, 0.5, seed, HopKeys::Sampled).unwrap();
        let keys = keygen_correlated_run(&config, 1);
        let input = random_pure_state(n, seed).unwrap();
        let t = run_with_keys(&config, &keys, &input, &RunOptions { taps: Some(vec![]) }).unwrap();
        let mut state = input;
        for (hop, key) in t.hops.iter().zip(keys.keys()) {
            state = apply_key(&state, key).unwrap();
            prop_assert!(hop.ciphertext.fidelity(&state).unwrap() > 1.0 - 1e-12);
            prop_assert!(!hop.captured);
        }
    }

    #[test]
    fn adversary_view_matches_enumerated_average(parties in 2usize..=4, n in 1usize..=3, seed in any::<u64>()) {
        let config = small_config(parties, n, seed);
        let rho = DensityMatrix::from_pure(&random_pure_state(n, seed).unwrap()).unwrap();
        for hop in 1..parties {
            let analytic = eavesdropper_state(&config, hop, &rho).unwrap();
            let oracle = enumerate_view(config.hop_sets(), hop, &rho);
            prop_assert!(analytic.max_abs_diff(&oracle).unwrap() < 1e-12);
        }
    }

    #[test]
    fn final_hop_advantage_is_within_epsilon(seed in 0u64..20, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (n, eps) = (3, 0.8);
        let config = ProtocolConfig::build(3, n, eps, seed, HopKeys::Certified { max_retries: 49 }).unwrap();
        let r1 = DensityMatrix::from_pure(&random_pure_state(n, s1).unwrap()).unwrap();
        let r2 = DensityMatrix::from_pure(&random_pure_state(n, s2).unwrap()).unwrap();
        prop_assert!(distinguishing_advantage(config.channel(), &r1, &r2).unwrap() <= eps);
    }
}

#[test]
fn single_flipped_key_bit_is_a_single_pauli_error() {
    let config = ProtocolConfig::build(3, 2, 0.5, 9, HopKeys::Sampled).unwrap();
    let input = random_pure_state(2, 3).unwrap();
    for bit in 0..4 {
        let keys = keygen_correlated_run(&config, 0).with_flipped_bit(3, bit).unwrap();
        let t = run_with_keys(&config, &keys, &input, &RunOptions::default()).unwrap();
        let error = PauliKey::from_index(2, 1 << (3 - bit)).unwrap();
        let expected = input.fidelity(&apply_key(&input, &error).unwrap()).unwrap();
        assert!((t.outcome.fidelity - expected).abs() < 1e-12, "bit {bit}");
        assert!(!keys.xor_is_zero());
    }
}
