mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secret_teleport::encoding::ghz_state;
use secret_teleport::harness::{
    expected_output_under_ideal_bsm, experiment_inputs, ghz_code_space, SyntheticNoisyState,
};
use secret_teleport::protocol::receiver_target;
use secret_teleport::qstate::DensityMatrix;

fn random_density(photons: usize, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let d = 1 << photons;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for _ in 0..rank {
        let v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        m += common::ket_density(&v);
    }
    let tr = m.trace();
    DensityMatrix::new(photons, m / tr).unwrap()
}

#[test]
fn matches_dense_oracle_on_random_mixed_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        for rank in [1, 2, 4] {
            let input = random_density(n, rank, &mut rng);
            let channel = random_density(n + m, rank, &mut rng);
            let fast = expected_output_under_ideal_bsm(&input, &channel, n, m).unwrap();
            let slow = common::dense_ideal_teleport(input.matrix(), channel.matrix(), n, m);
            let diff = common::max_abs_diff(fast.matrix(), &slow);
            assert!(diff < 1e-10, "n={n} m={m} rank={rank}: {diff:e}");
        }
    }
}

#[test]
fn synthetic_channel_agrees_with_oracle_for_experiment_inputs() {
    let channel = SyntheticNoisyState::for_fidelity(ghz_state(4).unwrap(), 0.73).unwrap();
    let rho_ch = channel.density().unwrap();
    for (name, s) in experiment_inputs() {
        let input = receiver_target(&s, 2).unwrap();
        let out = expected_output_under_ideal_bsm(&input.to_density(), &rho_ch, 2, 2).unwrap();
        let oracle = common::dense_ideal_teleport(
            &common::ket_density(input.amplitudes()),
            rho_ch.matrix(),
            2,
            2,
        );
        assert!(
            common::max_abs_diff(out.matrix(), &oracle) < 1e-10,
            "input {name}"
        );
        let f = out.fidelity(&input).unwrap();
        assert!(f > 2.0 / 3.0, "input {name}: {f}");
        // 1 - 3w/4 with w = 0.288
        assert!((f - 0.784).abs() < 1e-10, "input {name}: {f}");
    }
}

#[test]
fn code_space_noise_on_the_input_is_teleported_faithfully() {
    let channel = DensityMatrix::from_pure(&ghz_state(4).unwrap());
    for (_, s) in experiment_inputs() {
        let target = receiver_target(&s, 2).unwrap();
        for w in [0.1, 0.35, 0.8] {
            let noisy =
                SyntheticNoisyState::within(target.clone(), w, ghz_code_space(2).unwrap()).unwrap();
            let out =
                expected_output_under_ideal_bsm(&noisy.density().unwrap(), &channel, 2, 2).unwrap();
            let f_in = noisy.fidelity().unwrap();
            assert!((out.fidelity(&target).unwrap() - f_in).abs() < 1e-10);
            assert!(out.max_abs_diff(&noisy.density().unwrap()).unwrap() < 1e-10);
        }
    }
}

#[test]
fn full_space_noise_on_the_input_is_not_preserved() {
    let channel = DensityMatrix::from_pure(&ghz_state(4).unwrap());
    let (_, s) = experiment_inputs()[0];
    let target = receiver_target(&s, 2).unwrap();
    let noisy = SyntheticNoisyState::new(target.clone(), 0.4).unwrap();
    let out = expected_output_under_ideal_bsm(&noisy.density().unwrap(), &channel, 2, 2).unwrap();
    let oracle =
        common::dense_ideal_teleport(noisy.density().unwrap().matrix(), channel.matrix(), 2, 2);
    assert!(common::max_abs_diff(out.matrix(), &oracle) < 1e-10);
    assert!((out.fidelity(&target).unwrap() - noisy.fidelity().unwrap()).abs() > 1e-3);
}

fn mix(a: &DensityMatrix, b: &DensityMatrix, t: f64) -> DensityMatrix {
    DensityMatrix::mixture(&[(t, a), (1.0 - t, b)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn affine_in_input_and_channel(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = (2, 1);
        let i1 = random_density(n, 2, &mut rng);
        let i2 = random_density(n, 1, &mut rng);
        let c1 = random_density(n + m, 3, &mut rng);
        let c2 = random_density(n + m, 1, &mut rng);
        let e = |i: &DensityMatrix, c: &DensityMatrix| expected_output_under_ideal_bsm(i, c, n, m).unwrap();
        let lhs = e(&mix(&i1, &i2, t), &c1);
        let rhs = mix(&e(&i1, &c1), &e(&i2, &c1), t);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
        let lhs = e(&i1, &mix(&c1, &c2, t));
        let rhs = mix(&e(&i1, &c1), &e(&i1, &c2), t);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
        prop_assert!((lhs.trace().re - 1.0).abs() < 1e-10);
    }
}
