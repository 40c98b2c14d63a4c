use proptest::prelude::*;
use qpq::dataset::{Dataset, DatasetMeta};
use qpq::engine::{Backend, EngineState, Oracle, SuperpositionHandle, Threshold};
use qpq::ledger::IoPolicy;
use qpq::rng::rng_for;
use qpq::{IoLedger, Qram, UtilityFunction};

fn ramp(n: usize) -> (Dataset, UtilityFunction) {
    let bits = qpq::dataset::index_bits(n).max(1);
    let ds = Dataset::from_flat((0..n as u32).collect(), 1, bits, DatasetMeta::named("ramp")).unwrap();
    (ds, UtilityFunction::linear(vec![1.0], bits, bits).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_classes_stay_uniform(
        utils in prop::collection::vec(0u32..16, 1..200),
        theta in 0u64..17,
        dummies in prop::collection::vec(any::<prop::sample::Index>(), 0..4),
        steps in 0usize..30,
    ) {
        let n = utils.len();
        let ds = Dataset::from_flat(utils, 1, 4, DatasetMeta::named("p")).unwrap();
        let f = UtilityFunction::linear(vec![1.0], 4, 4).unwrap();
        let mut qram = Qram::new(&ds);
        for d in &dummies {
            qram.store(d.index(n), qpq::qram::CellValue::Dummy, &mut IoLedger::new()).unwrap();
        }
        let oracle = Oracle::new(&qram, &f, Threshold::at_least(theta));
        prop_assume!(oracle.any_eligible());
        let mut st = EngineState::init_uniform(Backend::Dense, &oracle).unwrap();
        let policy = IoPolicy::default();
        for _ in 0..steps {
            st.grover_iteration(&oracle, &mut IoLedger::new(), &policy);
            let (g, b) = st.class_spread().unwrap();
            prop_assert!(g < 1e-12 && b < 1e-12, "spread {g} {b}");
            let norm: f64 = st.index_probabilities().iter().sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
        let cf = st.closed_form_amplitude();
        prop_assert!((st.good_amplitude() - cf).abs() < 1e-10);
    }

    #[test]
    fn collapsed_amplitude_is_the_closed_form(n in 1usize..=256, k_frac in 0.0f64..1.0, s in 0u64..=50) {
        let k = ((n as f64 * k_frac) as usize).max(1);
        let (ds, f) = ramp(n);
        let qram = Qram::new(&ds);
        let oracle = Oracle::new(&qram, &f, Threshold::at_least((n - k) as u64));
        let mut st = EngineState::init_uniform(Backend::Collapsed, &oracle).unwrap();
        let policy = IoPolicy::default();
        for _ in 0..s {
            st.grover_iteration(&oracle, &mut IoLedger::new(), &policy);
        }
        let expect = ((2 * s + 1) as f64 * (k as f64 / n as f64).sqrt().asin()).sin();
        prop_assert_eq!(st.good_amplitude(), expect);
    }

    #[test]
    fn gate_state_stays_real_and_normalized(theta in 0u64..4, steps in 0usize..6, seed in any::<u64>()) {
        let ds = qpq::dataset::generate_synthetic(qpq::Category::Inde, 6, 2, 2, seed).unwrap();
        let f = qpq::dataset::random_query(2, 2, 2, seed).unwrap();
        let qram = Qram::new(&ds);
        let oracle = Oracle::new(&qram, &f, Threshold::at_least(theta));
        let mut st = EngineState::init_uniform(Backend::Gate, &oracle).unwrap();
        let policy = IoPolicy::default();
        for _ in 0..steps {
            st.grover_iteration(&oracle, &mut IoLedger::new(), &policy);
            let g = st.gate_state().unwrap();
            prop_assert!((g.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!(g.max_imag() < 1e-12);
            prop_assert!(g.work_register_weight() < 1e-12);
        }
    }
}

/// 99% two-sided binomial interval half-width.
fn ci99(p: f64, n: u32) -> f64 {
    2.576 * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn post_selection_frequency_matches_alpha_squared() {
    let (ds, f) = ramp(64);
    let qram = Qram::new(&ds);
    let policy = IoPolicy::default();
    for (k, s) in [(1usize, 0u32), (3, 1), (10, 2), (20, 3)] {
        let oracle = Oracle::new(&qram, &f, Threshold::at_least((64 - k) as u64));
        let mut st = EngineState::init_uniform(Backend::Collapsed, &oracle).unwrap();
        for _ in 0..s {
            st.grover_iteration(&oracle, &mut IoLedger::new(), &policy);
        }
        let p = st.good_probability();
        let mut rng = rng_for(11, k as u64);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| st.clone().post_select(&oracle, &mut IoLedger::new(), &policy, &mut rng).is_some())
            .count() as u32;
        let freq = hits as f64 / trials as f64;
        assert!((freq - p).abs() <= ci99(p, trials), "k={k} s={s}: {freq} vs {p}");
    }
}

#[test]
fn handle_over_five_and_seven_is_fair() {
    let h = SuperpositionHandle::new(vec![(2, 5), (3, 7)]);
    let mut rng = rng_for(5, 7);
    let shots = 100_000;
    let fives = (0..shots).filter(|_| h.sample(&mut rng).unwrap().1 == 5).count();
    let p = fives as f64 / shots as f64;
    assert!((p - 0.5).abs() <= 0.01, "{p}");
}

#[test]
fn dense_sampling_matches_probabilities() {
    let (ds, f) = ramp(16);
    let qram = Qram::new(&ds);
    let oracle = Oracle::new(&qram, &f, Threshold::at_least(14));
    let mut st = EngineState::init_uniform(Backend::Dense, &oracle).unwrap();
    st.grover_iteration(&oracle, &mut IoLedger::new(), &IoPolicy::default());
    let p = st.index_probabilities();
    let mut rng = rng_for(1, 1);
    let shots = 100_000u32;
    let mut counts = [0u32; 16];
    for _ in 0..shots {
        counts[st.sample_index(&mut rng)] += 1;
    }
    for i in 0..16 {
        let f = counts[i] as f64 / shots as f64;
        assert!((f - p[i]).abs() <= ci99(p[i], shots) + 1e-12, "index {i}: {f} vs {}", p[i]);
    }
}
