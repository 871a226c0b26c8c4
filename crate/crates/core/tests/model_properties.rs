use illusion_core::generators::random_model;
use illusion_core::model::boltzmann_weights;
use illusion_core::*;
use proptest::prelude::*;

fn model_strategy() -> impl Strategy<Value = IsingModel> {
    (2usize..9, any::<u64>(), 0.1f64..0.9, 0.0f64..2.0)
        .prop_map(|(n, seed, density, field)| random_model(n, density, field, seed))
}

fn state_strategy(n: usize) -> impl Strategy<Value = SpinState> {
    prop::collection::vec(prop_oneof![Just(-1i8), Just(1i8)], n)
        .prop_map(|s| SpinState::new(s).unwrap())
}

fn field_free(m: &IsingModel) -> IsingModel {
    IsingModel::new(m.n(), vec![0.0; m.n()], m.couplings().to_vec()).unwrap()
}

proptest! {
    #[test]
    fn global_flip_preserves_energy_without_fields(
        (m, s) in model_strategy().prop_flat_map(|m| { let n = m.n(); (Just(m), state_strategy(n)) })
    ) {
        let z = field_free(&m);
        let a = z.energy(&s).unwrap();
        let b = z.energy(&s.flipped()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn single_flip_energy_difference_is_twice_the_field(
        (m, s, i) in model_strategy().prop_flat_map(|m| {
            let n = m.n();
            (Just(m), state_strategy(n), 0..n)
        })
    ) {
        let mut up = s.clone();
        up.set(i, 1);
        let mut down = s.clone();
        down.set(i, -1);
        let field = m.local_field(&s, i).unwrap();
        let diff = m.energy(&down).unwrap() - m.energy(&up).unwrap();
        prop_assert!((diff - 2.0 * field).abs() <= 1e-9);
    }

    #[test]
    fn boltzmann_is_normalised_and_shift_invariant(m in model_strategy(), beta in 0.05f64..3.0, shift in -50.0f64..50.0) {
        let p = m.exact_boltzmann(beta).unwrap();
        let total: f64 = p.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let shifted: Vec<f64> = m.all_energies().unwrap().iter().map(|e| e + shift).collect();
        let q = boltzmann_weights(&shifted, beta);
        for (a, b) in p.probabilities().iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn index_encoding_round_trips(n in 1usize..20, raw in any::<u64>()) {
        let index = raw & ((1u64 << n) - 1);
        prop_assert_eq!(SpinState::from_index(index, n).index(), index);
    }

    #[test]
    fn ground_states_attain_the_minimum(m in model_strategy()) {
        let g = m.ground_states().unwrap();
        let min = m.all_energies().unwrap().into_iter().fold(f64::INFINITY, f64::min);
        prop_assert!(!g.states.is_empty());
        for s in &g.states {
            prop_assert!((m.energy(s).unwrap() - min).abs() <= 1e-9 * min.abs().max(1.0));
        }
    }
}
