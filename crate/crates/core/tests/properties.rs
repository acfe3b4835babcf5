//! Randomized invariants.

use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tropabel::catalog::{self, Shape};
use tropabel::cli::format::{parse_curve, value_from_spec, value_to_spec, write_curve};
use tropabel::curve::MarkedPoint;
use tropabel::exactmath::{det, hnf, rat, snf, IntMatrix};
use tropabel::prelog::{prelog_exists, solve_root_congruence};
use tropabel::realize::{realizability, sigma_cocycle, sigma_geometric};
use tropabel::valuegroup::{Alpha, EqualityMode, MulValue};

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(-20i64..=20, n), m).prop_map(|rows| IntMatrix::from_i64(&rows))
    })
}

fn value() -> impl Strategy<Value = MulValue> {
    (
        prop::collection::vec(-3i64..=3, 4),
        prop::sample::select(vec![1i64, 2, 3, 5, 6, 10]),
        -2i64..=2,
        0i64..12,
    )
        .prop_map(|(alphas, base, e, turns)| {
            let mut v = MulValue::phase(&rat(turns, 12)).mul(&MulValue::scalar_pow(&rat(base, 1), &rat(e, 2)).unwrap());
            for (a, k) in Alpha::ALL.iter().zip(alphas) {
                v = v.mul(&MulValue::alpha_pow(*a, rat(k, 3)));
            }
            v
        })
}

fn shape() -> impl Strategy<Value = Shape> {
    prop::sample::select(Shape::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_identity(a in matrix()) {
        let f = snf(&a);
        prop_assert_eq!(f.u.mul(&a).mul(&f.v), f.s.clone());
        prop_assert_eq!(det(&f.u).magnitude().clone(), 1u32.into());
        prop_assert_eq!(det(&f.v).magnitude().clone(), 1u32.into());
        let d = f.invariant_factors();
        for w in d.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn hermite_form_identity(a in matrix()) {
        let (h, u) = hnf(&a);
        prop_assert_eq!(u.mul(&a), h);
        prop_assert_eq!(det(&u).magnitude().clone(), 1u32.into());
    }

    #[test]
    fn group_laws(a in value(), b in value(), c in value(), k in -4i64..=4, l in -4i64..=4) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert!(a.mul(&a.inv()).is_identity());
        prop_assert_eq!(a.pow_int(k).mul(&a.pow_int(l)), a.pow_int(k + l));
    }

    #[test]
    fn roots_invert_powers(a in value(), k in 1u64..=9) {
        prop_assert_eq!(a.root(k).pow_int(k as i64), a.clone());
        let phase = a.root(k).phase_turns().clone();
        prop_assert!(phase >= rat(0, 1) && phase < rat(1, k as i64));
    }

    #[test]
    fn value_spec_round_trip(a in value()) {
        prop_assert_eq!(value_from_spec(&value_to_spec(&a)).unwrap(), a);
    }

    #[test]
    fn root_congruence_holds(w1 in 1i64..=12, w2 in 1i64..=12, w3 in 1i64..=12, n in -20i64..=20, sign in prop::sample::select(vec![-1i64, 1])) {
        let gamma = num_integer::gcd(num_integer::gcd(w1, w2), w3);
        let (l, m) = solve_root_congruence(w1, w2, w3, gamma, sign, n);
        prop_assert_eq!((l * w1 - m * w2 + sign * n * gamma).rem_euclid(w3), 0);
    }

}

// random curve generation dominates these; fewer cases keep the run short
proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sigma_agrees_on_random_curves(seed in any::<u64>(), s in shape(), p in 3i64..40, q in 3i64..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = catalog::random_curve(&mut rng, s);
        let c = c.relift(&catalog::random_moves(&mut rng, &c));
        if let Ok(g) = sigma_geometric(&c, &[rat(1, p), rat(1, q * q + 1)]) {
            prop_assert_eq!(g, sigma_cocycle(&c));
        }
    }

    #[test]
    fn verdicts_agree_on_random_exact_curves(seed in any::<u64>(), s in shape(), tuned in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = catalog::random_curve(&mut rng, s);
        let mults = if tuned {
            catalog::tuned_multipliers(&mut rng, &sigma_cocycle(&c), &MulValue::one())
        } else {
            catalog::random_polar_multipliers(&mut rng)
        };
        let c = catalog::with_multipliers(&c, mults);
        let mode = c.lattice.equality_mode(None, 1e-9).unwrap();
        prop_assert_eq!(realizability(&c, &mode).unwrap().verdict, prelog_exists(&c, &mode).unwrap());
        prop_assert_eq!(
            realizability(&c, &EqualityMode::Formal).unwrap().verdict,
            prelog_exists(&c, &EqualityMode::Formal).unwrap()
        );
    }

    #[test]
    fn curve_files_round_trip(seed in any::<u64>(), s in shape(), exact in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = catalog::random_curve(&mut rng, s);
        if exact {
            c = catalog::with_multipliers(&c, catalog::random_polar_multipliers(&mut rng));
        }
        let marks = catalog::random_marks(&mut rng, &c, 2);
        let text = write_curve(&c, &marks);
        let (back, back_marks) = parse_curve(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(&back_marks, &marks);
        prop_assert_eq!(write_curve(&back, &back_marks), text);
    }

    #[test]
    fn subdividing_keeps_sigma(seed in any::<u64>(), s in shape(), t in 1i64..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = catalog::random_curve(&mut rng, s);
        let (sub, _) = c.subdivide(&[MarkedPoint { edge: 0, t: rat(t, 10) }]).unwrap();
        prop_assert_eq!(sigma_cocycle(&sub), sigma_cocycle(&c));
        prop_assert_eq!(sub.genus(), c.genus());
    }
}

