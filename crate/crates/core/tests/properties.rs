use fliess_core::bounds::{k_epsilon, k_epsilon_truncated};
use fliess_core::groups::{group_inverse, group_product, shuffle_inverse};
use fliess_core::products::{compose, lie_bracket, pre_lie, shuffle};
use fliess_core::{Alphabet, Rational, Series, UnitalSeries, Word};
use num_traits::{One, Zero};
use proptest::prelude::*;

const TRUNC: usize = 4;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Sparse rational series over {x0, x1}, words of length at most `TRUNC`.
fn series() -> impl Strategy<Value = Series<Rational>> {
    let words = Alphabet::siso().words_up_to(TRUNC);
    let n = words.len();
    prop::collection::vec((0..n, -6i64..=6, 1i64..=4), 0..8).prop_map(move |terms| {
        let mut s = Series::zero(Alphabet::siso(), 1, TRUNC);
        for (i, num, den) in terms {
            s.add_term(0, words[i].clone(), q(num, den));
        }
        s
    })
}

fn rational_scalar() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=3).prop_map(|(n, d)| q(n, d))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shuffle_is_commutative(a in series(), b in series()) {
        prop_assert_eq!(shuffle(&a, &b, TRUNC).unwrap(), shuffle(&b, &a, TRUNC).unwrap());
    }

    #[test]
    fn shuffle_is_associative(a in series(), b in series(), c in series()) {
        let left = shuffle(&shuffle(&a, &b, TRUNC).unwrap(), &c, TRUNC).unwrap();
        let right = shuffle(&a, &shuffle(&b, &c, TRUNC).unwrap(), TRUNC).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn shuffle_unit(a in series()) {
        prop_assert_eq!(shuffle(&a, &Series::one(Alphabet::siso(), TRUNC), TRUNC).unwrap(), a);
    }

    #[test]
    fn shuffle_is_bilinear(a in series(), b in series(), c in series(), k in rational_scalar()) {
        let lhs = shuffle(&a.axpy(&k, &b).unwrap(), &c, TRUNC).unwrap();
        let rhs = shuffle(&a, &c, TRUNC).unwrap().axpy(&k, &shuffle(&b, &c, TRUNC).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_is_left_linear(a in series(), b in series(), d in series(), k in rational_scalar()) {
        let lhs = compose(&a.axpy(&k, &b).unwrap(), &d, TRUNC).unwrap();
        let rhs = compose(&a, &d, TRUNC).unwrap().axpy(&k, &compose(&b, &d, TRUNC).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pre_lie_is_linear_in_both_slots(a in series(), b in series(), d in series(), k in rational_scalar()) {
        let left = pre_lie(&a.axpy(&k, &b).unwrap(), &d, TRUNC).unwrap();
        prop_assert_eq!(left, pre_lie(&a, &d, TRUNC).unwrap().axpy(&k, &pre_lie(&b, &d, TRUNC).unwrap()).unwrap());
        let right = pre_lie(&d, &a.axpy(&k, &b).unwrap(), TRUNC).unwrap();
        prop_assert_eq!(right, pre_lie(&d, &a, TRUNC).unwrap().axpy(&k, &pre_lie(&d, &b, TRUNC).unwrap()).unwrap());
    }

    #[test]
    fn pre_lie_identity(a in series(), b in series(), c in series()) {
        // (a ◁ b) ◁ c − a ◁ (b ◁ c) is symmetric in b and c
        let assoc = |x: &Series<Rational>, y: &Series<Rational>, z: &Series<Rational>| {
            let l = pre_lie(&pre_lie(x, y, TRUNC).unwrap(), z, TRUNC).unwrap();
            l.try_sub(&pre_lie(x, &pre_lie(y, z, TRUNC).unwrap(), TRUNC).unwrap()).unwrap()
        };
        prop_assert_eq!(assoc(&a, &b, &c), assoc(&a, &c, &b));
    }

    #[test]
    fn bracket_is_antisymmetric(a in series(), b in series()) {
        let ab = lie_bracket(&a, &b, TRUNC).unwrap();
        let ba = lie_bracket(&b, &a, TRUNC).unwrap();
        prop_assert!(ab.try_add(&ba).unwrap().is_zero());
    }

    #[test]
    fn norm_triangle_inequality(a in series(), b in series(), m in positive()) {
        let sum = a.try_add(&b).unwrap().linf_norm(&m);
        prop_assert!(sum <= a.linf_norm(&m) + b.linf_norm(&m));
    }

    #[test]
    fn norm_is_homogeneous(a in series(), k in rational_scalar(), m in positive()) {
        let abs_k = if k < Rational::zero() { -k.clone() } else { k.clone() };
        prop_assert_eq!(a.scale(&k).linf_norm(&m), abs_k * a.linf_norm(&m));
    }

    #[test]
    fn norm_decreases_in_m(a in series(), m in positive(), extra in positive()) {
        prop_assert!(a.linf_norm(&(m.clone() + extra)) <= a.linf_norm(&m));
    }

    #[test]
    fn shuffle_inverse_of_non_proper(a in series(), c0 in positive()) {
        let mut s = a.clone();
        let e = Word::empty();
        let v = s.coeff(0, &e).unwrap();
        s = s.axpy(&(c0 - v), &Series::one(Alphabet::siso(), TRUNC)).unwrap();
        let inv = shuffle_inverse(&s, TRUNC).unwrap();
        prop_assert_eq!(shuffle(&s, &inv, TRUNC).unwrap(), Series::one(Alphabet::siso(), TRUNC));
    }

    #[test]
    fn text_round_trip(a in series()) {
        let text = a.to_text();
        let back = Series::<Rational>::from_text(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn float_text_round_trip(a in series()) {
        let f = a.to_f64();
        prop_assert_eq!(Series::<f64>::from_text(&f.to_text()).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn group_axioms(a in series(), b in series(), c in series()) {
        let n = 3;
        let g = |s: Series<Rational>| UnitalSeries::new(s.truncate(n).unwrap()).unwrap();
        let (a, b, c) = (g(a), g(b), g(c));
        let ab_c = group_product(&group_product(&a, &b, n).unwrap(), &c, n).unwrap();
        let a_bc = group_product(&a, &group_product(&b, &c, n).unwrap(), n).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let id = UnitalSeries::identity(Alphabet::siso(), n);
        prop_assert_eq!(group_product(&a, &id, n).unwrap(), a.clone());
        prop_assert_eq!(group_product(&id, &a, n).unwrap(), a.clone());
        let inv = group_inverse(&a, n).unwrap();
        prop_assert!(group_product(&a, &inv, n).unwrap().is_identity());
        prop_assert!(group_product(&inv, &a, n).unwrap().is_identity());
    }
}

#[test]
fn k_epsilon_below_closed_form() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let eps: f64 = rng.gen_range(0.01..5.0);
        let k = k_epsilon(eps);
        assert!(k.k <= k.k_hat * (1.0 + 1e-12), "eps={eps}: {k:?}");
        let brute = (0..2000)
            .map(|n| (n as f64 + 1.0) / (1.0 + eps).powi(n))
            .fold(0.0, f64::max);
        assert!((brute - k.k).abs() <= 1e-12 * brute, "eps={eps}");
    }
}

#[test]
fn truncated_k_epsilon_is_monotone_in_length() {
    let eps = q(1, 2);
    let mut prev = Rational::zero();
    for l in 0..12 {
        let k = k_epsilon_truncated(&eps, &Rational::zero(), l);
        assert!(k >= prev);
        prev = k;
    }
    assert_eq!(
        k_epsilon_truncated(&eps, &Rational::zero(), 0),
        Rational::one()
    );
}
