//! The polynomial realization of the inverse of the worst-case series,
//! checked word by word against the group inverse.

use fliess_core::fliess::{realization_to_series, PolynomialRealization};
use fliess_core::groups::group_inverse;
use fliess_core::{Alphabet, Rational, Series, UnitalSeries};

const TRUNC: usize = 4;

fn realized(g1: &str, k: &Rational, m: &Rational) -> Series<Rational> {
    let text = format!("state z\nparam K M\ng0: M/K*(z^2 - z^3)\ng1: {g1}\nh: -z\nz0: K\n");
    let r = PolynomialRealization::parse(&text)
        .unwrap()
        .with_params(&[("K".into(), k.clone()), ("M".into(), m.clone())])
        .unwrap();
    realization_to_series(&r, TRUNC)
        .unwrap()
        .map(|p| p.as_constant().unwrap())
}

fn inverse(k: &Rational, m: &Rational) -> Series<Rational> {
    let cbar = Series::worst_case(k.clone(), m.clone(), Alphabet::siso(), TRUNC, 1);
    group_inverse(&UnitalSeries::new(cbar).unwrap(), TRUNC)
        .unwrap()
        .into_body()
}

fn mismatches(a: &Series<Rational>, b: &Series<Rational>) -> usize {
    Alphabet::siso()
        .words_up_to(TRUNC)
        .iter()
        .filter(|w| a.coeff(0, w).unwrap() != b.coeff(0, w).unwrap())
        .count()
}

#[test]
fn scaled_input_field_matches_every_word() {
    for (k, m) in [((1, 2), (3, 1)), ((2, 3), (1, 1)), ((5, 1), (1, 4))] {
        let k = Rational::new(k.0.into(), k.1.into());
        let m = Rational::new(m.0.into(), m.1.into());
        assert_eq!(
            mismatches(&realized("M/K*z^2", &k, &m), &inverse(&k, &m)),
            0,
            "K={k} M={m}"
        );
    }
}

#[test]
fn unscaled_input_field_agrees_only_on_x0_powers() {
    let (k, m) = (
        Rational::new(1.into(), 2.into()),
        Rational::new(3.into(), 1.into()),
    );
    let (real, inv) = (realized("z^2", &k, &m), inverse(&k, &m));
    assert!(mismatches(&real, &inv) > 0);
    for n in 0..=TRUNC {
        let w = fliess_core::Word::power(0, n);
        assert_eq!(real.coeff(0, &w).unwrap(), inv.coeff(0, &w).unwrap());
    }
}
