//! The shuffle unit group and the output-feedback group.

use crate::error::{Error, Result};
use crate::products::{compose, mixed_compose, mixed_compose_bounded, shuffle, Bound};
use crate::scalar::{FieldScalar, Scalar};
use crate::series::Series;
use crate::words::{Alphabet, Word};

/// `c_δ = δ + c`, the generating series of `I + F_c`. Only the body `c` is
/// stored; it has one component per input.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitalSeries<T> {
    body: Series<T>,
}

impl<T: Scalar> UnitalSeries<T> {
    pub fn new(body: Series<T>) -> Result<Self> {
        let m = body.alphabet().m() as usize;
        if body.components() != m {
            return Err(Error::ComponentMismatch {
                expected: m,
                found: body.components(),
            });
        }
        Ok(UnitalSeries { body })
    }

    /// `δ` itself.
    pub fn identity(alphabet: Alphabet, trunc: usize) -> Self {
        UnitalSeries {
            body: Series::zero(alphabet, alphabet.m() as usize, trunc),
        }
    }

    pub fn body(&self) -> &Series<T> {
        &self.body
    }

    pub fn into_body(self) -> Series<T> {
        self.body
    }

    pub fn is_identity(&self) -> bool {
        self.body.is_zero()
    }
}

/// `(δ+c) ∘ (δ+d) = δ + d + c ∘̃ d_δ`.
pub fn group_product<T: Scalar>(
    c: &UnitalSeries<T>,
    d: &UnitalSeries<T>,
    trunc: usize,
) -> Result<UnitalSeries<T>> {
    let mixed = mixed_compose(&c.body, &d.body, trunc)?;
    Ok(UnitalSeries {
        body: d.body.truncate(trunc)?.try_add(&mixed)?,
    })
}

/// Inverse in the output-feedback group.
///
/// The body `e` of the inverse is the fixed point of `e = −(c ∘̃ e_δ)`.
/// The coefficient of a word of weight `w` on the right involves `e` only
/// on words of smaller weight, so sweeping `w = 0, 1, ..., 2N` and freezing
/// each weight class after its sweep solves the equation exactly.
pub fn group_inverse<T: Scalar>(c: &UnitalSeries<T>, trunc: usize) -> Result<UnitalSeries<T>> {
    if c.body.trunc() < trunc {
        return Err(Error::TruncationMismatch {
            have: c.body.trunc(),
            need: trunc,
        });
    }
    let alphabet = c.body.alphabet();
    let m = alphabet.m() as usize;
    let mut e = Series::zero(alphabet, m, trunc);
    for weight in 0..=2 * trunc {
        let bound = Bound {
            max_len: trunc,
            max_weight: weight,
        };
        let candidate = mixed_compose_bounded(&c.body, &e, bound);
        for (j, comp) in candidate.iter().enumerate() {
            for (word, v) in comp {
                if word.weight() < weight && e.get(j, word) != Some(&-v.clone()) {
                    return Err(Error::NonConvergence {
                        weight,
                        word: word.to_string(),
                    });
                }
            }
            for (word, v) in e.component_map(j).iter() {
                if !comp.contains_key(word) {
                    return Err(Error::NonConvergence {
                        weight,
                        word: format!("{word} (vanished: {v:?})"),
                    });
                }
            }
        }
        for (j, comp) in candidate.into_iter().enumerate() {
            for (word, v) in comp {
                if word.weight() == weight {
                    e.add_term(j, word, -v);
                }
            }
        }
    }
    Ok(UnitalSeries { body: e })
}

fn require_siso<T: Scalar>(s: &Series<T>) -> Result<()> {
    if s.alphabet().m() != 1 || s.components() != 1 {
        return Err(Error::UnsupportedArity {
            m: s.alphabet().m() as usize,
            l: s.components(),
        });
    }
    Ok(())
}

/// Closed loop with `F_c` forward and `F_d` in the feedback path:
/// `c @ d = c ∘̃ ((−d ∘ c)_δ)^{∘−1}`.
pub fn feedback<T: Scalar>(c: &Series<T>, d: &Series<T>, trunc: usize) -> Result<Series<T>> {
    require_siso(c)?;
    require_siso(d)?;
    let loop_gain = -&compose(d, c, trunc)?;
    let e = group_inverse(&UnitalSeries::new(loop_gain)?, trunc)?;
    mixed_compose(c, &e.body, trunc)
}

/// `(−c) @ δ = (−c) ∘̃ (c_δ)^{∘−1}`; equals the body of `(c_δ)^{∘−1}`.
pub fn unity_feedback<T: Scalar>(c: &Series<T>, trunc: usize) -> Result<Series<T>> {
    let inv = group_inverse(&UnitalSeries::new(c.clone())?, trunc)?;
    mixed_compose(&-c, &inv.body, trunc)
}

/// `c^{⧢−1} = (c,∅)^{−1} Σ_{k≤L} (c′)^{⧢k}` with `c′ = 1 − c/(c,∅)`,
/// taken componentwise.
pub fn shuffle_inverse<T: FieldScalar>(c: &Series<T>, trunc: usize) -> Result<Series<T>> {
    if c.trunc() < trunc {
        return Err(Error::TruncationMismatch {
            have: c.trunc(),
            need: trunc,
        });
    }
    let mut parts = Vec::with_capacity(c.components());
    for j in 0..c.components() {
        let comp = c.component(j).truncate(trunc)?;
        let c0 = comp.coeff(0, &Word::empty())?;
        if c0.is_zero() {
            return Err(Error::ProperSeriesError);
        }
        let inv0 = T::one() / c0;
        let one = Series::one(c.alphabet(), trunc);
        let proper = one.try_sub(&comp.scale(&inv0))?;
        let mut power = one.clone();
        let mut star = one;
        for _ in 1..=trunc {
            power = shuffle(&power, &proper, trunc)?;
            if power.is_zero() {
                break;
            }
            star = star.try_add(&power)?;
        }
        parts.push(star.scale(&inv0));
    }
    Series::from_components(parts)
}

/// `c / d = c ⧢ d^{⧢−1}`.
pub fn shuffle_quotient<T: FieldScalar>(
    c: &Series<T>,
    d: &Series<T>,
    trunc: usize,
) -> Result<Series<T>> {
    let inv = shuffle_inverse(d, trunc)?;
    shuffle(&c.truncate(trunc)?, &inv, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::factorial;
    use crate::series::random_ball_series;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn s(trunc: usize, terms: &[(i64, &str)]) -> Series<Rational> {
        Series::from_terms(
            Alphabet::siso(),
            trunc,
            terms.iter().map(|&(v, t)| (q(v), w(t))),
        )
    }

    fn unital(c: Series<Rational>) -> UnitalSeries<Rational> {
        UnitalSeries::new(c).unwrap()
    }

    #[test]
    fn shuffle_inverse_examples() {
        assert_eq!(
            shuffle_inverse(&s(4, &[(1, "e")]), 4).unwrap(),
            s(4, &[(1, "e")])
        );
        assert_eq!(
            shuffle_inverse(&s(4, &[(2, "e")]), 4).unwrap(),
            Series::constant(Alphabet::siso(), 1, 4, Rational::new(1.into(), 2.into()))
        );
        let c = s(5, &[(1, "e"), (-1, "x1")]);
        let inv = shuffle_inverse(&c, 5).unwrap();
        let expected = Series::from_terms(
            Alphabet::siso(),
            5,
            (0..=5).map(|k| (factorial::<Rational>(k), Word::power(1, k))),
        );
        assert_eq!(inv, expected);
        assert_eq!(
            shuffle(&c, &inv, 5).unwrap(),
            Series::one(Alphabet::siso(), 5)
        );
        assert_eq!(
            shuffle_inverse(&s(3, &[(1, "x1")]), 3),
            Err(Error::ProperSeriesError)
        );
    }

    #[test]
    fn shuffle_quotient_examples() {
        let c = s(4, &[(3, "e"), (1, "x0x1"), (-2, "x1")]);
        assert_eq!(shuffle_quotient(&c, &s(4, &[(1, "e")]), 4).unwrap(), c);
        assert_eq!(
            shuffle_quotient(&c, &c, 4).unwrap(),
            Series::one(Alphabet::siso(), 4)
        );
        assert_eq!(
            shuffle_quotient(&s(4, &[(1, "e")]), &s(4, &[(1, "e"), (-1, "x1")]), 4).unwrap(),
            shuffle_inverse(&s(4, &[(1, "e"), (-1, "x1")]), 4).unwrap()
        );
    }

    #[test]
    fn group_product_examples() {
        let c = unital(s(4, &[(1, "x1"), (2, "x0x1"), (-1, "e")]));
        let id = UnitalSeries::identity(Alphabet::siso(), 4);
        assert_eq!(group_product(&c, &id, 4).unwrap(), c);
        assert_eq!(group_product(&id, &c, 4).unwrap(), c);
        let d = s(4, &[(1, "x1"), (3, "e")]);
        let lhs = group_product(&unital(s(4, &[(1, "x1")])), &unital(d.clone()), 4).unwrap();
        let expected = &(&d + &s(4, &[(1, "x1")])) + &s(4, &[(1, "x0x1"), (3, "x0")]);
        assert_eq!(lhs.body(), &expected);
    }

    #[test]
    fn group_inverse_examples() {
        let id = UnitalSeries::<Rational>::identity(Alphabet::siso(), 5);
        assert_eq!(group_inverse(&id, 5).unwrap(), id);
        for seed in 0..3 {
            let c = unital(random_ball_series(q(1), q(1), 5, 1, seed));
            let inv = group_inverse(&c, 5).unwrap();
            assert!(group_product(&c, &inv, 5).unwrap().is_identity());
            assert!(group_product(&inv, &c, 5).unwrap().is_identity());
        }
    }

    #[test]
    fn feedback_examples() {
        let c = random_ball_series(q(1), q(1), 4, 1, 9);
        assert_eq!(feedback(&c, &s(4, &[]), 4).unwrap(), c);
        let inv = group_inverse(&unital(c.clone()), 4).unwrap();
        assert_eq!(&unity_feedback(&c, 4).unwrap(), inv.body());
        let mimo = Series::<Rational>::zero(Alphabet::new(2), 2, 3);
        assert!(matches!(
            feedback(&mimo, &mimo, 3),
            Err(Error::UnsupportedArity { .. })
        ));
    }
}
