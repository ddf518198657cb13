//! Shuffle, composition, mixed composition and pre-Lie products.
//!
//! The three word-substitution products are evaluated by folding each word
//! of `supp(c)` from its last letter to its first. Images of suffixes are
//! memoized, since the words of a truncated series share almost all of them.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{accumulate, Series};
use crate::words::{shuffle_words, Letter, Word};

pub(crate) type Terms<T> = BTreeMap<Word, T>;

/// Words kept by a truncated computation. All products are nondecreasing in
/// both length and weight, so discarding intermediate words outside the
/// bound never changes a kept coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Bound {
    pub max_len: usize,
    pub max_weight: usize,
}

impl Bound {
    pub fn length(max_len: usize) -> Self {
        Bound {
            max_len,
            max_weight: usize::MAX,
        }
    }

    fn admits(&self, w: &Word) -> bool {
        w.len() <= self.max_len && w.weight() <= self.max_weight
    }

    /// Bound on `v` such that `x_j v` satisfies `self`.
    fn after_prefix(&self, j: Letter) -> Option<Bound> {
        let dw = if j == 0 { 2 } else { 1 };
        if self.max_len == 0 || self.max_weight < dw {
            return None;
        }
        Some(Bound {
            max_len: self.max_len - 1,
            max_weight: self.max_weight.saturating_sub(dw),
        })
    }
}

pub(crate) fn shuffle_terms<T: Scalar>(a: &Terms<T>, b: &Terms<T>, bound: Bound) -> Terms<T> {
    let mut out = Terms::new();
    for (u, cu) in a {
        if u.len() > bound.max_len {
            break;
        }
        let (lu, wu) = (u.len(), u.weight());
        if wu > bound.max_weight {
            continue;
        }
        for (v, cv) in b {
            if lu + v.len() > bound.max_len {
                break;
            }
            if wu + v.weight() > bound.max_weight {
                continue;
            }
            let prod = cu.clone() * cv.clone();
            for (w, mult) in shuffle_words(u, v).iter() {
                accumulate(
                    &mut out,
                    w.clone(),
                    prod.clone() * T::from_u64(mult).expect("multiplicity fits"),
                );
            }
        }
    }
    out
}

fn prefix_into<T: Scalar>(out: &mut Terms<T>, j: Letter, body: &Terms<T>) {
    for (w, v) in body {
        accumulate(out, w.prefixed(j), v.clone());
    }
}

fn require_trunc<T>(s: &Series<T>, need: usize) -> Result<()>
where
    T: Scalar,
{
    if s.trunc() < need {
        return Err(Error::TruncationMismatch {
            have: s.trunc(),
            need,
        });
    }
    Ok(())
}

fn check_substitution<T: Scalar>(c: &Series<T>, d: &Series<T>) -> Result<()> {
    if c.alphabet() != d.alphabet() {
        return Err(Error::AlphabetMismatch {
            left: c.alphabet().m(),
            right: d.alphabet().m(),
        });
    }
    let m = c.alphabet().m() as usize;
    if d.components() != m {
        return Err(Error::ComponentMismatch {
            expected: m,
            found: d.components(),
        });
    }
    Ok(())
}

/// `c ⧢ d`, componentwise for vector-valued series.
pub fn shuffle<T: Scalar>(c: &Series<T>, d: &Series<T>, trunc: usize) -> Result<Series<T>> {
    c.check_compatible(d)?;
    require_trunc(c, trunc)?;
    require_trunc(d, trunc)?;
    let bound = Bound::length(trunc);
    let comps = (0..c.components())
        .map(|j| shuffle_terms(c.component_map(j), d.component_map(j), bound))
        .collect();
    Ok(Series::from_maps(c.alphabet(), trunc, comps))
}

#[derive(Clone, Copy)]
enum Fold {
    /// `ψ_d(x_i)(e) = x0 (d[i] ⧢ e)`, `d[0] = 1`.
    Compose,
    /// `φ_d(x_i)(e) = x_i e + x0 (d[i] ⧢ e)`, `d[0] = 0`.
    Mixed,
}

struct WordFold<'a, T: Scalar> {
    kind: Fold,
    d: &'a Series<T>,
    bound: Bound,
    memo: HashMap<Word, Terms<T>>,
}

impl<'a, T: Scalar> WordFold<'a, T> {
    fn new(kind: Fold, d: &'a Series<T>, bound: Bound) -> Self {
        WordFold {
            kind,
            d,
            bound,
            memo: HashMap::new(),
        }
    }

    fn image(&mut self, word: &Word) -> &Terms<T> {
        if !self.memo.contains_key(word) {
            // shorter suffixes first, so each step finds its tail memoized
            for k in (0..=word.len()).rev() {
                let suffix = word.suffix(k);
                if self.memo.contains_key(&suffix) {
                    continue;
                }
                let value = self.step(&suffix);
                self.memo.insert(suffix, value);
            }
        }
        &self.memo[word]
    }

    fn step(&self, word: &Word) -> Terms<T> {
        let Some((i, tail)) = word.split_first() else {
            let mut one = Terms::new();
            one.insert(Word::empty(), T::one());
            return one;
        };
        let prev = &self.memo[&tail];
        let mut out = Terms::new();
        if let (Fold::Mixed, Some(b)) = (self.kind, self.bound.after_prefix(i)) {
            let kept: Terms<T> = prev
                .iter()
                .filter(|(w, _)| b.admits(w))
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect();
            prefix_into(&mut out, i, &kept);
        }
        if let Some(b) = self.bound.after_prefix(0) {
            let inner = if i == 0 {
                match self.kind {
                    Fold::Compose => prev
                        .iter()
                        .filter(|(w, _)| b.admits(w))
                        .map(|(w, v)| (w.clone(), v.clone()))
                        .collect(),
                    Fold::Mixed => Terms::new(),
                }
            } else {
                shuffle_terms(self.d.component_map(i as usize - 1), prev, b)
            };
            prefix_into(&mut out, 0, &inner);
        }
        debug_assert!(out.keys().all(|w| w.len() >= word.len()));
        out
    }
}

fn fold_product<T: Scalar>(
    kind: Fold,
    c: &Series<T>,
    d: &Series<T>,
    bound: Bound,
) -> Vec<Terms<T>> {
    let mut fold = WordFold::new(kind, d, bound);
    let mut comps = vec![Terms::new(); c.components()];
    for word in c.support() {
        if word.len() > bound.max_len || word.weight() > bound.max_weight {
            continue;
        }
        let image = fold.image(&word).clone();
        for (k, comp) in comps.iter_mut().enumerate() {
            if let Some(coef) = c.get(k, &word) {
                for (w, v) in &image {
                    accumulate(comp, w.clone(), coef.clone() * v.clone());
                }
            }
        }
    }
    comps
}

/// `c ∘ d = Σ (c,η) ψ_d(η)(1)`.
pub fn compose<T: Scalar>(c: &Series<T>, d: &Series<T>, trunc: usize) -> Result<Series<T>> {
    check_substitution(c, d)?;
    require_trunc(c, trunc)?;
    require_trunc(d, trunc)?;
    let comps = fold_product(Fold::Compose, c, d, Bound::length(trunc));
    Ok(Series::from_maps(c.alphabet(), trunc, comps))
}

/// `c ∘̃ d_δ = Σ (c,η) φ_d(η)(1)`.
pub fn mixed_compose<T: Scalar>(c: &Series<T>, d: &Series<T>, trunc: usize) -> Result<Series<T>> {
    check_substitution(c, d)?;
    require_trunc(c, trunc)?;
    require_trunc(d, trunc)?;
    let comps = fold_product(Fold::Mixed, c, d, Bound::length(trunc));
    Ok(Series::from_maps(c.alphabet(), trunc, comps))
}

/// Mixed composition restricted to words of bounded length and weight.
/// Coefficients are exact on every word inside the bound.
pub(crate) fn mixed_compose_bounded<T: Scalar>(
    c: &Series<T>,
    d: &Series<T>,
    bound: Bound,
) -> Vec<Terms<T>> {
    fold_product(Fold::Mixed, c, d, bound)
}

/// `c ◁ d`, from `(x_j η) ◁ d = x_j (η ◁ d) + x0 (η ⧢ d[j])`, `∅ ◁ d = 0`
/// and `d[0] = 0`.
pub fn pre_lie<T: Scalar>(c: &Series<T>, d: &Series<T>, trunc: usize) -> Result<Series<T>> {
    check_substitution(c, d)?;
    require_trunc(c, trunc)?;
    require_trunc(d, trunc)?;
    let bound = Bound::length(trunc);
    let mut memo: HashMap<Word, Terms<T>> = HashMap::new();
    memo.insert(Word::empty(), Terms::new());
    let mut comps = vec![Terms::new(); c.components()];
    for word in c.support() {
        if word.len() > trunc {
            continue;
        }
        for k in (0..word.len()).rev() {
            let suffix = word.suffix(k);
            if memo.contains_key(&suffix) {
                continue;
            }
            let (j, tail) = suffix.split_first().expect("nonempty suffix");
            let mut out = Terms::new();
            if let Some(b) = bound.after_prefix(j) {
                let kept: Terms<T> = memo[&tail]
                    .iter()
                    .filter(|(w, _)| b.admits(w))
                    .map(|(w, v)| (w.clone(), v.clone()))
                    .collect();
                prefix_into(&mut out, j, &kept);
            }
            if j != 0 {
                if let Some(b) = bound.after_prefix(0) {
                    let mut single = Terms::new();
                    single.insert(tail.clone(), T::one());
                    let inner = shuffle_terms(&single, d.component_map(j as usize - 1), b);
                    prefix_into(&mut out, 0, &inner);
                }
            }
            memo.insert(suffix, out);
        }
        let image = &memo[&word];
        for (k, comp) in comps.iter_mut().enumerate() {
            if let Some(coef) = c.get(k, &word) {
                for (w, v) in image {
                    accumulate(comp, w.clone(), coef.clone() * v.clone());
                }
            }
        }
    }
    Ok(Series::from_maps(c.alphabet(), trunc, comps))
}

/// `[c, d] = c ◁ d − d ◁ c`.
pub fn lie_bracket<T: Scalar>(c: &Series<T>, d: &Series<T>, trunc: usize) -> Result<Series<T>> {
    let cd = pre_lie(c, d, trunc)?;
    let dc = pre_lie(d, c, trunc)?;
    cd.try_sub(&dc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;
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

    #[test]
    fn shuffle_examples() {
        let c = s(4, &[(2, "x1"), (-1, "x0x1"), (3, "e")]);
        assert_eq!(shuffle(&s(4, &[(1, "e")]), &c, 4).unwrap(), c);
        assert_eq!(
            shuffle(&s(2, &[(1, "x1")]), &s(2, &[(1, "x1")]), 2).unwrap(),
            s(2, &[(2, "x1x1")])
        );
        assert!(matches!(
            shuffle(&s(2, &[]), &s(3, &[]), 3),
            Err(Error::TruncationMismatch { have: 2, need: 3 })
        ));
    }

    #[test]
    fn compose_examples() {
        let d = s(3, &[(1, "x1"), (5, "x0x1")]);
        assert_eq!(
            compose(&s(3, &[(1, "e")]), &d, 3).unwrap(),
            s(3, &[(1, "e")])
        );
        assert_eq!(
            compose(&s(3, &[(1, "x0")]), &d, 3).unwrap(),
            s(3, &[(1, "x0")])
        );
        let d1 = s(3, &[(1, "x1")]);
        assert_eq!(
            compose(&s(3, &[(1, "x1")]), &d1, 3).unwrap(),
            s(3, &[(1, "x0x1")])
        );
        // x1x1 ∘ x1 = x0(x1 ⧢ x0x1) = x0(x1x0x1 + 2 x0x1x1)
        assert_eq!(
            compose(&s(4, &[(1, "x1x1")]), &s(4, &[(1, "x1")]), 4).unwrap(),
            s(4, &[(1, "x0x1x0x1"), (2, "x0x0x1x1")])
        );
    }

    #[test]
    fn mixed_compose_examples() {
        let c = s(3, &[(1, "x1"), (2, "x0x1"), (-3, "e")]);
        assert_eq!(mixed_compose(&c, &s(3, &[]), 3).unwrap(), c);
        let d = s(3, &[(1, "x1"), (2, "e")]);
        // x1 + x0 d
        assert_eq!(
            mixed_compose(&s(3, &[(1, "x1")]), &d, 3).unwrap(),
            s(3, &[(1, "x1"), (1, "x0x1"), (2, "x0")])
        );
    }

    #[test]
    fn mixed_compose_two_letters() {
        // x1x1 ∘̃ d = x1x1 + x1x0 d + x0(d ⧢ x1) + x0(d ⧢ x0 d)
        let d = s(4, &[(1, "x1"), (2, "e")]);
        let lhs = mixed_compose(&s(4, &[(1, "x1x1")]), &d, 4).unwrap();
        let part = |t: &Series<Rational>| t.clone();
        let x1x1 = s(4, &[(1, "x1x1")]);
        let x1x0d = s(4, &[(1, "x1x0x1"), (2, "x1x0")]);
        let x1 = s(4, &[(1, "x1")]);
        let x0d = s(4, &[(1, "x0x1"), (2, "x0")]);
        let prefix0 = |t: Series<Rational>| {
            let mut out = Series::zero(Alphabet::siso(), 1, 4);
            for (_, word, v) in t.terms() {
                out.add_term(0, word.prefixed(0), v.clone());
            }
            out
        };
        let rhs = &(&(&x1x1 + &x1x0d) + &prefix0(shuffle(&d, &x1, 4).unwrap()))
            + &prefix0(shuffle(&d, &x0d, 4).unwrap());
        assert_eq!(lhs, part(&rhs));
    }

    #[test]
    fn pre_lie_examples() {
        let d = s(4, &[(1, "x1"), (3, "e"), (-2, "x0x1")]);
        for n in 0..=4 {
            let x0n = s(4, &[(1, &Word::power(0, n).to_string())]);
            assert!(pre_lie(&x0n, &d, 4).unwrap().is_zero());
        }
        let prefixed = |t: &Series<Rational>, j| {
            let mut out = Series::zero(Alphabet::siso(), 1, 4);
            for (_, word, v) in t.terms() {
                out.add_term(0, word.prefixed(j), v.clone());
            }
            out
        };
        assert_eq!(
            pre_lie(&s(4, &[(1, "x1")]), &d, 4).unwrap(),
            prefixed(&d, 0)
        );
        // x1x1 ◁ d = x1 x0 d + x0(x1 ⧢ d)
        let expected = &prefixed(&prefixed(&d, 0), 1)
            + &prefixed(&shuffle(&s(4, &[(1, "x1")]), &d, 4).unwrap(), 0);
        assert_eq!(pre_lie(&s(4, &[(1, "x1x1")]), &d, 4).unwrap(), expected);
    }

    #[test]
    fn bracket_examples() {
        let c = s(3, &[(1, "x1"), (2, "x0x1")]);
        assert!(lie_bracket(&c, &c, 3).unwrap().is_zero());
        let x1 = s(3, &[(1, "x1")]);
        let x0 = s(3, &[(1, "x0")]);
        assert_eq!(pre_lie(&x1, &x0, 3).unwrap(), s(3, &[(1, "x0x0")]));
        assert!(pre_lie(&x0, &x1, 3).unwrap().is_zero());
        assert_eq!(lie_bracket(&x1, &x0, 3).unwrap(), s(3, &[(1, "x0x0")]));
    }

    #[test]
    fn arity_is_checked() {
        let c = Series::<Rational>::zero(Alphabet::new(2), 1, 2);
        let d = Series::<Rational>::zero(Alphabet::new(2), 1, 2);
        assert!(matches!(
            compose(&c, &d, 2),
            Err(Error::ComponentMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn bounded_mixed_compose_matches_unbounded() {
        let c = crate::series::random_ball_series(q(1), q(1), 4, 1, 3);
        let d = crate::series::random_ball_series(q(1), q(1), 4, 1, 4);
        let full = mixed_compose(&c, &d, 4).unwrap();
        for max_weight in 0..=8 {
            let part = mixed_compose_bounded(
                &c,
                &d,
                Bound {
                    max_len: 4,
                    max_weight,
                },
            );
            for (word, v) in full.component_map(0) {
                if word.weight() <= max_weight {
                    assert_eq!(part[0].get(word), Some(v));
                }
            }
            assert!(part[0].keys().all(|word| word.weight() <= max_weight));
        }
    }
}
