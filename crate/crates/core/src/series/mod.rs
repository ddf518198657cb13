//! Truncated series `c: X* -> K^l`.

mod text;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{factorial, from_usize, pow, FieldScalar, RealScalar, Scalar};
use crate::words::{Alphabet, Letter, Word};

pub use text::{parse_series, ParseOptions};

/// A series truncated at word length `L`.
///
/// Coefficients of words longer than `L` are unknown, not zero; asking for
/// one is an error. Zero coefficients are never stored, so structural
/// equality is series equality.
#[derive(Clone, PartialEq)]
pub struct Series<T> {
    alphabet: Alphabet,
    trunc: usize,
    comps: Vec<BTreeMap<Word, T>>,
}

/// Pair `(K, M)` with `|(c,η)| <= K M^|η| |η|!` on the stored support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEstimate {
    pub k: f64,
    pub m: f64,
}

impl<T: Scalar> Series<T> {
    pub fn zero(alphabet: Alphabet, components: usize, trunc: usize) -> Self {
        assert!(components >= 1, "a series has at least one component");
        Series {
            alphabet,
            trunc,
            comps: vec![BTreeMap::new(); components],
        }
    }

    /// `value · ∅` in every component.
    pub fn constant(alphabet: Alphabet, components: usize, trunc: usize, value: T) -> Self {
        let mut s = Self::zero(alphabet, components, trunc);
        for j in 0..components {
            s.add_term(j, Word::empty(), value.clone());
        }
        s
    }

    /// The unit `1 = 1·∅` of the shuffle algebra.
    pub fn one(alphabet: Alphabet, trunc: usize) -> Self {
        Self::constant(alphabet, 1, trunc, T::one())
    }

    /// Single-component series from `(coefficient, word)` pairs.
    pub fn from_terms<I>(alphabet: Alphabet, trunc: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (T, Word)>,
    {
        let mut s = Self::zero(alphabet, 1, trunc);
        for (v, w) in terms {
            s.add_term(0, w, v);
        }
        s
    }

    /// Stacks single-component series into one vector-valued series.
    pub fn from_components(parts: Vec<Series<T>>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("no components".into()))?;
        let (alphabet, trunc) = (first.alphabet, first.trunc);
        let mut comps = Vec::with_capacity(parts.len());
        for p in parts {
            if p.alphabet != alphabet {
                return Err(Error::AlphabetMismatch {
                    left: alphabet.m(),
                    right: p.alphabet.m(),
                });
            }
            if p.trunc != trunc {
                return Err(Error::TruncationMismatch {
                    have: p.trunc,
                    need: trunc,
                });
            }
            comps.extend(p.comps);
        }
        Ok(Series {
            alphabet,
            trunc,
            comps,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn components(&self) -> usize {
        self.comps.len()
    }

    /// Adds `value` to the coefficient of `word` in component `j`; words
    /// beyond the truncation are dropped.
    pub fn add_term(&mut self, j: usize, word: Word, value: T) {
        debug_assert!(self.alphabet.contains(&word));
        if word.len() > self.trunc || value.is_zero() {
            return;
        }
        accumulate(&mut self.comps[j], word, value);
    }

    /// Coefficient `(c[j], η)`.
    pub fn coeff(&self, j: usize, word: &Word) -> Result<T> {
        if word.len() > self.trunc {
            return Err(Error::QueryBeyondTruncation {
                word: word.to_string(),
                trunc: self.trunc,
            });
        }
        Ok(self.comps[j].get(word).cloned().unwrap_or_else(T::zero))
    }

    /// Coefficient vector `(c, η)`.
    pub fn coefficient(&self, word: &Word) -> Result<Vec<T>> {
        (0..self.components())
            .map(|j| self.coeff(j, word))
            .collect()
    }

    /// Stored coefficient or zero, without the truncation check.
    pub(crate) fn get(&self, j: usize, word: &Word) -> Option<&T> {
        self.comps[j].get(word)
    }

    pub fn component(&self, j: usize) -> Series<T> {
        Series {
            alphabet: self.alphabet,
            trunc: self.trunc,
            comps: vec![self.comps[j].clone()],
        }
    }

    pub(crate) fn component_map(&self, j: usize) -> &BTreeMap<Word, T> {
        &self.comps[j]
    }

    pub(crate) fn from_maps(
        alphabet: Alphabet,
        trunc: usize,
        comps: Vec<BTreeMap<Word, T>>,
    ) -> Self {
        let mut comps = comps;
        for c in &mut comps {
            c.retain(|w, v| w.len() <= trunc && !v.is_zero());
        }
        Series {
            alphabet,
            trunc,
            comps,
        }
    }

    /// `(component, word, coefficient)` for every stored term.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Word, &T)> {
        self.comps
            .iter()
            .enumerate()
            .flat_map(|(j, m)| m.iter().map(move |(w, v)| (j, w, v)))
    }

    /// Words with a nonzero coefficient in some component, in word order.
    pub fn support(&self) -> Vec<Word> {
        let mut all: Vec<Word> = self.comps.iter().flat_map(|m| m.keys().cloned()).collect();
        all.sort();
        all.dedup();
        all
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|m| m.is_empty())
    }

    /// `(c, ∅) = 0` in every component.
    pub fn is_proper(&self) -> bool {
        self.comps.iter().all(|m| !m.contains_key(&Word::empty()))
    }

    /// Same coefficients with a lower truncation.
    pub fn truncate(&self, trunc: usize) -> Result<Self> {
        if trunc > self.trunc {
            return Err(Error::TruncationMismatch {
                have: self.trunc,
                need: trunc,
            });
        }
        Ok(Self::from_maps(self.alphabet, trunc, self.comps.clone()))
    }

    /// Reinterprets a polynomial as exact at a higher truncation: every
    /// coefficient between the old and new truncation is declared zero.
    pub fn extend_as_polynomial(&self, trunc: usize) -> Self {
        Series {
            alphabet: self.alphabet,
            trunc: trunc.max(self.trunc),
            comps: self.comps.clone(),
        }
    }

    /// Same coefficients over a larger alphabet.
    pub fn with_alphabet(&self, alphabet: Alphabet) -> Result<Self> {
        if alphabet.m() < self.alphabet.m() {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.m(),
                right: alphabet.m(),
            });
        }
        Ok(Series {
            alphabet,
            trunc: self.trunc,
            comps: self.comps.clone(),
        })
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|v| v.clone() * k.clone())
    }

    /// Coefficientwise image; zeros produced by `f` are dropped.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Series<U> {
        Series::from_maps(
            self.alphabet,
            self.trunc,
            self.comps
                .iter()
                .map(|m| m.iter().map(|(w, v)| (w.clone(), f(v))).collect())
                .collect(),
        )
    }

    /// `self + k·other`, at the lower of the two truncations.
    pub fn axpy(&self, k: &T, other: &Series<T>) -> Result<Self> {
        self.check_compatible(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::from_maps(self.alphabet, trunc, self.comps.clone());
        for (j, w, v) in other.terms() {
            out.add_term(j, w.clone(), k.clone() * v.clone());
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Series<T>) -> Result<Self> {
        self.axpy(&T::one(), other)
    }

    pub fn try_sub(&self, other: &Series<T>) -> Result<Self> {
        self.axpy(&-T::one(), other)
    }

    pub(crate) fn check_compatible(&self, other: &Series<T>) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.m(),
                right: other.alphabet.m(),
            });
        }
        if self.components() != other.components() {
            return Err(Error::ComponentMismatch {
                expected: self.components(),
                found: other.components(),
            });
        }
        Ok(())
    }

    /// `K M^|η| |η|!` on every word up to length `L`, in every component.
    pub fn worst_case(
        k: T,
        m_growth: T,
        alphabet: Alphabet,
        trunc: usize,
        components: usize,
    ) -> Self {
        let mut s = Self::zero(alphabet, components, trunc);
        for n in 0..=trunc {
            let v = k.clone() * pow(&m_growth, n) * factorial::<T>(n);
            for w in alphabet.words(n) {
                for j in 0..components {
                    s.add_term(j, w.clone(), v.clone());
                }
            }
        }
        s
    }
}

impl<T: FieldScalar> Series<T> {
    /// Every coefficient drawn from the 2001-point uniform lattice on
    /// `[-K M^|η| |η|!, K M^|η| |η|!]`. Deterministic in `seed`.
    pub fn random_ball(k: T, m_growth: T, alphabet: Alphabet, trunc: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_ball_with(k, m_growth, alphabet, trunc, &mut rng)
    }

    pub fn random_ball_with<R: Rng>(
        k: T,
        m_growth: T,
        alphabet: Alphabet,
        trunc: usize,
        rng: &mut R,
    ) -> Self {
        let mut s = Self::zero(alphabet, 1, trunc);
        let thousand = from_usize::<T>(1000);
        for n in 0..=trunc {
            let bound = k.clone() * pow(&m_growth, n) * factorial::<T>(n);
            for w in alphabet.words(n) {
                let draw: i64 = rng.gen_range(-1000..=1000);
                let v =
                    bound.clone() * T::from_i64(draw).expect("small integer") / thousand.clone();
                s.add_term(0, w, v);
            }
        }
        s
    }
}

impl<T: RealScalar> Series<T> {
    /// `sup |(c,η)| / (M^|η| |η|!)` over the stored words, maximized over
    /// components. Exact for polynomials, a lower bound for the full series.
    pub fn linf_norm(&self, m_growth: &T) -> T {
        let mut best = T::zero();
        for (_, w, v) in self.terms() {
            let ratio = v.abs() / (pow(m_growth, w.len()) * factorial::<T>(w.len()));
            if ratio > best {
                best = ratio;
            }
        }
        best
    }

    /// Smallest `K` for the given `M` on the stored support.
    pub fn growth_estimate(&self, m_growth: f64) -> GrowthEstimate
    where
        T: num_traits::ToPrimitive,
    {
        let f = self.to_f64();
        GrowthEstimate {
            k: f.linf_norm(&m_growth),
            m: m_growth,
        }
    }

    pub fn max_abs(&self) -> T {
        self.terms()
            .map(|(_, _, v)| v.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn to_f64(&self) -> Series<f64> {
        self.map(|v| v.to_f64().expect("finite coefficient"))
    }
}

impl<T: Scalar> std::ops::Neg for &Series<T> {
    type Output = Series<T>;

    fn neg(self) -> Series<T> {
        self.map(|v| -v.clone())
    }
}

impl<T: Scalar> std::ops::Add for &Series<T> {
    type Output = Series<T>;

    fn add(self, rhs: &Series<T>) -> Series<T> {
        self.try_add(rhs).expect("incompatible series")
    }
}

impl<T: Scalar> std::ops::Sub for &Series<T> {
    type Output = Series<T>;

    fn sub(self, rhs: &Series<T>) -> Series<T> {
        self.try_sub(rhs).expect("incompatible series")
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for Series<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Series(m={}, l={}, L={}) ",
            self.alphabet.m(),
            self.comps.len(),
            self.trunc
        )?;
        let mut map = f.debug_map();
        for (j, comp) in self.comps.iter().enumerate() {
            for (w, v) in comp {
                if self.comps.len() == 1 {
                    map.entry(w, v);
                } else {
                    map.entry(&format_args!("[{}]{w}", j + 1), v);
                }
            }
        }
        map.finish()
    }
}

pub(crate) fn accumulate<T: Scalar>(map: &mut BTreeMap<Word, T>, word: Word, value: T) {
    if value.is_zero() {
        return;
    }
    match map.entry(word) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().clone() + value;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// `worst_case` with one component; the extremal series of the growth bound.
pub fn worst_case_series<T: Scalar>(k: T, m_growth: T, trunc: usize, m: Letter) -> Series<T> {
    Series::worst_case(k, m_growth, Alphabet::new(m), trunc, 1)
}

pub fn random_ball_series<T: FieldScalar>(
    k: T,
    m_growth: T,
    trunc: usize,
    m: Letter,
    seed: u64,
) -> Series<T> {
    Series::random_ball(k, m_growth, Alphabet::new(m), trunc, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn coefficient_contract() {
        let c = Series::from_terms(Alphabet::siso(), 2, [(q(3, 1), w("x0x1"))]);
        assert_eq!(c.coefficient(&w("x0x1")).unwrap(), vec![q(3, 1)]);
        assert_eq!(c.coefficient(&w("x1")).unwrap(), vec![q(0, 1)]);
        assert!(matches!(
            c.coefficient(&w("x0x0x0")),
            Err(Error::QueryBeyondTruncation { .. })
        ));
    }

    #[test]
    fn canonical_sparsity() {
        let mut c = Series::from_terms(Alphabet::siso(), 3, [(q(1, 2), w("x1"))]);
        c.add_term(0, w("x1"), q(-1, 2));
        c.add_term(0, w("x0"), q(0, 1));
        assert!(c.is_zero());
        assert_eq!(c, Series::zero(Alphabet::siso(), 1, 3));
    }

    #[test]
    fn norm_examples() {
        let m1 = q(1, 1);
        assert_eq!(
            Series::<Rational>::zero(Alphabet::siso(), 1, 3).linf_norm(&m1),
            q(0, 1)
        );
        let wc = worst_case_series(q(2, 1), q(1, 1), 4, 1);
        assert_eq!(wc.linf_norm(&m1), q(2, 1));
        let c = Series::from_terms(Alphabet::siso(), 2, [(q(1, 1), w("x0x1"))]);
        assert_eq!(c.linf_norm(&q(2, 1)), q(1, 8));
    }

    #[test]
    fn worst_case_examples() {
        let c = worst_case_series(q(1, 1), q(1, 1), 1, 1);
        assert_eq!(c.support(), vec![Word::empty(), w("x0"), w("x1")]);
        assert!(c.terms().all(|(_, _, v)| *v == q(1, 1)));
        let c = worst_case_series(q(1, 1), q(2, 1), 2, 1);
        for word in Alphabet::siso().words(2) {
            assert_eq!(c.coeff(0, &word).unwrap(), q(8, 1));
        }
    }

    #[test]
    fn random_ball_contract() {
        let a = random_ball_series(q(3, 2), q(2, 1), 4, 1, 11);
        let b = random_ball_series(q(3, 2), q(2, 1), 4, 1, 11);
        assert_eq!(a, b);
        assert!(a.linf_norm(&q(2, 1)) <= q(3, 2));
        assert!(random_ball_series(q(0, 1), q(1, 1), 4, 1, 3).is_zero());
        let f = random_ball_series(1.0f64, 0.5, 3, 2, 5);
        assert!(f.linf_norm(&0.5) <= 1.0);
    }

    #[test]
    fn truncation_moves() {
        let c = worst_case_series(q(1, 1), q(1, 1), 3, 1);
        let t = c.truncate(1).unwrap();
        assert_eq!(t.support().len(), 3);
        assert!(c.truncate(4).is_err());
        assert_eq!(
            t.extend_as_polynomial(5).coeff(0, &w("x0x0x0")).unwrap(),
            q(0, 1)
        );
    }

    #[test]
    fn f32_scalars_work() {
        let c = worst_case_series(1.0f32, 2.0, 3, 1);
        assert_eq!(c.linf_norm(&2.0f32), 1.0);
    }
}
