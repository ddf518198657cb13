//! Words over the alphabet `{x0, ..., xm}` and their combinatorics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use smallvec::SmallVec;
use thiserror::Error;

/// Letter index `j` stands for `x_j`; `x_0` is the drift letter.
pub type Letter = u8;

/// Largest letter index the text syntax can express (`x9`).
pub const MAX_LETTER: Letter = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("malformed word `{0}`")]
    Syntax(String),
    #[error("letter x{letter} outside alphabet x0..x{max}")]
    LetterOutOfRange { letter: Letter, max: Letter },
}

/// A finite word. Words order by length first, then lexicographically by
/// letter index, so iteration over a series visits `e, x0, x1, x0x0, ...`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(SmallVec<[Letter; 12]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        Word(SmallVec::from_slice(letters))
    }

    pub fn letter(j: Letter) -> Self {
        Word::from_letters(&[j])
    }

    /// `x_j` repeated `n` times.
    pub fn power(j: Letter, n: usize) -> Self {
        Word(std::iter::repeat_n(j, n).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Occurrences of `x_j`.
    pub fn count(&self, j: Letter) -> usize {
        self.0.iter().filter(|&&l| l == j).count()
    }

    pub fn max_letter(&self) -> Option<Letter> {
        self.0.iter().copied().max()
    }

    /// `x_j · self`
    pub fn prefixed(&self, j: Letter) -> Self {
        let mut out = SmallVec::with_capacity(self.len() + 1);
        out.push(j);
        out.extend_from_slice(&self.0);
        Word(out)
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Word(out)
    }

    pub fn split_first(&self) -> Option<(Letter, Word)> {
        self.0
            .split_first()
            .map(|(&first, rest)| (first, Word::from_letters(rest)))
    }

    /// Suffix after dropping the first `n` letters.
    pub fn suffix(&self, n: usize) -> Word {
        Word::from_letters(&self.0[n.min(self.len())..])
    }

    /// `2|η|_{x0} + (number of other letters)`, i.e. `degree(η) - 1`.
    /// Additive under concatenation and preserved by shuffling.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&l| if l == 0 { 2 } else { 1 }).sum()
    }

    /// Degree of the coordinate function `a_η`: `2|η|_{x0} + |η|_{x1} + 1`,
    /// with every non-drift letter weighted 1 when `m > 1`.
    pub fn degree(&self) -> usize {
        self.weight() + 1
    }

    /// Parses `e` or a concatenation of `x<digit>` tokens.
    pub fn parse(text: &str) -> Result<Word, WordError> {
        let text = text.trim();
        if text == "e" {
            return Ok(Word::empty());
        }
        let bytes = text.as_bytes();
        if bytes.is_empty() || !bytes.len().is_multiple_of(2) {
            return Err(WordError::Syntax(text.to_string()));
        }
        let mut letters = SmallVec::new();
        for pair in bytes.chunks(2) {
            match pair {
                [b'x', d] if d.is_ascii_digit() => letters.push(d - b'0'),
                _ => return Err(WordError::Syntax(text.to_string())),
            }
        }
        Ok(Word(letters))
    }

    /// Parses and checks every letter against the alphabet `x0..x{m}`.
    pub fn parse_in(text: &str, m: Letter) -> Result<Word, WordError> {
        let w = Word::parse(text)?;
        match w.max_letter() {
            Some(letter) if letter > m => Err(WordError::LetterOutOfRange { letter, max: m }),
            _ => Ok(w),
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

/// The alphabet `{x0, ..., xm}`, identified by its largest index `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    m: Letter,
}

impl Alphabet {
    pub fn new(m: Letter) -> Self {
        assert!(m <= MAX_LETTER, "alphabet larger than x0..x9");
        Alphabet { m }
    }

    /// `{x0, x1}`
    pub fn siso() -> Self {
        Alphabet::new(1)
    }

    /// Largest letter index; also the number of inputs.
    pub fn m(&self) -> Letter {
        self.m
    }

    pub fn size(&self) -> usize {
        self.m as usize + 1
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.max_letter().is_none_or(|l| l <= self.m)
    }

    /// All words of length `k`, lexicographic in letter index.
    pub fn words(&self, k: usize) -> Vec<Word> {
        enumerate_words(self.m, k)
    }

    /// All words of length at most `k`, in word order.
    pub fn words_up_to(&self, k: usize) -> Vec<Word> {
        (0..=k).flat_map(|n| self.words(n)).collect()
    }
}

/// All `(m+1)^k` words of length `k` in lexicographic order of letter index.
pub fn enumerate_words(m: Letter, k: usize) -> Vec<Word> {
    let base = m as usize + 1;
    let count = base.pow(k as u32);
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0 as Letter; k];
    for _ in 0..count {
        out.push(Word::from_letters(&digits));
        for pos in (0..k).rev() {
            if (digits[pos] as usize) + 1 < base {
                digits[pos] += 1;
                break;
            }
            digits[pos] = 0;
        }
    }
    out
}

/// `deg(a_η)`; see [`Word::degree`].
pub fn degree(w: &Word) -> usize {
    w.degree()
}

/// Words with positive multiplicities; the value of a word-level shuffle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordMultiset {
    entries: BTreeMap<Word, u64>,
}

impl WordMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(w: Word) -> Self {
        let mut s = Self::new();
        s.insert(w, 1);
        s
    }

    pub fn insert(&mut self, w: Word, count: u64) {
        if count > 0 {
            *self.entries.entry(w).or_insert(0) += count;
        }
    }

    pub fn multiplicity(&self, w: &Word) -> u64 {
        self.entries.get(w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, u64)> {
        self.entries.iter().map(|(w, &c)| (w, c))
    }
}

type ShuffleMemo = RwLock<HashMap<(Word, Word), Arc<WordMultiset>>>;

fn shuffle_memo() -> &'static ShuffleMemo {
    static MEMO: OnceLock<ShuffleMemo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shuffle of two words, memoized process-wide on the unordered pair.
pub fn shuffle_words(a: &Word, b: &Word) -> Arc<WordMultiset> {
    let key = if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    if let Some(hit) = shuffle_memo().read().unwrap().get(&key) {
        return hit.clone();
    }
    let value = Arc::new(shuffle_uncached(&key.0, &key.1));
    shuffle_memo()
        .write()
        .unwrap()
        .entry(key)
        .or_insert(value)
        .clone()
}

// Dynamic program over (i, j) = letters consumed from each word; every path
// through the grid is one interleaving.
fn shuffle_uncached(a: &Word, b: &Word) -> WordMultiset {
    let (la, lb) = (a.len(), b.len());
    if la == 0 || lb == 0 {
        return WordMultiset::singleton(if la == 0 { b.clone() } else { a.clone() });
    }
    let mut layer: HashMap<(usize, Vec<Letter>), u64> = HashMap::new();
    layer.insert((0, Vec::new()), 1);
    for step in 0..la + lb {
        let mut next: HashMap<(usize, Vec<Letter>), u64> = HashMap::new();
        for ((i, prefix), count) in layer {
            let j = step - i;
            if i < la {
                let mut p = prefix.clone();
                p.push(a.letters()[i]);
                *next.entry((i + 1, p)).or_insert(0) += count;
            }
            if j < lb {
                let mut p = prefix;
                p.push(b.letters()[j]);
                *next.entry((i, p)).or_insert(0) += count;
            }
        }
        layer = next;
    }
    let mut out = WordMultiset::new();
    for ((_, letters), count) in layer {
        out.insert(Word::from_letters(&letters), count);
    }
    out
}
