//! Words over the alphabet {a, a⁻¹, b, b⁻¹} and the free group they form.
//!
//! A [`Word`] is any finite sequence of letters ("weak" word, cancellations
//! allowed). A [`ReducedWord`] never has a letter next to its own inverse and
//! is the canonical representative of a free-group element. The empty word
//! is the identity.
//!
//! Text form: one character per letter, `a`/`b` for the generators and
//! `A`/`B` for their inverses.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One of the four generators of the free group of rank 2.
///
/// The derived ordering `GenA < InvA < GenB < InvB` is the enumeration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    GenA,
    InvA,
    GenB,
    InvB,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::GenA, Letter::InvA, Letter::GenB, Letter::InvB];

    #[inline]
    pub const fn inverse(self) -> Letter {
        match self {
            Letter::GenA => Letter::InvA,
            Letter::InvA => Letter::GenA,
            Letter::GenB => Letter::InvB,
            Letter::InvB => Letter::GenB,
        }
    }

    pub const fn to_char(self) -> char {
        match self {
            Letter::GenA => 'a',
            Letter::InvA => 'A',
            Letter::GenB => 'b',
            Letter::InvB => 'B',
        }
    }

    pub const fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::GenA),
            'A' => Some(Letter::InvA),
            'b' => Some(Letter::GenB),
            'B' => Some(Letter::InvB),
            _ => None,
        }
    }

    /// Position in [`Letter::ALL`].
    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Class of a reduced word by its first letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WordClass {
    Empty,
    AWord,
    AInvWord,
    BWord,
    BInvWord,
}

impl WordClass {
    pub const ALL: [WordClass; 5] = [
        WordClass::Empty,
        WordClass::AWord,
        WordClass::AInvWord,
        WordClass::BWord,
        WordClass::BInvWord,
    ];

    pub fn of_first(first: Option<Letter>) -> WordClass {
        match first {
            None => WordClass::Empty,
            Some(Letter::GenA) => WordClass::AWord,
            Some(Letter::InvA) => WordClass::AInvWord,
            Some(Letter::GenB) => WordClass::BWord,
            Some(Letter::InvB) => WordClass::BInvWord,
        }
    }
}

/// A weak word: any sequence of letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        is_reduced(&self.0)
    }

    /// Concatenation without any cancellation.
    pub fn append(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl From<ReducedWord> for Word {
    fn from(w: ReducedWord) -> Self {
        Word(w.0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.0)
    }
}

/// A word with no letter adjacent to its own inverse.
///
/// Only obtainable through [`reduce`], [`compose`], [`enumerate`] or a
/// checked conversion, so holding one is proof of the invariant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord(Vec<Letter>);

/// Returned when a weak word is not in reduced form.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("letters {index} and {} cancel ('{first}{second}')", index + 1)]
pub struct NotReducedError {
    pub index: usize,
    pub first: Letter,
    pub second: Letter,
}

impl ReducedWord {
    pub fn empty() -> Self {
        ReducedWord(Vec::new())
    }

    pub fn generator(l: Letter) -> Self {
        ReducedWord(vec![l])
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

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn classify(&self) -> WordClass {
        WordClass::of_first(self.first())
    }

    /// `ℓ·self`, or `None` when `ℓ` would cancel against the first letter.
    pub fn prepend(&self, l: Letter) -> Option<ReducedWord> {
        if self.first() == Some(l.inverse()) {
            return None;
        }
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(l);
        letters.extend_from_slice(&self.0);
        Some(ReducedWord(letters))
    }

    /// `self·ℓ`, or `None` when `ℓ` would cancel against the last letter.
    pub fn push(&self, l: Letter) -> Option<ReducedWord> {
        if self.last() == Some(l.inverse()) {
            return None;
        }
        let mut letters = self.0.clone();
        letters.push(l);
        Some(ReducedWord(letters))
    }

    /// Group inverse. Reversing and flipping preserves reducedness.
    pub fn inverse(&self) -> ReducedWord {
        ReducedWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn as_word(&self) -> Word {
        Word(self.0.clone())
    }
}

impl TryFrom<Word> for ReducedWord {
    type Error = NotReducedError;

    fn try_from(w: Word) -> Result<Self, Self::Error> {
        match first_cancellation(&w.0) {
            None => Ok(ReducedWord(w.0)),
            Some(index) => Err(NotReducedError {
                index,
                first: w.0[index],
                second: w.0[index + 1],
            }),
        }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.0)
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[Letter]) -> fmt::Result {
    for l in letters {
        write!(f, "{}", l.to_char())?;
    }
    Ok(())
}

fn first_cancellation(letters: &[Letter]) -> Option<usize> {
    letters.windows(2).position(|p| p[1] == p[0].inverse())
}

pub fn is_reduced(letters: &[Letter]) -> bool {
    first_cancellation(letters).is_none()
}

/// Freely reduces a word with a single left-to-right stack pass.
pub fn reduce(w: &Word) -> ReducedWord {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    ReducedWord(stack)
}

/// Tail-first reduction: fix the tail, then cons the head onto it and drop
/// the pair if the head cancels the tail's first letter.
///
/// Kept as an independent oracle for [`reduce`]; the recursion is unrolled
/// into a right fold so long inputs do not exhaust the stack.
pub fn reduce_paper(w: &Word) -> ReducedWord {
    let fixed = w
        .letters()
        .iter()
        .rev()
        .fold(VecDeque::new(), |mut fixword: VecDeque<Letter>, &head| {
            match fixword.front() {
                Some(&next) if next == head.inverse() => {
                    fixword.pop_front();
                }
                _ => fixword.push_front(head),
            }
            fixword
        });
    ReducedWord(fixed.into_iter().collect())
}

/// The group operation: reduced form of the concatenation `x ++ y`.
///
/// Both operands are reduced, so cancellation only happens at the seam.
pub fn compose(x: &ReducedWord, y: &ReducedWord) -> ReducedWord {
    let (xs, ys) = (x.letters(), y.letters());
    let mut k = 0;
    while k < xs.len() && k < ys.len() && ys[k] == xs[xs.len() - 1 - k].inverse() {
        k += 1;
    }
    let mut letters = Vec::with_capacity(xs.len() + ys.len() - 2 * k);
    letters.extend_from_slice(&xs[..xs.len() - k]);
    letters.extend_from_slice(&ys[k..]);
    ReducedWord(letters)
}

/// Replaces each letter by its inverse, keeping the order.
pub fn flip(w: &Word) -> Word {
    Word(w.letters().iter().map(|l| l.inverse()).collect())
}

/// Reverse of [`flip`]. Does not reduce its input.
pub fn inverse(w: &Word) -> Word {
    let mut flipped = flip(w);
    flipped.0.reverse();
    flipped
}

/// Number of reduced words of length exactly `n`.
pub fn count_reduced(n: usize) -> u64 {
    if n == 0 {
        1
    } else {
        4 * 3u64.pow(n as u32 - 1)
    }
}

/// Number of reduced words of length at most `n`, including the empty word.
pub fn count_reduced_upto(n: usize) -> u64 {
    (0..=n).map(count_reduced).sum()
}

/// All reduced words of length exactly `n`, in lexicographic order under
/// `a < A < b < B`.
pub fn enumerate(n: usize) -> Vec<ReducedWord> {
    let mut out = Vec::with_capacity(count_reduced(n) as usize);
    let mut buf = Vec::with_capacity(n);
    extend_lex(&mut buf, n, &mut out);
    out
}

fn extend_lex(buf: &mut Vec<Letter>, n: usize, out: &mut Vec<ReducedWord>) {
    if buf.len() == n {
        out.push(ReducedWord(buf.clone()));
        return;
    }
    for l in Letter::ALL {
        if buf.last() == Some(&l.inverse()) {
            continue;
        }
        buf.push(l);
        extend_lex(buf, n, out);
        buf.pop();
    }
}

/// All reduced words of length at most `n`, shortest first.
pub fn enumerate_upto(n: usize) -> Vec<ReducedWord> {
    (0..=n).flat_map(enumerate).collect()
}

/// An unrecognised character in word text.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid letter {found:?} at index {index} (expected one of a, A, b, B)")]
pub struct ParseWordError {
    /// Character index (0-based) of the offending token.
    pub index: usize,
    pub found: char,
}

/// Parses a single word, one character per letter. The empty string is ε.
pub fn parse_word(text: &str) -> Result<Word, ParseWordError> {
    text.chars()
        .enumerate()
        .map(|(index, c)| Letter::from_char(c).ok_or(ParseWordError { index, found: c }))
        .collect::<Result<Vec<_>, _>>()
        .map(Word)
}

/// Error in a multi-line word listing, with 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: invalid letter {found:?} (expected one of a, A, b, B)")]
pub struct ParseWordsError {
    pub line: usize,
    pub column: usize,
    pub found: char,
}

/// Parses a word listing: one word per line, empty line = ε, lines starting
/// with `#` are comments. A trailing `\r` is tolerated.
pub fn parse_words(text: &str) -> Result<Vec<Word>, ParseWordsError> {
    let mut words = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.starts_with('#') {
            continue;
        }
        let w = parse_word(line).map_err(|e| ParseWordsError {
            line: i + 1,
            column: e.index + 1,
            found: e.found,
        })?;
        words.push(w);
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    fn r(s: &str) -> ReducedWord {
        ReducedWord::try_from(w(s)).unwrap()
    }

    #[test]
    fn letter_inverse_is_involution() {
        for l in Letter::ALL {
            assert_eq!(l.inverse().inverse(), l);
            assert_ne!(l.inverse(), l);
        }
        assert_eq!(GenA.inverse(), InvA);
        assert_eq!(GenB.inverse(), InvB);
    }

    #[test]
    fn reducedness() {
        assert!(is_reduced(w("abA").letters()));
        assert!(!is_reduced(w("aAb").letters()));
        assert!(is_reduced(&[]));
        assert!(!w("bbB").is_reduced());
    }

    #[test]
    fn try_from_reports_cancelling_pair() {
        let err = ReducedWord::try_from(w("abBa")).unwrap_err();
        assert_eq!(err.index, 1);
        assert_eq!((err.first, err.second), (GenB, InvB));
    }

    #[test]
    fn classification() {
        assert_eq!(r("abA").classify(), WordClass::AWord);
        assert_eq!(r("").classify(), WordClass::Empty);
        assert_eq!(r("Ba").classify(), WordClass::BInvWord);
        assert_eq!(r("Ab").classify(), WordClass::AInvWord);
        assert_eq!(r("b").classify(), WordClass::BWord);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce(&w("aA")), r(""));
        assert_eq!(reduce(&w("aAb")), r("b"));
        assert_eq!(reduce(&w("abBA")), r(""));
        assert_eq!(reduce_paper(&w("abBA")), r(""));
        assert_eq!(reduce_paper(&w("aA")), r(""));
        assert_eq!(reduce_paper(&w("bbB")), r("b"));
        assert_eq!(reduce(&w("bbB")), r("b"));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(&r("abb"), &r("B")), r("ab"));
        let x = r("abAB");
        assert_eq!(compose(&x, &r("")), x);
        assert_eq!(compose(&r(""), &x), x);
        assert_eq!(compose(&r("ab"), &r("BA")), r(""));
        assert_eq!(r("ab").inverse(), r("BA"));
        assert_eq!(compose(&r("abab"), &r("BAb")), r("abb"));
    }

    #[test]
    fn flip_and_inverse_examples() {
        assert_eq!(flip(&w("aAB")), w("Aab"));
        assert_eq!(flip(&w("")), w(""));
        assert_eq!(inverse(&w("aAB")), w("baA"));
        assert_eq!(inverse(&w("")), w(""));
        // inverse does not reduce
        assert!(!inverse(&w("aAB")).is_reduced());
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate(0), vec![r("")]);
        assert_eq!(enumerate(1), vec![r("a"), r("A"), r("b"), r("B")]);
        // brute force: every two-letter sequence minus adjacent inverses
        let brute: Vec<ReducedWord> = Letter::ALL
            .iter()
            .flat_map(|&x| Letter::ALL.iter().map(move |&y| vec![x, y]))
            .filter(|v| is_reduced(v))
            .map(|v| ReducedWord::try_from(Word::new(v)).unwrap())
            .collect();
        assert_eq!(brute.len(), 12);
        assert_eq!(enumerate(2), brute);
    }

    #[test]
    fn enumerate_is_sorted_and_counted() {
        for n in 0..=7 {
            let words = enumerate(n);
            assert_eq!(words.len() as u64, count_reduced(n));
            assert!(words.windows(2).all(|p| p[0] < p[1]));
            assert!(words.iter().all(|x| x.len() == n && x.letters().len() == n));
        }
        assert_eq!(count_reduced_upto(10), 1 + 118_096);
    }

    #[test]
    fn parse_examples() {
        assert_eq!(w("abBA").letters(), &[GenA, GenB, InvB, InvA]);
        assert!(w("").is_empty());
        assert_eq!(parse_word("abx"), Err(ParseWordError { index: 2, found: 'x' }));
        assert_eq!(w("abBA").to_string(), "abBA");
    }

    #[test]
    fn parse_listing() {
        let words = parse_words("# header\nab\n\nBA\r\n").unwrap();
        assert_eq!(words, vec![w("ab"), w(""), w("BA")]);
        let err = parse_words("ab\n#c\naaq\n").unwrap_err();
        assert_eq!((err.line, err.column, err.found), (3, 3, 'q'));
    }

    #[test]
    fn prepend_and_push_refuse_cancellation() {
        assert_eq!(r("ab").prepend(InvA), None);
        assert_eq!(r("ab").prepend(GenB), Some(r("bab")));
        assert_eq!(r("ab").push(InvB), None);
        assert_eq!(r("").prepend(InvB), Some(r("B")));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn letter() -> impl Strategy<Value = Letter> {
            prop::sample::select(Letter::ALL.to_vec())
        }

        fn weak(max: usize) -> impl Strategy<Value = Word> {
            prop::collection::vec(letter(), 0..max).prop_map(Word::new)
        }

        fn reduced(max: usize) -> impl Strategy<Value = ReducedWord> {
            weak(max).prop_map(|x| reduce(&x))
        }

        proptest! {
            #[test]
            fn reduce_matches_tail_first(x in weak(64)) {
                prop_assert_eq!(reduce(&x), reduce_paper(&x));
            }

            #[test]
            fn reduce_is_idempotent_and_shrinks_by_pairs(x in weak(64)) {
                let once = reduce(&x);
                prop_assert!(once.as_word().is_reduced());
                prop_assert_eq!(reduce(&once.as_word()), once.clone());
                prop_assert!(once.len() <= x.len());
                prop_assert_eq!((x.len() - once.len()) % 2, 0);
            }

            #[test]
            fn compose_is_reduce_of_append(x in reduced(32), y in reduced(32)) {
                let expect = reduce(&x.as_word().append(&y.as_word()));
                prop_assert_eq!(compose(&x, &y), expect);
            }

            #[test]
            fn fix_fusion(x in weak(24), y in weak(24), z in weak(24)) {
                let all = reduce(&x.append(&y).append(&z));
                let right = reduce(&x.append(&reduce(&y.append(&z)).into()));
                let left = reduce(&Word::from(reduce(&x.append(&y))).append(&z));
                prop_assert_eq!(&right, &all);
                prop_assert_eq!(&left, &all);
            }

            #[test]
            fn reversal_commutes_with_reduce(x in weak(64)) {
                let lhs = reduce(&x.reversed());
                let rhs = Word::from(reduce(&x)).reversed();
                prop_assert_eq!(lhs.as_word(), rhs);
            }

            #[test]
            fn inverse_laws(x in reduced(32), y in reduced(32)) {
                prop_assert!(compose(&x, &x.inverse()).is_empty());
                prop_assert!(compose(&x.inverse(), &x).is_empty());
                prop_assert_eq!(x.inverse().as_word(), inverse(&x.as_word()));
                prop_assert_eq!(compose(&x, &y).inverse(), compose(&y.inverse(), &x.inverse()));
            }

            #[test]
            fn weak_inverse_and_flip_are_involutions(x in weak(64)) {
                prop_assert_eq!(inverse(&inverse(&x)), x.clone());
                prop_assert_eq!(flip(&flip(&x)), x);
            }

            #[test]
            fn text_round_trip(x in weak(64)) {
                prop_assert_eq!(parse_word(&x.to_string()).unwrap(), x);
            }
        }
    }
}
