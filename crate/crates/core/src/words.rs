//! Exact free-group word arithmetic.
//!
//! Generators are 1-indexed positive integers. A [`Word`] is always held in
//! reduced form: no adjacent pair `x_g x_g^-1` or `x_g^-1 x_g` survives a
//! constructor, so equality of words is equality in the free group.

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// A signed generator occurrence: `x_g` or `x_g^-1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    generator: u32,
    sign: i8,
}

impl Letter {
    /// Panics if `generator == 0` or `sign` is not ±1.
    pub fn new(generator: u32, sign: i8) -> Self {
        Self::try_new(generator, sign).expect("letter: generator >= 1 and sign = +/-1")
    }

    pub fn try_new(generator: u32, sign: i8) -> Option<Self> {
        if generator >= 1 && (sign == 1 || sign == -1) {
            Some(Letter { generator, sign })
        } else {
            None
        }
    }

    pub fn positive(generator: u32) -> Self {
        Letter::new(generator, 1)
    }

    pub fn negative(generator: u32) -> Self {
        Letter::new(generator, -1)
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn inverse(&self) -> Self {
        Letter {
            generator: self.generator,
            sign: -self.sign,
        }
    }

    pub fn cancels(&self, other: &Letter) -> bool {
        self.generator == other.generator && self.sign == -other.sign
    }

    /// Shift the generator index by `delta` (used when circles are reindexed).
    pub(crate) fn shifted(&self, delta: i64) -> Self {
        let g = self.generator as i64 + delta;
        debug_assert!(g >= 1);
        Letter {
            generator: g as u32,
            sign: self.sign,
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        // x_g sorts before x_g^-1; lower generators first.
        (self.generator, self.sign == -1).cmp(&(other.generator, other.sign == -1))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 1 {
            write!(f, "x{}", self.generator)
        } else {
            write!(f, "x{}^-1", self.generator)
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&self.generator)?;
        seq.serialize_element(&self.sign)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LetterVisitor;
        impl<'de> Visitor<'de> for LetterVisitor {
            type Value = Letter;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [generator, sign] pair with generator >= 1 and sign = 1 or -1")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Letter, A::Error> {
                let generator: i64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let sign: i64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                let generator = u32::try_from(generator)
                    .ok()
                    .filter(|g| *g >= 1)
                    .ok_or_else(|| de::Error::custom("generator must be a positive integer"))?;
                let sign = i8::try_from(sign)
                    .ok()
                    .filter(|s| *s == 1 || *s == -1)
                    .ok_or_else(|| de::Error::custom("sign must be 1 or -1"))?;
                Ok(Letter { generator, sign })
            }
        }
        deserializer.deserialize_seq(LetterVisitor)
    }
}

/// A reduced word in a free group, serialized as `[[generator, sign], ...]`.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Build a word from letters, freely reducing as it goes.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = Word::empty();
        for l in letters {
            w.push_reducing(l);
        }
        w
    }

    /// A single-letter word.
    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Convenience constructor from `(generator, sign)` pairs.
    pub fn from_pairs(pairs: &[(u32, i8)]) -> Self {
        Word::from_letters(pairs.iter().map(|&(g, s)| Letter::new(g, s)))
    }

    /// `x_g^e` as a word.
    pub fn power(generator: u32, e: i64) -> Self {
        let sign = if e >= 0 { 1 } else { -1 };
        Word((0..e.unsigned_abs()).map(|_| Letter::new(generator, sign)).collect())
    }

    pub(crate) fn push_reducing(&mut self, l: Letter) {
        match self.0.last() {
            Some(last) if last.cancels(&l) => {
                self.0.pop();
            }
            _ => self.0.push(l),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Letter> {
        self.0.iter()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverse).collect())
    }

    /// `self · other`, reduced.
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in other.iter() {
            w.push_reducing(l);
        }
        w
    }

    /// `by · self · by^-1`, reduced.
    pub fn conjugated_by(&self, by: &Word) -> Word {
        by.concat(self).concat(&by.inverse())
    }

    /// Replace each `x_g^±1` by `by^±1` and reduce. A homomorphic image.
    pub fn substitute(&self, generator: u32, by: &Word) -> Word {
        let by_inv = by.inverse();
        let mut out = Word::empty();
        for &l in self.iter() {
            if l.generator() == generator {
                let image = if l.sign() == 1 { by } else { &by_inv };
                for &m in image.iter() {
                    out.push_reducing(m);
                }
            } else {
                out.push_reducing(l);
            }
        }
        out
    }

    /// Signed count of occurrences of `generator`.
    pub fn exponent_sum(&self, generator: u32) -> i64 {
        self.iter()
            .filter(|l| l.generator() == generator)
            .map(|l| l.sign() as i64)
            .sum()
    }

    /// Total signed letter count (every generator counted together).
    pub fn total_exponent_sum(&self) -> i64 {
        self.iter().map(|l| l.sign() as i64).sum()
    }

    /// Split `self = conjugator · core · conjugator^-1` with `core`
    /// cyclically reduced. Returns `(core, conjugator)`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut lo = 0usize;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo].cancels(&self.0[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        let core = Word(self.0[lo..hi].to_vec());
        let conjugator = Word(self.0[..lo].to_vec());
        (core, conjugator)
    }

    /// Rotate left by `k`: `w = u·v` (|u| = k) becomes `v·u`, reduced.
    pub fn rotated(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let k = k % self.0.len();
        Word::from_letters(self.0[k..].iter().chain(self.0[..k].iter()).copied())
    }

    /// Largest generator index appearing in the word, 0 if empty.
    pub fn max_generator(&self) -> u32 {
        self.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    pub fn count_generator(&self, generator: u32) -> usize {
        self.iter().filter(|l| l.generator() == generator).count()
    }

    /// Flip the sign of every letter, keeping order.
    pub fn mirrored(&self) -> Word {
        Word::from_letters(self.iter().map(Letter::inverse))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let letters = Vec::<Letter>::deserialize(deserializer)?;
        Ok(Word::from_letters(letters))
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word::from_letters(iter)
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(pairs: &[(u32, i8)]) -> Word {
        Word::from_pairs(pairs)
    }

    #[test]
    fn reduce_cancelling_pair() {
        assert_eq!(w(&[(1, 1), (1, -1)]), Word::empty());
    }

    #[test]
    fn reduce_inner_cascade() {
        assert_eq!(w(&[(1, 1), (2, 1), (2, -1), (1, 1)]), w(&[(1, 1), (1, 1)]));
    }

    #[test]
    fn reduce_already_reduced() {
        assert_eq!(w(&[(1, 1), (2, 1)]), w(&[(1, 1), (2, 1)]));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = w(&[(2, 1), (1, 1), (2, -1)]).cyclic_reduce();
        assert_eq!(core, w(&[(1, 1)]));
        assert_eq!(conj, w(&[(2, 1)]));

        let (core, conj) = Word::empty().cyclic_reduce();
        assert_eq!(core, Word::empty());
        assert_eq!(conj, Word::empty());

        let (core, conj) = w(&[(1, 1), (2, 1), (1, -1)]).cyclic_reduce();
        assert_eq!(core, w(&[(2, 1)]));
        assert_eq!(conj, w(&[(1, 1)]));
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(
            w(&[(2, 1)]).substitute(2, &w(&[(1, 1), (3, 1)])),
            w(&[(1, 1), (3, 1)])
        );
        assert_eq!(w(&[(2, -1)]).substitute(2, &w(&[(1, 1)])), w(&[(1, -1)]));
        assert_eq!(
            w(&[(1, 1), (2, 1), (1, -1)]).substitute(1, &Word::empty()),
            w(&[(2, 1)])
        );
    }

    #[test]
    fn exponent_sum_examples() {
        // x1 x2 x1 x2^-1 x1^-1 x2^-1
        let r = w(&[(1, 1), (2, 1), (1, 1), (2, -1), (1, -1), (2, -1)]);
        assert_eq!(r.exponent_sum(1), 1);
        assert_eq!(r.exponent_sum(2), -1);
        assert_eq!(Word::empty().exponent_sum(7), 0);
    }

    #[test]
    fn serde_round_trip_format() {
        let word = w(&[(1, 1), (2, -1)]);
        let json = serde_json::to_string(&word).unwrap();
        assert_eq!(json, "[[1,1],[2,-1]]");
        let back: Word = serde_json::from_str(&json).unwrap();
        assert_eq!(back, word);
    }

    #[test]
    fn deserialize_rejects_bad_letters() {
        assert!(serde_json::from_str::<Word>("[[1]]").is_err());
        assert!(serde_json::from_str::<Word>("[[0,1]]").is_err());
        assert!(serde_json::from_str::<Word>("[[1,2]]").is_err());
    }

    fn arb_word(max_gen: u32, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((1..=max_gen, prop_oneof![Just(1i8), Just(-1i8)]), 0..=max_len)
            .prop_map(|pairs| Word::from_pairs(&pairs))
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(word in arb_word(4, 12)) {
            let again = Word::from_letters(word.iter().copied());
            prop_assert_eq!(again, word);
        }

        #[test]
        fn word_times_inverse_is_identity(word in arb_word(4, 12)) {
            prop_assert_eq!(word.concat(&word.inverse()), Word::empty());
            prop_assert_eq!(word.inverse().concat(&word), Word::empty());
        }

        #[test]
        fn substitute_is_homomorphic(
            u in arb_word(3, 8),
            v in arb_word(3, 8),
            by in arb_word(3, 6),
            g in 1u32..=3,
        ) {
            let lhs = u.concat(&v).substitute(g, &by);
            let rhs = u.substitute(g, &by).concat(&v.substitute(g, &by));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn exponent_sum_conjugation_invariant(
            word in arb_word(3, 10),
            by in arb_word(3, 6),
            g in 1u32..=3,
        ) {
            prop_assert_eq!(word.conjugated_by(&by).exponent_sum(g), word.exponent_sum(g));
        }

        #[test]
        fn cyclic_reduce_reassembles(word in arb_word(4, 12)) {
            let (core, conj) = word.cyclic_reduce();
            prop_assert_eq!(core.conjugated_by(&conj), word.clone());
            // core really is cyclically reduced
            if core.len() >= 2 {
                let first = core.letters()[0];
                let last = core.letters()[core.len() - 1];
                prop_assert!(!first.cancels(&last));
            }
        }
    }
}
