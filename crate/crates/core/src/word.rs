//! Elements of the free group `F_n` as freely reduced words.
//!
//! Generators are written `a`, `b`, ... and their inverses `A`, `B`, ...;
//! the identity is the one-character string `1`. Words are reduced eagerly:
//! every constructor cancels adjacent inverse pairs, so a `ReducedWord` is
//! reduced by construction and all downstream algorithms may rely on it.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported rank; bounded by the surface alphabet `a`..`z`.
pub const MAX_RANK: usize = 26;

/// The number of free generators of the ambient free group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rank(usize);

impl Rank {
    pub fn new(n: usize) -> Result<Rank> {
        if n == 0 || n > MAX_RANK {
            return Err(Error::InvalidRank(n));
        }
        Ok(Rank(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// True when `index` (1-based) names a generator of this rank.
    pub fn admits(self, index: usize) -> bool {
        index >= 1 && index <= self.0
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single generator or inverse generator.
///
/// Internally a nonzero signed code: `+i` is the i-th generator (1-based),
/// `-i` its inverse. Two letters cancel exactly when their codes sum to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    /// The i-th generator, `index` 1-based.
    pub fn generator(index: usize) -> Letter {
        assert!((1..=MAX_RANK).contains(&index), "letter index out of range");
        Letter(index as i32)
    }

    /// The inverse of the i-th generator, `index` 1-based.
    pub fn inverse_generator(index: usize) -> Letter {
        assert!((1..=MAX_RANK).contains(&index), "letter index out of range");
        Letter(-(index as i32))
    }

    /// 1-based index of the underlying generator.
    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    fn cancels(self, other: Letter) -> bool {
        self.0 + other.0 == 0
    }

    /// Read a surface character: `a`..`z` are generators, `A`..`Z` inverses.
    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter(c as i32 - 'a' as i32 + 1)),
            'A'..='Z' => Some(Letter(-(c as i32 - 'A' as i32 + 1))),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + (self.index() as u8 - 1)) as char
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A freely reduced word; the empty word is the identity.
///
/// Words do not carry a rank: a word over `F_2` is also a word over `F_3`.
/// Operations that need an ambient rank (parsing, automaton reads) check
/// letter indices against it at the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    /// The identity element.
    pub fn identity() -> ReducedWord {
        ReducedWord::default()
    }

    /// Free reduction of an arbitrary letter sequence.
    ///
    /// Idempotent; the result is never longer than the input.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> ReducedWord {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            match stack.last() {
                Some(&top) if top.cancels(l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        ReducedWord { letters: stack }
    }

    /// Parse a surface string (`"1"` for the identity) against `rank`.
    pub fn parse(text: &str, rank: Rank) -> Result<ReducedWord> {
        if text == "1" {
            return Ok(ReducedWord::identity());
        }
        if text.is_empty() {
            return Err(Error::InvalidWord {
                text: text.to_string(),
                reason: "empty string (write the identity as \"1\")".to_string(),
            });
        }
        let mut letters = Vec::with_capacity(text.len());
        for c in text.chars() {
            let letter = Letter::from_char(c).ok_or_else(|| Error::InvalidWord {
                text: text.to_string(),
                reason: format!("unknown character {c:?}"),
            })?;
            if !rank.admits(letter.index()) {
                return Err(Error::InvalidWord {
                    text: text.to_string(),
                    reason: format!("letter {c:?} is beyond rank {rank}"),
                });
            }
            letters.push(letter);
        }
        Ok(ReducedWord::reduce(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, or 0 for the identity.
    pub fn max_index(&self) -> usize {
        self.letters.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    /// True when every letter fits in `rank`.
    pub fn fits(&self, rank: Rank) -> bool {
        self.max_index() <= rank.get()
    }

    /// Reduced concatenation `self · other`.
    pub fn multiply(&self, other: &ReducedWord) -> ReducedWord {
        // Cancel across the seam instead of re-scanning both words.
        let mut left = self.letters.clone();
        let mut start = 0;
        while start < other.letters.len() {
            match left.last() {
                Some(&top) if top.cancels(other.letters[start]) => {
                    left.pop();
                    start += 1;
                }
                _ => break,
            }
        }
        left.extend_from_slice(&other.letters[start..]);
        ReducedWord { letters: left }
    }

    /// The group inverse: reverse the letters and flip each one.
    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `self^exp`; negative exponents invert first.
    pub fn pow(&self, exp: i64) -> ReducedWord {
        let base = if exp < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut out = ReducedWord::identity();
        for _ in 0..exp.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// Surface string; the identity renders as `"1"`.
    pub fn surface(&self) -> String {
        if self.letters.is_empty() {
            "1".to_string()
        } else {
            self.letters.iter().map(|l| l.to_char()).collect()
        }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface())
    }
}

impl std::ops::Mul<&ReducedWord> for &ReducedWord {
    type Output = ReducedWord;

    fn mul(self, rhs: &ReducedWord) -> ReducedWord {
        self.multiply(rhs)
    }
}

/// All freely reduced words of length at most `max_len`, identity first,
/// then by length and within a length in letter order
/// `a < a^{-1} < b < b^{-1} < ...`.
///
/// There are `1 + 2n · ((2n-1)^L - 1) / (2n-2)` of them (for `n > 1`), so
/// keep `max_len` small.
pub fn all_reduced_words(rank: Rank, max_len: usize) -> Vec<ReducedWord> {
    let letters: Vec<Letter> = (1..=rank.get())
        .flat_map(|i| [Letter::generator(i), Letter::inverse_generator(i)])
        .collect();
    let mut out = vec![ReducedWord::identity()];
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * (letters.len() - 1) + 1);
        for prefix in &frontier {
            for &l in &letters {
                if prefix.last().is_some_and(|&top| top.cancels(l)) {
                    continue;
                }
                let mut word = prefix.clone();
                word.push(l);
                out.push(ReducedWord {
                    letters: word.clone(),
                });
                next.push(word);
            }
        }
        frontier = next;
    }
    out
}
