//! Words in named generators.
//!
//! A [`MapWord`] is a finite product of generator powers, stored in
//! application order: the first letter acts first. Letters carry arbitrary
//! integer exponents so that very long runs of a single generator (which
//! arise in transport and density-witness constructions) stay compact;
//! `g^-1` and `g` are the common cases.

use std::fmt;

/// One generator power, e.g. `("g", -3)` for `g^-3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: String,
    pub exp: i64,
}

impl Letter {
    pub fn new(gen: impl Into<String>, exp: i64) -> Letter {
        Letter {
            gen: gen.into(),
            exp,
        }
    }
}

/// A freely reduced word in generators and (for groups) their inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MapWord {
    letters: Vec<Letter>,
}

impl MapWord {
    pub fn identity() -> MapWord {
        MapWord::default()
    }

    /// Builds a word from letters in application order, merging adjacent
    /// powers of the same generator and dropping cancellations.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> MapWord {
        let mut w = MapWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Single letter `gen^exp`.
    pub fn single(gen: impl Into<String>, exp: i64) -> MapWord {
        MapWord::from_letters([Letter::new(gen, exp)])
    }

    /// Appends a letter, keeping the word freely reduced.
    pub fn push(&mut self, l: Letter) {
        if l.exp == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.gen == l.gen {
                last.exp += l.exp;
                if last.exp == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push(l);
    }

    /// `self` followed by `other` (apply `self` first), freely reduced.
    pub fn then(&self, other: &MapWord) -> MapWord {
        let mut w = self.clone();
        for l in &other.letters {
            w.push(l.clone());
        }
        w
    }

    /// The inverse word.
    pub fn inverse(&self) -> MapWord {
        MapWord::from_letters(
            self.letters
                .iter()
                .rev()
                .map(|l| Letter::new(l.gen.clone(), -l.exp)),
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Total letter count with multiplicity: the word length used by budget
    /// accounting.
    pub fn len(&self) -> u64 {
        self.letters.iter().map(|l| l.exp.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Whether any letter has a negative exponent.
    pub fn uses_inverses(&self) -> bool {
        self.letters.iter().any(|l| l.exp < 0)
    }
}

impl fmt::Display for MapWord {
    /// Space-separated letters in application order; inverse letters carry a
    /// `^-1` suffix, larger powers `^k`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "<id>");
        }
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            match l.exp {
                1 => write!(f, "{}", l.gen)?,
                e => write!(f, "{}^{}", l.gen, e)?,
            }
        }
        Ok(())
    }
}

/// Exact evaluation of whole words against a specific generator family.
///
/// Systems whose generators have closed-form orbits install one of these so
/// that words with very large generator powers evaluate in time independent
/// of the exponent.
pub trait ExactWordEvaluator: Send + Sync {
    fn eval_word_exact(
        &self,
        word: &MapWord,
        x: &crate::rational::Rational,
    ) -> Result<crate::rational::Rational, super::MapError>;
}

/// Parses the display format: whitespace-separated `name` or `name^k`.
pub fn parse_word(s: &str) -> Result<MapWord, String> {
    let t = s.trim();
    if t.is_empty() || t == "<id>" {
        return Ok(MapWord::identity());
    }
    let mut letters = Vec::new();
    for tok in t.split_whitespace() {
        let (gen, exp) = match tok.split_once('^') {
            Some((g, e)) => (
                g,
                e.parse::<i64>()
                    .map_err(|_| format!("bad exponent in {tok:?}"))?,
            ),
            None => (tok, 1),
        };
        if gen.is_empty() {
            return Err(format!("empty generator name in {tok:?}"));
        }
        letters.push(Letter::new(gen, exp));
    }
    Ok(MapWord::from_letters(letters))
}
