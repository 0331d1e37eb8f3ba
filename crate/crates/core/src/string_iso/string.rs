use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// A string over a dense alphabet of symbol ids, indexed by domain points.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredString {
    letters: Vec<u32>,
}

pub type Window = Vec<usize>;

impl ColoredString {
    pub fn new(letters: Vec<u32>) -> Self {
        ColoredString { letters }
    }

    pub fn constant(n: usize, letter: u32) -> Self {
        ColoredString { letters: vec![letter; n] }
    }

    /// Maps characters to ids in sorted character order.
    pub fn from_text(text: &str) -> Self {
        let mut alphabet: Vec<char> = text.chars().collect();
        alphabet.sort_unstable();
        alphabet.dedup();
        let letters = text.chars().map(|c| alphabet.binary_search(&c).unwrap() as u32).collect();
        ColoredString { letters }
    }

    /// Parses whitespace separated symbols; symbols are renamed densely in sorted order.
    pub fn parse_symbols(line: &str) -> Result<Self> {
        let syms: Vec<&str> = line.split_whitespace().collect();
        if syms.is_empty() {
            return Err(Error::Parse("empty string line".into()));
        }
        Ok(Self::from_symbols(&syms))
    }

    pub fn from_symbols<S: Ord + Clone>(syms: &[S]) -> Self {
        let mut alphabet = syms.to_vec();
        alphabet.sort();
        alphabet.dedup();
        ColoredString { letters: syms.iter().map(|s| alphabet.binary_search(s).unwrap() as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.letters[i]
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn alphabet_size(&self) -> u32 {
        self.letters.iter().max().map_or(0, |m| m + 1)
    }

    /// `x^σ`, defined by `x^σ(i^σ) = x(i)`.
    pub fn act(&self, sigma: &Perm) -> ColoredString {
        let mut out = vec![0; self.len()];
        for (i, &c) in self.letters.iter().enumerate() {
            out[sigma.apply(i)] = c;
        }
        ColoredString { letters: out }
    }

    /// Whether `sigma` maps `self` to `other` on the window, i.e. `x(i) = y(i^σ)` there.
    pub fn maps_to_on(&self, other: &ColoredString, sigma: &Perm, window: &[usize]) -> bool {
        window.iter().all(|&i| self.letters[i] == other.letters[sigma.apply(i)])
    }

    pub fn maps_to(&self, other: &ColoredString, sigma: &Perm) -> bool {
        (0..self.len()).all(|i| self.letters[i] == other.letters[sigma.apply(i)])
    }

    /// Count of each position's own letter.
    pub fn multiplicity_coloring(&self) -> Vec<usize> {
        let counts = self.letter_counts();
        self.letters.iter().map(|c| counts[c]).collect()
    }

    pub fn letter_counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for &c in &self.letters {
            *counts.entry(c).or_insert(0) += 1;
        }
        counts
    }

    /// Positions outside the window get the symbol `glaucous`.
    pub fn truncate_with(&self, window: &[usize], glaucous: u32) -> ColoredString {
        let mut out = vec![glaucous; self.len()];
        for &i in window {
            out[i] = self.letters[i];
        }
        ColoredString { letters: out }
    }

    /// Truncation with the reserved symbol equal to the alphabet size.
    pub fn truncate(&self, window: &[usize]) -> ColoredString {
        self.truncate_with(window, self.alphabet_size())
    }

    /// Letters at the given positions, in order.
    pub fn restrict(&self, points: &[usize]) -> ColoredString {
        ColoredString { letters: points.iter().map(|&p| self.letters[p]).collect() }
    }
}

impl fmt::Display for ColoredString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for ColoredString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banana_multiplicities() {
        assert_eq!(ColoredString::from_text("banana").multiplicity_coloring(), vec![1, 3, 2, 3, 2, 3]);
        assert_eq!(ColoredString::constant(4, 0).multiplicity_coloring(), vec![4; 4]);
        assert_eq!(ColoredString::from_text("abcd").multiplicity_coloring(), vec![1; 4]);
    }

    #[test]
    fn action_composes() {
        let x = ColoredString::from_text("abcde");
        let s = Perm::parse(5, "(0 1 2)").unwrap();
        let t = Perm::parse(5, "(2 4)(0 3)").unwrap();
        assert_eq!(x.act(&s).act(&t), x.act(&s.then(&t)));
        assert!(x.maps_to(&x.act(&s), &s));
    }

    #[test]
    fn truncation() {
        let x = ColoredString::from_text("banana");
        assert_eq!(x.truncate(&[0, 1, 2, 3, 4, 5]), x);
        assert_eq!(x.truncate(&[]), ColoredString::constant(6, 3));
        // b=1, n=2, glaucous=3
        assert_eq!(x.truncate(&[0, 2, 4]).letters(), &[1, 3, 2, 3, 2, 3]);
    }
}
