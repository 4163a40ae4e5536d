//! 𝔽₂ formal sums of Fox-Neuwirth trees with a shared point count.
//!
//! Chains have set semantics: inserting a tree twice removes it.

use crate::tree::FnTree;
use crate::FoxError;
use std::collections::HashSet;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FnChain {
    points: usize,
    terms: HashSet<FnTree>,
}

impl FnChain {
    pub fn new(points: usize) -> Self {
        FnChain {
            points,
            terms: HashSet::new(),
        }
    }

    pub fn from_trees<I: IntoIterator<Item = FnTree>>(points: usize, trees: I) -> Result<Self, FoxError> {
        let mut c = FnChain::new(points);
        for t in trees {
            c.toggle(t)?;
        }
        Ok(c)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, t: &FnTree) -> bool {
        self.terms.contains(t)
    }

    /// Add a tree mod 2.
    pub fn toggle(&mut self, t: FnTree) -> Result<(), FoxError> {
        if t.points() != self.points {
            return Err(FoxError::PointMismatch(t.points(), self.points));
        }
        if !self.terms.remove(&t) {
            self.terms.insert(t);
        }
        Ok(())
    }

    pub fn xor_assign(&mut self, other: &FnChain) -> Result<(), FoxError> {
        if other.points != self.points && !other.is_zero() {
            return Err(FoxError::PointMismatch(other.points, self.points));
        }
        for t in &other.terms {
            if !self.terms.remove(t) {
                self.terms.insert(*t);
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &FnTree> {
        self.terms.iter()
    }

    /// Terms in a canonical order, for deterministic output.
    pub fn sorted_terms(&self) -> Vec<FnTree> {
        let mut v: Vec<FnTree> = self.terms.iter().copied().collect();
        v.sort();
        v
    }

    /// Common degree of all terms, when homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.iter();
        let d = it.next()?.degree();
        if it.all(|t| t.degree() == d) {
            Some(d)
        } else {
            None
        }
    }

    /// Drop every term containing a depth-1 index.
    pub fn without_depth_one(&self) -> FnChain {
        FnChain {
            points: self.points,
            terms: self.terms.iter().filter(|t| !t.has_depth_one()).copied().collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("FN n={} m=3\n", self.points);
        for t in self.sorted_terms() {
            s.push_str(&t.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, FoxError> {
        let mut lines = text.lines();
        let header = loop {
            match lines.next() {
                Some(l) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
                Some(l) => break l,
                None => return Err(FoxError::Parse("empty chain file".into())),
            }
        };
        let mut toks = header.split_whitespace();
        if toks.next() != Some("FN") {
            return Err(FoxError::Parse(format!("expected FN header, got: {header}")));
        }
        let mut n = None;
        for tok in toks {
            match tok.split_once('=') {
                Some(("n", v)) => {
                    n = Some(v.parse::<usize>().map_err(|_| FoxError::Parse(format!("bad n: {tok}")))?)
                }
                Some(("m", v)) => {
                    if v != "3" {
                        return Err(FoxError::Parse(format!("only m=3 chains are supported, got m={v}")));
                    }
                }
                _ => return Err(FoxError::Parse(format!("bad header token: {tok}"))),
            }
        }
        let n = n.ok_or_else(|| FoxError::Parse("header missing n=".into()))?;
        let mut chain = FnChain::new(n);
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            chain.toggle(FnTree::parse(line)?)?;
        }
        Ok(chain)
    }
}

impl FromIterator<FnTree> for FnChain {
    /// Collect trees into a chain; panics on mixed point counts.
    fn from_iter<I: IntoIterator<Item = FnTree>>(iter: I) -> Self {
        let mut it = iter.into_iter().peekable();
        let points = it.peek().map_or(0, |t| t.points());
        FnChain::from_trees(points, it).expect("mixed point counts in chain")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> FnTree {
        FnTree::parse(s).unwrap()
    }

    #[test]
    fn duplicates_cancel() {
        let mut c = FnChain::new(2);
        c.toggle(t("1 2")).unwrap();
        c.toggle(t("2 1")).unwrap();
        c.toggle(t("1 2")).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.contains(&t("2 1")));
    }

    #[test]
    fn point_counts_must_agree() {
        let mut c = FnChain::new(2);
        assert!(c.toggle(t("1 2 3")).is_err());
    }

    #[test]
    fn text_roundtrip_cancels_duplicate_lines() {
        let text = "FN n=2 m=3\n# a comment\n1 | 2\n2 1\n1 | 2\n";
        let c = FnChain::from_text(text).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.contains(&t("2 1")));
        let c2 = FnChain::from_text(&c.to_text()).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn homogeneous_degree() {
        let c: FnChain = [t("1 2"), t("2 1")].into_iter().collect();
        assert_eq!(c.degree(), Some(2));
        let mixed: FnChain = [t("1 2"), t("2 | 1")].into_iter().collect();
        assert_eq!(mixed.degree(), None);
    }
}
