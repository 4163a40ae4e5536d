//! Fox monomials and polynomials.
//!
//! A monomial is a word over constants, cloud variables and bars; it encodes
//! a schema for distributing spectator points when points get doubled. Words
//! are stored as a letter list plus a gap list of bar counts, with virtual
//! bar count 3 at both ends of the word.

use crate::FoxError;
use std::collections::BTreeSet;
use std::collections::HashSet;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Letter {
    Const(u16),
    /// 2-cloud variable Xᵢ.
    X(u8),
    /// 1-cloud variable Yⱼ.
    Y(u8),
    /// Derived 1-cloud variable ∂Yⱼ.
    DerY(u8),
    /// 0-cloud variable Zₖ.
    Z(u8),
    /// Dummy left by an empty 2-cloud restriction; transient.
    EmptyX,
    /// Dummy left by an empty 1-cloud restriction; transient.
    EmptyY,
}

impl Letter {
    pub fn is_dummy(&self) -> bool {
        matches!(self, Letter::EmptyX | Letter::EmptyY)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    letters: Vec<Letter>,
    /// Bar counts; gaps[i] sits before letters[i], so the length is
    /// letters.len() + 1. Both ends are the virtual count 3.
    gaps: Vec<u8>,
}

impl Monomial {
    /// Build from letters and the bar counts between consecutive letters.
    pub fn from_parts(letters: Vec<Letter>, interior_gaps: Vec<u8>) -> Self {
        assert_eq!(interior_gaps.len() + 1, letters.len().max(1));
        let mut gaps = Vec::with_capacity(letters.len() + 1);
        gaps.push(3);
        gaps.extend_from_slice(&interior_gaps);
        gaps.push(3);
        if letters.is_empty() {
            gaps = vec![3];
        }
        debug_assert!(interior_gaps.iter().all(|&g| g <= 2));
        Monomial { letters, gaps }
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

    /// Bar count before the letter at `pos` (3 at the word start).
    pub fn gap_before(&self, pos: usize) -> u8 {
        self.gaps[pos]
    }

    /// Bar count after the letter at `pos` (3 at the word end).
    pub fn gap_after(&self, pos: usize) -> u8 {
        self.gaps[pos + 1]
    }

    /// The support: the set of constants appearing in the word.
    pub fn support(&self) -> BTreeSet<u16> {
        self.letters
            .iter()
            .filter_map(|l| match l {
                Letter::Const(c) => Some(*c),
                _ => None,
            })
            .collect()
    }

    pub fn is_numerical(&self) -> bool {
        self.letters.iter().all(|l| matches!(l, Letter::Const(_)))
    }

    /// Check the monomial well-formedness conditions. Dummies are transient
    /// and never valid in a finished monomial.
    pub fn validate(&self) -> Result<(), FoxError> {
        for (i, &g) in self.gaps.iter().enumerate() {
            let interior = i > 0 && i < self.gaps.len() - 1;
            if interior && g > 2 {
                return Err(FoxError::InvalidMonomial(2, "more than two consecutive bars".into()));
            }
        }
        let mut consts = HashSet::new();
        let mut zs = HashSet::new();
        let mut derived = 0usize;
        for (pos, l) in self.letters.iter().enumerate() {
            match l {
                Letter::Const(c) => {
                    if !consts.insert(*c) {
                        return Err(FoxError::InvalidMonomial(7, format!("constant {c} repeated")));
                    }
                }
                Letter::Y(_) | Letter::DerY(_) => {
                    if self.gap_before(pos) < 1 || self.gap_after(pos) < 1 {
                        return Err(FoxError::InvalidMonomial(
                            3,
                            "1-cloud not separated by a bar".into(),
                        ));
                    }
                    if let Letter::DerY(_) = l {
                        derived += 1;
                    }
                }
                Letter::Z(k) => {
                    if self.gap_before(pos) < 2 || self.gap_after(pos) < 2 {
                        return Err(FoxError::InvalidMonomial(
                            4,
                            "0-cloud not separated by double bars".into(),
                        ));
                    }
                    if !zs.insert(*k) {
                        return Err(FoxError::InvalidMonomial(5, format!("Z{k} repeated")));
                    }
                }
                Letter::X(_) => {}
                Letter::EmptyX | Letter::EmptyY => {
                    return Err(FoxError::InvalidMonomial(0, "transient dummy symbol".into()))
                }
            }
        }
        if derived > 1 {
            return Err(FoxError::InvalidMonomial(6, "more than one derived variable".into()));
        }
        Ok(())
    }

    /// Apply an injective map to all constants.
    pub fn relabel_constants<F: Fn(u16) -> u16>(&self, map: F) -> Result<Monomial, FoxError> {
        let mut seen = HashSet::new();
        let letters = self
            .letters
            .iter()
            .map(|l| match l {
                Letter::Const(c) => {
                    let v = map(*c);
                    if !seen.insert(v) {
                        return Err(FoxError::NonInjective);
                    }
                    Ok(Letter::Const(v))
                }
                other => Ok(*other),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Monomial {
            letters,
            gaps: self.gaps.clone(),
        })
    }

    /// Δᵢ: relabel constants by x ↦ x + 1 for x ≥ i.
    pub fn delta(&self, i: u16) -> Monomial {
        self.relabel_constants(|x| if x >= i { x + 1 } else { x })
            .expect("delta is injective")
    }

    /// Remove the constant ℓ, merging the surrounding bar counts by max.
    pub fn eliminate(&self, label: u16) -> Result<Monomial, FoxError> {
        let pos = self
            .letters
            .iter()
            .position(|l| *l == Letter::Const(label))
            .ok_or_else(|| FoxError::Invalid(format!("constant {label} not in support")))?;
        let mut out = self.clone();
        out.remove_letter(pos);
        Ok(out)
    }

    /// Restrict to a subset of the support by eliminating everything else.
    pub fn restrict(&self, keep: &BTreeSet<u16>) -> Monomial {
        let mut out = self.clone();
        loop {
            let pos = out.letters.iter().position(|l| match l {
                Letter::Const(c) => !keep.contains(c),
                _ => false,
            });
            match pos {
                Some(p) => out.remove_letter(p),
                None => return out,
            }
        }
    }

    fn remove_letter(&mut self, pos: usize) {
        let merged = self.gaps[pos].max(self.gaps[pos + 1]);
        self.letters.remove(pos);
        self.gaps.remove(pos + 1);
        self.gaps[pos] = merged;
        if self.letters.is_empty() {
            self.gaps = vec![3];
        }
    }

    /// Replace the letter at `pos` by a word, keeping the outer bar counts.
    /// An empty word removes the letter like an elimination.
    pub(crate) fn splice(&self, pos: usize, letters: &[Letter], interior_gaps: &[u8]) -> Monomial {
        debug_assert_eq!(interior_gaps.len() + 1, letters.len().max(1));
        let mut out_letters = Vec::with_capacity(self.letters.len() + letters.len());
        let mut out_gaps = Vec::with_capacity(self.gaps.len() + letters.len());
        out_letters.extend_from_slice(&self.letters[..pos]);
        out_gaps.extend_from_slice(&self.gaps[..pos + 1]);
        if letters.is_empty() {
            // merge the two surrounding gaps, word ends counting as 3
            let g = self.gaps[pos].max(self.gaps[pos + 1]);
            *out_gaps.last_mut().unwrap() = g;
        } else {
            out_letters.extend_from_slice(letters);
            out_gaps.extend_from_slice(interior_gaps);
            out_gaps.push(self.gaps[pos + 1]);
        }
        out_letters.extend_from_slice(&self.letters[pos + 1..]);
        out_gaps.extend_from_slice(&self.gaps[pos + 2..]);
        if out_letters.is_empty() {
            out_gaps = vec![3];
        }
        Monomial {
            letters: out_letters,
            gaps: out_gaps,
        }
    }

    /// Eliminate dummy symbols: ∅_X vanishes when an adjacent bar count is 0,
    /// ∅_Y when one is 1, merging by max; a word whose dummies cannot all be
    /// eliminated is zero (None).
    pub fn simplify_dummies(mut self) -> Option<Monomial> {
        loop {
            let mut progressed = false;
            let mut pos = 0;
            while pos < self.letters.len() {
                let (p, q) = (self.gaps[pos], self.gaps[pos + 1]);
                let removable = match self.letters[pos] {
                    Letter::EmptyX => p == 0 || q == 0,
                    Letter::EmptyY => p == 1 || q == 1,
                    _ => {
                        pos += 1;
                        continue;
                    }
                };
                if removable {
                    self.remove_letter(pos);
                    progressed = true;
                } else {
                    pos += 1;
                }
            }
            if !progressed {
                return if self.letters.iter().any(Letter::is_dummy) {
                    None
                } else {
                    Some(self)
                };
            }
        }
    }

    pub fn parse(text: &str) -> Result<Monomial, FoxError> {
        let mut letters = Vec::new();
        let mut interior = Vec::new();
        let mut pending: Option<u8> = None;
        let mut toks = text.split_whitespace().peekable();
        while let Some(tok) = toks.next() {
            if tok.chars().all(|c| c == '|') {
                if letters.is_empty() {
                    return Err(FoxError::Parse("leading bar".into()));
                }
                let b = tok.len() as u8 + pending.unwrap_or(0);
                if b > 2 {
                    return Err(FoxError::Parse("more than two consecutive bars".into()));
                }
                pending = Some(b);
                continue;
            }
            let letter = if let Some(rest) = tok.strip_prefix("dY") {
                Letter::DerY(rest.parse().map_err(|_| FoxError::Parse(tok.into()))?)
            } else if let Some(rest) = tok.strip_prefix('X') {
                Letter::X(rest.parse().map_err(|_| FoxError::Parse(tok.into()))?)
            } else if let Some(rest) = tok.strip_prefix('Y') {
                Letter::Y(rest.parse().map_err(|_| FoxError::Parse(tok.into()))?)
            } else if let Some(rest) = tok.strip_prefix('Z') {
                Letter::Z(rest.parse().map_err(|_| FoxError::Parse(tok.into()))?)
            } else {
                Letter::Const(tok.parse().map_err(|_| FoxError::Parse(tok.into()))?)
            };
            if !letters.is_empty() {
                interior.push(pending.unwrap_or(0));
            }
            pending = None;
            letters.push(letter);
            let _ = toks.peek();
        }
        if pending.is_some() {
            return Err(FoxError::Parse("trailing bar".into()));
        }
        if letters.is_empty() {
            return Err(FoxError::Parse("empty monomial".into()));
        }
        Ok(Monomial::from_parts(letters, interior))
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                match self.gaps[i] {
                    0 => write!(f, " ")?,
                    1 => write!(f, " | ")?,
                    _ => write!(f, " || ")?,
                }
            }
            match l {
                Letter::Const(c) => write!(f, "{c}")?,
                Letter::X(i) => write!(f, "X{i}")?,
                Letter::Y(i) => write!(f, "Y{i}")?,
                Letter::DerY(i) => write!(f, "dY{i}")?,
                Letter::Z(i) => write!(f, "Z{i}")?,
                Letter::EmptyX => write!(f, "(eX)")?,
                Letter::EmptyY => write!(f, "(eY)")?,
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// An 𝔽₂ set of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polynomial {
    terms: HashSet<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }
}

impl FromIterator<Monomial> for Polynomial {
    fn from_iter<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut p = Polynomial::zero();
        for m in iter {
            p.toggle(m);
        }
        p
    }
}
