//! Permutations of {1..k} and their composition/inversion tables.
//!
//! Permutations are stored in one-line notation with 0-based values and are
//! identified by their index in the reverse-lexicographic ordering of all k!
//! one-line words. In that ordering the identity is the last element.

use crate::Gf2Error;

/// Largest supported symmetric group parameter. 9! index tables still fit
/// comfortably in memory; composition tables do not (see `PermTables`).
pub const MAX_K: usize = 9;

const FACT: [usize; MAX_K + 1] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880];

/// Composition tables are materialized only up to this k. Beyond it a k!×k!
/// table costs gigabytes while composing one-line forms costs O(k).
const COMPOSE_TABLE_MAX_K: usize = 7;

pub fn factorial(k: usize) -> usize {
    FACT[k]
}

/// A permutation of {0..k-1} in one-line notation: `map[i]` is the image of i.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm {
    len: u8,
    map: [u8; MAX_K],
}

impl Perm {
    pub fn identity(k: usize) -> Self {
        let mut map = [0u8; MAX_K];
        for (i, m) in map.iter_mut().enumerate().take(k) {
            *m = i as u8;
        }
        Perm { len: k as u8, map }
    }

    /// Build from 0-based images; `images[i]` is the image of i.
    pub fn from_images(images: &[u8]) -> Self {
        assert!(images.len() <= MAX_K);
        let mut map = [0u8; MAX_K];
        map[..images.len()].copy_from_slice(images);
        Perm {
            len: images.len() as u8,
            map,
        }
    }

    /// Build from a 1-based one-line word (as used in text formats).
    pub fn from_one_based(word: &[usize]) -> Result<Self, Gf2Error> {
        let k = word.len();
        if k == 0 || k > MAX_K {
            return Err(Gf2Error::BadGroupOrder(k));
        }
        let mut seen = [false; MAX_K];
        let mut map = [0u8; MAX_K];
        for (i, &v) in word.iter().enumerate() {
            if v < 1 || v > k || seen[v - 1] {
                return Err(Gf2Error::Malformed(format!(
                    "not a permutation of 1..={k}: {word:?}"
                )));
            }
            seen[v - 1] = true;
            map[i] = (v - 1) as u8;
        }
        Ok(Perm { len: k as u8, map })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.map[..self.len as usize]
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images().iter().map(|&v| v as usize + 1).collect()
    }

    /// self ∘ other: first `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len, other.len);
        let k = self.len as usize;
        let mut map = [0u8; MAX_K];
        for i in 0..k {
            map[i] = self.map[other.map[i] as usize];
        }
        Perm { len: self.len, map }
    }

    pub fn inverse(&self) -> Perm {
        let k = self.len as usize;
        let mut map = [0u8; MAX_K];
        for i in 0..k {
            map[self.map[i] as usize] = i as u8;
        }
        Perm { len: self.len, map }
    }

    /// Does the permutation fix the last point? Such permutations embed into
    /// the next smaller symmetric group.
    pub fn fixes_last(&self) -> bool {
        let k = self.len as usize;
        self.map[k - 1] as usize == k - 1
    }

    /// Restrict to {0..k-2}; requires `fixes_last`.
    pub fn restrict(&self) -> Perm {
        debug_assert!(self.fixes_last());
        let mut p = *self;
        p.len -= 1;
        p
    }

    /// Extend by a new fixed point.
    pub fn extend(&self) -> Perm {
        let mut p = *self;
        p.map[self.len as usize] = self.len;
        p.len += 1;
        p
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let w: Vec<String> = self.one_based().iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", w.join(" "))
    }
}

/// Index tables for Σₖ with the reverse-lexicographic ordering of one-line
/// words, identity last. Indices are 0-based; text formats add 1.
pub struct PermTables {
    k: usize,
    perms: Vec<Perm>,
    inverse: Vec<u32>,
    compose_table: Option<Vec<u32>>,
}

impl PermTables {
    pub fn new(k: usize) -> Result<Self, Gf2Error> {
        if k == 0 || k > MAX_K {
            return Err(Gf2Error::BadGroupOrder(k));
        }
        let n = FACT[k];
        let mut perms = Vec::with_capacity(n);
        let mut current: Vec<u8> = (0..k as u8).collect();
        loop {
            perms.push(Perm::from_images(&current));
            if !next_lex(&mut current) {
                break;
            }
        }
        perms.reverse();
        debug_assert_eq!(perms.len(), n);

        let tables = PermTables {
            k,
            perms,
            inverse: Vec::new(),
            compose_table: None,
        };
        let inverse = (0..n)
            .map(|i| tables.rank(&tables.perms[i].inverse()) as u32)
            .collect();
        let compose_table = if k <= COMPOSE_TABLE_MAX_K {
            let mut t = vec![0u32; n * n];
            for p in 0..n {
                for q in 0..n {
                    t[p * n + q] = tables.rank(&tables.perms[p].compose(&tables.perms[q])) as u32;
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(PermTables {
            inverse,
            compose_table,
            ..tables
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn identity_index(&self) -> u32 {
        (self.perms.len() - 1) as u32
    }

    pub fn perm(&self, idx: u32) -> &Perm {
        &self.perms[idx as usize]
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    /// Rank in the reverse-lexicographic ordering, via the Lehmer code of the
    /// one-line word.
    pub fn rank(&self, p: &Perm) -> usize {
        debug_assert_eq!(p.len(), self.k);
        let k = self.k;
        let mut lex = 0usize;
        for i in 0..k {
            let mut smaller = 0usize;
            for j in i + 1..k {
                if p.map[j] < p.map[i] {
                    smaller += 1;
                }
            }
            lex += smaller * FACT[k - 1 - i];
        }
        FACT[k] - 1 - lex
    }

    pub fn inverse_index(&self, idx: u32) -> u32 {
        self.inverse[idx as usize]
    }

    /// Index of perms[p] ∘ perms[q] (apply q first).
    pub fn compose_index(&self, p: u32, q: u32) -> u32 {
        if let Some(t) = &self.compose_table {
            t[p as usize * self.perms.len() + q as usize]
        } else {
            self.rank(&self.perms[p as usize].compose(&self.perms[q as usize])) as u32
        }
    }
}

/// Advance to the next word in lexicographic order; false when exhausted.
fn next_lex(a: &mut [u8]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_lex_ordering_s3() {
        let t = PermTables::new(3).unwrap();
        let words: Vec<Vec<usize>> = t.perms().iter().map(|p| p.one_based()).collect();
        assert_eq!(
            words,
            vec![
                vec![3, 2, 1],
                vec![3, 1, 2],
                vec![2, 3, 1],
                vec![2, 1, 3],
                vec![1, 3, 2],
                vec![1, 2, 3],
            ]
        );
    }

    #[test]
    fn identity_is_last() {
        for k in 1..=6 {
            let t = PermTables::new(k).unwrap();
            let id = t.identity_index();
            assert_eq!(t.perm(id), &Perm::identity(k));
            assert_eq!(t.inverse_index(id), id);
        }
    }

    #[test]
    fn rank_roundtrip() {
        for k in 1..=7 {
            let t = PermTables::new(k).unwrap();
            for (i, p) in t.perms().iter().enumerate() {
                assert_eq!(t.rank(p), i);
            }
        }
    }

    #[test]
    fn compose_matches_tables() {
        let t = PermTables::new(4).unwrap();
        for p in 0..t.order() as u32 {
            for q in 0..t.order() as u32 {
                let direct = t.perm(p).compose(t.perm(q));
                assert_eq!(t.rank(&direct) as u32, t.compose_index(p, q));
            }
        }
    }

    #[test]
    fn compose_and_inverse() {
        let t = PermTables::new(5).unwrap();
        for idx in 0..t.order() as u32 {
            let inv = t.inverse_index(idx);
            assert_eq!(t.compose_index(idx, inv), t.identity_index());
            assert_eq!(t.compose_index(inv, idx), t.identity_index());
        }
    }

    #[test]
    fn on_the_fly_composition_for_large_k() {
        // k = 8 has no materialized table; spot-check against direct products.
        let t = PermTables::new(8).unwrap();
        assert!(t.compose_table.is_none());
        let a = t.perm(12345).compose(t.perm(321));
        assert_eq!(t.compose_index(12345, 321), t.rank(&a) as u32);
    }
}
