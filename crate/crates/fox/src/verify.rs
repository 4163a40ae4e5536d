//! Numeric verification of the multicomplex identities and the poset bounds.
//!
//! The identities Σ_{i+j=k} DᵢDⱼ = 0 for k ≤ 3 are checked tree by tree,
//! both globally per level and sliced by the multiset K of coface indices
//! (Σ_{I∨J=K} D_I D_J = 0). Coverage counters record which of the 21
//! configuration cases of the sliced equations were exercised.

use crate::chain::FnChain;
use crate::cosimp::{coface_multi, shift_union};
use crate::diff::{d0, d1, d2, d3, d_multiset, DiffIndex};
use crate::poset::poset_leq;
use crate::tree::{enumerate_trees, FnTree};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// The configuration cases of the sliced multicomplex equations: three for
/// one doubled index, six for two, twelve for three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SliceCase {
    D1Internal,
    D1Left,
    D1Right,
    PairEqual,
    PairAligned,
    PairPlanar,
    PairLeft,
    PairRight,
    PairBothExtremal,
    TripleAligned,
    TripleLeftMixed,
    TripleRightMixed,
    TriplePlanar,
    TripleLeftExtremalAligned,
    TripleLeftExtremalPlanar,
    TripleRightExtremalAligned,
    TripleRightExtremalPlanar,
    TripleEqualLeftAligned,
    TripleEqualLeftPlanar,
    TripleEqualRightAligned,
    TripleEqualRightPlanar,
}

pub const ALL_SLICE_CASES: [SliceCase; 21] = [
    SliceCase::D1Internal,
    SliceCase::D1Left,
    SliceCase::D1Right,
    SliceCase::PairEqual,
    SliceCase::PairAligned,
    SliceCase::PairPlanar,
    SliceCase::PairLeft,
    SliceCase::PairRight,
    SliceCase::PairBothExtremal,
    SliceCase::TripleAligned,
    SliceCase::TripleLeftMixed,
    SliceCase::TripleRightMixed,
    SliceCase::TriplePlanar,
    SliceCase::TripleLeftExtremalAligned,
    SliceCase::TripleLeftExtremalPlanar,
    SliceCase::TripleRightExtremalAligned,
    SliceCase::TripleRightExtremalPlanar,
    SliceCase::TripleEqualLeftAligned,
    SliceCase::TripleEqualLeftPlanar,
    SliceCase::TripleEqualRightAligned,
    SliceCase::TripleEqualRightPlanar,
];

/// Classify a slice multiset K against a tree; None for the configurations
/// whose equation is degenerate (still checked, not counted).
fn classify(k_set: &[usize], t: &FnTree) -> Option<SliceCase> {
    let n = t.points();
    let depth = |a: usize, b: usize| t.pair_depth(a as u8, b as u8);
    match *k_set {
        [i] => Some(if i == 0 {
            SliceCase::D1Left
        } else if i == n + 1 {
            SliceCase::D1Right
        } else if i <= n {
            SliceCase::D1Internal
        } else {
            return None;
        }),
        [a, b] => {
            if a == b {
                return (1..=n).contains(&a).then_some(SliceCase::PairEqual);
            }
            if a == 0 && b == n + 1 {
                return Some(SliceCase::PairBothExtremal);
            }
            if a == 0 && (1..=n).contains(&b) {
                return Some(SliceCase::PairLeft);
            }
            if b == n + 1 && (1..=n).contains(&a) {
                return Some(SliceCase::PairRight);
            }
            if a >= 1 && b <= n {
                return match depth(a, b)? {
                    2 => Some(SliceCase::PairAligned),
                    1 => Some(SliceCase::PairPlanar),
                    _ => None,
                };
            }
            None
        }
        [a, b, c] => {
            if a == 0 && b >= 1 && b < c && c <= n {
                return match depth(b, c)? {
                    2 => Some(SliceCase::TripleLeftExtremalAligned),
                    1 => Some(SliceCase::TripleLeftExtremalPlanar),
                    _ => None,
                };
            }
            if c == n + 1 && a >= 1 && a < b && b <= n {
                return match depth(a, b)? {
                    2 => Some(SliceCase::TripleRightExtremalAligned),
                    1 => Some(SliceCase::TripleRightExtremalPlanar),
                    _ => None,
                };
            }
            if a == b && b < c && a >= 1 && c <= n {
                return match depth(a, c)? {
                    2 => Some(SliceCase::TripleEqualLeftAligned),
                    1 => Some(SliceCase::TripleEqualLeftPlanar),
                    _ => None,
                };
            }
            if b == c && a < b && a >= 1 && c <= n {
                return match depth(a, b)? {
                    2 => Some(SliceCase::TripleEqualRightAligned),
                    1 => Some(SliceCase::TripleEqualRightPlanar),
                    _ => None,
                };
            }
            if a >= 1 && a < b && b < c && c <= n {
                return match (depth(a, b)?, depth(b, c)?) {
                    (2, 2) => Some(SliceCase::TripleAligned),
                    (2, 1) => Some(SliceCase::TripleLeftMixed),
                    (1, 2) => Some(SliceCase::TripleRightMixed),
                    (1, 1) => Some(SliceCase::TriplePlanar),
                    _ => None,
                };
            }
            None
        }
        _ => None,
    }
}

/// Ascending multisets of the given size over 0..=top.
fn multisets(top: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; size];
    fn rec(top: usize, pos: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in start..=top {
            cur[pos] = v;
            rec(top, pos + 1, v, cur, out);
        }
    }
    rec(top, 0, 0, &mut cur, &mut out);
    out
}

#[derive(Debug)]
pub struct IdentityFailure {
    pub tree: FnTree,
    pub level: usize,
    pub remainder_terms: usize,
}

#[derive(Debug, Default)]
pub struct VerifyReport {
    pub trees_checked: usize,
    pub coverage: BTreeMap<SliceCase, usize>,
}

impl VerifyReport {
    pub fn merge(mut self, other: VerifyReport) -> VerifyReport {
        self.trees_checked += other.trees_checked;
        for (k, v) in other.coverage {
            *self.coverage.entry(k).or_insert(0) += v;
        }
        self
    }

    pub fn missing_cases(&self) -> Vec<SliceCase> {
        ALL_SLICE_CASES
            .iter()
            .filter(|c| !self.coverage.contains_key(c))
            .copied()
            .collect()
    }
}

/// Global check Σ_{i+j=k} DᵢDⱼ = 0 for 0 ≤ k ≤ max_level on one tree.
pub fn check_identity_tree(t: &FnTree, max_level: usize) -> Result<(), IdentityFailure> {
    let c: FnChain = [*t].into_iter().collect();
    let apply = |lvl: usize, x: &FnChain| -> FnChain {
        match lvl {
            0 => d0(x),
            1 => d1(x),
            2 => d2(x),
            _ => d3(x),
        }
    };
    for k in 0..=max_level {
        let mut acc: Option<FnChain> = None;
        for i in 0..=k {
            let j = k - i;
            let inner = apply(j, &c);
            let outer = apply(i, &inner);
            match &mut acc {
                None => acc = Some(outer),
                Some(a) => a.xor_assign(&outer).expect("matching points"),
            }
        }
        let acc = acc.unwrap();
        if !acc.is_zero() {
            return Err(IdentityFailure {
                tree: *t,
                level: k,
                remainder_terms: acc.len(),
            });
        }
    }
    Ok(())
}

/// Sliced check on one tree: for every multiset K with |K| ≤ max_level,
/// Σ_{I∨J=K} D_I D_J = 0. Returns the exercised configuration cases.
pub fn check_sliced_tree(t: &FnTree, max_level: usize) -> Result<VerifyReport, IdentityFailure> {
    let n = t.points();
    let c: FnChain = [*t].into_iter().collect();
    let mut groups: BTreeMap<Vec<usize>, FnChain> = BTreeMap::new();
    for j_size in 0..=max_level {
        for j_set in multisets(n + 1, j_size) {
            let inner = d_multiset(&c, &DiffIndex(j_set.clone())).expect("valid size");
            for i_size in 0..=max_level - j_size {
                let top = n + j_size + 1;
                for i_set in multisets(top, i_size) {
                    let k_set = shift_union(&i_set, &j_set);
                    let outer = d_multiset(&inner, &DiffIndex(i_set)).expect("valid size");
                    match groups.get_mut(&k_set) {
                        None => {
                            groups.insert(k_set, outer);
                        }
                        Some(g) => g.xor_assign(&outer).expect("matching points"),
                    }
                }
            }
        }
    }
    let mut report = VerifyReport {
        trees_checked: 1,
        ..Default::default()
    };
    for (k_set, sum) in groups {
        if !sum.is_zero() {
            return Err(IdentityFailure {
                tree: *t,
                level: k_set.len(),
                remainder_terms: sum.len(),
            });
        }
        if let Some(case) = classify(&k_set, t) {
            *report.coverage.entry(case).or_insert(0) += 1;
        }
    }
    Ok(report)
}

/// Exhaustive identity check over the whole basis of FN(n, d).
pub fn verify_truncated_identity(n: usize, d: usize, max_level: usize) -> Result<usize, IdentityFailure> {
    let trees = enumerate_trees(n, d);
    trees
        .par_iter()
        .map(|t| check_identity_tree(t, max_level).map(|()| 1usize))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Sliced identity check with coverage over a given population.
pub fn verify_sliced_population(trees: &[FnTree], max_level: usize) -> Result<VerifyReport, IdentityFailure> {
    trees
        .par_iter()
        .map(|t| check_sliced_tree(t, max_level))
        .try_reduce(VerifyReport::default, |a, b| Ok(a.merge(b)))
}

/// Every term of D_A(t) lies below the corresponding composite coface in the
/// tree poset.
pub fn verify_mu_bound(t: &FnTree, index: &DiffIndex) -> bool {
    let c: FnChain = [*t].into_iter().collect();
    let image = match d_multiset(&c, index) {
        Ok(ch) => ch,
        Err(_) => return false,
    };
    if image.is_zero() {
        return true;
    }
    let target = match coface_multi(t, &index.0) {
        Ok(up) => up,
        Err(_) => return false,
    };
    let ok = image.iter().all(|term| poset_leq(term, &target));
    ok
}

/// All valid differential index multisets for an n-point tree.
pub fn all_diff_indices(n: usize) -> Vec<DiffIndex> {
    let mut out = vec![DiffIndex(vec![])];
    for i in 0..=n + 1 {
        out.push(DiffIndex(vec![i]));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(DiffIndex(vec![i, j]));
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                out.push(DiffIndex(vec![i, j, k]));
            }
        }
    }
    out
}

/// Check the poset bound for every valid index multiset on a population.
pub fn verify_mu_population(trees: &[FnTree]) -> Result<usize, (FnTree, DiffIndex)> {
    trees
        .par_iter()
        .map(|t| {
            for idx in all_diff_indices(t.points()) {
                if !verify_mu_bound(t, &idx) {
                    return Err((*t, idx));
                }
            }
            Ok(1usize)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}
