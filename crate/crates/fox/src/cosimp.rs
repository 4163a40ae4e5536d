//! The cosimplicial poset maps on Fox-Neuwirth trees.
//!
//! The internal coface dᵢ replaces leaf i by the fork i, i+1 at maximal
//! depth and bumps larger labels; the extremal cofaces insert a new leftmost
//! or rightmost leaf; the codegeneracy sⱼ deletes leaf j+1 and merges the
//! adjacent depths by the min-rule.

use crate::tree::FnTree;
use crate::FoxError;

pub fn coface(t: &FnTree, i: usize) -> Result<FnTree, FoxError> {
    let n = t.points();
    if i > n + 1 {
        return Err(FoxError::IndexOutOfRange(i, n));
    }
    if i == 0 {
        let mut order = vec![1u8];
        order.extend(t.order().iter().map(|&l| l + 1));
        let mut depths = vec![2u8];
        depths.extend_from_slice(t.depths());
        return FnTree::new(&order, &depths);
    }
    if i == n + 1 {
        let mut order = t.order().to_vec();
        order.push(n as u8 + 1);
        let mut depths = t.depths().to_vec();
        depths.push(2);
        return FnTree::new(&order, &depths);
    }
    let mut order = Vec::with_capacity(n + 1);
    let mut depths = Vec::with_capacity(n);
    for (pos, &l) in t.order().iter().enumerate() {
        if pos > 0 {
            depths.push(t.depths()[pos - 1]);
        }
        if l as usize == i {
            order.push(l);
            order.push(l + 1);
            depths.push(2);
        } else if (l as usize) > i {
            order.push(l + 1);
        } else {
            order.push(l);
        }
    }
    FnTree::new(&order, &depths)
}

pub fn codegeneracy(t: &FnTree, j: usize) -> Result<FnTree, FoxError> {
    let n = t.points();
    if n < 2 || j > n - 1 {
        return Err(FoxError::IndexOutOfRange(j, n));
    }
    let beta = t.position_of(j as u8 + 1).expect("label present");
    let mut order = Vec::with_capacity(n - 1);
    for (pos, &l) in t.order().iter().enumerate() {
        if pos == beta {
            continue;
        }
        order.push(if (l as usize) > j + 1 { l - 1 } else { l });
    }
    let old = t.depths();
    let mut depths = Vec::with_capacity(n - 2);
    for idx in 0..n - 1 {
        if beta > 0 && idx == beta - 1 {
            // merged with the following depth by the min-rule, or dropped
            // when the removed leaf is last
            if beta < n - 1 {
                depths.push(old[beta - 1].min(old[beta]));
            }
            continue;
        }
        if idx == beta {
            continue;
        }
        depths.push(old[idx]);
    }
    FnTree::new(&order, &depths)
}

/// Composite coface d_I for an ascending multiset of indices, rightmost
/// factor applied first; d_∅ is the identity.
pub fn coface_multi(t: &FnTree, indices: &[usize]) -> Result<FnTree, FoxError> {
    debug_assert!(indices.windows(2).all(|w| w[0] <= w[1]));
    let mut cur = *t;
    for &i in indices.iter().rev() {
        cur = coface(&cur, i)?;
    }
    Ok(cur)
}

/// The union with shift I ∨ J: the unique multiset L with d_I d_J = d_L,
/// computed by the cosimplicial rewriting d_j d_i = d_i d_{j−1} for j > i.
pub fn shift_union(i_set: &[usize], j_set: &[usize]) -> Vec<usize> {
    let mut word: Vec<usize> = i_set.to_vec();
    word.extend_from_slice(j_set);
    loop {
        let mut changed = false;
        for t in 0..word.len().saturating_sub(1) {
            if word[t] > word[t + 1] {
                let (a, b) = (word[t], word[t + 1]);
                word[t] = b;
                word[t + 1] = a - 1;
                changed = true;
            }
        }
        if !changed {
            return word;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_trees;

    fn t(s: &str) -> FnTree {
        FnTree::parse(s).unwrap()
    }

    #[test]
    fn coface_worked_examples() {
        let g = t("1 3 || 2");
        assert_eq!(coface(&g, 3).unwrap(), t("1 3 4 || 2"));
        assert_eq!(coface(&g, 1).unwrap(), t("1 2 4 || 3"));
        assert_eq!(coface(&g, 0).unwrap(), t("1 2 4 || 3"));
        assert_eq!(coface(&g, 4).unwrap(), t("1 3 || 2 4"));
        assert!(coface(&g, 5).is_err());
    }

    #[test]
    fn coface_raises_degree_by_two() {
        for tr in enumerate_trees(4, 3) {
            for i in 0..=5 {
                assert_eq!(coface(&tr, i).unwrap().degree(), tr.degree() + 2);
            }
        }
    }

    #[test]
    fn codegeneracy_worked_example() {
        let g = t("3 1 | 2 || 5 | 4");
        assert_eq!(codegeneracy(&g, 1).unwrap(), t("2 1 || 4 | 3"));
        assert_eq!(codegeneracy(&t("1 2"), 0).unwrap(), t("1"));
    }

    #[test]
    fn codegeneracy_cancels_coface() {
        for tr in enumerate_trees(4, 2) {
            for j in 0..=3usize {
                // s_j d_i = id for i in {j, j+1}
                for i in [j, j + 1] {
                    let up = coface(&tr, i).unwrap();
                    assert_eq!(codegeneracy(&up, j).unwrap(), tr, "tree {tr} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn cosimplicial_identities_exhaustive() {
        for n in 2..=4usize {
            for d in 0..=2 * (n - 1) {
                for tr in enumerate_trees(n, d) {
                    // d_j d_i = d_i d_{j-1} for i < j
                    for i in 0..=n {
                        for j in i + 1..=n + 2 {
                            if j > n + 2 {
                                continue;
                            }
                            let lhs = coface(&coface(&tr, i).unwrap(), j).unwrap();
                            let rhs = coface(&coface(&tr, j - 1).unwrap(), i).unwrap();
                            assert_eq!(lhs, rhs, "tree {tr} i={i} j={j}");
                        }
                    }
                    // s_j s_i = s_{i-1} s_j for j < i
                    if n >= 3 {
                        for j in 0..n - 1 {
                            for i in j + 1..n - 1 {
                                let lhs = codegeneracy(&codegeneracy(&tr, i).unwrap(), j).unwrap();
                                let rhs = codegeneracy(&codegeneracy(&tr, j).unwrap(), i - 1).unwrap();
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                    // mixed: s_j d_i
                    for i in 0..=n + 1 {
                        for j in 0..=n {
                            let up = coface(&tr, i).unwrap();
                            let sj = codegeneracy(&up, j).unwrap();
                            if i == j || i == j + 1 {
                                assert_eq!(sj, tr);
                            } else if i < j {
                                assert_eq!(sj, coface(&codegeneracy(&tr, j - 1).unwrap(), i).unwrap());
                            } else {
                                assert_eq!(sj, coface(&codegeneracy(&tr, j).unwrap(), i - 1).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn shift_union_example() {
        assert_eq!(shift_union(&[1, 1, 4], &[1, 2]), vec![1, 1, 1, 2, 2]);
        assert_eq!(shift_union(&[], &[3, 5]), vec![3, 5]);
        assert_eq!(shift_union(&[2], &[]), vec![2]);
    }

    #[test]
    fn shift_union_matches_composition() {
        let tr = t("1 3 || 2");
        let cases: Vec<(Vec<usize>, Vec<usize>)> = vec![
            (vec![1], vec![2]),
            (vec![3], vec![1]),
            (vec![0], vec![4]),
            (vec![2, 4], vec![1]),
            (vec![1, 1], vec![2]),
        ];
        for (i_set, j_set) in cases {
            let via_union = coface_multi(&tr, &shift_union(&i_set, &j_set)).unwrap();
            let composed = coface_multi(&coface_multi(&tr, &j_set).unwrap(), &i_set).unwrap();
            assert_eq!(via_union, composed, "I={i_set:?} J={j_set:?}");
        }
    }

    #[test]
    fn coface_multi_empty_is_identity() {
        let tr = t("2 | 1");
        assert_eq!(coface_multi(&tr, &[]).unwrap(), tr);
        assert_eq!(coface_multi(&t("1 2"), &[1]).unwrap(), t("1 2 3"));
    }
}
