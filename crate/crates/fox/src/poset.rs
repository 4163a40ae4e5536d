//! The Fox-Neuwirth partial order (reverse exit poset).
//!
//! Trees of larger degree are larger; the corollas are the minimal elements.
//! The boundary of a cell is supported on trees below it.

use crate::tree::FnTree;

/// s ≤ t iff for every pair α before β at depth r in t, the pair sits in s
/// either in the same order at depth ≤ r, or in the opposite order at depth
/// strictly less than r.
pub fn poset_leq(s: &FnTree, t: &FnTree) -> bool {
    assert_eq!(s.points(), t.points(), "poset compares equal point counts");
    let n = t.points();
    for a in 0..n {
        for b in a + 1..n {
            let alpha = t.order()[a];
            let beta = t.order()[b];
            let r = t.depths()[a..b].iter().copied().min().unwrap();
            let pa = s.position_of(alpha).unwrap();
            let pb = s.position_of(beta).unwrap();
            let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
            let rs = s.depths()[lo..hi].iter().copied().min().unwrap();
            let ok = if pa < pb { rs <= r } else { rs < r };
            if !ok {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_trees;

    fn t(s: &str) -> FnTree {
        FnTree::parse(s).unwrap()
    }

    #[test]
    fn orientation_pinned_by_boundary_terms() {
        assert!(poset_leq(&t("1 | 2"), &t("1 2")));
        assert!(!poset_leq(&t("1 2"), &t("1 | 2")));
        assert!(poset_leq(&t("2 | 1"), &t("1 2")));
        assert!(poset_leq(&t("1 || 2"), &t("1 | 2")));
        assert!(poset_leq(&t("2 || 1"), &t("1 | 2")));
        assert!(!poset_leq(&t("2 1"), &t("1 2")));
    }

    #[test]
    fn partial_order_axioms_exhaustive_n3() {
        let mut all = Vec::new();
        for d in 0..=4 {
            all.extend(enumerate_trees(3, d));
        }
        for a in &all {
            assert!(poset_leq(a, a));
            for b in &all {
                if poset_leq(a, b) && poset_leq(b, a) {
                    assert_eq!(a, b, "antisymmetry: {a} vs {b}");
                }
                for c in &all {
                    if poset_leq(a, b) && poset_leq(b, c) {
                        assert!(poset_leq(a, c), "transitivity: {a} <= {b} <= {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn degree_is_monotone() {
        let mut all = Vec::new();
        for d in 0..=4 {
            all.extend(enumerate_trees(3, d));
        }
        for a in &all {
            for b in &all {
                if poset_leq(a, b) {
                    assert!(a.degree() <= b.degree());
                }
            }
        }
    }
}
