//! Fox-Neuwirth trees: a permutation of {1..n} plus n−1 depth indices.
//!
//! Bar notation: the number of bars between two adjacent labels is 2 minus
//! the depth index, so `1 3 || 2 | 4` has order [1,3,2,4] and depths [2,0,1].
//! Trees are immutable 32-byte values, cheap to copy, hash and compare.

use crate::FoxError;
use gf2::PermTables;

/// Hard capacity of the inline representation. Production bigradings stay
/// well below this.
pub const MAX_POINTS: usize = 16;

/// One Σₙ-orbit of generators: a sequence over {0,1,2} summing to the degree.
pub type DepthVector = Vec<u8>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FnTree {
    n: u8,
    order: [u8; MAX_POINTS],
    depths: [u8; MAX_POINTS - 1],
}

impl FnTree {
    pub fn new(order: &[u8], depths: &[u8]) -> Result<Self, FoxError> {
        let n = order.len();
        if n == 0 || n > MAX_POINTS {
            return Err(FoxError::TooManyPoints(n));
        }
        if depths.len() != n - 1 {
            return Err(FoxError::Parse(format!(
                "{} labels need {} depth indices, got {}",
                n,
                n - 1,
                depths.len()
            )));
        }
        let mut seen = [false; MAX_POINTS];
        for &l in order {
            if l < 1 || l as usize > n || seen[l as usize - 1] {
                return Err(FoxError::Parse(format!("not a permutation of 1..={n}")));
            }
            seen[l as usize - 1] = true;
        }
        if depths.iter().any(|&d| d > 2) {
            return Err(FoxError::Parse("depth index out of {0,1,2}".into()));
        }
        let mut t = FnTree {
            n: n as u8,
            order: [0; MAX_POINTS],
            depths: [0; MAX_POINTS - 1],
        };
        t.order[..n].copy_from_slice(order);
        t.depths[..n - 1].copy_from_slice(depths);
        Ok(t)
    }

    /// The corolla: identity labels, all depths zero.
    pub fn corolla(n: usize) -> Self {
        let order: Vec<u8> = (1..=n as u8).collect();
        FnTree::new(&order, &vec![0; n - 1]).expect("corolla is valid")
    }

    pub fn identity(n: usize, depths: &[u8]) -> Result<Self, FoxError> {
        let order: Vec<u8> = (1..=n as u8).collect();
        FnTree::new(&order, depths)
    }

    pub fn points(&self) -> usize {
        self.n as usize
    }

    pub fn order(&self) -> &[u8] {
        &self.order[..self.n as usize]
    }

    pub fn depths(&self) -> &[u8] {
        &self.depths[..self.n as usize - 1]
    }

    pub fn degree(&self) -> usize {
        self.depths().iter().map(|&d| d as usize).sum()
    }

    /// Does any adjacent pair sit at depth 1?
    pub fn has_depth_one(&self) -> bool {
        self.depths().contains(&1)
    }

    /// 0-based position of a label.
    pub fn position_of(&self, label: u8) -> Option<usize> {
        self.order().iter().position(|&l| l == label)
    }

    /// Depth between two labels: the minimum of the depth indices between
    /// their positions (the min-rule).
    pub fn pair_depth(&self, a: u8, b: u8) -> Option<u8> {
        let pa = self.position_of(a)?;
        let pb = self.position_of(b)?;
        if pa == pb {
            return None;
        }
        let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
        Some(self.depths()[lo..hi].iter().copied().min().unwrap())
    }

    /// Apply a relabeling: each leaf label ℓ becomes `map[ℓ-1]`.
    pub fn relabel(&self, map: &[u8]) -> Result<Self, FoxError> {
        let n = self.n as usize;
        if map.len() != n {
            return Err(FoxError::PointMismatch(map.len(), n));
        }
        let mut seen = [false; MAX_POINTS];
        for &v in map {
            if v < 1 || v as usize > n || seen[v as usize - 1] {
                return Err(FoxError::NonInjective);
            }
            seen[v as usize - 1] = true;
        }
        let order: Vec<u8> = self.order().iter().map(|&l| map[l as usize - 1]).collect();
        FnTree::new(&order, self.depths())
    }

    pub fn parse(text: &str) -> Result<Self, FoxError> {
        let mut labels: Vec<u8> = Vec::new();
        let mut depths: Vec<u8> = Vec::new();
        let mut bars_pending: Option<u8> = None; // None until after first label
        let mut chars = text.chars().peekable();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if c == '|' {
                if labels.is_empty() {
                    return Err(FoxError::Parse("leading bar".into()));
                }
                let b = bars_pending.get_or_insert(0);
                *b += 1;
                if *b > 2 {
                    return Err(FoxError::Parse("more than two consecutive bars".into()));
                }
                chars.next();
            } else if c.is_ascii_digit() {
                let mut v: usize = 0;
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        v = v * 10 + d.to_digit(10).unwrap() as usize;
                        chars.next();
                    } else {
                        break;
                    }
                }
                if v == 0 || v > MAX_POINTS {
                    return Err(FoxError::Parse(format!("label {v} out of range")));
                }
                if !labels.is_empty() {
                    depths.push(2 - bars_pending.unwrap_or(0));
                }
                bars_pending = None;
                labels.push(v as u8);
            } else {
                return Err(FoxError::Parse(format!("unexpected character {c:?}")));
            }
        }
        if labels.is_empty() {
            return Err(FoxError::Parse("empty tree".into()));
        }
        if bars_pending.is_some() {
            return Err(FoxError::Parse("trailing bar".into()));
        }
        FnTree::new(&labels, &depths)
    }
}

impl std::fmt::Display for FnTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, &l) in self.order().iter().enumerate() {
            if i > 0 {
                match self.depths()[i - 1] {
                    2 => write!(f, " ")?,
                    1 => write!(f, " | ")?,
                    _ => write!(f, " || ")?,
                }
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for FnTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// Coefficient of x^d in (1+x+x²)^m, the size of the depth-vector basis.
pub fn trinomial(m: usize, d: usize) -> usize {
    let mut coeffs = vec![1u128];
    for _ in 0..m {
        let mut next = vec![0u128; coeffs.len() + 2];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c;
            next[i + 2] += c;
        }
        coeffs = next;
    }
    coeffs.get(d).copied().unwrap_or(0) as usize
}

/// All vectors of length k−1 over {0,1,2} summing to d, ascending
/// lexicographic. Out-of-range degrees give the empty list.
pub fn enumerate_depth_vectors(d: usize, k: usize) -> Vec<DepthVector> {
    assert!(k >= 1, "need at least one point");
    let len = k - 1;
    if d > 2 * len {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(trinomial(len, d));
    let mut cur = vec![0u8; len];
    fn rec(cur: &mut Vec<u8>, pos: usize, remaining: usize, out: &mut Vec<DepthVector>) {
        let slots = cur.len() - pos;
        if remaining > 2 * slots {
            return;
        }
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=2u8.min(remaining as u8) {
            cur[pos] = v;
            rec(cur, pos + 1, remaining - v as usize, out);
        }
        cur[pos] = 0;
    }
    rec(&mut cur, 0, d, &mut out);
    out
}

/// The full tree basis of FN(k, d): depth vector major in the canonical
/// ascending order, permutation minor in reverse-lexicographic order with
/// the identity last.
pub fn enumerate_trees(k: usize, d: usize) -> Vec<FnTree> {
    let tables = PermTables::new(k).expect("k within table range");
    let mut out = Vec::new();
    for dv in enumerate_depth_vectors(d, k) {
        for perm in tables.perms() {
            let order: Vec<u8> = perm.one_based().iter().map(|&v| v as u8).collect();
            out.push(FnTree::new(&order, &dv).expect("enumerated tree is valid"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_bar_notation() {
        let t = FnTree::parse("1 3 || 2 | 4").unwrap();
        assert_eq!(t.order(), &[1, 3, 2, 4]);
        assert_eq!(t.depths(), &[2, 0, 1]);
        assert_eq!(t.degree(), 3);
        let one = FnTree::parse("1").unwrap();
        assert_eq!(one.points(), 1);
        assert_eq!(one.depths(), &[] as &[u8]);
    }

    #[test]
    fn format_matches_convention() {
        let t = FnTree::new(&[1, 6, 5, 4, 2, 3], &[2, 2, 2, 0, 2]).unwrap();
        assert_eq!(t.to_string(), "1 6 5 4 || 2 3");
    }

    #[test]
    fn parse_format_roundtrip_small() {
        for n in 1..=5 {
            for d in 0..=2 * (n - 1) {
                for t in enumerate_trees(n, d) {
                    assert_eq!(FnTree::parse(&t.to_string()).unwrap(), t);
                }
            }
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(FnTree::parse("| 1 2").is_err());
        assert!(FnTree::parse("1 2 |").is_err());
        assert!(FnTree::parse("1 ||| 2").is_err());
        assert!(FnTree::parse("1 1").is_err());
        assert!(FnTree::parse("1 3").is_err());
        assert!(FnTree::parse("").is_err());
    }

    #[test]
    fn depth_vector_counts_match_trinomials() {
        for k in 1..=9usize {
            for d in 0..=2 * (k - 1) + 1 {
                assert_eq!(
                    enumerate_depth_vectors(d, k).len(),
                    trinomial(k - 1, d),
                    "k={k} d={d}"
                );
            }
        }
        // the production matrix shape comes from these two counts
        assert_eq!(enumerate_depth_vectors(10, 8).len(), 161);
        assert_eq!(enumerate_depth_vectors(9, 8).len(), 266);
        assert_eq!(enumerate_depth_vectors(9, 7).len(), 50);
    }

    #[test]
    fn depth_vectors_are_lexicographically_sorted() {
        let vs = enumerate_depth_vectors(5, 5);
        let mut sorted = vs.clone();
        sorted.sort();
        assert_eq!(vs, sorted);
        assert_eq!(enumerate_depth_vectors(0, 4), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn tree_enumeration_size() {
        // reverse-lexicographic permutation order, identity last
        assert_eq!(enumerate_trees(2, 2), vec![
            FnTree::parse("2 1").unwrap(),
            FnTree::parse("1 2").unwrap()
        ]);
        assert_eq!(enumerate_trees(2, 1).len(), 2);
        assert_eq!(enumerate_trees(6, 8).len(), 720 * trinomial(5, 8));
    }

    #[test]
    fn relabel_is_group_action() {
        let t = FnTree::parse("1 3 || 2 | 4").unwrap();
        let id: Vec<u8> = vec![1, 2, 3, 4];
        assert_eq!(t.relabel(&id).unwrap(), t);
        // (1 3)(2 4)
        let m: Vec<u8> = vec![3, 4, 1, 2];
        assert_eq!(t.relabel(&m).unwrap(), FnTree::parse("3 1 || 4 | 2").unwrap());
        // composition law on all trees with n <= 4
        for n in 1..=4usize {
            let tabs = PermTables::new(n).unwrap();
            for t in enumerate_trees(n, n - 1) {
                for p in tabs.perms().iter().take(8) {
                    for q in tabs.perms().iter().take(8) {
                        let pm: Vec<u8> = (1..=n as u8).map(|l| p.apply(l as usize - 1) as u8 + 1).collect();
                        let qm: Vec<u8> = (1..=n as u8).map(|l| q.apply(l as usize - 1) as u8 + 1).collect();
                        let pq: Vec<u8> = (1..=n as u8)
                            .map(|l| p.apply(q.apply(l as usize - 1)) as u8 + 1)
                            .collect();
                        assert_eq!(
                            t.relabel(&qm).unwrap().relabel(&pm).unwrap(),
                            t.relabel(&pq).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pair_depth_uses_min_rule() {
        let t = FnTree::parse("3 1 | 2 || 5 | 4").unwrap();
        assert_eq!(t.pair_depth(3, 1), Some(2));
        assert_eq!(t.pair_depth(3, 2), Some(1));
        assert_eq!(t.pair_depth(1, 4), Some(0));
        assert_eq!(t.pair_depth(5, 4), Some(1));
    }
}
