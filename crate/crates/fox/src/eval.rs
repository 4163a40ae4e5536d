//! Evaluation of Fox monomials in numerical clouds.
//!
//! Evaluating a variable distributes the labels of its cloud over all of the
//! variable's occurrences: every ordered partition for a 2-cloud, only
//! partitions coarser than the block structure for a 1-cloud, and literal
//! substitution for a 0-cloud. Empty blocks leave dummy symbols that the bar
//! rules then eliminate or kill.

use crate::poly::{Letter, Monomial, Polynomial};
use crate::tree::FnTree;
use crate::FoxError;
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// An ordered run of labels at depth 2 (a vertical line of points).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cloud2(pub Vec<u16>);

/// 2-clouds separated by single bars (points in a vertical plane).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cloud1(pub Vec<Cloud2>);

/// An arbitrary word fragment of constants: labels plus interior bar counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cloud0 {
    pub labels: Vec<u16>,
    pub gaps: Vec<u8>,
}

impl Cloud2 {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> BTreeSet<u16> {
        self.0.iter().copied().collect()
    }

    fn restrict(&self, keep: &[u16]) -> Cloud2 {
        Cloud2(self.0.iter().filter(|l| keep.contains(l)).copied().collect())
    }

    pub fn map<F: Fn(u16) -> u16>(&self, f: F) -> Cloud2 {
        Cloud2(self.0.iter().map(|&l| f(l)).collect())
    }
}

impl Cloud1 {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> BTreeSet<u16> {
        self.0.iter().flat_map(|c| c.0.iter().copied()).collect()
    }

    pub fn map<F: Fn(u16) -> u16 + Copy>(&self, f: F) -> Cloud1 {
        Cloud1(self.0.iter().map(|c| c.map(f)).collect())
    }

    fn word(&self) -> (Vec<Letter>, Vec<u8>) {
        let mut letters = Vec::new();
        let mut gaps = Vec::new();
        for (i, c) in self.0.iter().enumerate() {
            for (j, &l) in c.0.iter().enumerate() {
                if i > 0 && j == 0 {
                    gaps.push(1);
                } else if j > 0 {
                    gaps.push(0);
                }
                letters.push(Letter::Const(l));
            }
        }
        (letters, gaps)
    }
}

impl Cloud0 {
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn support(&self) -> BTreeSet<u16> {
        self.labels.iter().copied().collect()
    }

    pub fn map<F: Fn(u16) -> u16>(&self, f: F) -> Cloud0 {
        Cloud0 {
            labels: self.labels.iter().map(|&l| f(l)).collect(),
            gaps: self.gaps.clone(),
        }
    }
}

/// Numerical clouds assigned to the variables of a monomial.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    pub x: BTreeMap<u8, Cloud2>,
    pub y: BTreeMap<u8, Cloud1>,
    pub z: BTreeMap<u8, Cloud0>,
}

impl Assignment {
    pub fn support(&self) -> BTreeSet<u16> {
        let mut s = BTreeSet::new();
        for c in self.x.values() {
            s.extend(c.support());
        }
        for c in self.y.values() {
            s.extend(c.support());
        }
        for c in self.z.values() {
            s.extend(c.support());
        }
        s
    }

    /// Pairwise disjointness of the assigned cloud supports.
    pub fn check_disjoint(&self) -> Result<(), FoxError> {
        let mut seen = BTreeSet::new();
        let supports = self
            .x
            .values()
            .map(Cloud2::support)
            .chain(self.y.values().map(Cloud1::support))
            .chain(self.z.values().map(Cloud0::support));
        for sup in supports {
            for l in sup {
                if !seen.insert(l) {
                    return Err(FoxError::SupportOverlap(l));
                }
            }
        }
        Ok(())
    }
}

/// The upper differential of a numerical 2-cloud: the sum of the ordered
/// splittings into two nonempty parts, joined by a single bar. On 1-clouds
/// it extends by the Leibniz rule. The empty summation gives zero.
pub fn upper_diff_cloud2(b: &Cloud2) -> Vec<Cloud1> {
    let n = b.0.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for mask in 1..(1u32 << n) - 1 {
        let mut u = Vec::new();
        let mut v = Vec::new();
        for (i, &l) in b.0.iter().enumerate() {
            if mask >> i & 1 == 1 {
                u.push(l);
            } else {
                v.push(l);
            }
        }
        out.push(Cloud1(vec![Cloud2(u), Cloud2(v)]));
    }
    out
}

/// Leibniz extension of the upper differential to a 1-cloud.
pub fn upper_diff_cloud1(a: &Cloud1) -> Vec<Cloud1> {
    let mut out = Vec::new();
    for (i, b) in a.0.iter().enumerate() {
        for split in upper_diff_cloud2(b) {
            let mut clouds = Vec::with_capacity(a.0.len() + 1);
            clouds.extend_from_slice(&a.0[..i]);
            clouds.extend(split.0);
            clouds.extend_from_slice(&a.0[i + 1..]);
            out.push(Cloud1(clouds));
        }
    }
    out
}

/// Upper differential as a polynomial operation, for numerical inputs.
pub fn upper_diff(m: &Monomial) -> Result<Polynomial, FoxError> {
    let cloud = monomial_as_cloud1(m)?;
    Ok(upper_diff_cloud1(&cloud)
        .into_iter()
        .map(|c| {
            let (letters, gaps) = c.word();
            Monomial::from_parts(letters, gaps)
        })
        .collect())
}

/// Read a numerical monomial without double bars as a 1-cloud.
pub fn monomial_as_cloud1(m: &Monomial) -> Result<Cloud1, FoxError> {
    let mut clouds = vec![];
    let mut cur = Vec::new();
    for (pos, l) in m.letters().iter().enumerate() {
        let Letter::Const(c) = l else {
            return Err(FoxError::Invalid("not a numerical monomial".into()));
        };
        if pos > 0 {
            match m.gap_before(pos) {
                0 => {}
                1 => clouds.push(Cloud2(std::mem::take(&mut cur))),
                _ => return Err(FoxError::Invalid("0-cloud is not a 1-cloud".into())),
            }
        }
        cur.push(*c);
    }
    if !cur.is_empty() {
        clouds.push(Cloud2(cur));
    }
    Ok(Cloud1(clouds))
}

/// Positions of the occurrences of a letter.
fn occurrences(m: &Monomial, want: impl Fn(&Letter) -> bool) -> Vec<usize> {
    m.letters()
        .iter()
        .enumerate()
        .filter_map(|(i, l)| if want(l) { Some(i) } else { None })
        .collect()
}

/// Splice several replacement words at distinct positions in one pass.
fn splice_many(m: &Monomial, repl: &[(usize, Vec<Letter>, Vec<u8>)]) -> Monomial {
    // apply right to left so positions stay valid
    let mut sorted: Vec<&(usize, Vec<Letter>, Vec<u8>)> = repl.iter().collect();
    sorted.sort_by_key(|r| std::cmp::Reverse(r.0));
    let mut out = m.clone();
    for (pos, letters, gaps) in sorted {
        out = out.splice(*pos, letters, gaps);
    }
    out
}

/// X-evaluation: distribute the labels of T over the occurrences of Xᵢ in
/// every possible way. Pre-simplification this yields d^|T| words; dummy
/// rules then drop or clean them.
pub fn eval_x(m: &Monomial, alpha: u8, t: &Cloud2) -> Result<Vec<Monomial>, FoxError> {
    let occ = occurrences(m, |l| *l == Letter::X(alpha));
    if occ.is_empty() {
        return Err(FoxError::MissingVariable(format!("X{alpha}")));
    }
    let sup = m.support();
    if let Some(l) = t.0.iter().find(|l| sup.contains(l)) {
        return Err(FoxError::SupportOverlap(*l));
    }
    let d = occ.len();
    let n = t.0.len();
    let mut out = Vec::new();
    let total = (d as u64).pow(n as u32);
    for code in 0..total {
        let mut blocks: Vec<Vec<u16>> = vec![Vec::new(); d];
        let mut c = code;
        for &l in &t.0 {
            blocks[(c % d as u64) as usize].push(l);
            c /= d as u64;
        }
        let repl: Vec<(usize, Vec<Letter>, Vec<u8>)> = occ
            .iter()
            .zip(&blocks)
            .map(|(&pos, block)| {
                if block.is_empty() {
                    (pos, vec![Letter::EmptyX], vec![])
                } else {
                    let letters: Vec<Letter> = block.iter().map(|&l| Letter::Const(l)).collect();
                    let gaps = vec![0u8; letters.len() - 1];
                    (pos, letters, gaps)
                }
            })
            .collect();
        if let Some(w) = splice_many(m, &repl).simplify_dummies() {
            out.push(w);
        }
    }
    Ok(out)
}

/// Y-evaluation: distribute the 2-clouds of S over the occurrences of Yⱼ
/// and ∂Yⱼ — only partitions coarser than S's block structure are allowed.
/// A derived occurrence receives the upper differential of its block.
pub fn eval_y(m: &Monomial, beta: u8, s: &Cloud1) -> Result<Vec<Monomial>, FoxError> {
    let occ = occurrences(m, |l| matches!(l, Letter::Y(b) | Letter::DerY(b) if *b == beta));
    if occ.is_empty() {
        return Err(FoxError::MissingVariable(format!("Y{beta}")));
    }
    let derived: Vec<usize> = occ
        .iter()
        .copied()
        .filter(|&p| matches!(m.letters()[p], Letter::DerY(_)))
        .collect();
    if derived.len() > 1 {
        return Err(FoxError::InvalidMonomial(6, "more than one derived occurrence".into()));
    }
    let sup = m.support();
    if let Some(l) = s.support().iter().find(|l| sup.contains(l)) {
        return Err(FoxError::SupportOverlap(*l));
    }
    let d = occ.len();
    let n = s.0.len();
    let mut out = Vec::new();
    let total = (d as u64).pow(n as u32);
    for code in 0..total {
        let mut blocks: Vec<Cloud1> = vec![Cloud1::default(); d];
        let mut c = code;
        for cloud in &s.0 {
            blocks[(c % d as u64) as usize].0.push(cloud.clone());
            c /= d as u64;
        }
        // expansions per occurrence; derived occurrences are bilinear sums
        let mut choices: Vec<Vec<(Vec<Letter>, Vec<u8>)>> = Vec::with_capacity(d);
        let mut dead = false;
        for (&pos, block) in occ.iter().zip(&blocks) {
            let is_derived = matches!(m.letters()[pos], Letter::DerY(_));
            if block.is_empty() {
                choices.push(vec![(vec![Letter::EmptyY], vec![])]);
            } else if is_derived {
                let terms = upper_diff_cloud1(block);
                if terms.is_empty() {
                    dead = true;
                    break;
                }
                choices.push(terms.iter().map(Cloud1::word).collect());
            } else {
                choices.push(vec![block.word()]);
            }
        }
        if dead {
            continue;
        }
        let mut idx = vec![0usize; d];
        loop {
            let repl: Vec<(usize, Vec<Letter>, Vec<u8>)> = occ
                .iter()
                .enumerate()
                .map(|(t, &pos)| {
                    let (letters, gaps) = &choices[t][idx[t]];
                    (pos, letters.clone(), gaps.clone())
                })
                .collect();
            if let Some(w) = splice_many(m, &repl).simplify_dummies() {
                out.push(w);
            }
            // advance the mixed-radix counter over bilinear choices
            let mut t = 0;
            loop {
                if t == d {
                    break;
                }
                idx[t] += 1;
                if idx[t] < choices[t].len() {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
            if t == d {
                break;
            }
        }
    }
    Ok(out)
}

/// Z-evaluation: a 0-cloud variable occurs at most once and is substituted
/// literally; an empty cloud removes the symbol, ends counting as 3 bars.
pub fn eval_z(m: &Monomial, kappa: u8, z: &Cloud0) -> Result<Vec<Monomial>, FoxError> {
    let occ = occurrences(m, |l| *l == Letter::Z(kappa));
    if occ.is_empty() {
        return Err(FoxError::MissingVariable(format!("Z{kappa}")));
    }
    if occ.len() > 1 {
        return Err(FoxError::InvalidMonomial(5, format!("Z{kappa} occurs twice")));
    }
    let sup = m.support();
    if let Some(l) = z.labels.iter().find(|l| sup.contains(l)) {
        return Err(FoxError::SupportOverlap(*l));
    }
    let letters: Vec<Letter> = z.labels.iter().map(|&l| Letter::Const(l)).collect();
    Ok(vec![m.splice(occ[0], &letters, &z.gaps)])
}

/// Total evaluation: successive X, then Y, then Z evaluations in ascending
/// variable order. Monomials sharing a constant with the assignment
/// evaluate to zero.
pub fn eval_total(p: &Polynomial, asg: &Assignment) -> Result<Polynomial, FoxError> {
    asg.check_disjoint()?;
    let mut out = Polynomial::zero();
    for m in p.iter() {
        let sup = m.support();
        if asg.support().iter().any(|l| sup.contains(l)) {
            continue;
        }
        let mut words = vec![m.clone()];
        for (&alpha, cloud) in &asg.x {
            let mut next = Vec::new();
            for w in &words {
                next.extend(eval_x(w, alpha, cloud)?);
            }
            words = next;
        }
        for (&beta, cloud) in &asg.y {
            let mut next = Vec::new();
            for w in &words {
                next.extend(eval_y(w, beta, cloud)?);
            }
            words = next;
        }
        for (&kappa, cloud) in &asg.z {
            let mut next = Vec::new();
            for w in &words {
                next.extend(eval_z(w, kappa, cloud)?);
            }
            words = next;
        }
        for w in words {
            out.toggle(w);
        }
    }
    Ok(out)
}

/// Interpret a fully numerical monomial whose support is {1..n} as a tree.
pub fn monomial_to_tree(m: &Monomial) -> Result<FnTree, FoxError> {
    let n = m.len();
    let mut order = Vec::with_capacity(n);
    let mut depths = Vec::with_capacity(n.saturating_sub(1));
    for (pos, l) in m.letters().iter().enumerate() {
        let Letter::Const(c) = l else {
            return Err(FoxError::Invalid(format!("non-numerical monomial: {m}")));
        };
        if *c as usize > n || *c == 0 {
            return Err(FoxError::Invalid(format!("support of {m} is not 1..{n}")));
        }
        if pos > 0 {
            let g = m.gap_before(pos);
            if g > 2 {
                return Err(FoxError::Invalid("interior gap over 2".into()));
            }
            depths.push(2 - g);
        }
        order.push(*c as u8);
    }
    FnTree::new(&order, &depths)
}

/// Turn an evaluated polynomial into a chain of trees on n points.
pub fn polynomial_to_chain(p: &Polynomial, n: usize) -> Result<crate::FnChain, FoxError> {
    let mut chain = crate::FnChain::new(n);
    for m in p.iter() {
        chain.toggle(monomial_to_tree(m)?)?;
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    fn poly(ss: &[&str]) -> Polynomial {
        ss.iter().map(|s| m(s)).collect()
    }

    #[test]
    fn x_evaluation_worked_example() {
        // ev^{X1}_{12}(Y1 | X1 5 | Y2 || X1)
        let word = m("Y1 | X1 5 | Y2 || X1");
        let got: Polynomial = eval_x(&word, 1, &Cloud2(vec![1, 2])).unwrap().into_iter().collect();
        let want = poly(&["Y1 | 5 | Y2 || 1 2", "Y1 | 1 5 | Y2 || 2", "Y1 | 2 5 | Y2 || 1"]);
        assert_eq!(got, want);
    }

    #[test]
    fn x_evaluation_block_count() {
        // d occurrences, |T| labels: d^|T| words before simplification
        let word = m("X1 1 | X1 || X1");
        let t = Cloud2(vec![5, 6, 7]);
        let raw = eval_x(&word, 1, &t).unwrap();
        assert!(raw.len() <= 27);
        // distributions sending nothing to a bar-guarded slot die; count a
        // couple of survivors explicitly
        let got: Polynomial = raw.into_iter().collect();
        assert!(got.iter().all(|w| w.validate().is_ok()));
    }

    #[test]
    fn x_single_occurrence_is_substitution() {
        let word = m("1 | X1 | 2");
        let got: Polynomial = eval_x(&word, 1, &Cloud2(vec![7, 9])).unwrap().into_iter().collect();
        assert_eq!(got, poly(&["1 | 7 9 | 2"]));
    }

    #[test]
    fn x_support_overlap_is_an_error() {
        let word = m("1 | X1");
        assert_eq!(
            eval_x(&word, 1, &Cloud2(vec![1])),
            Err(FoxError::SupportOverlap(1))
        );
    }

    #[test]
    fn y_evaluation_worked_example() {
        // ev^{Y2}_{89|4}(X1 X2 || Y2 || dY2 | X1 2 X2 | Y2) — five terms
        let word = m("X1 X2 || Y2 || dY2 | X1 2 X2 | Y2");
        let s = Cloud1(vec![Cloud2(vec![8, 9]), Cloud2(vec![4])]);
        let got: Polynomial = eval_y(&word, 2, &s).unwrap().into_iter().collect();
        let want = poly(&[
            "X1 X2 || 4 || 8 | 9 | X1 2 X2",
            "X1 X2 || 4 || 9 | 8 | X1 2 X2",
            "X1 X2 || 4 || X1 2 X2 | 8 9",
            "X1 X2 || 8 9 || X1 2 X2 | 4",
            "X1 X2 || 8 9 | 4 || X1 X2",
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn y_plain_single_occurrence() {
        let word = m("1 | Y1 | 2");
        let s = Cloud1(vec![Cloud2(vec![5]), Cloud2(vec![6])]);
        let got: Polynomial = eval_y(&word, 1, &s).unwrap().into_iter().collect();
        assert_eq!(got, poly(&["1 | 5 | 6 | 2"]));
    }

    #[test]
    fn upper_differential() {
        let got: Polynomial = upper_diff(&m("8 9")).unwrap();
        assert_eq!(got, poly(&["8 | 9", "9 | 8"]));
        assert!(upper_diff(&m("7")).unwrap().is_zero());
        let got2: Polynomial = upper_diff(&m("1 2 | 3")).unwrap();
        assert_eq!(got2, poly(&["1 | 2 | 3", "2 | 1 | 3"]));
    }

    #[test]
    fn total_evaluation_constants_only() {
        let p = poly(&["1 || 2"]);
        let got = eval_total(&p, &Assignment::default()).unwrap();
        assert_eq!(got, p);
    }

    #[test]
    fn total_evaluation_kills_overlapping_monomials() {
        let p = poly(&["1 || Z1"]);
        let mut asg = Assignment::default();
        asg.z.insert(1, Cloud0 { labels: vec![1], gaps: vec![] });
        assert!(eval_total(&p, &asg).unwrap().is_zero());
    }

    #[test]
    fn evaluations_in_distinct_variables_commute() {
        let word = m("X1 1 | Y1 | X1 || Y1");
        let t = Cloud2(vec![7, 8]);
        let s = Cloud1(vec![Cloud2(vec![5, 6])]);
        let xy: Polynomial = eval_x(&word, 1, &t)
            .unwrap()
            .iter()
            .flat_map(|w| eval_y(w, 1, &s).unwrap())
            .collect();
        let yx: Polynomial = eval_y(&word, 1, &s)
            .unwrap()
            .iter()
            .flat_map(|w| eval_x(w, 1, &t).unwrap())
            .collect();
        assert_eq!(xy, yx);
    }

    #[test]
    fn tree_conversion() {
        let t = monomial_to_tree(&m("1 3 || 2 | 4")).unwrap();
        assert_eq!(t, FnTree::parse("1 3 || 2 | 4").unwrap());
        assert!(monomial_to_tree(&m("1 3")).is_err()); // support not 1..2
    }
}
