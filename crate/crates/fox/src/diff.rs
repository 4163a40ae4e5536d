//! The truncated multicomplex differentials D₀, D₁, D₂, D₃.
//!
//! D₀ is the cellular boundary. D₁ doubles one point horizontally, D₂ a pair
//! and D₃ a triple of points sharing coordinates; the spectator points
//! distribute according to fixed polynomial cores evaluated in the clouds of
//! the input tree. Pairs at depth 0 contribute nothing. When the numeric
//! order of the doubled labels disagrees with their order in the tree, the
//! core is computed on a relabeled tree and transported back.

use crate::chain::FnChain;
use crate::eval::{
    eval_total, polynomial_to_chain, upper_diff_cloud1, Assignment, Cloud0, Cloud1, Cloud2,
};
use crate::poly::{Letter, Monomial, Polynomial};
use crate::tree::FnTree;
use crate::FoxError;

/// A multiset of at most three coface indices, the label set of one
/// differential contribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffIndex(pub Vec<usize>);

impl DiffIndex {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        DiffIndex(indices)
    }
}

// ---------------------------------------------------------------------------
// D0: the cellular boundary.

/// Split a tree into its 0-cloud blocks, each block a 1-cloud.
fn zero_blocks(t: &FnTree) -> Vec<Cloud1> {
    let mut blocks = Vec::new();
    let mut cur = Cloud1::default();
    let mut run = Vec::new();
    for (pos, &l) in t.order().iter().enumerate() {
        if pos > 0 {
            match t.depths()[pos - 1] {
                2 => {}
                1 => cur.0.push(Cloud2(std::mem::take(&mut run))),
                _ => {
                    cur.0.push(Cloud2(std::mem::take(&mut run)));
                    blocks.push(std::mem::take(&mut cur));
                }
            }
        }
        run.push(l as u16);
    }
    cur.0.push(Cloud2(run));
    blocks.push(cur);
    blocks
}

fn assemble_blocks(blocks: &[Cloud1]) -> FnTree {
    let mut order = Vec::new();
    let mut depths = Vec::new();
    for (bi, block) in blocks.iter().enumerate() {
        for (ci, cloud) in block.0.iter().enumerate() {
            for (li, &l) in cloud.0.iter().enumerate() {
                if !(bi == 0 && ci == 0 && li == 0) {
                    depths.push(if li > 0 {
                        2
                    } else if ci > 0 {
                        1
                    } else {
                        0
                    });
                }
                order.push(l as u8);
            }
        }
    }
    FnTree::new(&order, &depths).expect("assembled tree is valid")
}

/// Boundary terms of a single 0-cloud block: the sum over ordered pairs of
/// complementary nonempty subsets of its 2-clouds, joined at depth 0, plus
/// the upper differential splitting one 2-cloud at depth 1.
fn d0_block(block: &Cloud1) -> Vec<Vec<Cloud1>> {
    let q = block.0.len();
    let mut out = Vec::new();
    // the coarser-partition splittings at depth 0
    for mask in 1..(1u32 << q).wrapping_sub(1) {
        let mut u = Cloud1::default();
        let mut v = Cloud1::default();
        for (i, c) in block.0.iter().enumerate() {
            if mask >> i & 1 == 1 {
                u.0.push(c.clone());
            } else {
                v.0.push(c.clone());
            }
        }
        out.push(vec![u, v]);
    }
    // the upper differential inside the block
    for split in upper_diff_cloud1(block) {
        out.push(vec![split]);
    }
    out
}

/// Raw boundary terms of one tree, duplicates possible across blocks.
pub fn d0_tree(t: &FnTree) -> Vec<FnTree> {
    let blocks = zero_blocks(t);
    let mut out = Vec::new();
    for (bi, block) in blocks.iter().enumerate() {
        if block.0.len() == 1 && block.0[0].0.len() == 1 {
            continue;
        }
        for repl in d0_block(block) {
            let mut new_blocks: Vec<Cloud1> = Vec::with_capacity(blocks.len() + 1);
            new_blocks.extend_from_slice(&blocks[..bi]);
            new_blocks.extend(repl);
            new_blocks.extend_from_slice(&blocks[bi + 1..]);
            out.push(assemble_blocks(&new_blocks));
        }
    }
    out
}

pub fn d0(c: &FnChain) -> FnChain {
    let mut out = FnChain::new(c.points());
    for t in c.iter() {
        for term in d0_tree(t) {
            out.toggle(term).expect("same point count");
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Core templates. Variables are numbered as in the defining formulas.

struct CoreBuilder {
    letters: Vec<Letter>,
    gaps: Vec<u8>,
    pending: u8,
}

impl CoreBuilder {
    fn new() -> Self {
        CoreBuilder {
            letters: Vec::new(),
            gaps: Vec::new(),
            pending: 0,
        }
    }

    fn push(&mut self, l: Letter) -> &mut Self {
        if !self.letters.is_empty() {
            self.gaps.push(self.pending);
        }
        self.pending = 0;
        self.letters.push(l);
        self
    }

    fn z(&mut self, i: u8) -> &mut Self {
        self.push(Letter::Z(i))
    }
    fn y(&mut self, i: u8) -> &mut Self {
        self.push(Letter::Y(i))
    }
    fn x(&mut self, i: u8) -> &mut Self {
        self.push(Letter::X(i))
    }
    fn c(&mut self, v: u16) -> &mut Self {
        self.push(Letter::Const(v))
    }
    fn bar(&mut self) -> &mut Self {
        self.pending += 1;
        self
    }
    fn dbar(&mut self) -> &mut Self {
        self.pending += 2;
        self
    }
    fn xs(&mut self, ids: &[u8]) -> &mut Self {
        for &i in ids {
            self.x(i);
        }
        self
    }

    fn finish(&mut self) -> Monomial {
        Monomial::from_parts(std::mem::take(&mut self.letters), std::mem::take(&mut self.gaps))
    }
}

/// Z₁ || Y₁ | X₁ i X₂ | Y₂ || Y₁ | X₁ (i+1) X₂ | Y₂ || Z₂
fn d1_core(i: u16) -> Polynomial {
    let mut b = CoreBuilder::new();
    b.z(1).dbar().y(1).bar().x(1).c(i).x(2).bar().y(2);
    b.dbar().y(1).bar().x(1).c(i + 1).x(2).bar().y(2).dbar().z(2);
    [b.finish()].into_iter().collect()
}

/// Core for i <₁ j: doubled points stay in parallel planes.
fn d2_core_planar(i: u16, j: u16) -> Polynomial {
    let mut b = CoreBuilder::new();
    b.z(1).dbar().y(1).bar().x(1).c(i).x(2).bar().y(2).bar().x(3).c(j + 1).x(4).bar().y(3);
    b.dbar().y(1).bar().x(1).c(i + 1).x(2).bar().y(2).bar().x(3).c(j + 2).x(4).bar().y(3);
    b.dbar().z(2);
    [b.finish()].into_iter().collect()
}

/// Core for i <₂ j: two summands, one with an inverted first half.
fn d2_core_aligned(i: u16, j: u16) -> Polynomial {
    let mut a = CoreBuilder::new();
    a.z(1).dbar().y(1).bar().x(1).c(i).x(2).c(j + 1).x(3).bar().y(2);
    a.dbar().y(1).bar().x(1).c(i + 1).xs(&[2, 3]).bar().xs(&[1, 2]).c(j + 2).x(3).bar().y(2);
    a.dbar().z(2);
    let mut b = CoreBuilder::new();
    b.z(1).dbar().y(1).bar().xs(&[1, 2]).c(j + 1).x(3).bar().x(1).c(i).xs(&[2, 3]).bar().y(2);
    b.dbar().y(1).bar().x(1).c(i + 1).x(2).c(j + 2).x(3).bar().y(2);
    b.dbar().z(2);
    [a.finish(), b.finish()].into_iter().collect()
}

/// Core for i <₁ j <₁ k.
fn d3_core_planar(i: u16, j: u16, k: u16) -> Polynomial {
    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().x(1).c(i).x(2).bar().y(2).bar().x(3).c(j + 1).x(4).bar().y(3);
    b.bar().x(5).c(k + 2).x(6).bar().y(4);
    b.dbar();
    b.y(1).bar().x(1).c(i + 1).x(2).bar().y(2).bar().x(3).c(j + 2).x(4).bar().y(3);
    b.bar().x(5).c(k + 3).x(6).bar().y(4);
    b.dbar().z(2);
    [b.finish()].into_iter().collect()
}

/// Core for i <₂ j <₁ k.
fn d3_core_left_mixed(i: u16, j: u16, k: u16) -> Polynomial {
    let mut a = CoreBuilder::new();
    a.z(1).dbar();
    a.y(1).bar().x(1).c(i).x(2).c(j + 1).x(3).bar().y(2).bar().x(4).c(k + 2).x(5).bar().y(3);
    a.dbar();
    a.y(1).bar().x(1).c(i + 1).xs(&[2, 3]).bar().xs(&[1, 2]).c(j + 2).x(3).bar().y(2);
    a.bar().x(4).c(k + 3).x(5).bar().y(3);
    a.dbar().z(2);
    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().xs(&[1, 2]).c(j + 1).x(3).bar().x(1).c(i).xs(&[2, 3]).bar().y(2);
    b.bar().x(4).c(k + 2).x(5).bar().y(3);
    b.dbar();
    b.y(1).bar().x(1).c(i + 1).x(2).c(j + 2).x(3).bar().y(2).bar().x(4).c(k + 3).x(5).bar().y(3);
    b.dbar().z(2);
    [a.finish(), b.finish()].into_iter().collect()
}

/// Core for i <₁ j <₂ k.
fn d3_core_right_mixed(i: u16, j: u16, k: u16) -> Polynomial {
    let mut a = CoreBuilder::new();
    a.z(1).dbar();
    a.y(1).bar().x(1).c(i).x(2).bar().y(2).bar().x(3).c(j + 1).x(4).c(k + 2).x(5).bar().y(3);
    a.dbar();
    a.y(1).bar().x(1).c(i + 1).x(2).bar().y(2);
    a.bar().x(3).c(j + 2).xs(&[4, 5]).bar().xs(&[3, 4]).c(k + 3).x(5).bar().y(3);
    a.dbar().z(2);
    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().x(1).c(i).x(2).bar().y(2);
    b.bar().xs(&[3, 4]).c(k + 2).x(5).bar().x(3).c(j + 1).xs(&[4, 5]).bar().y(3);
    b.dbar();
    b.y(1).bar().x(1).c(i + 1).x(2).bar().y(2).bar().x(3).c(j + 2).x(4).c(k + 3).x(5).bar().y(3);
    b.dbar().z(2);
    [a.finish(), b.finish()].into_iter().collect()
}

/// Core for i <₂ j <₂ k: ten summands.
fn d3_core_aligned(i: u16, j: u16, k: u16) -> Polynomial {
    // Each line: groups of 2-cloud slots between Y1|...|Y2 walls, with the
    // slot contents given as (X-slot prefix, constants interleaved).
    // Written out longhand for fidelity to the defining formulas.
    let mut terms: Vec<Monomial> = Vec::with_capacity(10);
    let (c1, c2) = (i, i + 1);
    let (d1v, d2v) = (j + 1, j + 2);
    let (e1, e2) = (k + 2, k + 3);

    // helper closures building one Y1|..|Y2 group with given rows; each row
    // is a slot of the four X variables with optional constants after X2/X3
    // positions. We just spell the ten words out.
    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().xs(&[1, 2]).c(d1v).x(3).c(e1).x(4).bar().x(1).c(c1).xs(&[2, 3, 4]).bar().y(2);
    b.dbar();
    b.y(1).bar().xs(&[1, 2]).c(d2v).xs(&[3, 4]).bar().x(1).c(c2).xs(&[2, 3]).c(e2).x(4).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().xs(&[1, 2]).c(d1v).x(3).c(e1).x(4).bar().x(1).c(c1).xs(&[2, 3, 4]).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).x(2).c(d2v).xs(&[3, 4]).bar().xs(&[1, 2, 3]).c(e2).x(4).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().xs(&[1, 2]).c(d1v).xs(&[3, 4]).bar().x(1).c(c1).xs(&[2, 3]).c(e1).x(4).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).x(2).c(d2v).xs(&[3, 4]).bar().xs(&[1, 2, 3]).c(e2).x(4).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().x(1).c(c1).xs(&[2, 3]).c(e1).x(4).bar().xs(&[1, 2]).c(d1v).xs(&[3, 4]).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).xs(&[2, 3, 4]).bar().xs(&[1, 2]).c(d2v).x(3).c(e2).x(4).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().xs(&[1, 2, 3]).c(e1).x(4).bar().x(1).c(c1).x(2).c(d1v).xs(&[3, 4]).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).xs(&[2, 3, 4]).bar().xs(&[1, 2]).c(d2v).x(3).c(e2).x(4).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().xs(&[1, 2, 3]).c(e1).x(4).bar().x(1).c(c1).x(2).c(d1v).xs(&[3, 4]).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).xs(&[2, 3]).c(e2).x(4).bar().xs(&[1, 2]).c(d2v).xs(&[3, 4]).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().x(1).c(c1).x(2).c(d1v).x(3).c(e1).x(4).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).xs(&[2, 3, 4]).bar().xs(&[1, 2]).c(d2v).xs(&[3, 4]).bar().xs(&[1, 2, 3]).c(e2).x(4).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().xs(&[1, 2, 3]).c(e1).x(4).bar().xs(&[1, 2]).c(d1v).xs(&[3, 4]).bar().x(1).c(c1).xs(&[2, 3, 4]).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).x(2).c(d2v).x(3).c(e2).x(4).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().x(1).c(c1).x(2).c(d1v).xs(&[3, 4]).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).xs(&[2, 3]).c(e1).x(4).bar().y(2);
    b.dbar();
    b.y(1).bar().xs(&[1, 2]).c(d2v).x(3).c(e2).x(4).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    let mut b = CoreBuilder::new();
    b.z(1).dbar();
    b.y(1).bar().xs(&[1, 2]).c(d1v).x(3).c(e1).x(4).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c1).xs(&[2, 3]).c(e2).x(4).bar().y(2);
    b.dbar();
    b.y(1).bar().x(1).c(c2).x(2).c(d2v).xs(&[3, 4]).bar().y(2);
    b.dbar().z(2);
    terms.push(b.finish());

    terms.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Cloud decomposition of a tree around chosen labels.

struct Region {
    z1: Cloud0,
    z2: Cloud0,
    /// The 1-cloud between the double bars, as 2-clouds.
    clouds: Vec<Cloud2>,
    /// (cloud index, offset in cloud) of each center, in tree order.
    centers: Vec<(usize, usize)>,
}

/// Split the tree around the given labels (which must appear in the given
/// positional order, pairwise at depth ≥ 1).
fn decompose(t: &FnTree, labels: &[u16]) -> Region {
    let positions: Vec<usize> = labels
        .iter()
        .map(|&l| t.position_of(l as u8).expect("label present"))
        .collect();
    debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    let first = positions[0];
    let last = *positions.last().unwrap();
    let depths = t.depths();
    // nearest depth-0 separators around the span
    let start = (0..first)
        .rev()
        .find(|&p| depths[p] == 0)
        .map_or(0, |p| p + 1);
    let end = (last..t.points() - 1)
        .find(|&p| depths[p] == 0)
        .map_or(t.points(), |p| p + 1);
    let z1 = Cloud0 {
        labels: t.order()[..start].iter().map(|&l| l as u16).collect(),
        gaps: if start > 1 {
            depths[..start - 1].iter().map(|&d| 2 - d).collect()
        } else {
            Vec::new()
        },
    };
    let z2 = Cloud0 {
        labels: t.order()[end..].iter().map(|&l| l as u16).collect(),
        gaps: if end < t.points() {
            depths[end..].iter().map(|&d| 2 - d).collect()
        } else {
            Vec::new()
        },
    };
    // cut the middle region into 2-clouds
    let mut clouds: Vec<Cloud2> = Vec::new();
    let mut run: Vec<u16> = Vec::new();
    let mut centers = Vec::new();
    for pos in start..end {
        if pos > start && depths[pos - 1] == 1 {
            clouds.push(Cloud2(std::mem::take(&mut run)));
        }
        if positions.contains(&pos) {
            centers.push((clouds.len(), run.len()));
        }
        run.push(t.order()[pos] as u16);
    }
    clouds.push(Cloud2(run));
    Region {
        z1,
        z2,
        clouds,
        centers,
    }
}

impl Region {
    /// 2-clouds strictly before cloud index a (a 1-cloud).
    fn y_before(&self, a: usize) -> Cloud1 {
        Cloud1(self.clouds[..a].to_vec())
    }

    fn y_between(&self, a: usize, b: usize) -> Cloud1 {
        Cloud1(self.clouds[a + 1..b].to_vec())
    }

    fn y_after(&self, a: usize) -> Cloud1 {
        Cloud1(self.clouds[a + 1..].to_vec())
    }

    /// Pieces of cloud `a` split at the given offsets (centers removed).
    fn x_parts(&self, a: usize, offsets: &[usize]) -> Vec<Cloud2> {
        let cloud = &self.clouds[a];
        let mut parts = Vec::with_capacity(offsets.len() + 1);
        let mut prev = 0usize;
        for &off in offsets {
            parts.push(Cloud2(cloud.0[prev..off].to_vec()));
            prev = off + 1;
        }
        parts.push(Cloud2(cloud.0[prev..].to_vec()));
        parts
    }
}

/// Relabeling x ↦ x + #{c ∈ centers : x ≥ c} for the spectator labels.
fn delta_shift(centers: &[u16]) -> impl Fn(u16) -> u16 + Copy + '_ {
    move |x| x + centers.iter().filter(|&&c| x >= c).count() as u16
}

fn eval_core(
    core: &Polynomial,
    xs: Vec<Cloud2>,
    ys: Vec<Cloud1>,
    z1: Cloud0,
    z2: Cloud0,
    out_points: usize,
) -> FnChain {
    let mut asg = Assignment::default();
    for (i, c) in xs.into_iter().enumerate() {
        asg.x.insert(i as u8 + 1, c);
    }
    for (i, c) in ys.into_iter().enumerate() {
        asg.y.insert(i as u8 + 1, c);
    }
    asg.z.insert(1, z1);
    asg.z.insert(2, z2);
    let evaluated = eval_total(core, &asg).expect("core evaluation is well-formed");
    polynomial_to_chain(&evaluated, out_points).expect("core output is a chain")
}

// ---------------------------------------------------------------------------
// D1.

/// One contribution D₁ⁱ for 0 ≤ i ≤ n+1.
pub fn d1_at_tree(t: &FnTree, i: usize) -> Result<FnChain, FoxError> {
    let n = t.points();
    if i > n + 1 {
        return Err(FoxError::IndexOutOfRange(i, n));
    }
    let mut out = FnChain::new(n + 1);
    if i == 0 {
        let mut order = vec![1u8];
        order.extend(t.order().iter().map(|&l| l + 1));
        let mut depths = vec![0u8];
        depths.extend_from_slice(t.depths());
        out.toggle(FnTree::new(&order, &depths)?)?;
        return Ok(out);
    }
    if i == n + 1 {
        let mut order = t.order().to_vec();
        order.push(n as u8 + 1);
        let mut depths = t.depths().to_vec();
        depths.push(0);
        out.toggle(FnTree::new(&order, &depths)?)?;
        return Ok(out);
    }
    let centers = [i as u16];
    let region = decompose(t, &centers);
    let (a, off) = region.centers[0];
    let dl = delta_shift(&centers);
    let xp = region.x_parts(a, &[off]);
    let xs = vec![xp[0].map(dl), xp[1].map(dl)];
    let ys = vec![region.y_before(a).map(dl), region.y_after(a).map(dl)];
    Ok(eval_core(
        &d1_core(i as u16),
        xs,
        ys,
        region.z1.map(dl),
        region.z2.map(dl),
        n + 1,
    ))
}

pub fn d1_at(c: &FnChain, i: usize) -> Result<FnChain, FoxError> {
    let mut out = FnChain::new(c.points() + 1);
    for t in c.iter() {
        out.xor_assign(&d1_at_tree(t, i)?)?;
    }
    Ok(out)
}

/// Raw D₁ terms of one tree: all n+2 contributions, duplicates possible.
pub fn d1_tree_terms(t: &FnTree) -> Vec<FnTree> {
    let n = t.points();
    let mut out = Vec::new();
    for i in 0..=n + 1 {
        out.extend(d1_at_tree(t, i).expect("index in range").iter().copied());
    }
    out
}

pub fn d1(c: &FnChain) -> FnChain {
    let mut out = FnChain::new(c.points() + 1);
    for t in c.iter() {
        for term in d1_tree_terms(t) {
            out.toggle(term).expect("same point count");
        }
    }
    out
}

// ---------------------------------------------------------------------------
// D2.

/// Transport permutation for D₂: first and second copies of the doubled
/// labels swap in parallel. Acts on {1..n+2}.
fn d2_transport(n: usize, i: u16, j: u16) -> Vec<u8> {
    let mut map: Vec<u8> = (1..=n as u8 + 2).collect();
    let (fi, fj) = (i as usize, j as usize + 1);
    let (si, sj) = (i as usize + 1, j as usize + 2);
    map.swap(fi - 1, fj - 1);
    map.swap(si - 1, sj - 1);
    map
}

pub fn d2_at_tree(t: &FnTree, i: usize, j: usize) -> Result<FnChain, FoxError> {
    let n = t.points();
    if i == j || i < 1 || j < 1 || i > n || j > n {
        return Err(FoxError::IndexOutOfRange(i.max(j), n));
    }
    let (i, j) = (i.min(j) as u16, i.max(j) as u16);
    let depth = t.pair_depth(i as u8, j as u8).expect("labels present");
    let mut out = FnChain::new(n + 2);
    if depth == 0 {
        return Ok(out);
    }
    let pi = t.position_of(i as u8).unwrap();
    let pj = t.position_of(j as u8).unwrap();
    let (gamma, transport) = if pi < pj {
        (*t, None)
    } else {
        let mut swap: Vec<u8> = (1..=n as u8).collect();
        swap.swap(i as usize - 1, j as usize - 1);
        (t.relabel(&swap)?, Some(d2_transport(n, i, j)))
    };
    let centers = [i, j];
    let region = decompose(&gamma, &centers);
    let dl = delta_shift(&centers);
    let (a, off_a) = region.centers[0];
    let (b, off_b) = region.centers[1];
    let chain = if depth == 2 {
        debug_assert_eq!(a, b);
        let xp = region.x_parts(a, &[off_a, off_b]);
        let xs = vec![xp[0].map(dl), xp[1].map(dl), xp[2].map(dl)];
        let ys = vec![region.y_before(a).map(dl), region.y_after(a).map(dl)];
        eval_core(
            &d2_core_aligned(i, j),
            xs,
            ys,
            region.z1.map(dl),
            region.z2.map(dl),
            n + 2,
        )
    } else {
        debug_assert!(a < b);
        let xa = region.x_parts(a, &[off_a]);
        let xb = region.x_parts(b, &[off_b]);
        let xs = vec![xa[0].map(dl), xa[1].map(dl), xb[0].map(dl), xb[1].map(dl)];
        let ys = vec![
            region.y_before(a).map(dl),
            region.y_between(a, b).map(dl),
            region.y_after(b).map(dl),
        ];
        eval_core(
            &d2_core_planar(i, j),
            xs,
            ys,
            region.z1.map(dl),
            region.z2.map(dl),
            n + 2,
        )
    };
    match transport {
        None => out.xor_assign(&chain)?,
        Some(tau) => {
            for term in chain.iter() {
                out.toggle(term.relabel(&tau)?)?;
            }
        }
    }
    Ok(out)
}

pub fn d2_at(c: &FnChain, i: usize, j: usize) -> Result<FnChain, FoxError> {
    let mut out = FnChain::new(c.points() + 2);
    for t in c.iter() {
        out.xor_assign(&d2_at_tree(t, i, j)?)?;
    }
    Ok(out)
}

pub fn d2(c: &FnChain) -> FnChain {
    let n = c.points();
    let mut out = FnChain::new(n + 2);
    for t in c.iter() {
        for i in 1..=n {
            for j in i + 1..=n {
                out.xor_assign(&d2_at_tree(t, i, j).expect("indices in range"))
                    .expect("same point count");
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// D3.

/// Transport for D₃: the diagonal action on first and second copies.
fn d3_transport(n: usize, labels: [u16; 3], sigma: [u16; 3]) -> Vec<u8> {
    let [i, j, k] = labels;
    let first = |x: u16| -> u8 {
        if x == i {
            i as u8
        } else if x == j {
            j as u8 + 1
        } else {
            k as u8 + 2
        }
    };
    let second = |x: u16| -> u8 { first(x) + 1 };
    let mut map: Vec<u8> = (1..=n as u8 + 3).collect();
    for (x, sx) in labels.into_iter().zip(sigma) {
        map[first(x) as usize - 1] = first(sx);
        map[second(x) as usize - 1] = second(sx);
    }
    map
}

pub fn d3_at_tree(t: &FnTree, i: usize, j: usize, k: usize) -> Result<FnChain, FoxError> {
    let n = t.points();
    let mut sorted = [i, j, k];
    sorted.sort_unstable();
    let [i, j, k] = sorted;
    if i == j || j == k || i < 1 || k > n {
        return Err(FoxError::IndexOutOfRange(k, n));
    }
    let (i, j, k) = (i as u16, j as u16, k as u16);
    let mut out = FnChain::new(n + 3);
    // positional order of the three labels in the tree
    let mut by_pos = [i, j, k];
    by_pos.sort_by_key(|&l| t.position_of(l as u8).unwrap());
    if t.pair_depth(by_pos[0] as u8, by_pos[1] as u8) == Some(0)
        || t.pair_depth(by_pos[1] as u8, by_pos[2] as u8) == Some(0)
    {
        return Ok(out);
    }
    let (gamma, transport) = if by_pos == [i, j, k] {
        (*t, None)
    } else {
        // sigma maps (i,j,k) to their positional order; gamma = sigma^{-1}(t)
        let mut inv: Vec<u8> = (1..=n as u8).collect();
        for (x, a) in [i, j, k].into_iter().zip(by_pos) {
            inv[a as usize - 1] = x as u8;
        }
        (t.relabel(&inv)?, Some(d3_transport(n, [i, j, k], by_pos)))
    };
    let d_ij = gamma.pair_depth(i as u8, j as u8).unwrap();
    let d_jk = gamma.pair_depth(j as u8, k as u8).unwrap();
    let centers = [i, j, k];
    let region = decompose(&gamma, &centers);
    let dl = delta_shift(&centers);
    let (a, oa) = region.centers[0];
    let (b, ob) = region.centers[1];
    let (c, oc) = region.centers[2];
    let chain = match (d_ij, d_jk) {
        (2, 2) => {
            let xp = region.x_parts(a, &[oa, ob, oc]);
            let xs = xp.iter().map(|p| p.map(dl)).collect();
            let ys = vec![region.y_before(a).map(dl), region.y_after(a).map(dl)];
            eval_core(&d3_core_aligned(i, j, k), xs, ys, region.z1.map(dl), region.z2.map(dl), n + 3)
        }
        (2, 1) => {
            let xab = region.x_parts(a, &[oa, ob]);
            let xc = region.x_parts(c, &[oc]);
            let xs = vec![
                xab[0].map(dl),
                xab[1].map(dl),
                xab[2].map(dl),
                xc[0].map(dl),
                xc[1].map(dl),
            ];
            let ys = vec![
                region.y_before(a).map(dl),
                region.y_between(a, c).map(dl),
                region.y_after(c).map(dl),
            ];
            eval_core(&d3_core_left_mixed(i, j, k), xs, ys, region.z1.map(dl), region.z2.map(dl), n + 3)
        }
        (1, 2) => {
            let xa = region.x_parts(a, &[oa]);
            let xbc = region.x_parts(b, &[ob, oc]);
            let xs = vec![
                xa[0].map(dl),
                xa[1].map(dl),
                xbc[0].map(dl),
                xbc[1].map(dl),
                xbc[2].map(dl),
            ];
            let ys = vec![
                region.y_before(a).map(dl),
                region.y_between(a, b).map(dl),
                region.y_after(b).map(dl),
            ];
            eval_core(&d3_core_right_mixed(i, j, k), xs, ys, region.z1.map(dl), region.z2.map(dl), n + 3)
        }
        (1, 1) => {
            let xa = region.x_parts(a, &[oa]);
            let xb = region.x_parts(b, &[ob]);
            let xc = region.x_parts(c, &[oc]);
            let xs = vec![
                xa[0].map(dl),
                xa[1].map(dl),
                xb[0].map(dl),
                xb[1].map(dl),
                xc[0].map(dl),
                xc[1].map(dl),
            ];
            let ys = vec![
                region.y_before(a).map(dl),
                region.y_between(a, b).map(dl),
                region.y_between(b, c).map(dl),
                region.y_after(c).map(dl),
            ];
            eval_core(&d3_core_planar(i, j, k), xs, ys, region.z1.map(dl), region.z2.map(dl), n + 3)
        }
        _ => unreachable!("depth-0 pairs return early"),
    };
    match transport {
        None => out.xor_assign(&chain)?,
        Some(tau) => {
            for term in chain.iter() {
                out.toggle(term.relabel(&tau)?)?;
            }
        }
    }
    Ok(out)
}

pub fn d3_at(c: &FnChain, i: usize, j: usize, k: usize) -> Result<FnChain, FoxError> {
    let mut out = FnChain::new(c.points() + 3);
    for t in c.iter() {
        out.xor_assign(&d3_at_tree(t, i, j, k)?)?;
    }
    Ok(out)
}

pub fn d3(c: &FnChain) -> FnChain {
    let n = c.points();
    let mut out = FnChain::new(n + 3);
    for t in c.iter() {
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    out.xor_assign(&d3_at_tree(t, i, j, k).expect("indices in range"))
                        .expect("same point count");
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Multiset dispatch.

/// D_A for a multiset of at most three indices: the empty set is D₀, a
/// singleton is one D₁ contribution (extremal indices allowed), pairs and
/// triples must be distinct internal labels; anything else is zero.
pub fn d_multiset(c: &FnChain, index: &DiffIndex) -> Result<FnChain, FoxError> {
    let a = &index.0;
    let n = c.points();
    match a.len() {
        0 => Ok(d0(c)),
        1 => {
            if a[0] <= n + 1 {
                d1_at(c, a[0])
            } else {
                Ok(FnChain::new(n + 1))
            }
        }
        2 => {
            if a[0] != a[1] && a[0] >= 1 && a[1] <= n {
                d2_at(c, a[0], a[1])
            } else {
                Ok(FnChain::new(n + 2))
            }
        }
        3 => {
            if a[0] != a[1] && a[1] != a[2] && a[0] >= 1 && a[2] <= n {
                d3_at(c, a[0], a[1], a[2])
            } else {
                Ok(FnChain::new(n + 3))
            }
        }
        len => Err(FoxError::Invalid(format!("multiset of size {len} exceeds 3"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> FnTree {
        FnTree::parse(s).unwrap()
    }

    fn chain(ss: &[&str]) -> FnChain {
        ss.iter().map(|s| t(s)).collect()
    }

    fn single(s: &str) -> FnChain {
        chain(&[s])
    }

    #[test]
    fn d0_worked_example() {
        assert_eq!(
            d0(&single("1 | 3 || 2 4")),
            chain(&["3 || 1 || 2 4", "1 || 3 || 2 4", "1 | 3 || 4 | 2", "1 | 3 || 2 | 4"])
        );
    }

    #[test]
    fn d0_corolla_vanishes() {
        assert!(d0(&single("1 || 2 || 3")).is_zero());
    }

    #[test]
    fn d0_two_points() {
        assert_eq!(d0(&single("1 2")), chain(&["1 | 2", "2 | 1"]));
        assert_eq!(d0(&single("1 | 2")), chain(&["1 || 2", "2 || 1"]));
    }

    #[test]
    fn d0_squares_to_zero_small() {
        for n in 2..=4usize {
            for d in 0..=2 * (n - 1) {
                for tr in crate::tree::enumerate_trees(n, d) {
                    let c = single(&tr.to_string());
                    assert!(d0(&d0(&c)).is_zero(), "D0^2 on {tr}");
                }
            }
        }
    }

    #[test]
    fn d1_of_two_aligned_points() {
        // contributions: i=0: 1||23, i=1: 13||2 + 1||23, i=2: 12||3 + 2||13,
        // i=3: 12||3; total after cancellation: 2||13 + 13||2
        assert_eq!(d1_at(&single("1 2"), 0).unwrap(), single("1 || 2 3"));
        assert_eq!(
            d1_at(&single("1 2"), 1).unwrap(),
            chain(&["1 3 || 2", "1 || 2 3"])
        );
        assert_eq!(
            d1_at(&single("1 2"), 2).unwrap(),
            chain(&["1 2 || 3", "2 || 1 3"])
        );
        assert_eq!(d1_at(&single("1 2"), 3).unwrap(), single("1 2 || 3"));
        assert_eq!(d1(&single("1 2")), chain(&["2 || 1 3", "1 3 || 2"]));
    }

    #[test]
    fn d1_internal_worked_example() {
        assert_eq!(
            d1_at(&single("1 3 | 2"), 3).unwrap(),
            chain(&["1 3 | 2 || 4", "3 || 1 4 | 2", "1 3 || 4 | 2", "3 | 2 || 1 4"])
        );
    }

    #[test]
    fn d1_big_worked_example() {
        let g = single("1 | 2 3 || 7 | 5 4 8 || 9");
        let got = d1_at(&g, 4).unwrap();
        let want = chain(&[
            "1 | 2 3 || 8 | 6 4 9 || 5 || 10",
            "1 | 2 3 || 6 4 9 || 8 | 5 || 10",
            "1 | 2 3 || 8 | 4 9 || 6 5 || 10",
            "1 | 2 3 || 4 9 || 8 | 6 5 || 10",
            "1 | 2 3 || 8 | 6 4 || 5 9 || 10",
            "1 | 2 3 || 6 4 || 8 | 5 9 || 10",
            "1 | 2 3 || 8 | 4 || 6 5 9 || 10",
            "1 | 2 3 || 4 || 8 | 6 5 9 || 10",
        ]);
        assert_eq!(got, want);
        assert_eq!(got.len(), 8, "2^3 terms before cancellation, none cancel");
    }

    #[test]
    fn d2_paper_fixtures() {
        assert_eq!(d2(&single("1 2")), chain(&["1 3 || 2 | 4", "3 | 1 || 2 4"]));
        assert_eq!(d2(&single("1 | 2")), single("1 | 3 || 2 | 4"));
        assert!(d2(&single("1 || 2")).is_zero());
    }

    #[test]
    fn d2_equivariance_transport() {
        assert_eq!(
            d2_at(&single("2 1"), 1, 2).unwrap(),
            chain(&["3 1 || 4 | 2", "1 | 3 || 4 2"])
        );
    }

    #[test]
    fn d3_paper_fixtures() {
        let full = d3(&single("1 2 3"));
        let double_bar_part: FnChain = full
            .iter()
            .filter(|tr| !tr.has_depth_one())
            .copied()
            .collect();
        assert_eq!(
            double_bar_part,
            chain(&["1 3 || 2 5 || 4 6", "3 5 || 1 6 || 2 4"])
        );
        assert_eq!(d3(&single("1 | 2 | 3")), single("1 | 3 | 5 || 2 | 4 | 6"));
        assert!(d3(&single("1 || 2 3")).is_zero());
    }

    #[test]
    fn bidegrees() {
        let c = single("1 2 | 3");
        assert_eq!(d0(&c).degree(), Some(2));
        assert_eq!(d1(&c).degree(), Some(3));
        assert_eq!(d2(&c).degree(), Some(4));
        for term in d1(&c).iter() {
            assert_eq!(term.points(), 4);
        }
    }

    #[test]
    fn multiset_dispatch_degenerate_cases() {
        let c = single("1 2");
        assert!(d_multiset(&c, &DiffIndex::new(vec![1, 1])).unwrap().is_zero());
        assert!(d_multiset(&c, &DiffIndex::new(vec![0, 1])).unwrap().is_zero());
        assert_eq!(d_multiset(&c, &DiffIndex::new(vec![])).unwrap(), d0(&c));
        assert!(d_multiset(&c, &DiffIndex::new(vec![1, 2, 3, 4])).is_err());
    }
}
