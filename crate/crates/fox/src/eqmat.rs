//! The boundary as an equivariant matrix over 𝔽₂[Σₖ].
//!
//! FN(k,d) is a free left 𝔽₂[Σₖ]-module on the identity-permutation trees,
//! one per depth vector. A chain is encoded as a sparse coordinate vector of
//! (depth-vector index, permutation) pairs, and D₀ becomes a sparse matrix
//! with group-ring entries. Solvers want the right-action description, which
//! is reached by inverting every permutation coefficient.

use crate::chain::FnChain;
use crate::diff::d0_tree;
use crate::tree::{enumerate_depth_vectors, DepthVector, FnTree};
use crate::FoxError;
use gf2::{GroupRingMatrix, GrVector, Perm, PermTables};
use std::collections::HashMap;

/// Indexing of the depth-vector basis of FN(k, d) mod Σₖ.
pub struct ChainCoder {
    k: usize,
    d: usize,
    vectors: Vec<DepthVector>,
    index: HashMap<DepthVector, usize>,
}

impl ChainCoder {
    pub fn new(k: usize, d: usize) -> Self {
        let vectors = enumerate_depth_vectors(d, k);
        let index = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        ChainCoder {
            k,
            d,
            vectors,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn vector(&self, idx: usize) -> &DepthVector {
        &self.vectors[idx]
    }

    fn perm_of_tree(t: &FnTree, tables: &PermTables) -> u32 {
        let images: Vec<u8> = t.order().iter().map(|&l| l - 1).collect();
        tables.rank(&Perm::from_images(&images)) as u32
    }

    /// Encode a chain as a left-module coordinate vector.
    pub fn encode(&self, c: &FnChain, tables: &PermTables) -> Result<GrVector, FoxError> {
        if c.points() != self.k {
            return Err(FoxError::PointMismatch(c.points(), self.k));
        }
        let mut v = GrVector::zeros(self.len(), self.k);
        for t in c.iter() {
            let idx = self
                .index
                .get(t.depths())
                .ok_or_else(|| FoxError::Invalid(format!("degree mismatch for {t}")))?;
            v.toggle(*idx, Self::perm_of_tree(t, tables));
        }
        Ok(v)
    }

    pub fn decode(&self, v: &GrVector, tables: &PermTables) -> Result<FnChain, FoxError> {
        let mut c = FnChain::new(self.k);
        for (idx, e) in v.iter() {
            let dv = self
                .vectors
                .get(idx)
                .ok_or_else(|| FoxError::Invalid(format!("basis index {idx} out of range")))?;
            for &p in e.terms() {
                let order: Vec<u8> = tables.perm(p).one_based().iter().map(|&x| x as u8).collect();
                c.toggle(FnTree::new(&order, dv)?)?;
            }
        }
        Ok(c)
    }
}

/// The matrix of D₀: FN(k,d) → FN(k,d−1) in the left-module description.
/// Rows are indexed by the degree d−1 basis, columns by the degree d basis;
/// the entry at (i,j) expresses D₀ on the identity-permutation tree of
/// column j.
pub fn d0_matrix(k: usize, d: usize, tables: &PermTables) -> Result<GroupRingMatrix, FoxError> {
    if d == 0 || d > 2 * (k - 1) {
        return Err(FoxError::Invalid(format!("no boundary out of degree {d} on {k} points")));
    }
    let cols = ChainCoder::new(k, d);
    let rows = ChainCoder::new(k, d - 1);
    let mut m = GroupRingMatrix::zeros(rows.len(), cols.len(), k);
    for (j, dv) in cols.vectors.iter().enumerate() {
        let t = FnTree::identity(k, dv)?;
        for term in d0_tree(&t) {
            let i = rows
                .index
                .get(term.depths())
                .expect("boundary drops degree by one");
            m.toggle(*i, j, ChainCoder::perm_of_tree(&term, tables));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::d0;

    #[test]
    fn production_matrix_shapes() {
        let t8 = PermTables::new(8).unwrap();
        let m = d0_matrix(8, 10, &t8).unwrap();
        assert_eq!((m.rows, m.cols), (266, 161));
        let t7 = PermTables::new(7).unwrap();
        let m7 = d0_matrix(7, 9, &t7).unwrap();
        assert_eq!((m7.rows, m7.cols), (90, 50));
    }

    #[test]
    fn matrix_reproduces_boundary_on_chains() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let k = 6;
        let tables = PermTables::new(k).unwrap();
        for d in [4usize, 7] {
            let coder_d = ChainCoder::new(k, d);
            let coder_dm1 = ChainCoder::new(k, d - 1);
            let m = d0_matrix(k, d, &tables).unwrap();
            for _ in 0..20 {
                let mut chain = FnChain::new(k);
                for _ in 0..rng.gen_range(1..8) {
                    let dv = coder_d.vectors[rng.gen_range(0..coder_d.len())].clone();
                    let mut order: Vec<u8> = (1..=k as u8).collect();
                    order.shuffle(&mut rng);
                    chain.toggle(FnTree::new(&order, &dv).unwrap()).unwrap();
                }
                let lhs = m
                    .apply_left(&coder_d.encode(&chain, &tables).unwrap(), &tables)
                    .unwrap();
                let rhs = coder_dm1.encode(&d0(&chain), &tables).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn boundary_squares_to_zero_as_matrices() {
        let k = 5;
        let tables = PermTables::new(k).unwrap();
        for d in 2..=2 * (k - 1) {
            let a = d0_matrix(k, d, &tables).unwrap().action_convert(&tables);
            let b = d0_matrix(k, d - 1, &tables).unwrap().action_convert(&tables);
            let prod = b.matmul(&a, &tables).unwrap();
            assert!(prod.is_zero(), "D0^2 != 0 at degree {d}");
        }
    }

    #[test]
    fn encode_decode_roundtrip() {
        let tables = PermTables::new(4).unwrap();
        let coder = ChainCoder::new(4, 3);
        let chain: FnChain = [
            FnTree::parse("1 3 || 2 | 4").unwrap(),
            FnTree::parse("4 | 2 | 1 | 3").unwrap(),
        ]
        .into_iter()
        .collect();
        let v = coder.encode(&chain, &tables).unwrap();
        assert_eq!(v.term_count(), 2);
        assert_eq!(coder.decode(&v, &tables).unwrap(), chain);
    }
}
