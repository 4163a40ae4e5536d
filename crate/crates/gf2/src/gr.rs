//! Sparse vectors and matrices over the group algebra 𝔽₂[Σₖ].
//!
//! A scalar (`GrElem`) is a mod-2 set of permutation indices. Matrices store
//! (row, col, permutation) triples with set semantics, matching the sparse
//! encoding used by the text formats. Complexes of interest are naturally
//! left modules; `action_convert` flips between the left and right action
//! descriptions by inverting every permutation coefficient.

use crate::perm::PermTables;
use crate::Gf2Error;
use std::collections::BTreeMap;

/// An element of 𝔽₂[Σₖ]: a sorted set of permutation indices.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct GrElem(Vec<u32>);

impl GrElem {
    pub fn zero() -> Self {
        GrElem(Vec::new())
    }

    pub fn single(idx: u32) -> Self {
        GrElem(vec![idx])
    }

    pub fn from_indices(mut v: Vec<u32>) -> Self {
        v.sort_unstable();
        let mut out = Vec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            let mut j = i;
            while j < v.len() && v[j] == v[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(v[i]);
            }
            i = j;
        }
        GrElem(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[u32] {
        &self.0
    }

    pub fn term_count(&self) -> usize {
        self.0.len()
    }

    /// Some(p) when the element is a single permutation (a unit).
    pub fn as_single(&self) -> Option<u32> {
        if self.0.len() == 1 {
            Some(self.0[0])
        } else {
            None
        }
    }

    pub fn toggle(&mut self, idx: u32) {
        match self.0.binary_search(&idx) {
            Ok(pos) => {
                self.0.remove(pos);
            }
            Err(pos) => self.0.insert(pos, idx),
        }
    }

    /// Symmetric difference (addition in characteristic 2).
    pub fn xor_assign(&mut self, other: &GrElem) {
        if other.0.is_empty() {
            return;
        }
        let mut merged = Vec::with_capacity(self.0.len() + other.0.len());
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&a[i..]);
        merged.extend_from_slice(&b[j..]);
        self.0 = merged;
    }

    /// Product self · other (apply right factor first under composition).
    pub fn mul(&self, other: &GrElem, tables: &PermTables) -> GrElem {
        let mut all = Vec::with_capacity(self.0.len() * other.0.len());
        for &p in &self.0 {
            for &q in &other.0 {
                all.push(tables.compose_index(p, q));
            }
        }
        GrElem::from_indices(all)
    }

    /// Left-multiply by a single permutation.
    pub fn premul_perm(&self, p: u32, tables: &PermTables) -> GrElem {
        GrElem::from_indices(self.0.iter().map(|&q| tables.compose_index(p, q)).collect())
    }

    pub fn invert_terms(&self, tables: &PermTables) -> GrElem {
        GrElem::from_indices(self.0.iter().map(|&p| tables.inverse_index(p)).collect())
    }
}

impl std::fmt::Debug for GrElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrElem{:?}", self.0)
    }
}

/// A vector with entries in 𝔽₂[Σₖ], stored sparsely.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrVector {
    pub len: usize,
    pub k: usize,
    entries: BTreeMap<usize, GrElem>,
}

impl GrVector {
    pub fn zeros(len: usize, k: usize) -> Self {
        GrVector {
            len,
            k,
            entries: BTreeMap::new(),
        }
    }

    pub fn toggle(&mut self, idx: usize, perm: u32) {
        debug_assert!(idx < self.len);
        let e = self.entries.entry(idx).or_default();
        e.toggle(perm);
        if e.is_zero() {
            self.entries.remove(&idx);
        }
    }

    pub fn set_entry(&mut self, idx: usize, e: GrElem) {
        if e.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, e);
        }
    }

    pub fn entry(&self, idx: usize) -> Option<&GrElem> {
        self.entries.get(&idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &GrElem)> {
        self.entries.iter().map(|(&i, e)| (i, e))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of (index, permutation) pairs.
    pub fn term_count(&self) -> usize {
        self.entries.values().map(GrElem::term_count).sum()
    }

    pub fn xor_assign(&mut self, other: &GrVector) {
        for (i, e) in other.iter() {
            let slot = self.entries.entry(i).or_default();
            slot.xor_assign(e);
            if slot.is_zero() {
                self.entries.remove(&i);
            }
        }
    }

    /// Replace every permutation coefficient by its inverse, switching
    /// between the left- and right-action descriptions. Involutive.
    pub fn action_convert(&self, tables: &PermTables) -> GrVector {
        let mut out = GrVector::zeros(self.len, self.k);
        for (i, e) in self.iter() {
            out.set_entry(i, e.invert_terms(tables));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("GRVEC len={} group=S{}\n", self.len, self.k);
        let tables = PermTables::new(self.k).expect("valid k");
        for (i, e) in self.iter() {
            for &p in e.terms() {
                let word: Vec<String> = tables
                    .perm(p)
                    .one_based()
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                s.push_str(&format!("{} {}\n", i + 1, word.join(" ")));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Malformed("empty .grvec file".into()))?;
        let vals = crate::bitmat::parse_header(header, "GRVEC", &["len", "group"])?;
        let (len, k) = (vals[0], vals[1]);
        let tables = PermTables::new(k)?;
        let mut v = GrVector::zeros(len, k);
        for line in lines {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Gf2Error::Malformed(line.into())))
                .collect::<Result<_, _>>()?;
            if nums.len() != 1 + k {
                return Err(Gf2Error::Malformed(format!("bad .grvec line: {line}")));
            }
            let i = nums[0];
            if i < 1 || i > len {
                return Err(Gf2Error::IndexOutOfRange(format!("index {i}")));
            }
            let perm = crate::perm::Perm::from_one_based(&nums[1..])?;
            v.toggle(i - 1, tables.rank(&perm) as u32);
        }
        Ok(v)
    }
}

/// A sparse matrix with entries in 𝔽₂[Σₖ].
#[derive(Clone, Default)]
pub struct GroupRingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub k: usize,
    entries: BTreeMap<(usize, usize), GrElem>,
}

impl GroupRingMatrix {
    pub fn zeros(rows: usize, cols: usize, k: usize) -> Self {
        GroupRingMatrix {
            rows,
            cols,
            k,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, k: usize, tables: &PermTables) -> Self {
        let mut m = Self::zeros(n, n, k);
        for i in 0..n {
            m.set_entry(i, i, GrElem::single(tables.identity_index()));
        }
        m
    }

    pub fn toggle(&mut self, r: usize, c: usize, perm: u32) {
        debug_assert!(r < self.rows && c < self.cols);
        let e = self.entries.entry((r, c)).or_default();
        e.toggle(perm);
        if e.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn set_entry(&mut self, r: usize, c: usize, e: GrElem) {
        if e.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), e);
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> Option<&GrElem> {
        self.entries.get(&(r, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &GrElem)> {
        self.entries.iter().map(|(&(r, c), e)| (r, c, e))
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn action_convert(&self, tables: &PermTables) -> GroupRingMatrix {
        let mut out = GroupRingMatrix::zeros(self.rows, self.cols, self.k);
        for (r, c, e) in self.iter() {
            out.set_entry(r, c, e.invert_terms(tables));
        }
        out
    }

    /// Plain matrix product over 𝔽₂[Σₖ].
    pub fn matmul(&self, other: &GroupRingMatrix, tables: &PermTables) -> Result<GroupRingMatrix, Gf2Error> {
        if self.cols != other.rows || self.k != other.k {
            return Err(Gf2Error::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        // group other's entries by row for the inner loop
        let mut by_row: Vec<Vec<(usize, &GrElem)>> = vec![Vec::new(); other.rows];
        for (r, c, e) in other.iter() {
            by_row[r].push((c, e));
        }
        let mut out = GroupRingMatrix::zeros(self.rows, other.cols, self.k);
        for (i, j, a) in self.iter() {
            for &(c, b) in &by_row[j] {
                let prod = a.mul(b, tables);
                if !prod.is_zero() {
                    let slot = out.entries.entry((i, c)).or_default();
                    slot.xor_assign(&prod);
                    if slot.is_zero() {
                        out.entries.remove(&(i, c));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product in the right-module description:
    /// (A·x)_i = Σ_j A_ij · x_j.
    pub fn mul_vec(&self, x: &GrVector, tables: &PermTables) -> Result<GrVector, Gf2Error> {
        if self.cols != x.len || self.k != x.k {
            return Err(Gf2Error::DimensionMismatch(format!(
                "mul_vec {}x{} by {}",
                self.rows, self.cols, x.len
            )));
        }
        let mut out = GrVector::zeros(self.rows, self.k);
        for (r, c, a) in self.iter() {
            if let Some(e) = x.entry(c) {
                let prod = a.mul(e, tables);
                if !prod.is_zero() {
                    let slot = out.entries.entry(r).or_default();
                    slot.xor_assign(&prod);
                    if slot.is_zero() {
                        out.entries.remove(&r);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Apply as a left-module map: y_i = Σ_j v_j · A_ij, coefficients
    /// multiplying from the left as the module structure dictates.
    pub fn apply_left(&self, v: &GrVector, tables: &PermTables) -> Result<GrVector, Gf2Error> {
        if self.cols != v.len || self.k != v.k {
            return Err(Gf2Error::DimensionMismatch(format!(
                "apply_left {}x{} by {}",
                self.rows, self.cols, v.len
            )));
        }
        let mut out = GrVector::zeros(self.rows, self.k);
        for (r, c, a) in self.iter() {
            if let Some(e) = v.entry(c) {
                let prod = e.mul(a, tables);
                if !prod.is_zero() {
                    let slot = out.entries.entry(r).or_default();
                    slot.xor_assign(&prod);
                    if slot.is_zero() {
                        out.entries.remove(&r);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "GRMAT rows={} cols={} group=S{}\n",
            self.rows, self.cols, self.k
        );
        let tables = PermTables::new(self.k).expect("valid k");
        for (r, c, e) in self.iter() {
            for &p in e.terms() {
                let word: Vec<String> = tables
                    .perm(p)
                    .one_based()
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                s.push_str(&format!("{} {} {}\n", r + 1, c + 1, word.join(" ")));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Malformed("empty .grmat file".into()))?;
        let vals = crate::bitmat::parse_header(header, "GRMAT", &["rows", "cols", "group"])?;
        let (rows, cols, k) = (vals[0], vals[1], vals[2]);
        let tables = PermTables::new(k)?;
        let mut m = GroupRingMatrix::zeros(rows, cols, k);
        for line in lines {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Gf2Error::Malformed(line.into())))
                .collect::<Result<_, _>>()?;
            if nums.len() != 2 + k {
                return Err(Gf2Error::Malformed(format!("bad .grmat line: {line}")));
            }
            let (r, c) = (nums[0], nums[1]);
            if r < 1 || r > rows || c < 1 || c > cols {
                return Err(Gf2Error::IndexOutOfRange(format!("entry ({r},{c})")));
            }
            let perm = crate::perm::Perm::from_one_based(&nums[2..])?;
            m.toggle(r - 1, c - 1, tables.rank(&perm) as u32);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elem_set_semantics() {
        let mut e = GrElem::zero();
        e.toggle(3);
        e.toggle(1);
        e.toggle(3);
        assert_eq!(e.terms(), &[1]);
        let f = GrElem::from_indices(vec![2, 1, 2, 2]);
        assert_eq!(f.terms(), &[1, 2]);
    }

    #[test]
    fn single_times_single_is_composition() {
        let t = PermTables::new(3).unwrap();
        for p in 0..6u32 {
            for q in 0..6u32 {
                let prod = GrElem::single(p).mul(&GrElem::single(q), &t);
                assert_eq!(prod.as_single(), Some(t.compose_index(p, q)));
            }
        }
    }

    #[test]
    fn identity_matrix_is_neutral() {
        let t = PermTables::new(3).unwrap();
        let id = GroupRingMatrix::identity(3, 3, &t);
        let mut a = GroupRingMatrix::zeros(3, 3, 3);
        a.toggle(0, 1, 2);
        a.toggle(0, 1, 4);
        a.toggle(2, 0, 1);
        let left = id.matmul(&a, &t).unwrap();
        let right = a.matmul(&id, &t).unwrap();
        for (r, c, e) in a.iter() {
            assert_eq!(left.entry(r, c), Some(e));
            assert_eq!(right.entry(r, c), Some(e));
        }
        assert_eq!(left.entry_count(), a.entry_count());
    }

    #[test]
    fn action_convert_is_involutive() {
        let t = PermTables::new(4).unwrap();
        let mut v = GrVector::zeros(5, 4);
        v.toggle(0, 7);
        v.toggle(3, 11);
        v.toggle(3, 23);
        assert_eq!(v.action_convert(&t).action_convert(&t), v);
        // identity coefficients are unchanged
        let mut w = GrVector::zeros(1, 4);
        w.toggle(0, t.identity_index());
        assert_eq!(w.action_convert(&t), w);
    }

    #[test]
    fn matrix_text_roundtrip() {
        let mut m = GroupRingMatrix::zeros(2, 3, 3);
        m.toggle(0, 2, 1);
        m.toggle(1, 0, 5);
        m.toggle(1, 0, 0);
        let m2 = GroupRingMatrix::from_text(&m.to_text()).unwrap();
        assert_eq!(m2.rows, 2);
        assert_eq!(m2.cols, 3);
        assert_eq!(m2.k, 3);
        for (r, c, e) in m.iter() {
            assert_eq!(m2.entry(r, c), Some(e));
        }
    }

    #[test]
    fn vector_text_roundtrip() {
        let mut v = GrVector::zeros(4, 3);
        v.toggle(1, 3);
        v.toggle(2, 0);
        let v2 = GrVector::from_text(&v.to_text()).unwrap();
        assert_eq!(v, v2);
    }
}
