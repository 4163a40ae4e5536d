//! Dense bit-packed matrices and vectors over GF(2).
//!
//! Rows are stored in 64-bit words. Elimination uses a fixed deterministic
//! pivot rule (columns left to right, first unused row with a set bit), so
//! rank, kernel bases and solutions are reproducible bit for bit.

use crate::Gf2Error;

#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Vec {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vec {
    pub fn zeros(len: usize) -> Self {
        Gf2Vec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn toggle(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Gf2Vec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

impl std::fmt::Debug for Gf2Vec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Gf2Vec[{}; ones {:?}]", self.len, self.iter_ones().collect::<Vec<_>>())
    }
}

#[derive(Clone)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    w: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let w = cols.div_ceil(64).max(1);
        Gf2Matrix {
            rows,
            cols,
            w,
            data: vec![0; rows * w],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.w + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let mask = 1u64 << (c % 64);
        let idx = r * self.w + c / 64;
        if v {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.w + c / 64] ^= 1u64 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.w..(r + 1) * self.w]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * self.w);
            (&lo[src * self.w..src * self.w + self.w], &mut hi[..self.w])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * self.w);
            (&hi[..self.w], &mut lo[dst * self.w..dst * self.w + self.w])
        };
        for (d, s) in b.iter_mut().zip(a) {
            *d ^= s;
        }
    }

    pub fn row_vec(&self, r: usize) -> Gf2Vec {
        let mut v = Gf2Vec::zeros(self.cols);
        v.words.copy_from_slice(self.row(r));
        v
    }

    pub fn set_row(&mut self, r: usize, v: &Gf2Vec) {
        debug_assert_eq!(v.len, self.cols);
        self.data[r * self.w..(r + 1) * self.w].copy_from_slice(&v.words);
    }

    pub fn column_vec(&self, c: usize) -> Gf2Vec {
        let mut v = Gf2Vec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn set_column(&mut self, c: usize, v: &Gf2Vec) {
        debug_assert_eq!(v.len(), self.rows);
        for r in 0..self.rows {
            self.set(r, c, v.get(r));
        }
    }

    /// New matrix with the given columns appended on the right.
    pub fn with_columns(&self, extra: &[Gf2Vec]) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(self.rows, self.cols + extra.len());
        for r in 0..self.rows {
            for (wi, &word) in self.row(r).iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    m.set(r, wi * 64 + b, true);
                }
            }
        }
        for (j, v) in extra.iter().enumerate() {
            debug_assert_eq!(v.len(), self.rows);
            m.set_column(self.cols + j, v);
        }
        m
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &Gf2Vec) -> Result<Gf2Vec, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch(format!(
                "mul_vec: {}x{} by {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = Gf2Vec::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u64;
            for (a, b) in self.row(r).iter().zip(&v.words) {
                acc ^= a & b;
            }
            if acc.count_ones() % 2 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Row echelon reduction in place. Returns (pivot rows, pivot cols),
    /// aligned index by index.
    fn echelonize(&mut self) -> (Vec<usize>, Vec<usize>) {
        let mut pivot_rows = Vec::new();
        let mut pivot_cols = Vec::new();
        let mut used = vec![false; self.rows];
        for c in 0..self.cols {
            let mut pivot = None;
            for r in 0..self.rows {
                if !used[r] && self.get(r, c) {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            used[p] = true;
            for r in 0..self.rows {
                if r != p && self.get(r, c) {
                    self.xor_row_into(p, r);
                }
            }
            pivot_rows.push(p);
            pivot_cols.push(c);
        }
        (pivot_rows, pivot_cols)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelonize().0.len()
    }

    /// Basis of the right kernel, one vector per free column, in ascending
    /// free-column order.
    pub fn kernel(&self) -> Vec<Gf2Vec> {
        let mut m = self.clone();
        let (pivot_rows, pivot_cols) = m.echelonize();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = Gf2Vec::zeros(self.cols);
            v.set(f, true);
            for (i, &c) in pivot_cols.iter().enumerate() {
                if m.get(pivot_rows[i], f) {
                    v.set(c, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solve self * x = rhs; None when inconsistent. Free variables are 0.
    pub fn solve(&self, rhs: &Gf2Vec) -> Result<Option<Gf2Vec>, Gf2Error> {
        if rhs.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch(format!(
                "solve: {}x{} with rhs {}",
                self.rows,
                self.cols,
                rhs.len()
            )));
        }
        let mut m = self.with_columns(std::slice::from_ref(rhs));
        let mut used = vec![false; self.rows];
        let mut pivots = Vec::new();
        for c in 0..self.cols {
            let mut pivot = None;
            for r in 0..self.rows {
                if !used[r] && m.get(r, c) {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            used[p] = true;
            for r in 0..self.rows {
                if r != p && m.get(r, c) {
                    m.xor_row_into(p, r);
                }
            }
            pivots.push((p, c));
        }
        for r in 0..self.rows {
            if !used[r] && m.get(r, self.cols) {
                return Ok(None);
            }
        }
        let mut x = Gf2Vec::zeros(self.cols);
        for (p, c) in pivots {
            if m.get(p, self.cols) {
                x.set(c, true);
            }
        }
        Ok(Some(x))
    }

    /// Serialize in the sparse `.gf2` text format (1-based indices).
    pub fn to_text(&self) -> String {
        let mut s = format!("GF2 rows={} cols={}\n", self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    s.push_str(&format!("{} {}\n", r + 1, c + 1));
                }
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Malformed("empty .gf2 file".into()))?;
        let (rows, cols) = parse_header(header, "GF2", &["rows", "cols"])
            .map(|v| (v[0], v[1]))?;
        let mut m = Gf2Matrix::zeros(rows, cols);
        for line in lines {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let r: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Gf2Error::Malformed(format!("bad entry line: {line}")))?;
            let c: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Gf2Error::Malformed(format!("bad entry line: {line}")))?;
            if r < 1 || r > rows || c < 1 || c > cols {
                return Err(Gf2Error::IndexOutOfRange(format!("entry ({r},{c})")));
            }
            m.toggle(r - 1, c - 1);
        }
        Ok(m)
    }
}

impl std::fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(20) {
            let s: String = (0..self.cols.min(80))
                .map(|c| if self.get(r, c) { '1' } else { '.' })
                .collect();
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parse a header like `NAME key1=a key2=b`, returning values in key order.
pub(crate) fn parse_header(line: &str, name: &str, keys: &[&str]) -> Result<Vec<usize>, Gf2Error> {
    let mut it = line.split_whitespace();
    let tag = it.next().unwrap_or("");
    if tag != name {
        return Err(Gf2Error::Malformed(format!(
            "expected {name} header, found: {line}"
        )));
    }
    let mut values = vec![None; keys.len()];
    for tok in it {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Gf2Error::Malformed(format!("bad header token {tok}")))?;
        if let Some(pos) = keys.iter().position(|&key| key == k) {
            let v = v.trim_start_matches('S');
            values[pos] = Some(
                v.parse::<usize>()
                    .map_err(|_| Gf2Error::Malformed(format!("bad header value {tok}")))?,
            );
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Gf2Error::Malformed(format!("missing key {}", keys[i]))))
        .collect()
}

/// Serialize a vector in the `.gf2vec` format: header plus 1-based set bits.
pub fn vec_to_text(v: &Gf2Vec) -> String {
    let mut s = format!("GF2VEC len={}\n", v.len());
    for i in v.iter_ones() {
        s.push_str(&format!("{}\n", i + 1));
    }
    s
}

pub fn vec_from_text(text: &str) -> Result<Gf2Vec, Gf2Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Gf2Error::Malformed("empty .gf2vec file".into()))?;
    let len = parse_header(header, "GF2VEC", &["len"])?[0];
    let mut v = Gf2Vec::zeros(len);
    for line in lines {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let i: usize = line
            .parse()
            .map_err(|_| Gf2Error::Malformed(format!("bad index line: {line}")))?;
        if i < 1 || i > len {
            return Err(Gf2Error::IndexOutOfRange(format!("index {i}")));
        }
        v.toggle(i - 1);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: usize, cols: usize, bits: &[&[usize]]) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(rows, cols);
        for (r, cs) in bits.iter().enumerate() {
            for &c in cs.iter() {
                m.set(r, c, true);
            }
        }
        m
    }

    #[test]
    fn rank_of_zero_and_identity() {
        assert_eq!(Gf2Matrix::zeros(5, 7).rank(), 0);
        let mut id = Gf2Matrix::zeros(6, 6);
        for i in 0..6 {
            id.set(i, i, true);
        }
        assert_eq!(id.rank(), 6);
    }

    #[test]
    fn rank_plus_kernel_dim_is_cols() {
        let m = from_rows(3, 4, &[&[0, 1], &[1, 2], &[0, 2]]);
        let r = m.rank();
        let k = m.kernel();
        assert_eq!(r + k.len(), 4);
        for v in &k {
            assert!(m.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = from_rows(3, 3, &[&[0, 1], &[1, 2], &[0, 2]]);
        // rows sum to zero, so (1,1,1) rhs is inconsistent iff odd pattern
        let b = Gf2Vec::from_indices(3, &[0]);
        if let Some(x) = m.solve(&b).unwrap() {
            assert_eq!(m.mul_vec(&x).unwrap(), b);
        }
        let b2 = Gf2Vec::from_indices(3, &[0, 1, 2]);
        // row0+row1+row2 = 0 => sum of rhs must be 0; 1+1+1 = 1 is inconsistent
        assert!(m.solve(&b2).unwrap().is_none());
    }

    #[test]
    fn text_roundtrip() {
        let m = from_rows(2, 70, &[&[0, 65], &[3]]);
        let m2 = Gf2Matrix::from_text(&m.to_text()).unwrap();
        assert_eq!(m2.rows(), 2);
        assert!(m2.get(0, 65) && m2.get(1, 3) && !m2.get(1, 4));
        let v = Gf2Vec::from_indices(70, &[0, 69]);
        let v2 = vec_from_text(&vec_to_text(&v)).unwrap();
        assert_eq!(v, v2);
    }

    #[test]
    fn random_rank_kernel_consistency() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let rows = rng.gen_range(1..12);
            let cols = rng.gen_range(1..12);
            let mut m = Gf2Matrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    if rng.gen_bool(0.4) {
                        m.set(r, c, true);
                    }
                }
            }
            assert_eq!(m.rank() + m.kernel().len(), cols);
            for v in m.kernel() {
                assert!(m.mul_vec(&v).unwrap().is_zero());
            }
        }
    }
}
