//! Gauss elimination over 𝔽₂[Σₖ] with symmetric-group descent.
//!
//! The solver works on the right-action description of an equivariant system
//! A·x = b. It eliminates as long as some entry of the reduced matrix is a
//! single permutation (a unit of the group algebra). When no unit pivots
//! remain, the leftover subsystem is rewritten over 𝔽₂[Σₖ₋₁]: each free
//! rank-one summand splits along the left cosets of Σₖ₋₁, multiplying the
//! dimensions by k but exposing new unit pivots. At k = 1 the algebra is the
//! field itself and elimination always finishes.

use crate::gr::{GrElem, GrVector, GroupRingMatrix};
use crate::perm::{factorial, Perm, PermTables};
use crate::Gf2Error;

/// Hard cap on the row count of an expanded system; beyond this the descent
/// would not fit in a sane amount of memory.
const MAX_EXPANDED_ROWS: usize = 8_000_000;

#[derive(Debug)]
pub struct SolveOutcome {
    /// Smallest t such that elimination had to descend to Σ_t.
    pub t_min: usize,
    pub x: GrVector,
}

/// Coset representative c_r = cycle (r, r+1, …, k) sending k to r
/// (1-based description; indices here are 0-based).
fn coset_rep(k: usize, r: usize) -> Perm {
    let mut images: Vec<u8> = (0..k as u8).collect();
    for (i, img) in images.iter_mut().enumerate().take(k - 1).skip(r) {
        let _ = i;
        *img += 1;
    }
    images[k - 1] = r as u8;
    Perm::from_images(&images)
}

/// Split a matrix over 𝔽₂[Σₖ] into k×k blocks over 𝔽₂[Σₖ₋₁].
///
/// Entry g of A at (i,j) contributes the element h = c_r⁻¹ g c_s to block
/// position ((i,r),(j,s)) for the unique r with g(c_s(k)) = c_r(k); this is
/// the translation making expand(A)·expand(x) = expand(A·x) hold.
pub fn expand_scalars(a: &GroupRingMatrix, tables: &PermTables) -> Result<GroupRingMatrix, Gf2Error> {
    let k = a.k;
    if k < 2 {
        return Err(Gf2Error::BadGroupOrder(k));
    }
    if a.rows * k > MAX_EXPANDED_ROWS {
        return Err(Gf2Error::DimensionMismatch(format!(
            "expansion to S{} would need {} rows",
            k - 1,
            a.rows * k
        )));
    }
    let small = PermTables::new(k - 1)?;
    let reps: Vec<Perm> = (0..k).map(|r| coset_rep(k, r)).collect();
    let rep_invs: Vec<Perm> = reps.iter().map(Perm::inverse).collect();
    let mut out = GroupRingMatrix::zeros(a.rows * k, a.cols * k, k - 1);
    for (i, j, e) in a.iter() {
        for &g in e.terms() {
            let gp = tables.perm(g);
            for (s, rep) in reps.iter().enumerate() {
                let r = gp.apply(rep.apply(k - 1));
                let h = rep_invs[r].compose(gp).compose(rep);
                debug_assert!(h.fixes_last());
                out.toggle(i * k + r, j * k + s, small.rank(&h.restrict()) as u32);
            }
        }
    }
    Ok(out)
}

/// Split a vector over 𝔽₂[Σₖ] along left cosets: entry g of v_i lands in
/// component (i, s) as c_s⁻¹ g, where s = g(k).
pub fn expand_vector(v: &GrVector, tables: &PermTables) -> Result<GrVector, Gf2Error> {
    let k = v.k;
    if k < 2 {
        return Err(Gf2Error::BadGroupOrder(k));
    }
    let small = PermTables::new(k - 1)?;
    let rep_invs: Vec<Perm> = (0..k).map(|r| coset_rep(k, r).inverse()).collect();
    let mut out = GrVector::zeros(v.len * k, k - 1);
    for (i, e) in v.iter() {
        for &g in e.terms() {
            let gp = tables.perm(g);
            let s = gp.apply(k - 1);
            let h = rep_invs[s].compose(gp);
            debug_assert!(h.fixes_last());
            out.toggle(i * k + s, small.rank(&h.restrict()) as u32);
        }
    }
    Ok(out)
}

/// Reassemble a solution over 𝔽₂[Σₖ₋₁] back to 𝔽₂[Σₖ]: x_j = Σ_s c_s x_{j,s}.
fn reassemble(x: &GrVector, n: usize, k: usize, tables: &PermTables) -> GrVector {
    let small = PermTables::new(k - 1).expect("valid k");
    let reps: Vec<Perm> = (0..k).map(|r| coset_rep(k, r)).collect();
    let mut out = GrVector::zeros(n, k);
    for (idx, e) in x.iter() {
        let j = idx / k;
        let s = idx % k;
        for &h in e.terms() {
            let g = reps[s].compose(&small.perm(h).extend());
            out.toggle(j, tables.rank(&g) as u32);
        }
    }
    out
}

type SparseRow = Vec<(u32, GrElem)>;

fn row_get(row: &SparseRow, c: u32) -> Option<&GrElem> {
    row.binary_search_by_key(&c, |t| t.0).ok().map(|i| &row[i].1)
}

/// dst += mult · src, merging sorted column lists.
fn row_add_scaled(dst: &SparseRow, src: &SparseRow, mult: &GrElem, tables: &PermTables) -> SparseRow {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let take_src = match (dst.get(i), src.get(j)) {
            (Some(a), Some(b)) => {
                if a.0 == b.0 {
                    let mut e = a.1.clone();
                    e.xor_assign(&mult.mul(&b.1, tables));
                    if !e.is_zero() {
                        out.push((a.0, e));
                    }
                    i += 1;
                    j += 1;
                    continue;
                }
                b.0 < a.0
            }
            (None, Some(_)) => true,
            (Some(_), None) => false,
            (None, None) => unreachable!(),
        };
        if take_src {
            let e = mult.mul(&src[j].1, tables);
            if !e.is_zero() {
                out.push((src[j].0, e));
            }
            j += 1;
        } else {
            out.push(dst[i].clone());
            i += 1;
        }
    }
    out
}

struct Eliminated {
    rows: Vec<SparseRow>,
    b: Vec<GrElem>,
    /// (row, col, pivot permutation), in pivot order.
    pivots: Vec<(usize, usize, u32)>,
    row_used: Vec<bool>,
    col_used: Vec<bool>,
}

/// Forward elimination with unit pivots. Pivot rule: scan columns left to
/// right and rows top to bottom, take the first single-permutation entry.
fn eliminate(
    mut rows: Vec<SparseRow>,
    mut b: Vec<GrElem>,
    n: usize,
    tables: &PermTables,
) -> Eliminated {
    let m = rows.len();
    let mut row_used = vec![false; m];
    let mut col_used = vec![false; n];
    let mut pivots = Vec::new();
    loop {
        let mut found = None;
        'scan: for c in 0..n {
            if col_used[c] {
                continue;
            }
            for (r, row) in rows.iter().enumerate() {
                if row_used[r] {
                    continue;
                }
                if let Some(e) = row_get(row, c as u32) {
                    if let Some(p) = e.as_single() {
                        found = Some((r, c, p));
                        break 'scan;
                    }
                }
            }
        }
        let Some((r, c, p)) = found else { break };
        let p_inv = GrElem::single(tables.inverse_index(p));
        let pivot_row = std::mem::take(&mut rows[r]);
        let pivot_b = std::mem::take(&mut b[r]);
        for r2 in 0..m {
            if r2 == r || row_used[r2] {
                continue;
            }
            let Some(e) = row_get(&rows[r2], c as u32) else {
                continue;
            };
            let mult = e.mul(&p_inv, tables);
            rows[r2] = row_add_scaled(&rows[r2], &pivot_row, &mult, tables);
            debug_assert!(row_get(&rows[r2], c as u32).is_none());
            let mut nb = b[r2].clone();
            nb.xor_assign(&mult.mul(&pivot_b, tables));
            b[r2] = nb;
        }
        rows[r] = pivot_row;
        b[r] = pivot_b;
        row_used[r] = true;
        col_used[c] = true;
        pivots.push((r, c, p));
    }
    Eliminated {
        rows,
        b,
        pivots,
        row_used,
        col_used,
    }
}

fn solve_level(
    rows: Vec<SparseRow>,
    b: Vec<GrElem>,
    n: usize,
    k: usize,
    t_min: &mut usize,
    tables_cache: &mut Vec<Option<PermTables>>,
) -> Result<Option<Vec<GrElem>>, Gf2Error> {
    *t_min = (*t_min).min(k);
    if tables_cache[k].is_none() {
        tables_cache[k] = Some(PermTables::new(k)?);
    }
    let tables = tables_cache[k].take().expect("just inserted");
    let m = rows.len();
    let el = eliminate(rows, b, n, &tables);

    // Leftover subsystem on the unused rows and columns.
    let free_cols: Vec<usize> = (0..n).filter(|&c| !el.col_used[c]).collect();
    let mut col_pos = vec![usize::MAX; n];
    for (i, &c) in free_cols.iter().enumerate() {
        col_pos[c] = i;
    }
    let residual_rows: Vec<usize> = (0..m).filter(|&r| !el.row_used[r]).collect();
    let sub_nonzero = residual_rows.iter().any(|&r| !el.rows[r].is_empty());

    let mut x: Vec<GrElem> = vec![GrElem::zero(); n];
    if sub_nonzero {
        debug_assert!(k > 1, "at k = 1 every nonzero entry is a unit");
        let mut sub = GroupRingMatrix::zeros(residual_rows.len(), free_cols.len(), k);
        let mut sub_b = GrVector::zeros(residual_rows.len(), k);
        for (ri, &r) in residual_rows.iter().enumerate() {
            for (c, e) in &el.rows[r] {
                debug_assert!(col_pos[*c as usize] != usize::MAX);
                sub.set_entry(ri, col_pos[*c as usize], e.clone());
            }
            sub_b.set_entry(ri, el.b[r].clone());
        }
        let expanded = expand_scalars(&sub, &tables)?;
        let expanded_b = expand_vector(&sub_b, &tables)?;
        let mut sub_rows: Vec<SparseRow> = vec![Vec::new(); expanded.rows];
        for (r, c, e) in expanded.iter() {
            sub_rows[r].push((c as u32, e.clone()));
        }
        for row in &mut sub_rows {
            row.sort_by_key(|t| t.0);
        }
        let mut sb: Vec<GrElem> = vec![GrElem::zero(); expanded.rows];
        for (i, e) in expanded_b.iter() {
            sb[i] = e.clone();
        }
        let sub_n = expanded.cols;
        let Some(sub_x) = solve_level(sub_rows, sb, sub_n, k - 1, t_min, tables_cache)? else {
            tables_cache[k] = Some(tables);
            return Ok(None);
        };
        let mut sub_vec = GrVector::zeros(sub_n, k - 1);
        for (i, e) in sub_x.into_iter().enumerate() {
            sub_vec.set_entry(i, e);
        }
        let lifted = reassemble(&sub_vec, free_cols.len(), k, &tables);
        for (i, e) in lifted.iter() {
            x[free_cols[i]] = e.clone();
        }
    } else {
        // With a zero leftover matrix, nonzero leftover rhs means the system
        // is inconsistent outright.
        for &r in &residual_rows {
            if !el.b[r].is_zero() {
                tables_cache[k] = Some(tables);
                return Ok(None);
            }
        }
    }

    // Back-substitution in reverse pivot order.
    for &(r, c, p) in el.pivots.iter().rev() {
        let mut acc = el.b[r].clone();
        for (c2, e) in &el.rows[r] {
            let c2 = *c2 as usize;
            if c2 != c && !x[c2].is_zero() {
                acc.xor_assign(&e.mul(&x[c2], &tables));
            }
        }
        x[c] = GrElem::single(tables.inverse_index(p)).mul(&acc, &tables);
    }
    tables_cache[k] = Some(tables);
    Ok(Some(x))
}

/// Solve A·x = b over 𝔽₂[Σₖ] in the right-action description.
///
/// Returns None when the fully descended GF(2) system is inconsistent.
/// Every returned solution is re-checked against the input matrix.
pub fn equivariant_solve(
    a: &GroupRingMatrix,
    b: &GrVector,
    tables: &PermTables,
) -> Result<Option<SolveOutcome>, Gf2Error> {
    if a.rows != b.len || a.k != b.k || a.k != tables.k() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "solve: {}x{} over S{} with rhs {} over S{}",
            a.rows, a.cols, a.k, b.len, b.k
        )));
    }
    let k = a.k;
    let mut rows: Vec<SparseRow> = vec![Vec::new(); a.rows];
    for (r, c, e) in a.iter() {
        rows[r].push((c as u32, e.clone()));
    }
    for row in &mut rows {
        row.sort_by_key(|t| t.0);
    }
    let mut bv: Vec<GrElem> = vec![GrElem::zero(); a.rows];
    for (i, e) in b.iter() {
        bv[i] = e.clone();
    }
    let mut t_min = k;
    let mut cache: Vec<Option<PermTables>> = (0..=k).map(|_| None).collect();
    let Some(xs) = solve_level(rows, bv, a.cols, k, &mut t_min, &mut cache)? else {
        return Ok(None);
    };
    let mut x = GrVector::zeros(a.cols, k);
    for (i, e) in xs.into_iter().enumerate() {
        x.set_entry(i, e);
    }
    let residual = {
        let mut r = a.mul_vec(&x, tables)?;
        r.xor_assign(b);
        r
    };
    assert!(
        residual.is_zero(),
        "equivariant_solve produced a non-solution; this is a bug"
    );
    Ok(Some(SolveOutcome { t_min, x }))
}

/// Fully expand an equivariant system to a plain GF(2) system. Rows and
/// columns are indexed by (position, permutation) pairs. Intended as a
/// brute-force oracle for small k.
pub fn expand_to_gf2(a: &GroupRingMatrix, tables: &PermTables) -> crate::Gf2Matrix {
    let ord = factorial(a.k);
    let mut m = crate::Gf2Matrix::zeros(a.rows * ord, a.cols * ord);
    for (i, j, e) in a.iter() {
        for &g in e.terms() {
            for q in 0..ord as u32 {
                let p = tables.compose_index(g, q);
                m.toggle(i * ord + p as usize, j * ord + q as usize);
            }
        }
    }
    m
}

pub fn vector_to_gf2(v: &GrVector) -> crate::Gf2Vec {
    let ord = factorial(v.k);
    let mut out = crate::Gf2Vec::zeros(v.len * ord);
    for (i, e) in v.iter() {
        for &g in e.terms() {
            out.toggle(i * ord + g as usize);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(k: usize) -> PermTables {
        PermTables::new(k).unwrap()
    }

    #[test]
    fn coset_reps_send_last_point() {
        for k in 2..=5 {
            for r in 0..k {
                assert_eq!(coset_rep(k, r).apply(k - 1), r);
            }
            assert_eq!(coset_rep(k, k - 1), Perm::identity(k));
        }
    }

    #[test]
    fn expand_identity_matrix() {
        let t = tables(3);
        let id = GroupRingMatrix::identity(2, 3, &t);
        let e = expand_scalars(&id, &t).unwrap();
        let t2 = tables(2);
        let id6 = GroupRingMatrix::identity(6, 2, &t2);
        assert_eq!(e.entry_count(), 6);
        for (r, c, elem) in e.iter() {
            assert_eq!(id6.entry(r, c), Some(elem));
        }
    }

    #[test]
    fn expansion_is_functorial() {
        use rand::{Rng, SeedableRng};
        let t = tables(3);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..30 {
            let mut a = GroupRingMatrix::zeros(2, 2, 3);
            let mut x = GrVector::zeros(2, 3);
            for r in 0..2 {
                for c in 0..2 {
                    for p in 0..6u32 {
                        if rng.gen_bool(0.3) {
                            a.toggle(r, c, p);
                        }
                    }
                }
            }
            for i in 0..2 {
                for p in 0..6u32 {
                    if rng.gen_bool(0.3) {
                        x.toggle(i, p);
                    }
                }
            }
            let lhs = {
                let ea = expand_scalars(&a, &t).unwrap();
                let ex = expand_vector(&x, &t).unwrap();
                ea.mul_vec(&ex, &tables(2)).unwrap()
            };
            let rhs = expand_vector(&a.mul_vec(&x, &t).unwrap(), &t).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn solve_single_permutation_diagonal() {
        let t = tables(4);
        let mut a = GroupRingMatrix::zeros(3, 3, 4);
        a.toggle(0, 0, 5);
        a.toggle(1, 1, 17);
        a.toggle(2, 2, t.identity_index());
        let mut b = GrVector::zeros(3, 4);
        b.toggle(0, 3);
        b.toggle(1, 9);
        b.toggle(2, 21);
        let out = equivariant_solve(&a, &b, &t).unwrap().unwrap();
        assert_eq!(out.t_min, 4);
        let mut check = a.mul_vec(&out.x, &t).unwrap();
        check.xor_assign(&b);
        assert!(check.is_zero());
    }

    #[test]
    fn construct_then_solve_roundtrip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for k in [3usize, 4] {
            let t = tables(k);
            let ord = factorial(k) as u32;
            for _ in 0..10 {
                let (m, n) = (rng.gen_range(2..5), rng.gen_range(2..5));
                let mut a = GroupRingMatrix::zeros(m, n, k);
                for r in 0..m {
                    for c in 0..n {
                        for _ in 0..rng.gen_range(0..3) {
                            a.toggle(r, c, rng.gen_range(0..ord));
                        }
                    }
                }
                let mut x0 = GrVector::zeros(n, k);
                for i in 0..n {
                    for _ in 0..rng.gen_range(0..3) {
                        x0.toggle(i, rng.gen_range(0..ord));
                    }
                }
                let b = a.mul_vec(&x0, &t).unwrap();
                let out = equivariant_solve(&a, &b, &t).unwrap();
                let out = out.expect("constructed system must be feasible");
                let mut check = a.mul_vec(&out.x, &t).unwrap();
                check.xor_assign(&b);
                assert!(check.is_zero());
            }
        }
    }

    #[test]
    fn agrees_with_brute_force_gf2() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(99);
        for k in [3usize, 4] {
            let t = tables(k);
            let ord = factorial(k) as u32;
            for _ in 0..15 {
                let (m, n) = (rng.gen_range(1..4), rng.gen_range(1..4));
                let mut a = GroupRingMatrix::zeros(m, n, k);
                for r in 0..m {
                    for c in 0..n {
                        for _ in 0..rng.gen_range(0..3) {
                            a.toggle(r, c, rng.gen_range(0..ord));
                        }
                    }
                }
                let mut b = GrVector::zeros(m, k);
                for i in 0..m {
                    for _ in 0..rng.gen_range(0..3) {
                        b.toggle(i, rng.gen_range(0..ord));
                    }
                }
                let eq = equivariant_solve(&a, &b, &t).unwrap();
                let brute = expand_to_gf2(&a, &t)
                    .solve(&vector_to_gf2(&b))
                    .unwrap();
                assert_eq!(eq.is_some(), brute.is_some(), "feasibility must agree");
            }
        }
    }

    #[test]
    fn infeasible_zero_matrix_nonzero_rhs() {
        let t = tables(3);
        let a = GroupRingMatrix::zeros(2, 2, 3);
        let mut b = GrVector::zeros(2, 3);
        b.toggle(0, 1);
        assert!(equivariant_solve(&a, &b, &t).unwrap().is_none());
    }
}
