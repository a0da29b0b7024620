//! Minimal-degree kernel vectors over `F_q[T]`.
//!
//! A kernel vector of degree at most `delta` is an `F_q`-linear condition on
//! its `t (delta + 1)` coefficients, so scanning `delta = 0, 1, ...` finds the
//! exact minimum.

use crate::error::{Error, Result};
use crate::field::FpPoly;
use crate::linalg::{fq_nullspace, fq_rref};

fn max_degree(rows: &[Vec<FpPoly>]) -> usize {
    rows.iter().flatten().filter_map(|a| a.degree()).max().unwrap_or(0)
}

/// `F_q` coefficient matrix of `c -> A c` restricted to `deg c <= delta`.
/// Unknown `(j, e)` (coordinate `j`, coefficient of `T^e`) sits at column
/// `j (delta + 1) + (delta - e)`, so each block runs from the top coefficient down.
fn expand(rows: &[Vec<FpPoly>], t: usize, delta: usize, q: u64) -> Vec<Vec<u64>> {
    let dmax = max_degree(rows);
    let width = t * (delta + 1);
    let mut out = Vec::new();
    for row in rows {
        for k in 0..=dmax + delta {
            let mut eq = vec![0u64; width];
            for (j, a) in row.iter().enumerate() {
                for e in 0..=delta.min(k) {
                    let coef = a.coeff(k - e);
                    if coef != 0 {
                        let col = j * (delta + 1) + (delta - e);
                        eq[col] = (eq[col] + coef) % q;
                    }
                }
            }
            if eq.iter().any(|&x| x != 0) {
                out.push(eq);
            }
        }
    }
    out
}

fn collapse(v: &[u64], t: usize, delta: usize) -> Vec<FpPoly> {
    (0..t)
        .map(|j| {
            let block = &v[j * (delta + 1)..(j + 1) * (delta + 1)];
            FpPoly::new(block.iter().rev().copied().collect())
        })
        .collect()
}

fn solutions(rows: &[Vec<FpPoly>], t: usize, delta: usize, q: u64) -> Vec<Vec<u64>> {
    let m = expand(rows, t, delta, q);
    fq_nullspace(&m, t * (delta + 1), q)
}

fn degree_cap(rows: &[Vec<FpPoly>]) -> usize {
    rows.len() * max_degree(rows) + 1
}

/// Minimal-degree kernel vector; among those, the first nonzero coordinate is
/// as early as possible, monic and smallest, and later coordinates are
/// lexicographically smallest.
pub fn small_kernel_vector(q: u64, rows: &[Vec<FpPoly>]) -> Result<Vec<FpPoly>> {
    let t = rows.first().map(|r| r.len()).ok_or(Error::NoKernel)?;
    for delta in 0..=degree_cap(rows) {
        let mut basis = solutions(rows, t, delta, q);
        if basis.is_empty() {
            continue;
        }
        let width = t * (delta + 1);
        let natural: Vec<usize> = (0..width).collect();
        let mut probe = basis.clone();
        let pivots = fq_rref(&mut probe, q, &natural);
        let lead_block = pivots[0] / (delta + 1);
        let block: Vec<usize> = (lead_block * (delta + 1)..(lead_block + 1) * (delta + 1)).collect();
        let order: Vec<usize> = block.iter().copied().chain(natural.iter().copied().filter(|c| !block.contains(c))).collect();
        let pivots = fq_rref(&mut basis, q, &order);
        let last = pivots.iter().rposition(|p| block.contains(p)).expect("leading block has a pivot");
        return Ok(collapse(&basis[last], t, delta));
    }
    Err(Error::NoKernel)
}

/// Kernel basis over `F_q(T)` built greedily from low-degree solutions.
pub fn small_kernel_basis(q: u64, rows: &[Vec<FpPoly>]) -> Result<Vec<Vec<FpPoly>>> {
    use crate::field::{FunctionField, GlobalField};
    let field = FunctionField::new(q)?;
    let t = rows.first().map(|r| r.len()).ok_or(Error::NoKernel)?;
    let want = t - crate::linalg::rank(&field, rows);
    if want == 0 {
        return Err(Error::NoKernel);
    }
    let mut chosen: Vec<Vec<FpPoly>> = Vec::new();
    for delta in 0..=degree_cap(rows) {
        let mut basis = solutions(rows, t, delta, q);
        let order: Vec<usize> = (0..t * (delta + 1)).collect();
        fq_rref(&mut basis, q, &order);
        for v in basis.iter().rev() {
            let cand = collapse(v, t, delta);
            let mut trial = chosen.clone();
            trial.push(cand.clone());
            if crate::linalg::rank(&field, &trial) == trial.len() {
                let lead = cand.iter().find(|c| !c.is_zero()).unwrap().clone();
                let (u, _) = field.normalize(&lead);
                let ui = field.unit_inverse(&u);
                chosen.push(cand.iter().map(|c| field.mul(c, &ui)).collect());
                if chosen.len() == want {
                    return Ok(chosen);
                }
            }
        }
    }
    Err(Error::NoKernel)
}
