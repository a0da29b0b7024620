//! Exact linear algebra helpers: elimination over `F_q`, ranks over the
//! fraction field of `O_K`, and integral LLL reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::fqt::inv_mod;
use crate::field::GlobalField;

/// Row-reduces `rows` over `F_q` into reduced echelon form, visiting columns
/// in `order`. Zero rows are dropped; returns the pivot column of each row.
pub fn fq_rref(rows: &mut Vec<Vec<u64>>, q: u64, order: &[usize]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in order {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = inv_mod(rows[r][c], q);
        for v in rows[r].iter_mut() {
            *v = ((*v as u128 * inv as u128) % q as u128) as u64;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = ((*x as u128 + (q - f) as u128 * y as u128) % q as u128) as u64;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : M x = 0}` over `F_q`.
pub fn fq_nullspace(matrix: &[Vec<u64>], ncols: usize, q: u64) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = matrix.to_vec();
    let order: Vec<usize> = (0..ncols).collect();
    let pivots = fq_rref(&mut rows, q, &order);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (row, &pc) in rows.iter().zip(&pivots) {
            v[pc] = (q - row[free]) % q;
        }
        basis.push(v);
    }
    basis
}

/// Rank over the fraction field of `O_K`, by fraction-free elimination.
pub fn rank<F: GlobalField>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut m: Vec<Vec<F::Elem>> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..m.len()).find(|&i| !field.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, pr);
        let pivot = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            if field.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = field.sub(&field.mul(x, &pivot[c]), &field.mul(&f, y));
            }
            let g = field.gcd_all(row);
            if !field.is_zero(&g) && !field.is_unit(&g) {
                for x in row.iter_mut() {
                    *x = field.div_exact(x, &g);
                }
            }
        }
        r += 1;
    }
    r
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    // nearest integer to num/den, den > 0
    let n2: BigInt = num * 2 + den;
    let d2: BigInt = den * 2;
    n2.div_floor(&d2)
}

/// Integral LLL reduction (delta = 3/4) of linearly independent rows.
pub fn lll(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    if n <= 1 {
        return;
    }
    // d[i+1] = d_i in 1-based notation; lam[k][j] for j < k.
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = dot(&basis[0], &basis[0]);
    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&basis[k], &basis[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(!u.is_zero(), "lll: dependent vectors");
                    d[k + 1] = u;
                }
            }
        }
        reduce(basis, &mut lam, &d, k, k - 1);
        let lhs = BigInt::from(4) * &d[k + 1] * &d[k - 1];
        let rhs = BigInt::from(3) * &d[k] * &d[k] - BigInt::from(4) * &lam[k][k - 1] * &lam[k][k - 1];
        if lhs < rhs {
            swap(basis, &mut lam, &mut d, k, kmax);
            k = (k - 1).max(1);
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                reduce(basis, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
}

fn reduce(basis: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    let two_lam: BigInt = lam[k][l].abs() * 2;
    if two_lam <= d[l + 1] {
        return;
    }
    let q = round_div(&lam[k][l], &d[l + 1]);
    let bl = basis[l].clone();
    for (x, y) in basis[k].iter_mut().zip(&bl) {
        *x -= &q * y;
    }
    lam[k][l] -= &q * &d[l + 1];
    for i in 0..l {
        let t = &q * &lam[l][i];
        lam[k][i] -= t;
    }
}

fn swap(basis: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, kmax: usize) {
    basis.swap(k, k - 1);
    for j in 0..k.saturating_sub(1) {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
        lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k + 1];
    }
    d[k] = b;
}

/// Floating Gram-Schmidt data of an integer basis: `(mu, |b*_i|^2)`.
pub fn gso_f64(basis: &[Vec<BigInt>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = basis.len();
    let b: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| v.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect())
        .collect();
    let mut mu = vec![vec![0.0; n]; n];
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            let m = b[i].iter().zip(&bstar[j]).map(|(x, y)| x * y).sum::<f64>() / norms[j];
            mu[i][j] = m;
            for (x, y) in v.iter_mut().zip(&bstar[j]) {
                *x -= m * y;
            }
        }
        norms[i] = v.iter().map(|x| x * x).sum();
        bstar.push(v);
    }
    (mu, norms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn z(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn gram_schmidt(b: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let n = b.len();
        let br: Vec<Vec<BigRational>> =
            b.iter().map(|v| v.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        let mut star: Vec<Vec<BigRational>> = Vec::new();
        let mut norms = Vec::new();
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            let mut v = br[i].clone();
            for j in 0..i {
                let d: BigRational = br[i].iter().zip(&star[j]).map(|(x, y)| x * y).sum();
                mu[i][j] = d / &norms[j];
                for (x, y) in v.iter_mut().zip(&star[j]) {
                    *x -= &mu[i][j] * y;
                }
            }
            norms.push(v.iter().map(|x| x * x).sum::<BigRational>());
            star.push(v);
        }
        (mu, norms)
    }

    fn gram_det(b: &[Vec<BigInt>]) -> BigRational {
        gram_schmidt(b).1.into_iter().fold(BigRational::one(), |a, x| a * x)
    }

    #[test]
    fn lll_output_satisfies_lovasz_and_size_conditions() {
        let orig = z(&[&[1, 0, 0, 1345], &[0, 1, 0, 35], &[0, 0, 1, 154]]);
        let mut b = orig.clone();
        lll(&mut b);
        let (mu, norms) = gram_schmidt(&b);
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
        for i in 0..b.len() {
            for j in 0..i {
                assert!(mu[i][j].abs() <= half, "size reduction {i} {j}");
            }
            if i > 0 {
                let lhs = &norms[i];
                let rhs = (&delta - &mu[i][i - 1] * &mu[i][i - 1]) * &norms[i - 1];
                assert!(*lhs >= rhs, "lovasz at {i}");
            }
        }
        assert_eq!(gram_det(&b), gram_det(&orig));
    }

    #[test]
    fn nullspace_over_f2() {
        // x + y = 0, y + z = 0 over F_2
        let m = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let ns = fq_nullspace(&m, 3, 2);
        assert_eq!(ns, vec![vec![1, 1, 1]]);
    }
}
