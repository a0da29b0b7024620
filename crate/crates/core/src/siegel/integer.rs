//! Small kernel vectors over `Z`: unimodular column elimination gives a basis
//! of the full integer kernel lattice, LLL shortens it, and a bounded
//! enumeration pins down the smallest sup-norm vector.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{gso_f64, lll};

/// Node budget for the sup-norm enumeration.
const ENUM_BUDGET: usize = 400_000;

/// Basis of `{c in Z^t : A c = 0}` via unimodular column operations on `A`.
pub fn integer_kernel_basis(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let t = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    // u[c] is column c of the transform, stored as a row vector.
    let mut u: Vec<Vec<BigInt>> = (0..t)
        .map(|i| (0..t).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut k = 0;
    for r in 0..m.len() {
        if k == t {
            break;
        }
        for c in k + 1..t {
            if m[r][c].is_zero() {
                continue;
            }
            let x = m[r][k].clone();
            let y = m[r][c].clone();
            let eg = x.extended_gcd(&y);
            let (g, a, b) = (eg.gcd, eg.x, eg.y);
            let xg = &x / &g;
            let yg = &y / &g;
            combine(&mut m, &mut u, k, c, &a, &b, &yg, &xg);
        }
        if !m[r][k].is_zero() {
            k += 1;
        }
    }
    u.split_off(k)
}

/// col_k <- a col_k + b col_c ; col_c <- -yg col_k + xg col_c
#[allow(clippy::too_many_arguments)]
fn combine(
    m: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    k: usize,
    c: usize,
    a: &BigInt,
    b: &BigInt,
    yg: &BigInt,
    xg: &BigInt,
) {
    for row in m.iter_mut() {
        let (p, q) = (row[k].clone(), row[c].clone());
        row[k] = a * &p + b * &q;
        row[c] = xg * &q - yg * &p;
    }
    let (p, q) = (u[k].clone(), u[c].clone());
    u[k] = p.iter().zip(&q).map(|(x, y)| a * x + b * y).collect();
    u[c] = p.iter().zip(&q).map(|(x, y)| xg * y - yg * x).collect();
}

pub fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

/// Negates so the first nonzero entry is positive.
pub fn canonical_sign(mut v: Vec<BigInt>) -> Vec<BigInt> {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in v.iter_mut() {
            *x = -&*x;
        }
    }
    v
}

/// Tie-break order: earliest nonzero coordinate first, then lexicographic.
pub fn tie_break_cmp(a: &[BigInt], b: &[BigInt]) -> Ordering {
    let fa = a.iter().position(|x| !x.is_zero());
    let fb = b.iter().position(|x| !x.is_zero());
    fa.cmp(&fb).then_with(|| a.cmp(b))
}

struct Enumerator<'a> {
    basis: &'a [Vec<BigInt>],
    /// The basis as machine integers when every entry fits in `i64`.
    small: Option<Vec<Vec<i64>>>,
    mu: Vec<Vec<f64>>,
    norms: Vec<f64>,
    coeffs: Vec<i64>,
    best: BigInt,
    /// Current winner under the tie-break among vectors of norm `best`.
    pick: Vec<BigInt>,
    radius2: f64,
    nodes: usize,
    exhausted: bool,
}

impl Enumerator<'_> {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn offer(&mut self) {
        if self.coeffs.iter().all(|&c| c == 0) {
            return;
        }
        let t = self.basis[0].len();
        if let Some(small) = &self.small {
            // Screen in i128 and only materialise candidates that can win.
            let mut acc = vec![0i128; t];
            for (&c, b) in self.coeffs.iter().zip(small) {
                if c != 0 {
                    for (x, &y) in acc.iter_mut().zip(b) {
                        *x += c as i128 * y as i128;
                    }
                }
            }
            let h = acc.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
            if BigInt::from(h) > self.best {
                return;
            }
        }
        let mut v = vec![BigInt::zero(); t];
        for (c, b) in self.coeffs.iter().zip(self.basis) {
            if *c != 0 {
                let cb = BigInt::from(*c);
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &cb * y;
                }
            }
        }
        let h = sup_norm(&v);
        match h.cmp(&self.best) {
            Ordering::Less => {
                self.best = h.clone();
                self.pick = canonical_sign(v);
                let hb = h.to_f64().unwrap();
                self.radius2 = t as f64 * hb * hb * (1.0 + 1e-9) + 1e-6;
            }
            Ordering::Equal => {
                let v = canonical_sign(v);
                if tie_break_cmp(&v, &self.pick) == Ordering::Less {
                    self.pick = v;
                }
            }
            Ordering::Greater => {}
        }
    }

    fn walk(&mut self, level: usize, partial: f64) {
        if self.nodes >= ENUM_BUDGET {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        let n = self.dim();
        let center: f64 = -(level + 1..n).map(|j| self.coeffs[j] as f64 * self.mu[j][level]).sum::<f64>();
        let room = self.radius2 - partial;
        if room < 0.0 {
            return;
        }
        let span = (room / self.norms[level]).sqrt();
        let lo = (center - span).ceil() as i64;
        let hi = (center + span).floor() as i64;
        for c in lo..=hi {
            let diff = c as f64 - center;
            let p = partial + diff * diff * self.norms[level];
            if p > self.radius2 {
                continue;
            }
            self.coeffs[level] = c;
            if level == 0 {
                // Leaves count against the budget too.
                self.nodes += 1;
                if self.nodes >= ENUM_BUDGET {
                    self.exhausted = true;
                }
                self.offer();
            } else {
                self.walk(level - 1, p);
            }
            if self.exhausted {
                break;
            }
        }
        self.coeffs[level] = 0;
    }
}

/// Smallest sup-norm nonzero vector of a lattice (within the node budget),
/// with the canonical tie-break applied.
pub fn shortest_sup_vector(basis: &[Vec<BigInt>]) -> (Vec<BigInt>, bool) {
    let mut start = basis
        .iter()
        .map(|b| canonical_sign(b.clone()))
        .min_by(|a, b| sup_norm(a).cmp(&sup_norm(b)).then_with(|| tie_break_cmp(a, b)))
        .expect("nonempty basis");
    let best = sup_norm(&start);
    let bf = best.to_f64().unwrap_or(f64::MAX);
    let t = basis[0].len();
    if !bf.is_finite() || bf > 1e12 {
        return (start, false);
    }
    let (mu, norms) = gso_f64(basis);
    let small = basis.iter().map(|b| b.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>()).collect();
    let mut e = Enumerator {
        basis,
        small,
        mu,
        norms,
        coeffs: vec![0; basis.len()],
        best,
        pick: start.clone(),
        radius2: t as f64 * bf * bf * (1.0 + 1e-9) + 1e-6,
        nodes: 0,
        exhausted: false,
    };
    let n = basis.len();
    e.walk(n - 1, 0.0);
    start = e.pick;
    (start, !e.exhausted)
}

pub fn small_kernel_vector(rows: &[Vec<BigInt>]) -> Result<Vec<BigInt>> {
    let mut basis = integer_kernel_basis(rows);
    if basis.is_empty() {
        return Err(Error::NoKernel);
    }
    lll(&mut basis);
    Ok(shortest_sup_vector(&basis).0)
}

pub fn small_kernel_basis(rows: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let mut basis = integer_kernel_basis(rows);
    if basis.is_empty() {
        return Err(Error::NoKernel);
    }
    lll(&mut basis);
    Ok(basis.into_iter().map(canonical_sign).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn apply(rows: &[Vec<BigInt>], c: &[BigInt]) -> Vec<BigInt> {
        rows.iter().map(|r| r.iter().zip(c).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn kernel_basis_is_saturated() {
        // 2x + 4y + 6z = 0 has kernel basis of determinant 1 in Z^3 / lattice terms:
        // (1,1,-1) and (2,-1,0) are in it; (1,1,-1) must be reachable.
        let rows = vec![z(&[2, 4, 6])];
        let b = integer_kernel_basis(&rows);
        assert_eq!(b.len(), 2);
        for v in &b {
            assert!(apply(&rows, v).iter().all(|x| x.is_zero()));
        }
        let v = small_kernel_vector(&rows).unwrap();
        assert_eq!(sup_norm(&v), BigInt::one());
    }

    #[test]
    fn documented_examples() {
        assert_eq!(small_kernel_vector(&[z(&[1, 1, 1])]).unwrap(), z(&[1, -1, 0]));
        assert_eq!(small_kernel_vector(&[z(&[1, 2, 3])]).unwrap(), z(&[1, 1, -1]));
    }

    #[test]
    fn full_rank_has_no_kernel() {
        let rows = vec![z(&[1, 0]), z(&[0, 1])];
        assert!(matches!(small_kernel_vector(&rows), Err(Error::NoKernel)));
    }
}
