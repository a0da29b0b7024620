use super::{GlobalField, PrimeOfK};

/// Primes `<= bound` by a segmented sieve of Eratosthenes.
pub fn segmented_sieve(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let root = (bound as f64).sqrt() as u64 + 1;
    let mut small = vec![true; (root + 1) as usize];
    let mut base = Vec::new();
    for i in 2..=root {
        if small[i as usize] {
            base.push(i);
            let mut j = i * i;
            while j <= root {
                small[j as usize] = false;
                j += i;
            }
        }
    }
    const SEGMENT: u64 = 1 << 16;
    let mut out = Vec::new();
    let mut lo = 2u64;
    while lo <= bound {
        let hi = (lo + SEGMENT - 1).min(bound);
        let mut mark = vec![true; (hi - lo + 1) as usize];
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = p * p.max(lo.div_ceil(p));
            while start <= hi {
                mark[(start - lo) as usize] = false;
                start += p;
            }
        }
        out.extend(mark.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| lo + i as u64));
        lo = hi + 1;
    }
    out
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Kahan-compensated sum.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// `w(P) = sum_{p in P} log N(p) / N(p)`.
pub fn weight_w<E>(primes: &[PrimeOfK<E>]) -> f64 {
    kahan_sum(primes.iter().map(|p| p.log_norm() / p.norm as f64))
}

/// `sum_{p in P} log N(p)`.
pub fn log_norm_sum<E>(primes: &[PrimeOfK<E>]) -> f64 {
    kahan_sum(primes.iter().map(|p| p.log_norm()))
}

/// A finite set of primes, sorted by norm then generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSet<E> {
    pub primes: Vec<PrimeOfK<E>>,
}

impl<E: Ord + Clone> PrimeSet<E> {
    pub fn new(mut primes: Vec<PrimeOfK<E>>) -> Self {
        primes.sort();
        primes.dedup();
        PrimeSet { primes }
    }

    pub fn up_to<F: GlobalField<Elem = E>>(field: &F, bound: u64) -> Self {
        PrimeSet::new(field.primes_up_to(bound))
    }

    pub fn weight(&self) -> f64 {
        weight_w(&self.primes)
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PrimeOfK<E>> {
        self.primes.iter()
    }

    pub fn max_norm(&self) -> u64 {
        self.primes.iter().map(|p| p.norm).max().unwrap_or(1)
    }

    pub fn filter(&self, mut keep: impl FnMut(&PrimeOfK<E>) -> bool) -> Self {
        PrimeSet { primes: self.primes.iter().filter(|p| keep(p)).cloned().collect() }
    }

    pub fn contains(&self, p: &PrimeOfK<E>) -> bool {
        self.primes.binary_search(p).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let fast = segmented_sieve(200_000);
        let slow: Vec<u64> = (2..=200_000u64)
            .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn miller_rabin_agrees() {
        for n in 0..5000u64 {
            let slow = n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), slow, "{n}");
        }
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }
}
