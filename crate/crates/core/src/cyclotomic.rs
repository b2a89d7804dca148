//! Integer polynomials, just enough for mask-polynomial divisibility tests.

use std::collections::BTreeMap;

/// Dense integer polynomial, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<i128>);

impl Poly {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    /// `Σ_{d∈D} x^d`.
    pub fn mask(digits: &[u64]) -> Self {
        let degree = digits.iter().copied().max().unwrap_or(0) as usize;
        let mut coeffs = vec![0; degree + 1];
        for &d in digits {
            coeffs[d as usize] += 1;
        }
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval_at_one(&self) -> i128 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![0i128; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("nonzero divisor");
        assert_eq!(divisor.0[dd], 1, "divisor must be monic");
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Poly(Vec::new()), Poly::new(rem));
        }
        let mut quot = vec![0i128; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd];
            if c == 0 {
                continue;
            }
            quot[i] = c;
            for (j, d) in divisor.0.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn divisible_by(&self, divisor: &Poly) -> bool {
        self.div_rem_monic(divisor).1.is_zero()
    }
}

/// `Φ_n` by the quotient recurrence `Φ_n = (x^n − 1) / Π_{d|n, d<n} Φ_d`.
pub fn cyclotomic(n: u64) -> Poly {
    let mut memo = BTreeMap::new();
    cyclotomic_memo(n, &mut memo)
}

fn cyclotomic_memo(n: u64, memo: &mut BTreeMap<u64, Poly>) -> Poly {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut numerator = vec![0i128; n as usize + 1];
    numerator[0] = -1;
    numerator[n as usize] = 1;
    let mut denominator = Poly(vec![1]);
    for d in 1..n {
        if n.is_multiple_of(d) {
            denominator = denominator.mul(&cyclotomic_memo(d, memo));
        }
    }
    let (q, r) = Poly::new(numerator).div_rem_monic(&denominator);
    debug_assert!(r.is_zero());
    memo.insert(n, q.clone());
    q
}

/// `(p, a)` when `n = p^a` with `p` prime and `a ≥ 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = smallest_prime_factor(n);
    let mut m = n;
    let mut a = 0;
    while m.is_multiple_of(p) {
        m /= p;
        a += 1;
    }
    (m == 1).then_some((p, a))
}

pub fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

/// Distinct prime factors in ascending order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 1 {
        let p = smallest_prime_factor(n);
        out.push(p);
        while n.is_multiple_of(p) {
            n /= p;
        }
    }
    out
}

/// Prime powers `s` with `Φ_s | D(x)`, ascending. Every `s` with `φ(s) ≤ deg D` is tried.
pub fn prime_power_divisors(mask: &Poly) -> Vec<u64> {
    let degree = mask.degree().unwrap_or(0) as u64;
    let mut out = Vec::new();
    // φ(p^a) = p^(a−1)(p−1) ≥ p^a/2, so s ≤ 2·deg + 1 covers every candidate.
    for s in 2..=(2 * degree + 1) {
        let Some((p, _)) = prime_power(s) else {
            continue;
        };
        let phi = s / p * (p - 1);
        if phi > degree {
            continue;
        }
        if mask.divisible_by(&cyclotomic_prime_power(p, s)) {
            out.push(s);
        }
    }
    out
}

/// `Φ_{p^a}(x) = Σ_{j<p} x^{j·p^(a−1)}`.
fn cyclotomic_prime_power(p: u64, s: u64) -> Poly {
    let step = (s / p) as usize;
    let mut coeffs = vec![0i128; step * (p as usize - 1) + 1];
    for j in 0..p as usize {
        coeffs[j * step] = 1;
    }
    Poly::new(coeffs)
}
