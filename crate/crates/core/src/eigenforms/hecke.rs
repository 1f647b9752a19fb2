//! Exhaustive checks of the Hecke relations on exact coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::eigenform::Eigenform;
use crate::num::{to_f64, Real};

/// Relative slack allowed on the Deligne bound for binary64 rounding.
pub const DELIGNE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HeckeReport {
    pub n: usize,
    pub multiplicative_checked: u64,
    pub multiplicative_failures: u64,
    pub recurrence_checked: u64,
    pub recurrence_failures: u64,
    pub deligne_checked: u64,
    pub deligne_failures: u64,
    pub first_failure: Option<String>,
}

impl HeckeReport {
    pub fn failures(&self) -> u64 {
        self.multiplicative_failures + self.recurrence_failures + self.deligne_failures
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

/// Divisor counts d(n) for 0..=n (d(0) = 0).
pub fn divisor_counts(n: usize) -> Vec<u32> {
    let mut d = vec![0u32; n + 1];
    for i in 1..=n {
        for m in (i..=n).step_by(i) {
            d[m] += 1;
        }
    }
    d
}

/// Primes up to n by the sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i);
            for m in (i * i..=n).step_by(i) {
                composite[m] = true;
            }
        }
    }
    out
}

/// Checks, for every index up to f.len():
/// a(m) a(n) = a(mn) for coprime m, n;
/// a(p) a(p^r) = a(p^(r+1)) + p^(k-1) a(p^(r-1));
/// |lambda(n)| <= d(n) (1 + 1e-12).
pub fn check_hecke_relations<T: Real>(f: &Eigenform<T>) -> HeckeReport {
    let n_max = f.len();
    let mut report = HeckeReport { n: n_max, ..Default::default() };
    let a = f.coefficients();

    // Multiplicativity over coprime pairs 2 <= m < n, m n <= N.
    let mult: Vec<(u64, u64, Option<String>)> = (2..=n_max)
        .into_par_iter()
        .filter(|&m| m * (m + 1) <= n_max)
        .map(|m| {
            let mut checked = 0;
            let mut failed = 0;
            let mut first = None;
            for n in (m + 1)..=(n_max / m) {
                if m.gcd(&n) != 1 {
                    continue;
                }
                checked += 1;
                if &a[m] * &a[n] != a[m * n] {
                    failed += 1;
                    first.get_or_insert_with(|| format!("a({m}) a({n}) != a({})", m * n));
                }
            }
            (checked, failed, first)
        })
        .collect();
    for (c, fl, first) in mult {
        report.multiplicative_checked += c;
        report.multiplicative_failures += fl;
        if report.first_failure.is_none() {
            report.first_failure = first;
        }
    }

    // Prime-power recurrence.
    let k1 = f.weight() - 1;
    for p in primes_up_to(n_max) {
        if p * p > n_max {
            break;
        }
        let pk = BigInt::from(p).pow(k1);
        let mut prev = 1usize; // p^(r-1)
        let mut cur = p; // p^r
        while cur <= n_max / p {
            let next = cur * p;
            report.recurrence_checked += 1;
            if &a[p] * &a[cur] != &a[next] + &pk * &a[prev] {
                report.recurrence_failures += 1;
                report
                    .first_failure
                    .get_or_insert_with(|| format!("prime-power recurrence fails at p = {p}, p^(r+1) = {next}"));
            }
            prev = cur;
            cur = next;
        }
    }

    // Deligne bound.
    let d = divisor_counts(n_max);
    for n in 1..=n_max {
        report.deligne_checked += 1;
        let lam = to_f64(f.lambda(n)).abs();
        if !(lam <= d[n] as f64 * (1.0 + DELIGNE_SLACK)) {
            report.deligne_failures += 1;
            report
                .first_failure
                .get_or_insert_with(|| format!("|lambda({n})| = {lam} exceeds d({n}) = {}", d[n]));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenforms::build_eigenform;

    #[test]
    fn vacuous_for_tiny_n() {
        let f = build_eigenform::<f64>(12, 2).unwrap();
        let f1 = Eigenform::<f64>::from_coefficients(12, f.coefficients()[..2].to_vec()).unwrap();
        let r = check_hecke_relations(&f1);
        assert!(r.passed());
        assert_eq!(r.multiplicative_checked + r.recurrence_checked, 0);
        assert_eq!(r.deligne_checked, 1);
    }

    #[test]
    fn corrupted_coefficient_is_caught() {
        let f = build_eigenform::<f64>(12, 100).unwrap();
        let mut c = f.coefficients().to_vec();
        c[6] += 1;
        let g = Eigenform::<f64>::from_coefficients(12, c).unwrap();
        let r = check_hecke_relations(&g);
        assert!(r.multiplicative_failures >= 1);
        assert!(r.first_failure.unwrap().contains("a(2) a(3)"));
    }

    #[test]
    fn small_sieves() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(divisor_counts(12)[12], 6);
    }

    #[test]
    fn weight_26_thousand() {
        let f = build_eigenform::<f64>(26, 1000).unwrap();
        let r = check_hecke_relations(&f);
        assert!(r.passed(), "{r:?}");
        assert!(r.multiplicative_checked > 1000);
    }
}
