//! Fast versions of the module property suites, run by the `selftest` mode.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::Check;
use crate::cfs::{c_alpha, cfs_sum, jacobi, CfsQuery};
use crate::eigenforms::{build_eigenform, check_hecke_relations, read_coefficients, write_coefficients, IntegerSeries};
use crate::error::Result;
use crate::scs::{scs_direct, scs_fast, SCSQuery};
use crate::specfun::{w_k, w_k_residue_series, ContourSpec};
use crate::transition::sym2_l1_cross_checked;

const SEED: u64 = 0x5c5_1ab;

fn check(name: &str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check::new(name, passed, detail),
        Err(e) => Check::new(name, false, format!("error: {e}")),
    }
}

fn hecke() -> Result<(bool, String)> {
    let mut detail = Vec::new();
    let mut ok = true;
    for (k, n) in [(12, 5000), (26, 2000)] {
        let r = check_hecke_relations(&build_eigenform::<f64>(k, n)?);
        ok &= r.failures() == 0;
        detail.push(format!("k={k} N={n}: {} failures", r.failures()));
    }
    Ok((ok, detail.join("; ")))
}

fn series_product() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let trials = 8;
    let mut mismatches = 0;
    for _ in 0..trials {
        let len = 300;
        let draw = |rng: &mut ChaCha8Rng| -> IntegerSeries {
            IntegerSeries::new((0..len).map(|_| BigInt::from(rng.gen_range(-1i64 << 40..1i64 << 40))).collect())
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let fast = a.mul(&b)?;
        if fast.coeffs() != a.mul_schoolbook(&b, 2 * len - 1).coeffs() {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("{mismatches}/{trials} random products differ from schoolbook")))
}

fn contour() -> Result<(bool, String)> {
    let base = ContourSpec::<f64>::default();
    let mut worst = 0.0f64;
    for x in [0.1, 1.0, 10.0] {
        let vals: Vec<f64> =
            [1.1, 1.5, 2.5].iter().map(|&s| w_k(12, x, &base.with_sigma(s)).map(|v| v.value)).collect::<Result<_>>()?;
        for v in &vals {
            worst = worst.max((v / vals[1] - 1.0).abs());
        }
    }
    let line = w_k(12, 1.0, &base)?.value;
    let residues = w_k_residue_series(12, 1.0f64, 80)?.value;
    let res_gap = (residues / line - 1.0).abs();
    Ok((worst <= 1e-8 && res_gap <= 1e-6, format!("abscissa spread {worst:.2e}, residue gap {res_gap:.2e}")))
}

fn symmetric_square() -> Result<(bool, String)> {
    let f = build_eigenform::<f64>(12, 12_000)?;
    let c = sym2_l1_cross_checked(&f)?;
    Ok((c.agree, format!("smoothed {} vs slope {} (gap {:.2e})", c.smoothed.value, c.slope.value, c.relative_gap())))
}

fn fast_sums() -> Result<(bool, String)> {
    let q = SCSQuery::new(300.0, 12.0)?;
    let f = build_eigenform::<f64>(12, crate::scs::corollary1_n_trunc(12, &q)?)?;
    let (fast, direct) = (scs_fast(&f, &q)?, scs_direct(&f, &q)?);
    let rel = ((fast - direct) / direct).abs();
    Ok((rel < 1e-9, format!("fast {fast} vs direct {direct}, relative {rel:.2e}")))
}

fn cache_round_trip() -> Result<(bool, String)> {
    let f = build_eigenform::<f64>(16, 500)?;
    let mut buf = Vec::new();
    write_coefficients(&mut buf, 16, f.coefficients())?;
    let (w, coeffs) = read_coefficients(buf.as_slice(), std::path::Path::new("<memory>"))?;
    Ok((w == 16 && coeffs == f.coefficients(), format!("{} coefficients", coeffs.len() - 1)))
}

fn jacobi_symbols() -> Result<(bool, String)> {
    let mut bad = 0;
    for n in (1..=99u64).step_by(2) {
        for a in 1..=60u64 {
            for b in [2u64, 3, 5, 11] {
                if jacobi(a * b, n)? != jacobi(a, n)? * jacobi(b, n)? {
                    bad += 1;
                }
            }
        }
    }
    let sums = [(1, 1, 1), (3, 3, 3), (5, 5, 3)]
        .iter()
        .all(|&(x, y, s)| CfsQuery::<f64>::new(x, y).map(|q| cfs_sum(&q) == s).unwrap_or(false));
    Ok((bad == 0 && sums, format!("{bad} multiplicativity failures; small sums ok: {sums}")))
}

fn transition_forms() -> Result<(bool, String)> {
    let q = CfsQuery::<f64>::new(1, 1)?;
    let mut worst = 0.0f64;
    let mut agree = true;
    for alpha in [0.03, 0.3, 3.0, 30.0] {
        let c = c_alpha(alpha, &q)?;
        agree &= c.agree;
        worst = worst.max(c.discrepancy() / c.value.max(1.0));
    }
    Ok((agree, format!("max relative discrepancy {worst:.2e}")))
}

pub fn selftest_checks() -> Vec<Check> {
    vec![
        check("hecke relations", hecke()),
        check("series product", series_product()),
        check("contour independence", contour()),
        check("symmetric-square cross-check", symmetric_square()),
        check("fast shifted sums", fast_sums()),
        check("cache round trip", cache_round_trip()),
        check("jacobi symbol", jacobi_symbols()),
        check("transition function forms", transition_forms()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_selftests_pass() {
        for c in selftest_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
