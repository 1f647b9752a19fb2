use rayon::prelude::*;

use super::calpha::c_alpha;
use super::jacobi::jacobi_odd;
use super::query::CfsQuery;
use crate::error::Result;
use crate::harness::report::{config_hash, Check, Mode, Provenance, ReportRow, VerificationReport};
use crate::num::{to_f64, Real};

/// S(X, Y) = sum over odd m <= X and odd n <= Y of (m/n), exactly.
pub fn cfs_sum<T: Real>(q: &CfsQuery<T>) -> i64 {
    let (x, y) = (q.x, q.y);
    (0..x.div_ceil(2))
        .into_par_iter()
        .map(|i| {
            let m = 2 * i + 1;
            (1..=y).step_by(2).map(|n| i64::from(jacobi_odd(m, n))).sum::<i64>()
        })
        .sum()
}

/// Error scale (X Y^{7/16} + Y X^{7/16}) log XY of the comparison.
pub fn cfs_yardstick(x: f64, y: f64) -> f64 {
    (x * y.powf(7.0 / 16.0) + y * x.powf(7.0 / 16.0)) * (x * y).ln()
}

/// Compares S(X, Y) with (2/pi^2) C(Y/X) X^{3/2}.
pub fn cfs_verify<T: Real>(q: &CfsQuery<T>) -> Result<VerificationReport> {
    q.validate()?;
    let c = c_alpha(q.alpha(), q)?;
    let s = cfs_sum(q);
    let (x, y) = (q.x as f64, q.y as f64);
    let prediction = 2.0 / std::f64::consts::PI.powi(2) * to_f64(c.value) * x.powf(1.5);
    let row = ReportRow::new(None, x, y, to_f64(q.alpha()), s as f64, prediction, cfs_yardstick(x, y));
    let check = Check::new(
        "c-alpha forms agree",
        c.agree,
        format!("C({}) = {} vs {} (error bounds {:e}, {:e})", to_f64(c.alpha), to_f64(c.value), to_f64(c.alternate), to_f64(c.error), to_f64(c.alternate_error)),
    );
    let provenance = Provenance::new(config_hash(&(q.x, q.y, q.kmax, to_f64(q.quad_tol)))?, None);
    Ok(VerificationReport::new(Mode::Cfs, vec![row], vec![check], provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfs::c_alpha;

    fn euler_criterion(r: u64, p: u64) -> i64 {
        let (mut base, mut e, mut acc) = (r % p, (p - 1) / 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        match acc {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    fn prime_factors(mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut p = 3;
        while p * p <= n {
            while n % p == 0 {
                out.push(p);
                n /= p;
            }
            p += 2;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    fn is_square(n: u64) -> bool {
        let r = (n as f64).sqrt().round() as u64;
        r * r == n
    }

    fn totient(n: u64) -> i64 {
        let mut ps = prime_factors(n);
        ps.dedup();
        ps.iter().fold(n, |acc, p| acc / p * (p - 1)) as i64
    }

    /// Groups m by residue mod 2n: over a full period of odd residues the
    /// character sums to phi(n) if n is a square and to 0 otherwise.
    fn by_orthogonality(x: u64, y: u64) -> i64 {
        let mut total = 0i64;
        for n in (1..=y).step_by(2) {
            let chi = |m: u64| -> i64 { prime_factors(n).into_iter().map(|p| euler_criterion(m, p)).product() };
            let period = 2 * n;
            let full = x / period;
            let per_period = if is_square(n) { totient(n) } else { 0 };
            total += full as i64 * per_period;
            total += (full * period + 1..=x).step_by(2).map(chi).sum::<i64>();
        }
        total
    }

    #[test]
    fn small_examples() {
        for (x, y, want) in [(1, 1, 1), (3, 3, 3), (5, 5, 3)] {
            assert_eq!(cfs_sum(&CfsQuery::<f64>::new(x, y).unwrap()), want);
        }
    }

    #[test]
    fn equals_orthogonality_reformulation() {
        for (x, y) in [(1u64, 500u64), (500, 1), (37, 411), (500, 500), (499, 256), (128, 333)] {
            let q = CfsQuery::<f64>::new(x, y).unwrap();
            assert_eq!(cfs_sum(&q), by_orthogonality(x, y), "X={x} Y={y}");
        }
    }

    #[test]
    fn verify_report_is_consistent() {
        let q = CfsQuery::<f64>::new(400, 400).unwrap();
        let r = cfs_verify(&q).unwrap();
        assert_eq!(r.rows.len(), 1);
        let row = &r.rows[0];
        assert_eq!(row.residual, row.lhs - row.rhs);
        assert_eq!(row.normalized_residual, row.residual / row.yardstick);
        assert!(r.passed());
        assert!(row.normalized_residual.abs() < 5.0);
    }

    #[test]
    fn short_y_regime() {
        // Y << X: S is close to (2/pi^2) X Y^{1/2}, and C(Y/X) ~ sqrt(Y/X).
        let q = CfsQuery::<f64>::new(20_000, 100).unwrap();
        let s = cfs_sum(&q) as f64;
        let limit = 2.0 / std::f64::consts::PI.powi(2) * 20_000.0 * 10.0;
        let c = c_alpha(q.alpha(), &q).unwrap().value;
        let prediction = 2.0 / std::f64::consts::PI.powi(2) * c * 20_000f64.powf(1.5);
        assert!((prediction / limit - 1.0).abs() < 2e-3);
        assert!((s - prediction).abs() < 0.1 * limit, "S={s} prediction={prediction}");
    }
}
