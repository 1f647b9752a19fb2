use crate::error::{Error, Result};

/// Jacobi symbol (m/n) for odd n >= 1.
pub fn jacobi(m: u64, n: u64) -> Result<i8> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::Domain(format!("Jacobi symbol needs an odd positive modulus, got {n}")));
    }
    Ok(jacobi_odd(m, n))
}

/// Binary reciprocity algorithm; `n` must be odd.
#[inline]
pub(crate) fn jacobi_odd(m: u64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let (mut a, mut n) = (m % n, n);
    let mut sign = 1i8;
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        if twos % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    fn legendre_by_squares(m: u64, p: u64) -> i8 {
        let r = m % p;
        if r == 0 {
            0
        } else if (1..p).any(|x| x * x % p == r) {
            1
        } else {
            -1
        }
    }

    fn factor(mut n: u64) -> Vec<u64> {
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

    #[test]
    fn small_values() {
        assert_eq!(jacobi(1, 1).unwrap(), 1);
        assert_eq!(jacobi(0, 1).unwrap(), 1);
        assert_eq!(jacobi(3, 3).unwrap(), 0);
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert!(jacobi(3, 4).is_err());
        assert!(jacobi(3, 0).is_err());
    }

    #[test]
    fn matches_product_of_legendre_symbols() {
        for n in (1..400u64).step_by(2) {
            for m in 0..400u64 {
                let expect: i8 = factor(n).into_iter().map(|p| legendre_by_squares(m, p)).product();
                assert_eq!(jacobi(m, n).unwrap(), expect, "({m}/{n})");
            }
        }
    }

    #[test]
    fn multiplicative_in_both_arguments() {
        for n in (1..=200u64).step_by(2) {
            for a in 1..=200u64 {
                for b in [1u64, 2, 3, 7, 10, 199] {
                    assert_eq!(jacobi(a * b, n).unwrap(), jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
                }
            }
        }
        for m in 0..=200u64 {
            for n1 in (1..=200u64).step_by(2) {
                for n2 in [1u64, 3, 5, 9, 15, 199] {
                    assert_eq!(jacobi(m, n1 * n2).unwrap(), jacobi(m, n1).unwrap() * jacobi(m, n2).unwrap());
                }
            }
        }
    }

    #[test]
    fn reciprocity_and_zero_pattern() {
        for m in (1..=200u64).step_by(2) {
            for n in (1..=200u64).step_by(2) {
                let (jm, jn) = (jacobi(m, n).unwrap(), jacobi(n, m).unwrap());
                assert_eq!(jm == 0, gcd(m, n) > 1);
                if jm != 0 {
                    let flip = if m % 4 == 3 && n % 4 == 3 { -1 } else { 1 };
                    assert_eq!(jm, flip * jn);
                }
            }
        }
    }
}
