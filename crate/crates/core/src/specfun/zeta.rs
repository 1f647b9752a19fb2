use crate::error::{Error, Result};
use crate::num::{from_usize, lit, Real};

/// B_{2j} / (2j)! for j = 1..=8.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Riemann zeta at real s > 1 by Euler–Maclaurin corrected partial sums.
pub fn zeta_real<T: Real>(s: T) -> Result<T> {
    if !(s > T::one()) {
        return Err(Error::Domain(format!("zeta_real needs s > 1, got {s}")));
    }
    const N: usize = 16;
    let n = from_usize::<T>(N);
    let mut sum = T::zero();
    for j in (1..N).rev() {
        sum = sum + from_usize::<T>(j).powf(-s);
    }
    let n_pow = n.powf(-s);
    sum = sum + n * n_pow / (s - T::one()) + lit::<T>(0.5) * n_pow;
    // sum_j B_2j/(2j)! * s(s+1)...(s+2j-2) * N^(-s-2j+1)
    let mut rising = s;
    let mut npow = n_pow / n;
    let n2 = n * n;
    for (j, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum = sum + lit::<T>(b) * rising * npow;
        let m = from_usize::<T>(2 * j + 1);
        rising = rising * (s + m) * (s + m + T::one());
        npow = npow / n2;
    }
    Ok(sum)
}
