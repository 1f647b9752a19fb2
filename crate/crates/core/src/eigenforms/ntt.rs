//! Number-theoretic transforms over ~62-bit primes of the form c·2^32 + 1,
//! with Montgomery arithmetic and Garner CRT reconstruction.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// (prime, primitive root). Every prime is c·2^32 + 1 < 2^62.
pub const NTT_PRIMES: [(u64, u64); 16] = [
    (4611685941117976577, 3),
    (4611685692009873409, 19),
    (4611685606110527489, 3),
    (4611685318347718657, 5),
    (4611685232448372737, 3),
    (4611685219563470849, 3),
    (4611685125074190337, 5),
    (4611685090714451969, 3),
    (4611685039174844417, 3),
    (4611685021994975233, 5),
    (4611684738527133697, 7),
    (4611684691282493441, 3),
    (4611684674102624257, 5),
    (4611684609678114817, 5),
    (4611684588203278337, 3),
    (4611684274670665729, 7),
];

/// Largest transform length supported by every prime.
pub const MAX_LOG_LEN: u32 = 32;

/// Bits of modulus contributed by each prime (floor of log2 p).
const BITS_PER_PRIME: u64 = 61;

#[derive(Clone, Copy, Debug)]
pub struct Montgomery {
    p: u64,
    /// -p^{-1} mod 2^64
    pinv_neg: u64,
    /// 2^128 mod p
    r2: u64,
}

impl Montgomery {
    pub fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < (1 << 62));
        // Newton iteration for p^{-1} mod 2^64.
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Self { p, pinv_neg: inv.wrapping_neg(), r2 }
    }

    #[inline(always)]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.pinv_neg);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    #[inline(always)]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.reduce(a as u128)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn pow(&self, base_mont: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        let mut b = base_mont;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }
}

/// Plain modular multiplication, used outside hot loops.
#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

/// In-place cyclic NTT of length 2^log_n over values in Montgomery form.
fn transform(a: &mut [u64], mont: &Montgomery, root: u64, invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let p = mont.p;
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let g = mont.to_mont(root);
    let mut len = 2;
    while len <= n {
        let mut w_len = mont.pow(g, (p - 1) / len as u64);
        if invert {
            w_len = mont.pow(w_len, p - 2);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut w = mont.to_mont(1);
        for _ in 0..half {
            twiddles.push(w);
            w = mont.mul(w, w_len);
        }
        for chunk in a.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let x = *u;
                let y = mont.mul(*v, tw);
                *u = mont.add(x, y);
                *v = mont.sub(x, y);
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = mont.pow(mont.to_mont(n as u64), p - 2);
        for x in a.iter_mut() {
            *x = mont.mul(*x, n_inv);
        }
    }
}

/// Residue of a signed big integer modulo p, in [0, p).
pub fn residue(x: &BigInt, p: u64) -> u64 {
    let digits = x.magnitude().to_u64_digits();
    let mut acc: u128 = 0;
    for &d in digits.iter().rev() {
        acc = ((acc << 64) | d as u128) % p as u128;
    }
    let r = acc as u64;
    if x.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

/// Exact product of two integer sequences (full linear convolution,
/// optionally truncated to `out_len`) via multi-prime NTT and CRT.
pub fn convolve(x: &[BigInt], y: &[BigInt], out_len: usize) -> Result<Vec<BigInt>> {
    if x.is_empty() || y.is_empty() || out_len == 0 {
        return Ok(vec![BigInt::zero(); out_len]);
    }
    let bits = |s: &[BigInt]| s.iter().map(|v| v.bits()).max().unwrap_or(0);
    let shorter = x.len().min(y.len()) as u64;
    let len_bits = 64 - shorter.leading_zeros() as u64;
    // |z_i| < 2^(bx + by + len_bits); need modulus > 2 |z_i| for signed recovery.
    let needed_bits = bits(x) + bits(y) + len_bits + 2;
    let nprimes = needed_bits.div_ceil(BITS_PER_PRIME) as usize;
    if nprimes > NTT_PRIMES.len() {
        return Err(Error::CrtCapacity {
            needed_bits,
            capacity_bits: BITS_PER_PRIME * NTT_PRIMES.len() as u64,
            available: NTT_PRIMES.len(),
        });
    }
    let full = x.len() + y.len() - 1;
    let size = full.next_power_of_two();
    if size.trailing_zeros() > MAX_LOG_LEN {
        return Err(Error::Length(format!("transform length {size} exceeds 2^{MAX_LOG_LEN}")));
    }
    let primes = &NTT_PRIMES[..nprimes];
    let residues: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&(p, g)| {
            let mont = Montgomery::new(p);
            let load = |s: &[BigInt]| {
                let mut v = vec![0u64; size];
                for (slot, c) in v.iter_mut().zip(s) {
                    *slot = mont.to_mont(residue(c, p));
                }
                v
            };
            let mut fx = load(x);
            let mut fy = load(y);
            transform(&mut fx, &mont, g, false);
            transform(&mut fy, &mont, g, false);
            for (a, b) in fx.iter_mut().zip(&fy) {
                *a = mont.mul(*a, *b);
            }
            transform(&mut fx, &mont, g, true);
            fx.truncate(out_len.min(full));
            fx.iter().map(|&v| mont.from_mont(v)).collect()
        })
        .collect();
    let crt = Garner::new(primes.iter().map(|&(p, _)| p).collect());
    let mut out: Vec<BigInt> = (0..out_len.min(full))
        .into_par_iter()
        .map(|i| {
            let rs: Vec<u64> = residues.iter().map(|r| r[i]).collect();
            crt.reconstruct_signed(&rs)
        })
        .collect();
    out.resize(out_len, BigInt::zero());
    Ok(out)
}

/// Mixed-radix (Garner) reconstruction for a fixed prime set.
pub struct Garner {
    primes: Vec<u64>,
    /// inv[i][j] = p_j^{-1} mod p_i for j < i
    inv: Vec<Vec<u64>>,
    modulus: BigInt,
    half: BigInt,
}

impl Garner {
    pub fn new(primes: Vec<u64>) -> Self {
        let inv = (0..primes.len())
            .map(|i| (0..i).map(|j| powmod(primes[j] % primes[i], primes[i] - 2, primes[i])).collect())
            .collect();
        let modulus = primes.iter().fold(BigInt::one(), |m, &p| m * BigInt::from(p));
        let half = &modulus >> 1;
        Self { primes, inv, modulus, half }
    }

    pub fn reconstruct_signed(&self, residues: &[u64]) -> BigInt {
        let k = self.primes.len();
        let mut digits = vec![0u64; k];
        for i in 0..k {
            let p = self.primes[i];
            let mut v = residues[i] % p;
            for j in 0..i {
                // v = (v - d_j) * p_j^{-1} mod p_i
                let dj = digits[j] % p;
                v = if v >= dj { v - dj } else { v + p - dj };
                v = mulmod(v, self.inv[i][j], p);
            }
            digits[i] = v;
        }
        let mut x = BigInt::from(digits[k - 1]);
        for i in (0..k - 1).rev() {
            x = x * BigInt::from(self.primes[i]) + BigInt::from(digits[i]);
        }
        if x > self.half {
            x - &self.modulus
        } else {
            x
        }
    }
}
