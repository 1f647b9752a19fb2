//! Gauss–Legendre rules.

use crate::num::{lit, Real};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1],
/// found by Newton iteration on P_n in binary64.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        if 2 * i + 1 == n {
            x = 0.0;
            dp = legendre_with_derivative(n, 0.0).1;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes.into_iter().map(lit).collect(), weights.into_iter().map(lit).collect())
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over [a, b] with the supplied rule.
pub fn integrate_rule<T: Real, F: FnMut(T) -> T>(rule: &(Vec<T>, Vec<T>), a: T, b: T, mut f: F) -> T {
    let half = lit::<T>(0.5);
    let mid = half * (a + b);
    let rad = half * (b - a);
    let mut acc = T::zero();
    for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
        acc = acc + w * f(mid + rad * x);
    }
    acc * rad
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in [1usize, 2, 5, 16, 40] {
            let rule = gauss_legendre::<f64>(n);
            for deg in 0..2 * n {
                let got = integrate_rule(&rule, 0.0, 1.0, |x| x.powi(deg as i32));
                let want = 1.0 / (deg as f64 + 1.0);
                assert!((got - want).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn weights_sum_to_two_and_nodes_are_sorted() {
        let (x, w) = gauss_legendre::<f64>(33);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(x[16], 0.0);
    }
}
