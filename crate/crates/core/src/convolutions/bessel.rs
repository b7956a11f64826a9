//! Normalized Bessel function `Lambda_s(t) = Gamma(s+1) (2/t)^s J_s(t)`,
//! the kernel of the Kingman convolution.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::quad::{integrate, Tolerance};

const SERIES_LIMIT: f64 = 20.0;

pub fn normalized_bessel(s: f64, t: f64) -> f64 {
    let t = t.abs();
    if t <= SERIES_LIMIT {
        series(s, t)
    } else if s <= 1.0 {
        hankel(s, t)
    } else {
        poisson_integral(s, t)
    }
}

/// `sum_k (-t^2/4)^k / (k! (s+1)_k)`.
fn series(s: f64, t: f64) -> f64 {
    let z = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    for k in 1..400 {
        let k = k as f64;
        term *= z / (k * (s + k));
        // Kahan summation; the alternating terms peak near e^t.
        let y = term - comp;
        let next = sum + y;
        comp = (next - sum) - y;
        sum = next;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > 0.5 * t {
            break;
        }
    }
    sum
}

/// Large-argument expansion of `J_s`, rescaled.
fn hankel(s: f64, t: f64) -> f64 {
    let mu = 4.0 * s * s;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * t);
        }
        if a.abs() > last {
            break;
        }
        last = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let omega = t - 0.5 * s * PI - 0.25 * PI;
    let j = (2.0 / (PI * t)).sqrt() * (p * omega.cos() - q * omega.sin());
    (ln_gamma(s + 1.0) + s * (2.0 / t).ln()).exp() * j
}

/// `E cos(t W)` with `W` on `[-1, 1]` of density proportional to `(1 - w^2)^(s - 1/2)`.
fn poisson_integral(s: f64, t: f64) -> f64 {
    let log_norm = ln_gamma(s + 1.0) - ln_gamma(s + 0.5) - 0.5 * PI.ln();
    let breaks: Vec<f64> = {
        let n = (t / PI).ceil() as usize;
        (1..n).map(|k| k as f64 * PI / t).collect()
    };
    let f = |w: f64| (log_norm + (s - 0.5) * (1.0 - w * w).ln()).exp() * (t * w).cos();
    let tol = Tolerance::TIGHT;
    let mut total = 0.0;
    let mut a = 0.0;
    for b in breaks.into_iter().chain(std::iter::once(1.0)) {
        total += integrate(f, a, b, tol).value;
        a = b;
    }
    2.0 * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_is_sinc() {
        for &t in &[0.5, 3.0, 19.0, 25.0, 60.0] {
            let v = normalized_bessel(0.5, t);
            assert!((v - t.sin() / t).abs() < 1e-10, "t={t}: {v}");
        }
    }

    #[test]
    fn minus_half_order_is_cosine() {
        for &t in &[0.5, 3.0, 19.0, 25.0, 60.0] {
            let v = normalized_bessel(-0.5, t);
            assert!((v - t.cos()).abs() < 1e-9, "t={t}: {v}");
        }
    }

    #[test]
    fn regimes_agree_at_the_switch() {
        for &s in &[1.5, 3.0] {
            let a = series(s, SERIES_LIMIT);
            let b = poisson_integral(s, SERIES_LIMIT);
            assert!((a - b).abs() < 1e-9, "s={s}: {a} vs {b}");
        }
        let a = series(0.8, SERIES_LIMIT);
        let b = hankel(0.8, SERIES_LIMIT);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn order_zero_known_value() {
        // J_0(2.404825557695773) = 0
        assert!(normalized_bessel(0.0, 2.404_825_557_695_773).abs() < 1e-14);
    }
}
