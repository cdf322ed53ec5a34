//! Log-gamma and integer-order Bessel functions of the first kind, with a
//! table of their positive zeros.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest Bessel order with tabulated zeros.
pub const MAX_BESSEL_ORDER: usize = 5;
/// Number of tabulated zeros per order.
pub const MAX_BESSEL_ZERO_INDEX: usize = 20;

const SERIES_LIMIT: f64 = 2.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection; only reached for 0 < x < 1/2 in this crate
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// J_m(x) for integer order m ≥ 0 and x ≥ 0.
///
/// Ascending power series up to x = 2, Miller's backward recurrence with the
/// Neumann normalisation J₀ + 2ΣJ₂ₖ = 1 beyond.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(m, -x);
        return if m % 2 == 0 { v } else { -v };
    }
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        bessel_series(m, x)
    } else {
        bessel_miller(m, x)
    }
}

fn bessel_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=m {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + m as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > half {
            break;
        }
        k += 1.0;
        if k > 300.0 {
            break;
        }
    }
    sum
}

fn bessel_miller(m: usize, x: f64) -> f64 {
    let top = (m as f64).max(x);
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    start += start % 2;
    let tox = 2.0 / x;
    let (mut jp, mut j) = (0.0_f64, 1e-30_f64);
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        let jm = k as f64 * tox * j - jp;
        jp = j;
        j = jm;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
        // j now holds the unnormalised J_{k-1}
        let idx = k - 1;
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * j;
        }
        if idx == m {
            wanted = j;
        }
    }
    norm += j;
    wanted / norm
}

/// d/dx J_m(x).
pub fn bessel_j_prime(m: usize, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
    }
}

fn compute_zeros(m: usize) -> [f64; MAX_BESSEL_ZERO_INDEX] {
    let mut zeros = [0.0; MAX_BESSEL_ZERO_INDEX];
    let step = 0.25;
    let mut a = m as f64 + 1e-3;
    let mut fa = bessel_j(m, a);
    let mut found = 0;
    while found < MAX_BESSEL_ZERO_INDEX {
        let b = a + step;
        let fb = bessel_j(m, b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            zeros[found] = refine_zero(m, a, b);
            found += 1;
        }
        a = b;
        fa = fb;
    }
    zeros
}

fn refine_zero(m: usize, mut lo: f64, mut hi: f64) -> f64 {
    let flo = bessel_j(m, lo);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        let fm = bessel_j(m, mid);
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..20 {
        let dx = bessel_j(m, x) / bessel_j_prime(m, x);
        let next = x - dx;
        if !(lo..=hi).contains(&next) {
            break;
        }
        x = next;
        if dx.abs() <= 1e-16 * x {
            break;
        }
    }
    x
}

fn zero_table() -> &'static [[f64; MAX_BESSEL_ZERO_INDEX]; MAX_BESSEL_ORDER + 1] {
    static TABLE: OnceLock<[[f64; MAX_BESSEL_ZERO_INDEX]; MAX_BESSEL_ORDER + 1]> = OnceLock::new();
    TABLE.get_or_init(|| std::array::from_fn(compute_zeros))
}

/// k-th positive zero j_{m,k} of J_m, for m ≤ 5 and 1 ≤ k ≤ 20.
pub fn bessel_zero(m: usize, k: usize) -> Result<f64> {
    if m > MAX_BESSEL_ORDER || k == 0 || k > MAX_BESSEL_ZERO_INDEX {
        return Err(Error::out_of_range(
            "Bessel zero index",
            format!("(m, k) = ({m}, {k}); supported m ≤ {MAX_BESSEL_ORDER}, 1 ≤ k ≤ {MAX_BESSEL_ZERO_INDEX}"),
        ));
    }
    Ok(zero_table()[m][k - 1])
}

/// j_{0,1}, the first zero of J₀.
pub fn j01() -> f64 {
    zero_table()[0][0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Bessel's integral J_m(x) = (1/π)∫₀^π cos(mτ − x sin τ) dτ. The
    /// trapezoid rule is spectrally accurate for this periodic integrand.
    fn bessel_integral(m: usize, x: f64) -> f64 {
        let n = 400;
        let h = PI / n as f64;
        let mut s = 0.5 * (1.0 + (m as f64 * PI).cos());
        for i in 1..n {
            let t = i as f64 * h;
            s += (m as f64 * t - x * t.sin()).cos();
        }
        s * h / PI
    }

    #[test]
    fn gamma_identities() {
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(1.5), PI.sqrt() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(2.5), 3.0 * PI.sqrt() / 4.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(30.0), (1..30).map(|k| (k as f64).ln()).sum::<f64>(), max_relative = 1e-14);
    }

    #[test]
    fn series_and_recurrence_agree_with_integral() {
        for m in 0..=6 {
            for &x in &[0.3, 2.0, 7.5, 11.9, 12.1, 18.0, 33.3, 70.0] {
                let a = bessel_j(m, x);
                let b = bessel_integral(m, x);
                assert!((a - b).abs() < 2e-14, "J_{m}({x}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn known_zeros() {
        assert_relative_eq!(bessel_zero(0, 1).unwrap(), 2.404_825_557_695_773, max_relative = 1e-13);
        assert_relative_eq!(bessel_zero(1, 1).unwrap(), 3.831_705_970_207_512, max_relative = 1e-13);
        assert_relative_eq!(bessel_zero(0, 2).unwrap(), 5.520_078_110_286_311, max_relative = 1e-13);
        assert_relative_eq!(bessel_zero(5, 1).unwrap(), 8.771_483_815_959_954, max_relative = 1e-13);
    }

    #[test]
    fn residuals_and_interlacing() {
        for m in 0..=MAX_BESSEL_ORDER {
            for k in 1..=MAX_BESSEL_ZERO_INDEX {
                let z = bessel_zero(m, k).unwrap();
                assert!(bessel_j(m, z).abs() < 1e-12, "residual at j_{m},{k}");
                if k < MAX_BESSEL_ZERO_INDEX {
                    assert!(z < bessel_zero(m, k + 1).unwrap());
                }
                if m < MAX_BESSEL_ORDER {
                    let next = bessel_zero(m + 1, k).unwrap();
                    assert!(z < next);
                    if k < MAX_BESSEL_ZERO_INDEX {
                        assert!(next < bessel_zero(m, k + 1).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(bessel_zero(6, 1).is_err());
        assert!(bessel_zero(0, 0).is_err());
        assert!(bessel_zero(0, 21).is_err());
    }
}
