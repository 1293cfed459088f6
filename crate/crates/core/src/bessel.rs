//! Integer-order Bessel functions of the first kind.
//!
//! Miller's backward recurrence, normalised with the sum rule
//! `J_0 + 2 * sum_k J_{2k} = 1`. Backward recurrence is the stable
//! direction for `m > x`, so tiny high-order values keep full relative
//! precision.

const RESCALE: f64 = 1e250;

/// `J_0(x) ..= J_{m_max}(x)` for `x >= 0`.
pub fn bessel_j_orders(x: f64, m_max: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and >= 0");
    let mut out = vec![0.0; m_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = m_max.max(x.ceil() as usize);
    let mut start = top + (160.0 * top as f64).sqrt() as usize + 30;
    start += start % 2;

    let mut j_next = 0.0; // J_{k+1}
    let mut j_cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let j_prev = 2.0 * k as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds J_{k-1}
        let order = k - 1;
        if order <= m_max {
            out[order] = j_cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > RESCALE {
            j_cur /= RESCALE;
            j_next /= RESCALE;
            norm /= RESCALE;
            for v in out.iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    norm += j_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Signed-order value using `J_{-m} = (-1)^m J_m`.
pub fn bessel_j(m: i64, x: f64) -> f64 {
    let table = bessel_j_orders(x.abs(), m.unsigned_abs() as usize);
    let mut v = table[m.unsigned_abs() as usize];
    if m < 0 && m % 2 != 0 {
        v = -v;
    }
    if x < 0.0 && m % 2 != 0 {
        v = -v;
    }
    v
}

/// Order beyond which `J_m(x)` is negligible at double precision.
pub fn cutoff_order(x: f64) -> usize {
    let x = x.abs();
    (x + 8.0 * x.cbrt() + 10.0).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument_is_delta() {
        let j = bessel_j_orders(0.0, 5);
        assert_eq!(j, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn tabulated_values() {
        // reference values from an independent library evaluation
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(2, 2.0) - 0.352_834_028_615_637_7).abs() < 1e-15);
        assert!((bessel_j(5, 2.6) - 0.023_207_327_573_907_28).abs() < 1e-14);
    }

    #[test]
    fn negative_order_reflection() {
        for m in 1..6 {
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(bessel_j(-m, 1.4), s * bessel_j(m, 1.4));
        }
    }

    #[test]
    fn sum_rule_holds() {
        for &x in &[0.3, 1.4, 2.6, 10.0, 40.0] {
            let m = cutoff_order(x);
            let j = bessel_j_orders(x, m);
            let s: f64 = j[0] * j[0] + 2.0 * j[1..].iter().map(|v| v * v).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-14, "x = {x}: {s}");
        }
    }

    #[test]
    fn large_order_no_overflow() {
        let j = bessel_j_orders(0.01, 80);
        assert!(j.iter().all(|v| v.is_finite()));
        assert!(j[80].abs() < 1e-200);
    }
}
