//! Quadrature on uniformly spaced samples.

/// Integral of uniformly sampled values with spacing `h`.
///
/// Composite Simpson when the interval count is even; otherwise Simpson on
/// the leading panels and Simpson 3/8 on the last three intervals, so cubics
/// are integrated exactly for any count >= 2. One interval falls back to the
/// trapezoid rule.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        _ => {
            let intervals = n - 1;
            if intervals.is_multiple_of(2) {
                simpson_even(values, h)
            } else {
                let split = n - 4;
                let head = if split > 0 {
                    simpson_even(&values[..=split], h)
                } else {
                    0.0
                };
                let v = &values[split..];
                head + 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3])
            }
        }
    }
}

fn simpson_even(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even)
}

/// `L^2` norm over `[0, (n-1) h]` of uniformly sampled values.
pub fn l2_norm(values: &[f64], h: f64) -> f64 {
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    simpson(&squares, h).max(0.0).sqrt()
}

/// Second-order finite-difference derivative of uniform samples (central in
/// the interior, one-sided three-point at the ends).
pub fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    if n < 2 {
        return d;
    }
    if n == 2 {
        let s = (values[1] - values[0]) / h;
        return vec![s, s];
    }
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(n: usize, f: impl Fn(f64) -> f64) -> (Vec<f64>, f64) {
        let h = 1.0 / (n - 1) as f64;
        ((0..n).map(|i| f(i as f64 * h)).collect(), h)
    }

    #[test]
    fn exact_for_cubics_even_and_odd_counts() {
        let p = |x: f64| 1.0 - 2.0 * x + 3.0 * x * x - 4.0 * x * x * x;
        let exact = 1.0 - 1.0 + 1.0 - 1.0;
        for n in [3, 4, 5, 6, 7, 50, 51] {
            let (v, h) = sample(n, p);
            assert!((simpson(&v, h) - exact).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn trapezoid_for_one_interval() {
        assert_eq!(simpson(&[1.0, 3.0], 0.5), 1.0);
    }

    proptest! {
        #[test]
        fn cubic_rows_integrate_exactly(c in prop::array::uniform4(-5.0f64..5.0), n in 3usize..80) {
            let (v, h) = sample(n, |x| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x);
            let exact = c[0] + c[1] / 2.0 + c[2] / 3.0 + c[3] / 4.0;
            prop_assert!((simpson(&v, h) - exact).abs() <= 1e-12);
        }
    }
}
