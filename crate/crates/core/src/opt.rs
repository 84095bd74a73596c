//! Small numerical utilities shared across modules: Nelder–Mead simplex
//! minimization, safeguarded root bracketing/bisection, and Simpson
//! quadrature on sampled data.

/// Nelder–Mead minimization of `f` from `x0` with initial simplex scale
/// `scale`, at most `max_iter` iterations.  Returns `(argmin, min)`.
/// Infinite/NaN objective values are treated as +inf (infeasible).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    scale: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let clean = |v: f64| if v.is_finite() { v } else { f64::INFINITY };
    if n == 0 {
        let v = clean(f(x0));
        return (x0.to_vec(), v);
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = clean(f(x0));
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += if x[i].abs() > 1.0 { scale * x[i].abs() } else { scale };
        let v = clean(f(&x));
        simplex.push((x, v));
    }
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if worst.is_finite() && (worst - best).abs() <= 1e-12 * (1.0 + best.abs()) {
            break;
        }
        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for (x, _) in simplex.iter().take(n) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[n].0)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = clean(f(&reflect));
        if fr < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + gamma * (c - w))
                .collect();
            let fe = clean(f(&expand));
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let fc = clean(f(&contract));
            if fc < simplex[n].1 {
                simplex[n] = (contract, fc);
            } else {
                // Shrink toward the best vertex.
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best_x
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    let v = clean(f(&x));
                    *entry = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    simplex.swap_remove(0)
}

/// Bisection for a root of `f` on `[lo, hi]` given `f(lo)` and `f(hi)` of
/// opposite signs; converges to relative tolerance `rel_tol` on the interval.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * (1.0 + mid.abs()) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Composite-Simpson integral of uniformly sampled values over `[a, b]`.
/// Requires an odd number of samples (even number of panels); falls back to
/// trapezoid on the last panel otherwise.
pub fn simpson_uniform(values: &[f64], a: f64, b: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2);
    let h = (b - a) / (n - 1) as f64;
    let m = if n % 2 == 1 { n } else { n - 1 };
    let mut total = values[0] + values[m - 1];
    for (i, v) in values.iter().enumerate().take(m - 1).skip(1) {
        total += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    total *= h / 3.0;
    if n % 2 == 0 {
        total += 0.5 * h * (values[n - 2] + values[n - 1]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_quadratic_bowl() {
        let (x, v) = nelder_mead(
            |x| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.25).powi(2),
            &[0.0, 0.0],
            0.5,
            400,
        );
        assert!((x[0] - 1.5).abs() < 1e-5 && (x[1] + 0.25).abs() < 1e-5);
        assert!(v < 1e-9);
    }

    #[test]
    fn nelder_mead_with_infeasible_region() {
        // Minimize x^2 subject to x > 0.3 encoded as +inf outside.
        let (x, _) = nelder_mead(
            |x| if x[0] <= 0.3 { f64::INFINITY } else { x[0] * x[0] },
            &[2.0],
            0.5,
            300,
        );
        assert!((x[0] - 0.3).abs() < 1e-3);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let n = 101;
        let (a, b) = (0.0, 2.0);
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let x = a + (b - a) * i as f64 / (n - 1) as f64;
                x * x * x - x
            })
            .collect();
        let exact = 2.0f64;
        assert!((simpson_uniform(&vals, a, b) - exact).abs() < 1e-12);
    }
}
