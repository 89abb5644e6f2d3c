//! Gauss-Legendre rules and small tensor-product helpers.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial; accurate to
/// machine precision for the small orders used here (n <= 64).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && n <= 256);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&wi| wi * half).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // n-point GL is exact through degree 2n-1.
        let (x, w) = gauss_legendre_on(6, 0.0, 2.0);
        let int: f64 = x.iter().zip(&w).map(|(&t, &wi)| wi * t.powi(11)).sum();
        let exact = 2.0f64.powi(12) / 12.0;
        assert!((int - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn integrates_smooth_bump() {
        let g = |t: f64| {
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        };
        let (x16, w16) = gauss_legendre_on(16, -1.0, 1.0);
        let (x48, w48) = gauss_legendre_on(48, -1.0, 1.0);
        let i16: f64 = x16.iter().zip(&w16).map(|(&t, &wi)| wi * g(t)).sum();
        let i48: f64 = x48.iter().zip(&w48).map(|(&t, &wi)| wi * g(t)).sum();
        assert!((i16 - i48).abs() < 1e-10);
    }
}
