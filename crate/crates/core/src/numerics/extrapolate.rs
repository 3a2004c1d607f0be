//! Polynomial extrapolation of sampled values to a zero step size.

/// Evaluates at `h = 0` the polynomial through `(hs[i], ys[i])` (Neville's
/// scheme). With two samples at `h` and `h/2` this is the classical
/// Richardson step `2y(h/2) − y(h)`.
///
/// # Panics
/// If the slices are empty or of different length.
pub fn to_zero(hs: &[f64], ys: &[f64]) -> f64 {
    assert!(!hs.is_empty() && hs.len() == ys.len(), "need matching samples");
    let mut p = ys.to_vec();
    for k in 1..hs.len() {
        for i in 0..hs.len() - k {
            p[i] = (hs[i + k] * p[i] - hs[i] * p[i + 1]) / (hs[i + k] - hs[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_is_richardson() {
        let y = |h: f64| 3.0 + 2.0 * h;
        assert!((to_zero(&[0.1, 0.05], &[y(0.1), y(0.05)]) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn removes_polynomial_error_terms() {
        let y = |h: f64| 1.5 - h + 4.0 * h * h - h.powi(3);
        let hs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<_> = hs.iter().map(|&h| y(h)).collect();
        assert!((to_zero(&hs, &ys) - 1.5).abs() < 1e-13);
    }
}
