//! Gauss–Hermite quadrature for expectations over a normal step.

use std::f64::consts::PI;

/// Nodes used for every normal-step expectation.
pub const NODES: usize = 31;

/// Nodes and weights for `∫ f(x) e^{-x²} dx`, found by Newton iteration on
/// the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0f64;
    let nf = n as f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    let mut out: Vec<(f64, f64)> = x.into_iter().zip(w).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Offsets and probability weights approximating `N(mean, sd²)`.
pub fn normal_points(mean: f64, sd: f64, n: usize) -> Vec<(f64, f64)> {
    let norm = PI.sqrt();
    gauss_hermite(n)
        .into_iter()
        .map(|(x, w)| (mean + std::f64::consts::SQRT_2 * sd * x, w / norm))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_and_moments() {
        let pts = normal_points(0.0, 1.0, NODES);
        assert_eq!(pts.len(), 31);
        let m = |k: i32| pts.iter().map(|(x, w)| w * x.powi(k)).sum::<f64>();
        assert!((m(0) - 1.0).abs() < 1e-13);
        assert!(m(1).abs() < 1e-13);
        assert!((m(2) - 1.0).abs() < 1e-12);
        assert!((m(4) - 3.0).abs() < 1e-11);
        assert!((m(6) - 15.0).abs() < 1e-10);
        // a node sits at zero for odd orders
        assert!(pts[15].0.abs() < 1e-14);
    }

    #[test]
    fn small_orders() {
        let two = gauss_hermite(2);
        assert!((two[1].0 - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((two[0].1 - PI.sqrt() / 2.0).abs() < 1e-14);
    }
}
