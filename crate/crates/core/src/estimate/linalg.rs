//! Fixed 4x4 symmetric positive-definite helpers for the logit solver.

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

/// Lower Cholesky factor, or `None` if the matrix is not numerically
/// positive definite.
fn cholesky(a: &Mat4) -> Option<Mat4> {
    let mut l = [[0.0; 4]; 4];
    let scale = (0..4).map(|i| a[i][i].abs()).fold(0.0f64, f64::max);
    for i in 0..4 {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 1e-13 * scale.max(f64::MIN_POSITIVE)) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

pub fn cholesky_inverse(a: &Mat4) -> Option<Mat4> {
    let l = cholesky(a)?;
    // Solve L L^T x = e_k column by column.
    let mut inv = [[0.0; 4]; 4];
    for k in 0..4 {
        let mut y = [0.0; 4];
        for i in 0..4 {
            let mut s = if i == k { 1.0 } else { 0.0 };
            for j in 0..i {
                s -= l[i][j] * y[j];
            }
            y[i] = s / l[i][i];
        }
        let mut x = [0.0; 4];
        for i in (0..4).rev() {
            let mut s = y[i];
            for j in (i + 1)..4 {
                s -= l[j][i] * x[j];
            }
            x[i] = s / l[i][i];
        }
        for i in 0..4 {
            inv[i][k] = x[i];
        }
    }
    Some(inv)
}
