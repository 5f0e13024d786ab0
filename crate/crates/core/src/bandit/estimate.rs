use crate::error::Result;
use crate::graph::Path;
use crate::linalg::pinv_apply;
use crate::weight_push::CooccurrenceMatrix;

/// Loss estimate `observed * C^+ p`.
///
/// The pseudo-inverse keeps eigenvalues above `tol * (largest eigenvalue)`
/// and zeroes the rest.
pub fn estimate_loss(c: &CooccurrenceMatrix, path: &Path, observed: f64, tol: f64) -> Result<Vec<f64>> {
    let p = path.indicator(c.dim());
    let mut x = pinv_apply(c.as_mat(), &p, tol)?;
    for v in x.iter_mut() {
        *v *= observed;
    }
    Ok(x)
}
