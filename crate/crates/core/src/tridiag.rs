//! Direct elimination for the symmetric tridiagonal systems of the implicit
//! substeps.

use crate::error::{Error, Result};
use crate::grid::{FaceField, Field};

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    /// `I - tau * L` where `L` is the zero-flux operator of [`crate::grid::div_flux`].
    pub fn implicit_diffusion(kappa: &FaceField, dx: f64, tau: f64) -> Result<Self> {
        kappa.check_elliptic()?;
        let k = kappa.interior();
        let n = k.len() + 1;
        let c = tau / (dx * dx);
        let mut diag = vec![1.0; n];
        let mut off = Vec::with_capacity(n - 1);
        for (j, &kj) in k.iter().enumerate() {
            diag[j] += c * kj;
            diag[j + 1] += c * kj;
            off.push(-c * kj);
        }
        Ok(Self { diag, off })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Thomas algorithm. A non-positive pivot means the matrix is not
    /// positive definite and is reported as a scheme breakdown.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        debug_assert_eq!(rhs.len(), n);
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if !(pivot > 0.0) {
            return Err(Error::SchemeBreakdown { row: 0, pivot });
        }
        c[0] = if n > 1 { self.off[0] / pivot } else { 0.0 };
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            let lower = self.off[i - 1];
            pivot = self.diag[i] - lower * c[i - 1];
            if !(pivot > 0.0) {
                return Err(Error::SchemeBreakdown { row: i, pivot });
            }
            if i + 1 < n {
                c[i] = self.off[i] / pivot;
            }
            d[i] = (rhs[i] - lower * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

/// Solves `(I - tau * div_flux(kappa, .)) x = rhs`.
pub fn solve_implicit_diffusion(kappa: &FaceField, tau: f64, rhs: &Field) -> Result<Field> {
    let m = SymTridiag::implicit_diffusion(kappa, rhs.grid().dx(), tau)?;
    let x = m.solve(rhs.values())?;
    Field::from_values(*rhs.grid(), x)
}
