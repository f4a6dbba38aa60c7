//! Uniform cell-centred grid on an interval together with the discrete
//! operators used by the solver and the estimate checks.
//!
//! Cells carry values at their centres `x_i = x_left + (i + 1/2) dx`. The
//! homogeneous Neumann condition is imposed through mirrored ghost cells
//! (`phi_{-1} = phi_0`, `phi_n = phi_{n-1}`), which makes the flux through both
//! boundary faces exactly zero.

use crate::error::{Error, Result};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_left: f64,
    x_right: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_left: f64, x_right: f64, n: usize) -> Result<Self> {
        if !(x_left.is_finite() && x_right.is_finite()) || x_left >= x_right {
            return Err(Error::InvalidGrid(format!(
                "interval ({x_left}, {x_right}) is empty or not finite"
            )));
        }
        if n < MIN_CELLS {
            return Err(Error::InvalidGrid(format!("n below minimum {MIN_CELLS}")));
        }
        Ok(Self { x_left, x_right, n })
    }

    /// The unit interval with `n` cells.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n)
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// |Omega|.
    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.center(i))
    }

    /// Position of face `j` (`j = 0..=n`); faces 0 and n are the boundary.
    pub fn face(&self, j: usize) -> f64 {
        self.x_left + j as f64 * self.dx()
    }
}

/// One scalar value per cell of a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid1D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid1D, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.n()],
        }
    }

    pub fn from_values(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at the cell centres.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.centers().map(f).collect(),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        debug_assert_eq!(self.len(), other.len());
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: f64, other: &Field, beta: f64) -> Field {
        self.zip_map(other, |a, b| alpha * a + beta * b)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Coefficient values on the `n + 1` faces of a grid.
///
/// Entry `j` sits between cells `j - 1` and `j`. The two boundary entries are
/// kept for bookkeeping but never contribute to a flux.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    values: Vec<f64>,
}

impl FaceField {
    pub fn from_values(grid: &Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() + 1 {
            return Err(Error::LengthMismatch {
                expected: grid.n() + 1,
                got: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub fn constant(grid: &Grid1D, c: f64) -> Self {
        Self {
            values: vec![c; grid.n() + 1],
        }
    }

    /// Arithmetic mean of the adjacent cell values; boundary faces copy the
    /// neighbouring cell.
    pub fn from_cells(cells: &Field) -> Self {
        let v = cells.values();
        let n = v.len();
        let mut values = Vec::with_capacity(n + 1);
        values.push(v[0]);
        values.extend(v.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        values.push(v[n - 1]);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interior faces only (`1..n`), the ones that carry flux.
    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    pub(crate) fn check_elliptic(&self) -> Result<()> {
        for (j, &k) in self.values.iter().enumerate().skip(1).take(self.values.len() - 2) {
            if !(k > 0.0) {
                return Err(Error::NonElliptic { face: j, value: k });
            }
        }
        Ok(())
    }
}

/// Central difference with mirrored ghost cells.
pub fn gradient(phi: &Field) -> Field {
    let v = phi.values();
    let n = v.len();
    let inv = 0.5 / phi.grid().dx();
    let mut out = Vec::with_capacity(n);
    out.push((v[1] - v[0]) * inv);
    out.extend(v.windows(3).map(|w| (w[2] - w[0]) * inv));
    out.push((v[n - 1] - v[n - 2]) * inv);
    Field {
        grid: *phi.grid(),
        values: out,
    }
}

/// Conservative discretisation of `(kappa phi_x)_x` with zero flux through the
/// boundary faces.
pub fn div_flux(kappa: &FaceField, phi: &Field) -> Result<Field> {
    let n = phi.len();
    if kappa.values.len() != n + 1 {
        return Err(Error::LengthMismatch {
            expected: n + 1,
            got: kappa.values.len(),
        });
    }
    kappa.check_elliptic()?;
    Ok(div_flux_unchecked(kappa, phi))
}

pub(crate) fn div_flux_unchecked(kappa: &FaceField, phi: &Field) -> Field {
    let v = phi.values();
    let n = v.len();
    let dx = phi.grid().dx();
    let inv_dx2 = 1.0 / (dx * dx);
    let k = &kappa.values;
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        let flux = k[i + 1] * (v[i + 1] - v[i]) * inv_dx2;
        out[i] += flux;
        out[i + 1] -= flux;
    }
    Field {
        grid: *phi.grid(),
        values: out,
    }
}

/// Three-point second difference with Neumann ghosts (`div_flux` with unit
/// coefficient).
pub fn second_difference(phi: &Field) -> Field {
    div_flux_unchecked(&FaceField::constant(phi.grid(), 1.0), phi)
}

/// Midpoint rule.
pub fn integrate(phi: &Field) -> f64 {
    phi.values().iter().sum::<f64>() * phi.grid().dx()
}

pub fn lp_norm(phi: &Field, p: f64) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "lp_norm needs finite p >= 1, got {p}");
    let dx = phi.grid().dx();
    if p == 1.0 {
        return phi.values().iter().map(|v| v.abs()).sum::<f64>() * dx;
    }
    if p == 2.0 {
        return (phi.values().iter().map(|v| v * v).sum::<f64>() * dx).sqrt();
    }
    // Scale by the sup norm so large p does not overflow.
    let sup = sup_norm(phi);
    if sup == 0.0 || !sup.is_finite() {
        return sup;
    }
    let s: f64 = phi.values().iter().map(|v| (v.abs() / sup).powf(p)).sum();
    sup * (s * dx).powf(1.0 / p)
}

pub fn sup_norm(phi: &Field) -> f64 {
    phi.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit(n: usize) -> Grid1D {
        Grid1D::unit(n).unwrap()
    }

    #[test]
    fn grid_rejects_small_n() {
        let err = Grid1D::unit(4).unwrap_err();
        assert!(err.to_string().contains("n below minimum 8"));
        assert!(Grid1D::new(1.0, 1.0, 16).is_err());
    }

    #[test]
    fn centers_inside_interval() {
        let g = Grid1D::new(-1.0, 2.0, 9).unwrap();
        assert!(g.centers().all(|x| x > -1.0 && x < 2.0));
        assert!((g.center(0) - (-1.0 + g.dx() / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let phi = Field::constant(unit(32), 3.5);
        assert!(gradient(&phi).values().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gradient_exact_on_linear_interior() {
        let g = unit(32);
        let phi = Field::from_fn(g, |x| x);
        let d = gradient(&phi);
        for &v in &d.values()[1..31] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_of_cosine_second_order() {
        let g = unit(128);
        let phi = Field::from_fn(g, |x| (PI * x).cos());
        let d = gradient(&phi);
        let err = g
            .centers()
            .zip(d.values())
            .map(|(x, &v)| (v + PI * (PI * x).sin()).abs())
            .fold(0.0, f64::max);
        // truncation error of the central difference is max|phi_xxx| dx^2 / 6
        let c = err / (g.dx() * g.dx());
        let leading = PI.powi(3) / 6.0;
        assert!((c - leading).abs() < 0.01 * leading, "measured constant {c}");
    }

    #[test]
    fn div_flux_constant_is_zero() {
        let g = unit(16);
        let k = FaceField::from_cells(&Field::from_fn(g, |x| 1.0 + x));
        let out = div_flux(&k, &Field::constant(g, 2.0)).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn div_flux_cosine_second_order() {
        let mut errs = Vec::new();
        for n in [64, 128, 256] {
            let g = unit(n);
            let phi = Field::from_fn(g, |x| (PI * x).cos());
            let out = div_flux(&FaceField::constant(&g, 1.0), &phi).unwrap();
            let err = g
                .centers()
                .zip(out.values())
                .map(|(x, &v)| (v + PI * PI * (PI * x).cos()).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.8, "order {order}, errors {errs:?}");
        }
    }

    #[test]
    fn div_flux_telescopes() {
        let g = unit(50);
        let k = FaceField::from_cells(&Field::from_fn(g, |x| 2.0 + (7.0 * x).sin()));
        let phi = Field::from_fn(g, |x| (3.0 * x).exp() - x * x);
        let total = integrate(&div_flux(&k, &phi).unwrap());
        assert!(total.abs() < 1e-9, "total {total}");
    }

    #[test]
    fn div_flux_rejects_nonpositive_kappa() {
        let g = unit(8);
        let mut vals = vec![1.0; 9];
        vals[4] = 0.0;
        let k = FaceField::from_values(&g, vals).unwrap();
        let err = div_flux(&k, &Field::zeros(g)).unwrap_err();
        assert_eq!(err, Error::NonElliptic { face: 4, value: 0.0 });
        // boundary faces are ignored
        let mut vals = vec![1.0; 9];
        vals[0] = -1.0;
        let k = FaceField::from_values(&g, vals).unwrap();
        assert!(div_flux(&k, &Field::zeros(g)).is_ok());
    }

    #[test]
    fn norms_of_one() {
        let phi = Field::constant(unit(20), 1.0);
        assert!((integrate(&phi) - 1.0).abs() < 1e-14);
        for p in [1.0, 1.5, 2.0, 3.0, 64.0] {
            assert!((lp_norm(&phi, p) - 1.0).abs() < 1e-13);
        }
        assert_eq!(sup_norm(&phi), 1.0);
    }

    #[test]
    fn cosine_integrates_to_zero() {
        let phi = Field::from_fn(unit(256), |x| (2.0 * PI * x).cos());
        assert!(integrate(&phi).abs() < 1e-12);
    }

    #[test]
    fn l2_additivity_by_direct_summation() {
        // Concatenate two fields on (0,1) into one field on (0,2); the squared
        // norms add.
        let g = unit(40);
        let phi = Field::from_fn(g, |x| x.sin() + 0.3);
        let psi = Field::from_fn(g, |x| (5.0 * x).cos());
        let joined: Vec<f64> = phi.values().iter().chain(psi.values()).copied().collect();
        let big = Field::from_values(Grid1D::new(0.0, 2.0, 80).unwrap(), joined).unwrap();
        let direct: f64 = phi
            .values()
            .iter()
            .chain(psi.values())
            .map(|v| v * v * g.dx())
            .sum();
        let lhs = lp_norm(&phi, 2.0).powi(2) + lp_norm(&psi, 2.0).powi(2);
        assert!((lhs - direct).abs() < 1e-13);
        assert!((lp_norm(&big, 2.0).powi(2) - direct).abs() < 1e-13);
    }
}
