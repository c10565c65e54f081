//! Uniform grid on the box `(-L, L)²` with homogeneous Dirichlet data, and the
//! FFT-backed type-I sine transform that diagonalizes its Laplacian.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::spectral::ScalarField;

/// Square grid with `M` subdivisions per axis. Only the `(M-1)²` interior
/// nodes carry unknowns; boundary values are implicitly zero.
///
/// Cloning is cheap: the Laplacian eigenvalue table and the FFT plan are
/// shared behind an `Arc`.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    half_width: f64,
    subdivisions: usize,
    /// `(pπ/2L)² + (qπ/2L)²` at index `(p-1, q-1)`.
    eigenvalues: Array2<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(half_width: f64, subdivisions: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if subdivisions < 4 || subdivisions % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "subdivision count must be even and at least 4, got {subdivisions}"
            )));
        }
        let n = subdivisions - 1;
        let wave = |p: usize| {
            let k = p as f64 * PI / (2.0 * half_width);
            k * k
        };
        let eigenvalues = Array2::from_shape_fn((n, n), |(p, q)| wave(p + 1) + wave(q + 1));
        let fft = FftPlanner::new().plan_fft_forward(2 * subdivisions);
        Ok(Self {
            inner: Arc::new(GridInner {
                half_width,
                subdivisions,
                eigenvalues,
                fft,
            }),
        })
    }

    pub fn half_width(&self) -> f64 {
        self.inner.half_width
    }

    pub fn subdivisions(&self) -> usize {
        self.inner.subdivisions
    }

    /// `h = 2L / M`.
    pub fn mesh_size(&self) -> f64 {
        2.0 * self.inner.half_width / self.inner.subdivisions as f64
    }

    /// Interior nodes per axis, `M - 1`.
    pub fn interior(&self) -> usize {
        self.inner.subdivisions - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.interior(), self.interior())
    }

    /// Interior coordinates `-L + k h`, `k = 1..M-1` (same on both axes).
    pub fn coordinates(&self) -> Vec<f64> {
        let h = self.mesh_size();
        (1..self.inner.subdivisions)
            .map(|k| -self.inner.half_width + k as f64 * h)
            .collect()
    }

    /// Smallest Dirichlet eigenvalue of `-Δ` on the box, `2 (π / 2L)²`.
    pub fn first_eigenvalue(&self) -> f64 {
        let k = PI / (2.0 * self.inner.half_width);
        2.0 * k * k
    }

    /// Spectral multipliers of `-Δ_h`, indexed by `(p-1, q-1)`.
    pub fn eigenvalues(&self) -> ArrayView2<'_, f64> {
        self.inner.eigenvalues.view()
    }

    /// Samples `f(x, y)` at the interior nodes; entry `(k, l)` holds `f(x_k, y_l)`.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let xs = self.coordinates();
        let values = Array2::from_shape_fn(self.shape(), |(k, l)| f(xs[k], xs[l]));
        ScalarField::from_array_unchecked(self.clone(), values)
    }

    /// Sine coefficients `û_pq = (4/M²) Σ_kl u_kl sin(pkπ/M) sin(qlπ/M)`.
    pub fn forward(&self, values: ArrayView2<'_, f64>) -> Array2<f64> {
        let m = self.inner.subdivisions as f64;
        let mut out = self.dst2_unnormalized(values);
        out.mapv_inplace(|c| c * 4.0 / (m * m));
        out
    }

    /// Synthesis `u_kl = Σ_pq û_pq sin(pkπ/M) sin(qlπ/M)`.
    pub fn inverse(&self, coeffs: ArrayView2<'_, f64>) -> Array2<f64> {
        self.dst2_unnormalized(coeffs)
    }

    fn dst2_unnormalized(&self, data: ArrayView2<'_, f64>) -> Array2<f64> {
        let rows = self.dst_rows(data);
        let cols = self.dst_rows(rows.t());
        cols.reversed_axes().as_standard_layout().into_owned()
    }

    /// Unnormalized DST-I of every row: `X_p = Σ_k x_k sin(π p k / M)`.
    ///
    /// Each row is odd-extended to length `2M`; two real rows share one
    /// complex FFT (real and imaginary parts), since the transform of an odd
    /// real sequence is purely imaginary.
    fn dst_rows(&self, data: ArrayView2<'_, f64>) -> Array2<f64> {
        let m = self.inner.subdivisions;
        let n = m - 1;
        let len = 2 * m;
        let pairs = n.div_ceil(2);
        let mut buf = vec![Complex64::new(0.0, 0.0); pairs * len];
        for (pair, chunk) in buf.chunks_mut(len).enumerate() {
            let r0 = 2 * pair;
            let r1 = r0 + 1;
            for k in 1..m {
                let a = data[[r0, k - 1]];
                let b = if r1 < n { data[[r1, k - 1]] } else { 0.0 };
                chunk[k] = Complex64::new(a, b);
                chunk[len - k] = Complex64::new(-a, -b);
            }
        }
        self.inner.fft.process(&mut buf);
        let mut out = Array2::zeros((n, n));
        for (pair, chunk) in buf.chunks(len).enumerate() {
            let r0 = 2 * pair;
            let r1 = r0 + 1;
            for p in 1..m {
                out[[r0, p - 1]] = -0.5 * chunk[p].im;
                if r1 < n {
                    out[[r1, p - 1]] = 0.5 * chunk[p].re;
                }
            }
        }
        out
    }

    /// Copy of this grid whose eigenvalue table has been altered by `edit`.
    /// Only meant for fault-injection tests of the verification suite.
    #[doc(hidden)]
    pub fn with_modified_eigenvalues(&self, edit: impl FnOnce(&mut Array2<f64>)) -> Grid {
        let mut eigenvalues = self.inner.eigenvalues.clone();
        edit(&mut eigenvalues);
        Grid {
            inner: Arc::new(GridInner {
                half_width: self.inner.half_width,
                subdivisions: self.inner.subdivisions,
                eigenvalues,
                fft: Arc::clone(&self.inner.fft),
            }),
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.half_width == other.inner.half_width
                && self.inner.subdivisions == other.inner.subdivisions
                && self.inner.eigenvalues == other.inner.eigenvalues)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_width", &self.inner.half_width)
            .field("subdivisions", &self.inner.subdivisions)
            .field("mesh_size", &self.mesh_size())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_grid_geometry() {
        let g = Grid::new(1.0, 4).unwrap();
        assert_eq!(g.mesh_size(), 0.5);
        assert_eq!(g.coordinates(), vec![-0.5, 0.0, 0.5]);
        assert_eq!(g.shape(), (3, 3));
    }

    #[test]
    fn desk_mesh() {
        let g = Grid::new(1.0, 64).unwrap();
        assert_eq!(g.mesh_size(), 1.0 / 32.0);
        assert_eq!(g.interior(), 63);
        assert_eq!(g.mesh_size() * 64.0, 2.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Grid::new(1.0, 3), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(1.0, 2), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(0.0, 8), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(-1.0, 8), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(f64::NAN, 8), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn eigenvalue_table() {
        let g = Grid::new(1.0, 8).unwrap();
        let quarter = PI * PI / 4.0;
        assert!((g.eigenvalues()[[0, 0]] - 2.0 * quarter).abs() < 1e-14);
        assert!((g.eigenvalues()[[1, 2]] - 13.0 * quarter).abs() < 1e-13);
        assert_eq!(g.first_eigenvalue(), g.eigenvalues()[[0, 0]]);
    }

    #[test]
    fn single_row_transform_matches_direct_sum() {
        // odd interior count exercises the unpaired last row
        let g = Grid::new(1.0, 6).unwrap();
        let n = g.interior();
        let data = Array2::from_shape_fn((n, n), |(i, j)| ((i * 7 + j * 3) as f64).sin());
        let out = g.dst_rows(data.view());
        for r in 0..n {
            for p in 1..=n {
                let direct: f64 = (1..=n)
                    .map(|k| data[[r, k - 1]] * (PI * (p * k) as f64 / 6.0).sin())
                    .sum();
                assert!((out[[r, p - 1]] - direct).abs() < 1e-13);
            }
        }
    }
}
