//! Sampled tensor fields on a cube and their discrete Fourier transforms.
//!
//! A [`Grid`] covers `[-L, L)^n` with `N` nodes per axis, `x_j = -L + j h`,
//! `h = 2L/N`. Fields are stored node-major in C order (axis 0 slowest) with
//! the compressed tensor coefficients innermost.
//!
//! The transform uses the unitary convention
//! `f̂(ξ) = (2π)^{-n/2} ∫ f(x) e^{-i x·ξ} dx`, sampled at `ξ_κ = κ π / L`,
//! `κ ∈ {-N/2, ..., N/2 - 1}`, and stored in that (centered) order.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::interp::Stencil;
use crate::symtensor::{basis, sym_dim, SymTensor};

/// Regular grid on `[-L, L)^n`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Grid {
    n: usize,
    half_width: f64,
    samples: usize,
}

impl Grid {
    pub fn new(n: usize, half_width: f64, samples: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if samples < 4 || samples % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "samples per axis must be even and at least 4, got {samples}"
            )));
        }
        Ok(Grid {
            n,
            half_width,
            samples,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    pub fn node_count(&self) -> usize {
        self.samples.pow(self.n as u32)
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Per-axis indices of a flat node index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for a in (0..self.n).rev() {
            idx[a] = flat % self.samples;
            flat /= self.samples;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.samples + j)
    }

    /// Coordinates of a flat node index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat).into_iter().map(|j| self.coord(j)).collect()
    }

    /// Frequency spacing `π / L`.
    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// Frequency of centered index `q`, i.e. `(q - N/2) π / L`.
    pub fn frequency(&self, q: usize) -> f64 {
        (q as f64 - (self.samples / 2) as f64) * self.freq_spacing()
    }

    /// Frequency vector of a flat centered index.
    pub fn frequency_point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .into_iter()
            .map(|q| self.frequency(q))
            .collect()
    }

    /// Largest representable frequency per axis, `π / h`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Same spacing, `factor` times the extent.
    pub fn padded(&self, factor: usize) -> Self {
        Grid {
            n: self.n,
            half_width: self.half_width * factor as f64,
            samples: self.samples * factor,
        }
    }
}

/// Samples of a symmetric `m`-tensor field on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    grid: Grid,
    m: usize,
    data: Vec<f64>,
}

impl TensorField {
    pub fn zeros(grid: Grid, m: usize) -> Self {
        TensorField {
            grid,
            m,
            data: vec![0.0; grid.node_count() * sym_dim(grid.n(), m)],
        }
    }

    pub fn from_data(grid: Grid, m: usize, data: Vec<f64>) -> Result<Self> {
        let expect = grid.node_count() * sym_dim(grid.n(), m);
        if data.len() != expect {
            return Err(Error::Shape(format!(
                "{} values given, field needs {expect}",
                data.len()
            )));
        }
        Ok(TensorField { grid, m, data })
    }

    /// Samples `f(x)`, which must return `sym_dim(n, m)` coefficients.
    pub fn from_fn(
        grid: Grid,
        m: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Sync,
    ) -> Result<Self> {
        let dim = sym_dim(grid.n(), m);
        let mut data = vec![0.0; grid.node_count() * dim];
        let bad = data
            .par_chunks_mut(dim)
            .enumerate()
            .map(|(k, out)| {
                let v = f(&grid.point(k));
                if v.len() != dim {
                    return true;
                }
                out.copy_from_slice(&v);
                false
            })
            .reduce(|| false, |a, b| a || b);
        if bad {
            return Err(Error::Shape(format!(
                "field function must return {dim} coefficients"
            )));
        }
        Ok(TensorField { grid, m, data })
    }

    pub fn scalar_from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let data = (0..grid.node_count())
            .into_par_iter()
            .map(|k| f(&grid.point(k)))
            .collect();
        TensorField { grid, m: 0, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// Number of compressed coefficients per node.
    pub fn dim(&self) -> usize {
        sym_dim(self.grid.n(), self.m)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn node(&self, k: usize) -> &[f64] {
        let d = self.dim();
        &self.data[k * d..(k + 1) * d]
    }

    pub fn tensor_at(&self, k: usize) -> SymTensor {
        SymTensor::from_coeffs(self.grid.n(), self.m, self.node(k).to_vec())
            .expect("node slice has the right length")
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        let d = self.dim();
        self.data.iter().skip(c).step_by(d).copied().collect()
    }

    pub fn set_component(&mut self, c: usize, values: &[f64]) {
        let d = self.dim();
        for (slot, &v) in self.data.iter_mut().skip(c).step_by(d).zip(values) {
            *slot = v;
        }
    }

    /// Builds a field from per-coefficient arrays.
    pub fn from_components(grid: Grid, m: usize, comps: &[Vec<f64>]) -> Result<Self> {
        let d = sym_dim(grid.n(), m);
        if comps.len() != d || comps.iter().any(|c| c.len() != grid.node_count()) {
            return Err(Error::Shape("component arrays do not match the grid".into()));
        }
        let mut f = TensorField::zeros(grid, m);
        for (c, vals) in comps.iter().enumerate() {
            f.set_component(c, vals);
        }
        Ok(f)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.m != other.m {
            return Err(Error::Shape("fields live on different grids or orders".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(TensorField { data, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(TensorField { data, ..*self })
    }

    pub fn scale(&self, s: f64) -> Self {
        TensorField {
            data: self.data.iter().map(|a| a * s).collect(),
            ..*self
        }
    }

    /// `L²` norm with the contraction metric on tensors.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_where(|_| true)
    }

    /// `L²` norm restricted to nodes where `keep(x)` holds.
    pub fn l2_norm_where(&self, keep: impl Fn(&[f64]) -> bool + Sync) -> f64 {
        let b = basis(self.grid.n(), self.m);
        let mult = b.multiplicities();
        let d = self.dim();
        let sum: f64 = self
            .data
            .par_chunks(d)
            .enumerate()
            .filter(|(k, _)| keep(&self.grid.point(*k)))
            .map(|(_, c)| c.iter().zip(mult).map(|(v, w)| w * v * v).sum::<f64>())
            .sum();
        (sum * self.grid.spacing().powi(self.grid.n() as i32)).sqrt()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// `‖self - reference‖ / ‖reference‖` in `L²`.
    pub fn rel_l2_error(&self, reference: &Self) -> Result<f64> {
        let diff = self.sub(reference)?.l2_norm();
        let base = reference.l2_norm();
        Ok(if base == 0.0 { diff } else { diff / base })
    }

    /// Embeds into a grid `factor` times larger with the same spacing,
    /// extending by zero.
    pub fn zero_pad(&self, factor: usize) -> Self {
        if factor == 1 {
            return self.clone();
        }
        let big = self.grid.padded(factor);
        let offset = (big.samples() - self.grid.samples()) / 2;
        let d = self.dim();
        let mut out = TensorField::zeros(big, self.m);
        for k in 0..self.grid.node_count() {
            let idx: Vec<usize> = self.grid.unravel(k).iter().map(|j| j + offset).collect();
            let t = big.ravel(&idx);
            out.data[t * d..(t + 1) * d].copy_from_slice(self.node(k));
        }
        out
    }
}

impl TensorField {
    /// Restriction to a smaller grid with the same spacing and centre, the
    /// inverse of [`TensorField::zero_pad`].
    pub fn crop(&self, small: &Grid) -> Result<Self> {
        let big = self.grid;
        let same_spacing = (small.spacing() - big.spacing()).abs() <= 1e-12 * big.spacing();
        if small.n() != big.n() || small.samples() > big.samples() || !same_spacing
            || (big.samples() - small.samples()) % 2 != 0
        {
            return Err(Error::Shape("crop target is not a centred subgrid".into()));
        }
        let offset = (big.samples() - small.samples()) / 2;
        let d = self.dim();
        let mut out = TensorField::zeros(*small, self.m);
        for k in 0..small.node_count() {
            let idx: Vec<usize> = small.unravel(k).iter().map(|j| j + offset).collect();
            let src = big.ravel(&idx);
            out.data[k * d..(k + 1) * d].copy_from_slice(self.node(src));
        }
        Ok(out)
    }
}

/// Samples of `f̂` at the centered frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    m: usize,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, m: usize) -> Self {
        SpectralField {
            grid,
            m,
            data: vec![Complex64::new(0.0, 0.0); grid.node_count() * sym_dim(grid.n(), m)],
        }
    }

    /// Fills every frequency from `f(ξ)`.
    pub fn from_fn(
        grid: Grid,
        m: usize,
        f: impl Fn(&[f64]) -> Vec<Complex64> + Sync,
    ) -> Result<Self> {
        let dim = sym_dim(grid.n(), m);
        let mut out = SpectralField::zeros(grid, m);
        let bad = out
            .data
            .par_chunks_mut(dim)
            .enumerate()
            .map(|(k, slot)| {
                let v = f(&grid.frequency_point(k));
                if v.len() != dim {
                    return true;
                }
                slot.copy_from_slice(&v);
                false
            })
            .reduce(|| false, |a, b| a || b);
        if bad {
            return Err(Error::Shape(format!(
                "spectral function must return {dim} coefficients"
            )));
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        sym_dim(self.grid.n(), self.m)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Coefficients at flat centered index `k`.
    pub fn at(&self, k: usize) -> &[Complex64] {
        let d = self.dim();
        &self.data[k * d..(k + 1) * d]
    }

    pub fn at_mut(&mut self, k: usize) -> &mut [Complex64] {
        let d = self.dim();
        &mut self.data[k * d..(k + 1) * d]
    }

    pub fn tensor_at(&self, k: usize) -> SymTensor<Complex64> {
        SymTensor::from_coeffs(self.grid.n(), self.m, self.at(k).to_vec())
            .expect("node slice has the right length")
    }

    /// Builds from per-frequency tensors in centered order.
    pub fn from_tensors(grid: Grid, m: usize, tensors: Vec<SymTensor<Complex64>>) -> Result<Self> {
        if tensors.len() != grid.node_count() {
            return Err(Error::Shape("one tensor per frequency required".into()));
        }
        let mut data = Vec::with_capacity(grid.node_count() * sym_dim(grid.n(), m));
        for t in tensors {
            if t.order() != m || t.n() != grid.n() {
                return Err(Error::Shape("tensor order mismatch".into()));
            }
            data.extend_from_slice(t.coeffs());
        }
        Ok(SpectralField { grid, m, data })
    }

    /// Interpolated value at an arbitrary frequency inside the Nyquist box.
    ///
    /// Each axis uses a four-node Lagrange stencil; a coordinate that falls on
    /// a grid frequency takes that sample exactly. Stencil nodes beyond the
    /// sampled band count as zero.
    pub fn sample(&self, xi: &[f64]) -> Result<Vec<Complex64>> {
        let g = &self.grid;
        if xi.len() != g.n() {
            return Err(Error::Shape("frequency of the wrong dimension".into()));
        }
        let limit = g.nyquist();
        if xi.iter().any(|x| x.abs() > limit * (1.0 + 1e-12)) {
            return Err(Error::OutsideNyquist {
                frequency: xi.to_vec(),
                limit,
            });
        }
        let nn = g.samples() as isize;
        let half = (g.samples() / 2) as f64;
        let dxi = g.freq_spacing();
        let mut axes: Vec<Vec<(usize, f64)>> = Vec::with_capacity(g.n());
        for &x in xi {
            let q = x / dxi + half;
            let r = q.round();
            let taps = if (q - r).abs() < 1e-12 {
                if r >= 0.0 && (r as isize) < nn {
                    vec![(r as usize, 1.0)]
                } else {
                    Vec::new()
                }
            } else {
                let (first, w) = Stencil::Cubic.weights(q);
                (0..4)
                    .filter_map(|k| {
                        let j = first + k as isize;
                        (j >= 0 && j < nn).then_some((j as usize, w[k]))
                    })
                    .collect()
            };
            axes.push(taps);
        }
        let d = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        let mut idx = vec![0usize; g.n()];
        accumulate_taps(&axes, 0, 1.0, &mut idx, &mut |idx, w| {
            let k = g.ravel(idx);
            for (o, v) in out.iter_mut().zip(self.at(k)) {
                *o += v * w;
            }
        });
        Ok(out)
    }

    /// `f̂(σ ω)` for each `σ`, as tensors.
    pub fn sample_polar(&self, omega: &[f64], sigmas: &[f64]) -> Result<Vec<SymTensor<Complex64>>> {
        sigmas
            .iter()
            .map(|&s| {
                let xi: Vec<f64> = omega.iter().map(|w| w * s).collect();
                let c = self.sample(&xi)?;
                SymTensor::from_coeffs(self.grid.n(), self.m, c)
            })
            .collect()
    }
}

/// Visits the tensor product of per-axis taps.
pub(crate) fn accumulate_taps(
    axes: &[Vec<(usize, f64)>],
    a: usize,
    w: f64,
    idx: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize], f64),
) {
    if a == axes.len() {
        visit(idx, w);
        return;
    }
    for &(j, wj) in &axes[a] {
        idx[a] = j;
        accumulate_taps(axes, a + 1, w * wj, idx, visit);
    }
}

/// In-place `n`-dimensional FFT of a C-ordered cube with `len` samples per
/// axis. Unnormalized in both directions.
pub fn fft_nd(data: &mut [Complex64], n: usize, len: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan: Arc<dyn Fft<f64>> = if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    };
    fft_nd_with(&plan, data, n, len);
}

fn fft_nd_with(plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64], n: usize, len: usize) {
    let total = data.len();
    debug_assert_eq!(total, len.pow(n as u32));
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    let mut lane = vec![Complex64::new(0.0, 0.0); len];
    for a in 0..n {
        let stride = len.pow((n - 1 - a) as u32);
        if stride == 1 {
            plan.process_with_scratch(data, &mut scratch);
            continue;
        }
        let block = stride * len;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let start = outer + inner;
                for (k, slot) in lane.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                plan.process_with_scratch(&mut lane, &mut scratch);
                for (k, v) in lane.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

fn sign_of_index(g: &Grid, k: usize) -> f64 {
    let half = g.samples() / 2;
    let s: usize = g.unravel(k).iter().map(|&q| (q + g.samples() - half) % 2).sum();
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Maps a centered flat index to the FFT-ordered flat index.
fn centered_to_fft(g: &Grid, k: usize) -> usize {
    let half = g.samples() / 2;
    let idx: Vec<usize> = g
        .unravel(k)
        .into_iter()
        .map(|q| (q + half) % g.samples())
        .collect();
    g.ravel(&idx)
}

/// Discrete Fourier transform of a field: `f̂(ξ_κ)` at every grid frequency.
pub fn forward(f: &TensorField) -> SpectralField {
    let g = *f.grid();
    let d = f.dim();
    let scale = (2.0 * PI).powf(-(g.n() as f64) / 2.0) * g.spacing().powi(g.n() as i32);
    let plan = FftPlanner::new().plan_fft_forward(g.samples());
    let comps: Vec<Vec<Complex64>> = (0..d)
        .into_par_iter()
        .map(|c| {
            let mut buf: Vec<Complex64> = f
                .component(c)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect();
            fft_nd_with(&plan, &mut buf, g.n(), g.samples());
            buf
        })
        .collect();
    let mut out = SpectralField::zeros(g, f.order());
    out.data
        .par_chunks_mut(d)
        .enumerate()
        .for_each(|(k, slot)| {
            let src = centered_to_fft(&g, k);
            let s = scale * sign_of_index(&g, k);
            for (c, v) in slot.iter_mut().enumerate() {
                *v = comps[c][src] * s;
            }
        });
    out
}

/// Inverse of [`forward`], returning complex samples.
pub fn inverse_complex(fh: &SpectralField) -> Vec<Vec<Complex64>> {
    let g = *fh.grid();
    let d = fh.dim();
    let scale = (2.0 * PI).powf(g.n() as f64 / 2.0)
        / g.spacing().powi(g.n() as i32)
        / g.node_count() as f64;
    let plan = FftPlanner::new().plan_fft_inverse(g.samples());
    (0..d)
        .into_par_iter()
        .map(|c| {
            let mut buf = vec![Complex64::new(0.0, 0.0); g.node_count()];
            for k in 0..g.node_count() {
                buf[centered_to_fft(&g, k)] = fh.at(k)[c] * (scale * sign_of_index(&g, k));
            }
            fft_nd_with(&plan, &mut buf, g.n(), g.samples());
            buf
        })
        .collect()
}

/// Inverse transform keeping the real part.
pub fn inverse(fh: &SpectralField) -> TensorField {
    let comps = inverse_complex(fh);
    let real: Vec<Vec<f64>> = comps
        .into_iter()
        .map(|c| c.into_iter().map(|z| z.re).collect())
        .collect();
    TensorField::from_components(*fh.grid(), fh.order(), &real)
        .expect("components match the grid")
}

/// Spectral derivative wavenumber for centered index `q`: the grid frequency,
/// except the unpaired Nyquist sample which is set to zero.
pub fn wavenumber(g: &Grid, q: usize) -> f64 {
    if q == 0 {
        0.0
    } else {
        g.frequency(q)
    }
}

/// Whether any axis of the flat centered index sits on the unpaired Nyquist
/// sample, where [`wavenumber`] drops that component.
pub fn on_nyquist_plane(g: &Grid, k: usize) -> bool {
    g.unravel(k).contains(&0)
}

/// Derivative wavevector at a flat centered index.
pub fn wavevector(g: &Grid, k: usize) -> Vec<f64> {
    g.unravel(k).into_iter().map(|q| wavenumber(g, q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_field(g: Grid) -> TensorField {
        TensorField::scalar_from_fn(g, |x| {
            let r2: f64 = x.iter().map(|v| (v - 0.2) * (v - 0.2)).sum();
            (-r2).exp()
        })
    }

    #[test]
    fn grid_nodes() {
        let g = Grid::new(2, 3.0, 8).unwrap();
        assert_eq!(g.spacing(), 0.75);
        assert_eq!(g.coord(0), -3.0);
        assert_eq!(g.coord(4), 0.0);
        assert_eq!(g.frequency(4), 0.0);
        assert_eq!(g.point(g.ravel(&[4, 5])), vec![0.0, 0.75]);
        assert!(Grid::new(2, 1.0, 7).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let f = TensorField::from_fn(g, 1, |x| vec![x[0] * (-x[0] * x[0]).exp(), x[1].sin()]).unwrap();
        let back = inverse(&forward(&f));
        let err = back.sub(&f).unwrap().max_abs();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn matches_continuous_transform() {
        // f = exp(-|x - c|²) has f̂ = 2^{-n/2} exp(-|ξ|²/4 - i ξ·c).
        let g = Grid::new(2, 6.0, 64).unwrap();
        let fh = forward(&gaussian_field(g));
        for k in [0, 17, 1000, 2080, 3000] {
            let xi = g.frequency_point(k);
            let xi2: f64 = xi.iter().map(|v| v * v).sum();
            let phase: f64 = xi.iter().map(|v| v * 0.2).sum();
            let exact = Complex64::from_polar(0.5 * (-xi2 / 4.0).exp(), -phase);
            assert!((fh.at(k)[0] - exact).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn parseval() {
        let g = Grid::new(3, 4.0, 16).unwrap();
        let f = gaussian_field(g);
        let fh = forward(&f);
        let lhs: f64 = f.data().iter().map(|v| v * v).sum::<f64>() * g.spacing().powi(3);
        let rhs: f64 = fh.data().iter().map(|z| z.norm_sqr()).sum::<f64>() * g.freq_spacing().powi(3);
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
    }

    #[test]
    fn sampling_on_grid_is_exact() {
        let g = Grid::new(2, 5.0, 32).unwrap();
        let fh = forward(&gaussian_field(g));
        let q = 20;
        let s = g.frequency(q);
        let v = fh.sample(&[s, 0.0]).unwrap();
        let k = g.ravel(&[q, 16]);
        assert!((v[0] - fh.at(k)[0]).norm() < 1e-12);
        let v0 = fh.sample(&[0.0, 0.0]).unwrap();
        assert_eq!(v0[0], fh.at(g.ravel(&[16, 16]))[0]);
        assert!(matches!(
            fh.sample(&[11.0, 0.0]),
            Err(Error::OutsideNyquist { .. })
        ));
    }

    #[test]
    fn polar_sampling_interpolates() {
        let g = Grid::new(2, 6.0, 48).unwrap();
        let padded = gaussian_field(g).zero_pad(4);
        let fh = forward(&padded);
        let omega = [0.6, 0.8];
        let sig = [0.0, 0.7, 1.9, 3.3];
        let vals = fh.sample_polar(&omega, &sig).unwrap();
        for (s, v) in sig.iter().zip(vals) {
            let exact = Complex64::from_polar(0.5 * (-s * s / 4.0).exp(), -0.2 * s * 1.4);
            assert!((v.coeffs()[0] - exact).norm() < 2e-4, "σ = {s}");
        }
    }

    #[test]
    fn padding_keeps_values() {
        let g = Grid::new(2, 1.0, 8).unwrap();
        let f = gaussian_field(g);
        let p = f.zero_pad(2);
        assert_eq!(p.grid().samples(), 16);
        assert_eq!(p.grid().spacing(), g.spacing());
        let k = g.ravel(&[3, 5]);
        assert_eq!(p.node(p.grid().ravel(&[7, 9])), f.node(k));
        assert!((p.l2_norm() - f.l2_norm()).abs() < 1e-14);
    }
}
