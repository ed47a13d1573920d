//! Forward generalized Radon transforms.
//!
//! For a symmetric `m`-tensor field `f` the transform of degree signature
//! `ℓ` integrates `⟨f(x), ω_1^{⊙ℓ_1} ⊙ ... ⊙ ω^{⊙ℓ_n}⟩` over the hyperplane
//! `x·ω = p`, and the pair form integrates `⟨f(x), ω^{⊙a} ⊙ u^{⊙b}⟩` for
//! unit `u ⊥ ω`. Both are computed by a line/plane quadrature on the sampled
//! field and, independently, through the Fourier slice relation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{forward, Grid, TensorField};
use crate::interp::{gauss_legendre, interp_uniform, Stencil};
use crate::symtensor::{basis, frame, pair_tensor, DegreeSignature, Frame, SymTensor};

/// Evenly spaced hyperplane offsets `p_j = start + j · spacing`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffsetGrid {
    pub count: usize,
    pub spacing: f64,
    pub start: f64,
}

impl OffsetGrid {
    /// `p_j = j h` for `j = -half, ..., half`.
    pub fn symmetric(half: usize, spacing: f64) -> Self {
        OffsetGrid {
            count: 2 * half + 1,
            spacing,
            start: -(half as f64) * spacing,
        }
    }

    /// Offsets covering every hyperplane that meets the cube of `grid`, at
    /// the grid spacing.
    pub fn for_grid(grid: &Grid) -> Self {
        let h = grid.spacing();
        let reach = grid.half_width() * (grid.n() as f64).sqrt();
        OffsetGrid::symmetric((reach / h).ceil() as usize, h)
    }

    pub fn value(&self, j: usize) -> f64 {
        self.start + j as f64 * self.spacing
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.value(j)).collect()
    }

    /// Largest `|p|`.
    pub fn reach(&self) -> f64 {
        self.start.abs().max(self.value(self.count - 1).abs())
    }

    /// Continuous index of an offset.
    pub fn index_of(&self, p: f64) -> f64 {
        (p - self.start) / self.spacing
    }

    /// Whether `p_{count-1-j} = -p_j` for all `j`.
    pub fn is_symmetric(&self) -> bool {
        let end = self.value(self.count - 1);
        (self.start + end).abs() <= 1e-12 * self.spacing.max(end.abs())
    }
}

/// Sampled directions `ω`, optional tangent directions `u ⊥ ω` per `ω`, and
/// the offset grid shared by all of them.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionGrid {
    n: usize,
    directions: Vec<Vec<f64>>,
    frames: Vec<Frame>,
    us: Vec<Vec<Vec<f64>>>,
    weights: Vec<f64>,
    u_weight: f64,
    antipode: Vec<Option<usize>>,
    u_antipode: Vec<Vec<Option<usize>>>,
    offsets: OffsetGrid,
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

impl DirectionGrid {
    /// `count` equiangular directions on the unit circle, closed under
    /// `ω → -ω`. With `with_u`, each `ω` carries `u ∈ {ω_1, -ω_1}`.
    pub fn circle(count: usize, offsets: OffsetGrid, with_u: bool) -> Result<Self> {
        if count < 2 || count % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "circle direction count must be even and at least 2, got {count}"
            )));
        }
        let half = count / 2;
        let mut dirs: Vec<Vec<f64>> = (0..half)
            .map(|k| {
                let th = PI * k as f64 / half as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
        let back: Vec<Vec<f64>> = dirs.iter().map(|d| neg(d)).collect();
        dirs.extend(back);
        let us = if with_u { Some(2) } else { None };
        Self::build(2, dirs, us, offsets)
    }

    /// `count` Fibonacci points on the upper hemisphere of `S²` mirrored to
    /// the lower one. With `u_count > 0`, each `ω` carries `u_count` equally
    /// spaced unit vectors in `ω^⊥`.
    pub fn sphere(count: usize, offsets: OffsetGrid, u_count: usize) -> Result<Self> {
        if count < 2 || count % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "sphere direction count must be even and at least 2, got {count}"
            )));
        }
        if u_count % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "tangent direction count must be even, got {u_count}"
            )));
        }
        let half = count / 2;
        let golden = PI * (3.0 - 5f64.sqrt());
        let mut dirs: Vec<Vec<f64>> = (0..half)
            .map(|k| {
                let z = (k as f64 + 0.5) / half as f64;
                let r = (1.0 - z * z).sqrt();
                let ph = golden * k as f64;
                vec![r * ph.cos(), r * ph.sin(), z]
            })
            .collect();
        let back: Vec<Vec<f64>> = dirs.iter().map(|d| neg(d)).collect();
        dirs.extend(back);
        let us = (u_count > 0).then_some(u_count);
        Self::build(3, dirs, us, offsets)
    }

    /// Product rule on `S²`: composite Gauss-Legendre nodes in `z = cos θ` on
    /// `(0, 1)` with `z_panels` panels of eight, times `phi_count` equally
    /// spaced azimuths, mirrored to the lower hemisphere. Far more accurate
    /// than Fibonacci points for the oscillatory zonal integrands of
    /// backprojection.
    pub fn sphere_product(
        z_panels: usize,
        phi_count: usize,
        offsets: OffsetGrid,
        u_count: usize,
    ) -> Result<Self> {
        if z_panels == 0 || phi_count == 0 {
            return Err(Error::InvalidParameter(
                "product rule needs at least one panel and one azimuth".into(),
            ));
        }
        if u_count % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "tangent direction count must be even, got {u_count}"
            )));
        }
        let (zs, wz) = gauss_legendre(0.0, 1.0, z_panels);
        let dphi = 2.0 * PI / phi_count as f64;
        let mut dirs = Vec::with_capacity(2 * zs.len() * phi_count);
        let mut weights = Vec::with_capacity(2 * zs.len() * phi_count);
        for (z, w) in zs.iter().zip(&wz) {
            let r = (1.0 - z * z).sqrt();
            for j in 0..phi_count {
                let ph = dphi * (j as f64 + 0.5);
                dirs.push(vec![r * ph.cos(), r * ph.sin(), *z]);
                weights.push(w * dphi);
            }
        }
        let back: Vec<Vec<f64>> = dirs.iter().map(|d| neg(d)).collect();
        dirs.extend(back);
        weights.extend(weights.clone());
        let us = (u_count > 0).then_some(u_count);
        Self::build_weighted(3, dirs, Some(weights), us, offsets)
    }

    /// Circle for `n = 2`, sphere for `n = 3`. `u_count` is ignored on the
    /// circle except for switching the two tangent directions on.
    pub fn for_dimension(n: usize, count: usize, offsets: OffsetGrid, u_count: usize) -> Result<Self> {
        match n {
            2 => Self::circle(count, offsets, u_count > 0),
            3 => Self::sphere(count, offsets, u_count),
            _ => Err(Error::Unsupported(format!(
                "direction grids are provided for n = 2 and n = 3, not n = {n}"
            ))),
        }
    }

    fn build(
        n: usize,
        directions: Vec<Vec<f64>>,
        u_count: Option<usize>,
        offsets: OffsetGrid,
    ) -> Result<Self> {
        Self::build_weighted(n, directions, None, u_count, offsets)
    }

    fn build_weighted(
        n: usize,
        directions: Vec<Vec<f64>>,
        weights: Option<Vec<f64>>,
        u_count: Option<usize>,
        offsets: OffsetGrid,
    ) -> Result<Self> {
        let frames = directions
            .iter()
            .map(|d| frame(d))
            .collect::<Result<Vec<_>>>()?;
        let us = frames
            .iter()
            .map(|fr| match u_count {
                None => Vec::new(),
                Some(c) => tangent_circle(fr, c),
            })
            .collect();
        Self::assemble(n, directions, frames, us, weights, offsets)
    }

    /// Grid from explicit samples, for example when reading a file. Every
    /// `ω` must be a unit vector and every `u` a unit vector orthogonal to it.
    /// Without `weights` every direction gets an equal share of the sphere.
    pub fn from_parts(
        n: usize,
        directions: Vec<Vec<f64>>,
        us: Vec<Vec<Vec<f64>>>,
        weights: Option<Vec<f64>>,
        offsets: OffsetGrid,
    ) -> Result<Self> {
        if directions.iter().any(|d| d.len() != n) {
            return Err(Error::Shape("direction of the wrong dimension".into()));
        }
        if !us.is_empty() && us.len() != directions.len() {
            return Err(Error::Shape("one tangent list per direction required".into()));
        }
        let frames = directions
            .iter()
            .map(|d| frame(d))
            .collect::<Result<Vec<_>>>()?;
        let us = if us.is_empty() {
            vec![Vec::new(); directions.len()]
        } else {
            us
        };
        for (d, list) in directions.iter().zip(&us) {
            for u in list {
                let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                let dot: f64 = u.iter().zip(d).map(|(a, b)| a * b).sum();
                if (norm - 1.0).abs() > 1e-9 || dot.abs() > 1e-9 || u.len() != n {
                    return Err(Error::InvalidParameter(
                        "tangent directions must be unit vectors orthogonal to ω".into(),
                    ));
                }
            }
        }
        Self::assemble(n, directions, frames, us, weights, offsets)
    }

    fn assemble(
        n: usize,
        directions: Vec<Vec<f64>>,
        frames: Vec<Frame>,
        us: Vec<Vec<Vec<f64>>>,
        weights: Option<Vec<f64>>,
        offsets: OffsetGrid,
    ) -> Result<Self> {
        let count = directions.len();
        if count == 0 {
            return Err(Error::InvalidParameter("empty direction grid".into()));
        }
        let u_len = us[0].len();
        if us.iter().any(|l| l.len() != u_len) {
            return Err(Error::Shape("every direction needs the same number of u".into()));
        }
        let sphere_area = 2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n);
        let weights = match weights {
            None => vec![sphere_area / count as f64; count],
            Some(w) if w.len() == count => w,
            Some(w) => {
                return Err(Error::Shape(format!(
                    "{} weights for {count} directions",
                    w.len()
                )))
            }
        };
        let u_weight = match (n, u_len) {
            (_, 0) => 0.0,
            (2, _) => 1.0,
            _ => {
                let area = 2.0 * PI.powf((n - 1) as f64 / 2.0) / gamma_half(n - 1);
                area / u_len as f64
            }
        };
        let tol = 1e-12;
        let antipode: Vec<Option<usize>> = directions
            .iter()
            .map(|d| {
                let m = neg(d);
                directions.iter().position(|e| close(e, &m, tol))
            })
            .collect();
        let u_antipode = (0..count)
            .map(|k| match antipode[k] {
                None => vec![None; u_len],
                Some(a) => us[k]
                    .iter()
                    .map(|u| {
                        let m = neg(u);
                        us[a].iter().position(|e| close(e, &m, tol))
                    })
                    .collect(),
            })
            .collect();
        Ok(DirectionGrid {
            n,
            directions,
            frames,
            us,
            weights,
            u_weight,
            antipode,
            u_antipode,
            offsets,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.directions[k]
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn frame(&self, k: usize) -> &Frame {
        &self.frames[k]
    }

    /// Tangent directions `u` attached to `ω_k`.
    pub fn us(&self, k: usize) -> &[Vec<f64>] {
        &self.us[k]
    }

    pub fn u_count(&self) -> usize {
        self.us[0].len()
    }

    /// Quadrature weight of `ω_k` on the sphere.
    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    /// Quadrature weight of each `u` on the sphere of `ω^⊥`; counting
    /// measure on the circle.
    pub fn u_weight(&self) -> f64 {
        self.u_weight
    }

    pub fn antipode(&self, k: usize) -> Option<usize> {
        self.antipode[k]
    }

    /// Index of `-u_j` in the list of the antipode of `ω_k`.
    pub fn u_antipode(&self, k: usize, j: usize) -> Option<usize> {
        self.u_antipode[k][j]
    }

    pub fn is_antipodal(&self) -> bool {
        self.antipode.iter().all(Option::is_some)
            && self.u_antipode.iter().flatten().all(Option::is_some)
            && self.offsets.is_symmetric()
    }

    pub fn offsets(&self) -> &OffsetGrid {
        &self.offsets
    }

    /// Same directions with a different offset grid.
    pub fn with_offsets(&self, offsets: OffsetGrid) -> Self {
        DirectionGrid {
            offsets,
            ..self.clone()
        }
    }
}

fn gamma_half(n: usize) -> f64 {
    // Γ(n/2) for positive integers n.
    if n % 2 == 0 {
        (1..n / 2).fold(1.0, |acc, k| acc * k as f64)
    } else {
        let mut acc = PI.sqrt();
        let mut x = 0.5;
        while x < n as f64 / 2.0 - 0.25 {
            acc *= x;
            x += 1.0;
        }
        acc
    }
}

fn tangent_circle(fr: &Frame, count: usize) -> Vec<Vec<f64>> {
    let half = count / 2;
    let mut out: Vec<Vec<f64>> = if fr.n() == 2 {
        vec![fr.tangents[0].clone()]
    } else {
        let (a, b) = (&fr.tangents[0], &fr.tangents[1]);
        (0..half)
            .map(|k| {
                let th = PI * k as f64 / half as f64;
                let (s, c) = th.sin_cos();
                a.iter().zip(b).map(|(x, y)| c * x + s * y).collect()
            })
            .collect()
    };
    let back: Vec<Vec<f64>> = out.iter().map(|u| neg(u)).collect();
    out.extend(back);
    out
}

/// What a sinogram holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Degree {
    /// Plain Radon transform of a scalar function.
    Scalar,
    /// Frame form with signature `ℓ`.
    Frame(DegreeSignature),
    /// Pair form `ω^{⊙normal} ⊙ u^{⊙tangent}`.
    Pair { normal: usize, tangent: usize },
}

impl Degree {
    pub fn order(&self) -> usize {
        match self {
            Degree::Scalar => 0,
            Degree::Frame(l) => l.order(),
            Degree::Pair { normal, tangent } => normal + tangent,
        }
    }

    pub fn uses_u(&self) -> bool {
        matches!(self, Degree::Pair { .. })
    }

    /// Every pair-form degree of order `m`.
    pub fn all_pairs(m: usize) -> Vec<Degree> {
        (0..=m)
            .map(|a| Degree::Pair {
                normal: a,
                tangent: m - a,
            })
            .collect()
    }

    /// Every frame-form degree of order `m` on `R^n`.
    pub fn all_frames(n: usize, m: usize) -> Vec<Degree> {
        DegreeSignature::all(n, m)
            .into_iter()
            .map(Degree::Frame)
            .collect()
    }
}

/// Transform data on a [`DirectionGrid`], indexed `(ω, u, p)` for pair form
/// and `(ω, p)` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    pub degree: Degree,
    pub grid: Arc<DirectionGrid>,
    pub values: Vec<f64>,
}

impl Sinogram {
    pub fn zeros(degree: Degree, grid: Arc<DirectionGrid>) -> Result<Self> {
        let rows = Self::rows_for(&degree, &grid)?;
        let len = rows * grid.offsets().count;
        Ok(Sinogram {
            degree,
            grid,
            values: vec![0.0; len],
        })
    }

    pub fn from_values(degree: Degree, grid: Arc<DirectionGrid>, values: Vec<f64>) -> Result<Self> {
        let rows = Self::rows_for(&degree, &grid)?;
        if values.len() != rows * grid.offsets().count {
            return Err(Error::Shape(format!(
                "{} values for {} rows of {} offsets",
                values.len(),
                rows,
                grid.offsets().count
            )));
        }
        Ok(Sinogram {
            degree,
            grid,
            values,
        })
    }

    fn rows_for(degree: &Degree, grid: &DirectionGrid) -> Result<usize> {
        if let Degree::Frame(l) = degree {
            if l.dim() != grid.n() {
                return Err(Error::Shape(format!(
                    "signature of length {} on R^{}",
                    l.dim(),
                    grid.n()
                )));
            }
        }
        if degree.uses_u() {
            if grid.u_count() == 0 {
                return Err(Error::InvalidParameter(
                    "pair-form data needs tangent directions on the grid".into(),
                ));
            }
            Ok(grid.len() * grid.u_count())
        } else {
            Ok(grid.len())
        }
    }

    /// Tensor order of the transformed field.
    pub fn order(&self) -> usize {
        self.degree.order()
    }

    /// Number of `u` samples per `ω` in the layout (1 without `u`).
    pub fn u_len(&self) -> usize {
        if self.degree.uses_u() {
            self.grid.u_count()
        } else {
            1
        }
    }

    pub fn p_len(&self) -> usize {
        self.grid.offsets().count
    }

    pub fn rows(&self) -> usize {
        self.values.len() / self.p_len()
    }

    pub fn row(&self, k: usize, j: usize) -> &[f64] {
        let r = k * self.u_len() + j;
        let p = self.p_len();
        &self.values[r * p..(r + 1) * p]
    }

    pub fn row_mut(&mut self, k: usize, j: usize) -> &mut [f64] {
        let r = k * self.u_len() + j;
        let p = self.p_len();
        &mut self.values[r * p..(r + 1) * p]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// Euclidean norm of the samples.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Sinogram {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::Shape("sinograms of different size".into()));
        }
        Ok(Sinogram {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        })
    }

    /// `‖self - reference‖ / ‖reference‖` over all samples.
    pub fn rel_l2_error(&self, reference: &Self) -> Result<f64> {
        let diff = self.sub(reference)?.norm();
        let base = reference.norm();
        Ok(if base == 0.0 { diff } else { diff / base })
    }

    /// Applies `op` to every `p`-row.
    pub fn map_rows(&self, op: impl Fn(&[f64]) -> Vec<f64> + Sync) -> Self {
        let p = self.p_len();
        let values: Vec<f64> = self
            .values
            .par_chunks(p)
            .flat_map_iter(|row| op(row))
            .collect();
        Sinogram {
            values,
            ..self.clone()
        }
    }

    /// `∂_p^k` by fourth-order centered differences.
    pub fn diff_p(&self, k: usize) -> Self {
        let h = self.grid.offsets().spacing;
        self.map_rows(|row| derivative_fd(row, h, k))
    }

    /// `∂_p^k` through the discrete Fourier transform of each row.
    pub fn diff_p_spectral(&self, k: usize) -> Self {
        let h = self.grid.offsets().spacing;
        self.map_rows(|row| derivative_spectral(row, h, k))
    }
}

/// `k`-th derivative of uniformly sampled data by fourth-order centered
/// differences, with zero beyond the ends.
pub fn derivative_fd(values: &[f64], h: f64, k: usize) -> Vec<f64> {
    let at = |v: &[f64], j: isize| -> f64 {
        if j < 0 || j as usize >= v.len() {
            0.0
        } else {
            v[j as usize]
        }
    };
    let d1 = |v: &[f64]| -> Vec<f64> {
        (0..v.len() as isize)
            .map(|j| {
                (-at(v, j + 2) + 8.0 * at(v, j + 1) - 8.0 * at(v, j - 1) + at(v, j - 2))
                    / (12.0 * h)
            })
            .collect()
    };
    let d2 = |v: &[f64]| -> Vec<f64> {
        (0..v.len() as isize)
            .map(|j| {
                (-at(v, j + 2) + 16.0 * at(v, j + 1) - 30.0 * at(v, j) + 16.0 * at(v, j - 1)
                    - at(v, j - 2))
                    / (12.0 * h * h)
            })
            .collect()
    };
    let mut out = values.to_vec();
    for _ in 0..k / 2 {
        out = d2(&out);
    }
    if k % 2 == 1 {
        out = d1(&out);
    }
    out
}

/// Applies the Fourier multiplier `mult(σ)` to a zero-padded row and returns
/// the real and imaginary parts of the result on the original samples.
pub fn fourier_multiplier(
    values: &[f64],
    h: f64,
    mult: impl Fn(f64) -> Complex64,
) -> (Vec<f64>, Vec<f64>) {
    let len = values.len();
    let size = (2 * len).next_power_of_two();
    let mut buf: Vec<Complex64> = values
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let kk = if k <= size / 2 { k as f64 } else { k as f64 - size as f64 };
        let sigma = 2.0 * PI * kk / (size as f64 * h);
        *z *= if k == size / 2 {
            // The unpaired Nyquist sample keeps only the even part.
            Complex64::new(0.5 * (mult(sigma) + mult(-sigma)).re, 0.0)
        } else {
            mult(sigma)
        };
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / size as f64;
    (
        buf[..len].iter().map(|z| z.re * scale).collect(),
        buf[..len].iter().map(|z| z.im * scale).collect(),
    )
}

/// `k`-th derivative through the discrete Fourier transform.
pub fn derivative_spectral(values: &[f64], h: f64, k: usize) -> Vec<f64> {
    fourier_multiplier(values, h, |s| Complex64::new(0.0, s).powu(k as u32)).0
}

/// Options for the quadrature route.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Interpolation stencil applied to the sampled field.
    pub stencil: Stencil,
    /// Step along the hyperplane, in units of the grid spacing.
    pub step: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            stencil: Stencil::Cubic,
            step: 1.0,
        }
    }
}

/// Plain Radon transform of a scalar field.
pub fn radon_scalar(f: &TensorField, grid: &Arc<DirectionGrid>, opts: &QuadratureOptions) -> Result<Sinogram> {
    if f.order() != 0 {
        return Err(Error::Shape("radon_scalar needs a scalar field".into()));
    }
    Ok(radon_componentwise(f, grid, opts)?.remove(0))
}

/// Plain Radon transform of every compressed coefficient of `f`.
pub fn radon_componentwise(
    f: &TensorField,
    grid: &Arc<DirectionGrid>,
    opts: &QuadratureOptions,
) -> Result<Vec<Sinogram>> {
    let g = f.grid();
    let n = g.n();
    if grid.n() != n {
        return Err(Error::Shape("direction grid and field dimensions differ".into()));
    }
    if !(opts.step > 0.0) {
        return Err(Error::InvalidParameter("quadrature step must be positive".into()));
    }
    let d = f.dim();
    let offsets = *grid.offsets();
    let h = g.spacing();
    let ht = opts.step * h;
    let reach = g.half_width() * (n as f64).sqrt() + 2.0 * h;
    let tn = (reach / ht).ceil() as isize;
    let tvals: Vec<f64> = (-tn..=tn).map(|k| k as f64 * ht).collect();
    let weight = ht.powi(n as i32 - 1);
    let bound = g.half_width() + h * opts.stencil.len() as f64;
    let samples = g.samples() as isize;

    // rows[k] holds [p][coeff] for direction k.
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let fr = grid.frame(k);
            let mut out = vec![0.0; offsets.count * d];
            let mut x = vec![0.0; n];
            let mut tidx = vec![0usize; n - 1];
            let mut axes: Vec<(isize, [f64; 6])> = vec![(0, [0.0; 6]); n];
            for j in 0..offsets.count {
                let p = offsets.value(j);
                let acc = &mut out[j * d..(j + 1) * d];
                // Walk the (n-1)-dimensional tangent grid.
                tidx.iter_mut().for_each(|t| *t = 0);
                'plane: loop {
                    for a in 0..n {
                        x[a] = p * fr.normal[a];
                    }
                    for (b, &ti) in tidx.iter().enumerate() {
                        let t = tvals[ti];
                        for a in 0..n {
                            x[a] += t * fr.tangents[b][a];
                        }
                    }
                    if x.iter().all(|v| v.abs() < bound) {
                        for a in 0..n {
                            axes[a] = opts.stencil.weights((x[a] + g.half_width()) / h);
                        }
                        add_interpolated(f, &axes, opts.stencil.len(), samples, weight, acc);
                    }
                    // Advance the multi-index over the tangent grid.
                    let mut b = 0;
                    loop {
                        if b == tidx.len() {
                            break 'plane;
                        }
                        tidx[b] += 1;
                        if tidx[b] < tvals.len() {
                            break;
                        }
                        tidx[b] = 0;
                        b += 1;
                    }
                }
            }
            out
        })
        .collect();

    (0..d)
        .map(|c| {
            let mut values = Vec::with_capacity(grid.len() * offsets.count);
            for row in &rows {
                values.extend((0..offsets.count).map(|j| row[j * d + c]));
            }
            Sinogram::from_values(Degree::Scalar, grid.clone(), values)
        })
        .collect()
}

fn add_interpolated(
    f: &TensorField,
    axes: &[(isize, [f64; 6])],
    len: usize,
    samples: isize,
    weight: f64,
    acc: &mut [f64],
) {
    let n = axes.len();
    let d = acc.len();
    let data = f.data();
    let mut idx = vec![0usize; n];
    let total = len.pow(n as u32);
    'tap: for tap in 0..total {
        let mut rem = tap;
        let mut w = weight;
        let mut flat = 0usize;
        for a in 0..n {
            let k = rem % len;
            rem /= len;
            let j = axes[a].0 + k as isize;
            if j < 0 || j >= samples {
                continue 'tap;
            }
            idx[a] = j as usize;
            w *= axes[a].1[k];
        }
        for &j in &idx {
            flat = flat * samples as usize + j;
        }
        let node = &data[flat * d..(flat + 1) * d];
        for (o, v) in acc.iter_mut().zip(node) {
            *o += w * v;
        }
    }
}

/// Direction tensor of a degree at `(ω_k, u_j)`.
pub fn direction_tensor(grid: &DirectionGrid, degree: &Degree, k: usize, j: usize) -> Result<SymTensor> {
    match degree {
        Degree::Scalar => Ok(SymTensor::scalar(grid.n(), 1.0)),
        Degree::Frame(l) => grid.frame(k).tensor(l),
        Degree::Pair { normal, tangent } => {
            pair_tensor(grid.direction(k), &grid.us(k)[j], *normal, *tangent)
        }
    }
}

/// Contracts componentwise Radon data of an `m`-tensor field with the
/// direction tensors of `degree`.
pub fn grt_from_components(components: &[Sinogram], m: usize, degree: &Degree) -> Result<Sinogram> {
    let grid = components
        .first()
        .ok_or_else(|| Error::Shape("no component data".into()))?
        .grid
        .clone();
    let n = grid.n();
    let b = basis(n, m);
    if components.len() != b.len() {
        return Err(Error::Shape("component count does not match the order".into()));
    }
    if degree.order() != m {
        let degrees = match degree {
            Degree::Frame(l) => l.0.clone(),
            Degree::Pair { normal, tangent } => vec![*normal, *tangent],
            Degree::Scalar => Vec::new(),
        };
        return Err(Error::DegreeMismatch { degrees, order: m });
    }
    let mut out = Sinogram::zeros(degree.clone(), grid.clone())?;
    let ul = out.u_len();
    let pl = out.p_len();
    let rows: Vec<Result<Vec<f64>>> = (0..grid.len() * ul)
        .into_par_iter()
        .map(|r| {
            let (k, j) = (r / ul, r % ul);
            let t = direction_tensor(&grid, degree, k, j)?;
            let mut row = vec![0.0; pl];
            for (c, (&tc, &w)) in t.coeffs().iter().zip(b.multiplicities()).enumerate() {
                let s = tc * w;
                if s == 0.0 {
                    continue;
                }
                for (o, v) in row.iter_mut().zip(components[c].row(k, 0)) {
                    *o += s * v;
                }
            }
            Ok(row)
        })
        .collect();
    for (r, row) in rows.into_iter().enumerate() {
        let row = row?;
        out.values[r * pl..(r + 1) * pl].copy_from_slice(&row);
    }
    Ok(out)
}

/// Generalized Radon transform by direct quadrature.
pub fn grt(f: &TensorField, degree: &Degree, grid: &Arc<DirectionGrid>, opts: &QuadratureOptions) -> Result<Sinogram> {
    Ok(grt_many(f, std::slice::from_ref(degree), grid, opts)?.remove(0))
}

/// Several degrees sharing one quadrature pass.
pub fn grt_many(
    f: &TensorField,
    degrees: &[Degree],
    grid: &Arc<DirectionGrid>,
    opts: &QuadratureOptions,
) -> Result<Vec<Sinogram>> {
    for deg in degrees {
        check_degree(deg, f.order(), grid.n())?;
    }
    let comps = radon_componentwise(f, grid, opts)?;
    degrees
        .iter()
        .map(|deg| grt_from_components(&comps, f.order(), deg))
        .collect()
}

fn check_degree(degree: &Degree, m: usize, n: usize) -> Result<()> {
    match degree {
        Degree::Frame(l) if l.dim() != n => Err(Error::Shape(format!(
            "signature of length {} on R^{n}",
            l.dim()
        ))),
        Degree::Frame(l) if l.order() != m => Err(Error::DegreeMismatch {
            degrees: l.0.clone(),
            order: m,
        }),
        Degree::Pair { normal, tangent } if normal + tangent != m => Err(Error::DegreeMismatch {
            degrees: vec![*normal, *tangent],
            order: m,
        }),
        Degree::Scalar if m != 0 => Err(Error::DegreeMismatch {
            degrees: Vec::new(),
            order: m,
        }),
        _ => Ok(()),
    }
}

/// Options for the Fourier route.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierOptions {
    /// Zero-padding factor applied before the transform; `None` picks 4 for
    /// `n = 2` and 2 otherwise.
    pub oversample: Option<usize>,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions { oversample: None }
    }
}

/// Generalized Radon transform through the Fourier slice relation
/// `ĝ(ω, σ) = (2π)^{(n-1)/2} ⟨f̂(σω), ω_1^{⊙ℓ_1} ⊙ ...⟩` and a trapezoid
/// inverse transform in `σ`.
pub fn grt_fourier(
    f: &TensorField,
    degree: &Degree,
    grid: &Arc<DirectionGrid>,
    opts: &FourierOptions,
) -> Result<Sinogram> {
    Ok(grt_fourier_many(f, std::slice::from_ref(degree), grid, opts)?.remove(0))
}

/// Several degrees sharing one spectral sampling pass.
pub fn grt_fourier_many(
    f: &TensorField,
    degrees: &[Degree],
    grid: &Arc<DirectionGrid>,
    opts: &FourierOptions,
) -> Result<Vec<Sinogram>> {
    let g = f.grid();
    let n = g.n();
    if grid.n() != n {
        return Err(Error::Shape("direction grid and field dimensions differ".into()));
    }
    for deg in degrees {
        check_degree(deg, f.order(), n)?;
    }
    let factor = opts.oversample.unwrap_or(if n == 2 { 4 } else { 2 });
    if factor == 0 {
        return Err(Error::InvalidParameter("oversampling factor must be positive".into()));
    }
    let spec = forward(&f.zero_pad(factor));
    let offsets = *grid.offsets();
    let sigma_max = (PI / offsets.spacing).min(g.nyquist() * (1.0 - 2.0 / g.samples() as f64));
    let reach = g.half_width() * (n as f64).sqrt();
    let period = 2.0 * (offsets.reach() + reach);
    let count = (sigma_max * period / (2.0 * PI)).ceil() as usize;
    let dsig = sigma_max / count as f64;
    let sigmas: Vec<f64> = (0..=count).map(|k| k as f64 * dsig).collect();
    // Trapezoid over [-σmax, σmax] folded onto σ >= 0 by conjugate symmetry.
    let mut wts: Vec<f64> = vec![2.0 * dsig; count + 1];
    wts[0] = dsig;
    wts[count] = dsig;
    let pref = (2.0 * PI).powf((n as f64 - 1.0) / 2.0) / (2.0 * PI).sqrt();
    let phases: Vec<Vec<Complex64>> = (0..offsets.count)
        .map(|j| {
            let p = offsets.value(j);
            sigmas
                .iter()
                .zip(&wts)
                .map(|(s, w)| Complex64::from_polar(w * pref, s * p))
                .collect()
        })
        .collect();
    let b = basis(n, f.order());
    let mult = b.multiplicities();

    let per_dir: Vec<Result<Vec<Vec<f64>>>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let samples = spec.sample_polar(grid.direction(k), &sigmas)?;
            let mut out = Vec::with_capacity(degrees.len());
            for deg in degrees {
                let ul = if deg.uses_u() { grid.u_count() } else { 1 };
                let mut rows = Vec::with_capacity(ul * offsets.count);
                for j in 0..ul {
                    let t = direction_tensor(grid, deg, k, j)?;
                    let ghat: Vec<Complex64> = samples
                        .iter()
                        .map(|fk| {
                            fk.coeffs()
                                .iter()
                                .zip(t.coeffs())
                                .zip(mult)
                                .fold(Complex64::new(0.0, 0.0), |acc, ((a, b), w)| acc + a * (b * w))
                        })
                        .collect();
                    for ph in &phases {
                        let v: f64 = ghat.iter().zip(ph).map(|(a, e)| (a * e).re).sum();
                        rows.push(v);
                    }
                }
                out.push(rows);
            }
            Ok(out)
        })
        .collect();
    let per_dir = per_dir.into_iter().collect::<Result<Vec<_>>>()?;
    degrees
        .iter()
        .enumerate()
        .map(|(q, deg)| {
            let values: Vec<f64> = per_dir.iter().flat_map(|d| d[q].iter().copied()).collect();
            Sinogram::from_values(deg.clone(), grid.clone(), values)
        })
        .collect()
}

/// Interpolates a `p`-row at an arbitrary offset with a cubic stencil.
pub fn interp_row(row: &[f64], offsets: &OffsetGrid, p: f64) -> f64 {
    interp_uniform(row, offsets.index_of(p), Stencil::Cubic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{gaussian_radon, PhantomSpec};

    fn setup() -> (TensorField, Arc<DirectionGrid>) {
        let g = Grid::new(2, 5.0, 64).unwrap();
        let f = PhantomSpec::gaussian(vec![0.3, -0.2], 0.9, 1.0).sample(&g).unwrap();
        let dg = DirectionGrid::circle(16, OffsetGrid::for_grid(&g), true).unwrap();
        (f, Arc::new(dg))
    }

    #[test]
    fn scalar_radon_of_gaussian() {
        let (f, dg) = setup();
        let opts = QuadratureOptions { stencil: Stencil::Quintic, ..Default::default() };
        let s = radon_scalar(&f, &dg, &opts).unwrap();
        let mut worst = 0.0f64;
        for k in 0..dg.len() {
            for (j, v) in s.row(k, 0).iter().enumerate() {
                let exact = gaussian_radon(&[0.3, -0.2], 0.9, dg.direction(k), dg.offsets().value(j));
                worst = worst.max((v - exact).abs());
            }
        }
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn fourier_route_matches_closed_form() {
        let (f, dg) = setup();
        let s = grt_fourier(&f, &Degree::Scalar, &dg, &FourierOptions::default()).unwrap();
        let mut worst = 0.0f64;
        for k in 0..dg.len() {
            for (j, v) in s.row(k, 0).iter().enumerate() {
                let exact = gaussian_radon(&[0.3, -0.2], 0.9, dg.direction(k), dg.offsets().value(j));
                worst = worst.max((v - exact).abs());
            }
        }
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn grids_are_antipodal() {
        let off = OffsetGrid::symmetric(10, 0.1);
        assert!(DirectionGrid::circle(12, off, true).unwrap().is_antipodal());
        let sph = DirectionGrid::sphere(40, off, 8).unwrap();
        assert!(sph.is_antipodal());
        let total: f64 = (0..sph.len()).map(|k| sph.weight(k)).sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
        assert!((sph.u_weight() * 8.0 - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn product_rule_integrates_polynomials() {
        let off = OffsetGrid::symmetric(4, 0.1);
        let sph = DirectionGrid::sphere_product(2, 24, off, 0).unwrap();
        assert!(sph.is_antipodal());
        // ∫ z⁴ dS = 4π/5 and ∫ x²y² dS = 4π/15 on the unit sphere.
        let moment = |f: &dyn Fn(&[f64]) -> f64| -> f64 {
            (0..sph.len()).map(|k| sph.weight(k) * f(sph.direction(k))).sum()
        };
        assert!((moment(&|_| 1.0) - 4.0 * PI).abs() < 1e-12);
        assert!((moment(&|w| w[2].powi(4)) - 0.8 * PI).abs() < 1e-12);
        assert!((moment(&|w| (w[0] * w[1]).powi(2)) - 4.0 * PI / 15.0).abs() < 1e-12);
    }

    #[test]
    fn degree_checks() {
        let (f, dg) = setup();
        let bad = Degree::Frame(DegreeSignature(vec![1, 0]));
        assert!(matches!(
            grt(&f, &bad, &dg, &QuadratureOptions::default()),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn derivatives_agree() {
        let h = 0.05;
        let xs: Vec<f64> = (-120..=120).map(|j| j as f64 * h).collect();
        let v: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
        let fd = derivative_fd(&v, h, 2);
        let sp = derivative_spectral(&v, h, 2);
        for ((x, a), b) in xs.iter().zip(&fd).zip(&sp) {
            let exact = (4.0 * x * x - 2.0) * (-x * x).exp();
            assert!((a - exact).abs() < 1e-4);
            assert!((b - exact).abs() < 1e-9);
        }
    }
}
