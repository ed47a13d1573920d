//! Unique continuation experiments.
//!
//! In odd dimensions the inversion is local, so data vanishing on every
//! hyperplane through a ball `U` need not determine the field on `U`: a
//! shell-supported component can hide behind zero data. In even dimensions
//! the non-local filter makes shell-supported fields visible on hyperplanes
//! through `U`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomp::apply_d_spectral;
use crate::error::{Error, Result};
use crate::interp::smooth_step;
use crate::field::{forward, inverse, wavevector, Grid, SpectralField, TensorField};
use crate::invert::{recover_component, GrtDataset, InversionOptions};
use crate::radon::{grt_many, Degree, DirectionGrid, OffsetGrid, QuadratureOptions, Sinogram};
use crate::symtensor::{DegreeSignature, SymTensor};

/// Outcome of a unique continuation experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcpReport {
    pub n: usize,
    pub m: usize,
    pub i: usize,
    /// Radius of the ball `U` centred at the origin.
    pub radius: f64,
    /// Outer radius of the shell carrying the field.
    pub outer: f64,
    /// `‖v|_U‖ / ‖v‖`.
    pub interior_norm: f64,
    /// `‖v|_{shell}‖ / ‖v‖`.
    pub exterior_norm: f64,
    /// Largest `|g|` on hyperplanes meeting `U`.
    pub data_norm_on_u: f64,
    /// `data_norm_on_u / ‖g‖∞`.
    pub margin: f64,
    pub passed: bool,
}

/// `exp(-1/(1 - s²))` on `|s| < 1`, zero elsewhere.
pub fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Smooth profile supported in `1 < |p| < a` with parity `(-1)^i` whose even
/// moments `∫_1^a p^{2j} h dp` vanish for `j < i`.
///
/// On the positive half-line `h = χ(p) e^{-s²} P(s)`, `s = (p-c)/w`,
/// with `χ` a flat-topped cutoff of the support and `P` a polynomial fixed by
/// the moment conditions. The Gaussian envelope keeps the spectrum small at
/// the grid Nyquist frequency, which matters once the inversion applies
/// several derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellProfile {
    pub inner: f64,
    pub outer: f64,
    pub parity: usize,
    pub width: f64,
    pub poly: Vec<f64>,
}

impl ShellProfile {
    /// Profile with the default envelope width: the cutoff ramps start
    /// 3.8 widths from the centre, where the envelope is below `1e-6`.
    pub fn new(inner: f64, outer: f64, i: usize) -> Result<Self> {
        Self::with_width(inner, outer, i, (outer - inner) / 9.5)
    }

    pub fn with_width(inner: f64, outer: f64, i: usize, width: f64) -> Result<Self> {
        if !(outer > inner && inner >= 0.0 && width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shell radii must satisfy 0 <= inner < outer, got {inner}, {outer}"
            )));
        }
        let mut prof = ShellProfile {
            inner,
            outer,
            parity: i,
            width,
            poly: vec![1.0],
        };
        if i == 0 {
            return Ok(prof);
        }
        // Unknown coefficients of s^2..s^{i+1}; s^1 alone is nearly
        // orthogonal to the constant moment, so it is skipped.
        let samples = 8000;
        let moment = |j: usize, q: usize| -> f64 {
            let mut acc = 0.0;
            for k in 0..samples {
                let p = inner + (outer - inner) * (k as f64 + 0.5) / samples as f64;
                let s = (p - prof.center()) / width;
                acc += p.powi(2 * j as i32) * s.powi(q as i32) * prof.envelope(p);
            }
            acc * (outer - inner) / samples as f64
        };
        let a = DMatrix::from_fn(i, i, |j, q| moment(j, q + 2));
        let b = DVector::from_fn(i, |j, _| -moment(j, 0));
        let c = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::InvalidParameter("degenerate shell profile".into()))?;
        prof.poly.push(0.0);
        prof.poly.extend(c.iter());
        Ok(prof)
    }

    fn center(&self) -> f64 {
        0.5 * (self.inner + self.outer)
    }

    fn envelope(&self, p: f64) -> f64 {
        let ramp = 0.1 * (self.outer - self.inner);
        let chi = smooth_step((p - self.inner) / ramp) * smooth_step((self.outer - p) / ramp);
        if chi == 0.0 {
            return 0.0;
        }
        let d = (p - self.center()) / self.width;
        chi * (-d * d).exp()
    }

    fn half_profile(&self, p: f64) -> f64 {
        let e = self.envelope(p);
        if e == 0.0 {
            return 0.0;
        }
        let s = (p - self.center()) / self.width;
        e * self.poly.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn eval(&self, p: f64) -> f64 {
        if p >= 0.0 {
            self.half_profile(p)
        } else if self.parity % 2 == 0 {
            self.half_profile(-p)
        } else {
            -self.half_profile(-p)
        }
    }
}

/// Parameters of [`ucp_counterexample`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcpOddConfig {
    pub m: usize,
    pub i: usize,
    pub outer: f64,
    pub half_width: f64,
    pub samples: usize,
    /// Fibonacci directions on the sphere.
    pub directions: usize,
    /// Envelope width of the profile; `None` picks the default.
    pub width: Option<f64>,
    /// Offsets are sampled this many times finer than the spatial grid.
    pub p_oversample: usize,
}

impl Default for UcpOddConfig {
    fn default() -> Self {
        UcpOddConfig {
            m: 0,
            i: 0,
            outer: 2.5,
            half_width: 3.0,
            samples: 64,
            directions: 2000,
            width: None,
            p_oversample: 4,
        }
    }
}

/// Tolerance for the interior-to-exterior ratio of the odd experiment.
pub const ODD_RATIO_LIMIT: f64 = 5e-2;
/// Smallest exterior norm that counts as a non-trivial field.
pub const EXTERIOR_FLOOR: f64 = 1e-3;
/// Smallest data margin that counts as visible in even dimensions.
pub const EVEN_MARGIN_FLOOR: f64 = 1e-3;

fn ratios(v: &TensorField, radius: f64, outer: f64) -> (f64, f64) {
    let total = v.l2_norm();
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let r2 = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>();
    let inside = v.l2_norm_where(|x| r2(x) < radius * radius);
    let shell = v.l2_norm_where(|x| {
        let r = r2(x);
        r >= radius * radius && r < outer * outer
    });
    (inside / total, shell / total)
}

fn inner_margin(sinos: &[Sinogram], radius: f64) -> (f64, f64) {
    let mut on_u = 0.0f64;
    let mut all = 0.0f64;
    for s in sinos {
        let off = *s.grid.offsets();
        for r in 0..s.rows() {
            let row = &s.values[r * s.p_len()..(r + 1) * s.p_len()];
            for (j, v) in row.iter().enumerate() {
                all = all.max(v.abs());
                if off.value(j).abs() < radius {
                    on_u = on_u.max(v.abs());
                }
            }
        }
    }
    let margin = if all == 0.0 { 0.0 } else { on_u / all };
    (on_u, margin)
}

/// Odd-dimensional counterexample on `R^3`: data `g = h(p)` for every
/// signature with normal power `i`, with `h` vanishing for `|p| < 1`, is
/// pushed through the inversion. The recovered `v_i` is supported in the
/// shell `1 < |x| < a` and vanishes on the unit ball.
pub fn ucp_counterexample(cfg: &UcpOddConfig) -> Result<UcpReport> {
    let n = 3;
    if cfg.i > cfg.m {
        return Err(Error::InvalidParameter(format!(
            "component index {} exceeds the order {}",
            cfg.i, cfg.m
        )));
    }
    let grid = Grid::new(n, cfg.half_width, cfg.samples)?;
    let radius = 1.0;
    let profile = match cfg.width {
        Some(w) => ShellProfile::with_width(radius, cfg.outer, cfg.i, w)?,
        None => ShellProfile::new(radius, cfg.outer, cfg.i)?,
    };
    let fine = OffsetGrid::for_grid(&grid);
    let factor = cfg.p_oversample.max(1);
    let offsets = OffsetGrid::symmetric(fine.count / 2 * factor, fine.spacing / factor as f64);
    let dg = Arc::new(DirectionGrid::sphere(cfg.directions, offsets, 0)?);
    let off = *dg.offsets();
    let row: Vec<f64> = off.values().into_iter().map(|p| profile.eval(p)).collect();
    let mut data = GrtDataset::new(cfg.m, dg.clone());
    for l in DegreeSignature::family(n, cfg.m, cfg.i) {
        let values: Vec<f64> = (0..dg.len()).flat_map(|_| row.iter().copied()).collect();
        data.insert(Sinogram::from_values(Degree::Frame(l), dg.clone(), values)?)?;
    }
    let sinos: Vec<Sinogram> = data.data.values().cloned().collect();
    let (on_u, margin) = inner_margin(&sinos, radius);
    // The data vanish for |p| >= a, so the field is supported in |x| < a.
    // The profile's vanishing moments make v_i compactly supported as well,
    // so the solve needs no padding.
    let opts = InversionOptions {
        support_radius: Some(cfg.outer),
        pad: 1,
        ..InversionOptions::default()
    };
    let rec = recover_component(&data, cfg.i, &grid, &opts)?;
    let (interior, exterior) = ratios(&rec.field, radius, cfg.outer);
    let passed = on_u == 0.0 && interior <= ODD_RATIO_LIMIT * exterior && exterior > EXTERIOR_FLOOR;
    Ok(UcpReport {
        n,
        m: cfg.m,
        i: cfg.i,
        radius,
        outer: cfg.outer,
        interior_norm: interior,
        exterior_norm: exterior,
        data_norm_on_u: on_u,
        margin,
        passed,
    })
}

/// Parameters of [`ucp_uniqueness_experiment`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcpEvenConfig {
    pub m: usize,
    pub i: usize,
    pub half_width: f64,
    pub samples: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for UcpEvenConfig {
    fn default() -> Self {
        UcpEvenConfig {
            m: 0,
            i: 0,
            half_width: 3.0,
            samples: 64,
            directions: 180,
            seed: 0,
        }
    }
}

/// A random ring-shaped potential on `R^2`, supported in
/// `center - width < |x| < center + width`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingPotential {
    pub center: f64,
    pub width: f64,
    pub harmonics: Vec<(f64, f64)>,
}

impl RingPotential {
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = rng.random_range(1.45..1.6);
        let width = rng.random_range(0.35..0.4);
        let harmonics = (0..4)
            .map(|k| {
                if k == 0 {
                    (rng.random_range(0.5..1.0), 0.0)
                } else {
                    (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
                }
            })
            .collect();
        RingPotential {
            center,
            width,
            harmonics,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let b = bump((r - self.center) / self.width);
        if b == 0.0 {
            return 0.0;
        }
        let th = x[1].atan2(x[0]);
        let ang: f64 = self
            .harmonics
            .iter()
            .enumerate()
            .map(|(k, (a, c))| a * (k as f64 * th).cos() + c * (k as f64 * th).sin())
            .sum();
        b * ang
    }
}

/// `(∇^⊥)^{⊙k} ψ`, a solenoidal `k`-tensor field for `k >= 1`.
pub fn perp_gradient_power(psi: &TensorField, k: usize) -> Result<TensorField> {
    if psi.grid().n() != 2 || psi.order() != 0 {
        return Err(Error::Shape("perp gradients need a scalar field on R^2".into()));
    }
    let g = *psi.grid();
    let ph = forward(psi);
    let tensors = (0..g.node_count())
        .map(|q| {
            let xi = wavevector(&g, q);
            let perp = [-xi[1], xi[0]];
            let t = SymTensor::vector_power(&perp, k).complexify();
            t.map(|c| c * ph.at(q)[0] * num_complex::Complex64::i().powu(k as u32))
        })
        .collect();
    Ok(inverse(&SpectralField::from_tensors(g, k, tensors)?))
}

/// Even-dimensional experiment on `R^2`: a shell-supported `v_i`
/// (solenoidal for `i < m`) gives `f = d^i v_i`, whose family with normal
/// power `i` is generically non-zero on lines through the unit disc.
pub fn ucp_uniqueness_experiment(cfg: &UcpEvenConfig) -> Result<UcpReport> {
    let n = 2;
    if cfg.i > cfg.m {
        return Err(Error::InvalidParameter(format!(
            "component index {} exceeds the order {}",
            cfg.i, cfg.m
        )));
    }
    let grid = Grid::new(n, cfg.half_width, cfg.samples)?;
    let ring = RingPotential::random(cfg.seed);
    let psi = TensorField::scalar_from_fn(grid, |x| ring.eval(x));
    let k = cfg.m - cfg.i;
    let v = if k == 0 { psi } else { perp_gradient_power(&psi, k)? };
    let f = inverse(&apply_d_spectral(&forward(&v), cfg.i)?);
    let dg = Arc::new(DirectionGrid::circle(cfg.directions, OffsetGrid::for_grid(&grid), false)?);
    let degrees: Vec<Degree> = DegreeSignature::family(n, cfg.m, cfg.i)
        .into_iter()
        .map(Degree::Frame)
        .collect();
    let sinos = grt_many(&f, &degrees, &dg, &QuadratureOptions::default())?;
    let radius = 1.0;
    let (on_u, margin) = inner_margin(&sinos, radius);
    let outer = ring.center + ring.width;
    let (interior, exterior) = ratios(&v, radius, outer);
    Ok(UcpReport {
        n,
        m: cfg.m,
        i: cfg.i,
        radius,
        outer,
        interior_norm: interior,
        exterior_norm: exterior,
        data_norm_on_u: on_u,
        margin,
        passed: margin >= EVEN_MARGIN_FLOOR,
    })
}

/// `2π`-periodic angle helper used by tests.
pub fn angle(x: &[f64]) -> f64 {
    x[1].atan2(x[0]).rem_euclid(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_has_vanishing_moments() {
        for i in 0..3 {
            let h = ShellProfile::new(1.0, 2.5, i).unwrap();
            assert_eq!(h.eval(0.5), 0.0);
            assert_eq!(h.eval(2.6), 0.0);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(h.eval(-1.7), sign * h.eval(1.7));
            for j in 0..i {
                let mut acc = 0.0;
                let steps = 20000;
                for s in 0..steps {
                    let p = 1.0 + 1.5 * (s as f64 + 0.5) / steps as f64;
                    acc += p.powi(2 * j as i32) * h.eval(p);
                }
                assert!((acc * 1.5 / steps as f64).abs() < 1e-6, "i = {i}, j = {j}");
            }
        }
    }

    #[test]
    fn perp_gradient_is_solenoidal() {
        let g = Grid::new(2, 3.0, 48).unwrap();
        let ring = RingPotential::random(2);
        let psi = TensorField::scalar_from_fn(g, |x| ring.eval(x));
        let v = perp_gradient_power(&psi, 2).unwrap();
        let d = crate::decomp::apply_delta(&v).unwrap();
        assert!(d.l2_norm() < 1e-12 * v.l2_norm().max(1.0));
    }
}
