//! Weighted Sobolev norms, the Reshetnyak identity and range conditions.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{forward, TensorField};
use crate::interp::{gauss_legendre, trapezoid_weights};
use crate::radon::{grt, grt_fourier, Degree, DirectionGrid, FourierOptions, QuadratureOptions, Sinogram};
use crate::symtensor::{compositions, frame, pair_tensor};

/// Weight `|y|^{2t} (1 + |y|²)^{s - t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex {
    pub s: f64,
    pub t: f64,
}

impl SobolevIndex {
    pub fn new(s: f64, t: f64) -> Self {
        SobolevIndex { s, t }
    }

    /// Checks `t > -n/2`, needed for the weight to be locally integrable.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bound = -(n as f64) / 2.0;
        if self.t > bound && self.s.is_finite() {
            Ok(())
        } else {
            Err(Error::SobolevIndex { t: self.t, bound })
        }
    }

    /// Weight at `|y| = r`; zero at the origin unless `t = 0`.
    pub fn weight(&self, r: f64) -> f64 {
        if r == 0.0 {
            return if self.t == 0.0 { 1.0 } else { 0.0 };
        }
        r.powf(2.0 * self.t) * (1.0 + r * r).powf(self.s - self.t)
    }
}

/// Domain a norm is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `R^n`, for fields.
    Euclidean,
    /// `S^{n-1} × R`, for data without tangent directions.
    SphereLine,
    /// Pairs `(ω, p, u)` with `u ⊥ ω`, for pair-form data.
    TangentBundle,
}

/// Plain norm or the one weighted by `ξ^{⊙ℓ_1} ⊙ (|ξ| u)^{⊙ℓ_2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormVariant {
    Plain,
    TensorWeighted { normal: usize, tangent: usize },
}

/// The object whose norm is taken.
#[derive(Clone, Copy, Debug)]
pub enum NormTarget<'a> {
    Field(&'a TensorField),
    Sinogram(&'a Sinogram),
}

/// Number of tangent directions used for `u`-integrals on `S^1 ⊂ ω^⊥` when
/// `n = 3`.
pub const U_SAMPLES_3D: usize = 32;

/// Unit vectors spanning `ξ^⊥` with their weights.
fn perp_circle(dir: &[f64]) -> Result<(Vec<Vec<f64>>, f64)> {
    let fr = frame(dir)?;
    match dir.len() {
        2 => Ok((
            vec![fr.tangents[0].clone(), fr.tangents[0].iter().map(|x| -x).collect()],
            1.0,
        )),
        3 => {
            let (a, b) = (&fr.tangents[0], &fr.tangents[1]);
            let us = (0..U_SAMPLES_3D)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / U_SAMPLES_3D as f64;
                    let (s, c) = th.sin_cos();
                    a.iter().zip(b).map(|(x, y)| c * x + s * y).collect()
                })
                .collect();
            Ok((us, 2.0 * PI / U_SAMPLES_3D as f64))
        }
        n => Err(Error::Unsupported(format!(
            "tensor-weighted norms are provided for n = 2 and n = 3, not n = {n}"
        ))),
    }
}

/// `‖object‖` in the weighted space of `domain`.
///
/// Fields are measured through `f̂` on the grid frequencies. Data are
/// measured through the Fourier transform in `p`, with the factor
/// `1 / (2 (2π)^{n-1})` that makes the slice relation an isometry.
pub fn weighted_norm(target: NormTarget<'_>, idx: SobolevIndex, domain: Domain, variant: NormVariant) -> Result<f64> {
    match (target, domain) {
        (NormTarget::Field(f), Domain::Euclidean) => field_norm(f, idx, variant),
        (NormTarget::Sinogram(g), Domain::SphereLine) if !g.degree.uses_u() => {
            require_plain(variant)?;
            data_norm(g, idx)
        }
        (NormTarget::Sinogram(g), Domain::TangentBundle) if g.degree.uses_u() => {
            require_plain(variant)?;
            data_norm(g, idx)
        }
        _ => Err(Error::Unsupported(format!(
            "norm over {domain:?} for this object"
        ))),
    }
}

fn require_plain(variant: NormVariant) -> Result<()> {
    match variant {
        NormVariant::Plain => Ok(()),
        _ => Err(Error::Unsupported("tensor weighting applies to fields".into())),
    }
}

fn field_norm(f: &TensorField, idx: SobolevIndex, variant: NormVariant) -> Result<f64> {
    let g = *f.grid();
    let n = g.n();
    idx.validate(n)?;
    let m = f.order();
    if let NormVariant::TensorWeighted { normal, tangent } = variant {
        if normal + tangent != m {
            return Err(Error::DegreeMismatch {
                degrees: vec![normal, tangent],
                order: m,
            });
        }
    }
    let fh = forward(f);
    let mult = crate::symtensor::basis(n, m);
    let mult = mult.multiplicities();
    let cell = g.freq_spacing().powi(n as i32);
    let total: Result<Vec<f64>> = (0..g.node_count())
        .into_par_iter()
        .map(|k| {
            let xi = g.frequency_point(k);
            let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            let c = fh.at(k);
            match variant {
                NormVariant::Plain => {
                    let w = idx.weight(r);
                    if w == 0.0 {
                        return Ok(0.0);
                    }
                    let v: f64 = c.iter().zip(mult).map(|(z, m)| m * z.norm_sqr()).sum();
                    Ok(w * v)
                }
                NormVariant::TensorWeighted { normal, tangent } => {
                    let w = if r == 0.0 {
                        if m == 0 && idx.t == 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        idx.weight(r) * r.powi(2 * m as i32)
                    };
                    if w == 0.0 {
                        return Ok(0.0);
                    }
                    let dir: Vec<f64> = if r == 0.0 {
                        let mut e = vec![0.0; n];
                        e[0] = 1.0;
                        e
                    } else {
                        xi.iter().map(|x| x / r).collect()
                    };
                    let (us, uw) = perp_circle(&dir)?;
                    let mut acc = 0.0;
                    for u in &us {
                        let t = pair_tensor(&dir, u, normal, tangent)?;
                        let z = c
                            .iter()
                            .zip(t.coeffs())
                            .zip(mult)
                            .fold(Complex64::new(0.0, 0.0), |a, ((z, b), m)| a + z * (b * m));
                        acc += uw * z.norm_sqr();
                    }
                    Ok(w * acc)
                }
            }
        })
        .collect();
    Ok((total?.iter().sum::<f64>() * cell).sqrt())
}

fn data_norm(g: &Sinogram, idx: SobolevIndex) -> Result<f64> {
    let dg = &g.grid;
    let n = dg.n();
    // The data weight is in one variable; only t > -1/2 matters there.
    if !(idx.t > -0.5) {
        return Err(Error::SobolevIndex { t: idx.t, bound: -0.5 });
    }
    let off = *dg.offsets();
    let ps = off.values();
    let sigma_max = PI / off.spacing;
    let panels = ((2.0 * sigma_max * off.reach() / PI).ceil() as usize).max(8);
    let (sig, sw) = gauss_legendre(0.0, sigma_max, panels);
    let pw = trapezoid_weights(ps.len(), off.spacing);
    let norm = (2.0 * PI).sqrt().recip();
    let table: Vec<Vec<Complex64>> = sig
        .iter()
        .map(|s| {
            ps.iter()
                .zip(&pw)
                .map(|(p, w)| Complex64::from_polar(w * norm, -s * p))
                .collect()
        })
        .collect();
    let weights: Vec<f64> = sig.iter().zip(&sw).map(|(s, w)| w * idx.weight(*s)).collect();
    let uw = if g.degree.uses_u() { dg.u_weight() } else { 1.0 };
    let ul = g.u_len();
    let total: f64 = (0..dg.len() * ul)
        .into_par_iter()
        .map(|r| {
            let (k, j) = (r / ul, r % ul);
            let row = g.row(k, j);
            let mut acc = 0.0;
            for (e, w) in table.iter().zip(&weights) {
                let z = row
                    .iter()
                    .zip(e)
                    .fold(Complex64::new(0.0, 0.0), |a, (v, e)| a + e * *v);
                acc += w * z.norm_sqr();
            }
            // Real data: |ĝ(-σ)| = |ĝ(σ)|.
            2.0 * acc * dg.weight(k) * uw
        })
        .sum();
    let pref = 0.5 * (2.0 * PI).powi(1 - n as i32);
    Ok((pref * total).sqrt())
}

/// Which forward model produces the data side of [`reshetnyak_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardRoute {
    Quadrature,
    FourierSlice,
}

/// Inputs of [`reshetnyak_check`] besides the field.
#[derive(Clone, Debug)]
pub struct ReshetnyakOptions {
    pub grid: Arc<DirectionGrid>,
    pub route: ForwardRoute,
    pub quadrature: QuadratureOptions,
    pub fourier: FourierOptions,
}

/// Both sides of the Reshetnyak identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReshetnyakResult {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
}

/// Compares `‖g‖` in `H^{s + m + (n-1)/2}_{t + m + (n-1)/2}` over pair-form
/// data `g` of degree `(ℓ_1, ℓ_2)` with the tensor-weighted `H^s_t` norm of
/// `f`.
pub fn reshetnyak_check(
    f: &TensorField,
    normal: usize,
    tangent: usize,
    idx: SobolevIndex,
    opts: &ReshetnyakOptions,
) -> Result<ReshetnyakResult> {
    let n = f.grid().n();
    let m = f.order();
    idx.validate(n)?;
    if (idx.s - idx.t).abs() > 2.0 {
        return Err(Error::InvalidParameter(format!(
            "|s - t| = {} exceeds 2",
            (idx.s - idx.t).abs()
        )));
    }
    if normal + tangent != m {
        return Err(Error::DegreeMismatch {
            degrees: vec![normal, tangent],
            order: m,
        });
    }
    let degree = Degree::Pair { normal, tangent };
    let g = match opts.route {
        ForwardRoute::Quadrature => grt(f, &degree, &opts.grid, &opts.quadrature)?,
        ForwardRoute::FourierSlice => grt_fourier(f, &degree, &opts.grid, &opts.fourier)?,
    };
    let shift = m as f64 + (n as f64 - 1.0) / 2.0;
    let lhs = weighted_norm(
        NormTarget::Sinogram(&g),
        SobolevIndex::new(idx.s + shift, idx.t + shift),
        Domain::TangentBundle,
        NormVariant::Plain,
    )?;
    let rhs = weighted_norm(
        NormTarget::Field(f),
        idx,
        Domain::Euclidean,
        NormVariant::TensorWeighted { normal, tangent },
    )?;
    let rel_gap = if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (lhs - rhs).abs() / rhs
    };
    Ok(ReshetnyakResult { lhs, rhs, rel_gap })
}

/// Least-squares fit of one moment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFit {
    pub k: usize,
    /// Coefficients of `ω^α u^β`, `|α| = k + ℓ_1`, `|β| = ℓ_2`, in the order
    /// of [`moment_monomials`].
    pub coefficients: Vec<f64>,
    /// `‖A c - b‖ / ‖(∫ |p|^k |g| dp)‖`.
    pub residual: f64,
}

/// Outcome of [`range_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub parity_defect: f64,
    pub fits: Vec<MomentFit>,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Default verdict threshold of [`range_check`].
pub const RANGE_THRESHOLD: f64 = 1e-3;

/// Exponent pairs `(α, β)` of the moment polynomial of degree `k`.
pub fn moment_monomials(n: usize, k: usize, normal: usize, tangent: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for a in compositions(n, k + normal) {
        for b in compositions(n, tangent) {
            out.push((a.clone(), b));
        }
    }
    out
}

fn monomial(v: &[f64], e: &[usize]) -> f64 {
    v.iter().zip(e).map(|(x, &p)| x.powi(p as i32)).product()
}

/// Checks pair-form data against the parity and moment conditions of the
/// range: `g(-ω, -p, -u) = (-1)^m g(ω, p, u)` and, for `k <= k_max`,
/// `∫ p^k g dp` equal to a homogeneous polynomial of degree `k + ℓ_1` in `ω`
/// and `ℓ_2` in `u`.
pub fn range_check(g: &Sinogram, k_max: usize, threshold: f64) -> Result<RangeReport> {
    let Degree::Pair { normal, tangent } = g.degree else {
        return Err(Error::InvalidParameter("range_check needs pair-form data".into()));
    };
    let dg = &g.grid;
    if !dg.is_antipodal() {
        return Err(Error::NotAntipodal);
    }
    let n = dg.n();
    let m = normal + tangent;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let ul = g.u_len();
    let pl = g.p_len();
    let scale = g.max_abs();
    let mut defect = 0.0f64;
    for k in 0..dg.len() {
        let a = dg.antipode(k).ok_or(Error::NotAntipodal)?;
        for j in 0..ul {
            let b = dg.u_antipode(k, j).ok_or(Error::NotAntipodal)?;
            let here = g.row(k, j);
            let there = g.row(a, b);
            for q in 0..pl {
                defect = defect.max((there[pl - 1 - q] - sign * here[q]).abs());
            }
        }
    }
    let parity_defect = if scale == 0.0 { defect } else { defect / scale };

    let off = *dg.offsets();
    let ps = off.values();
    let pw = trapezoid_weights(pl, off.spacing);
    let mut fits = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let monos = moment_monomials(n, k, normal, tangent);
        let rows = dg.len() * ul;
        let mut a = DMatrix::zeros(rows, monos.len());
        let mut b = DVector::zeros(rows);
        let mut babs = 0.0;
        for w in 0..dg.len() {
            for j in 0..ul {
                let r = w * ul + j;
                let row = g.row(w, j);
                let mut mom = 0.0;
                let mut mabs = 0.0;
                for ((p, wt), v) in ps.iter().zip(&pw).zip(row) {
                    let pk = p.powi(k as i32);
                    mom += wt * pk * v;
                    mabs += wt * (pk * v).abs();
                }
                b[r] = mom;
                babs += mabs * mabs;
                let omega = dg.direction(w);
                let u = &dg.us(w)[j];
                for (c, (al, be)) in monos.iter().enumerate() {
                    a[(r, c)] = monomial(omega, al) * monomial(u, be);
                }
            }
        }
        let svd = a.clone().svd(true, true);
        let eps = 1e-10 * svd.singular_values.max();
        let coef = svd
            .solve(&b, eps)
            .map_err(|e| Error::InvalidParameter(format!("moment fit failed: {e}")))?;
        let res = (&a * &coef - &b).norm();
        let babs = babs.sqrt();
        fits.push(MomentFit {
            k,
            coefficients: coef.iter().copied().collect(),
            residual: if babs == 0.0 { res } else { res / babs },
        });
    }
    let max_residual = fits.iter().map(|f| f.residual).fold(0.0, f64::max);
    Ok(RangeReport {
        parity_defect,
        passed: parity_defect <= threshold && max_residual <= threshold,
        fits,
        max_residual,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::phantom::PhantomSpec;
    use crate::radon::OffsetGrid;

    #[test]
    fn plain_norm_is_l2_at_zero_index() {
        let g = Grid::new(2, 5.0, 48).unwrap();
        let f = PhantomSpec::gaussian(vec![0.1, 0.0], 1.0, 1.0).sample(&g).unwrap();
        let a = weighted_norm(NormTarget::Field(&f), SobolevIndex::new(0.0, 0.0), Domain::Euclidean, NormVariant::Plain).unwrap();
        assert!((a - f.l2_norm()).abs() < 1e-12 * a);
    }

    #[test]
    fn index_validation() {
        let g = Grid::new(2, 5.0, 16).unwrap();
        let f = TensorField::zeros(g, 0);
        let r = weighted_norm(NormTarget::Field(&f), SobolevIndex::new(0.0, -1.0), Domain::Euclidean, NormVariant::Plain);
        assert!(matches!(r, Err(Error::SobolevIndex { .. })));
    }

    #[test]
    fn scalar_reshetnyak() {
        let g = Grid::new(2, 5.0, 64).unwrap();
        let f = PhantomSpec::gaussian(vec![0.3, -0.2], 0.9, 1.0).sample(&g).unwrap();
        let dg = Arc::new(DirectionGrid::circle(180, OffsetGrid::for_grid(&g), true).unwrap());
        let opts = ReshetnyakOptions {
            grid: dg,
            route: ForwardRoute::FourierSlice,
            quadrature: QuadratureOptions::default(),
            fourier: FourierOptions::default(),
        };
        let r = reshetnyak_check(&f, 0, 0, SobolevIndex::new(0.0, 0.0), &opts).unwrap();
        assert!(r.rel_gap < 1e-3, "{r:?}");
    }
}
