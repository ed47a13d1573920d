//! Recovery of the decomposition components from generalized Radon data.
//!
//! The family of frame-form transforms with normal power `i` determines
//! `R̄(δ^i d^i v_i)`, the componentwise Radon transform of `δ^i d^i v_i`.
//! Inverting that scalar transform per coefficient and solving
//! `δ^i d^i v_i = w` recovers `v_i`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{apply_d_k, solve_delta_d_with, DeltaDOptions};
use crate::error::{Error, Result};
use crate::field::{Grid, TensorField};
use crate::interp::{interp_uniform, smooth_step, Stencil};
use crate::radon::{
    derivative_spectral, fourier_multiplier, grt_many, Degree, DirectionGrid, QuadratureOptions,
    Sinogram,
};
use crate::symtensor::{factorial, sym_dim, DegreeSignature};

/// Frame-form transforms of one `m`-tensor field keyed by signature.
#[derive(Clone, Debug)]
pub struct GrtDataset {
    pub m: usize,
    pub grid: Arc<DirectionGrid>,
    pub data: BTreeMap<DegreeSignature, Sinogram>,
}

impl GrtDataset {
    pub fn new(m: usize, grid: Arc<DirectionGrid>) -> Self {
        GrtDataset {
            m,
            grid,
            data: BTreeMap::new(),
        }
    }

    /// Every frame-form transform of `f` by quadrature.
    pub fn from_field(f: &TensorField, grid: &Arc<DirectionGrid>, opts: &QuadratureOptions) -> Result<Self> {
        let sigs = DegreeSignature::all(grid.n(), f.order());
        let degrees: Vec<Degree> = sigs.iter().cloned().map(Degree::Frame).collect();
        let sinos = grt_many(f, &degrees, grid, opts)?;
        Ok(GrtDataset {
            m: f.order(),
            grid: grid.clone(),
            data: sigs.into_iter().zip(sinos).collect(),
        })
    }

    pub fn insert(&mut self, sino: Sinogram) -> Result<()> {
        let Degree::Frame(l) = sino.degree.clone() else {
            return Err(Error::InvalidParameter("datasets hold frame-form data".into()));
        };
        if l.order() != self.m || l.dim() != self.grid.n() {
            return Err(Error::DegreeMismatch {
                degrees: l.0,
                order: self.m,
            });
        }
        self.data.insert(l, sino);
        Ok(())
    }

    pub fn get(&self, l: &DegreeSignature) -> Option<&Sinogram> {
        self.data.get(l)
    }
}

/// Options for the scalar inversion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionOptions {
    /// Largest accepted ratio `‖Im f‖ / ‖Re f‖` of the half-line
    /// reconstruction.
    pub imag_tol: f64,
    /// Forwarded to the `δ^i d^i` solve; `None` reports without failing.
    pub range_tol: Option<f64>,
    /// A priori support radius `R`. The reconstruction is kept on `|x| <= R`
    /// and tapered smoothly to zero at the inscribed radius of the grid, so
    /// quadrature residue near the box faces does not wrap around in the
    /// periodic solves. `None` keeps the whole box.
    pub support_radius: Option<f64>,
    /// The `δ^i d^i` solves and `d^i` run on a grid this many times larger,
    /// so the periodic solution approximates the decaying one on `R^n`.
    pub pad: usize,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            imag_tol: 1e-3,
            range_tol: None,
            support_radius: None,
            pad: 4,
        }
    }
}

/// Result of [`radon_invert`].
#[derive(Clone, Debug)]
pub struct RadonInversion {
    pub field: TensorField,
    /// `‖Im f‖ / ‖Re f‖` of the reconstruction from the half-line Fourier
    /// integral; zero for data with the parity of a Radon transform.
    pub imag_residue: f64,
}

/// Discrete band-limited ramp filter, `|σ|` for `|σ| <= π/h`.
fn ramp_filter(row: &[f64], h: f64) -> Vec<f64> {
    let len = row.len();
    let kernel: Vec<f64> = (0..len)
        .map(|k| {
            if k == 0 {
                PI / (2.0 * h * h)
            } else if k % 2 == 0 {
                0.0
            } else {
                -2.0 / (PI * (k * k) as f64 * h * h)
            }
        })
        .collect();
    (0..len)
        .map(|j| {
            let mut acc = 0.0;
            for (k, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    acc += kernel[j.abs_diff(k)] * v;
                }
            }
            acc * h
        })
        .collect()
}

/// Inverse of the plain Radon transform on `R^n`:
/// `f(x) = ½ (2π)^{1-n} ∫_S (Λ g)(ω, x·ω) dω`, `Λ` the multiplier `|σ|^{n-1}`.
///
/// The data must not carry tangent directions. Returns
/// [`Error::InconsistentData`] when the odd part of the data reconstructs to
/// more than `opts.imag_tol` of the even part.
pub fn radon_invert(g: &Sinogram, grid: &Grid, opts: &InversionOptions) -> Result<RadonInversion> {
    let dg = g.grid.clone();
    let n = dg.n();
    if g.degree.uses_u() {
        return Err(Error::InvalidParameter("radon_invert needs data without u".into()));
    }
    if grid.n() != n {
        return Err(Error::Shape("grid and direction dimensions differ".into()));
    }
    let offsets = *dg.offsets();
    let h = offsets.spacing;
    let power = (n - 1) as i32;
    let filtered: Vec<(Vec<f64>, Vec<f64>)> = (0..dg.len())
        .into_par_iter()
        .map(|k| {
            let row = g.row(k, 0);
            let odd = fourier_multiplier(row, h, |s| {
                Complex64::new(0.0, -s.signum() * s.abs().powi(power))
            })
            .0;
            let even = if n == 2 {
                ramp_filter(row, h)
            } else {
                fourier_multiplier(row, h, |s| Complex64::new(s.abs().powi(power), 0.0)).0
            };
            (even, odd)
        })
        .collect();
    let pref = 0.5 * (2.0 * PI).powi(1 - n as i32);
    let outer = grid.half_width();
    let window = |x: &[f64]| -> f64 {
        match opts.support_radius {
            None => 1.0,
            Some(r) if r >= outer => 1.0,
            Some(r) => {
                let d = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                smooth_step((outer - d) / (outer - r))
            }
        }
    };
    let values: Vec<(f64, f64)> = (0..grid.node_count())
        .into_par_iter()
        .map(|node| {
            let x = grid.point(node);
            let win = window(&x);
            if win == 0.0 {
                return (0.0, 0.0);
            }
            let mut re = 0.0;
            let mut im = 0.0;
            for (k, (even, odd)) in filtered.iter().enumerate() {
                let s: f64 = x.iter().zip(dg.direction(k)).map(|(a, b)| a * b).sum();
                let q = offsets.index_of(s);
                let w = dg.weight(k);
                re += w * interp_uniform(even, q, Stencil::Cubic);
                im += w * interp_uniform(odd, q, Stencil::Cubic);
            }
            (win * pref * re, win * pref * im)
        })
        .collect();
    let re: Vec<f64> = values.iter().map(|v| v.0).collect();
    let re_norm = re.iter().map(|v| v * v).sum::<f64>().sqrt();
    let im_norm = values.iter().map(|v| v.1 * v.1).sum::<f64>().sqrt();
    let imag_residue = if re_norm == 0.0 {
        if im_norm == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        im_norm / re_norm
    };
    if imag_residue > opts.imag_tol {
        return Err(Error::InconsistentData {
            residue: imag_residue,
            limit: opts.imag_tol,
        });
    }
    Ok(RadonInversion {
        field: TensorField::from_data(*grid, 0, re)?,
        imag_residue,
    })
}

/// Signatures with normal power `i` that the dataset lacks.
fn missing(d: &GrtDataset, i: usize) -> Vec<DegreeSignature> {
    DegreeSignature::family(d.grid.n(), d.m, i)
        .into_iter()
        .filter(|l| !d.data.contains_key(l))
        .collect()
}

/// Componentwise Radon data of `δ^i d^i v_i`, one scalar sinogram per
/// compressed coefficient of order `m - i`:
/// `R̄(δ^i d^i v_i) = Σ_{ℓ'} ((m-i)!/ℓ'!) ∂_p^i R_{(ℓ', i)} f · b_{ℓ'}`,
/// with `b_{ℓ'}` the tangential frame tensors.
pub fn assemble_normal_data(d: &GrtDataset, i: usize) -> Result<Vec<Sinogram>> {
    if i > d.m {
        return Err(Error::InvalidParameter(format!(
            "component index {i} exceeds the order {}",
            d.m
        )));
    }
    let lost = missing(d, i);
    if !lost.is_empty() {
        return Err(Error::IncompleteDataset {
            missing: lost.into_iter().map(|l| l.0).collect(),
        });
    }
    let grid = d.grid.clone();
    let n = grid.n();
    let k = d.m - i;
    let dim = sym_dim(n, k);
    let h = grid.offsets().spacing;
    let plen = grid.offsets().count;
    let family = DegreeSignature::family(n, d.m, i);
    let derived: Vec<Sinogram> = family
        .iter()
        .map(|l| d.data[l].map_rows(|row| derivative_spectral(row, h, i)))
        .collect();
    let kfact = factorial(k);
    let rows: Vec<Result<Vec<Vec<f64>>>> = (0..grid.len())
        .into_par_iter()
        .map(|w| {
            let fr = grid.frame(w);
            let mut out = vec![vec![0.0; plen]; dim];
            for (l, sino) in family.iter().zip(&derived) {
                let mut tang = l.0.clone();
                *tang.last_mut().expect("non-empty signature") = 0;
                let tl = DegreeSignature(tang);
                let b = fr.tensor(&tl)?;
                let c = kfact / tl.factorial();
                let row = sino.row(w, 0);
                for (j, &bj) in b.coeffs().iter().enumerate() {
                    if bj == 0.0 {
                        continue;
                    }
                    for (o, v) in out[j].iter_mut().zip(row) {
                        *o += c * bj * v;
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    (0..dim)
        .map(|j| {
            let values: Vec<f64> = rows.iter().flat_map(|r| r[j].iter().copied()).collect();
            Sinogram::from_values(Degree::Scalar, grid.clone(), values)
        })
        .collect()
}

/// One recovered component and its diagnostics.
#[derive(Clone, Debug)]
pub struct ComponentRecovery {
    pub index: usize,
    pub field: TensorField,
    /// `d^i v_i`, computed on the padded grid before cropping.
    pub potential: TensorField,
    /// Largest imaginary residue over the per-coefficient inversions.
    pub imag_residue: f64,
    /// Range residual of the `δ^i d^i` solve.
    pub range_residual: f64,
}

/// Reconstructs `δ^i d^i v_i` coefficientwise.
pub fn recover_normal_field(d: &GrtDataset, i: usize, grid: &Grid, opts: &InversionOptions) -> Result<(TensorField, f64)> {
    let sinos = assemble_normal_data(d, i)?;
    let inv = sinos
        .iter()
        .map(|s| radon_invert(s, grid, opts))
        .collect::<Result<Vec<_>>>()?;
    let residue = inv.iter().map(|r| r.imag_residue).fold(0.0, f64::max);
    let comps: Vec<Vec<f64>> = inv.into_iter().map(|r| r.field.data().to_vec()).collect();
    Ok((TensorField::from_components(*grid, d.m - i, &comps)?, residue))
}

/// Recovers `v_i` of the decomposition from the family with normal power `i`.
///
/// `δ^i d^i v_i` is compactly supported, but `v_i` and, for `i < m`, the
/// solenoidal parts only decay like powers of `|x|`. The solve therefore runs
/// on the grid padded by `opts.pad`, and `d^i v_i` is formed there too before
/// both are cropped back. For `i = 0` the reconstruction already is `v_0`;
/// projecting the box-truncated field onto periodic solenoidal fields would
/// only add wrap-around error, so no solve is made and the range residual
/// is reported as zero.
pub fn recover_component(d: &GrtDataset, i: usize, grid: &Grid, opts: &InversionOptions) -> Result<ComponentRecovery> {
    if opts.pad == 0 {
        return Err(Error::InvalidParameter("padding factor must be at least 1".into()));
    }
    let (w, imag_residue) = recover_normal_field(d, i, grid, opts)?;
    if i == 0 {
        return Ok(ComponentRecovery {
            index: 0,
            potential: w.clone(),
            field: w,
            imag_residue,
            range_residual: 0.0,
        });
    }
    let sol = solve_delta_d_with(
        &w.zero_pad(opts.pad),
        i,
        &DeltaDOptions {
            solenoidal: i < d.m,
            range_tol: opts.range_tol,
        },
    )?;
    Ok(ComponentRecovery {
        index: i,
        field: sol.field.crop(grid)?,
        potential: apply_d_k(&sol.field, i)?.crop(grid)?,
        imag_residue,
        range_residual: sol.range_residual,
    })
}

/// Result of [`invert_full`].
#[derive(Clone, Debug)]
pub struct FullRecovery {
    pub field: TensorField,
    pub components: Vec<ComponentRecovery>,
}

/// Recovers every component and reassembles `f = Σ_i d^i v_i`.
pub fn invert_full(d: &GrtDataset, grid: &Grid, opts: &InversionOptions) -> Result<FullRecovery> {
    let all: Vec<DegreeSignature> = (0..=d.m).flat_map(|i| missing(d, i)).collect();
    if !all.is_empty() {
        return Err(Error::IncompleteDataset {
            missing: all.into_iter().map(|l| l.0).collect(),
        });
    }
    let components = (0..=d.m)
        .map(|i| recover_component(d, i, grid, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut field = TensorField::zeros(*grid, d.m);
    for c in &components {
        field = field.add(&c.potential)?;
    }
    Ok(FullRecovery { field, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::PhantomSpec;
    use crate::radon::{radon_scalar, OffsetGrid};

    #[test]
    fn scalar_round_trip_2d() {
        let g = Grid::new(2, 4.5, 64).unwrap();
        let f = PhantomSpec::gaussian(vec![0.4, -0.3], 0.9, 1.0).sample(&g).unwrap();
        let dg = Arc::new(DirectionGrid::circle(200, OffsetGrid::for_grid(&g), false).unwrap());
        let s = radon_scalar(&f, &dg, &QuadratureOptions::default()).unwrap();
        let inv = radon_invert(&s, &g, &InversionOptions::default()).unwrap();
        let err = inv.field.rel_l2_error(&f).unwrap();
        assert!(err < 1e-2, "{err}");
        assert!(inv.imag_residue < 1e-10);
    }

    #[test]
    fn odd_data_is_inconsistent() {
        let g = Grid::new(2, 4.0, 32).unwrap();
        let dg = Arc::new(DirectionGrid::circle(64, OffsetGrid::for_grid(&g), false).unwrap());
        let mut s = Sinogram::zeros(Degree::Scalar, dg.clone()).unwrap();
        let off = *dg.offsets();
        for k in 0..dg.len() {
            for (j, v) in s.row_mut(k, 0).iter_mut().enumerate() {
                let p = off.value(j);
                *v = p * (-p * p).exp();
            }
        }
        assert!(matches!(
            radon_invert(&s, &g, &InversionOptions::default()),
            Err(Error::InconsistentData { .. })
        ));
    }

    #[test]
    fn missing_signatures_are_reported() {
        let g = Grid::new(2, 4.0, 16).unwrap();
        let dg = Arc::new(DirectionGrid::circle(8, OffsetGrid::for_grid(&g), false).unwrap());
        let d = GrtDataset::new(1, dg);
        match recover_component(&d, 1, &g, &InversionOptions::default()) {
            Err(Error::IncompleteDataset { missing }) => assert_eq!(missing, vec![vec![0, 1]]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
