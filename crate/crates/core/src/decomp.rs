//! Spectral symmetrized gradients, divergences and the decomposition
//! `f = Σ_i d^i v_i` with solenoidal `v_i` for `i < m`.
//!
//! Every operator acts on the discrete Fourier samples through the
//! wavevector of [`crate::field::wavevector`], so `d` and `δ` are exact
//! adjoints of each other on the grid and the decomposition reproduces its
//! input to rounding.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{forward, inverse, on_nyquist_plane, wavevector, Grid, SpectralField, TensorField};
use crate::symtensor::{basis, compositions, frame, sym_dim, SymTensor};

/// Maps every frequency of a spectral field through `op(ξ, f̂(ξ))`.
fn spectral_map(
    fh: &SpectralField,
    out_order: usize,
    op: impl Fn(&[f64], SymTensor<Complex64>) -> Result<SymTensor<Complex64>> + Sync,
) -> Result<SpectralField> {
    let g = *fh.grid();
    let tensors = (0..g.node_count())
        .into_par_iter()
        .map(|k| op(&wavevector(&g, k), fh.tensor_at(k)))
        .collect::<Result<Vec<_>>>()?;
    SpectralField::from_tensors(g, out_order, tensors)
}

fn imag_unit_power(k: usize) -> Complex64 {
    Complex64::i().powu(k as u32)
}

/// `(d^k v)^ = (iξ)^{⊙k} ⊙ v̂`.
pub fn apply_d_spectral(vh: &SpectralField, k: usize) -> Result<SpectralField> {
    let m = vh.order();
    spectral_map(vh, m + k, |xi, mut t| {
        for _ in 0..k {
            t = t.mul_vector(xi)?;
        }
        Ok(t.map(|c| c * imag_unit_power(k)))
    })
}

/// `(δ^k v)^ = i^k v̂ ⌟ ξ ... ⌟ ξ`.
pub fn apply_delta_spectral(vh: &SpectralField, k: usize) -> Result<SpectralField> {
    let m = vh.order();
    if k > m {
        return Err(Error::Shape(format!("δ^{k} of an order-{m} field")));
    }
    spectral_map(vh, m - k, |xi, mut t| {
        for _ in 0..k {
            t = t.contract(xi)?;
        }
        Ok(t.map(|c| c * imag_unit_power(k)))
    })
}

/// Symmetrized gradient `d = σ∇`, raising the order by one.
pub fn apply_d(v: &TensorField) -> Result<TensorField> {
    apply_d_k(v, 1)
}

/// `d^k`.
pub fn apply_d_k(v: &TensorField, k: usize) -> Result<TensorField> {
    if k == 0 {
        return Ok(v.clone());
    }
    Ok(inverse(&apply_d_spectral(&forward(v), k)?))
}

/// Divergence `δ`, lowering the order by one.
pub fn apply_delta(v: &TensorField) -> Result<TensorField> {
    apply_delta_k(v, 1)
}

/// `δ^k`.
pub fn apply_delta_k(v: &TensorField, k: usize) -> Result<TensorField> {
    if k == 0 {
        return Ok(v.clone());
    }
    Ok(inverse(&apply_delta_spectral(&forward(v), k)?))
}

/// `Σ_i d^i v_i` for components ordered by `i`.
pub fn compose(components: &[TensorField]) -> Result<TensorField> {
    let first = components
        .first()
        .ok_or_else(|| Error::Shape("no components".into()))?;
    let m = first.order();
    let grid = *first.grid();
    let mut acc = SpectralField::zeros(grid, m);
    for (i, v) in components.iter().enumerate() {
        if v.order() + i != m || *v.grid() != grid {
            return Err(Error::Shape(format!(
                "component {i} has order {}, expected {}",
                v.order(),
                m.saturating_sub(i)
            )));
        }
        let term = apply_d_spectral(&forward(v), i)?;
        for (a, b) in acc.data_mut().iter_mut().zip(term.data()) {
            *a += b;
        }
    }
    Ok(inverse(&acc))
}

/// Result of [`decompose`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `v_0, ..., v_m`, with `v_i` of order `m - i`.
    pub components: Vec<TensorField>,
    /// `‖f - Σ d^i v_i‖ / ‖f‖`, recomputed from the returned fields.
    pub residual: f64,
    /// `‖δ v_i‖ / ‖v_i‖` for `i < m`, recomputed from the returned fields.
    pub certificates: Vec<f64>,
}

/// Tangential basis `η^α` of `S^k(ω^⊥)` from the frame tangents.
fn tangential_basis(tangents: &[Vec<f64>], n: usize, k: usize) -> Result<Vec<SymTensor>> {
    compositions(n - 1, k)
        .into_iter()
        .map(|alpha| {
            let mut acc = SymTensor::scalar(n, 1.0);
            for (t, &a) in tangents.iter().zip(&alpha) {
                if a > 0 {
                    acc = acc.sym_product(&SymTensor::vector_power(t, a))?;
                }
            }
            Ok(acc)
        })
        .collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Splits `f` into `Σ_i d^i v_i` with `δ v_i = 0` for `i < m`.
///
/// At each non-zero frequency the equation `f̂ = Σ_i i^i |ξ|^i ξ̂^{⊙i} ⊙ v̂_i`
/// with tangential `v̂_i` is a square real system in a basis adapted to
/// `ξ̂`. The zero frequency goes entirely to `v_0`.
pub fn decompose(f: &TensorField) -> Result<Decomposition> {
    let g = *f.grid();
    let n = g.n();
    let m = f.order();
    let fh = forward(f);
    let dim = sym_dim(n, m);
    let parts: Vec<Vec<Vec<Complex64>>> = (0..g.node_count())
        .into_par_iter()
        .map(|k| -> Result<Vec<Vec<Complex64>>> {
            let xi = wavevector(&g, k);
            let r = norm2(&xi);
            let mut out: Vec<Vec<Complex64>> = (0..=m)
                .map(|i| vec![Complex64::new(0.0, 0.0); sym_dim(n, m - i)])
                .collect();
            if r == 0.0 {
                out[0].copy_from_slice(fh.at(k));
                return Ok(out);
            }
            let dir: Vec<f64> = xi.iter().map(|x| x / r).collect();
            let fr = frame(&dir)?;
            let mut cols: Vec<SymTensor> = Vec::with_capacity(dim);
            let mut bases: Vec<Vec<SymTensor>> = Vec::with_capacity(m + 1);
            for i in 0..=m {
                let tb = tangential_basis(&fr.tangents, n, m - i)?;
                let pw = SymTensor::vector_power(&dir, i);
                for b in &tb {
                    cols.push(pw.sym_product(b)?);
                }
                bases.push(tb);
            }
            let mat = DMatrix::from_fn(dim, dim, |row, col| cols[col].coeffs()[row]);
            let lu = mat.lu();
            let rhs = fh.at(k);
            let re = DVector::from_iterator(dim, rhs.iter().map(|z| z.re));
            let im = DVector::from_iterator(dim, rhs.iter().map(|z| z.im));
            let (zr, zi) = match (lu.solve(&re), lu.solve(&im)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Singular { xi }),
            };
            let mut col = 0;
            for i in 0..=m {
                let scale = (imag_unit_power(i) * r.powi(i as i32)).inv();
                for b in &bases[i] {
                    let z = Complex64::new(zr[col], zi[col]) * scale;
                    for (o, c) in out[i].iter_mut().zip(b.coeffs()) {
                        *o += z * *c;
                    }
                    col += 1;
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let components: Vec<TensorField> = (0..=m)
        .map(|i| {
            let mut sf = SpectralField::zeros(g, m - i);
            for (k, p) in parts.iter().enumerate() {
                sf.at_mut(k).copy_from_slice(&p[i]);
            }
            inverse(&sf)
        })
        .collect();

    let recomposed = compose(&components)?;
    let base = f.l2_norm();
    let diff = recomposed.sub(f)?.l2_norm();
    let residual = if base == 0.0 { diff } else { diff / base };
    let certificates = components[..m]
        .iter()
        .map(|v| {
            let nv = v.l2_norm();
            let dv = apply_delta(v)?.l2_norm();
            Ok(if nv == 0.0 { dv } else { dv / nv })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition {
        components,
        residual,
        certificates,
    })
}

/// `δ^i d^i w`.
pub fn delta_d_apply(w: &TensorField, i: usize) -> Result<TensorField> {
    let wh = forward(w);
    let up = apply_d_spectral(&wh, i)?;
    Ok(inverse(&apply_delta_spectral(&up, i)?))
}

/// The real matrix of `ŵ ↦ (δ^i d^i w)^(ξ)` on compressed coefficients,
/// `(-1)^i C_ξ^i S_ξ^i`.
pub fn delta_d_symbol(xi: &[f64], k: usize, i: usize) -> Result<DMatrix<f64>> {
    let n = xi.len();
    let dim = sym_dim(n, k);
    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
    let mut mat = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = SymTensor::<f64>::zeros(n, k);
        e.coeffs_mut()[col] = 1.0;
        for _ in 0..i {
            e = e.mul_vector(xi)?;
        }
        for _ in 0..i {
            e = e.contract(xi)?;
        }
        for (row, v) in e.coeffs().iter().enumerate() {
            mat[(row, col)] = sign * v;
        }
    }
    Ok(mat)
}

/// Options for [`solve_delta_d_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaDOptions {
    /// Restrict the solution to solenoidal fields.
    pub solenoidal: bool,
    /// Fail with [`Error::NotInRange`] when the range residual exceeds this.
    pub range_tol: Option<f64>,
}

/// Result of [`solve_delta_d_with`].
#[derive(Clone, Debug)]
pub struct DeltaDSolution {
    pub field: TensorField,
    /// `max_ξ ‖A v̂ - ŵ‖ / max_ξ ‖ŵ‖` in the contraction norm.
    pub range_residual: f64,
    /// Frequency attaining the largest residual.
    pub worst_frequency: Vec<f64>,
}

/// Default tolerance of [`solve_delta_d`].
pub const RANGE_TOLERANCE: f64 = 1e-6;

/// Solves `δ^i d^i v = w`, optionally with `v` solenoidal, failing when `w`
/// is not in the range to [`RANGE_TOLERANCE`].
pub fn solve_delta_d(w: &TensorField, i: usize, solenoidal: bool) -> Result<TensorField> {
    Ok(solve_delta_d_with(
        w,
        i,
        &DeltaDOptions {
            solenoidal,
            range_tol: Some(RANGE_TOLERANCE),
        },
    )?
    .field)
}

/// Least-squares solve of `δ^i d^i v = w` frequency by frequency.
///
/// Without the solenoidal constraint the symbol is positive definite away
/// from `ξ = 0`. With it, `v̂(ξ)` ranges over tensors orthogonal to `ξ` and
/// the system is overdetermined, solved in the contraction metric.
///
/// For `i >= 1` frequencies on a Nyquist plane are set to zero: the discrete
/// symbol there misses a component of `ξ`, and dividing by it would amplify
/// unresolved content by up to `|ξ|^{2i}`.
pub fn solve_delta_d_with(w: &TensorField, i: usize, opts: &DeltaDOptions) -> Result<DeltaDSolution> {
    let g: Grid = *w.grid();
    let n = g.n();
    let k = w.order();
    let wh = forward(w);
    let dim = sym_dim(n, k);
    let sqrt_mult: Vec<f64> = basis(n, k).multiplicities().iter().map(|m| m.sqrt()).collect();
    let solved: Vec<(Vec<Complex64>, f64, f64)> = (0..g.node_count())
        .into_par_iter()
        .map(|q| -> Result<(Vec<Complex64>, f64, f64)> {
            let xi = wavevector(&g, q);
            let rhs = wh.at(q);
            let wnorm = SymTensor::from_coeffs(n, k, rhs.to_vec())?.norm();
            let r = norm2(&xi);
            if i > 0 && on_nyquist_plane(&g, q) {
                return Ok((vec![Complex64::new(0.0, 0.0); dim], 0.0, wnorm));
            }
            if r == 0.0 {
                return Ok(if i == 0 {
                    (rhs.to_vec(), 0.0, wnorm)
                } else {
                    (vec![Complex64::new(0.0, 0.0); dim], wnorm, wnorm)
                });
            }
            let a = delta_d_symbol(&xi, k, i)?;
            let basis_mat = if opts.solenoidal {
                let dir: Vec<f64> = xi.iter().map(|x| x / r).collect();
                let tb = tangential_basis(&frame(&dir)?.tangents, n, k)?;
                DMatrix::from_fn(dim, tb.len(), |row, col| tb[col].coeffs()[row])
            } else {
                DMatrix::identity(dim, dim)
            };
            let weight = DMatrix::from_diagonal(&DVector::from_vec(sqrt_mult.clone()));
            let sys = &weight * &a * &basis_mat;
            let re = DVector::from_iterator(dim, rhs.iter().zip(&sqrt_mult).map(|(z, s)| z.re * s));
            let im = DVector::from_iterator(dim, rhs.iter().zip(&sqrt_mult).map(|(z, s)| z.im * s));
            let svd = sys.clone().svd(true, true);
            let eps = 1e-12 * svd.singular_values.max();
            let (zr, zi) = match (svd.solve(&re, eps), svd.solve(&im, eps)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return Err(Error::Singular { xi }),
            };
            let vr = &basis_mat * &zr;
            let vi = &basis_mat * &zi;
            let rr = &sys * &zr - &re;
            let ri = &sys * &zi - &im;
            let res = (rr.norm_squared() + ri.norm_squared()).sqrt();
            let v = vr
                .iter()
                .zip(vi.iter())
                .map(|(a, b)| Complex64::new(*a, *b))
                .collect();
            Ok((v, res, wnorm))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sf = SpectralField::zeros(g, k);
    let mut worst = (0.0f64, 0usize);
    let mut wmax = 0.0f64;
    for (q, (v, res, wn)) in solved.iter().enumerate() {
        sf.at_mut(q).copy_from_slice(v);
        if *res > worst.0 {
            worst = (*res, q);
        }
        wmax = wmax.max(*wn);
    }
    let range_residual = if wmax == 0.0 { 0.0 } else { worst.0 / wmax };
    let worst_frequency = g.frequency_point(worst.1);
    if let Some(tol) = opts.range_tol {
        if range_residual > tol {
            return Err(Error::NotInRange {
                order: i,
                residual: range_residual,
                xi: worst_frequency,
            });
        }
    }
    Ok(DeltaDSolution {
        field: inverse(&sf),
        range_residual,
        worst_frequency,
    })
}

/// Orthogonal projection onto solenoidal fields, `(I - ξ̂ξ̂ᵀ)^{⊗m}` per
/// frequency; the zero frequency is kept.
pub fn solenoidal_projection(v: &TensorField) -> Result<TensorField> {
    let g = *v.grid();
    let n = g.n();
    let m = v.order();
    let b = basis(n, m);
    let vh = forward(v);
    let out = spectral_map(&vh, m, |xi, t| {
        let r = norm2(xi);
        if r == 0.0 || m == 0 {
            return Ok(t);
        }
        let dir: Vec<f64> = xi.iter().map(|x| x / r).collect();
        let proj = |a: usize, c: usize| f64::from(u8::from(a == c)) - dir[a] * dir[c];
        let coeffs = b
            .indices()
            .iter()
            .map(|idx| {
                // Sum over all arrangements J of the compressed coefficients.
                let mut acc = Complex64::new(0.0, 0.0);
                for (src, jdx) in b.indices().iter().enumerate() {
                    let w = sum_over_arrangements(idx, jdx, &proj);
                    acc += t.coeffs()[src] * w;
                }
                acc
            })
            .collect();
        SymTensor::from_coeffs(n, m, coeffs)
    })?;
    Ok(inverse(&out))
}

/// `Σ_{J' ~ J} Π_q P[I_q, J'_q]` over the distinct arrangements of `J`.
fn sum_over_arrangements(idx: &[usize], jdx: &[usize], proj: &impl Fn(usize, usize) -> f64) -> f64 {
    fn rec(
        idx: &[usize],
        remaining: &mut Vec<usize>,
        pos: usize,
        acc: f64,
        proj: &impl Fn(usize, usize) -> f64,
    ) -> f64 {
        if pos == idx.len() {
            return acc;
        }
        let mut total = 0.0;
        let mut seen: Vec<usize> = Vec::new();
        for q in 0..remaining.len() {
            let c = remaining[q];
            if seen.contains(&c) {
                continue;
            }
            seen.push(c);
            remaining.remove(q);
            total += rec(idx, remaining, pos + 1, acc * proj(idx[pos], c), proj);
            remaining.insert(q, c);
        }
        total
    }
    let mut rem = jdx.to_vec();
    rec(idx, &mut rem, 0, 1.0, proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{PhantomSpec, RandomPhantom};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field(m: usize, seed: u64) -> TensorField {
        let g = Grid::new(2, 5.0, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PhantomSpec::random(2, m, &RandomPhantom::default(), &mut rng)
            .sample(&g)
            .unwrap()
    }

    #[test]
    fn spectral_gradient_matches_analytic() {
        let g = Grid::new(2, 5.0, 48).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ph = PhantomSpec::random(2, 1, &RandomPhantom::default(), &mut rng);
        let d = apply_d(&ph.sample(&g).unwrap()).unwrap();
        let exact = ph.sym_gradient().sample(&g).unwrap();
        assert!(d.rel_l2_error(&exact).unwrap() < 1e-8);
        let div = apply_delta(&ph.sample(&g).unwrap()).unwrap();
        let exact = ph.divergence().unwrap().sample(&g).unwrap();
        assert!(div.rel_l2_error(&exact).unwrap() < 1e-8);
    }

    #[test]
    fn decomposition_reproduces_input() {
        for m in 0..=3 {
            let f = field(m, 10 + m as u64);
            let dec = decompose(&f).unwrap();
            assert_eq!(dec.components.len(), m + 1);
            assert!(dec.residual < 1e-12, "m = {m}: {}", dec.residual);
            for c in &dec.certificates {
                assert!(*c < 1e-12, "m = {m}: {c}");
            }
        }
    }

    #[test]
    fn delta_d_round_trip() {
        let w = field(1, 4);
        for i in 0..=2 {
            let rhs = delta_d_apply(&w, i).unwrap();
            let sol = solve_delta_d_with(&rhs, i, &DeltaDOptions { solenoidal: false, range_tol: None }).unwrap();
            let back = delta_d_apply(&sol.field, i).unwrap();
            // Nyquist-plane modes are dropped for i ≥ 1; the phantom carries ~1e-10 there.
            let err = back.rel_l2_error(&rhs).unwrap();
            assert!(err < 1e-9, "i = {i}: {err}");
        }
    }

    #[test]
    fn projection_is_solenoidal() {
        let v = solenoidal_projection(&field(2, 8)).unwrap();
        let d = apply_delta(&v).unwrap();
        assert!(d.l2_norm() < 1e-12 * v.l2_norm());
        let again = solenoidal_projection(&v).unwrap();
        assert!(again.rel_l2_error(&v).unwrap() < 1e-12);
    }

    #[test]
    fn non_range_data_is_rejected() {
        // A gradient field is never δd of a solenoidal vector field.
        let g = Grid::new(2, 5.0, 32).unwrap();
        let phi = PhantomSpec::gaussian(vec![0.0, 0.0], 1.0, 1.0).sample(&g).unwrap();
        let w = apply_d(&phi).unwrap();
        assert!(matches!(
            solve_delta_d(&w, 1, true),
            Err(Error::NotInRange { .. })
        ));
    }
}
