//! Analytic polynomial-times-Gaussian phantoms.
//!
//! Each term is `p_I(x - c) exp(-|x - c|² / w²)` per compressed coefficient
//! `I`, with `p_I` a polynomial in the shifted variable. The family is closed
//! under differentiation and has closed-form Fourier transforms, which makes
//! it a convenient source of exact reference values.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::field::{Grid, TensorField};
use crate::symtensor::{basis, sym_dim};

/// `coeff · Π_a y_a^{powers_a}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

/// One Gaussian envelope carrying a polynomial per tensor coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomTerm {
    pub center: Vec<f64>,
    pub width: f64,
    /// One polynomial per compressed coefficient, in basis order.
    pub components: Vec<Vec<Monomial>>,
}

/// A symmetric `m`-tensor phantom on `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub n: usize,
    pub m: usize,
    pub terms: Vec<PhantomTerm>,
}

/// Largest Gaussian mass allowed outside the cube.
pub const MASS_TOLERANCE: f64 = 1e-8;

fn eval_poly(poly: &[Monomial], y: &[f64]) -> f64 {
    poly.iter()
        .map(|mono| {
            mono.powers
                .iter()
                .zip(y)
                .fold(mono.coeff, |acc, (&p, &v)| acc * v.powi(p as i32))
        })
        .sum()
}

/// Derivative of `poly(y) exp(-|y|²/w²)` along `axis`, as a polynomial factor.
fn diff_poly(poly: &[Monomial], axis: usize, width: f64) -> Vec<Monomial> {
    let mut out = Vec::new();
    for mono in poly {
        let p = mono.powers[axis];
        if p > 0 {
            let mut powers = mono.powers.clone();
            powers[axis] -= 1;
            out.push(Monomial {
                coeff: mono.coeff * p as f64,
                powers,
            });
        }
        let mut powers = mono.powers.clone();
        powers[axis] += 1;
        out.push(Monomial {
            coeff: -2.0 * mono.coeff / (width * width),
            powers,
        });
    }
    out
}

/// `(2π)^{-1/2} ∫ y^k exp(-y²/w²) e^{-i s y} dy`.
fn gauss_moment_ft(k: u32, width: f64, s: f64) -> Complex64 {
    // (i d/ds)^k applied to (w/√2) exp(-w² s²/4) = i^k P_k(s) (w/√2) exp(..),
    // with P_0 = 1 and P_{k+1} = P_k' - (w² s / 2) P_k.
    let mut poly = vec![1.0f64];
    for _ in 0..k {
        let mut next = vec![0.0; poly.len() + 1];
        for (d, &c) in poly.iter().enumerate().skip(1) {
            next[d - 1] += d as f64 * c;
        }
        for (d, &c) in poly.iter().enumerate() {
            next[d + 1] -= 0.5 * width * width * c;
        }
        poly = next;
    }
    let pk = poly.iter().rev().fold(0.0, |acc, &c| acc * s + c);
    let env = width / 2f64.sqrt() * (-0.25 * width * width * s * s).exp();
    Complex64::i().powu(k) * (pk * env)
}

impl PhantomTerm {
    fn shifted(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.center).map(|(a, c)| a - c).collect()
    }

    fn envelope(&self, y: &[f64]) -> f64 {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        (-r2 / (self.width * self.width)).exp()
    }

    /// Gaussian mass fraction lying outside `[-L, L]^n`.
    pub fn mass_loss(&self, half_width: f64) -> f64 {
        let inside: f64 = self
            .center
            .iter()
            .map(|&c| {
                let out = 0.5
                    * (erfc((half_width - c) / self.width) + erfc((half_width + c) / self.width));
                1.0 - out
            })
            .product();
        1.0 - inside
    }
}

impl PhantomSpec {
    /// A scalar Gaussian bump.
    pub fn gaussian(center: Vec<f64>, width: f64, amplitude: f64) -> Self {
        let n = center.len();
        PhantomSpec {
            n,
            m: 0,
            terms: vec![PhantomTerm {
                center,
                width,
                components: vec![vec![Monomial {
                    coeff: amplitude,
                    powers: vec![0; n],
                }]],
            }],
        }
    }

    pub fn dim(&self) -> usize {
        sym_dim(self.n, self.m)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        for t in &self.terms {
            if t.center.len() != self.n {
                return Err(Error::Shape("phantom center has the wrong dimension".into()));
            }
            if !(t.width > 0.0) {
                return Err(Error::InvalidParameter("phantom width must be positive".into()));
            }
            if t.components.len() != d {
                return Err(Error::Shape(format!(
                    "phantom term lists {} components, order {} on R^{} needs {d}",
                    t.components.len(),
                    self.m,
                    self.n
                )));
            }
            if t
                .components
                .iter()
                .flatten()
                .any(|mono| mono.powers.len() != self.n)
            {
                return Err(Error::Shape("monomial powers have the wrong dimension".into()));
            }
        }
        Ok(())
    }

    /// Coefficients at a point.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for t in &self.terms {
            let y = t.shifted(x);
            let e = t.envelope(&y);
            if e == 0.0 {
                continue;
            }
            for (o, poly) in out.iter_mut().zip(&t.components) {
                *o += e * eval_poly(poly, &y);
            }
        }
        out
    }

    /// Continuous Fourier transform coefficients at `ξ`.
    pub fn fourier(&self, xi: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for t in &self.terms {
            let phase: f64 = xi.iter().zip(&t.center).map(|(a, c)| a * c).sum();
            let shift = Complex64::from_polar(1.0, -phase);
            for (o, poly) in out.iter_mut().zip(&t.components) {
                for mono in poly {
                    let mut v = shift * mono.coeff;
                    for (&p, &s) in mono.powers.iter().zip(xi) {
                        v *= gauss_moment_ft(p, t.width, s);
                    }
                    *o += v;
                }
            }
        }
        out
    }

    /// Largest Gaussian mass fraction outside the cube of half width `L`.
    pub fn mass_loss(&self, half_width: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.mass_loss(half_width))
            .fold(0.0, f64::max)
    }

    /// Samples on a grid after checking the phantom fits in the cube.
    pub fn sample(&self, grid: &Grid) -> Result<TensorField> {
        self.validate()?;
        if grid.n() != self.n {
            return Err(Error::Shape("phantom and grid dimensions differ".into()));
        }
        let lost = self.mass_loss(grid.half_width());
        if lost > MASS_TOLERANCE {
            return Err(Error::PhantomSupport {
                lost,
                limit: MASS_TOLERANCE,
            });
        }
        TensorField::from_fn(*grid, self.m, |x| self.evaluate(x))
    }

    /// Partial derivative of every coefficient along `axis`.
    pub fn partial(&self, axis: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PhantomTerm {
                center: t.center.clone(),
                width: t.width,
                components: t
                    .components
                    .iter()
                    .map(|p| diff_poly(p, axis, t.width))
                    .collect(),
            })
            .collect();
        PhantomSpec {
            n: self.n,
            m: self.m,
            terms,
        }
    }

    /// Symmetrized gradient `d = σ∇`, order `m` to `m + 1`.
    pub fn sym_gradient(&self) -> Self {
        let lo = basis(self.n, self.m);
        let hi = basis(self.n, self.m + 1);
        let parts: Vec<PhantomSpec> = (0..self.n).map(|a| self.partial(a)).collect();
        let scale = 1.0 / (self.m + 1) as f64;
        let terms = (0..self.terms.len())
            .map(|t| {
                let components = hi
                    .indices()
                    .iter()
                    .map(|idx| {
                        let mut poly = Vec::new();
                        for q in 0..idx.len() {
                            let mut rest = idx.clone();
                            let a = rest.remove(q);
                            let src = lo.position(&rest).expect("sub-index in basis");
                            poly.extend(parts[a].terms[t].components[src].iter().map(|mono| {
                                Monomial {
                                    coeff: mono.coeff * scale,
                                    powers: mono.powers.clone(),
                                }
                            }));
                        }
                        poly
                    })
                    .collect();
                PhantomTerm {
                    center: self.terms[t].center.clone(),
                    width: self.terms[t].width,
                    components,
                }
            })
            .collect();
        PhantomSpec {
            n: self.n,
            m: self.m + 1,
            terms,
        }
    }

    /// Divergence `δ`, order `m` to `m - 1`, contracting the last index.
    pub fn divergence(&self) -> Result<Self> {
        if self.m == 0 {
            return Err(Error::Shape("divergence of a scalar".into()));
        }
        let lo = basis(self.n, self.m - 1);
        let hi = basis(self.n, self.m);
        let parts: Vec<PhantomSpec> = (0..self.n).map(|a| self.partial(a)).collect();
        let terms = (0..self.terms.len())
            .map(|t| {
                let components = lo
                    .indices()
                    .iter()
                    .map(|idx| {
                        let mut poly = Vec::new();
                        for (a, part) in parts.iter().enumerate() {
                            let mut up = idx.clone();
                            up.push(a);
                            let src = hi.position(&up).expect("super-index in basis");
                            poly.extend(part.terms[t].components[src].iter().cloned());
                        }
                        poly
                    })
                    .collect();
                PhantomTerm {
                    center: self.terms[t].center.clone(),
                    width: self.terms[t].width,
                    components,
                }
            })
            .collect();
        Ok(PhantomSpec {
            n: self.n,
            m: self.m - 1,
            terms,
        })
    }

    /// Sum of two phantoms of the same shape.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::Shape("phantoms of different order".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(PhantomSpec {
            n: self.n,
            m: self.m,
            terms,
        })
    }

    /// A random phantom: a few Gaussians with affine polynomial coefficients.
    pub fn random<R: Rng>(n: usize, m: usize, opts: &RandomPhantom, rng: &mut R) -> Self {
        let d = sym_dim(n, m);
        let count = rng.random_range(opts.min_terms..=opts.max_terms);
        let terms = (0..count)
            .map(|_| {
                let center = random_in_ball(n, opts.center_radius, rng);
                let width = rng.random_range(opts.min_width..=opts.max_width);
                let components = (0..d)
                    .map(|_| {
                        let mut poly = vec![Monomial {
                            coeff: rng.random_range(-1.0..1.0),
                            powers: vec![0; n],
                        }];
                        for a in 0..n {
                            let mut powers = vec![0; n];
                            powers[a] = 1;
                            poly.push(Monomial {
                                coeff: opts.linear_scale * rng.random_range(-1.0..1.0),
                                powers,
                            });
                        }
                        poly
                    })
                    .collect();
                PhantomTerm {
                    center,
                    width,
                    components,
                }
            })
            .collect();
        PhantomSpec { n, m, terms }
    }
}

fn random_in_ball<R: Rng>(n: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..=radius)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
            return v;
        }
    }
}

/// Parameters for [`PhantomSpec::random`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPhantom {
    pub min_terms: usize,
    pub max_terms: usize,
    pub min_width: f64,
    pub max_width: f64,
    pub center_radius: f64,
    pub linear_scale: f64,
}

impl Default for RandomPhantom {
    fn default() -> Self {
        RandomPhantom {
            min_terms: 1,
            max_terms: 2,
            min_width: 0.8,
            max_width: 1.0,
            center_radius: 0.5,
            linear_scale: 0.5,
        }
    }
}

/// Closed-form Radon transform of `exp(-|x - c|²/w²)` on `R^n`.
pub fn gaussian_radon(center: &[f64], width: f64, omega: &[f64], p: f64) -> f64 {
    let n = center.len();
    let q = p - omega.iter().zip(center).map(|(a, b)| a * b).sum::<f64>();
    (width * PI.sqrt()).powi(n as i32 - 1) * (-q * q / (width * width)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::forward;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_phantom() -> PhantomSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        PhantomSpec::random(2, 1, &RandomPhantom::default(), &mut rng)
    }

    #[test]
    fn fourier_matches_dft() {
        let ph = sample_phantom();
        let g = Grid::new(2, 6.0, 64).unwrap();
        let fh = forward(&ph.sample(&g).unwrap());
        let mut worst = 0.0f64;
        for k in (0..g.node_count()).step_by(37) {
            let exact = ph.fourier(&g.frequency_point(k));
            for (a, b) in fh.at(k).iter().zip(&exact) {
                worst = worst.max((a - b).norm());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn partial_matches_finite_difference() {
        let ph = sample_phantom();
        let d = ph.partial(1);
        let x = [0.3, -0.4];
        let h = 1e-5;
        let up = ph.evaluate(&[x[0], x[1] + h]);
        let dn = ph.evaluate(&[x[0], x[1] - h]);
        for (c, v) in d.evaluate(&x).iter().enumerate() {
            let fd = (up[c] - dn[c]) / (2.0 * h);
            assert!((v - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn mass_check() {
        let ph = PhantomSpec::gaussian(vec![0.0, 0.0], 1.0, 1.0);
        assert!(ph.sample(&Grid::new(2, 2.0, 16).unwrap()).is_err());
        assert!(ph.sample(&Grid::new(2, 4.5, 16).unwrap()).is_ok());
        let loss = ph.mass_loss(2.0);
        let expect = 1.0 - (1.0 - erfc(2.0)).powi(2);
        assert!((loss - expect).abs() < 1e-15);
    }

    #[test]
    fn gradient_of_scalar_is_gradient() {
        let ph = PhantomSpec::gaussian(vec![0.1, 0.2], 0.9, 2.0);
        let g = ph.sym_gradient();
        let x = [0.5, -0.1];
        let v = g.evaluate(&x);
        assert!((v[0] - ph.partial(0).evaluate(&x)[0]).abs() < 1e-15);
        assert!((v[1] - ph.partial(1).evaluate(&x)[0]).abs() < 1e-15);
    }
}
