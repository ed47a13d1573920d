use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensor_radon::analysis::range_check;
use tensor_radon::decomp::{decompose, delta_d_symbol};
use tensor_radon::field::{forward, wavevector, Grid};
use tensor_radon::invert::{invert_full, GrtDataset, InversionOptions};
use tensor_radon::phantom::{PhantomSpec, RandomPhantom};
use tensor_radon::radon::{grt_many, Degree, DirectionGrid, OffsetGrid, QuadratureOptions};
use tensor_radon::symtensor::{basis, frame, sym_dim, DegreeSignature, DenseTensor, SymTensor};

fn random_phantom(n: usize, m: usize, seed: u64) -> PhantomSpec {
    PhantomSpec::random(n, m, &RandomPhantom::default(), &mut ChaCha8Rng::seed_from_u64(seed))
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (len > 1e-3).then(|| v.iter().map(|x| x / len).collect())
}

proptest! {
    #[test]
    fn symmetrize_is_idempotent(n in 1usize..4, m in 0usize..5, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<f64> = (0..n.pow(m as u32)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d = DenseTensor::from_fn(n, m, |idx| vals[idx.iter().fold(0, |acc, &i| acc * n + i)]);
        let once = d.symmetrize();
        let twice = once.to_dense().symmetrize();
        for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn frame_tensors_form_a_basis(v in prop::collection::vec(-1.0f64..1.0, 2..4), m in 0usize..4) {
        let Some(w) = unit(&v) else { return Ok(()) };
        let n = w.len();
        let f = frame(&w).unwrap();
        let sigs = DegreeSignature::all(n, m);
        let dim = sym_dim(n, m);
        prop_assert_eq!(sigs.len(), dim);
        let cols: Vec<DVector<f64>> = sigs
            .iter()
            .map(|l| DVector::from_vec(f.tensor(l).unwrap().into_coeffs()))
            .collect();
        let mat = DMatrix::from_columns(&cols);
        prop_assert_eq!(mat.rank(1e-8), dim);
    }

    #[test]
    fn pairing_is_bilinear_and_symmetric(n in 1usize..4, m in 0usize..4, seed: u64, s in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let c = (0..sym_dim(n, m)).map(|_| rng.random_range(-1.0..1.0)).collect();
            SymTensor::from_coeffs(n, m, c).unwrap()
        };
        let (a, b, c) = (draw(), draw(), draw());
        let ab = a.pair(&b).unwrap();
        prop_assert!((ab - b.pair(&a).unwrap()).abs() <= 1e-12);
        let lhs = a.add(&c.scale(s)).unwrap().pair(&b).unwrap();
        prop_assert!((lhs - ab - s * c.pair(&b).unwrap()).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    /// `(-1)^i` times the symbol of `δ^i d^i` is positive semidefinite for the
    /// full contraction, whose Gram matrix on compressed coefficients is the
    /// diagonal of multiplicities.
    #[test]
    fn normal_operator_symbol_is_semidefinite(
        n in 2usize..4, k in 0usize..3, i in 0usize..3, xi in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let xi = &xi[..n];
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let a = delta_d_symbol(xi, k, i).unwrap() * sign;
        let w: Vec<f64> = basis(n, k).multiplicities().iter().map(|x| x.sqrt()).collect();
        let sym = DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| w[r] * a[(r, c)] / w[c]);
        prop_assert!((&sym - sym.transpose()).amax() <= 1e-10 * (1.0 + sym.amax()));
        let scale = sym.amax();
        let eig = sym.symmetric_eigen();
        prop_assert!(eig.eigenvalues.min() >= -1e-12 * (1.0 + scale), "{}", eig.eigenvalues);
    }
}

#[test]
fn spectra_of_real_fields_are_hermitian() {
    for (n, m, seed) in [(2, 0, 1), (2, 2, 2), (3, 1, 3)] {
        let g = Grid::new(n, 5.0, if n == 2 { 32 } else { 16 }).unwrap();
        let f = random_phantom(n, m, seed).sample(&g).unwrap();
        let fh = forward(&f);
        let dim = fh.dim();
        let mut defect = 0.0f64;
        for k in 0..g.node_count() {
            let xi = wavevector(&g, k);
            if xi.iter().any(|&x| x.abs() >= g.nyquist() - 1e-12) {
                continue;
            }
            // Reflect the multi-index through the centre of the grid.
            let idx = g.unravel(k);
            let mirror: Vec<usize> = idx.iter().map(|&q| (g.samples() - q) % g.samples()).collect();
            let kk = g.ravel(&mirror);
            for c in 0..dim {
                defect = defect.max((fh.at(k)[c] - fh.at(kk)[c].conj()).norm());
            }
        }
        let scale = fh.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(defect <= 1e-10 * scale, "n={n} m={m}: {defect}");
    }
}

#[test]
fn forward_data_satisfy_the_range_conditions() {
    for (m, seed) in [(0, 10), (1, 11), (2, 12), (1, 13)] {
        let g = Grid::new(2, 5.0, 48).unwrap();
        let f = random_phantom(2, m, seed).sample(&g).unwrap();
        let dg = Arc::new(DirectionGrid::circle(64, OffsetGrid::for_grid(&g), true).unwrap());
        let sinos = grt_many(&f, &Degree::all_pairs(m), &dg, &QuadratureOptions::default()).unwrap();
        for s in &sinos {
            let rep = range_check(s, 4, 1e-3).unwrap();
            assert!(rep.passed, "m={m} {:?}: parity {} residual {}", s.degree, rep.parity_defect, rep.max_residual);
        }
    }
}

/// Largest `‖v_i‖ / ‖f‖` seen over the corpus below is 1.0; the bound
/// catches regressions in the decomposition rather than proving anything.
const NORM_ESTIMATE: f64 = 2.0;

#[test]
fn components_are_bounded_by_the_field() {
    let mut worst = 0.0f64;
    for seed in 0..12u64 {
        let m = (seed % 3) as usize;
        let g = Grid::new(2, 5.0, 32).unwrap();
        let f = random_phantom(2, m, 100 + seed).sample(&g).unwrap();
        let dec = decompose(&f).unwrap();
        for v in &dec.components {
            worst = worst.max(v.l2_norm() / f.l2_norm());
        }
    }
    println!("largest component ratio {worst:.3}");
    assert!(worst <= NORM_ESTIMATE, "{worst}");
}

#[test]
fn reconstruction_is_a_projection() {
    let g = Grid::new(2, 5.0, 64).unwrap();
    let dg = Arc::new(DirectionGrid::circle(180, OffsetGrid::for_grid(&g), false).unwrap());
    let opts = InversionOptions::default();
    let q = QuadratureOptions::default();
    for (m, seed) in [(0, 20), (1, 21)] {
        let f = random_phantom(2, m, seed).sample(&g).unwrap();
        let once = invert_full(&GrtDataset::from_field(&f, &dg, &q).unwrap(), &g, &opts).unwrap().field;
        let twice = invert_full(&GrtDataset::from_field(&once, &dg, &q).unwrap(), &g, &opts).unwrap().field;
        let err = twice.rel_l2_error(&once).unwrap();
        println!("m={m} idempotence defect {err:.3e}");
        assert!(err <= 1e-2, "m={m}: {err}");
    }
}
