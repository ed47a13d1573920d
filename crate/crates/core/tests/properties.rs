use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_radon::decomp::{apply_d_k, apply_delta, decompose};
use tensor_radon::field::Grid;
use tensor_radon::phantom::{PhantomSpec, RandomPhantom};
use tensor_radon::radon::{grt_many, Degree, DirectionGrid, OffsetGrid, QuadratureOptions};
use tensor_radon::symtensor::{basis, frame, sym_dim, DenseTensor, SymTensor};

fn tensor(n: usize, m: usize, seed: u64) -> SymTensor {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = (0..sym_dim(n, m)).map(|_| rng.random_range(-1.0..1.0)).collect();
    SymTensor::from_coeffs(n, m, c).unwrap()
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (len > 1e-3).then(|| v.iter().map(|x| x / len).collect())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn compressed_storage_matches_dense(n in 1usize..4, m in 0usize..4, seed: u64) {
        let a = tensor(n, m, seed);
        let b = tensor(n, m, seed ^ 1);
        let (da, db) = (a.to_dense(), b.to_dense());
        let dense: f64 = da.data().iter().zip(db.data()).map(|(x, y)| x * y).sum();
        prop_assert!(close(a.pair(&b).unwrap(), dense, 1e-12));
        prop_assert!(close(a.norm(), a.pair(&a).unwrap().sqrt(), 1e-12));
        let back = da.symmetrize();
        for (x, y) in back.coeffs().iter().zip(a.coeffs()) {
            prop_assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn symmetric_product_is_commutative_and_symmetrized_outer(
        n in 1usize..4, ma in 0usize..3, mb in 0usize..3, seed: u64,
    ) {
        let a = tensor(n, ma, seed);
        let b = tensor(n, mb, seed ^ 7);
        let ab = a.sym_product(&b).unwrap();
        let ba = b.sym_product(&a).unwrap();
        let outer = a.to_dense().outer(&b.to_dense()).symmetrize();
        for k in 0..ab.coeffs().len() {
            prop_assert!(close(ab.coeffs()[k], ba.coeffs()[k], 1e-12));
            prop_assert!(close(ab.coeffs()[k], outer.coeffs()[k], 1e-12));
        }
    }

    #[test]
    fn pairing_with_a_power_evaluates_the_form(n in 1usize..4, m in 0usize..4, seed: u64, v in prop::collection::vec(-1.0f64..1.0, 3)) {
        let a = tensor(n, m, seed);
        let v = &v[..n];
        let p = SymTensor::vector_power(v, m);
        let direct = a.to_dense();
        let eval: f64 = (0..direct.data().len())
            .map(|flat| {
                let mut idx = vec![0; m];
                let mut r = flat;
                for slot in idx.iter_mut().rev() {
                    *slot = r % n;
                    r /= n;
                }
                direct.data()[flat] * idx.iter().map(|&i| v[i]).product::<f64>()
            })
            .sum();
        prop_assert!(close(a.pair(&p).unwrap(), eval, 1e-12));
    }

    #[test]
    fn contraction_is_adjoint_to_vector_product(n in 1usize..4, m in 1usize..4, seed: u64, v in prop::collection::vec(-1.0f64..1.0, 3)) {
        let a = tensor(n, m, seed);
        let b = tensor(n, m - 1, seed ^ 3);
        let v = &v[..n];
        let lhs = a.contract(v).unwrap().pair(&b).unwrap();
        let rhs = a.pair(&b.mul_vector(v).unwrap()).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn multiplicities_count_orderings(n in 1usize..4, m in 0usize..5) {
        let b = basis(n, m);
        let total: f64 = b.multiplicities().iter().sum();
        prop_assert!(close(total, (n as f64).powi(m as i32), 1e-12));
    }

    #[test]
    fn frames_are_orthonormal_and_even(v in prop::collection::vec(-1.0f64..1.0, 2..5)) {
        let Some(w) = unit(&v) else { return Ok(()) };
        let f = frame(&w).unwrap();
        let n = w.len();
        for i in 0..n {
            for j in 0..n {
                let d: f64 = f.vector(i).iter().zip(f.vector(j)).map(|(a, b)| a * b).sum();
                let delta = if i == j { 1.0 } else { 0.0 };
                prop_assert!((d - delta).abs() < 1e-12);
            }
        }
        let neg: Vec<f64> = w.iter().map(|x| -x).collect();
        prop_assert_eq!(frame(&neg).unwrap().tangents, f.tangents);
    }

    #[test]
    fn dense_tensors_of_symmetric_functions_symmetrize_to_themselves(n in 1usize..4, m in 0usize..4) {
        let d = DenseTensor::from_fn(n, m, |idx| idx.iter().map(|&i| (i + 1) as f64).product());
        let s = d.symmetrize();
        let again = s.to_dense();
        for (x, y) in again.data().iter().zip(d.data()) {
            prop_assert!(close(*x, *y, 1e-12));
        }
    }
}

fn random_phantom(n: usize, m: usize, seed: u64) -> PhantomSpec {
    PhantomSpec::random(n, m, &RandomPhantom::default(), &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn frame_data_has_the_parity_of_its_normal_power(m in 0usize..3, seed: u64) {
        let g = Grid::new(2, 5.0, 32).unwrap();
        let f = random_phantom(2, m, seed).sample(&g).unwrap();
        let dg = Arc::new(DirectionGrid::circle(32, OffsetGrid::for_grid(&g), false).unwrap());
        let degrees = Degree::all_frames(2, m);
        let sinos = grt_many(&f, &degrees, &dg, &QuadratureOptions::default()).unwrap();
        for (d, s) in degrees.iter().zip(&sinos) {
            let Degree::Frame(l) = d else { unreachable!() };
            let sign = if l.normal() % 2 == 0 { 1.0 } else { -1.0 };
            let np = s.p_len();
            let mut defect = 0.0f64;
            for k in 0..dg.len() {
                let a = dg.antipode(k).unwrap();
                for j in 0..np {
                    defect = defect.max((s.row(a, 0)[np - 1 - j] - sign * s.row(k, 0)[j]).abs());
                }
            }
            prop_assert!(defect <= 1e-10 * (1.0 + s.max_abs()), "{:?}: {}", l, defect);
        }
    }

    #[test]
    fn decomposition_reproduces_and_is_solenoidal(n in 2usize..4, m in 0usize..3, seed: u64) {
        let g = Grid::new(n, 5.0, if n == 2 { 32 } else { 16 }).unwrap();
        let f = random_phantom(n, m, seed).sample(&g).unwrap();
        let dec = decompose(&f).unwrap();
        prop_assert!(dec.residual < 1e-6);
        for (i, v) in dec.components.iter().enumerate() {
            prop_assert_eq!(v.order(), m - i);
            if i < m && v.order() > 0 {
                let div = apply_delta(v).unwrap().l2_norm();
                prop_assert!(div <= 1e-8 * (1.0 + v.l2_norm()), "i={} δv={}", i, div);
            }
        }
        let mut sum = dec.components[0].clone();
        for (i, v) in dec.components.iter().enumerate().skip(1) {
            sum = sum.add(&apply_d_k(v, i).unwrap()).unwrap();
        }
        prop_assert!(sum.rel_l2_error(&f).unwrap() < 1e-6);
    }

    #[test]
    fn forward_transform_is_linear(m in 0usize..3, seed: u64, s in -2.0f64..2.0) {
        let g = Grid::new(2, 5.0, 32).unwrap();
        let a = random_phantom(2, m, seed).sample(&g).unwrap();
        let b = random_phantom(2, m, seed ^ 5).sample(&g).unwrap();
        let dg = Arc::new(DirectionGrid::circle(16, OffsetGrid::for_grid(&g), false).unwrap());
        let degrees = Degree::all_frames(2, m);
        let opts = QuadratureOptions::default();
        let ga = grt_many(&a, &degrees, &dg, &opts).unwrap();
        let gb = grt_many(&b, &degrees, &dg, &opts).unwrap();
        let gs = grt_many(&a.add(&b.scale(s)).unwrap(), &degrees, &dg, &opts).unwrap();
        for ((x, y), z) in ga.iter().zip(&gb).zip(&gs) {
            let expect: Vec<f64> = x.values.iter().zip(&y.values).map(|(p, q)| p + s * q).collect();
            let err = z.values.iter().zip(&expect).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-12 * (1.0 + z.max_abs()));
        }
    }
}
