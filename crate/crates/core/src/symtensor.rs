//! Symmetric tensors in compressed storage.
//!
//! A symmetric `m`-tensor on `R^n` is stored by its coefficients at the
//! non-decreasing multi-indices `1 <= i_1 <= ... <= i_m <= n`, listed in
//! lexicographic order. Internally the indices are zero-based.
//!
//! The symmetric product is `a ⊙ b = σ(a ⊗ b)` where `σ` averages over all
//! `m!` index permutations, and the full contraction of two symmetric tensors
//! is `⟨f, g⟩ = Σ_I mult(I) f_I g_I`.

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Scalar types a symmetric tensor can hold.
pub trait Coeff:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Zero
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Mul<Self, Output = Self>
{
    /// Squared modulus.
    fn abs2(self) -> f64;
}

impl Coeff for f64 {
    fn abs2(self) -> f64 {
        self * self
    }
}

impl Coeff for Complex64 {
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
}

/// Binomial coefficient as an integer.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc as usize
}

/// `k!` as a float.
pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// Dimension of the space of symmetric `m`-tensors on `R^n`.
pub fn sym_dim(n: usize, m: usize) -> usize {
    if n == 0 {
        return usize::from(m == 0);
    }
    binomial(m + n - 1, m)
}

/// The compressed basis for one `(n, m)` pair together with lookup tables.
#[derive(Debug)]
pub struct SymBasis {
    n: usize,
    m: usize,
    indices: Vec<Vec<usize>>,
    mult: Vec<f64>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl SymBasis {
    fn build(n: usize, m: usize) -> Self {
        let mut indices = Vec::with_capacity(sym_dim(n, m));
        if n > 0 || m == 0 {
            let mut cur = vec![0usize; m];
            loop {
                indices.push(cur.clone());
                // Advance to the next non-decreasing index in lex order.
                let Some(pos) = (0..m).rev().find(|&q| cur[q] + 1 < n) else {
                    break;
                };
                let v = cur[pos] + 1;
                for c in cur.iter_mut().skip(pos) {
                    *c = v;
                }
            }
        }
        let mult = indices.iter().map(|idx| multiplicity(idx)).collect();
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(k, idx)| (idx.clone(), k))
            .collect();
        SymBasis {
            n,
            m,
            indices,
            mult,
            lookup,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Zero-based non-decreasing multi-index of coefficient `k`.
    pub fn index(&self, k: usize) -> &[usize] {
        &self.indices[k]
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    /// Number of distinct arrangements of multi-index `k`.
    pub fn multiplicity(&self, k: usize) -> f64 {
        self.mult[k]
    }

    pub fn multiplicities(&self) -> &[f64] {
        &self.mult
    }

    /// Position of an arbitrary (not necessarily sorted) zero-based index.
    pub fn position(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.m || idx.iter().any(|&a| a >= self.n) {
            return None;
        }
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        self.lookup.get(&sorted).copied()
    }
}

/// `m! / Π count_a!` for a multi-index.
pub fn multiplicity(idx: &[usize]) -> f64 {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &a in idx {
        *counts.entry(a).or_default() += 1;
    }
    counts
        .values()
        .fold(factorial(idx.len()), |acc, &c| acc / factorial(c))
}

type Cache<K, V> = OnceLock<Mutex<HashMap<K, Arc<V>>>>;

fn cached<K, V>(cache: &Cache<K, V>, key: K, make: impl FnOnce() -> V) -> Arc<V>
where
    K: std::hash::Hash + Eq,
{
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().expect("cache poisoned").get(&key) {
        return v.clone();
    }
    let v = Arc::new(make());
    map.lock()
        .expect("cache poisoned")
        .entry(key)
        .or_insert(v)
        .clone()
}

/// Shared compressed basis for `(n, m)`.
pub fn basis(n: usize, m: usize) -> Arc<SymBasis> {
    static CACHE: Cache<(usize, usize), SymBasis> = OnceLock::new();
    cached(&CACHE, (n, m), || SymBasis::build(n, m))
}

/// Entry `(axis, weight, source)` of the table for `v ⊙ T`, `T` of order `k`:
/// `(v ⊙ T)_I = Σ weight · v_axis · T_source`.
pub type RaiseEntry = (usize, f64, usize);

/// Table for left multiplication by a vector, order `k` to `k + 1`.
pub fn raise_table(n: usize, k: usize) -> Arc<Vec<Vec<RaiseEntry>>> {
    static CACHE: Cache<(usize, usize), Vec<Vec<RaiseEntry>>> = OnceLock::new();
    cached(&CACHE, (n, k), || {
        let hi = basis(n, k + 1);
        let lo = basis(n, k);
        hi.indices()
            .iter()
            .map(|idx| {
                let mut out = Vec::new();
                let mut q = 0;
                while q < idx.len() {
                    let a = idx[q];
                    let count = idx.iter().filter(|&&b| b == a).count();
                    let mut rest = idx.clone();
                    rest.remove(q);
                    let src = lo.position(&rest).expect("sub-index in basis");
                    out.push((a, count as f64 / (k + 1) as f64, src));
                    q += count;
                }
                out
            })
            .collect()
    })
}

/// Entry `(axis, source)` of the contraction table:
/// `(T ⌟ v)_J = Σ v_axis · T_source`, `T` of order `k + 1`.
pub type LowerEntry = (usize, usize);

/// Table for contraction with a vector, order `k + 1` to `k`.
pub fn lower_table(n: usize, k: usize) -> Arc<Vec<Vec<LowerEntry>>> {
    static CACHE: Cache<(usize, usize), Vec<Vec<LowerEntry>>> = OnceLock::new();
    cached(&CACHE, (n, k), || {
        let hi = basis(n, k + 1);
        let lo = basis(n, k);
        lo.indices()
            .iter()
            .map(|idx| {
                (0..n)
                    .map(|a| {
                        let mut up = idx.clone();
                        up.push(a);
                        (a, hi.position(&up).expect("super-index in basis"))
                    })
                    .collect()
            })
            .collect()
    })
}

/// A symmetric tensor of order `m` on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<T = f64> {
    n: usize,
    m: usize,
    coeffs: Vec<T>,
}

impl<T: Coeff> SymTensor<T> {
    pub fn zeros(n: usize, m: usize) -> Self {
        SymTensor {
            n,
            m,
            coeffs: vec![T::zero(); sym_dim(n, m)],
        }
    }

    pub fn from_coeffs(n: usize, m: usize, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != sym_dim(n, m) {
            return Err(Error::Shape(format!(
                "{} coefficients given, order {m} on R^{n} needs {}",
                coeffs.len(),
                sym_dim(n, m)
            )));
        }
        Ok(SymTensor { n, m, coeffs })
    }

    /// A rank-zero tensor.
    pub fn scalar(n: usize, value: T) -> Self {
        SymTensor {
            n,
            m: 0,
            coeffs: vec![value],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn basis(&self) -> Arc<SymBasis> {
        basis(self.n, self.m)
    }

    /// Coefficient at an arbitrary zero-based multi-index.
    pub fn get(&self, idx: &[usize]) -> Option<T> {
        self.basis().position(idx).map(|k| self.coeffs[k])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c * s)
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> SymTensor<U> {
        SymTensor {
            n: self.n,
            m: self.m,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::Shape(format!(
                "order {} on R^{} vs order {} on R^{}",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(SymTensor {
            n: self.n,
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(SymTensor {
            n: self.n,
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    /// Euclidean norm induced by the full contraction.
    pub fn norm(&self) -> f64 {
        let b = self.basis();
        self.coeffs
            .iter()
            .zip(b.multiplicities())
            .map(|(c, w)| w * c.abs2())
            .sum::<f64>()
            .sqrt()
    }

    /// Full contraction `⟨self, g⟩` with a real tensor.
    pub fn pair(&self, g: &SymTensor<f64>) -> Result<T> {
        if self.n != g.n || self.m != g.m {
            return Err(Error::Shape(format!(
                "cannot contract order {} with order {}",
                self.m, g.m
            )));
        }
        Ok(pair_slices(&self.coeffs, &g.coeffs, self.basis().multiplicities()))
    }

    /// `v ⊙ self`.
    pub fn mul_vector(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.n {
            return Err(Error::Shape(format!(
                "vector of length {} on R^{}",
                v.len(),
                self.n
            )));
        }
        let table = raise_table(self.n, self.m);
        let coeffs = table
            .iter()
            .map(|row| {
                row.iter().fold(T::zero(), |acc, &(a, w, src)| {
                    acc + self.coeffs[src] * (w * v[a])
                })
            })
            .collect();
        Ok(SymTensor {
            n: self.n,
            m: self.m + 1,
            coeffs,
        })
    }

    /// Contraction with a vector over one slot, order `m` to `m - 1`.
    pub fn contract(&self, v: &[f64]) -> Result<Self> {
        if self.m == 0 {
            return Err(Error::Shape("cannot contract a scalar".into()));
        }
        if v.len() != self.n {
            return Err(Error::Shape(format!(
                "vector of length {} on R^{}",
                v.len(),
                self.n
            )));
        }
        let table = lower_table(self.n, self.m - 1);
        let coeffs = table
            .iter()
            .map(|row| {
                row.iter()
                    .fold(T::zero(), |acc, &(a, src)| acc + self.coeffs[src] * v[a])
            })
            .collect();
        Ok(SymTensor {
            n: self.n,
            m: self.m - 1,
            coeffs,
        })
    }

    /// Symmetric product `σ(self ⊗ b)`.
    pub fn sym_product(&self, b: &SymTensor<f64>) -> Result<Self> {
        if self.n != b.n {
            return Err(Error::Shape(format!("R^{} vs R^{}", self.n, b.n)));
        }
        let (ma, mb) = (self.m, b.m);
        let m = ma + mb;
        let out = basis(self.n, m);
        let ba = self.basis();
        let bb = b.basis();
        let norm = 1.0 / binomial(m, ma) as f64;
        let subsets: Vec<u32> = (0u32..(1u32 << m))
            .filter(|s| s.count_ones() as usize == ma)
            .collect();
        let coeffs = out
            .indices()
            .iter()
            .map(|idx| {
                let mut acc = T::zero();
                let mut ia = Vec::with_capacity(ma);
                let mut ib = Vec::with_capacity(mb);
                for &s in &subsets {
                    ia.clear();
                    ib.clear();
                    for (q, &a) in idx.iter().enumerate() {
                        if s >> q & 1 == 1 {
                            ia.push(a);
                        } else {
                            ib.push(a);
                        }
                    }
                    // Both halves inherit sortedness from idx.
                    let pa = ba.lookup[&ia];
                    let pb = bb.lookup[&ib];
                    acc += self.coeffs[pa] * b.coeffs[pb];
                }
                acc * norm
            })
            .collect();
        Ok(SymTensor {
            n: self.n,
            m,
            coeffs,
        })
    }

    /// Expands to a dense `n^m` array in row-major order.
    pub fn to_dense(&self) -> DenseTensor<T> {
        let b = self.basis();
        let size = self.n.pow(self.m as u32);
        let data = (0..size)
            .map(|flat| {
                let idx = unravel(flat, self.n, self.m);
                self.coeffs[b.position(&idx).expect("index in range")]
            })
            .collect();
        DenseTensor {
            n: self.n,
            m: self.m,
            data,
        }
    }
}

impl SymTensor<f64> {
    /// `v^{⊙ℓ}`, the `ℓ`-th symmetric power of a vector.
    pub fn vector_power(v: &[f64], l: usize) -> Self {
        let n = v.len();
        let b = basis(n, l);
        let coeffs = b
            .indices()
            .iter()
            .map(|idx| idx.iter().map(|&a| v[a]).product())
            .collect();
        SymTensor { n, m: l, coeffs }
    }

    /// Lifts to complex coefficients.
    pub fn complexify(&self) -> SymTensor<Complex64> {
        self.map(|c| Complex64::new(c, 0.0))
    }
}

/// `Σ_I w_I f_I g_I` for raw coefficient slices.
pub fn pair_slices<T: Coeff>(f: &[T], g: &[f64], mult: &[f64]) -> T {
    f.iter()
        .zip(g)
        .zip(mult)
        .fold(T::zero(), |acc, ((&a, &b), &w)| acc + a * (b * w))
}

fn unravel(mut flat: usize, n: usize, m: usize) -> Vec<usize> {
    let mut idx = vec![0; m];
    for q in (0..m).rev() {
        idx[q] = flat % n;
        flat /= n;
    }
    idx
}

/// A general (not necessarily symmetric) tensor, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T = f64> {
    n: usize,
    m: usize,
    data: Vec<T>,
}

impl<T: Coeff> DenseTensor<T> {
    pub fn from_fn(n: usize, m: usize, f: impl Fn(&[usize]) -> T) -> Self {
        let data = (0..n.pow(m as u32))
            .map(|flat| f(&unravel(flat, n, m)))
            .collect();
        DenseTensor { n, m, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn get(&self, idx: &[usize]) -> T {
        let flat = idx.iter().fold(0, |acc, &a| acc * self.n + a);
        self.data[flat]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Tensor product.
    pub fn outer(&self, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .flat_map(|&a| other.data.iter().map(move |&b| a * b))
            .collect();
        DenseTensor {
            n: self.n,
            m: self.m + other.m,
            data,
        }
    }

    /// The symmetrization `σ`, averaging over all index permutations.
    pub fn symmetrize(&self) -> SymTensor<T> {
        let b = basis(self.n, self.m);
        let mut coeffs = vec![T::zero(); b.len()];
        for (flat, &v) in self.data.iter().enumerate() {
            let k = b
                .position(&unravel(flat, self.n, self.m))
                .expect("index in range");
            coeffs[k] += v * (1.0 / b.multiplicity(k));
        }
        SymTensor {
            n: self.n,
            m: self.m,
            coeffs,
        }
    }
}

/// Degree signature `ℓ = (ℓ_1, ..., ℓ_n)`: powers of the frame vectors, the
/// last entry being the power of the normal `ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct DegreeSignature(pub Vec<usize>);

impl DegreeSignature {
    pub fn new(degrees: Vec<usize>) -> Self {
        DegreeSignature(degrees)
    }

    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Power of the normal vector.
    pub fn normal(&self) -> usize {
        *self.0.last().unwrap_or(&0)
    }

    pub fn tangential(&self) -> &[usize] {
        &self.0[..self.0.len().saturating_sub(1)]
    }

    /// Every signature on `R^n` summing to `m`, in lexicographic order.
    pub fn all(n: usize, m: usize) -> Vec<Self> {
        compositions(n, m).into_iter().map(DegreeSignature).collect()
    }

    /// Signatures of order `m` with normal power exactly `i`.
    pub fn family(n: usize, m: usize, i: usize) -> Vec<Self> {
        if i > m || n == 0 {
            return Vec::new();
        }
        compositions(n - 1, m - i)
            .into_iter()
            .map(|mut c| {
                c.push(i);
                DegreeSignature(c)
            })
            .collect()
    }

    /// `Π ℓ_j!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&l| factorial(l)).product()
    }
}

/// Compositions of `m` into `parts` non-negative parts, lexicographic.
pub fn compositions(parts: usize, m: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if m == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=m {
        for mut rest in compositions(parts - 1, m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Orthonormal frame `(ω_1, ..., ω_{n-1}, ω)` adapted to a unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub normal: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
}

/// Builds the canonical frame of a unit vector.
///
/// The `n - 1` standard basis vectors least aligned with `ω` (ties to the
/// smallest index) are Gram-Schmidt orthonormalized against `ω` in the order
/// of their index. The result depends on `ω` only through `±ω`, so
/// `frame(-ω)` has the same tangents as `frame(ω)`.
pub fn frame(omega: &[f64]) -> Result<Frame> {
    let n = omega.len();
    if n == 0 {
        return Err(Error::Shape("frame of an empty vector".into()));
    }
    let norm = omega.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit { norm });
    }
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| {
        omega[a]
            .abs()
            .partial_cmp(&omega[b].abs())
            .expect("finite components")
            .then(a.cmp(&b))
    });
    let mut chosen = axes[..n - 1].to_vec();
    chosen.sort_unstable();
    let mut tangents: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for &j in &chosen {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        let proj = omega[j];
        for (vi, &oi) in v.iter_mut().zip(omega) {
            *vi -= proj * oi;
        }
        for t in &tangents {
            let d: f64 = v.iter().zip(t).map(|(a, b)| a * b).sum();
            for (vi, &ti) in v.iter_mut().zip(t) {
                *vi -= d * ti;
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for vi in &mut v {
            *vi /= len;
        }
        tangents.push(v);
    }
    Ok(Frame {
        normal: omega.to_vec(),
        tangents,
    })
}

impl Frame {
    pub fn n(&self) -> usize {
        self.normal.len()
    }

    /// Frame vector `j`: tangents first, the normal last.
    pub fn vector(&self, j: usize) -> &[f64] {
        if j + 1 == self.n() {
            &self.normal
        } else {
            &self.tangents[j]
        }
    }

    /// `ω_1^{⊙ℓ_1} ⊙ ... ⊙ ω_{n-1}^{⊙ℓ_{n-1}} ⊙ ω^{⊙ℓ_n}`.
    pub fn tensor(&self, degrees: &DegreeSignature) -> Result<SymTensor> {
        if degrees.dim() != self.n() {
            return Err(Error::Shape(format!(
                "signature of length {} for a frame on R^{}",
                degrees.dim(),
                self.n()
            )));
        }
        let mut acc = SymTensor::scalar(self.n(), 1.0);
        for (j, &l) in degrees.0.iter().enumerate() {
            if l > 0 {
                acc = acc.sym_product(&SymTensor::vector_power(self.vector(j), l))?;
            }
        }
        Ok(acc)
    }
}

/// `ω^{⊙a} ⊙ u^{⊙b}`.
pub fn pair_tensor(omega: &[f64], u: &[f64], a: usize, b: usize) -> Result<SymTensor> {
    SymTensor::vector_power(omega, a).sym_product(&SymTensor::vector_power(u, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(sym_dim(2, 0), 1);
        assert_eq!(sym_dim(2, 3), 4);
        assert_eq!(sym_dim(3, 2), 6);
        assert_eq!(sym_dim(3, 3), 10);
        for n in 1..5 {
            for m in 0..5 {
                assert_eq!(basis(n, m).len(), sym_dim(n, m));
            }
        }
    }

    #[test]
    fn lex_order() {
        let b = basis(3, 2);
        let expect = [[0, 0], [0, 1], [0, 2], [1, 1], [1, 2], [2, 2]];
        for (k, e) in expect.iter().enumerate() {
            assert_eq!(b.index(k), e);
        }
        assert_eq!(b.multiplicities(), &[1.0, 2.0, 2.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn frame_examples() {
        let f = frame(&[1.0, 0.0]).unwrap();
        assert_eq!(f.tangents, vec![vec![0.0, 1.0]]);
        let f = frame(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.tangents, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let f = frame(&[c, c]).unwrap();
        assert!((f.tangents[0][0] - c).abs() < 1e-15);
        assert!((f.tangents[0][1] + c).abs() < 1e-15);
    }

    #[test]
    fn frame_rejects_non_unit() {
        assert!(matches!(frame(&[1.0, 1.0]), Err(Error::NotUnit { .. })));
    }

    #[test]
    fn frame_basis_norm() {
        let omega = [0.6, 0.0, 0.8];
        let fr = frame(&omega).unwrap();
        for d in DegreeSignature::all(3, 3) {
            let b = fr.tensor(&d).unwrap();
            let expect = d.factorial() / factorial(3);
            assert!((b.pair(&b).unwrap() - expect).abs() < 1e-13, "{d:?}");
        }
    }

    #[test]
    fn family_lists() {
        let f = DegreeSignature::family(3, 2, 1);
        assert_eq!(
            f,
            vec![
                DegreeSignature(vec![0, 1, 1]),
                DegreeSignature(vec![1, 0, 1])
            ]
        );
        assert_eq!(DegreeSignature::all(2, 2).len(), 3);
    }
}
