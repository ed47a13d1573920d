//! One-dimensional Lagrange stencils and quadrature rules.

/// Lagrange interpolation stencil on unit-spaced nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    /// Four nodes, third-order accurate.
    Cubic,
    /// Six nodes, fifth-order accurate.
    Quintic,
}

impl Stencil {
    pub fn len(self) -> usize {
        match self {
            Stencil::Cubic => 4,
            Stencil::Quintic => 6,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Stencil at continuous index `q`: the first node and the weights of
    /// `first, first + 1, ...`. Only `len()` entries of the array are used.
    pub fn weights(self, q: f64) -> (isize, [f64; 6]) {
        let s = self.len();
        let base = q.floor();
        let t = q - base;
        let shift = (s / 2 - 1) as isize;
        let mut w = [0.0; 6];
        for (k, wk) in w.iter_mut().enumerate().take(s) {
            let ok = k as f64 - shift as f64;
            let mut acc = 1.0;
            for j in 0..s {
                if j != k {
                    let oj = j as f64 - shift as f64;
                    acc *= (t - oj) / (ok - oj);
                }
            }
            *wk = acc;
        }
        (base as isize - shift, w)
    }
}

/// Interpolates uniformly sampled values at continuous index `q`, treating
/// samples outside `0..values.len()` as zero.
pub fn interp_uniform(values: &[f64], q: f64, stencil: Stencil) -> f64 {
    let (first, w) = stencil.weights(q);
    let mut acc = 0.0;
    for (k, wk) in w.iter().enumerate().take(stencil.len()) {
        let j = first + k as isize;
        if j >= 0 && (j as usize) < values.len() {
            acc += wk * values[j as usize];
        }
    }
    acc
}

/// Trapezoid weights for `count` samples of spacing `h`.
pub fn trapezoid_weights(count: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; count];
    if count > 1 {
        w[0] *= 0.5;
        w[count - 1] *= 0.5;
    }
    w
}

// Eight-point Gauss-Legendre rule on [-1, 1].
const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite eight-point Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(8 * panels);
    let mut weights = Vec::with_capacity(8 * panels);
    let width = (b - a) / panels as f64;
    for k in 0..panels {
        let lo = a + k as f64 * width;
        let mid = lo + 0.5 * width;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
            nodes.push(mid + 0.5 * width * x);
            weights.push(0.5 * width * w);
        }
    }
    (nodes, weights)
}

/// `C^∞` step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_exact_at_nodes() {
        for st in [Stencil::Cubic, Stencil::Quintic] {
            let (first, w) = st.weights(7.0);
            let hit: Vec<_> = (0..st.len())
                .filter(|&k| w[k] != 0.0)
                .map(|k| (first + k as isize, w[k]))
                .collect();
            assert_eq!(hit, vec![(7, 1.0)]);
        }
    }

    #[test]
    fn stencils_reproduce_polynomials() {
        let vals: Vec<f64> = (0..20).map(|j| (j as f64).powi(3) - 2.0 * j as f64).collect();
        let q: f64 = 9.37;
        let exact = q.powi(3) - 2.0 * q;
        assert!((interp_uniform(&vals, q, Stencil::Cubic) - exact).abs() < 1e-10);
        let vals5: Vec<f64> = (0..20).map(|j| (j as f64).powi(5)).collect();
        assert!((interp_uniform(&vals5, q, Stencil::Quintic) - q.powi(5)).abs() < 1e-6);
    }

    #[test]
    fn gauss_legendre_integrates() {
        let (x, w) = gauss_legendre(0.0, 2.0, 3);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(7)).sum();
        assert!((s - 2f64.powi(8) / 8.0).abs() < 1e-12);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.cos()).sum();
        assert!((s - 2f64.sin()).abs() < 1e-14);
    }
}
