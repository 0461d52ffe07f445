//! Two-hidden-layer perceptron over `[x_t, embed(t)]` with SiLU activations
//! and hand-written reverse-mode gradients.
//!
//! Parameters live in one flat `Vec<f64>` laid out as
//! `W1 (in×H) | b1 (H) | W2 (H×H) | b2 (H) | W3 (H×2) | b3 (2)`, row-major,
//! with rows indexing inputs (`y = x W + b`).

use ndarray::{s, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::schedule::sigmoid;
use crate::Point;

/// Shortest embedding period; periods run geometrically from 1 down to this.
pub const MIN_PERIOD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpShape {
    pub hidden: usize,
    /// Number of sin/cos frequency pairs in the time embedding.
    pub freqs: usize,
}

impl Default for MlpShape {
    fn default() -> Self {
        MlpShape { hidden: 128, freqs: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LayerShape {
    pub name: &'static str,
    pub rows: usize,
    pub cols: usize,
}

impl MlpShape {
    pub fn input_dim(&self) -> usize {
        2 + 2 * self.freqs
    }

    /// Weight and bias blocks in storage order. Biases have `rows == 1`.
    pub fn layers(&self) -> [LayerShape; 6] {
        let (i, h) = (self.input_dim(), self.hidden);
        [
            LayerShape { name: "w1", rows: i, cols: h },
            LayerShape { name: "b1", rows: 1, cols: h },
            LayerShape { name: "w2", rows: h, cols: h },
            LayerShape { name: "b2", rows: 1, cols: h },
            LayerShape { name: "w3", rows: h, cols: 2 },
            LayerShape { name: "b3", rows: 1, cols: 2 },
        ]
    }

    pub fn n_params(&self) -> usize {
        self.layers().iter().map(|l| l.rows * l.cols).sum()
    }

    fn offsets(&self) -> [usize; 7] {
        let mut out = [0; 7];
        for (k, l) in self.layers().iter().enumerate() {
            out[k + 1] = out[k] + l.rows * l.cols;
        }
        out
    }

    /// Weights `~ N(0, 1/fan_in)`, biases zero.
    pub fn init(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut params = Vec::with_capacity(self.n_params());
        for l in self.layers() {
            let n = l.rows * l.cols;
            if l.rows == 1 {
                params.extend(std::iter::repeat_n(0.0, n));
            } else {
                let scale = 1.0 / (l.rows as f64).sqrt();
                params.extend((0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)));
            }
        }
        params
    }

    /// Sinusoidal features of `t`: `sin(2πt/p_k), cos(2πt/p_k)`.
    pub fn embed(&self, t: f64, out: &mut [f64]) {
        for k in 0..self.freqs {
            let frac = if self.freqs > 1 { k as f64 / (self.freqs - 1) as f64 } else { 0.0 };
            let period = MIN_PERIOD.powf(frac);
            let (s, c) = (2.0 * PI * t / period).sin_cos();
            out[2 * k] = s;
            out[2 * k + 1] = c;
        }
    }
}

struct Views<'a> {
    w1: ArrayView2<'a, f64>,
    b1: ArrayView1<'a, f64>,
    w2: ArrayView2<'a, f64>,
    b2: ArrayView1<'a, f64>,
    w3: ArrayView2<'a, f64>,
    b3: ArrayView1<'a, f64>,
}

fn views<'a>(shape: &MlpShape, params: &'a [f64]) -> Views<'a> {
    assert_eq!(params.len(), shape.n_params(), "parameter vector does not match shape");
    let o = shape.offsets();
    let (i, h) = (shape.input_dim(), shape.hidden);
    let mat = |k: usize, r, c| ArrayView2::from_shape((r, c), &params[o[k]..o[k + 1]]).unwrap();
    let vec = |k: usize| ArrayView1::from(&params[o[k]..o[k + 1]]);
    Views { w1: mat(0, i, h), b1: vec(1), w2: mat(2, h, h), b2: vec(3), w3: mat(4, h, 2), b3: vec(5) }
}

/// Activations kept for the backward pass.
pub struct Cache {
    input: Array2<f64>,
    a1: Array2<f64>,
    /// SiLU derivative at the first pre-activation.
    d1: Array2<f64>,
    a2: Array2<f64>,
    d2: Array2<f64>,
}

/// SiLU `z σ(z)` in place; returns its derivative `σ(z)(1 + z(1 - σ(z)))`.
fn silu_inplace(z: &mut Array2<f64>) -> Array2<f64> {
    let mut d = Array2::zeros(z.raw_dim());
    Zip::from(&mut d).and(z).for_each(|d, z| {
        let s = sigmoid(*z);
        *d = s * (1.0 + *z * (1.0 - s));
        *z *= s;
    });
    d
}

fn input_matrix(shape: &MlpShape, xs: &[Point], ts: &[f64]) -> Array2<f64> {
    assert_eq!(xs.len(), ts.len());
    let mut input = Array2::zeros((xs.len(), shape.input_dim()));
    for (mut row, (x, &t)) in input.axis_iter_mut(Axis(0)).zip(xs.iter().zip(ts)) {
        row[0] = x[0];
        row[1] = x[1];
        shape.embed(t, row.slice_mut(s![2..]).as_slice_mut().unwrap());
    }
    input
}

/// Batched forward pass; returns outputs (`n×2`) and the activation cache.
pub fn forward_batch(shape: &MlpShape, params: &[f64], xs: &[Point], ts: &[f64]) -> (Array2<f64>, Cache) {
    let v = views(shape, params);
    let input = input_matrix(shape, xs, ts);
    let mut a1 = input.dot(&v.w1) + &v.b1;
    let d1 = silu_inplace(&mut a1);
    let mut a2 = a1.dot(&v.w2) + &v.b2;
    let d2 = silu_inplace(&mut a2);
    let out = a2.dot(&v.w3) + &v.b3;
    (out, Cache { input, a1, d1, a2, d2 })
}

/// Forward pass without a cache, as points.
pub fn predict(shape: &MlpShape, params: &[f64], xs: &[Point], ts: &[f64]) -> Vec<Point> {
    let (out, _) = forward_batch(shape, params, xs, ts);
    out.outer_iter().map(|r| [r[0], r[1]]).collect()
}

/// Single-point forward pass.
pub fn model_forward(shape: &MlpShape, params: &[f64], x_t: Point, t: f64) -> Point {
    predict(shape, params, &[x_t], &[t])[0]
}

/// Gradient of `Σ_{i,j} grad_out[i,j] · out[i,j]` with respect to the flat
/// parameter vector.
pub fn backward(shape: &MlpShape, params: &[f64], cache: &Cache, grad_out: &Array2<f64>) -> Vec<f64> {
    let v = views(shape, params);
    let g_w3 = cache.a2.t().dot(grad_out);
    let g_b3 = grad_out.sum_axis(Axis(0));
    let g_z2 = grad_out.dot(&v.w3.t()) * &cache.d2;
    let g_w2 = cache.a1.t().dot(&g_z2);
    let g_b2 = g_z2.sum_axis(Axis(0));
    let g_z1 = g_z2.dot(&v.w2.t()) * &cache.d1;
    let g_w1 = cache.input.t().dot(&g_z1);
    let g_b1 = g_z1.sum_axis(Axis(0));

    let mut grads = Vec::with_capacity(params.len());
    grads.extend(g_w1.iter().chain(&g_b1).chain(&g_w2).chain(&g_b2).chain(&g_w3).chain(&g_b3));
    grads
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> MlpShape {
        MlpShape { hidden: 8, freqs: 3 }
    }

    #[test]
    fn layout() {
        let s = MlpShape::default();
        assert_eq!(s.input_dim(), 34);
        assert_eq!(s.n_params(), 34 * 128 + 128 + 128 * 128 + 128 + 128 * 2 + 2);
    }

    #[test]
    fn zero_weights_give_zero_output() {
        let s = small();
        let params = vec![0.0; s.n_params()];
        assert_eq!(model_forward(&s, &params, [0.3, -2.0], 0.7), [0.0, 0.0]);
    }

    #[test]
    fn embedding_periods() {
        let s = MlpShape { hidden: 1, freqs: 4 };
        let mut e = [0.0; 8];
        s.embed(0.25, &mut e);
        // Period 1: sin(π/2) = 1.
        assert!((e[0] - 1.0).abs() < 1e-15);
        assert!(e[1].abs() < 1e-15);
        // Period 1e-3 completes 250 turns at t = 0.25.
        assert!(e[6].abs() < 1e-9);
        assert!((e[7] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn forward_is_pure_and_batch_consistent() {
        let s = small();
        let params = s.init(&mut ChaCha8Rng::seed_from_u64(1));
        let a = model_forward(&s, &params, [0.1, 0.2], 0.3);
        assert_eq!(a, model_forward(&s, &params, [0.1, 0.2], 0.3));
        let batch = predict(&s, &params, &[[9.0, 9.0], [0.1, 0.2]], &[0.9, 0.3]);
        assert!((batch[1][0] - a[0]).abs() < 1e-14 && (batch[1][1] - a[1]).abs() < 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let s = small();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = s.init(&mut rng);
        let xs = [[0.4, -1.1], [1.5, 0.2], [-0.3, 0.9]];
        let ts = [0.1, 0.55, 0.93];
        // Probe direction on the outputs.
        let probe = Array2::from_shape_vec((3, 2), vec![0.7, -1.3, 0.2, 0.5, -0.9, 1.1]).unwrap();
        let (_, cache) = forward_batch(&s, &params, &xs, &ts);
        let grads = backward(&s, &params, &cache, &probe);
        let f = |p: &[f64]| (forward_batch(&s, p, &xs, &ts).0 * &probe).sum();
        let h = 1e-5;
        for k in 0..params.len() {
            let mut p = params.clone();
            p[k] += h;
            let up = f(&p);
            p[k] -= 2.0 * h;
            let down = f(&p);
            let fd = (up - down) / (2.0 * h);
            assert!((fd - grads[k]).abs() <= 1e-6 * (1.0 + fd.abs()), "k={k} fd={fd} an={}", grads[k]);
        }
    }
}
