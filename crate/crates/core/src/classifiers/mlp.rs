use serde::{Deserialize, Serialize};

use super::params::MlpConfig;
use super::samples::Samples;
use super::ClassDistribution;
use crate::error::{Error, Result};
use crate::numerics::fastexp;
use crate::numerics::rng::{tags, RngStream};

const MAX_RESTARTS: usize = 3;

/// Weights of a one-hidden-layer sigmoid network with a two-way softmax
/// output. `w1` is input-major (`w1[i * hidden + j]` joins input `i` to hidden
/// unit `j`); `w2` is output-major (`w2[k * hidden + j]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpWeights {
    pub inputs: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: [f64; 2],
}

impl MlpWeights {
    pub fn zeros(inputs: usize, hidden: usize) -> Self {
        MlpWeights {
            inputs,
            hidden,
            w1: vec![0.0; inputs * hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; 2 * hidden],
            b2: [0.0; 2],
        }
    }

    /// Uniform(-0.5, 0.5) initialization in the order w1, b1, w2, b2.
    pub fn random(inputs: usize, hidden: usize, rng: &mut RngStream) -> Self {
        let mut w = MlpWeights::zeros(inputs, hidden);
        for v in
            w.w1.iter_mut()
                .chain(w.b1.iter_mut())
                .chain(w.w2.iter_mut())
                .chain(w.b2.iter_mut())
        {
            *v = rng.uniform_in(-0.5, 0.5);
        }
        w
    }

    pub fn parameter_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + 2
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.parameter_count());
        v.extend_from_slice(&self.w1);
        v.extend_from_slice(&self.b1);
        v.extend_from_slice(&self.w2);
        v.extend_from_slice(&self.b2);
        v
    }

    pub fn from_flat(inputs: usize, hidden: usize, flat: &[f64]) -> Result<Self> {
        let mut w = MlpWeights::zeros(inputs, hidden);
        if flat.len() != w.parameter_count() {
            return Err(Error::numeric("flat weight vector has the wrong length"));
        }
        let (a, rest) = flat.split_at(w.w1.len());
        let (b, rest) = rest.split_at(w.b1.len());
        let (c, d) = rest.split_at(w.w2.len());
        w.w1.copy_from_slice(a);
        w.b1.copy_from_slice(b);
        w.w2.copy_from_slice(c);
        w.b2.copy_from_slice(d);
        Ok(w)
    }

    /// Hidden activations into `h`; returns P(class 1).
    #[inline]
    fn forward(&self, x: &[f64], h: &mut [f64]) -> f64 {
        let hn = self.hidden;
        h.copy_from_slice(&self.b1);
        for (i, &xi) in x.iter().enumerate() {
            let row = &self.w1[i * hn..(i + 1) * hn];
            for (hj, wj) in h.iter_mut().zip(row) {
                *hj += xi * wj;
            }
        }
        fastexp::sigmoid_in_place(h);
        let (w20, w21) = self.w2.split_at(hn);
        let z0 = self.b2[0] + dot(h, w20);
        let z1 = self.b2[1] + dot(h, w21);
        crate::numerics::sigmoid(z1 - z0)
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        let mut h = vec![0.0; self.hidden];
        self.forward(x, &mut h)
    }

    /// Mean cross-entropy over row-major `rows` and its gradient, flattened
    /// in the order of [`MlpWeights::to_flat`].
    pub fn loss_grad(&self, rows: &[f64], labels: &[u8]) -> (f64, Vec<f64>) {
        let n = labels.len();
        let mut grad = MlpWeights::zeros(self.inputs, self.hidden);
        let mut h = vec![0.0; self.hidden];
        let mut dh = vec![0.0; self.hidden];
        let mut loss = 0.0;
        for (t, &y) in labels.iter().enumerate() {
            let x = &rows[t * self.inputs..(t + 1) * self.inputs];
            let p1 = self.forward(x, &mut h);
            loss += cross_entropy(p1, y);
            self.backward(x, y, p1, &h, &mut dh, |slot, g| match slot {
                Slot::W1(k) => grad.w1[k] += g,
                Slot::B1(k) => grad.b1[k] += g,
                Slot::W2(k) => grad.w2[k] += g,
                Slot::B2(k) => grad.b2[k] += g,
            });
        }
        let inv = 1.0 / n.max(1) as f64;
        let flat = grad.to_flat().into_iter().map(|g| g * inv).collect();
        (loss * inv, flat)
    }

    /// Mean cross-entropy without the gradient.
    pub fn loss(&self, rows: &[f64], labels: &[u8]) -> f64 {
        let mut h = vec![0.0; self.hidden];
        let total: f64 = labels
            .iter()
            .enumerate()
            .map(|(t, &y)| cross_entropy(self.forward(&rows[t * self.inputs..(t + 1) * self.inputs], &mut h), y))
            .sum();
        total / labels.len().max(1) as f64
    }

    fn backward(&self, x: &[f64], y: u8, p1: f64, h: &[f64], dh: &mut [f64], mut emit: impl FnMut(Slot, f64)) {
        let hn = self.hidden;
        let d1 = p1 - f64::from(y);
        let d0 = -d1;
        let (w20, w21) = self.w2.split_at(hn);
        for j in 0..hn {
            emit(Slot::W2(j), d0 * h[j]);
            emit(Slot::W2(hn + j), d1 * h[j]);
            dh[j] = h[j] * (1.0 - h[j]) * (d0 * w20[j] + d1 * w21[j]);
        }
        emit(Slot::B2(0), d0);
        emit(Slot::B2(1), d1);
        for (i, &xi) in x.iter().enumerate() {
            for (j, &dj) in dh.iter().enumerate().take(hn) {
                emit(Slot::W1(i * hn + j), xi * dj);
            }
        }
        for (j, &dj) in dh.iter().enumerate().take(hn) {
            emit(Slot::B1(j), dj);
        }
    }
}

/// Dot product with eight independent partial sums, combined in a fixed
/// order.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    const LANES: usize = 8;
    let mut acc = [0.0; LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..LANES {
            acc[l] += x[l] * y[l];
        }
    }
    let pairs = [acc[0] + acc[4], acc[1] + acc[5], acc[2] + acc[6], acc[3] + acc[7]];
    (pairs[0] + pairs[2]) + (pairs[1] + pairs[3]) + tail
}

enum Slot {
    W1(usize),
    B1(usize),
    W2(usize),
    B2(usize),
}

#[inline]
fn cross_entropy(p1: f64, y: u8) -> f64 {
    let p = if y == 1 { p1 } else { 1.0 - p1 };
    -p.max(f64::MIN_POSITIVE).ln()
}

/// Multilayer perceptron trained by per-instance backpropagation with
/// momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub weights: MlpWeights,
    /// Learning rate in effect at the end of training.
    pub final_learning_rate: f64,
}

/// Momentum state for one parameter block.
struct Velocity {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: [f64; 2],
}

impl Mlp {
    pub(crate) fn fit(s: &Samples, cfg: &MlpConfig, rng: &mut RngStream) -> Result<Self> {
        let mut init_rng = rng.child(tags::INIT);
        let mut shuffle_rng = rng.child(tags::SHUFFLE);
        let mut w = MlpWeights::random(s.d, cfg.hidden, &mut init_rng);
        let hn = cfg.hidden;
        let mut vel = Velocity {
            w1: vec![0.0; s.d * hn],
            b1: vec![0.0; hn],
            w2: vec![0.0; 2 * hn],
            b2: [0.0; 2],
        };
        let mut lr = cfg.learning_rate;
        let m = cfg.momentum;
        let mut order: Vec<usize> = (0..s.n()).collect();
        let mut h = vec![0.0; hn];
        let mut dh = vec![0.0; hn];
        let mut restarts = 0;
        for _ in 0..cfg.epochs {
            shuffle_rng.shuffle(&mut order);
            loop {
                let snapshot = (w.clone(), vel.w1.clone(), vel.b1.clone(), vel.w2.clone(), vel.b2);
                let mut loss = 0.0;
                for &t in &order {
                    let x = s.row(t);
                    let y = s.y[t];
                    let p1 = w.forward(x, &mut h);
                    loss += cross_entropy(p1, y);
                    sgd_step(&mut w, &mut vel, x, y, p1, &h, &mut dh, lr, m);
                }
                if loss.is_finite() && w.b2.iter().all(|v| v.is_finite()) {
                    break;
                }
                restarts += 1;
                if restarts > MAX_RESTARTS {
                    return Err(Error::numeric("MLP loss diverged after repeated learning-rate halving"));
                }
                lr *= 0.5;
                w = snapshot.0;
                vel.w1 = snapshot.1;
                vel.b1 = snapshot.2;
                vel.w2 = snapshot.3;
                vel.b2 = snapshot.4;
            }
        }
        Ok(Mlp {
            weights: w,
            final_learning_rate: lr,
        })
    }

    pub(crate) fn dist(&self, x: &[f64]) -> ClassDistribution {
        ClassDistribution::from_unsafe(self.weights.probability(x))
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn sgd_step(
    w: &mut MlpWeights,
    vel: &mut Velocity,
    x: &[f64],
    y: u8,
    p1: f64,
    h: &[f64],
    dh: &mut [f64],
    lr: f64,
    m: f64,
) {
    let hn = w.hidden;
    let d1 = p1 - f64::from(y);
    let d0 = -d1;
    {
        let (w20, w21) = w.w2.split_at(hn);
        for (((dhj, &hj), a), b) in dh.iter_mut().zip(h).zip(w20).zip(w21) {
            *dhj = hj * (1.0 - hj) * (d0 * a + d1 * b);
        }
    }
    {
        let (w20, w21) = w.w2.split_at_mut(hn);
        let (v20, v21) = vel.w2.split_at_mut(hn);
        for ((wv, vv), &hj) in w20.iter_mut().zip(v20.iter_mut()).zip(h) {
            *vv = m * *vv - lr * d0 * hj;
            *wv += *vv;
        }
        for ((wv, vv), &hj) in w21.iter_mut().zip(v21.iter_mut()).zip(h) {
            *vv = m * *vv - lr * d1 * hj;
            *wv += *vv;
        }
    }
    for (k, dk) in [d0, d1].into_iter().enumerate() {
        vel.b2[k] = m * vel.b2[k] - lr * dk;
        w.b2[k] += vel.b2[k];
    }
    for (i, &xi) in x.iter().enumerate() {
        let wr = &mut w.w1[i * hn..(i + 1) * hn];
        let vr = &mut vel.w1[i * hn..(i + 1) * hn];
        let g = lr * xi;
        for ((wv, vv), &dj) in wr.iter_mut().zip(vr.iter_mut()).zip(dh.iter()) {
            *vv = m * *vv - g * dj;
            *wv += *vv;
        }
    }
    for ((wv, vv), &dj) in w.b1.iter_mut().zip(vel.b1.iter_mut()).zip(dh.iter()) {
        *vv = m * *vv - lr * dj;
        *wv += *vv;
    }
}
