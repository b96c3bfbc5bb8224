use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::math::SimRng;
use crate::{Error, Result};

/// Layer widths of a four-layer recurrent network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSizes {
    pub input: usize,
    pub h1: usize,
    /// Width of the recurrent layer.
    pub h2: usize,
    pub h3: usize,
    pub output: usize,
}

impl NetSizes {
    /// `h1 = 10·obs`, `h3 = 10·act`, `h2 = round(√(h1·h3))`.
    pub fn policy(obs: usize, act: usize) -> Self {
        let h1 = 10 * obs;
        let h3 = 10 * act;
        Self {
            input: obs,
            h1,
            h2: ((h1 * h3) as f64).sqrt().round() as usize,
            h3,
            output: act,
        }
    }

    /// `h1 = 10·obs`, `h3 = 5`, `h2 = round(√(h1·h3))`, scalar output.
    pub fn value(obs: usize) -> Self {
        let h1 = 10 * obs;
        let h3 = 5;
        Self {
            input: obs,
            h1,
            h2: ((h1 * h3) as f64).sqrt().round() as usize,
            h3,
            output: 1,
        }
    }

    fn blocks(&self) -> [(usize, usize); 14] {
        let (i, a, h, b, o) = (self.input, self.h1, self.h2, self.h3, self.output);
        [
            (a, i), // w1
            (a, 1), // b1
            (h, a), // wz
            (h, h), // uz
            (h, 1), // bz
            (h, a), // wr
            (h, h), // ur
            (h, 1), // br
            (h, a), // wh
            (h, h), // uh
            (h, 1), // bh
            (b, h), // w3
            (b, 1), // b3
            (o, b), // w4 (b4 follows)
        ]
    }

    pub fn num_params(&self) -> usize {
        self.blocks().iter().map(|(r, c)| r * c).sum::<usize>() + self.output
    }
}

/// Offsets of each parameter block inside the flat vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    w1: usize,
    b1: usize,
    wz: usize,
    uz: usize,
    bz: usize,
    wr: usize,
    ur: usize,
    br: usize,
    wh: usize,
    uh: usize,
    bh: usize,
    w3: usize,
    b3: usize,
    w4: usize,
    b4: usize,
}

impl Layout {
    fn new(s: &NetSizes) -> Self {
        let mut off = [0usize; 15];
        let mut acc = 0;
        for (k, (r, c)) in s.blocks().iter().enumerate() {
            off[k] = acc;
            acc += r * c;
        }
        off[14] = acc;
        Self {
            w1: off[0],
            b1: off[1],
            wz: off[2],
            uz: off[3],
            bz: off[4],
            wr: off[5],
            ur: off[6],
            br: off[7],
            wh: off[8],
            uh: off[9],
            bh: off[10],
            w3: off[11],
            b3: off[12],
            w4: off[13],
            b4: off[14],
        }
    }
}

/// `y = W x + b` for row-major `W` of shape `(b.len(), x.len())`.
fn affine(w: &[f64], b: &[f64], x: &[f64], y: &mut [f64]) {
    let n = x.len();
    for (i, yi) in y.iter_mut().enumerate() {
        let row = &w[i * n..(i + 1) * n];
        *yi = b[i] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `y += W x`.
fn matvec_add(w: &[f64], x: &[f64], y: &mut [f64]) {
    let n = x.len();
    for (i, yi) in y.iter_mut().enumerate() {
        let row = &w[i * n..(i + 1) * n];
        *yi += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `dx += Wᵀ d` and `dW += d xᵀ`, `db += d`.
fn affine_backward(
    w: &[f64],
    x: &[f64],
    d: &[f64],
    dx: Option<&mut [f64]>,
    dw: &mut [f64],
    db: Option<&mut [f64]>,
) {
    let n = x.len();
    for (i, &di) in d.iter().enumerate() {
        if di == 0.0 {
            continue;
        }
        let g = &mut dw[i * n..(i + 1) * n];
        for (gj, xj) in g.iter_mut().zip(x) {
            *gj += di * xj;
        }
    }
    if let Some(dx) = dx {
        for (i, &di) in d.iter().enumerate() {
            if di == 0.0 {
                continue;
            }
            let row = &w[i * n..(i + 1) * n];
            for (dxj, wj) in dx.iter_mut().zip(row) {
                *dxj += di * wj;
            }
        }
    }
    if let Some(db) = db {
        for (dbi, di) in db.iter_mut().zip(d) {
            *dbi += di;
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Activations saved from one forward step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCache {
    pub x: Vec<f64>,
    pub a1: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub rh: Vec<f64>,
    pub cand: Vec<f64>,
    pub h: Vec<f64>,
    pub a3: Vec<f64>,
    pub out: Vec<f64>,
}

/// `tanh → GRU → tanh → linear` network with parameters in one flat vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrentNet {
    pub sizes: NetSizes,
    pub params: Vec<f64>,
}

/// Random matrix with orthonormal rows or columns, scaled by `gain`.
fn orthogonal(rows: usize, cols: usize, gain: f64, rng: &mut SimRng) -> Vec<f64> {
    let (n, m) = if rows >= cols { (rows, cols) } else { (cols, rows) };
    let a = DMatrix::from_fn(n, m, |_, _| rng.standard_normal());
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let q = if rows >= cols { q } else { q.transpose() };
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(gain * q[(i, j)]);
        }
    }
    out
}

impl RecurrentNet {
    pub fn zeros(sizes: NetSizes) -> Self {
        Self {
            sizes,
            params: vec![0.0; sizes.num_params()],
        }
    }

    /// Orthogonal weights (gain 1 on hidden layers, `output_gain` on the
    /// output layer) and zero biases.
    pub fn new(sizes: NetSizes, output_gain: f64, rng: &mut SimRng) -> Self {
        let mut net = Self::zeros(sizes);
        let l = Layout::new(&sizes);
        let s = sizes;
        let mut put = |off: usize, m: Vec<f64>| net.params[off..off + m.len()].copy_from_slice(&m);
        put(l.w1, orthogonal(s.h1, s.input, 1.0, rng));
        for (w, u) in [(l.wz, l.uz), (l.wr, l.ur), (l.wh, l.uh)] {
            put(w, orthogonal(s.h2, s.h1, 1.0, rng));
            put(u, orthogonal(s.h2, s.h2, 1.0, rng));
        }
        put(l.w3, orthogonal(s.h3, s.h2, 1.0, rng));
        put(l.w4, orthogonal(s.output, s.h3, output_gain, rng));
        net
    }

    pub fn hidden_size(&self) -> usize {
        self.sizes.h2
    }

    pub fn initial_hidden(&self) -> Vec<f64> {
        vec![0.0; self.sizes.h2]
    }

    fn block(&self, off: usize, len: usize) -> &[f64] {
        &self.params[off..off + len]
    }

    /// One GRU update `h' = (1 − z) ⊙ h + z ⊙ h̃` on input `x`.
    pub fn gru_step(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        let mut c = self.empty_cache();
        c.a1 = x.to_vec();
        c.h_prev = h.to_vec();
        self.gru_forward(&mut c);
        c.h
    }

    fn empty_cache(&self) -> StepCache {
        let s = self.sizes;
        StepCache {
            x: vec![0.0; s.input],
            a1: vec![0.0; s.h1],
            h_prev: vec![0.0; s.h2],
            z: vec![0.0; s.h2],
            r: vec![0.0; s.h2],
            rh: vec![0.0; s.h2],
            cand: vec![0.0; s.h2],
            h: vec![0.0; s.h2],
            a3: vec![0.0; s.h3],
            out: vec![0.0; s.output],
        }
    }

    fn gru_forward(&self, c: &mut StepCache) {
        let s = self.sizes;
        let l = Layout::new(&s);
        let (h1, h2) = (s.h1, s.h2);
        affine(self.block(l.wz, h2 * h1), self.block(l.bz, h2), &c.a1, &mut c.z);
        matvec_add(self.block(l.uz, h2 * h2), &c.h_prev, &mut c.z);
        affine(self.block(l.wr, h2 * h1), self.block(l.br, h2), &c.a1, &mut c.r);
        matvec_add(self.block(l.ur, h2 * h2), &c.h_prev, &mut c.r);
        for k in 0..h2 {
            c.z[k] = sigmoid(c.z[k]);
            c.r[k] = sigmoid(c.r[k]);
            c.rh[k] = c.r[k] * c.h_prev[k];
        }
        affine(self.block(l.wh, h2 * h1), self.block(l.bh, h2), &c.a1, &mut c.cand);
        matvec_add(self.block(l.uh, h2 * h2), &c.rh, &mut c.cand);
        for k in 0..h2 {
            c.cand[k] = c.cand[k].tanh();
            c.h[k] = (1.0 - c.z[k]) * c.h_prev[k] + c.z[k] * c.cand[k];
        }
    }

    /// Forward pass keeping every intermediate activation.
    pub fn forward_cached(&self, x: &[f64], h: &[f64]) -> StepCache {
        let s = self.sizes;
        let l = Layout::new(&s);
        let mut c = self.empty_cache();
        c.x = x.to_vec();
        c.h_prev = h.to_vec();
        affine(self.block(l.w1, s.h1 * s.input), self.block(l.b1, s.h1), x, &mut c.a1);
        c.a1.iter_mut().for_each(|v| *v = v.tanh());
        self.gru_forward(&mut c);
        affine(self.block(l.w3, s.h3 * s.h2), self.block(l.b3, s.h3), &c.h, &mut c.a3);
        c.a3.iter_mut().for_each(|v| *v = v.tanh());
        affine(self.block(l.w4, s.output * s.h3), self.block(l.b4, s.output), &c.a3, &mut c.out);
        c
    }

    /// Output and next hidden state.
    pub fn forward(&self, x: &[f64], h: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if x.len() != self.sizes.input || h.len() != self.sizes.h2 {
            return Err(Error::InvalidInput(format!(
                "expected input {} and hidden {}, got {} and {}",
                self.sizes.input,
                self.sizes.h2,
                x.len(),
                h.len()
            )));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite network input".into()));
        }
        let c = self.forward_cached(x, h);
        Ok((c.out, c.h))
    }

    /// Unroll over `xs` from hidden state `h0`.
    pub fn forward_sequence(&self, xs: &[Vec<f64>], h0: &[f64]) -> Vec<StepCache> {
        let mut h = h0.to_vec();
        let mut caches = Vec::with_capacity(xs.len());
        for x in xs {
            let c = self.forward_cached(x, &h);
            h.clone_from(&c.h);
            caches.push(c);
        }
        caches
    }

    /// Backpropagation through time. `d_out[t]` is the loss gradient with
    /// respect to the output at step `t`; parameter gradients are added to
    /// `grad`. Returns the gradient with respect to the initial hidden state.
    pub fn backward_sequence(&self, caches: &[StepCache], d_out: &[Vec<f64>], grad: &mut [f64]) -> Vec<f64> {
        assert_eq!(caches.len(), d_out.len());
        assert_eq!(grad.len(), self.params.len());
        let s = self.sizes;
        let l = Layout::new(&s);
        let (i_n, h1, h2, h3, o) = (s.input, s.h1, s.h2, s.h3, s.output);
        let mut dh_next = vec![0.0; h2];
        let mut d_a3 = vec![0.0; h3];
        let mut dh = vec![0.0; h2];
        let mut d_cand = vec![0.0; h2];
        let mut d_az = vec![0.0; h2];
        let mut d_ar = vec![0.0; h2];
        let mut d_rh = vec![0.0; h2];
        let mut d_a1 = vec![0.0; h1];

        for (c, dout) in caches.iter().zip(d_out).rev() {
            // output layer
            d_a3.iter_mut().for_each(|v| *v = 0.0);
            {
                let (head, tail) = grad.split_at_mut(l.b4);
                affine_backward(
                    self.block(l.w4, o * h3),
                    &c.a3,
                    dout,
                    Some(&mut d_a3),
                    &mut head[l.w4..l.w4 + o * h3],
                    Some(&mut tail[..o]),
                );
            }
            for k in 0..h3 {
                d_a3[k] *= 1.0 - c.a3[k] * c.a3[k];
            }
            dh.copy_from_slice(&dh_next);
            {
                let (head, tail) = grad.split_at_mut(l.b3);
                affine_backward(
                    self.block(l.w3, h3 * h2),
                    &c.h,
                    &d_a3,
                    Some(&mut dh),
                    &mut head[l.w3..l.w3 + h3 * h2],
                    Some(&mut tail[..h3]),
                );
            }

            // recurrent layer
            for k in 0..h2 {
                let z = c.z[k];
                d_cand[k] = dh[k] * z * (1.0 - c.cand[k] * c.cand[k]);
                d_az[k] = dh[k] * (c.cand[k] - c.h_prev[k]) * z * (1.0 - z);
                dh_next[k] = dh[k] * (1.0 - z);
            }
            d_rh.iter_mut().for_each(|v| *v = 0.0);
            d_a1.iter_mut().for_each(|v| *v = 0.0);
            {
                let (head, tail) = grad.split_at_mut(l.bh);
                let (wh_part, uh_part) = head.split_at_mut(l.uh);
                affine_backward(
                    self.block(l.wh, h2 * h1),
                    &c.a1,
                    &d_cand,
                    Some(&mut d_a1),
                    &mut wh_part[l.wh..l.wh + h2 * h1],
                    Some(&mut tail[..h2]),
                );
                affine_backward(
                    self.block(l.uh, h2 * h2),
                    &c.rh,
                    &d_cand,
                    Some(&mut d_rh),
                    &mut uh_part[..h2 * h2],
                    None,
                );
            }
            for k in 0..h2 {
                let r = c.r[k];
                d_ar[k] = d_rh[k] * c.h_prev[k] * r * (1.0 - r);
                dh_next[k] += d_rh[k] * r;
            }
            for (w, u, b, d) in [(l.wz, l.uz, l.bz, &d_az), (l.wr, l.ur, l.br, &d_ar)] {
                let (head, tail) = grad.split_at_mut(b);
                let (w_part, u_part) = head.split_at_mut(u);
                affine_backward(
                    self.block(w, h2 * h1),
                    &c.a1,
                    d,
                    Some(&mut d_a1),
                    &mut w_part[w..w + h2 * h1],
                    Some(&mut tail[..h2]),
                );
                affine_backward(
                    self.block(u, h2 * h2),
                    &c.h_prev,
                    d,
                    Some(&mut dh_next),
                    &mut u_part[..h2 * h2],
                    None,
                );
            }

            // input layer
            for k in 0..h1 {
                d_a1[k] *= 1.0 - c.a1[k] * c.a1[k];
            }
            let (head, tail) = grad.split_at_mut(l.b1);
            affine_backward(
                self.block(l.w1, h1 * i_n),
                &c.x,
                &d_a1,
                None,
                &mut head[l.w1..l.w1 + h1 * i_n],
                Some(&mut tail[..h1]),
            );
        }
        dh_next
    }
}
