//! Multilayer perceptron parameters: Glorot initialization, forward passes,
//! flat-vector views for the optimizers, and a text checkpoint format with
//! byte-stable round trips.

use std::io::{BufRead, Write};

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

use super::rng::SplitMix64;

/// Dense network with tanh hidden layers and an identity output layer.
/// `weights[l]` maps activations of layer l (length `sizes[l]`) to layer
/// l + 1, stored as (sizes[l+1], sizes[l]).
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub sizes: Vec<usize>,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

/// Glorot-uniform initialization: weights in +-sqrt(6 / (fan_in + fan_out)),
/// zero biases, reproducible from the seed.
pub fn mlp_init(sizes: &[usize], seed: u64) -> Result<MlpParams> {
    if sizes.len() < 3 {
        return Err(Error::invalid("network needs at least one hidden layer"));
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::invalid("zero-width layer"));
    }
    let mut rng = SplitMix64::new(seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..sizes.len() - 1 {
        let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let w = Array2::from_shape_fn((fan_out, fan_in), |_| rng.uniform_symmetric(limit));
        weights.push(w);
        biases.push(Array1::zeros(fan_out));
    }
    Ok(MlpParams { sizes: sizes.to_vec(), weights, biases })
}

impl MlpParams {
    pub fn layer_count(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Affine-tanh composition with an identity output layer.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.input_dim() {
            return Err(Error::ShapeMismatch(format!(
                "input length {} != {}",
                input.len(),
                self.input_dim()
            )));
        }
        let mut a = Array1::from_vec(input.to_vec());
        let last = self.layer_count() - 1;
        for (l, (w, b)) in self.weights.iter().zip(self.biases.iter()).enumerate() {
            let mut z = w.dot(&a) + b;
            if l < last {
                z.mapv_inplace(f64::tanh);
            }
            a = z;
        }
        Ok(a.to_vec())
    }

    /// Batched forward pass over inputs stored column-wise (d0, batch).
    pub fn forward_batch(&self, input: &Array2<f64>) -> Result<Array2<f64>> {
        if input.nrows() != self.input_dim() {
            return Err(Error::ShapeMismatch("batch input rows mismatch".into()));
        }
        let mut a = input.clone();
        let last = self.layer_count() - 1;
        for (l, (w, b)) in self.weights.iter().zip(self.biases.iter()).enumerate() {
            let mut z = w.dot(&a);
            for mut col in z.columns_mut() {
                col += b;
            }
            if l < last {
                z.mapv_inplace(f64::tanh);
            }
            a = z;
        }
        Ok(a)
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (w, b) in self.weights.iter().zip(self.biases.iter()) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    pub fn assign_from_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::ShapeMismatch("flat parameter length mismatch".into()));
        }
        let mut k = 0usize;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            for v in w.iter_mut() {
                *v = flat[k];
                k += 1;
            }
            for v in b.iter_mut() {
                *v = flat[k];
                k += 1;
            }
        }
        Ok(())
    }

    /// Writes the checkpoint sections. Extra sections may precede `end`;
    /// values round-trip exactly (shortest-representation decimals).
    pub fn write_checkpoint<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "mlp-checkpoint v1")?;
        writeln!(
            out,
            "sizes {}",
            self.sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
        )?;
        for (l, (w, b)) in self.weights.iter().zip(self.biases.iter()).enumerate() {
            writeln!(out, "weights {} {} {}", l, w.nrows(), w.ncols())?;
            for row in w.rows() {
                let line = row.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ");
                writeln!(out, "{line}")?;
            }
            writeln!(out, "biases {} {}", l, b.len())?;
            let line = b.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(reader: &mut R) -> Result<Self> {
        let mut lines = Vec::new();
        let mut buf = String::new();
        while reader.read_line(&mut buf)? > 0 {
            lines.push(buf.trim_end().to_string());
            buf.clear();
        }
        Self::parse_checkpoint_lines(&mut lines.iter().map(|s| s.as_str()))
    }

    pub(crate) fn parse_checkpoint_lines<'a>(
        lines: &mut impl Iterator<Item = &'a str>,
    ) -> Result<Self> {
        let header = lines.next().ok_or_else(|| Error::Parse("empty checkpoint".into()))?;
        if header != "mlp-checkpoint v1" {
            return Err(Error::Parse(format!("unknown checkpoint header `{header}`")));
        }
        let sizes_line = lines.next().ok_or_else(|| Error::Parse("missing sizes".into()))?;
        let mut it = sizes_line.split_whitespace();
        if it.next() != Some("sizes") {
            return Err(Error::Parse("expected sizes line".into()));
        }
        let sizes: Vec<usize> = it
            .map(|t| t.parse().map_err(|_| Error::Parse("bad size".into())))
            .collect::<Result<_>>()?;
        if sizes.len() < 2 {
            return Err(Error::Parse("too few layer sizes".into()));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..sizes.len() - 1 {
            let head = lines.next().ok_or_else(|| Error::Parse("missing weights".into()))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "weights" || parts[1] != l.to_string() {
                return Err(Error::Parse(format!("bad weights header `{head}`")));
            }
            let rows: usize = parts[2].parse().map_err(|_| Error::Parse("bad rows".into()))?;
            let cols: usize = parts[3].parse().map_err(|_| Error::Parse("bad cols".into()))?;
            if rows != sizes[l + 1] || cols != sizes[l] {
                return Err(Error::Parse("weights shape mismatch".into()));
            }
            let mut w = Array2::zeros((rows, cols));
            for r in 0..rows {
                let line = lines.next().ok_or_else(|| Error::Parse("missing weight row".into()))?;
                let vals: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| Error::Parse("bad weight value".into())))
                    .collect::<Result<_>>()?;
                if vals.len() != cols {
                    return Err(Error::Parse("weight row length mismatch".into()));
                }
                for (c, v) in vals.into_iter().enumerate() {
                    w[(r, c)] = v;
                }
            }
            weights.push(w);
            let head = lines.next().ok_or_else(|| Error::Parse("missing biases".into()))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "biases" {
                return Err(Error::Parse("bad biases header".into()));
            }
            let len: usize = parts[2].parse().map_err(|_| Error::Parse("bad bias len".into()))?;
            if len != sizes[l + 1] {
                return Err(Error::Parse("bias length mismatch".into()));
            }
            let line = lines.next().ok_or_else(|| Error::Parse("missing bias row".into()))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse("bad bias value".into())))
                .collect::<Result<_>>()?;
            if vals.len() != len {
                return Err(Error::Parse("bias row length mismatch".into()));
            }
            biases.push(Array1::from_vec(vals));
        }
        Ok(MlpParams { sizes, weights, biases })
    }
}

/// Parameter-shaped gradient accumulator.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn zeros_like(params: &MlpParams) -> Self {
        Self {
            weights: params.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            biases: params.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(other.weights.iter()) {
            *a += b;
        }
        for (a, b) in self.biases.iter_mut().zip(other.biases.iter()) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            w.mapv_inplace(|v| v * factor);
        }
        for b in &mut self.biases {
            b.mapv_inplace(|v| v * factor);
        }
    }

    pub fn norm(&self) -> f64 {
        let mut acc = 0.0;
        for w in &self.weights {
            acc += w.iter().map(|v| v * v).sum::<f64>();
        }
        for b in &self.biases {
            acc += b.iter().map(|v| v * v).sum::<f64>();
        }
        acc.sqrt()
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(self.biases.iter()) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_gives_bitwise_identical_parameters() {
        let a = mlp_init(&[3, 16, 2], 99).unwrap();
        let b = mlp_init(&[3, 16, 2], 99).unwrap();
        for (wa, wb) in a.weights.iter().zip(b.weights.iter()) {
            for (x, y) in wa.iter().zip(wb.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        let c = mlp_init(&[3, 16, 2], 100).unwrap();
        assert!(a.weights[0] != c.weights[0]);
    }

    #[test]
    fn weights_respect_the_glorot_bound() {
        let p = mlp_init(&[7, 31, 4], 5).unwrap();
        for (l, w) in p.weights.iter().enumerate() {
            let limit = (6.0 / (p.sizes[l] + p.sizes[l + 1]) as f64).sqrt();
            for v in w.iter() {
                assert!(v.abs() <= limit);
            }
        }
        for b in &p.biases {
            assert!(b.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn empirical_weight_variance_matches_glorot() {
        // 10^4 draws from one (fan_in, fan_out) pair.
        let (fan_in, fan_out) = (100, 100);
        let p = mlp_init(&[fan_in, fan_out, 1], 42).unwrap();
        let w = &p.weights[0];
        let n = w.len() as f64;
        let mean: f64 = w.iter().sum::<f64>() / n;
        let var: f64 = w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let expect = 2.0 / (fan_in + fan_out) as f64;
        assert!(
            (var - expect).abs() / expect < 0.05,
            "variance {var:.5} vs {expect:.5}"
        );
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(mlp_init(&[3, 2], 0).is_err());
        assert!(mlp_init(&[3, 0, 2], 0).is_err());
    }

    #[test]
    fn zero_weights_pass_bias_through() {
        let mut p = mlp_init(&[2, 4, 3], 1).unwrap();
        for w in &mut p.weights {
            w.fill(0.0);
        }
        p.biases[1] = Array1::from_vec(vec![0.5, -1.0, 2.0]);
        let out = p.forward(&[3.0, -7.0]).unwrap();
        assert_eq!(out, vec![0.5, -1.0, 2.0]);
    }

    #[test]
    fn forward_matches_independent_straight_line_evaluation() {
        let p = mlp_init(&[3, 8, 5, 2], 77).unwrap();
        let x = [0.3, -1.2, 0.9];
        let got = p.forward(&x).unwrap();
        // Duplicate implementation with plain loops.
        let mut a: Vec<f64> = x.to_vec();
        for l in 0..p.weights.len() {
            let w = &p.weights[l];
            let mut z = vec![0.0; w.nrows()];
            for r in 0..w.nrows() {
                let mut acc = p.biases[l][r];
                for c in 0..w.ncols() {
                    acc += w[(r, c)] * a[c];
                }
                z[r] = if l + 1 < p.weights.len() { acc.tanh() } else { acc };
            }
            a = z;
        }
        for (g, e) in got.iter().zip(a.iter()) {
            assert!((g - e).abs() < 1e-14);
        }
    }

    #[test]
    fn batched_forward_agrees_with_pointwise() {
        let p = mlp_init(&[4, 9, 3], 3).unwrap();
        let batch = Array2::from_shape_fn((4, 6), |(i, j)| (i as f64 - j as f64) * 0.17);
        let out = p.forward_batch(&batch).unwrap();
        for j in 0..6 {
            let col: Vec<f64> = batch.column(j).to_vec();
            let single = p.forward(&col).unwrap();
            for i in 0..3 {
                assert!((out[(i, j)] - single[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn checkpoint_round_trips_byte_stable() {
        let p = mlp_init(&[3, 5, 2], 31415).unwrap();
        let mut bytes = Vec::new();
        p.write_checkpoint(&mut bytes).unwrap();
        let q = MlpParams::read_checkpoint(&mut std::io::BufReader::new(bytes.as_slice())).unwrap();
        assert_eq!(p, q);
        let mut bytes2 = Vec::new();
        q.write_checkpoint(&mut bytes2).unwrap();
        assert_eq!(bytes, bytes2);
    }

    #[test]
    fn flat_views_round_trip() {
        let p = mlp_init(&[2, 4, 1], 8).unwrap();
        let flat = p.flatten();
        assert_eq!(flat.len(), p.param_count());
        let mut q = mlp_init(&[2, 4, 1], 9).unwrap();
        q.assign_from_flat(&flat).unwrap();
        assert_eq!(p, q);
    }
}
