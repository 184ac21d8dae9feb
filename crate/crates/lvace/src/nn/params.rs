//! Parameter containers shared by the three network kinds.
//!
//! Parameters (and their gradients, which reuse the same types) can be
//! flattened into a single `Vec<f64>` in a fixed order; the optimizers and
//! the finite-difference checks work on that flat view.

use ndarray::{Array1, Array2};

/// A fully-connected layer: `w` is out x in.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Dense {
    pub fn zeros(out: usize, inp: usize) -> Self {
        Dense {
            w: Array2::zeros((out, inp)),
            b: Array1::zeros(out),
        }
    }
}

/// One LSTM direction. Gate blocks are stacked along the first axis in the
/// order input gate, forget gate, input port, output gate (i, f, g, o):
/// `wx` is 4W x D, `wh` is 4W x W, `b` is 4W. The optional peephole vectors
/// (diagonal, length W) let the gates see the cell state.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmLayer {
    pub wx: Array2<f64>,
    pub wh: Array2<f64>,
    pub b: Array1<f64>,
    pub peepholes: Option<Peepholes>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Peepholes {
    pub input: Array1<f64>,
    pub forget: Array1<f64>,
    pub output: Array1<f64>,
}

impl LstmLayer {
    pub fn zeros(width: usize, input_dim: usize, peepholes: bool) -> Self {
        LstmLayer {
            wx: Array2::zeros((4 * width, input_dim)),
            wh: Array2::zeros((4 * width, width)),
            b: Array1::zeros(4 * width),
            peepholes: peepholes.then(|| Peepholes {
                input: Array1::zeros(width),
                forget: Array1::zeros(width),
                output: Array1::zeros(width),
            }),
        }
    }
}

/// All parameters of one network.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Feedforward { hidden: Vec<Dense>, out: Dense },
    Blstm { fw: LstmLayer, bw: LstmLayer, out: Dense },
}

impl Params {
    /// A same-shaped, all-zero copy (the gradient accumulator).
    pub fn zeros_like(&self) -> Params {
        match self {
            Params::Feedforward { hidden, out } => Params::Feedforward {
                hidden: hidden
                    .iter()
                    .map(|d| Dense::zeros(d.w.nrows(), d.w.ncols()))
                    .collect(),
                out: Dense::zeros(out.w.nrows(), out.w.ncols()),
            },
            Params::Blstm { fw, bw, out } => Params::Blstm {
                fw: LstmLayer::zeros(fw.wh.ncols(), fw.wx.ncols(), fw.peepholes.is_some()),
                bw: LstmLayer::zeros(bw.wh.ncols(), bw.wx.ncols(), bw.peepholes.is_some()),
                out: Dense::zeros(out.w.nrows(), out.w.ncols()),
            },
        }
    }

    /// Named tensors in serialization order: `(name, dims, values)`.
    pub fn tensors(&self) -> Vec<(String, Vec<usize>, Vec<f64>)> {
        let dense = |prefix: &str, d: &Dense| {
            vec![
                (
                    format!("{prefix}.w"),
                    vec![d.w.nrows(), d.w.ncols()],
                    d.w.iter().copied().collect::<Vec<f64>>(),
                ),
                (format!("{prefix}.b"), vec![d.b.len()], d.b.to_vec()),
            ]
        };
        let lstm = |prefix: &str, l: &LstmLayer| {
            let mut v = vec![
                (
                    format!("{prefix}.wx"),
                    vec![l.wx.nrows(), l.wx.ncols()],
                    l.wx.iter().copied().collect::<Vec<f64>>(),
                ),
                (
                    format!("{prefix}.wh"),
                    vec![l.wh.nrows(), l.wh.ncols()],
                    l.wh.iter().copied().collect::<Vec<f64>>(),
                ),
                (format!("{prefix}.b"), vec![l.b.len()], l.b.to_vec()),
            ];
            if let Some(p) = &l.peepholes {
                v.push((format!("{prefix}.pi"), vec![p.input.len()], p.input.to_vec()));
                v.push((format!("{prefix}.pf"), vec![p.forget.len()], p.forget.to_vec()));
                v.push((format!("{prefix}.po"), vec![p.output.len()], p.output.to_vec()));
            }
            v
        };
        match self {
            Params::Feedforward { hidden, out } => {
                let mut v = Vec::new();
                for (i, d) in hidden.iter().enumerate() {
                    v.extend(dense(&format!("hidden{i}"), d));
                }
                v.extend(dense("out", out));
                v
            }
            Params::Blstm { fw, bw, out } => {
                let mut v = lstm("fw", fw);
                v.extend(lstm("bw", bw));
                v.extend(dense("out", out));
                v
            }
        }
    }

    /// Total parameter count.
    pub fn len(&self) -> usize {
        self.tensors().iter().map(|(_, _, v)| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All values concatenated in serialization order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for (_, _, v) in self.tensors() {
            out.extend(v);
        }
        out
    }

    /// Writes a flat vector (from [`to_flat`](Self::to_flat)) back into the
    /// parameter tensors.
    pub fn assign_flat(&mut self, flat: &[f64]) {
        let mut cursor = 0;
        self.for_each_value_mut(|v| {
            *v = flat[cursor];
            cursor += 1;
        });
        assert_eq!(cursor, flat.len(), "flat length mismatch");
    }

    /// Visits every parameter value mutably, in serialization order.
    pub fn for_each_value_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        let mut dense = |d: &mut Dense, f: &mut dyn FnMut(&mut f64)| {
            for v in d.w.iter_mut() {
                f(v);
            }
            for v in d.b.iter_mut() {
                f(v);
            }
        };
        match self {
            Params::Feedforward { hidden, out } => {
                for d in hidden {
                    dense(d, &mut f);
                }
                dense(out, &mut f);
            }
            Params::Blstm { fw, bw, out } => {
                for l in [fw, bw] {
                    for v in l.wx.iter_mut() {
                        f(v);
                    }
                    for v in l.wh.iter_mut() {
                        f(v);
                    }
                    for v in l.b.iter_mut() {
                        f(v);
                    }
                    if let Some(p) = &mut l.peepholes {
                        for v in p.input.iter_mut() {
                            f(v);
                        }
                        for v in p.forget.iter_mut() {
                            f(v);
                        }
                        for v in p.output.iter_mut() {
                            f(v);
                        }
                    }
                }
                dense(out, &mut f);
            }
        }
    }

    /// True when every value is finite.
    pub fn all_finite(&self) -> bool {
        self.to_flat().iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip_preserves_order() {
        let mut p = Params::Blstm {
            fw: LstmLayer::zeros(3, 5, true),
            bw: LstmLayer::zeros(3, 5, true),
            out: Dense::zeros(4, 6),
        };
        let n = p.len();
        let flat: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        p.assign_flat(&flat);
        assert_eq!(p.to_flat(), flat);
        let z = p.zeros_like();
        assert_eq!(z.len(), n);
        assert!(z.to_flat().iter().all(|&v| v == 0.0));
    }
}
