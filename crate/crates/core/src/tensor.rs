//! Dense multi-index arrays: symbolic ([`IndexedExpr`]) and numeric
//! ([`NumTensor`]).

use std::fmt;

use serde::Serialize;

use crate::expr::{Expr, Tape};

/// What an index ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    /// `i, j, k ∈ 1..n`
    Coord,
    /// `α, β, μ ∈ 1..m`
    Gauge,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.contains(&0) {
        return;
    }
    let mut idx = vec![0; shape.len()];
    loop {
        f(&idx);
        let mut k = shape.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Dense row-major array of expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedExpr {
    roles: Vec<Role>,
    shape: Vec<usize>,
    entries: Vec<Expr>,
}

impl IndexedExpr {
    pub fn from_fn(roles: &[Role], n: usize, m: usize, mut f: impl FnMut(&[usize]) -> Expr) -> Self {
        let shape: Vec<usize> = roles.iter().map(|r| if *r == Role::Coord { n } else { m }).collect();
        let mut entries = Vec::with_capacity(shape.iter().product());
        for_each_index(&shape, |ix| entries.push(f(ix)));
        IndexedExpr { roles: roles.to_vec(), shape, entries }
    }

    pub fn zeros(roles: &[Role], n: usize, m: usize) -> Self {
        Self::from_fn(roles, n, m, |_| Expr::zero())
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn entries(&self) -> &[Expr] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.shape.len(), "index rank");
        idx.iter().zip(strides(&self.shape)).map(|(i, s)| i * s).sum()
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.entries[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], e: Expr) {
        let k = self.offset(idx);
        self.entries[k] = e;
    }

    pub fn map(&self, f: impl FnMut(&Expr) -> Expr) -> IndexedExpr {
        IndexedExpr { roles: self.roles.clone(), shape: self.shape.clone(), entries: self.entries.iter().map(f).collect() }
    }

    /// Every entry is the zero constant.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Expr::is_zero)
    }

    /// Calls `f` with each multi-index and entry.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], &Expr)) {
        let mut k = 0;
        for_each_index(&self.shape, |ix| {
            f(ix, &self.entries[k]);
            k += 1;
        });
    }
}

impl fmt::Display for IndexedExpr {
    /// One `[i][j]… = expr` line per nonzero entry, indices 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        let mut res = Ok(());
        self.for_each(|ix, e| {
            if !e.is_zero() && res.is_ok() {
                any = true;
                let label: String = ix.iter().map(|i| format!("[{}]", i + 1)).collect();
                res = writeln!(f, "{label} = {e}");
            }
        });
        res?;
        if !any {
            writeln!(f, "(all entries 0)")?;
        }
        Ok(())
    }
}

/// Dense row-major array of floats.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumTensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl NumTensor {
    pub fn zeros(shape: &[usize]) -> Self {
        NumTensor { shape: shape.to_vec(), data: vec![0.0; shape.iter().product()] }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), data.len(), "tensor data length");
        NumTensor { shape: shape.to_vec(), data }
    }

    pub fn vector(data: &[f64]) -> Self {
        NumTensor::from_vec(&[data.len()], data.to_vec())
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        let s = strides(&self.shape);
        self.data[idx.iter().zip(&s).map(|(i, s)| i * s).sum::<usize>()]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, c: f64) -> NumTensor {
        NumTensor { shape: self.shape.clone(), data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn plus(&self, other: &NumTensor) -> NumTensor {
        assert_eq!(self.shape, other.shape);
        NumTensor { shape: self.shape.clone(), data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    /// Reorders axes: output axis `k` is input axis `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> NumTensor {
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let src = strides(&self.shape);
        let mut data = Vec::with_capacity(self.data.len());
        for_each_index(&shape, |ix| {
            let off: usize = ix.iter().zip(perm).map(|(i, &p)| i * src[p]).sum();
            data.push(self.data[off]);
        });
        NumTensor { shape, data }
    }

    /// `X[a,b,c,…] + X[b,c,a,…] + X[c,a,b,…]` over the first three axes.
    pub fn cyclic(&self) -> NumTensor {
        let r = self.shape.len();
        let mut p1: Vec<usize> = vec![1, 2, 0];
        let mut p2: Vec<usize> = vec![2, 0, 1];
        p1.extend(3..r);
        p2.extend(3..r);
        self.plus(&self.permute(&p1)).plus(&self.permute(&p2))
    }

    /// Evaluates every entry of `e` from a tape output slice.
    pub fn from_outputs(shape: &[usize], values: &[f64]) -> Self {
        NumTensor::from_vec(shape, values.to_vec())
    }
}

/// Index-notation contraction, e.g. `einsum("uij,vj->uvi", &[&a, &b])`.
/// Repeated letters absent from the output are summed.
pub fn einsum(spec: &str, ops: &[&NumTensor]) -> NumTensor {
    let (lhs, out) = spec.split_once("->").expect("einsum spec needs ->");
    let inputs: Vec<&[u8]> = lhs.split(',').map(str::as_bytes).collect();
    assert_eq!(inputs.len(), ops.len(), "einsum operand count");
    let mut letters: Vec<u8> = Vec::new();
    let mut dims: Vec<usize> = Vec::new();
    for (sub, t) in inputs.iter().zip(ops) {
        assert_eq!(sub.len(), t.shape.len(), "einsum rank mismatch in {spec}");
        for (&c, &d) in sub.iter().zip(&t.shape) {
            match letters.iter().position(|&l| l == c) {
                Some(k) => assert_eq!(dims[k], d, "einsum dimension mismatch for `{}`", c as char),
                None => {
                    letters.push(c);
                    dims.push(d);
                }
            }
        }
    }
    let pos = |c: u8| letters.iter().position(|&l| l == c).expect("output letter not in inputs");
    let out_axes: Vec<usize> = out.bytes().map(pos).collect();
    let out_shape: Vec<usize> = out_axes.iter().map(|&k| dims[k]).collect();
    let out_strides = strides(&out_shape);
    let op_axes: Vec<Vec<(usize, usize)>> = inputs
        .iter()
        .zip(ops)
        .map(|(sub, t)| sub.iter().zip(strides(&t.shape)).map(|(&c, s)| (pos(c), s)).collect())
        .collect();
    let mut result = NumTensor::zeros(&out_shape);
    for_each_index(&dims, |ix| {
        let mut prod = 1.0;
        for (axes, t) in op_axes.iter().zip(ops) {
            let off: usize = axes.iter().map(|&(k, s)| ix[k] * s).sum();
            prod *= t.data[off];
            if prod == 0.0 {
                return;
            }
        }
        let o: usize = out_axes.iter().zip(&out_strides).map(|(&k, s)| ix[k] * s).sum();
        result.data[o] += prod;
    });
    result
}

/// Flattens several symbolic tensors into one tape and slices results back.
pub struct TensorBundle {
    tape: Tape,
    layout: Vec<(usize, Vec<usize>)>,
}

impl TensorBundle {
    pub fn compile(tensors: &[&IndexedExpr], inputs: &[crate::expr::Symbol]) -> Result<Self, crate::expr::ExprError> {
        let mut all = Vec::new();
        let mut layout = Vec::new();
        for t in tensors {
            layout.push((all.len(), t.shape().to_vec()));
            all.extend(t.entries().iter().cloned());
        }
        Ok(TensorBundle { tape: Tape::compile(&all, inputs)?, layout })
    }

    pub fn tape(&self) -> &Tape {
        &self.tape
    }

    pub fn eval(&self, inputs: &[f64], scratch: &mut Vec<f64>) -> Result<Vec<NumTensor>, crate::expr::ExprError> {
        let mut out = vec![0.0; self.tape.num_outputs()];
        self.tape.eval_into(inputs, scratch, &mut out)?;
        Ok(self
            .layout
            .iter()
            .map(|(start, shape)| {
                let len: usize = shape.iter().product();
                NumTensor::from_vec(shape, out[*start..start + len].to_vec())
            })
            .collect())
    }
}
