use std::collections::HashMap;

use super::{Expr, ExprError, Func, Kind, Symbol};

/// Numeric values for symbols.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    values: HashMap<Symbol, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, s: Symbol, value: f64) -> &mut Self {
        self.values.insert(s, value);
        self
    }

    pub fn with(mut self, s: Symbol, value: f64) -> Self {
        self.values.insert(s, value);
        self
    }

    pub fn get(&self, s: &Symbol) -> Option<f64> {
        self.values.get(s).copied()
    }
}

impl FromIterator<(Symbol, f64)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (Symbol, f64)>>(iter: I) -> Self {
        Bindings { values: iter.into_iter().collect() }
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Const(f64),
    Input(u32),
    Add(u32, u32),
    Mul(u32, u32),
    PowInt(u32, i32),
    PowHalf(u32, i32),
    PowReal(u32, f64),
    Func(Func, u32),
}

/// A set of expressions compiled into one deduplicated, topologically
/// ordered instruction list.
///
/// Structurally equal subtrees are evaluated once per call regardless of how
/// many outputs share them.
#[derive(Clone, Debug)]
pub struct Tape {
    inputs: Vec<Symbol>,
    ops: Vec<Op>,
    args: Vec<u32>,
    outputs: Vec<u32>,
    nodes: Vec<Expr>,
}

impl Tape {
    /// Compiles `outputs` as functions of `inputs`. Any other free symbol is
    /// reported as unbound.
    pub fn compile(outputs: &[Expr], inputs: &[Symbol]) -> Result<Tape, ExprError> {
        let input_slot: HashMap<&Symbol, u32> = inputs.iter().enumerate().map(|(i, s)| (s, i as u32)).collect();
        let mut tape = Tape { inputs: inputs.to_vec(), ops: Vec::new(), args: Vec::new(), outputs: Vec::new(), nodes: Vec::new() };
        let mut slot: HashMap<Expr, u32> = HashMap::new();
        let mut by_ptr: HashMap<usize, u32> = HashMap::new();
        for out in outputs {
            let mut stack: Vec<(Expr, bool)> = vec![(out.clone(), false)];
            while let Some((e, expanded)) = stack.pop() {
                if by_ptr.contains_key(&e.node_id()) {
                    continue;
                }
                if let Some(&i) = slot.get(&e) {
                    by_ptr.insert(e.node_id(), i);
                    continue;
                }
                let children: Vec<Expr> = match e.kind() {
                    Kind::Add(xs) | Kind::Mul(xs) => xs.to_vec(),
                    Kind::Pow(b, _) | Kind::Func(_, b) => vec![b.clone()],
                    _ => Vec::new(),
                };
                if !expanded {
                    stack.push((e, true));
                    stack.extend(children.into_iter().map(|c| (c, false)));
                    continue;
                }
                let idx = |c: &Expr| by_ptr[&c.node_id()];
                let op = match e.kind() {
                    Kind::Const(c) => Op::Const(c.to_f64()),
                    Kind::Symbol(s) => match input_slot.get(s) {
                        Some(&i) => Op::Input(i),
                        None => return Err(ExprError::Unbound(s.name())),
                    },
                    Kind::Add(xs) | Kind::Mul(xs) => {
                        let start = tape.args.len() as u32;
                        tape.args.extend(xs.iter().map(idx));
                        if matches!(e.kind(), Kind::Add(_)) {
                            Op::Add(start, xs.len() as u32)
                        } else {
                            Op::Mul(start, xs.len() as u32)
                        }
                    }
                    Kind::Pow(b, r) => {
                        if r.is_integer() {
                            Op::PowInt(idx(b), r.numer() as i32)
                        } else if r.denom() == 2 {
                            Op::PowHalf(idx(b), r.numer() as i32)
                        } else {
                            Op::PowReal(idx(b), r.to_f64())
                        }
                    }
                    Kind::Func(f, a) => Op::Func(*f, idx(a)),
                };
                let i = tape.ops.len() as u32;
                tape.ops.push(op);
                tape.nodes.push(e.clone());
                by_ptr.insert(e.node_id(), i);
                slot.insert(e, i);
            }
            tape.outputs.push(by_ptr[&out.node_id()]);
        }
        Ok(tape)
    }

    pub fn inputs(&self) -> &[Symbol] {
        &self.inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Number of distinct instructions.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Evaluates all outputs; `scratch` is reused between calls.
    pub fn eval_into(&self, inputs: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) -> Result<(), ExprError> {
        assert_eq!(inputs.len(), self.inputs.len(), "tape input arity");
        scratch.clear();
        scratch.reserve(self.ops.len());
        for (pos, op) in self.ops.iter().enumerate() {
            let val = |i: &u32| scratch[*i as usize];
            let x = match op {
                Op::Const(c) => *c,
                Op::Input(i) => inputs[*i as usize],
                Op::Add(s, n) => self.args[*s as usize..(*s + *n) as usize].iter().map(val).sum(),
                Op::Mul(s, n) => self.args[*s as usize..(*s + *n) as usize].iter().map(val).product(),
                Op::PowInt(b, k) => val(b).powi(*k),
                Op::PowHalf(b, k) => {
                    let b = val(b);
                    if b < 0.0 {
                        return Err(self.domain(pos));
                    }
                    b.sqrt().powi(*k)
                }
                Op::PowReal(b, r) => {
                    let b = val(b);
                    if b < 0.0 {
                        return Err(self.domain(pos));
                    }
                    b.powf(*r)
                }
                Op::Func(f, a) => {
                    let a = val(a);
                    match f {
                        Func::Sin => a.sin(),
                        Func::Cos => a.cos(),
                        Func::Exp => a.exp(),
                        Func::Ln => {
                            if a <= 0.0 {
                                return Err(self.domain(pos));
                            }
                            a.ln()
                        }
                    }
                }
            };
            if !x.is_finite() {
                if inputs.iter().all(|v| v.is_finite()) {
                    return Err(self.domain(pos));
                }
                return Err(ExprError::NonFiniteInput);
            }
            scratch.push(x);
        }
        for (o, &i) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[i as usize];
        }
        Ok(())
    }

    pub fn eval(&self, inputs: &[f64]) -> Result<Vec<f64>, ExprError> {
        let mut scratch = Vec::new();
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(inputs, &mut scratch, &mut out)?;
        Ok(out)
    }

    fn domain(&self, pos: usize) -> ExprError {
        ExprError::Domain { subtree: self.nodes[pos].clone() }
    }
}

/// Evaluates one expression under `bindings`.
pub fn evaluate(e: &Expr, bindings: &Bindings) -> Result<f64, ExprError> {
    let symbols: Vec<Symbol> = e.free_symbols().into_iter().collect();
    let mut values = Vec::with_capacity(symbols.len());
    for s in &symbols {
        values.push(bindings.get(s).ok_or_else(|| ExprError::Unbound(s.name()))?);
    }
    Ok(Tape::compile(std::slice::from_ref(e), &symbols)?.eval(&values)?[0])
}
