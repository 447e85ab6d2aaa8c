//! Every symbolic tensor of a gauge model, built once and shared by the
//! structure and verification layers.

use std::cell::RefCell;

use crate::error::Result;
use crate::expr::{Calculus, Expr};
use crate::hamilton::{bracket, effective_spec};
use crate::lagrange::LagrangianTensors;
use crate::legendre::PullbackMap;
use crate::model::ModelSpec;
use crate::structure::StructureTensors;
use crate::tensor::{IndexedExpr, Role};
use crate::verify::Verifier;

use Role::{Coord as I, Gauge as G};

/// Product of the factors, or `None` when one of them is zero.
pub(crate) fn prod(factors: &[&Expr]) -> Option<Expr> {
    if factors.iter().any(|f| f.is_zero()) {
        return None;
    }
    Some(Expr::mul(factors.iter().map(|f| (*f).clone()).collect()))
}

pub(crate) fn total(terms: impl IntoIterator<Item = Option<Expr>>) -> Expr {
    Expr::add(terms.into_iter().flatten().collect())
}

pub(crate) fn neg(e: Option<Expr>) -> Option<Expr> {
    e.map(|e| -e)
}

/// Phase-space functions of `(q, p)`: constraints, structure functions,
/// `H_c` and their brackets and partial derivatives.
#[derive(Clone, Debug)]
pub struct PhaseTensors {
    pub g: IndexedExpr,
    /// `[μ][i] = ∂G_μ/∂p_i`
    pub dg_dp: IndexedExpr,
    pub d2g_pp: IndexedExpr,
    pub d3g_ppp: IndexedExpr,
    /// `[μ][i][k] = ∂²G_μ/∂p_i∂q^k`
    pub d2g_pq: IndexedExpr,
    pub dg_dq: IndexedExpr,
    /// `[α][β][γ] = C_{αβ}^γ`
    pub c: IndexedExpr,
    pub dc_dp: IndexedExpr,
    pub dc_dq: IndexedExpr,
    pub hc: IndexedExpr,
    pub dhc_dp: IndexedExpr,
    pub dhc_dq: IndexedExpr,
    /// `{G_μ, G_ν}`
    pub gg: IndexedExpr,
    /// `{H_c, G_μ}`
    pub hcg: IndexedExpr,
    /// `{{G_α, G_β}, G_γ}`
    pub ggg: IndexedExpr,
    /// `{C_{αβ}^η, G_γ}`
    pub cg: IndexedExpr,
    /// `Σ_δ C_{αβ}^δ C_{γδ}^η`
    pub cc: IndexedExpr,
}

impl PhaseTensors {
    pub fn new(spec: &ModelSpec, calc: &mut Calculus) -> Self {
        let (n, m) = (spec.n(), spec.m());
        let co = &spec.coords;
        let g = IndexedExpr::from_fn(&[G], n, m, |ix| spec.constraints[ix[0]].expr.clone());
        let dg_dp = IndexedExpr::from_fn(&[G, I], n, m, |ix| calc.diff(g.get(&ix[..1]), &co.p(ix[1])));
        let d2g_pp = IndexedExpr::from_fn(&[G, I, I], n, m, |ix| calc.diff(dg_dp.get(&ix[..2]), &co.p(ix[2])));
        let d3g_ppp = IndexedExpr::from_fn(&[G, I, I, I], n, m, |ix| calc.diff(d2g_pp.get(&ix[..3]), &co.p(ix[3])));
        let d2g_pq = IndexedExpr::from_fn(&[G, I, I], n, m, |ix| calc.diff(dg_dp.get(&ix[..2]), &co.q(ix[2])));
        let dg_dq = IndexedExpr::from_fn(&[G, I], n, m, |ix| calc.diff(g.get(&ix[..1]), &co.q(ix[1])));
        let c = IndexedExpr::from_fn(&[G, G, G], n, m, |ix| spec.structure.get(ix[0], ix[1], ix[2]));
        let dc_dp = IndexedExpr::from_fn(&[G, G, G, I], n, m, |ix| calc.diff(c.get(&ix[..3]), &co.p(ix[3])));
        let dc_dq = IndexedExpr::from_fn(&[G, G, G, I], n, m, |ix| calc.diff(c.get(&ix[..3]), &co.q(ix[3])));
        let hc = IndexedExpr::from_fn(&[], n, m, |_| spec.hamiltonian.clone());
        let dhc_dp = IndexedExpr::from_fn(&[I], n, m, |ix| calc.diff(&spec.hamiltonian, &co.p(ix[0])));
        let dhc_dq = IndexedExpr::from_fn(&[I], n, m, |ix| calc.diff(&spec.hamiltonian, &co.q(ix[0])));
        let mut upper = IndexedExpr::zeros(&[G, G], n, m);
        for a in 0..m {
            for b in a + 1..m {
                upper.set(&[a, b], bracket(calc, g.get(&[a]), g.get(&[b])));
            }
        }
        let gg = IndexedExpr::from_fn(&[G, G], n, m, |ix| match ix[0].cmp(&ix[1]) {
            std::cmp::Ordering::Less => upper.get(ix).clone(),
            std::cmp::Ordering::Greater => -upper.get(&[ix[1], ix[0]]),
            std::cmp::Ordering::Equal => Expr::zero(),
        });
        let hcg = IndexedExpr::from_fn(&[G], n, m, |ix| bracket(calc, &spec.hamiltonian, g.get(ix)));
        let ggg = IndexedExpr::from_fn(&[G, G, G], n, m, |ix| bracket(calc, gg.get(&ix[..2]), g.get(&ix[2..])));
        let cg = IndexedExpr::from_fn(&[G, G, G, G], n, m, |ix| bracket(calc, c.get(&[ix[0], ix[1], ix[3]]), g.get(&[ix[2]])));
        let cc = IndexedExpr::from_fn(&[G, G, G, G], n, m, |ix| {
            total((0..m).map(|d| prod(&[c.get(&[ix[0], ix[1], d]), c.get(&[ix[2], d, ix[3]])])))
        });
        PhaseTensors { g, dg_dp, d2g_pp, d3g_ppp, d2g_pq, dg_dq, c, dc_dp, dc_dq, hc, dhc_dp, dhc_dq, gg, hcg, ggg, cg, cc }
    }
}

/// Pullbacks `FL*` of the phase-space tensors, functions of `(q, q̇)`.
#[derive(Clone, Debug)]
pub struct PulledTensors {
    pub g: IndexedExpr,
    pub dg_dq: IndexedExpr,
    /// Gauge generators `R_μ^i`.
    pub r: IndexedExpr,
    /// `b_μ^{ij} = FL*(∂²G_μ/∂p_i∂p_j)`
    pub b: IndexedExpr,
    pub g3: IndexedExpr,
    pub gqp: IndexedExpr,
    /// `T_{αβ}^γ = FL*C_{αβ}^γ`
    pub t: IndexedExpr,
    pub dc_dp: IndexedExpr,
    pub dc_dq: IndexedExpr,
    pub hc: IndexedExpr,
    pub dhc_dp: IndexedExpr,
    pub dhc_dq: IndexedExpr,
    pub gg: IndexedExpr,
    pub hcg: IndexedExpr,
    pub cg: IndexedExpr,
    pub cc: IndexedExpr,
}

impl PulledTensors {
    pub fn new(ph: &PhaseTensors, pm: &PullbackMap) -> Self {
        let f = |t: &IndexedExpr| pm.apply_all(t);
        PulledTensors {
            g: f(&ph.g),
            dg_dq: f(&ph.dg_dq),
            r: f(&ph.dg_dp),
            b: f(&ph.d2g_pp),
            g3: f(&ph.d3g_ppp),
            gqp: f(&ph.d2g_pq),
            t: f(&ph.c),
            dc_dp: f(&ph.dc_dp),
            dc_dq: f(&ph.dc_dq),
            hc: f(&ph.hc),
            dhc_dp: f(&ph.dhc_dp),
            dhc_dq: f(&ph.dhc_dq),
            gg: f(&ph.gg),
            hcg: f(&ph.hcg),
            cg: f(&ph.cg),
            cc: f(&ph.cc),
        }
    }
}

/// Jet-space derivatives of pulled-back tensors.
#[derive(Clone, Debug)]
pub struct Kinematics {
    /// `[μ][i][k] = ∂R_μ^i/∂q^k`
    pub dr_dq: IndexedExpr,
    pub dr_dv: IndexedExpr,
    /// `dR_μ^i/dt`
    pub r_dot: IndexedExpr,
    pub dt_dq: IndexedExpr,
    pub dt_dv: IndexedExpr,
    /// `[l][m][k] = ∂W_{lm}/∂q̇^k`
    pub dw_dv: IndexedExpr,
    /// `d/dt (∂R_μ^i/∂q̇^k)`
    pub dr_dv_dot: IndexedExpr,
}

/// Adds a trailing coordinate index holding `∂/∂(family k)`.
pub(crate) fn grad(calc: &mut Calculus, t: &IndexedExpr, family: &[crate::expr::Symbol]) -> IndexedExpr {
    let mut roles = t.roles().to_vec();
    roles.push(I);
    let r = t.shape().len();
    let m = t.roles().iter().zip(t.shape()).find(|(r, _)| **r == G).map_or(0, |(_, d)| *d);
    IndexedExpr::from_fn(&roles, family.len(), m, |ix| calc.diff(t.get(&ix[..r]), &family[ix[r]]))
}

pub(crate) fn time_derivative(calc: &mut Calculus, t: &IndexedExpr) -> Result<IndexedExpr> {
    let mut out = t.clone();
    let mut err = None;
    t.for_each(|ix, e| match calc.time_derivative(e) {
        Ok(d) => out.set(ix, d),
        Err(e) => err = Some(e),
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

/// A model with its rebase applied and all shared tensors precomputed.
pub struct GaugeSystem {
    pub spec: ModelSpec,
    pub pm: PullbackMap,
    pub lag: LagrangianTensors,
    pub phase: PhaseTensors,
    pub pulled: PulledTensors,
    pub kin: Kinematics,
    calc: RefCell<Calculus>,
}

impl GaugeSystem {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        Self::with_pullback(spec, PullbackMap::from_spec(spec))
    }

    /// Uses `pm` in place of the Lagrangian's own fiber derivative.
    pub fn with_pullback(spec: &ModelSpec, pm: PullbackMap) -> Result<Self> {
        let spec = effective_spec(spec)?;
        let mut calc = Calculus::new();
        let lag = LagrangianTensors::new(&spec, &mut calc);
        let phase = PhaseTensors::new(&spec, &mut calc);
        let pulled = PulledTensors::new(&phase, &pm);
        let q = spec.coords.family(crate::expr::SymbolKind::Coordinate);
        let v = spec.coords.family(crate::expr::SymbolKind::Velocity);
        let dr_dq = grad(&mut calc, &pulled.r, &q);
        let dr_dv = grad(&mut calc, &pulled.r, &v);
        let kin = Kinematics {
            r_dot: time_derivative(&mut calc, &pulled.r)?,
            dt_dq: grad(&mut calc, &pulled.t, &q),
            dt_dv: grad(&mut calc, &pulled.t, &v),
            dw_dv: grad(&mut calc, &lag.hessian, &v),
            dr_dv_dot: time_derivative(&mut calc, &dr_dv)?,
            dr_dq,
            dr_dv,
        };
        Ok(GaugeSystem { spec, pm, lag, phase, pulled, kin, calc: RefCell::new(calc) })
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn m(&self) -> usize {
        self.spec.m()
    }

    pub(crate) fn with_calculus<T>(&self, f: impl FnOnce(&mut Calculus) -> T) -> T {
        f(&mut self.calc.borrow_mut())
    }

    pub fn structure_tensors(&self) -> Result<StructureTensors> {
        StructureTensors::compute(self)
    }

    /// Compiled evaluator for the model's own structure tensors.
    pub fn verifier(&self) -> Result<Verifier> {
        Verifier::new(self, &self.structure_tensors()?)
    }
}
