//! Central finite differences against every symbolic derivative family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::residual::Scale;
use super::{jet_input, jet_symbols, phase_symbols, CheckResult};
use crate::error::{Error, Result};
use crate::expr::{Expr, ExprError, Tape};
use crate::model::{sample_points, ModelSpec};
use crate::system::GaugeSystem;
use crate::tensor::IndexedExpr;

/// Relative agreement required between symbolic and FD values.
pub const FD_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Space {
    /// `(q, q̇, q̈)`; only `q` and `q̇` are perturbed.
    Jet,
    /// `(q, p)` at `p = FL(q, q̇)`.
    Phase,
}

/// Which block of the input vector a derivative index runs over: `q`, or
/// `q̇` / `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Block {
    First,
    Second,
}

/// `deriv[ix, k] = ∂ base[ix] / ∂x_k`. Second derivatives use the
/// symbolic first derivative as base, itself checked by its own family.
pub struct Family {
    pub name: &'static str,
    space: Space,
    base: IndexedExpr,
    deriv: IndexedExpr,
    wrt: Block,
}

impl Family {
    pub fn len(&self) -> usize {
        self.deriv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deriv.is_empty()
    }
}

fn scalar(e: &Expr) -> IndexedExpr {
    IndexedExpr::from_fn(&[], 0, 0, |_| e.clone())
}

/// Every derivative family the structure tensors are built from.
pub fn oracle_families(sys: &GaugeSystem) -> Result<Vec<Family>> {
    use Block::{First as Q, Second as V};
    let st = sys.structure_tensors()?;
    let (l, ph, pu, k) = (&sys.lag, &sys.phase, &sys.pulled, &sys.kin);
    let lag = scalar(&sys.spec.lagrangian);
    let f = |name, space, base: &IndexedExpr, deriv: &IndexedExpr, wrt: Block| Family { name, space, base: base.clone(), deriv: deriv.clone(), wrt };
    Ok(vec![
        f("dL/dq", Space::Jet, &lag, &l.dl_dq, Q),
        f("dL/dv", Space::Jet, &lag, &l.momenta, V),
        f("W", Space::Jet, &l.momenta, &l.hessian, V),
        f("d2L/dvdq", Space::Jet, &l.momenta, &l.mixed, Q),
        f("dW/dv", Space::Jet, &l.hessian, &k.dw_dv, V),
        f("dR/dq", Space::Jet, &pu.r, &k.dr_dq, Q),
        f("dR/dv", Space::Jet, &pu.r, &k.dr_dv, V),
        f("dT/dq", Space::Jet, &pu.t, &k.dt_dq, Q),
        f("dT/dv", Space::Jet, &pu.t, &k.dt_dv, V),
        f("dE/dq", Space::Jet, &st.e, &st.de_dq, Q),
        f("dE/dv", Space::Jet, &st.e, &st.de_dv, V),
        f("dG/dq", Space::Phase, &ph.g, &ph.dg_dq, Q),
        f("dG/dp", Space::Phase, &ph.g, &ph.dg_dp, V),
        f("d2G/dpdp", Space::Phase, &ph.dg_dp, &ph.d2g_pp, V),
        f("d3G/dp3", Space::Phase, &ph.d2g_pp, &ph.d3g_ppp, V),
        f("d2G/dpdq", Space::Phase, &ph.dg_dp, &ph.d2g_pq, Q),
        f("dC/dq", Space::Phase, &ph.c, &ph.dc_dq, Q),
        f("dC/dp", Space::Phase, &ph.c, &ph.dc_dp, V),
        f("dHc/dq", Space::Phase, &ph.hc, &ph.dhc_dq, Q),
        f("dHc/dp", Space::Phase, &ph.hc, &ph.dhc_dp, V),
    ])
}

/// A deliberate error injected into one symbolic entry.
#[derive(Clone, Debug, PartialEq)]
pub struct Corruption {
    pub family: String,
    pub entry: usize,
    /// Added as `amount · max(1, |value|)`.
    pub amount: f64,
}

impl Corruption {
    /// Picks an entry of `family` at random.
    pub fn seeded(family: &str, len: usize, amount: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Corruption { family: family.to_string(), entry: rng.gen_range(0..len.max(1)), amount }
    }
}

fn step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

struct Compiled<'a> {
    fam: &'a Family,
    base: Tape,
    deriv: Tape,
}

fn offset(b: Block, n: usize) -> usize {
    match b {
        Block::First => 0,
        Block::Second => n,
    }
}

/// Central differences at step `scale · h`.
fn central(c: &Compiled, n: usize, x: &[f64], scale: f64) -> Result<Vec<f64>> {
    let blen = c.base.num_outputs();
    let mut out = vec![0.0; blen * n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let var = offset(c.fam.wrt, n) + i;
        let h = scale * step(x[var]);
        xp[var] = x[var] + h;
        let fp = c.base.eval(&xp)?;
        xp[var] = x[var] - h;
        let fm = c.base.eval(&xp)?;
        xp[var] = x[var];
        for e in 0..blen {
            out[e * n + i] = (fp[e] - fm[e]) / (2.0 * h);
        }
    }
    Ok(out)
}

/// Largest disagreement allowed between the `h` and `2h` estimates before
/// a point is considered too close to a singularity to difference.
pub const STENCIL_CONSISTENCY: f64 = 1e-3;

/// FD estimates of every `deriv` entry at `x`, in storage order: central
/// differences at `h` and `2h` combined to cancel the `h²` error term.
/// `None` when the stencil leaves the domain or the two estimates disagree
/// by more than [`STENCIL_CONSISTENCY`].
fn fd_values(c: &Compiled, n: usize, x: &[f64]) -> Result<Option<Vec<f64>>> {
    let attempt = |scale| match central(c, n, x, scale) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Expr(ExprError::Domain { .. })) => Ok(None),
        Err(e) => Err(e),
    };
    let (Some(fine), Some(coarse)) = (attempt(1.0)?, attempt(2.0)?) else {
        return Ok(None);
    };
    if fine.iter().zip(&coarse).any(|(f, g)| (f - g).abs() > STENCIL_CONSISTENCY * f.abs().max(1.0)) {
        return Ok(None);
    }
    Ok(Some(fine.iter().zip(coarse).map(|(f, g)| (4.0 * f - g) / 3.0).collect()))
}

/// Checks every family at `count` sampled points.
pub fn fd_oracle(spec: &ModelSpec, seed: u64, count: usize) -> Result<Vec<CheckResult>> {
    fd_oracle_corrupted(spec, seed, count, None)
}

pub fn fd_oracle_corrupted(spec: &ModelSpec, seed: u64, count: usize, corruption: Option<&Corruption>) -> Result<Vec<CheckResult>> {
    let sys = GaugeSystem::new(spec)?;
    let families = oracle_families(&sys)?;
    let points = sample_points(spec, count, seed)?;
    let n = spec.n();
    let jet = jet_symbols(&spec.coords);
    let phase = phase_symbols(&spec.coords);
    let fl = Tape::compile(sys.lag.momenta.entries(), &jet)?;
    let compiled: Vec<Compiled> = families
        .iter()
        .map(|fam| {
            let inputs = if fam.space == Space::Jet { &jet } else { &phase };
            Ok(Compiled { fam, base: Tape::compile(fam.base.entries(), inputs)?, deriv: Tape::compile(fam.deriv.entries(), inputs)? })
        })
        .collect::<Result<_>>()?;
    let mut worst = vec![0.0f64; families.len()];
    let mut evaluated = vec![0usize; families.len()];
    for p in &points {
        let xj = jet_input(p);
        let mut xp = p.q.clone();
        xp.extend(fl.eval(&xj)?);
        for ((w, used), c) in worst.iter_mut().zip(&mut evaluated).zip(&compiled) {
            let x = if c.fam.space == Space::Jet { &xj } else { &xp };
            let mut sym = c.deriv.eval(x)?;
            if let Some(cor) = corruption.filter(|cor| cor.family == c.fam.name) {
                let at = cor.entry % sym.len().max(1);
                let v = &mut sym[at];
                *v += cor.amount * v.abs().max(1.0);
            }
            let Some(fd) = fd_values(c, n, x)? else { continue };
            *used += 1;
            for (s, fd) in sym.iter().zip(fd) {
                *w = w.max((s - fd).abs() / fd.abs().max(1.0));
            }
        }
    }
    Ok(families
        .iter()
        .zip(worst)
        .zip(evaluated)
        .map(|((fam, w), used)| CheckResult {
            id: format!("fd:{}", fam.name),
            max_residual: w,
            scale: Scale::Normalized,
            passed: w <= FD_TOLERANCE && used > 0,
            vacuous: fam.deriv.is_zero(),
        })
        .collect())
}
