//! Numeric verification of the identity tower at sampled points.

mod identities;
mod oracle;
pub mod residual;
mod suite;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::expr::{Coordinates, Symbol, SymbolKind};
use crate::model::SamplePoint;
use crate::structure::StructureTensors;
use crate::system::GaugeSystem;
use crate::tensor::{IndexedExpr, NumTensor, TensorBundle};

pub use identities::{check_ids, vacuity_arity, CHECKS};
pub use oracle::{fd_oracle, fd_oracle_corrupted, oracle_families, Corruption, FD_TOLERANCE, STENCIL_CONSISTENCY};
pub use residual::{Residual, Scale};
pub use suite::{identity_residual, run_suite, run_suite_with, CheckResult, Magnitudes, SuiteReport, VACUITY_FLOOR};

/// `q`, then `q̇`, then `q̈`.
pub fn jet_symbols(coords: &Coordinates) -> Vec<Symbol> {
    [SymbolKind::Coordinate, SymbolKind::Velocity, SymbolKind::Acceleration].into_iter().flat_map(|k| coords.family(k)).collect()
}

/// `q`, then `p`.
pub fn phase_symbols(coords: &Coordinates) -> Vec<Symbol> {
    [SymbolKind::Coordinate, SymbolKind::Momentum].into_iter().flat_map(|k| coords.family(k)).collect()
}

pub fn jet_input(p: &SamplePoint) -> Vec<f64> {
    p.q.iter().chain(&p.v).chain(&p.a).copied().collect()
}

/// Seed offset for off-constraint-surface phase-space points.
pub const OFF_SURFACE_SEED: u64 = 0x6f66_665f_7375_7266;

/// Numeric values of every tensor at one jet point.
#[derive(Clone, Debug)]
pub struct PointValues {
    pub q: Vec<f64>,
    pub v: Vec<f64>,
    pub acc: Vec<f64>,
    pub w: NumTensor,
    pub lq: NumTensor,
    pub lqv: NumTensor,
    pub alpha: NumTensor,
    pub lj: NumTensor,
    pub bfield: NumTensor,
    pub energy: NumTensor,
    pub momenta: NumTensor,
    pub flg: NumTensor,
    pub fl_dgdq: NumTensor,
    pub r: NumTensor,
    pub b: NumTensor,
    pub g3: NumTensor,
    pub gqp: NumTensor,
    pub t: NumTensor,
    pub dcp: NumTensor,
    pub dcq: NumTensor,
    pub hc: NumTensor,
    pub dhc_dp: NumTensor,
    pub dhc_dq: NumTensor,
    pub gg: NumTensor,
    pub hcg: NumTensor,
    pub cg: NumTensor,
    pub cc: NumTensor,
    pub drq: NumTensor,
    pub drv: NumTensor,
    pub rdot: NumTensor,
    pub dtq: NumTensor,
    pub dtv: NumTensor,
    pub dw: NumTensor,
    pub e: NumTensor,
    pub deq: NumTensor,
    pub dev: NumTensor,
    pub d: NumTensor,
    pub a: NumTensor,
    pub bten: NumTensor,
    pub p1: NumTensor,
    pub p2: NumTensor,
    pub m: NumTensor,
    pub m_alt: NumTensor,
}

fn jet_tensors<'a>(sys: &'a GaugeSystem, st: &'a StructureTensors) -> Vec<&'a IndexedExpr> {
    let (l, p, k) = (&sys.lag, &sys.pulled, &sys.kin);
    vec![
        &l.hessian, &l.dl_dq, &l.mixed, &l.alpha, &l.el_residual, &l.b_field, &l.momenta,
        &p.g, &p.dg_dq, &p.r, &p.b, &p.g3, &p.gqp, &p.t, &p.dc_dp, &p.dc_dq, &p.hc, &p.dhc_dp, &p.dhc_dq, &p.gg, &p.hcg, &p.cg, &p.cc,
        &k.dr_dq, &k.dr_dv, &k.r_dot, &k.dt_dq, &k.dt_dv, &k.dw_dv,
        &st.e, &st.de_dq, &st.de_dv, &st.d, &st.a, &st.bten, &st.p1, &st.p2, &st.m, &st.m_alt,
    ]
}

impl PointValues {
    fn from_parts(p: &SamplePoint, energy: NumTensor, parts: Vec<NumTensor>) -> Self {
        let mut it = parts.into_iter();
        let mut next = || it.next().expect("tensor layout");
        PointValues {
            q: p.q.clone(),
            v: p.v.clone(),
            acc: p.a.clone(),
            w: next(),
            lq: next(),
            lqv: next(),
            alpha: next(),
            lj: next(),
            bfield: next(),
            momenta: next(),
            flg: next(),
            fl_dgdq: next(),
            r: next(),
            b: next(),
            g3: next(),
            gqp: next(),
            t: next(),
            dcp: next(),
            dcq: next(),
            hc: next(),
            dhc_dp: next(),
            dhc_dq: next(),
            gg: next(),
            hcg: next(),
            cg: next(),
            cc: next(),
            drq: next(),
            drv: next(),
            rdot: next(),
            dtq: next(),
            dtv: next(),
            dw: next(),
            e: next(),
            deq: next(),
            dev: next(),
            d: next(),
            a: next(),
            bten: next(),
            p1: next(),
            p2: next(),
            m: next(),
            m_alt: next(),
            energy,
        }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn m(&self) -> usize {
        self.flg.data.len()
    }

    /// `R` as row-major rows, one per generator.
    pub fn r_matrix(&self) -> Vec<Vec<f64>> {
        self.r.data.chunks(self.n().max(1)).map(<[f64]>::to_vec).collect()
    }
}

/// Constraint data at one phase-space point.
#[derive(Clone, Debug)]
pub struct PhaseValues {
    pub g: NumTensor,
    pub gg: NumTensor,
    pub c: NumTensor,
    pub ggg: NumTensor,
}

impl PhaseValues {
    /// `{G_μ, G_ν} − C_{μν}^γ G_γ`
    pub fn closure(&self) -> Residual {
        let cg = crate::tensor::einsum("uvg,g->uv", &[&self.c, &self.g]);
        residual::tensor_residual(&[self.gg.clone(), cg.scale(-1.0)], Scale::Normalized)
    }

    /// Cyclic sum of `{{G_α, G_β}, G_γ}`.
    pub fn jacobi(&self) -> Residual {
        residual::tensor_residual(&[self.ggg.clone(), self.ggg.permute(&[1, 2, 0]), self.ggg.permute(&[2, 0, 1])], Scale::Normalized)
    }
}

/// Compiled tapes for one model and one set of structure tensors. Holds no
/// symbolic state, so it can be shared across threads.
pub struct Verifier {
    n: usize,
    m: usize,
    jet: TensorBundle,
    energy: crate::expr::Tape,
    phase: TensorBundle,
}

impl Verifier {
    pub fn new(sys: &GaugeSystem, tensors: &StructureTensors) -> Result<Self> {
        let co = &sys.spec.coords;
        let jet = TensorBundle::compile(&jet_tensors(sys, tensors), &jet_symbols(co))?;
        let energy = crate::expr::Tape::compile(std::slice::from_ref(&sys.lag.energy), &jet_symbols(co))?;
        let ph = &sys.phase;
        let phase = TensorBundle::compile(&[&ph.g, &ph.gg, &ph.c, &ph.ggg], &phase_symbols(co))?;
        Ok(Verifier { n: sys.n(), m: sys.m(), jet, energy, phase })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn at(&self, p: &SamplePoint) -> Result<PointValues> {
        let x = jet_input(p);
        let mut scratch = Vec::new();
        let parts = self.jet.eval(&x, &mut scratch)?;
        let energy = NumTensor::from_vec(&[], self.energy.eval(&x)?);
        Ok(PointValues::from_parts(p, energy, parts))
    }

    pub fn at_phase(&self, q: &[f64], p: &[f64]) -> Result<PhaseValues> {
        let x: Vec<f64> = q.iter().chain(p).copied().collect();
        let mut it = self.phase.eval(&x, &mut Vec::new())?.into_iter();
        let mut next = || it.next().expect("phase layout");
        Ok(PhaseValues { g: next(), gg: next(), c: next(), ggg: next() })
    }
}

/// `(q, FL(q, q̇) + δ)` with `δ ~ U[−½, ½]ⁿ`, drawn per point from
/// `seed` and the point index.
pub fn off_surface_points(ver: &Verifier, points: &[SamplePoint], seed: u64) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    points.iter().enumerate().map(|(k, p)| off_surface_point(ver, p, seed, k)).collect()
}

pub(crate) fn off_surface_point(ver: &Verifier, p: &SamplePoint, seed: u64, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let vals = ver.at(p)?;
    Ok((p.q.clone(), perturb(&vals.momenta.data, seed, k)))
}

pub(crate) fn perturb(momenta: &[f64], seed: u64, k: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ OFF_SURFACE_SEED ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let dist = Uniform::new_inclusive(-0.5, 0.5);
    momenta.iter().map(|x| x + dist.sample(&mut rng)).collect()
}
