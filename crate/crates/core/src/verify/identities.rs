//! The identity table and per-point residuals.

use super::residual::{tensor_residual, Residual, Scale};
use super::PointValues;
use crate::error::{Error, Result};
use crate::legendre::MultiplierFit;
use crate::linalg;
use crate::tensor::{einsum, NumTensor};

/// One entry of the identity table.
#[derive(Clone, Copy, Debug)]
pub struct CheckSpec {
    pub id: &'static str,
    /// Number of antisymmetrized gauge indices; the identity is empty when
    /// `m` is smaller.
    pub arity: usize,
    pub scale: Scale,
}

const fn c(id: &'static str, arity: usize) -> CheckSpec {
    CheckSpec { id, arity, scale: Scale::Normalized }
}

pub const CHECKS: &[CheckSpec] = &[
    c("1.6", 0),
    c("1.9", 0),
    c("1.10", 0),
    c("1.23", 2),
    c("1.24", 2),
    c("1.25", 0),
    c("1.27", 2),
    c("1.30", 3),
    c("1.35", 2),
    c("1.37", 3),
    c("1.381", 3),
    c("1.382", 3),
    c("1.41", 3),
    c("1.45", 3),
    c("2.7", 0),
    CheckSpec { id: "2.8", arity: 0, scale: Scale::Absolute },
    c("2.11", 0),
    c("2.12", 0),
    c("2.13", 0),
    c("2.15", 2),
    c("2.17", 0),
    c("2.20", 0),
    c("2.21", 2),
    c("2.22", 2),
    c("2.23", 0),
    c("2.24", 2),
    c("2.26", 3),
    c("2.29", 3),
    c("2.30", 0),
    c("2.31", 0),
    c("2.44", 2),
    c("2.45", 2),
    c("2.47", 0),
    c("2.54=2.55", 0),
    c("sym.T", 2),
    c("sym.E", 2),
    c("sym.A", 3),
    c("sym.Bten", 3),
    c("sym.D", 3),
    c("sym.M", 3),
];

pub fn check_ids() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.id)
}

pub(crate) fn lookup(id: &str) -> Result<&'static CheckSpec> {
    CHECKS.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

pub fn vacuity_arity(id: &str) -> Option<usize> {
    lookup(id).ok().map(|c| c.arity)
}

fn nres(terms: &[NumTensor]) -> Residual {
    tensor_residual(terms, Scale::Normalized)
}

fn antisym(x: &NumTensor, axes: (usize, usize)) -> Residual {
    let mut perm: Vec<usize> = (0..x.shape.len()).collect();
    perm.swap(axes.0, axes.1);
    nres(&[x.clone(), x.permute(&perm)])
}

fn totally_antisym(x: &NumTensor) -> Residual {
    antisym(x, (0, 1)).max(antisym(x, (1, 2)))
}

fn cyc(x: &NumTensor) -> NumTensor {
    x.cyclic()
}

impl PointValues {
    /// Least-squares `λ` from `R_μ^i λ^μ = q̇^i − FL*(∂H_c/∂p_i)`; `None` if
    /// `R` is rank deficient.
    pub fn multiplier_fit(&self) -> Option<MultiplierFit> {
        let (n, m) = (self.n(), self.m());
        let rows = self.r_matrix();
        if linalg::rank(&rows) < m {
            return None;
        }
        let rhs: Vec<f64> = (0..n).map(|i| self.v[i] - self.dhc_dp.data[i]).collect();
        let lambda = linalg::least_squares(&rows, &rhs)?;
        let lam = NumTensor::vector(&lambda);
        let lr = einsum("u,ui->i", &[&lam, &self.r]);
        let fit = nres(&[NumTensor::vector(&self.v), self.dhc_dp.scale(-1.0), lr.scale(-1.0)]);
        let ham = nres(&[self.dhc_dq.clone(), self.lq.clone(), einsum("u,uj,ji->i", &[&lam, &self.r, &self.lqv]).scale(-1.0)]);
        let br = nres(&[
            self.hcg.clone(),
            einsum("ui,i->u", &[&self.r, &self.alpha]),
            einsum("ui,ij,vj,v->u", &[&self.r, &self.bfield, &self.r, &lam]),
        ]);
        Some(MultiplierFit { lambda, fit_residual: fit.value, hamilton_residual: ham.value, bracket_residual: br.value })
    }

    /// Residual of identity `id` at this point. Off-surface parts of
    /// "2.24" and "2.26" are handled by the suite.
    pub fn residual(&self, id: &str) -> Result<Residual> {
        let spec = lookup(id)?;
        let e = einsum;
        let (r, w, al, lj) = (&self.r, &self.w, &self.alpha, &self.lj);
        let v = NumTensor::vector(&self.v);
        let neg = |t: NumTensor| t.scale(-1.0);
        let res = match spec.id {
            "1.6" => nres(&[e("ui,ij->uj", &[r, w])]),
            "1.9" => nres(&[e("ui,i->u", &[r, al])]),
            "1.10" => nres(&[e("ui,i->u", &[r, lj])]),
            "1.23" => nres(&[
                e("uij,vj->uvi", &[&self.drq, r]),
                neg(e("vij,uj->uvi", &[&self.drq, r])),
                e("uij,vjk,k->uvi", &[&self.drv, &self.drq, &v]),
                neg(e("vij,ujk,k->uvi", &[&self.drv, &self.drq, &v])),
                neg(e("uvg,gi->uvi", &[&self.t, r])),
                e("uvij,j->uvi", &[&self.e, al]),
            ]),
            "1.24" => nres(&[
                e("uij,vjk->uvik", &[&self.drv, &self.drv]),
                neg(e("vij,ujk->uvik", &[&self.drv, &self.drv])),
                neg(e("uvij,jk->uvik", &[&self.e, w])),
            ]),
            "1.25" => nres(&[e("uij,vj->uvi", &[&self.drv, r])]),
            "1.27" => {
                let bwb = e("uim,mn,vnj,jk->uvik", &[&self.b, w, &self.b, w]);
                nres(&[e("uvij,jk->uvik", &[&self.e, w]), neg(bwb.clone()), bwb.permute(&[1, 0, 2, 3])])
            }
            "1.30" => nres(&[
                cyc(&e("aik,bckj->abcij", &[&self.drv, &self.e])),
                cyc(&e("ajk,bcki->abcij", &[&self.drv, &self.e])),
            ]),
            "1.35" => nres(&[
                neg(e("hi,ak,bchk->abci", &[r, r, &self.dtv])),
                neg(e("hik,ak,bch->abci", &[&self.drv, r, &self.t])),
                e("bik,cakj,j->abci", &[&self.drv, &self.e, lj]),
                e("cik,abkj,j->abci", &[&self.drv, &self.e, lj]),
                e("ajk,bcki,j->abci", &[&self.drv, &self.e, lj]),
                neg(e("ak,bcijk,j->abci", &[r, &self.dev, lj])),
            ]),
            "1.37" => nres(&[e("ri,abcr->abci", &[r, &self.a]), e("abcij,j->abci", &[&self.bten, lj])]),
            "1.41" => nres(&[self.a.clone(), neg(e("abcir,i->abcr", &[&self.d, lj]))]),
            "1.381" => nres(&[
                cyc(&e("aer,bce->abcr", &[&self.t, &self.t])).scale(1.0 / 3.0),
                cyc(&e("aj,bcrj->abcr", &[r, &self.dtq])).scale(-1.0 / 3.0),
                cyc(&e("ajl,bcrj,l->abcr", &[&self.drq, &self.dtv, &v])).scale(-1.0 / 3.0),
                e("abcir,i->abcr", &[&self.d, al]),
            ]),
            "1.382" => nres(&[
                cyc(&e("ajk,bcrj->abcrk", &[&self.drv, &self.dtv])).scale(-1.0 / 3.0),
                neg(e("abcir,ik->abcrk", &[&self.d, w])),
            ]),
            "1.45" => nres(&[
                e("ri,abcjr->abcij", &[r, &self.d]),
                neg(e("rj,abcir->abcij", &[r, &self.d])),
                self.bten.clone(),
                neg(e("abcijk,k->abcij", &[&self.m_alt, lj])),
            ]),
            "2.7" => nres(&[self.hc.clone(), neg(self.energy.clone())]),
            "2.8" => tensor_residual(std::slice::from_ref(&self.flg), Scale::Absolute),
            "2.11" => nres(&[self.fl_dgdq.clone(), e("aj,ji->ai", &[r, &self.lqv])]),
            "2.12" | "2.13" | "2.17" => match self.multiplier_fit() {
                Some(fit) => {
                    let value = match spec.id {
                        "2.12" => fit.fit_residual,
                        "2.13" => fit.hamilton_residual,
                        _ => fit.bracket_residual,
                    };
                    Residual { value, magnitude: value, summands: 1 }
                }
                None => return Err(Error::Invalid("multiplier fit: R is rank deficient".into())),
            },
            "2.15" => nres(&[self.gg.clone(), e("ai,ij,bj->ab", &[r, &self.bfield, r])]),
            "2.20" => nres(&[
                e("aij,i->aj", &[&self.drv, al]),
                neg(e("ai,ij->aj", &[r, &self.bfield])),
                e("ail,l,ij->aj", &[&self.drq, &v, w]),
            ]),
            "2.21" => nres(&[e("ai,ij,bj->ab", &[r, &self.bfield, r])]),
            "2.22" => nres(std::slice::from_ref(&self.gg)),
            "2.23" => nres(std::slice::from_ref(&self.hcg)),
            "2.24" => nres(&[self.gg.clone(), neg(e("uvg,g->uv", &[&self.t, &self.flg]))]),
            "2.26" => Residual::ZERO,
            "2.29" => nres(&[cyc(&self.cg), neg(cyc(&self.cc))]),
            "2.30" => nres(&[self.drv.clone(), neg(e("kl,uli->uik", &[w, &self.b]))]),
            "2.31" => nres(&[self.drq.clone(), neg(self.gqp.clone()), neg(e("lk,uli->uik", &[&self.lqv, &self.b]))]),
            "2.44" => nres(&[self.dtq.clone(), neg(self.dcq.clone()), neg(e("kj,abrk->abrj", &[&self.lqv, &self.dcp]))]),
            "2.45" => nres(&[self.dtv.clone(), neg(e("jk,abrk->abrj", &[w, &self.dcp]))]),
            "2.47" => nres(&[
                self.rdot.clone(),
                neg(e("ajl,l->aj", &[&self.gqp, &v])),
                neg(e("ajl,l->aj", &[&self.b, &self.lq])),
                neg(e("ajk,k->aj", &[&self.b, lj])),
            ]),
            "2.54=2.55" => {
                let whole = nres(&[self.m_alt.clone(), neg(self.m.clone())]);
                // term-level agreement: ∂E/∂q̇ against P2 and ∂R/∂q̇ against P1
                let p2 = nres(&[self.dev.clone(), neg(self.p2.permute(&[1, 2, 3, 4, 0]))]);
                let p1 = nres(&[self.drv.clone(), neg(self.p1.permute(&[1, 2, 0]))]);
                let value = whole.value.max(p2.value).max(p1.value);
                Residual { value, magnitude: whole.magnitude.max(p2.magnitude).max(p1.magnitude), summands: 2 }
            }
            "sym.T" => antisym(&self.t, (0, 1)),
            "sym.E" => antisym(&self.e, (0, 1)).max(antisym(&self.e, (2, 3))),
            "sym.A" => totally_antisym(&self.a),
            "sym.Bten" => totally_antisym(&self.bten).max(antisym(&self.bten, (3, 4))),
            "sym.D" => totally_antisym(&self.d),
            "sym.M" => totally_antisym(&self.m).max(antisym(&self.m, (3, 4))),
            other => return Err(Error::UnknownCheck(other.to_string())),
        };
        Ok(res)
    }
}
