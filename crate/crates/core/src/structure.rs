//! Lagrangian gauge structure tensors built from the Hamiltonian data, and
//! their ambiguity shifts.

use crate::error::{Error, Result};
use crate::expr::{Expr, Rational, SymbolKind};
use crate::system::{grad, neg, prod, total, GaugeSystem};
use crate::tensor::{IndexedExpr, Role};

use Role::{Coord as I, Gauge as G};

/// `Y[a,b,c,…] = s·(X[a,b,c,…] + X[b,c,a,…] + X[c,a,b,…])`
fn cyclic(x: &IndexedExpr, s: Rational) -> IndexedExpr {
    let (n, m) = dims(x);
    IndexedExpr::from_fn(x.roles(), n, m, |ix| {
        let mut j1 = ix.to_vec();
        let mut j2 = ix.to_vec();
        (j1[0], j1[1], j1[2]) = (ix[1], ix[2], ix[0]);
        (j2[0], j2[1], j2[2]) = (ix[2], ix[0], ix[1]);
        Expr::add(vec![x.get(ix).clone(), x.get(&j1).clone(), x.get(&j2).clone()]).scale(s)
    })
}

fn dims(x: &IndexedExpr) -> (usize, usize) {
    let mut n = 0;
    let mut m = 0;
    for (r, d) in x.roles().iter().zip(x.shape()) {
        match r {
            I => n = *d,
            G => m = *d,
        }
    }
    (n, m)
}

fn minus_third() -> Rational {
    Rational::new(-1, 3)
}

/// All structure tensors of one model, entries in `(q, q̇, q̈)`.
#[derive(Clone, Debug)]
pub struct StructureTensors {
    /// `[μ][ν][γ]`
    pub t: IndexedExpr,
    /// `[μ][ν][i][j]`
    pub e: IndexedExpr,
    /// `[μ][i][k]`
    pub b: IndexedExpr,
    /// `[α][β][γ][ρ]`
    pub a: IndexedExpr,
    /// `[α][β][γ][i][j]`
    pub bten: IndexedExpr,
    /// `[α][β][γ][i][ρ]`
    pub d: IndexedExpr,
    /// `[j][μ][i]`
    pub p1: IndexedExpr,
    /// `[k][μ][ν][i][j]`
    pub p2: IndexedExpr,
    /// `[α][β][γ][i][j][k]`, from the constraint derivatives.
    pub m: IndexedExpr,
    /// `M` rebuilt from `∂E/∂q̇` and `∂R/∂q̇`.
    pub m_alt: IndexedExpr,
    /// `∂E/∂q^k` as a trailing index.
    pub de_dq: IndexedExpr,
    pub de_dv: IndexedExpr,
}

impl StructureTensors {
    pub fn compute(sys: &GaugeSystem) -> Result<Self> {
        let p1 = tensor_p1(sys);
        let e = tensor_e(sys, &p1);
        let d = tensor_d(sys, &p1);
        Self::assemble(sys, e, d, &p1)
    }

    fn assemble(sys: &GaugeSystem, e: IndexedExpr, d: IndexedExpr, p1: &IndexedExpr) -> Result<Self> {
        let t = sys.pulled.t.clone();
        let a = tensor_a(sys, &t);
        let (de_dq, de_dv) = sys.with_calculus(|c| {
            let q = sys.spec.coords.family(SymbolKind::Coordinate);
            let v = sys.spec.coords.family(SymbolKind::Velocity);
            (grad(c, &e, &q), grad(c, &e, &v))
        });
        let bten = bten_from(sys, &t, &e, &de_dq, &de_dv);
        let p2 = tensor_p2(sys, p1);
        let m = m_from_p(sys, p1, &p2);
        let m_alt = m_from_e(sys, &de_dv);
        Ok(StructureTensors { t, e, b: sys.pulled.b.clone(), a, bten, d, p1: p1.clone(), p2, m, m_alt, de_dq, de_dv })
    }
}

pub fn tensor_t(sys: &GaugeSystem) -> IndexedExpr {
    sys.pulled.t.clone()
}

pub fn tensor_b(sys: &GaugeSystem) -> IndexedExpr {
    sys.pulled.b.clone()
}

/// `P_{jμ}^i = W_{jk} b_μ^{ki}`
pub fn tensor_p1(sys: &GaugeSystem) -> IndexedExpr {
    let (n, m) = (sys.n(), sys.m());
    let (w, b) = (&sys.lag.hessian, &sys.pulled.b);
    IndexedExpr::from_fn(&[I, G, I], n, m, |ix| {
        let (j, u, i) = (ix[0], ix[1], ix[2]);
        total((0..n).map(|k| prod(&[w.get(&[j, k]), b.get(&[u, k, i])])))
    })
}

/// `E_{μν}^{ij} = b_μ^{il} W_{lm} b_ν^{mj} − (μ↔ν)`
pub fn tensor_e(sys: &GaugeSystem, p1: &IndexedExpr) -> IndexedExpr {
    let (n, m) = (sys.n(), sys.m());
    let b = &sys.pulled.b;
    let x = IndexedExpr::from_fn(&[G, G, I, I], n, m, |ix| {
        let (u, v, i, j) = (ix[0], ix[1], ix[2], ix[3]);
        total((0..n).map(|l| prod(&[p1.get(&[l, u, i]), b.get(&[v, l, j])])))
    });
    IndexedExpr::from_fn(&[G, G, I, I], n, m, |ix| x.get(ix) - x.get(&[ix[1], ix[0], ix[2], ix[3]]))
}

/// `D_{αβγ}^{iρ} = −⅓ cyc b_α^{ij} W_{jk} ∂C_{βγ}^ρ/∂p_k`
pub fn tensor_d(sys: &GaugeSystem, p1: &IndexedExpr) -> IndexedExpr {
    let (n, m) = (sys.n(), sys.m());
    let dcp = &sys.pulled.dc_dp;
    let x = IndexedExpr::from_fn(&[G, G, G, I, G], n, m, |ix| {
        let (a, b, c, i, r) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        total((0..n).map(|k| prod(&[p1.get(&[k, a, i]), dcp.get(&[b, c, r, k])])))
    });
    cyclic(&x, minus_third())
}

/// `A_{αβγ}^ρ = ⅓ cyc (T_{αε}^ρ T_{βγ}^ε − R_α^j ∂T_{βγ}^ρ/∂q^j − Ṙ_α^j ∂T_{βγ}^ρ/∂q̇^j)`
pub fn tensor_a(sys: &GaugeSystem, t: &IndexedExpr) -> IndexedExpr {
    let (n, m) = (sys.n(), sys.m());
    let (r, rdot) = (&sys.pulled.r, &sys.kin.r_dot);
    let (dtq, dtv) = sys.with_calculus(|c| {
        let q = sys.spec.coords.family(SymbolKind::Coordinate);
        let v = sys.spec.coords.family(SymbolKind::Velocity);
        (grad(c, t, &q), grad(c, t, &v))
    });
    let f = IndexedExpr::from_fn(&[G, G, G, G], n, m, |ix| {
        let (a, b, c, rho) = (ix[0], ix[1], ix[2], ix[3]);
        let tt = (0..m).map(|e| prod(&[t.get(&[a, e, rho]), t.get(&[b, c, e])]));
        let rq = (0..n).map(|j| neg(prod(&[r.get(&[a, j]), dtq.get(&[b, c, rho, j])])));
        let rv = (0..n).map(|j| neg(prod(&[rdot.get(&[a, j]), dtv.get(&[b, c, rho, j])])));
        total(tt.chain(rq).chain(rv))
    });
    cyclic(&f, Rational::new(1, 3))
}

/// Third-order tensor `B_{αβγ}^{ij}` from `T` and `E`.
pub fn tensor_bten(sys: &GaugeSystem, t: &IndexedExpr, e: &IndexedExpr) -> IndexedExpr {
    let (de_dq, de_dv) = sys.with_calculus(|c| {
        let q = sys.spec.coords.family(SymbolKind::Coordinate);
        let v = sys.spec.coords.family(SymbolKind::Velocity);
        (grad(c, e, &q), grad(c, e, &v))
    });
    bten_from(sys, t, e, &de_dq, &de_dv)
}

fn bten_from(sys: &GaugeSystem, t: &IndexedExpr, e: &IndexedExpr, de_dq: &IndexedExpr, de_dv: &IndexedExpr) -> IndexedExpr {
    let (n, m) = (sys.n(), sys.m());
    let co = &sys.spec.coords;
    let (r, rdot) = (&sys.pulled.r, &sys.kin.r_dot);
    let (drq, drv, drv_dot) = (&sys.kin.dr_dq, &sys.kin.dr_dv, &sys.kin.dr_dv_dot);
    let vs: Vec<Expr> = (0..n).map(|k| Expr::symbol(co.v(k))).collect();
    let acc: Vec<Expr> = (0..n).map(|k| Expr::symbol(co.a(k))).collect();
    let e_dot = IndexedExpr::from_fn(&[G, G, I, I], n, m, |ix| {
        total((0..n).flat_map(|k| {
            let j = [ix[0], ix[1], ix[2], ix[3], k];
            [prod(&[de_dq.get(&j), &vs[k]]), prod(&[de_dv.get(&j), &acc[k]])]
        }))
    });
    let half = Expr::rational(1, 2);
    let g = IndexedExpr::from_fn(&[G, G, G, I, I], n, m, |ix| {
        let (a, b, c, i, j) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        let mut terms = Vec::new();
        for eps in 0..m {
            terms.push(prod(&[e.get(&[a, eps, i, j]), t.get(&[b, c, eps])]));
        }
        for k in 0..n {
            terms.push(neg(prod(&[r.get(&[a, k]), de_dq.get(&[b, c, i, j, k])])));
            terms.push(neg(prod(&[rdot.get(&[a, k]), de_dv.get(&[b, c, i, j, k])])));
            terms.push(prod(&[drq.get(&[a, i, k]), e.get(&[b, c, k, j])]));
            terms.push(neg(prod(&[drq.get(&[a, j, k]), e.get(&[b, c, k, i])])));
            terms.push(prod(&[drv.get(&[a, i, k]), e_dot.get(&[b, c, k, j])]));
            terms.push(neg(prod(&[drv.get(&[a, j, k]), e_dot.get(&[b, c, k, i])])));
            // ½ d/dt (∂R_α^j/∂q̇^k E_{βγ}^{ki} − ∂R_α^i/∂q̇^k E_{βγ}^{kj})
            terms.push(prod(&[&half, drv_dot.get(&[a, j, k]), e.get(&[b, c, k, i])]));
            terms.push(prod(&[&half, drv.get(&[a, j, k]), e_dot.get(&[b, c, k, i])]));
            terms.push(neg(prod(&[&half, drv_dot.get(&[a, i, k]), e.get(&[b, c, k, j])])));
            terms.push(neg(prod(&[&half, drv.get(&[a, i, k]), e_dot.get(&[b, c, k, j])])));
        }
        total(terms)
    });
    cyclic(&g, Rational::new(1, 3))
}

/// `P_{kμν}^{ij}`: `∂W/∂q̇` contracted with antisymmetrized `b b`, plus
/// `W W ∂/∂p` of the same product.
pub fn tensor_p2(sys: &GaugeSystem, p1: &IndexedExpr) -> IndexedExpr {
    let (n, m) = (sys.n(), sys.m());
    let (w, dw, b, g3) = (&sys.lag.hessian, &sys.kin.dw_dv, &sys.pulled.b, &sys.pulled.g3);
    // gw[u][i][l][k] = g3_u^{iln} W_{nk}
    let gw = IndexedExpr::from_fn(&[G, I, I, I], n, m, |ix| {
        total((0..n).map(|nn| prod(&[g3.get(&[ix[0], ix[1], ix[2], nn]), w.get(&[nn, ix[3]])])))
    });
    let part = |k: usize, u: usize, v: usize, i: usize, j: usize| -> Vec<Option<Expr>> {
        let mut terms = Vec::new();
        for l in 0..n {
            for mm in 0..n {
                terms.push(prod(&[dw.get(&[l, mm, k]), b.get(&[u, i, l]), b.get(&[v, mm, j])]));
            }
            terms.push(prod(&[gw.get(&[u, i, l, k]), p1.get(&[l, v, j])]));
            terms.push(prod(&[p1.get(&[l, u, i]), gw.get(&[v, l, j, k])]));
        }
        terms
    };
    IndexedExpr::from_fn(&[I, G, G, I, I], n, m, |ix| {
        let (k, u, v, i, j) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        if u == v {
            return Expr::zero();
        }
        let plus = part(k, u, v, i, j);
        let minus = part(k, v, u, i, j).into_iter().map(neg);
        total(plus.into_iter().chain(minus))
    })
}

fn m_from_p(sys: &GaugeSystem, p1: &IndexedExpr, p2: &IndexedExpr) -> IndexedExpr {
    let (n, m) = (sys.n(), sys.m());
    let (b, g3) = (&sys.pulled.b, &sys.pulled.g3);
    let h = IndexedExpr::from_fn(&[G, G, G, I, I, I], n, m, |ix| {
        let (a, be, c, i, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4], ix[5]);
        let mut terms = Vec::new();
        for l in 0..n {
            terms.push(prod(&[b.get(&[a, k, l]), p2.get(&[l, be, c, i, j])]));
        }
        for mm in 0..n {
            for nn in 0..n {
                let g = g3.get(&[a, k, mm, nn]);
                terms.push(prod(&[g, p1.get(&[mm, be, i]), p1.get(&[nn, c, j])]));
                terms.push(neg(prod(&[g, p1.get(&[mm, c, i]), p1.get(&[nn, be, j])])));
            }
        }
        total(terms)
    });
    cyclic(&h, minus_third())
}

fn m_from_e(sys: &GaugeSystem, de_dv: &IndexedExpr) -> IndexedExpr {
    let (n, m) = (sys.n(), sys.m());
    let (b, g3, drv) = (&sys.pulled.b, &sys.pulled.g3, &sys.kin.dr_dv);
    let h = IndexedExpr::from_fn(&[G, G, G, I, I, I], n, m, |ix| {
        let (a, be, c, i, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4], ix[5]);
        let mut terms = Vec::new();
        for l in 0..n {
            terms.push(prod(&[b.get(&[a, k, l]), de_dv.get(&[be, c, i, j, l])]));
        }
        for mm in 0..n {
            for nn in 0..n {
                let g = g3.get(&[a, k, mm, nn]);
                terms.push(prod(&[g, drv.get(&[be, i, mm]), drv.get(&[c, j, nn])]));
                terms.push(neg(prod(&[g, drv.get(&[c, i, mm]), drv.get(&[be, j, nn])])));
            }
        }
        total(terms)
    });
    cyclic(&h, minus_third())
}

/// Fourth-order tensor `M` with its auxiliaries `P1`, `P2`.
pub fn tensor_m(sys: &GaugeSystem) -> (IndexedExpr, IndexedExpr, IndexedExpr) {
    let p1 = tensor_p1(sys);
    let p2 = tensor_p2(sys, &p1);
    (m_from_p(sys, &p1, &p2), p1, p2)
}

fn check_shape(name: &str, t: &IndexedExpr, want: &[usize]) -> Result<()> {
    if t.shape() != want {
        return Err(Error::Ambiguity(format!("{name} has shape {:?}, expected {want:?}", t.shape())));
    }
    Ok(())
}

/// `E → E + e_{μν}^{αβ}(R_α^i R_β^j − R_β^i R_α^j)`,
/// `D → D + d_{αβγ}^{ρδ} R_δ^i`; every dependent tensor is rebuilt.
pub fn ambiguity_shift(sys: &GaugeSystem, tensors: &StructureTensors, e: &IndexedExpr, d: &IndexedExpr) -> Result<StructureTensors> {
    let (n, m) = (sys.n(), sys.m());
    check_shape("e", e, &[m; 4])?;
    check_shape("d", d, &[m; 5])?;
    let mut bad = None;
    e.for_each(|ix, x| {
        let sum = x + e.get(&[ix[1], ix[0], ix[2], ix[3]]);
        if bad.is_none() && !sum.is_zero() {
            bad = Some(format!("e[{}][{}][{}][{}] + e[{}][{}][..] = {sum}", ix[0] + 1, ix[1] + 1, ix[2] + 1, ix[3] + 1, ix[1] + 1, ix[0] + 1));
        }
    });
    if let Some(msg) = bad {
        return Err(Error::Ambiguity(format!("e must be antisymmetric in its lower pair: {msg}")));
    }
    let r = &sys.pulled.r;
    let new_e = IndexedExpr::from_fn(&[G, G, I, I], n, m, |ix| {
        let (mu, nu, i, j) = (ix[0], ix[1], ix[2], ix[3]);
        let mut terms = vec![Some(tensors.e.get(ix).clone())];
        for al in 0..m {
            for be in 0..m {
                let c = e.get(&[mu, nu, al, be]);
                terms.push(prod(&[c, r.get(&[al, i]), r.get(&[be, j])]));
                terms.push(neg(prod(&[c, r.get(&[be, i]), r.get(&[al, j])])));
            }
        }
        total(terms)
    });
    let new_d = IndexedExpr::from_fn(&[G, G, G, I, G], n, m, |ix| {
        let (a, b, c, i, rho) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        let shift = (0..m).map(|del| prod(&[d.get(&[a, b, c, rho, del]), r.get(&[del, i])]));
        total(std::iter::once(Some(tensors.d.get(ix).clone())).chain(shift))
    });
    let mut out = StructureTensors::assemble(sys, new_e, new_d, &tensors.p1)?;
    out.a = tensors.a.clone();
    Ok(out)
}
