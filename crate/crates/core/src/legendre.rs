//! The fiber derivative `FL: (q, q̇) ↦ (q, ∂L/∂q̇)`, its pullback on
//! phase-space functions, gauge generators and multiplier consistency.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Calculus, Coordinates, Expr, Substitution};
use crate::lagrange::LagrangianTensors;
use crate::linalg;
use crate::model::{ModelSpec, SamplePoint};
use crate::system::GaugeSystem;
use crate::tensor::{IndexedExpr, Role};

/// `p_i ↦ ∂L/∂q̇^i` with a memoized substitution.
pub struct PullbackMap {
    coords: Coordinates,
    assignments: Vec<Expr>,
    subst: RefCell<Substitution>,
}

impl Clone for PullbackMap {
    fn clone(&self) -> Self {
        PullbackMap::new(self.coords.clone(), self.assignments.clone())
    }
}

impl std::fmt::Debug for PullbackMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PullbackMap").field("assignments", &self.assignments).finish()
    }
}

impl PullbackMap {
    pub fn new(coords: Coordinates, assignments: Vec<Expr>) -> Self {
        assert_eq!(coords.len(), assignments.len(), "one assignment per momentum");
        let map: HashMap<_, _> = assignments.iter().enumerate().map(|(i, e)| (coords.p(i), e.clone())).collect();
        PullbackMap { coords, assignments, subst: RefCell::new(Substitution::new(map)) }
    }

    /// Momenta of the model's Lagrangian.
    pub fn from_spec(spec: &ModelSpec) -> Self {
        let mut calc = Calculus::new();
        let a = (0..spec.n()).map(|i| calc.diff(&spec.lagrangian, &spec.coords.v(i))).collect();
        PullbackMap::new(spec.coords.clone(), a)
    }

    pub fn assignments(&self) -> &[Expr] {
        &self.assignments
    }

    /// A copy with momentum `i` mapped to `e` instead.
    pub fn with_assignment(&self, i: usize, e: Expr) -> Self {
        let mut a = self.assignments.clone();
        a[i] = e;
        PullbackMap::new(self.coords.clone(), a)
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        self.subst.borrow_mut().apply(e)
    }

    pub fn apply_all(&self, t: &IndexedExpr) -> IndexedExpr {
        t.map(|e| self.apply(e))
    }
}

pub fn pullback(e: &Expr, pm: &PullbackMap) -> Expr {
    pm.apply(e)
}

/// `R_μ^i = FL*(∂G_μ/∂p_i)`.
pub fn gauge_generators(spec: &ModelSpec, pm: &PullbackMap) -> IndexedExpr {
    let mut calc = Calculus::new();
    IndexedExpr::from_fn(&[Role::Gauge, Role::Coord], spec.n(), spec.m(), |ix| {
        pm.apply(&calc.diff(&spec.constraints[ix[0]].expr, &spec.coords.p(ix[1])))
    })
}

/// Worst normalized `|FL*H_c − (q̇·∂L/∂q̇ − L)|`.
pub fn check_hc(spec: &ModelSpec, pm: &PullbackMap, points: &[SamplePoint]) -> Result<f64> {
    let lt = LagrangianTensors::new(spec, &mut Calculus::new());
    let hc = pm.apply(&spec.hamiltonian);
    let inputs = crate::verify::jet_symbols(&spec.coords);
    let tape = crate::expr::Tape::compile(&[hc, lt.energy], &inputs)?;
    let mut worst: f64 = 0.0;
    for p in points {
        let v = tape.eval(&crate::verify::jet_input(p))?;
        worst = worst.max(crate::verify::residual::normalized(&[v[0], -v[1]]));
    }
    Ok(worst)
}

/// Least-squares multipliers at one point with their consistency residuals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierFit {
    pub lambda: Vec<f64>,
    /// `R_μ^i λ^μ = q̇^i − FL*(∂H_c/∂p_i)` misfit.
    pub fit_residual: f64,
    /// `FL*(∂H_c/∂q^i) + ∂L/∂q^i − λ^μ R_μ^j ∂²L/∂q̇^j∂q^i`.
    pub hamilton_residual: f64,
    /// `FL*{H_c, G_μ} + R_μ·α + R_μ B R_ν λ^ν`.
    pub bracket_residual: f64,
}

pub fn multipliers(spec: &ModelSpec, pm: &PullbackMap, points: &[SamplePoint]) -> Result<Vec<MultiplierFit>> {
    let sys = GaugeSystem::with_pullback(spec, pm.clone())?;
    let eval = sys.verifier()?;
    let mut out = Vec::with_capacity(points.len());
    for (k, p) in points.iter().enumerate() {
        let v = eval.at(p)?;
        out.push(v.multiplier_fit().ok_or(Error::GeneratorRank { point: k, rank: linalg::rank(&v.r_matrix()), m: spec.m() })?);
    }
    Ok(out)
}

/// Worst residuals of the derivative-transport identities.
pub fn transport_checks(spec: &ModelSpec, pm: &PullbackMap, points: &[SamplePoint]) -> Result<Vec<(&'static str, f64)>> {
    let sys = GaugeSystem::with_pullback(spec, pm.clone())?;
    let eval = sys.verifier()?;
    let ids = ["2.30", "2.31", "2.44", "2.45", "2.47"];
    let mut worst = [0.0f64; 5];
    for p in points {
        let v = eval.at(p)?;
        for (w, id) in worst.iter_mut().zip(ids) {
            *w = w.max(v.residual(id)?.value);
        }
    }
    Ok(ids.into_iter().zip(worst).collect())
}

/// Largest principal angle between `span R` and the numeric kernel of `W`
/// over the points, in radians. `π/2` if the dimensions disagree.
pub fn kernel_alignment(spec: &ModelSpec, pm: &PullbackMap, points: &[SamplePoint]) -> Result<f64> {
    let sys = GaugeSystem::with_pullback(spec, pm.clone())?;
    let eval = sys.verifier()?;
    let (n, m) = (spec.n(), spec.m());
    let mut worst: f64 = 0.0;
    for p in points {
        let v = eval.at(p)?;
        let w = DMatrix::from_row_slice(n, n, &v.w.data);
        let eig = SymmetricEigen::new(w.clone());
        let scale = w.amax().max(f64::MIN_POSITIVE);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));
        let kernel_cols: Vec<usize> = order.into_iter().take_while(|&k| eig.eigenvalues[k].abs() <= 1e-8 * scale).collect();
        if kernel_cols.len() != m {
            return Ok(std::f64::consts::FRAC_PI_2);
        }
        let kernel = DMatrix::from_fn(n, m, |i, j| eig.eigenvectors[(i, kernel_cols[j])]);
        let r = DMatrix::from_fn(n, m, |i, mu| v.r.at(&[mu, i]));
        worst = worst.max(linalg::largest_principal_angle(&r, &kernel));
    }
    Ok(worst)
}
