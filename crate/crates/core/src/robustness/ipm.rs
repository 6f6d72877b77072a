//! Mehrotra predictor-corrector interior point method for
//! `min 1ᵀ(u + v)  s.t.  A(u - v) = b,  u, v ≥ 0`
//! with dual `max bᵀw  s.t.  -1 ≤ Aᵀw ≤ 1`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};

use super::basis::BasisMatrix;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Relative primal, dual and gap tolerance for stopping.
    pub tolerance: f64,
    /// Entries of `|x|` below this are dropped before the final projection.
    pub drop_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iterations: 200, tolerance: 1e-12, drop_tolerance: 1e-9 }
    }
}

pub(crate) struct IpmOutput {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub iterations: usize,
}

const STEP_FRACTION: f64 = 0.99995;
/// Iterations without halving the merit or `μ` before giving up.
const STALL_LIMIT: usize = 8;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Factors `M + λI`, growing `λ` until Cholesky succeeds.
pub(crate) fn factor(m: DMatrix<f64>) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let dim = m.nrows();
    let scale = (0..dim).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut lambda = 0.0;
    for _ in 0..12 {
        let mut reg = m.clone();
        for i in 0..dim {
            reg[(i, i)] += lambda;
        }
        if let Some(ch) = Cholesky::new(reg) {
            return Ok(ch);
        }
        lambda = if lambda == 0.0 { 1e-14 * scale } else { lambda * 100.0 };
    }
    Err(Error::Solver("normal equations are not positive definite".into()))
}

fn max_step(z: &[f64], dz: &[f64]) -> f64 {
    z.iter().zip(dz).fold(f64::INFINITY, |a, (&zi, &dzi)| if dzi < 0.0 { a.min(-zi / dzi) } else { a })
}

pub(crate) fn solve_l1(a: &BasisMatrix, b: &[f64], opts: &SolverOptions) -> Result<IpmOutput> {
    let n = a.num_cols();
    let m = a.num_rows();
    if b.len() != m {
        return Err(Error::QubitMismatch { left: m, right: b.len() });
    }
    let bnorm = inf_norm(b);

    // Mehrotra starting point from the minimum-norm solution.
    let gram = factor(a.weighted_gram(&vec![1.0; n]))?;
    let lam = gram.solve(&DVector::from_column_slice(b));
    let x0 = a.at_mul(lam.as_slice());
    let l1: f64 = x0.iter().map(|v| v.abs()).sum();
    let shift = 0.5 * l1 / (2 * n) as f64 + 1e-8;
    let mut u: Vec<f64> = x0.iter().map(|&v| v.max(0.0) + shift).collect();
    let mut v: Vec<f64> = x0.iter().map(|&v| (-v).max(0.0) + shift).collect();
    let mut su = vec![1.0; n];
    let mut sv = vec![1.0; n];
    let mut w = vec![0.0; m];

    let mut iterations = 0;
    let mut stalled = 0;
    let mut best_mu = f64::INFINITY;
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    while iterations < opts.max_iterations {
        let t = a.at_mul(&w);
        let diff: Vec<f64> = u.iter().zip(&v).map(|(p, q)| p - q).collect();
        let ax = a.a_mul(&diff);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let rdu: Vec<f64> = (0..n).map(|i| 1.0 - t[i] - su[i]).collect();
        let rdv: Vec<f64> = (0..n).map(|i| 1.0 + t[i] - sv[i]).collect();
        let pobj: f64 = u.iter().chain(&v).sum();
        let dobj = dot(b, &w);
        let mu = (dot(&u, &su) + dot(&v, &sv)) / (2 * n) as f64;

        let pinf = inf_norm(&rp) / (1.0 + bnorm);
        let dinf = inf_norm(&rdu).max(inf_norm(&rdv));
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
        let merit = pinf.max(dinf).max(gap);
        // Progress means halving either the best merit or the complementarity.
        if mu < 0.5 * best_mu {
            best_mu = mu;
            stalled = 0;
        }
        if best.as_ref().is_none_or(|(bm, _, _)| merit < *bm) {
            if best.as_ref().is_none_or(|(bm, _, _)| merit < 0.5 * *bm) {
                stalled = 0;
            }
            best = Some((merit, diff.clone(), w.clone()));
        }
        stalled += 1;
        if stalled > STALL_LIMIT {
            break;
        }
        // The primal residual floors near roundoff on large bases; the final
        // projection restores it.
        if pinf < 100.0 * opts.tolerance && dinf < opts.tolerance && gap < opts.tolerance {
            break;
        }
        iterations += 1;

        let du: Vec<f64> = (0..n).map(|i| u[i] / su[i]).collect();
        let dv: Vec<f64> = (0..n).map(|i| v[i] / sv[i]).collect();
        let d: Vec<f64> = du.iter().zip(&dv).map(|(p, q)| p + q).collect();
        let chol = match factor(a.weighted_gram(&d)) {
            Ok(c) => c,
            Err(_) => break
        };

        let solve = |rcu: &[f64], rcv: &[f64]| {
            let inner: Vec<f64> =
                (0..n).map(|i| rcu[i] / su[i] - du[i] * rdu[i] - rcv[i] / sv[i] + dv[i] * rdv[i]).collect();
            let ai = a.a_mul(&inner);
            let rhs: Vec<f64> = rp.iter().zip(&ai).map(|(p, q)| p - q).collect();
            let dw = chol.solve(&DVector::from_vec(rhs));
            let dt = a.at_mul(dw.as_slice());
            let dsu: Vec<f64> = (0..n).map(|i| rdu[i] - dt[i]).collect();
            let dsv: Vec<f64> = (0..n).map(|i| rdv[i] + dt[i]).collect();
            let duu: Vec<f64> = (0..n).map(|i| (rcu[i] - u[i] * dsu[i]) / su[i]).collect();
            let dvv: Vec<f64> = (0..n).map(|i| (rcv[i] - v[i] * dsv[i]) / sv[i]).collect();
            (duu, dvv, dw.as_slice().to_vec(), dsu, dsv)
        };

        // Predictor.
        let rcu: Vec<f64> = (0..n).map(|i| -u[i] * su[i]).collect();
        let rcv: Vec<f64> = (0..n).map(|i| -v[i] * sv[i]).collect();
        let (au, av, _, asu, asv) = solve(&rcu, &rcv);
        let ap = max_step(&u, &au).min(max_step(&v, &av)).min(1.0);
        let ad = max_step(&su, &asu).min(max_step(&sv, &asv)).min(1.0);
        let mu_aff = (0..n)
            .map(|i| (u[i] + ap * au[i]) * (su[i] + ad * asu[i]) + (v[i] + ap * av[i]) * (sv[i] + ad * asv[i]))
            .sum::<f64>()
            / (2 * n) as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let rcu: Vec<f64> = (0..n).map(|i| sigma * mu - u[i] * su[i] - au[i] * asu[i]).collect();
        let rcv: Vec<f64> = (0..n).map(|i| sigma * mu - v[i] * sv[i] - av[i] * asv[i]).collect();
        let (cu, cv, cw, csu, csv) = solve(&rcu, &rcv);
        let ap = (STEP_FRACTION * max_step(&u, &cu).min(max_step(&v, &cv))).min(1.0);
        let ad = (STEP_FRACTION * max_step(&su, &csu).min(max_step(&sv, &csv))).min(1.0);
        if !(ap.is_finite() && ad.is_finite()) || cw.iter().any(|x| !x.is_finite()) {
            break;
        }
        for i in 0..n {
            u[i] += ap * cu[i];
            v[i] += ap * cv[i];
            su[i] += ad * csu[i];
            sv[i] += ad * csv[i];
        }
        for (wi, dwi) in w.iter_mut().zip(&cw) {
            *wi += ad * dwi;
        }
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
    }
    let (_, x, w) = best.ok_or_else(|| Error::Solver("no iterate produced".into()))?;
    Ok(IpmOutput { x, w, iterations })
}
