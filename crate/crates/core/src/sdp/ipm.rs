//! Infeasible-start primal-dual path following.
//!
//! Primal variables are the Hermitian block `X` and one non-negative slack
//! per inequality row (inequalities are normalized to `≤`). Each iteration
//! forms the real Schur complement `M_ij = Re Tr(A_i X A_j Z⁻¹)` of the HKM
//! direction, solves it by Cholesky, and takes a Mehrotra predictor-corrector
//! step. Objective and constraint rows are rescaled to unit Frobenius norm
//! before the first iteration.

use log::warn;
use nalgebra::{DMatrix, DVector};

use super::{
    ConstraintMatrix, IterateRecord, KktResiduals, SdpProblem, SdpSolution, SdpStatus, Sense,
    HERMITIAN_WARN_TOL,
};
use crate::error::Result;
use crate::linalg::{
    cholesky_lower, hermitian_defect, hermitian_part, matmul, min_eigenvalue, trace_product, CMat, CVec, C64,
};

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 100 }
    }
}

pub fn solve_sdp(p: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    solve_sdp_with(p, SdpOptions { tol, ..Default::default() })
}

/// Internal standard form: min Tr(CX) s.t. Tr(A_i X) + [slack_i] = b_i.
struct Scaled {
    n: usize,
    c: CMat,
    rows: Vec<ConstraintMatrix>,
    b: Vec<f64>,
    /// Row index of each inequality slack.
    slack_rows: Vec<usize>,
    c_scale: f64,
    /// Factor applied to row i (includes the sign flip of `≥` rows).
    row_scale: Vec<f64>,
}

fn standardize(p: &SdpProblem) -> Scaled {
    let n = p.dim;
    let defect = hermitian_defect(&p.objective);
    if defect > HERMITIAN_WARN_TOL {
        warn!("SDP objective deviates from Hermitian by {defect:.3e}; symmetrizing");
    }
    let c = hermitian_part(&p.objective);
    let c_norm = c.norm();
    let c_scale = if c_norm > 0.0 { c_norm } else { 1.0 };
    let c = c / C64::new(c_scale, 0.0);

    let mut rows = Vec::with_capacity(p.constraints.len());
    let mut b = Vec::with_capacity(p.constraints.len());
    let mut slack_rows = Vec::new();
    let mut row_scale = Vec::with_capacity(p.constraints.len());
    for (i, con) in p.constraints.iter().enumerate() {
        let defect = con.matrix.hermitian_defect(n);
        if defect > HERMITIAN_WARN_TOL {
            warn!("SDP constraint {i} deviates from Hermitian by {defect:.3e}; symmetrizing");
        }
        let m = con.matrix.symmetrized();
        let norm = m.frobenius_norm();
        let mut s = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        if con.sense == Sense::Ge {
            s = -s;
        }
        rows.push(m.scaled(s));
        b.push(con.rhs * s);
        row_scale.push(s);
        if con.sense != Sense::Eq {
            slack_rows.push(i);
        }
    }
    Scaled { n, c, rows, b, slack_rows, c_scale, row_scale }
}

impl Scaled {
    fn apply(&self, x: &CMat, xs: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.rows.iter().map(|a| a.inner(x)).collect();
        for (k, &row) in self.slack_rows.iter().enumerate() {
            out[row] += xs[k];
        }
        out
    }

    fn adjoint(&self, y: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.n, self.n);
        for (a, &yi) in self.rows.iter().zip(y) {
            if yi != 0.0 {
                a.add_scaled_to(&mut out, yi);
            }
        }
        out
    }

    /// Real Schur complement of the HKM direction.
    fn schur(&self, x: &CMat, zi: &CMat, xs: &[f64], zs: &[f64]) -> DMatrix<f64> {
        let m = self.rows.len();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        let dense: Vec<usize> = (0..m).filter(|&i| matches!(self.rows[i], ConstraintMatrix::Dense(_))).collect();
        // Dense rows: W_i = Z⁻¹ A_i X, then M_ij = Re Tr(A_j W_i).
        for &i in &dense {
            let a_i = match &self.rows[i] {
                ConstraintMatrix::Dense(a) => a,
                ConstraintMatrix::Sparse(_) => unreachable!(),
            };
            let w = matmul(&matmul(zi, a_i), x);
            for j in 0..m {
                let v = match &self.rows[j] {
                    ConstraintMatrix::Dense(a_j) => trace_product(a_j, &w).re,
                    ConstraintMatrix::Sparse(entries) => entries.iter().map(|&(r, c, val)| (val * w[(c, r)]).re).sum(),
                };
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        // Sparse × sparse: Σ u X[b,c] v Z⁻¹[d,a] over (a,b,u) ∈ A_i, (c,d,v) ∈ A_j.
        for i in 0..m {
            let ConstraintMatrix::Sparse(ei) = &self.rows[i] else { continue };
            for j in i..m {
                let ConstraintMatrix::Sparse(ej) = &self.rows[j] else { continue };
                let mut acc = C64::new(0.0, 0.0);
                for &(a, b, u) in ei {
                    for &(c, d, v) in ej {
                        acc += u * x[(b, c)] * v * zi[(d, a)];
                    }
                }
                schur[(i, j)] = acc.re;
                schur[(j, i)] = acc.re;
            }
        }
        for (k, &row) in self.slack_rows.iter().enumerate() {
            schur[(row, row)] += xs[k] / zs[k];
        }
        schur
    }
}

/// Below this order the step length uses a dense eigendecomposition.
const DENSE_STEP_DIM: usize = 40;
/// Krylov dimension of the Lanczos step-length estimate.
const LANCZOS_STEPS: usize = 48;

/// Largest `t` with `X + t dX ⪰ 0` (infinite if `dX ⪰ 0`), given the lower
/// Cholesky factor `l` of `X`: `t = −1/λ_min(L⁻¹ dX L⁻ᴴ)`.
fn max_step_psd(l: &CMat, dx: &CMat) -> f64 {
    let n = l.nrows();
    let lam = if n <= DENSE_STEP_DIM {
        let Some(t1) = l.solve_lower_triangular(dx) else { return 0.0 };
        let Some(t2) = l.solve_lower_triangular(&t1.adjoint()) else { return 0.0 };
        min_eigenvalue(&t2)
    } else {
        lanczos_min_eigenvalue(n, |v| {
            let w = l.ad_solve_lower_triangular(v).unwrap_or_else(|| v.clone());
            let w = dx * w;
            l.solve_lower_triangular(&w).unwrap_or(w)
        })
    };
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

/// Estimate of the smallest eigenvalue of a Hermitian operator by Lanczos
/// with full reorthogonalization, shifted down by the Ritz residual. It can
/// still overshoot; callers verify the resulting step with a Cholesky
/// factorization.
fn lanczos_min_eigenvalue<F: Fn(&CVec) -> CVec>(n: usize, apply: F) -> f64 {
    let k_max = LANCZOS_STEPS.min(n);
    // Fixed, generic start vector keeps the solver deterministic.
    let mut q = CVec::from_fn(n, |i, _| C64::new(1.0 + 0.37 * ((i * 7919) % 101) as f64 / 101.0, 0.0));
    q /= C64::new(q.norm(), 0.0);
    let mut basis: Vec<CVec> = Vec::with_capacity(k_max);
    let mut alpha = Vec::with_capacity(k_max);
    let mut beta: Vec<f64> = Vec::with_capacity(k_max);
    let mut scale = 0.0_f64;
    for j in 0..k_max {
        let mut w = apply(&q);
        let a = q.dotc(&w).re;
        alpha.push(a);
        basis.push(q.clone());
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let bn = w.norm();
        scale = scale.max(a.abs()).max(bn);
        beta.push(bn);
        if bn <= 1e-13 * scale.max(f64::MIN_POSITIVE) || j + 1 == k_max {
            break;
        }
        q = w / C64::new(bn, 0.0);
    }
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (imin, theta) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let residual = (beta[k - 1] * eig.eigenvectors[(k - 1, imin)]).abs();
    theta - residual
}

/// Shrink `t` until `X + t dX` has a Cholesky factor; returns the step and
/// the factor (`None` if no positive step was found).
fn safeguarded_step(x: &CMat, dx: &CMat, mut t: f64) -> Option<(f64, CMat, CMat)> {
    for _ in 0..40 {
        let cand = hermitian_part(&(x + dx * C64::new(t, 0.0)));
        if let Some(ch) = cholesky_lower(&cand) {
            return Some((t, cand, ch.l()));
        }
        t *= 0.8;
    }
    None
}

/// `M⁻¹` from the lower Cholesky factor of `M`.
fn inverse_from_factor(l: &CMat) -> Option<CMat> {
    let n = l.nrows();
    let li = l.solve_lower_triangular(&CMat::identity(n, n))?;
    Some(hermitian_part(&matmul(&li.adjoint(), &li)))
}

fn max_step_vec(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Direction {
    dx: CMat,
    dxs: Vec<f64>,
    dy: Vec<f64>,
    dz: CMat,
    dzs: Vec<f64>,
}

struct Residuals {
    rp: Vec<f64>,
    rd: CMat,
    rds: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn direction(
    sp: &Scaled,
    chol_m: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
    x: &CMat,
    zi: &CMat,
    xs: &[f64],
    zs: &[f64],
    res: &Residuals,
    rc: &CMat,
    rc_s: &[f64],
) -> Direction {
    let m = sp.rows.len();
    // G = (Rc − X R_d) Z⁻¹
    let g = matmul(&(rc - matmul(x, &res.rd)), zi);
    let mut rhs = DVector::<f64>::zeros(m);
    for i in 0..m {
        rhs[i] = res.rp[i] - sp.rows[i].inner(&g);
    }
    for (k, &row) in sp.slack_rows.iter().enumerate() {
        rhs[row] -= (rc_s[k] - xs[k] * res.rds[k]) / zs[k];
    }
    let dy_v = chol_m.solve(&rhs);
    let dy: Vec<f64> = dy_v.iter().copied().collect();
    let dz = &res.rd - sp.adjoint(&dy);
    let dx = hermitian_part(&matmul(&(rc - matmul(x, &dz)), zi));
    let dzs: Vec<f64> = sp
        .slack_rows
        .iter()
        .enumerate()
        .map(|(k, &row)| res.rds[k] - dy[row])
        .collect();
    let dxs: Vec<f64> = (0..xs.len()).map(|k| (rc_s[k] - xs[k] * dzs[k]) / zs[k]).collect();
    Direction { dx, dxs, dy, dz, dzs }
}

fn factor_schur(mut schur: DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let m = schur.nrows();
    let scale = (0..m).map(|i| schur[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    for attempt in 0..6 {
        if let Some(ch) = nalgebra::Cholesky::new(schur.clone()) {
            return Some(ch);
        }
        let reg = scale * 1e-14 * 10f64.powi(2 * attempt);
        for i in 0..m {
            schur[(i, i)] += reg;
        }
    }
    None
}

pub fn solve_sdp_with(p: &SdpProblem, opts: SdpOptions) -> Result<SdpSolution> {
    p.validate()?;
    let sp = standardize(p);
    let n = sp.n;
    let m = sp.rows.len();
    let ns = sp.slack_rows.len();
    let cone_dim = (n + ns) as f64;

    let b_norm = norm(&sp.b);
    let c_norm = sp.c.norm();
    let xi = (10f64).max((n as f64).sqrt()).max(
        sp.b.iter().map(|bi| n as f64 * (1.0 + bi.abs()) / 2.0).fold(0.0, f64::max),
    );
    let eta = (10f64).max((n as f64).sqrt());

    let mut x = CMat::identity(n, n) * C64::new(xi, 0.0);
    let mut z = CMat::identity(n, n) * C64::new(eta, 0.0);
    let mut xs = vec![xi; ns];
    let mut zs = vec![eta; ns];
    let mut y = vec![0.0; m];
    let mut lx = CMat::identity(n, n) * C64::new(xi.sqrt(), 0.0);
    let mut lz = CMat::identity(n, n) * C64::new(eta.sqrt(), 0.0);

    let mut trace = Vec::new();
    let mut status = SdpStatus::MaxIter;
    let mut kkt = KktResiduals::default();
    let mut iterations = 0;

    for it in 0..=opts.max_iter {
        iterations = it;
        let ax = sp.apply(&x, &xs);
        let rp: Vec<f64> = sp.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let rd = hermitian_part(&(&sp.c - sp.adjoint(&y) - &z));
        let rds: Vec<f64> = sp
            .slack_rows
            .iter()
            .enumerate()
            .map(|(k, &row)| -y[row] - zs[k])
            .collect();
        let pobj = trace_product(&sp.c, &x).re;
        let dobj = dot(&sp.b, &y);
        let xz = trace_product(&x, &z).re + dot(&xs, &zs);
        let mu = xz / cone_dim;
        let rd_norm = (rd.norm_squared() + dot(&rds, &rds)).sqrt();
        kkt = KktResiduals {
            primal: norm(&rp) / (1.0 + b_norm),
            dual: rd_norm / (1.0 + c_norm),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        trace.push(IterateRecord {
            primal_objective: pobj * sp.c_scale,
            dual_objective: dobj * sp.c_scale,
            residuals: kkt,
        });
        if kkt.primal <= opts.tol && kkt.dual <= opts.tol && kkt.gap <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        // Farkas certificate: y/bᵀy with −A*(y)/bᵀy ⪰ 0 (up to residuals).
        if dobj > 0.0 && (c_norm + rd_norm) / dobj <= opts.tol && kkt.primal > opts.tol {
            status = SdpStatus::Infeasible;
            break;
        }
        if it == opts.max_iter {
            break;
        }

        let Some(zi) = inverse_from_factor(&lz) else { break };
        let schur = sp.schur(&x, &zi, &xs, &zs);
        let Some(chol_m) = factor_schur(schur) else { break };
        let res = Residuals { rp, rd, rds };
        let xzm = matmul(&x, &z);

        // Predictor.
        let rc_aff = -&xzm;
        let rcs_aff: Vec<f64> = xs.iter().zip(&zs).map(|(a, b)| -a * b).collect();
        let aff = direction(&sp, &chol_m, &x, &zi, &xs, &zs, &res, &rc_aff, &rcs_aff);
        let ap_aff = 1f64.min(max_step_psd(&lx, &aff.dx)).min(max_step_vec(&xs, &aff.dxs));
        let ad_aff = 1f64.min(max_step_psd(&lz, &aff.dz)).min(max_step_vec(&zs, &aff.dzs));
        let x_aff = &x + &aff.dx * C64::new(ap_aff, 0.0);
        let z_aff = &z + &aff.dz * C64::new(ad_aff, 0.0);
        let mut mu_aff = trace_product(&x_aff, &z_aff).re;
        for k in 0..ns {
            mu_aff += (xs[k] + ap_aff * aff.dxs[k]) * (zs[k] + ad_aff * aff.dzs[k]);
        }
        mu_aff /= cone_dim;
        let sigma = (mu_aff.max(0.0) / mu).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let mut rc = matmul(&aff.dx, &aff.dz) * C64::new(-1.0, 0.0) - &xzm;
        for i in 0..n {
            rc[(i, i)] += sigma * mu;
        }
        let rc_s: Vec<f64> = (0..ns)
            .map(|k| sigma * mu - xs[k] * zs[k] - aff.dxs[k] * aff.dzs[k])
            .collect();
        let dir = direction(&sp, &chol_m, &x, &zi, &xs, &zs, &res, &rc, &rc_s);

        let gamma = 0.9 + 0.09 * ap_aff.min(ad_aff);
        let ap = 1f64.min(gamma * max_step_psd(&lx, &dir.dx)).min(gamma * max_step_vec(&xs, &dir.dxs));
        let ad = 1f64.min(gamma * max_step_psd(&lz, &dir.dz)).min(gamma * max_step_vec(&zs, &dir.dzs));
        if !(ap > 0.0 && ad > 0.0) || !ap.is_finite() || !ad.is_finite() {
            break;
        }
        let Some((ap, x_new, lx_new)) = safeguarded_step(&x, &dir.dx, ap) else { break };
        let Some((ad, z_new, lz_new)) = safeguarded_step(&z, &dir.dz, ad) else { break };
        x = x_new;
        z = z_new;
        lx = lx_new;
        lz = lz_new;
        for k in 0..ns {
            xs[k] += ap * dir.dxs[k];
            zs[k] += ad * dir.dzs[k];
        }
        for i in 0..m {
            y[i] += ad * dir.dy[i];
        }
    }

    let y_out = x;
    let objective_value = trace_product(&p.objective, &y_out).re;
    let dual_objective = dot(&sp.b, &y) * sp.c_scale;
    let multipliers = y
        .iter()
        .zip(&sp.row_scale)
        .map(|(yi, s)| yi * s * sp.c_scale)
        .collect();
    Ok(SdpSolution {
        y: y_out,
        objective_value,
        dual_objective,
        multipliers,
        status,
        kkt_residuals: kkt,
        iterations,
        trace,
    })
}
