//! Likelihood, goodness-of-fit statistics, and maximum likelihood estimation
//! by moment-equation solving, including the extended MLE on boundary faces
//! of the marginal cone.
//!
//! Fitting maximizes the product-multinomial log-likelihood over the model
//! parameters with the per-dyad constants eliminated by normalization. The
//! optimizer is a damped Newton ascent on a reduced coordinate system (an
//! exact-arithmetic basis of the span of the non-normalizing column parts),
//! declared converged when the moment residual `||A p - t||_inf` reaches the
//! tolerance. A cyclic one-parameter scaler is provided as a cross-check
//! mode.

use crate::error::{invalid_arg, Error, Result};
use crate::geometry::{self, exact, FacialSet};
use crate::model::{
    dyad_count, DesignMatrix, MatrixForm, Network, ParameterVector, ProbabilityVector, RowLabel,
    SufficientStatistic,
};
use serde::Serialize;

/// Which goodness-of-fit statistic to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GofKind {
    /// `sum (x - p)^2 / p` over the support of `p` (the classical statistic).
    PearsonStandard,
    /// `sum (x - p)^2 / p^2`, the squared-denominator form printed alongside
    /// this model's test procedure; retained for fidelity.
    PearsonPaper,
    /// `sum x log(x / p)` with `0 log 0 = 0` (no factor 2).
    LikelihoodRatio,
}

impl GofKind {
    pub fn parse(s: &str) -> Option<GofKind> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" | "pearson-standard" | "chi2" => Some(GofKind::PearsonStandard),
            "pearson-paper" | "pearson2" => Some(GofKind::PearsonPaper),
            "lr" | "likelihood-ratio" | "g" => Some(GofKind::LikelihoodRatio),
            _ => None,
        }
    }
}

impl std::fmt::Display for GofKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GofKind::PearsonStandard => f.write_str("pearson"),
            GofKind::PearsonPaper => f.write_str("pearson-paper"),
            GofKind::LikelihoodRatio => f.write_str("likelihood-ratio"),
        }
    }
}

/// Log-likelihood of a one-hot network under dyad probabilities: the sum of
/// the logs of the selected coordinates; minus infinity when one vanishes.
pub fn log_likelihood(p: &ProbabilityVector, x: &Network) -> f64 {
    assert_eq!(p.n, x.n(), "probability vector and network disagree on n");
    let mut acc = 0.0;
    for (dix, cfg) in x.configs().iter().enumerate() {
        let v = p.p[4 * dix + cfg.index()];
        if v <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += v.ln();
    }
    acc
}

/// Goodness-of-fit statistic of an observed network against fitted dyad
/// probabilities. A fitted zero where the network puts mass yields an
/// infinite statistic (signaled in-band, not an error).
pub fn gof_statistic(x: &Network, p_hat: &ProbabilityVector, kind: GofKind) -> f64 {
    assert_eq!(p_hat.n, x.n(), "probability vector and network disagree on n");
    let one_hot = x.one_hot();
    let mut acc = 0.0;
    for (c, &xc) in one_hot.iter().enumerate() {
        let p = p_hat.p[c];
        let xf = xc as f64;
        if p <= 0.0 {
            if xc != 0 {
                return f64::INFINITY;
            }
            continue; // 0 log 0 = 0, and a vanished cell contributes nothing
        }
        match kind {
            GofKind::PearsonStandard => acc += (xf - p) * (xf - p) / p,
            GofKind::PearsonPaper => acc += (xf - p) * (xf - p) / (p * p),
            GofKind::LikelihoodRatio => {
                if xc != 0 {
                    acc += xf * (xf / p).ln();
                }
            }
        }
    }
    acc
}

/// Options controlling the moment-equation solvers.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FitOptions {
    /// Supremum-norm tolerance on `A p - t`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

/// Result of an (extended) maximum likelihood fit.
#[derive(Clone, Debug, Serialize)]
pub struct MleResult {
    pub p_hat: ProbabilityVector,
    /// Gauge-fixed parameter estimate; absent for boundary fits, where some
    /// parameters diverge.
    pub zeta_hat: Option<ParameterVector>,
    /// True iff the ordinary MLE exists (the margins are interior).
    pub exists: bool,
    pub facial_set: FacialSet,
    /// Supremum norm of `A p_hat - t` at termination.
    pub moment_residual: f64,
    pub iterations: usize,
    /// Human-readable description of the parameter gauge.
    pub gauge: String,
}

fn check_fit_inputs(a: &DesignMatrix, t: &SufficientStatistic) -> Result<()> {
    if a.form != MatrixForm::Full {
        return Err(invalid_arg("fitting requires the full design matrix"));
    }
    if t.values.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "statistic has {} entries, matrix has {} rows",
            t.values.len(),
            a.rows()
        )));
    }
    for d in 0..dyad_count(a.n) {
        if t.values[d] != 1 {
            return Err(invalid_arg(
                "observable statistics carry one observation per dyad",
            ));
        }
    }
    Ok(())
}

/// Fit the MLE for the margins `t`.
///
/// When `t` is interior the result is the strictly positive solution of the
/// moment equations; otherwise `exists` is false and the extended MLE on the
/// boundary face is returned.
pub fn fit_mle(a: &DesignMatrix, t: &SufficientStatistic, opts: FitOptions) -> Result<MleResult> {
    check_fit_inputs(a, t)?;
    if geometry::in_relative_interior(a, t)? {
        let target: Vec<f64> = t.values.iter().map(|&v| v as f64).collect();
        let fit = fit_from_moments(a, &target, None, opts)?;
        let (zeta, gauge) = gauge_fix(a, &fit.zeta_range);
        Ok(MleResult {
            p_hat: fit.p,
            zeta_hat: Some(zeta),
            exists: true,
            facial_set: FacialSet::full(a.cols()),
            moment_residual: fit.residual,
            iterations: fit.iterations,
            gauge,
        })
    } else {
        extended_mle(a, t, opts)
    }
}

/// Fit the extended MLE: restrict the model to the facial set of the face of
/// the marginal cone containing `t` in its relative interior, fit there, and
/// embed with zeros off the face. The support of the result equals the
/// facial set.
pub fn extended_mle(
    a: &DesignMatrix,
    t: &SufficientStatistic,
    opts: FitOptions,
) -> Result<MleResult> {
    check_fit_inputs(a, t)?;
    let facial = geometry::facial_set(a, t)?;
    let target: Vec<f64> = t.values.iter().map(|&v| v as f64).collect();
    let restricted = if facial.is_full() {
        None
    } else {
        Some(facial.indices.as_slice())
    };
    let fit = fit_from_moments(a, &target, restricted, opts)?;
    let exists = facial.is_full();
    let (zeta_hat, gauge) = if exists {
        let (z, g) = gauge_fix(a, &fit.zeta_range);
        (Some(z), g)
    } else {
        (
            None,
            "boundary fit: parameters diverge, probabilities only".to_string(),
        )
    };
    Ok(MleResult {
        p_hat: fit.p,
        zeta_hat,
        exists,
        facial_set: facial,
        moment_residual: fit.residual,
        iterations: fit.iterations,
        gauge,
    })
}

/// Raw output of the Newton solver, before gauge fixing.
pub struct MomentFit {
    pub p: ProbabilityVector,
    /// Parameter vector over the non-normalizing rows, in the range-space
    /// gauge the solver works in.
    pub zeta_range: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Solve the moment equations `A p = target` over the log-linear model with
/// per-dyad normalization, optionally restricted to a column subset (every
/// dyad must keep at least one column).
///
/// The computational core of [`fit_mle`] and [`extended_mle`]; also exposed
/// for diagnostic use with fractional targets (for example `target = A p*`
/// for a known model point `p*`). It assumes the target is consistent with
/// the (restricted) model closure; inconsistent targets report
/// non-convergence.
pub fn fit_from_moments(
    a: &DesignMatrix,
    target: &[f64],
    restrict_to: Option<&[usize]>,
    opts: FitOptions,
) -> Result<MomentFit> {
    if a.form != MatrixForm::Full {
        return Err(invalid_arg("fitting requires the full design matrix"));
    }
    if target.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} entries, matrix has {} rows",
            target.len(),
            a.rows()
        )));
    }
    let nd = dyad_count(a.n);
    let nl = a.non_lambda_rows();
    let d_rows = nl.len();
    let allowed: Vec<bool> = match restrict_to {
        None => vec![true; a.cols()],
        Some(ix) => {
            let mut v = vec![false; a.cols()];
            for &c in ix {
                if c >= a.cols() {
                    return Err(invalid_arg(format!("restriction column {c} out of range")));
                }
                v[c] = true;
            }
            v
        }
    };
    // non-normalizing part of each column
    let cols: Vec<Vec<f64>> = (0..a.cols())
        .map(|c| nl.clone().map(|r| a.entry(r, c) as f64).collect())
        .collect();
    let mut per_dyad: Vec<Vec<usize>> = vec![Vec::new(); nd];
    for c in 0..a.cols() {
        if allowed[c] {
            per_dyad[c / 4].push(c);
        }
    }
    if per_dyad.iter().any(|g| g.is_empty()) {
        return Err(invalid_arg("a dyad lost all of its configurations"));
    }

    // reduced coordinates: an independent subset of the allowed columns'
    // non-normalizing parts, found by exact elimination
    let allowed_ix: Vec<usize> = (0..a.cols()).filter(|&c| allowed[c]).collect();
    let rat_rows: Vec<Vec<exact::Rat>> = allowed_ix
        .iter()
        .map(|&c| exact::row_from_i64(&nl.clone().map(|r| a.entry(r, c)).collect::<Vec<_>>()))
        .collect();
    let pivots = independent_rows(&rat_rows);
    let basis: Vec<Vec<f64>> = pivots
        .iter()
        .map(|&k| cols[allowed_ix[k]].clone())
        .collect();
    let r = basis.len();

    let target_nl: Vec<f64> = nl.clone().map(|row| target[row]).collect();
    let mut u = vec![0.0f64; r];
    let mut iterations = 0usize;

    let zeta_of = |u: &[f64]| -> Vec<f64> {
        let mut zeta = vec![0.0f64; d_rows];
        for (k, b) in basis.iter().enumerate() {
            if u[k] != 0.0 {
                for (z, &bv) in zeta.iter_mut().zip(b.iter()) {
                    *z += u[k] * bv;
                }
            }
        }
        zeta
    };
    let compute_p = |zeta: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0f64; a.cols()];
        for group in &per_dyad {
            let mut mx = f64::NEG_INFINITY;
            for &c in group {
                let w: f64 = cols[c].iter().zip(zeta).map(|(a, z)| a * z).sum();
                p[c] = w;
                mx = mx.max(w);
            }
            let mut zsum = 0.0;
            for &c in group {
                p[c] = (p[c] - mx).exp();
                zsum += p[c];
            }
            for &c in group {
                p[c] /= zsum;
            }
        }
        p
    };
    // log-likelihood up to a constant: zeta . t' - sum_d log Z_d, with
    // log Z_d recovered from any surviving coordinate of the dyad
    let loglik = |zeta: &[f64], p: &[f64]| -> f64 {
        let lin: f64 = zeta.iter().zip(&target_nl).map(|(z, t)| z * t).sum();
        let mut logz = 0.0;
        for group in &per_dyad {
            let c0 = group[0];
            let w0: f64 = cols[c0].iter().zip(zeta).map(|(a, z)| a * z).sum();
            logz += w0 - p[c0].ln();
        }
        lin - logz
    };
    let residual_of = |p: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for row in 0..a.rows() {
            let mut m = 0.0;
            for group in &per_dyad {
                for &c in group {
                    m += a.entry(row, c) as f64 * p[c];
                }
            }
            worst = worst.max((m - target[row]).abs());
        }
        worst
    };

    let mut zeta = zeta_of(&u);
    let mut p = compute_p(&zeta);
    let mut residual = residual_of(&p);
    while residual > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        // reduced sufficient statistics per allowed column
        let mut grad = vec![0.0f64; r];
        let mut hess = vec![vec![0.0f64; r]; r];
        // expected margins over the non-normalizing rows
        let mut mean_rows = vec![0.0f64; d_rows];
        for group in &per_dyad {
            for &c in group {
                for (row, m) in mean_rows.iter_mut().enumerate() {
                    *m += cols[c][row] * p[c];
                }
            }
        }
        for (k, b) in basis.iter().enumerate() {
            grad[k] = b
                .iter()
                .zip(target_nl.iter().zip(&mean_rows))
                .map(|(bv, (t, m))| bv * (t - m))
                .sum();
        }
        for group in &per_dyad {
            let stats: Vec<Vec<f64>> = group
                .iter()
                .map(|&c| {
                    basis
                        .iter()
                        .map(|b| b.iter().zip(&cols[c]).map(|(bv, av)| bv * av).sum())
                        .collect()
                })
                .collect();
            let mean: Vec<f64> = (0..r)
                .map(|k| group.iter().zip(&stats).map(|(&c, s)| p[c] * s[k]).sum())
                .collect();
            for (gi, &c) in group.iter().enumerate() {
                for k in 0..r {
                    let dk = stats[gi][k] - mean[k];
                    if dk == 0.0 {
                        continue;
                    }
                    for l in 0..=k {
                        hess[k][l] += p[c] * dk * (stats[gi][l] - mean[l]);
                    }
                }
            }
        }
        for k in 0..r {
            for l in (k + 1)..r {
                hess[k][l] = hess[l][k];
            }
        }
        let step = solve_psd(&mut hess, &grad);
        // Damped step. Prefer a strict moment-residual decrease: close to the
        // solution the log-likelihood flattens below f64 resolution while the
        // residual still carries signal. Fall back to likelihood ascent for
        // the global phase, where the residual need not shrink monotonically.
        let base_ll = loglik(&zeta, &p);
        let mut accepted = false;
        let mut scale = 1.0f64;
        for _ in 0..60 {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(uu, s)| uu + scale * s).collect();
            let ztrial = zeta_of(&trial);
            let ptrial = compute_p(&ztrial);
            if residual_of(&ptrial) < residual {
                u = trial;
                zeta = ztrial;
                p = ptrial;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            scale = 1.0;
            for _ in 0..60 {
                let trial: Vec<f64> =
                    u.iter().zip(&step).map(|(uu, s)| uu + scale * s).collect();
                let ztrial = zeta_of(&trial);
                let ptrial = compute_p(&ztrial);
                if loglik(&ztrial, &ptrial) > base_ll {
                    u = trial;
                    zeta = ztrial;
                    p = ptrial;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
        }
        if !accepted {
            break;
        }
        residual = residual_of(&p);
    }

    if residual > opts.tol {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }

    // embed with zeros off the restriction
    let mut pv = vec![0.0f64; a.cols()];
    for group in &per_dyad {
        for &c in group {
            pv[c] = p[c];
        }
    }
    Ok(MomentFit {
        p: ProbabilityVector { n: a.n, p: pv },
        zeta_range: zeta,
        residual,
        iterations,
    })
}

/// Indices of a maximal linearly independent subset of the given rows.
fn independent_rows(rows: &[Vec<exact::Rat>]) -> Vec<usize> {
    use num_traits::Zero;
    let width = rows.first().map_or(0, |r| r.len());
    let mut picked: Vec<usize> = Vec::new();
    let mut echelon: Vec<Vec<exact::Rat>> = Vec::new();
    for (ix, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for e in &echelon {
            let lead = e.iter().position(|x| !x.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let f = &v[lead] / &e[lead];
                for c in 0..width {
                    let sub = &e[c] * &f;
                    v[c] = &v[c] - sub;
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            echelon.push(v);
            picked.push(ix);
        }
    }
    picked
}

/// Solve `H x = g` for symmetric positive semidefinite `H`, zeroing the step
/// along (numerically) null directions; on targets consistent with the model
/// the gradient vanishes there too.
fn solve_psd(h: &mut [Vec<f64>], g: &[f64]) -> Vec<f64> {
    let r = g.len();
    let mut x = g.to_vec();
    let mut scale = 0.0f64;
    for row in h.iter() {
        for &v in row.iter() {
            scale = scale.max(v.abs());
        }
    }
    let eps = (scale * 1e-13).max(f64::MIN_POSITIVE);
    for k in 0..r {
        let (piv, pval) = (k..r)
            .map(|i| (i, h[i][k].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((k, 0.0));
        if pval <= eps {
            for row in h.iter_mut() {
                row[k] = 0.0;
            }
            h[k].iter_mut().for_each(|v| *v = 0.0);
            x[k] = 0.0;
            continue;
        }
        h.swap(k, piv);
        x.swap(k, piv);
        for i in (k + 1)..r {
            if h[i][k] != 0.0 {
                let f = h[i][k] / h[k][k];
                for c in k..r {
                    h[i][c] -= f * h[k][c];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..r).rev() {
        if h[k][k] == 0.0 {
            x[k] = 0.0;
            continue;
        }
        let mut acc = x[k];
        for c in (k + 1)..r {
            acc -= h[k][c] * x[c];
        }
        x[k] = acc / h[k][k];
    }
    x
}

/// Fix the reporting gauge of a parameter estimate: shift along the null
/// directions of the parameter-to-probability map so the first out-degree,
/// first in-degree, and (when present) first per-node reciprocation
/// parameters vanish.
fn gauge_fix(a: &DesignMatrix, zeta_range: &[f64]) -> (ParameterVector, String) {
    let nl = a.non_lambda_rows();
    let labels: Vec<RowLabel> = nl.clone().map(|r| a.row_labels()[r]).collect();
    // null space of zeta -> per-column weights, i.e. vectors orthogonal to
    // every column's non-normalizing part... here: kernel of the transpose
    let rows: Vec<Vec<exact::Rat>> = (0..a.cols())
        .map(|c| exact::row_from_i64(&nl.clone().map(|r| a.entry(r, c)).collect::<Vec<_>>()))
        .collect();
    let kernel = exact::nullspace(&rows, labels.len());
    let pins: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, lab)| {
            matches!(
                lab,
                RowLabel::Alpha(0) | RowLabel::Beta(0) | RowLabel::RhoNode(0)
            )
        })
        .map(|(ix, _)| ix)
        .collect();
    let gauge_desc = "alpha_1 = beta_1 = 0 (and rho_1 = 0 when per-node)".to_string();
    let mut zeta = zeta_range.to_vec();
    if !pins.is_empty() && kernel.len() == pins.len() {
        let k = pins.len();
        let mut m: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| rat_to_f64(&kernel[j][pins[i]])).collect())
            .collect();
        let rhs: Vec<f64> = pins.iter().map(|&ix| zeta[ix]).collect();
        let coef = solve_psd(&mut m, &rhs);
        for (j, kv) in kernel.iter().enumerate() {
            if coef[j] != 0.0 {
                for (z, kvv) in zeta.iter_mut().zip(kv.iter()) {
                    *z -= coef[j] * rat_to_f64(kvv);
                }
            }
        }
    }
    (ParameterVector { values: zeta }, gauge_desc)
}

fn rat_to_f64(r: &exact::Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(0.0)
}

/// Cross-check fitter: cyclic one-parameter Newton updates (a scaling-style
/// sweep over the non-normalizing rows). Interior margins only; slower than
/// the reduced Newton but independent of it.
pub fn fit_mle_ips(
    a: &DesignMatrix,
    t: &SufficientStatistic,
    opts: FitOptions,
) -> Result<MleResult> {
    check_fit_inputs(a, t)?;
    if !geometry::in_relative_interior(a, t)? {
        return Err(invalid_arg(
            "the scaling cross-check handles interior margins only",
        ));
    }
    let nd = dyad_count(a.n);
    let nl = a.non_lambda_rows();
    let d_rows = nl.len();
    let cols: Vec<Vec<f64>> = (0..a.cols())
        .map(|c| nl.clone().map(|r| a.entry(r, c) as f64).collect())
        .collect();
    let target: Vec<f64> = nl.clone().map(|r| t.values[r] as f64).collect();

    let compute_p = |zeta: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0f64; a.cols()];
        for d in 0..nd {
            let mut mx = f64::NEG_INFINITY;
            for k in 0..4 {
                let c = 4 * d + k;
                let w: f64 = cols[c].iter().zip(zeta).map(|(a, z)| a * z).sum();
                p[c] = w;
                mx = mx.max(w);
            }
            let mut zsum = 0.0;
            for k in 0..4 {
                let c = 4 * d + k;
                p[c] = (p[c] - mx).exp();
                zsum += p[c];
            }
            for k in 0..4 {
                p[4 * d + k] /= zsum;
            }
        }
        p
    };

    let mut zeta = vec![0.0f64; d_rows];
    let mut iterations = 0usize;
    loop {
        let p = compute_p(&zeta);
        let mut worst = 0.0f64;
        for (row, &tv) in target.iter().enumerate() {
            let m: f64 = (0..a.cols()).map(|c| cols[c][row] * p[c]).sum();
            worst = worst.max((m - tv).abs());
        }
        if worst <= opts.tol {
            let mut full_resid = 0.0f64;
            for row in 0..a.rows() {
                let m: f64 = (0..a.cols()).map(|c| a.entry(row, c) as f64 * p[c]).sum();
                full_resid = full_resid.max((m - t.values[row] as f64).abs());
            }
            let (zeta_hat, gauge) = gauge_fix(a, &zeta);
            return Ok(MleResult {
                p_hat: ProbabilityVector { n: a.n, p },
                zeta_hat: Some(zeta_hat),
                exists: true,
                facial_set: FacialSet::full(a.cols()),
                moment_residual: full_resid,
                iterations,
                gauge,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: worst,
            });
        }
        iterations += 1;
        for row in 0..d_rows {
            let p = compute_p(&zeta);
            let mean: f64 = (0..a.cols()).map(|c| cols[c][row] * p[c]).sum();
            let mut var = 0.0f64;
            for d in 0..nd {
                let bm: f64 = (0..4).map(|k| cols[4 * d + k][row] * p[4 * d + k]).sum();
                for k in 0..4 {
                    let c = 4 * d + k;
                    var += p[c] * (cols[c][row] - bm) * (cols[c][row] - bm);
                }
            }
            if var > 1e-14 {
                zeta[row] += (target[row] - mean) / var;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        enumerate_networks, probabilities_from_parameters, sufficient_statistic, DyadConfig,
        Network, ReciprocationVariant,
    };

    fn full(n: usize, v: ReciprocationVariant) -> DesignMatrix {
        DesignMatrix::build(n, v, MatrixForm::Full).unwrap()
    }

    fn uniform(n: usize) -> ProbabilityVector {
        ProbabilityVector {
            n,
            p: vec![0.25; 4 * dyad_count(n)],
        }
    }

    #[test]
    fn uniform_log_likelihood() {
        for x in enumerate_networks(3).take(7) {
            let ll = log_likelihood(&uniform(3), &x);
            assert!((ll - 3.0 * 0.25f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_probability_gives_negative_infinity() {
        let mut p = uniform(3);
        let x = Network::parse_line("3 01 10 01").unwrap();
        p.p[2] = 0.0; // the (0,1) slot of the first dyad, which x selects
        assert_eq!(log_likelihood(&p, &x), f64::NEG_INFINITY);
    }

    // Derived oracle: exp(log-likelihood) equals the direct product.
    #[test]
    fn log_likelihood_matches_product_oracle() {
        let a = full(3, ReciprocationVariant::Constant);
        let mut zeta = ParameterVector::zeros(&a);
        for (k, z) in zeta.values.iter_mut().enumerate() {
            *z = (k as f64 * 0.37).sin() * 0.8;
        }
        let p = probabilities_from_parameters(&a, &zeta).unwrap();
        for ix in [0u128, 5, 21, 63] {
            let x = Network::from_index(3, ix);
            let direct: f64 = x
                .configs()
                .iter()
                .enumerate()
                .map(|(d, c)| p.p[4 * d + c.index()])
                .product();
            assert!((log_likelihood(&p, &x).exp() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn likelihood_ratio_at_uniform_is_three_log_four() {
        let x = Network::parse_line("3 01 10 01").unwrap();
        let g = gof_statistic(&x, &uniform(3), GofKind::LikelihoodRatio);
        assert!((g - 3.0 * 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_fiber_members_share_statistics() {
        let x1 = Network::parse_line("3 01 10 01").unwrap();
        let x2 = Network::parse_line("3 10 01 10").unwrap();
        for kind in [
            GofKind::PearsonStandard,
            GofKind::PearsonPaper,
            GofKind::LikelihoodRatio,
        ] {
            let g1 = gof_statistic(&x1, &uniform(3), kind);
            let g2 = gof_statistic(&x2, &uniform(3), kind);
            assert!((g1 - g2).abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn degenerate_point_mass_scores_zero() {
        let x = Network::parse_line("3 11 00 10").unwrap();
        let mut p = ProbabilityVector {
            n: 3,
            p: vec![0.0; 12],
        };
        for (d, c) in x.configs().iter().enumerate() {
            p.p[4 * d + c.index()] = 1.0;
        }
        for kind in [
            GofKind::PearsonStandard,
            GofKind::PearsonPaper,
            GofKind::LikelihoodRatio,
        ] {
            assert_eq!(gof_statistic(&x, &p, kind), 0.0, "{kind}");
        }
    }

    #[test]
    fn mass_outside_support_is_infinite() {
        let x = Network::parse_line("3 11 00 10").unwrap();
        let mut p = uniform(3);
        p.p[DyadConfig::Mutual.index()] = 0.0;
        assert_eq!(
            gof_statistic(&x, &p, GofKind::PearsonStandard),
            f64::INFINITY
        );
    }

    #[test]
    fn interior_three_node_fit_is_uniform() {
        let a = full(3, ReciprocationVariant::Zero);
        let x = Network::parse_line("3 01 10 01").unwrap();
        let t = sufficient_statistic(&a, &x).unwrap();
        let fit = fit_mle(&a, &t, FitOptions::default()).unwrap();
        assert!(fit.exists);
        assert!(fit.facial_set.is_full());
        for &v in &fit.p_hat.p {
            assert!((v - 0.25).abs() < 1e-8, "expected the uniform fit, got {v}");
        }
        assert!(fit.moment_residual <= 1e-8);
        // gauge: pinned coordinates vanish
        let zeta = fit.zeta_hat.unwrap();
        for (zi, r) in a.non_lambda_rows().enumerate() {
            match a.row_labels()[r] {
                RowLabel::Alpha(0) | RowLabel::Beta(0) => {
                    assert!(zeta.values[zi].abs() < 1e-8)
                }
                _ => {}
            }
        }
    }

    // Derived self-consistency oracle: a random model point's margins refit
    // to the same point.
    #[test]
    fn refit_recovers_random_model_points() {
        for v in ReciprocationVariant::ALL {
            let a = full(4, v);
            let mut zeta = ParameterVector::zeros(&a);
            for (k, z) in zeta.values.iter_mut().enumerate() {
                *z = ((k * 83 % 17) as f64 / 17.0 - 0.5) * 1.4;
            }
            let p_star = probabilities_from_parameters(&a, &zeta).unwrap();
            let target: Vec<f64> = (0..a.rows())
                .map(|r| {
                    (0..a.cols())
                        .map(|c| a.entry(r, c) as f64 * p_star.p[c])
                        .sum()
                })
                .collect();
            let fit = fit_from_moments(&a, &target, None, FitOptions::default()).unwrap();
            for (got, want) in fit.p.p.iter().zip(&p_star.p) {
                assert!((got - want).abs() < 1e-6, "{v}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn extended_mle_of_empty_network_is_point_mass() {
        let a = full(3, ReciprocationVariant::Zero);
        let t = sufficient_statistic(&a, &Network::empty(3)).unwrap();
        let fit = extended_mle(&a, &t, FitOptions::default()).unwrap();
        assert!(!fit.exists);
        assert!(fit.zeta_hat.is_none());
        for d in 0..3 {
            let block = fit.p_hat.dyad_block(d);
            assert!((block[0] - 1.0).abs() < 1e-12);
            assert_eq!(&block[1..], &[0.0, 0.0, 0.0]);
        }
        assert!(fit.moment_residual <= 1e-10);
    }

    #[test]
    fn boundary_support_equals_facial_set_exhaustively() {
        let a = full(3, ReciprocationVariant::Zero);
        let mut seen = std::collections::HashSet::new();
        for x in enumerate_networks(3) {
            let t = sufficient_statistic(&a, &x).unwrap();
            if !seen.insert(t.clone()) {
                continue;
            }
            let fit = extended_mle(&a, &t, FitOptions::default()).unwrap();
            let support: Vec<usize> = fit
                .p_hat
                .p
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0.0)
                .map(|(c, _)| c)
                .collect();
            assert_eq!(support, fit.facial_set.indices, "t={t}");
            assert!(fit.moment_residual <= 1e-8);
            let interior = geometry::in_relative_interior(&a, &t).unwrap();
            assert_eq!(fit.exists, interior);
        }
    }

    #[test]
    fn fits_depend_only_on_margins() {
        let a = full(3, ReciprocationVariant::Zero);
        let x1 = Network::parse_line("3 01 10 01").unwrap();
        let x2 = Network::parse_line("3 10 01 10").unwrap();
        let t1 = sufficient_statistic(&a, &x1).unwrap();
        let t2 = sufficient_statistic(&a, &x2).unwrap();
        assert_eq!(t1, t2);
        let f1 = fit_mle(&a, &t1, FitOptions::default()).unwrap();
        let f2 = fit_mle(&a, &t2, FitOptions::default()).unwrap();
        // bit identical: the fit is a function of the margins alone
        assert_eq!(f1.p_hat.p, f2.p_hat.p);
    }

    #[test]
    fn fitted_likelihood_dominates_random_model_points() {
        let a = full(3, ReciprocationVariant::Zero);
        let x = Network::parse_line("3 01 10 01").unwrap();
        let t = sufficient_statistic(&a, &x).unwrap();
        let fit = fit_mle(&a, &t, FitOptions::default()).unwrap();
        let best = log_likelihood(&fit.p_hat, &x);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10_000 {
            let mut zeta = ParameterVector::zeros(&a);
            for z in zeta.values.iter_mut() {
                *z = (next() - 0.5) * 4.0;
            }
            let p = probabilities_from_parameters(&a, &zeta).unwrap();
            assert!(log_likelihood(&p, &x) <= best + 1e-9);
        }
    }

    #[test]
    fn scaling_cross_check_agrees_with_newton() {
        let a = full(3, ReciprocationVariant::Zero);
        let x = Network::parse_line("3 01 10 01").unwrap();
        let t = sufficient_statistic(&a, &x).unwrap();
        let newton = fit_mle(&a, &t, FitOptions::default()).unwrap();
        let scaled = fit_mle_ips(&a, &t, FitOptions::default()).unwrap();
        for (n, s) in newton.p_hat.p.iter().zip(&scaled.p_hat.p) {
            assert!((n - s).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_non_observable_lambda_block() {
        let a = full(3, ReciprocationVariant::Zero);
        let t = SufficientStatistic {
            values: vec![2, 1, 1, 1, 1, 1, 1, 1, 1, 3],
        };
        assert!(fit_mle(&a, &t, FitOptions::default()).is_err());
    }
}
