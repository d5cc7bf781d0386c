//! Pegg–Barnett phase states and hermitian phase operator, the q-GDO ladder
//! operators built on them, the polar decomposition of cyclic
//! representations, and the classical-limit sweep.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::report::{CheckEntry, CheckReport};
use crate::repspace::{
    admissibility_reason, build_cyclic_rep_theta0, check_cyclic_admissibility, check_gdo_relations,
    RepKind, Representation,
};
use crate::structure::{root_of_unity, Family, StructureFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDecomposition {
    #[serde(rename = "S")]
    pub s: usize,
    pub theta0: f64,
    /// `θ_m = θ₀ + 2πm/(S+1)`, all in `[θ₀, θ₀ + 2π)`.
    pub thetas: Vec<f64>,
    pub phase_states: ComplexMatrix,
    #[serde(rename = "Phi")]
    pub phi: ComplexMatrix,
    #[serde(rename = "expPhi")]
    pub exp_phi: ComplexMatrix,
}

fn check_s(s: usize) -> Result<()> {
    if s < 1 {
        Err(Error::invalid("phase construction needs S >= 1"))
    } else {
        Ok(())
    }
}

pub fn thetas(s: usize, theta0: f64) -> Vec<f64> {
    (0..=s)
        .map(|m| theta0 + 2.0 * PI * m as f64 / (s as f64 + 1.0))
        .collect()
}

/// Columns `|θ_m> = (S+1)^{-1/2} Σₙ e^{inθ_m}|n>`.
pub fn phase_states(s: usize, theta0: f64) -> Result<ComplexMatrix> {
    check_s(s)?;
    let th = thetas(s, theta0);
    let norm = 1.0 / (s as f64 + 1.0).sqrt();
    Ok(ComplexMatrix::from_fn(s + 1, s + 1, |n, m| {
        Complex64::from_polar(norm, n as f64 * th[m])
    }))
}

/// `U·diag(d)·U†`.
fn spectral(u: &ComplexMatrix, d: &[Complex64]) -> Result<ComplexMatrix> {
    u.matmul(&ComplexMatrix::from_diag(d))?.matmul(&u.adjoint())
}

fn decomposition(s: usize, theta0: f64, exp_phi: Option<ComplexMatrix>) -> Result<PhaseDecomposition> {
    let th = thetas(s, theta0);
    let u = phase_states(s, theta0)?;
    let phi = spectral(&u, &th.iter().map(|t| Complex64::new(*t, 0.0)).collect::<Vec<_>>())?;
    let exp_phi = match exp_phi {
        Some(e) => e,
        None => spectral(&u, &th.iter().map(|t| Complex64::from_polar(1.0, *t)).collect::<Vec<_>>())?,
    };
    Ok(PhaseDecomposition {
        s,
        theta0,
        thetas: th,
        phase_states: u,
        phi,
        exp_phi,
    })
}

/// `Φ = Σ θ_m |θ_m><θ_m|` and `e^{iΦ}`.
pub fn pb_phase_operator(s: usize, theta0: f64) -> Result<PhaseDecomposition> {
    check_s(s)?;
    decomposition(s, theta0, None)
}

/// `(a_PB, a_PB†) = (e^{iΦ}√N, √N e^{−iΦ})`.
pub fn pb_ladder_ops(s: usize, theta0: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let pd = pb_phase_operator(s, theta0)?;
    let sqrt_n = ComplexMatrix::from_real_diag(&(0..=s).map(|n| (n as f64).sqrt()).collect::<Vec<_>>());
    let a = pd.exp_phi.matmul(&sqrt_n)?;
    let adag = sqrt_n.matmul(&pd.exp_phi.adjoint())?;
    Ok((a, adag))
}

/// `1 − (S+1)|c_S|²` for the coherent state truncated to `n ≤ S` and
/// renormalized.
pub fn truncated_commutator_expectation(s: usize, alpha: Complex64) -> f64 {
    let x = alpha.norm_sqr();
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..=s {
        term *= x / n as f64;
        sum += term;
    }
    1.0 - (s as f64 + 1.0) * term / sum
}

/// `[a_PB, a_PB†] = I − (S+1)|S><S|` exactly, and the expectation of the
/// commutator in a truncated coherent state, which tends to 1 when
/// `|α|² ≪ S`.
pub fn check_truncated_commutator(s: usize, theta0: f64, alpha: Complex64, tol: f64) -> Result<CheckReport> {
    let (a, adag) = pb_ladder_ops(s, theta0)?;
    let dim = s + 1;
    let comm = a.commutator(&adag)?;
    let mut target = ComplexMatrix::identity(dim);
    target[(s, s)] = Complex64::new(-(s as f64), 0.0);
    let mut report = CheckReport::new();
    report.push(CheckEntry::new(
        "[a_PB, a_PB^dag] = I - (S+1)|S><S|",
        comm.max_abs_diff(&target)?,
        tol,
    ));
    report.push(CheckEntry::new("a_PB^dag = adjoint(a_PB)", adag.max_abs_diff(&a.adjoint())?, tol));
    report.push(CheckEntry::new("a_PB|0> = 0", a.column(0).iter().map(|v| v.norm()).fold(0.0, f64::max), tol));

    let mut c = vec![ZERO; dim];
    c[0] = Complex64::new(1.0, 0.0);
    for n in 1..dim {
        c[n] = c[n - 1] * alpha / (n as f64).sqrt();
    }
    let c = crate::numerics::normalize(&c);
    let cc = comm.apply(&c)?;
    let expectation: Complex64 = c.iter().zip(&cc).map(|(x, y)| x.conj() * y).sum();
    let formula = truncated_commutator_expectation(s, alpha);
    report.push(CheckEntry::new(
        "<[a_PB, a_PB^dag]> matches closed form",
        (expectation.re - formula).abs() + expectation.im.abs(),
        tol,
    ));
    let untruncated = 1.0
        - (s as f64 + 1.0) * (-alpha.norm_sqr()).exp() * alpha.norm_sqr().powi(s as i32)
            / (1..=s).map(|k| k as f64).product::<f64>();
    report.push(
        CheckEntry::new("<[a_PB, a_PB^dag]> = 1", (expectation.re - 1.0).abs(), tol).with_note(format!(
            "expectation {:.15e}; with the untruncated normalization e^(-|alpha|^2) it would be {:.15e}",
            expectation.re, untruncated
        )),
    );
    Ok(report)
}

fn sqrt_f_orbit(f: &StructureFunction, s: usize, eta: f64) -> Result<Vec<f64>> {
    (0..=s).map(|n| f.eval(n as f64 + eta).map(f64::sqrt)).collect()
}

/// `A = e^{iΦ}√𝓕(q^𝒩)`, `A† = √𝓕(q^𝒩)e^{−iΦ}` with `q^𝒩 = diag(q^{n+η})`.
/// Equals the cyclic representation with `ξ = e^{−i(S+1)θ₀}`.
pub fn new_ladder_ops(s: usize, theta0: f64, f: &StructureFunction, eta: f64) -> Result<Representation> {
    check_s(s)?;
    let adm = check_cyclic_admissibility(f, s, eta);
    if !adm.all_pass() {
        return Err(Error::Inadmissible {
            reason: admissibility_reason(&adm).unwrap_or_else(|| "inadmissible".into()),
        });
    }
    let pd = pb_phase_operator(s, theta0)?;
    let root = ComplexMatrix::from_real_diag(&sqrt_f_orbit(f, s, eta)?);
    let a = pd.exp_phi.matmul(&root)?;
    let adag = root.matmul(&pd.exp_phi.adjoint())?;
    let mut rep = build_cyclic_rep_theta0(f, s, eta, theta0)?;
    rep.a = a;
    rep.adag = adag;
    Ok(rep)
}

/// Polar decomposition `e^{iΦ} = 𝓕(q^{𝒩+1})^{−1/2}A` of a cyclic
/// representation, with `Φ` assembled from the analytic eigenpairs of
/// `e^{iΦ}` and verified against them.
pub fn exp_phase_from_rep(rep: &Representation) -> Result<PhaseDecomposition> {
    if rep.kind != RepKind::Cyclic {
        return Err(Error::KindMismatch {
            expected: "cyclic".into(),
            found: rep.kind.to_string(),
        });
    }
    let s = rep.s.ok_or_else(|| Error::invalid("cyclic representation without S"))?;
    if let Some(n) = rep.fdiag_next.iter().position(|v| *v <= 1e-12) {
        return Err(Error::Inadmissible {
            reason: format!("structure diagonal is not invertible at n = {n}"),
        });
    }
    let theta0 = match (rep.theta0, rep.xi) {
        (Some(t), _) => t,
        (None, Some(xi)) => -xi.arg() / (s as f64 + 1.0),
        (None, None) => 0.0,
    };
    let inv_root: Vec<f64> = rep.fdiag_next.iter().map(|v| 1.0 / v.sqrt()).collect();
    let exp_phi = ComplexMatrix::from_real_diag(&inv_root).matmul(&rep.a)?;
    let dim = s + 1;
    let unitarity = exp_phi.adjoint().matmul(&exp_phi)?.max_abs_diff(&ComplexMatrix::identity(dim))?;
    if unitarity > 1e-12 {
        return Err(Error::Verification(format!("e^(i Phi) is not unitary (deviation {unitarity:e})")));
    }
    let pd = decomposition(s, theta0, Some(exp_phi))?;
    let eig = eigenpair_residual(&pd)?;
    if eig > 1e-10 {
        return Err(Error::Verification(format!(
            "analytic eigenpairs of e^(i Phi) fail (residual {eig:e})"
        )));
    }
    Ok(pd)
}

/// `max_m ‖e^{iΦ}|θ_m> − e^{iθ_m}|θ_m>‖`.
fn eigenpair_residual(pd: &PhaseDecomposition) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (m, t) in pd.thetas.iter().enumerate() {
        let v = pd.phase_states.column(m);
        let w = pd.exp_phi.apply(&v)?;
        let z = Complex64::from_polar(1.0, *t);
        for (x, y) in w.iter().zip(&v) {
            worst = worst.max((x - z * y).norm());
        }
    }
    Ok(worst)
}

/// The consistency triangle and spectral checks for one `(S, θ₀, 𝓕, η)`.
pub fn check_phase_decomposition(s: usize, theta0: f64, f: &StructureFunction, eta: f64) -> Result<CheckReport> {
    let tol = 1e-10;
    let pb = pb_phase_operator(s, theta0)?;
    let rep = build_cyclic_rep_theta0(f, s, eta, theta0)?;
    let polar = exp_phase_from_rep(&rep)?;
    let new_rep = new_ladder_ops(s, theta0, f, eta)?;
    let dim = s + 1;
    let mut report = CheckReport::new();

    let u = &pb.phase_states;
    let gram = u.adjoint().matmul(u)?;
    report.push(CheckEntry::new("phase states orthonormal", gram.max_abs_diff(&ComplexMatrix::identity(dim))?, 1e-12));
    let completeness = u.matmul(&u.adjoint())?;
    report.push(CheckEntry::new(
        "sum |theta_m><theta_m| = I",
        completeness.max_abs_diff(&ComplexMatrix::identity(dim))?,
        1e-12,
    ));
    report.push(CheckEntry::new("Phi hermitian", pb.phi.max_abs_diff(&pb.phi.adjoint())?, 1e-12));
    let unit = pb.exp_phi.adjoint().matmul(&pb.exp_phi)?;
    report.push(CheckEntry::new("expPhi unitary", unit.max_abs_diff(&ComplexMatrix::identity(dim))?, 1e-12));

    let eig = pb.phi.hermitian_eigen()?;
    let mut sorted = pb.thetas.clone();
    sorted.sort_by(f64::total_cmp);
    let spec_dev = eig
        .values
        .iter()
        .zip(&sorted)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    report.push(CheckEntry::new("spectrum of Phi = {theta_m}", spec_dev, 1e-9));

    let phi_res = (0..dim)
        .map(|m| {
            let v = u.column(m);
            let w = pb.phi.apply(&v).unwrap_or_default();
            w.iter()
                .zip(&v)
                .map(|(x, y)| (x - pb.thetas[m] * y).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    report.push(CheckEntry::new("Phi|theta_m> = theta_m|theta_m>", phi_res, tol));

    report.push(CheckEntry::new("polar expPhi = PB expPhi", polar.exp_phi.max_abs_diff(&pb.exp_phi)?, tol));
    report.push(CheckEntry::new("polar Phi = PB Phi", polar.phi.max_abs_diff(&pb.phi)?, tol));
    report.push(CheckEntry::new("new ladder A = cyclic A", new_rep.a.max_abs_diff(&rep.a)?, 1e-12));
    report.push(CheckEntry::new("new ladder Adag = cyclic Adag", new_rep.adag.max_abs_diff(&rep.adag)?, 1e-12));
    let inv_root: Vec<f64> = new_rep.fdiag_next.iter().map(|v| 1.0 / v.sqrt()).collect();
    let from_new = ComplexMatrix::from_real_diag(&inv_root).matmul(&new_rep.a)?;
    report.push(CheckEntry::new("new ladder expPhi = PB expPhi", from_new.max_abs_diff(&pb.exp_phi)?, tol));
    report.push(CheckEntry::new("eigenpairs of polar expPhi", eigenpair_residual(&polar)?, tol));
    report.extend(check_gdo_relations(&new_rep, tol)?);
    Ok(report)
}

/// `e^{2πiN/(S+1)}|θ_m> = |θ_{m+1}>` (cyclically), `q^𝒩 = e^{2πiη/(S+1)}`
/// times that shift, and the shift to the power `S+1` is the identity.
pub fn phase_shift_check(s: usize, theta0: f64, eta: f64) -> Result<CheckReport> {
    let u = phase_states(s, theta0)?;
    let dim = s + 1;
    let step = 2.0 * PI / dim as f64;
    let shift = ComplexMatrix::from_diag(&(0..dim).map(|n| Complex64::from_polar(1.0, step * n as f64)).collect::<Vec<_>>());
    let mut res: f64 = 0.0;
    for m in 0..dim {
        let w = shift.apply(&u.column(m))?;
        let target = u.column((m + 1) % dim);
        for (x, y) in w.iter().zip(&target) {
            res = res.max((x - y).norm());
        }
    }
    let mut report = CheckReport::new();
    report.push(CheckEntry::new("shift |theta_m> = |theta_(m+1)>", res, 1e-12));
    let q = root_of_unity(s);
    let qn = ComplexMatrix::from_diag(
        &(0..dim)
            .map(|n| Complex64::from_polar(1.0, q.arg() * (n as f64 + eta)))
            .collect::<Vec<_>>(),
    );
    let expect = shift.scale(Complex64::from_polar(1.0, step * eta));
    report.push(CheckEntry::new("q^N = e^(2 pi i eta/(S+1)) shift", qn.max_abs_diff(&expect)?, 1e-12));
    let full = shift.pow(dim as u32)?;
    report.push(CheckEntry::new("shift^(S+1) = I", full.max_abs_diff(&ComplexMatrix::identity(dim))?, 1e-12));
    Ok(report)
}

/// How a parameter depends on `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum ScheduleValue {
    Const(f64),
    /// `1/(S+1)`.
    InverseSPlusOne,
    /// `c/(S+1)^p`.
    Power { c: f64, p: f64 },
}

impl ScheduleValue {
    pub fn at(&self, s: usize) -> f64 {
        let sp1 = s as f64 + 1.0;
        match *self {
            ScheduleValue::Const(v) => v,
            ScheduleValue::InverseSPlusOne => 1.0 / sp1,
            ScheduleValue::Power { c, p } => c / sp1.powf(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub eta: ScheduleValue,
    #[serde(rename = "K")]
    pub k: ScheduleValue,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            eta: ScheduleValue::InverseSPlusOne,
            k: ScheduleValue::InverseSPlusOne,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "S")]
    pub s: usize,
    pub eta: f64,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub n: usize,
    pub band_value: f64,
    pub oscillator_value: f64,
    pub abs_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// `(S, reason)` for points skipped as inadmissible.
    pub skipped: Vec<(usize, String)>,
}

impl SweepTable {
    /// `(S, max_n deviation)` in input order.
    pub fn max_deviation(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some((s, d)) if *s == r.s => *d = d.max(r.abs_deviation),
                _ => out.push((r.s, r.abs_deviation)),
            }
        }
        out
    }

    /// Least-squares slope of `log(max deviation)` against `log S`.
    pub fn loglog_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .max_deviation()
            .into_iter()
            .filter(|(_, d)| *d > 0.0)
            .map(|(s, d)| ((s as f64).ln(), d.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        Some(sxy / sxx)
    }

    /// True if the max deviation strictly decreases as `S` increases.
    pub fn is_monotone_decreasing(&self) -> bool {
        let mut md = self.max_deviation();
        md.sort_by_key(|(s, _)| *s);
        md.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// Raising-band entries `√𝓕(q^{n+η+1})`, `n < nmax`, of the cyclic
/// representation at each `S`, against the oscillator values `√(n+1)`.
pub fn classical_limit_sweep(
    s_list: &[usize],
    schedule: Schedule,
    nmax: usize,
    family: Family,
) -> Result<SweepTable> {
    if !matches!(family, Family::QAbs | Family::QAbsShift) {
        return Err(Error::invalid(format!(
            "classical-limit sweep supports q_abs and q_abs_shift, got {family}"
        )));
    }
    let mut table = SweepTable {
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for &s in s_list {
        if nmax > s {
            return Err(Error::invalid(format!("nmax = {nmax} exceeds S = {s}")));
        }
        let eta = schedule.eta.at(s);
        let q = root_of_unity(s);
        let (f, k) = match family {
            Family::QAbs => (StructureFunction::q_abs(q)?, None),
            _ => {
                let k = schedule.k.at(s);
                (StructureFunction::q_abs_shift(q, k)?, Some(k))
            }
        };
        let rep = match build_cyclic_rep_theta0(&f, s, eta, 0.0) {
            Ok(r) => r,
            Err(Error::Inadmissible { reason }) => {
                table.skipped.push((s, reason));
                continue;
            }
            Err(e) => return Err(e),
        };
        for n in 0..nmax {
            let band = rep.adag[(n + 1, n)].norm();
            let osc = (n as f64 + 1.0).sqrt();
            table.rows.push(SweepRow {
                s,
                eta,
                k,
                n,
                band_value: band,
                oscillator_value: osc,
                abs_deviation: (band - osc).abs(),
            });
        }
    }
    Ok(table)
}

/// Summary checks for a sweep: deviation at the largest `S` below `tol`,
/// monotone decrease, and the log-log slope within `0.2` of `−2`.
pub fn check_classical_limit(table: &SweepTable, tol: f64) -> CheckReport {
    let mut report = CheckReport::new();
    let md = table.max_deviation();
    if let Some((s, d)) = md.iter().max_by_key(|(s, _)| *s) {
        report.push(CheckEntry::new(format!("max deviation at S={s}"), *d, tol));
    }
    report.push(CheckEntry::new(
        "deviation decreasing in S",
        if table.is_monotone_decreasing() { 0.0 } else { 1.0 },
        0.0,
    ));
    if let Some(slope) = table.loglog_slope() {
        report.push(
            CheckEntry::new("log-log slope = -2", (slope + 2.0).abs(), 0.2).with_note(format!("slope {slope:.6}")),
        );
    }
    for (s, reason) in &table.skipped {
        report.push(CheckEntry::new(format!("S={s} admissible"), 1.0, 0.0).with_note(reason.clone()));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repspace::build_cyclic_rep;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phase_state_examples() {
        let u = phase_states(1, 0.0).unwrap();
        let h = 0.5f64.sqrt();
        assert!((u[(0, 1)] - c(h, 0.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - c(-h, 0.0)).norm() < 1e-15);
        let u = phase_states(3, 0.0).unwrap();
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for n in 0..4 {
            assert!((u[(n, 1)] - expect[n] * 0.5).norm() < 1e-15);
        }
        assert!(phase_states(0, 0.0).is_err());
    }

    #[test]
    fn pb_operator_examples() {
        let pd = pb_phase_operator(1, 0.0).unwrap();
        let h = PI / 2.0;
        assert!((pd.phi[(0, 0)] - c(h, 0.0)).norm() < 1e-14);
        assert!((pd.phi[(0, 1)] - c(-h, 0.0)).norm() < 1e-14);
        for s in 1..6 {
            let pd = pb_phase_operator(s, 0.0).unwrap();
            assert!((pd.exp_phi[(0, 1)] - c(1.0, 0.0)).norm() < 1e-14);
        }
        let pd = pb_phase_operator(2, 0.3).unwrap();
        assert!((pd.exp_phi[(2, 0)] - Complex64::from_polar(1.0, 0.9)).norm() < 1e-14);
    }

    #[test]
    fn pb_ladder_examples() {
        let (a, adag) = pb_ladder_ops(2, 0.0).unwrap();
        assert!((adag[(1, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((adag[(2, 1)] - c(2f64.sqrt(), 0.0)).norm() < 1e-14);
        let comm = a.commutator(&adag).unwrap();
        let target = ComplexMatrix::from_real_diag(&[1.0, 1.0, -2.0]);
        assert!(comm.max_abs_diff(&target).unwrap() < 1e-12);
    }

    #[test]
    fn truncated_commutator() {
        let r = check_truncated_commutator(5, 0.0, c(0.0, 0.0), 1e-12).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let r = check_truncated_commutator(20, 0.0, c(1.0, 0.0), 1e-12).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let r = check_truncated_commutator(4, 0.0, c(2.0, 0.0), 1e-12).unwrap();
        assert!(!r.get("<[a_PB, a_PB^dag]> = 1").unwrap().pass);
        assert!(r.get("<[a_PB, a_PB^dag]> matches closed form").unwrap().pass);
        assert!((truncated_commutator_expectation(4, c(2.0, 0.0)) + 0.553).abs() < 1e-3);
    }

    #[test]
    fn new_ladder_examples() {
        let f = StructureFunction::q_abs(root_of_unity(3)).unwrap();
        let rep = new_ladder_ops(3, 0.0, &f, 0.25).unwrap();
        let cyc = build_cyclic_rep(&f, 3, 0.25, c(1.0, 0.0)).unwrap();
        assert!(rep.a.max_abs_diff(&cyc.a).unwrap() < 1e-12);
        let g = StructureFunction::q_abs_shift(root_of_unity(4), 0.2).unwrap();
        let rep = new_ladder_ops(4, 0.1, &g, 0.0).unwrap();
        let cyc = build_cyclic_rep(&g, 4, 0.0, Complex64::from_polar(1.0, -0.5)).unwrap();
        assert!(rep.a.max_abs_diff(&cyc.a).unwrap() < 1e-12);
        let h = StructureFunction::q_symmetric(root_of_unity(3)).unwrap();
        assert!(matches!(new_ladder_ops(3, 0.0, &h, 0.25), Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn polar_decomposition() {
        let f = StructureFunction::q_abs(root_of_unity(3)).unwrap();
        let rep = build_cyclic_rep(&f, 3, 0.25, c(1.0, 0.0)).unwrap();
        let pd = exp_phase_from_rep(&rep).unwrap();
        assert!((pd.exp_phi[(0, 1)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((pd.exp_phi[(3, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        let expect = [0.0, PI / 2.0, PI, 1.5 * PI];
        for (t, e) in pd.thetas.iter().zip(expect) {
            assert!((t - e).abs() < 1e-15);
        }
        let a = pb_phase_operator(3, 0.0).unwrap();
        let b = pb_phase_operator(3, 0.2).unwrap();
        let ea = a.phi.hermitian_eigen().unwrap().values;
        let eb = b.phi.hermitian_eigen().unwrap().values;
        for (x, y) in ea.iter().zip(&eb) {
            assert!((y - x - 0.2).abs() < 1e-9);
        }
        let fock = crate::repspace::build_fock_rep(&StructureFunction::harmonic(), 4).unwrap();
        assert!(exp_phase_from_rep(&fock).is_err());
    }

    #[test]
    fn triangle() {
        for s in [3, 5, 8] {
            for theta0 in [0.0, 0.3] {
                let f = StructureFunction::q_abs(root_of_unity(s)).unwrap();
                let r = check_phase_decomposition(s, theta0, &f, 0.25).unwrap();
                assert!(r.all_pass(), "S={s} theta0={theta0}: {:?}", r.failures().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn shift() {
        for s in [1, 3, 6] {
            let r = phase_shift_check(s, 0.0, 0.25).unwrap();
            assert!(r.all_pass(), "{r:?}");
        }
        assert!(phase_shift_check(3, 0.4, 0.0).unwrap().all_pass());
    }

    #[test]
    fn sweep() {
        let t = classical_limit_sweep(&[99, 199, 399, 799], Schedule::default(), 10, Family::QAbs).unwrap();
        assert!(t.is_monotone_decreasing());
        let slope = t.loglog_slope().unwrap();
        assert!((slope + 2.0).abs() < 0.2, "{slope}");
        let md = t.max_deviation();
        assert!((md[0].1 - 0.10137).abs() < 1e-4, "{md:?}");
        let t = classical_limit_sweep(&[999], Schedule::default(), 10, Family::QAbs).unwrap();
        assert!(t.max_deviation()[0].1 < 1e-2);
        let sched = Schedule {
            eta: ScheduleValue::Const(0.0),
            k: ScheduleValue::InverseSPlusOne,
        };
        let t = classical_limit_sweep(&[99, 199, 399, 799], sched, 10, Family::QAbsShift).unwrap();
        assert!((t.loglog_slope().unwrap() + 2.0).abs() < 0.2);
        let t = classical_limit_sweep(&[5], Schedule { eta: ScheduleValue::Const(0.0), k: ScheduleValue::Const(0.0) }, 3, Family::QAbs).unwrap();
        assert_eq!(t.skipped.len(), 1);
    }
}
