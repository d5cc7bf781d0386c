//! Finite-dimensional representations of GDO and q-GDO algebras.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{scaled_residual, ComplexMatrix};
use crate::report::{CheckEntry, CheckReport};
use crate::structure::StructureFunction;

/// Construction identities.
pub const TOL_CONSTRUCTION: f64 = 1e-12;
/// Identities involving matrix powers.
pub const TOL_DERIVED: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    Fock,
    Cyclic,
    Isos,
    MultiphotonSector,
    TwoMode,
}

impl RepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RepKind::Fock => "fock",
            RepKind::Cyclic => "cyclic",
            RepKind::Isos => "isos",
            RepKind::MultiphotonSector => "multiphoton_sector",
            RepKind::TwoMode => "two_mode",
        }
    }

    /// Kinds whose basis is a ladder `|0>, |1>, ...` with the top raise dropped.
    pub fn is_fock_like(self) -> bool {
        !matches!(self, RepKind::Cyclic)
    }
}

impl fmt::Display for RepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Matrices of `A`, `A†` and the diagonal of `𝒩` in an orthonormal basis.
///
/// `fdiag[n]` and `fdiag_next[n]` hold the target values of `A†A` and `AA†`
/// on basis vector `n`, i.e. `F(𝒩)` and `F(𝒩+1)` (or their q-forms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub kind: RepKind,
    pub dim: usize,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Complex64>,
    #[serde(rename = "A")]
    pub a: ComplexMatrix,
    #[serde(rename = "Adag")]
    pub adag: ComplexMatrix,
    pub numdiag: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numdiag2: Option<Vec<f64>>,
    #[serde(rename = "F")]
    pub fdiag: Vec<f64>,
    #[serde(rename = "F_next")]
    pub fdiag_next: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<(usize, usize)>,
    /// Multiplicity and offset `(n, j)` of the second mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector2: Option<(usize, usize)>,
    pub boundary_rows: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureFunction>,
}

impl Representation {
    /// A fock-like representation from the lowering band `√F(1), ..., √F(dim-1)`.
    pub(crate) fn ladder(
        kind: RepKind,
        band: &[f64],
        numdiag: Vec<f64>,
        fdiag: Vec<f64>,
        fdiag_next: Vec<f64>,
    ) -> Representation {
        let dim = numdiag.len();
        debug_assert_eq!(band.len() + 1, dim);
        let mut a = ComplexMatrix::zeros(dim, dim);
        for (k, b) in band.iter().enumerate() {
            a[(k, k + 1)] = Complex64::new(*b, 0.0);
        }
        let adag = a.adjoint();
        Representation {
            kind,
            dim,
            s: None,
            eta: None,
            xi: None,
            theta0: None,
            q: None,
            a,
            adag,
            numdiag,
            numdiag2: None,
            fdiag,
            fdiag_next,
            sector: None,
            sector2: None,
            boundary_rows: vec![dim - 1],
            structure: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::invalid(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Representation> {
        let rep: Representation =
            serde_json::from_str(s).map_err(|e| Error::invalid(format!("representation JSON: {e}")))?;
        rep.validate()?;
        Ok(rep)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        for m in [&self.a, &self.adag] {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch {
                    left_rows: d,
                    left_cols: d,
                    right_rows: m.rows(),
                    right_cols: m.cols(),
                });
            }
        }
        for (name, len) in [
            ("numdiag", self.numdiag.len()),
            ("F", self.fdiag.len()),
            ("F_next", self.fdiag_next.len()),
        ] {
            if len != d {
                return Err(Error::invalid(format!("{name} has length {len}, expected {d}")));
            }
        }
        if let Some(r) = self.boundary_rows.iter().find(|r| **r >= d) {
            return Err(Error::invalid(format!("boundary row {r} out of range")));
        }
        Ok(())
    }

    pub fn number_operator(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&self.numdiag)
    }

    /// `q^𝒩 = diag(q^{numdiag})`.
    pub fn q_number_operator(&self) -> Option<ComplexMatrix> {
        let q = self.q?;
        let diag: Vec<Complex64> = self.numdiag.iter().map(|x| qpow(q, *x)).collect();
        Some(ComplexMatrix::from_diag(&diag))
    }

    pub fn is_boundary(&self, row: usize) -> bool {
        self.boundary_rows.contains(&row)
    }

    fn adjoint_expected(&self) -> bool {
        self.xi.is_none_or(|x| (x.norm() - 1.0).abs() < 1e-12)
    }
}

/// `q^x`, using `e^{iφx}` on the unit circle and real powers for real `q > 0`.
pub fn qpow(q: Complex64, x: f64) -> Complex64 {
    if q.im == 0.0 && q.re > 0.0 {
        return Complex64::new(q.re.powf(x), 0.0);
    }
    if (q.norm() - 1.0).abs() < 1e-14 {
        return Complex64::from_polar(1.0, q.arg() * x);
    }
    (q.ln() * x).exp()
}

fn sqrt_values(f: &StructureFunction, args: impl Iterator<Item = f64>) -> Result<Vec<f64>> {
    args.map(|x| f.eval(x).map(f64::sqrt)).collect()
}

/// Truncated Fock representation: `A|n> = √F(n)|n-1>`, `A†|n> = √F(n+1)|n+1>`
/// with the raise out of `|dim-1>` dropped.
pub fn build_fock_rep(f: &StructureFunction, dim: usize) -> Result<Representation> {
    if dim < 2 {
        return Err(Error::invalid(format!("fock representation needs dim >= 2, got {dim}")));
    }
    let f0 = f.eval(0.0)?;
    if f0.abs() > 1e-12 {
        return Err(Error::NoFockRepresentation { f0 });
    }
    let fdiag_next: Vec<f64> = (1..=dim).map(|n| f.eval(n as f64)).collect::<Result<_>>()?;
    if let Some(n) = fdiag_next[..dim - 1].iter().position(|v| *v <= 1e-12) {
        return Err(Error::InteriorZero { n: n + 1 });
    }
    let mut fdiag = vec![0.0];
    fdiag.extend_from_slice(&fdiag_next[..dim - 1]);
    let band: Vec<f64> = fdiag[1..].iter().map(|v| v.sqrt()).collect();
    let numdiag = (0..dim).map(|n| n as f64).collect();
    let mut rep = Representation::ladder(RepKind::Fock, &band, numdiag, fdiag, fdiag_next);
    rep.q = f.q();
    rep.structure = Some(f.clone());
    Ok(rep)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CyclicOptions {
    /// Build even when `|ξ| ≠ 1`; `A†` is then not the adjoint of `A`.
    pub allow_nonunitary_xi: bool,
}

/// `ξ = e^{-iθ₀(S+1)}`.
pub fn xi_from_theta0(s: usize, theta0: f64) -> Complex64 {
    Complex64::from_polar(1.0, -theta0 * (s as f64 + 1.0))
}

pub fn build_cyclic_rep(f: &StructureFunction, s: usize, eta: f64, xi: Complex64) -> Result<Representation> {
    build_cyclic_rep_with(f, s, eta, xi, CyclicOptions::default())
}

/// Cyclic representation with `ξ = e^{-iθ₀(S+1)}`; records `θ₀`.
pub fn build_cyclic_rep_theta0(
    f: &StructureFunction,
    s: usize,
    eta: f64,
    theta0: f64,
) -> Result<Representation> {
    let mut rep = build_cyclic_rep(f, s, eta, xi_from_theta0(s, theta0))?;
    rep.theta0 = Some(theta0);
    Ok(rep)
}

/// (S+1)-dimensional cyclic representation at `q = e^{2πi/(S+1)}`:
/// `A|k> = √𝓕(q^{k+η})|k-1>`, `A|0> = ξ⁻¹√𝓕(q^η)|S>`,
/// `A†|k> = √𝓕(q^{k+1+η})|k+1>`, `A†|S> = ξ√𝓕(q^η)|0>`.
pub fn build_cyclic_rep_with(
    f: &StructureFunction,
    s: usize,
    eta: f64,
    xi: Complex64,
    opts: CyclicOptions,
) -> Result<Representation> {
    if s < 1 {
        return Err(Error::invalid("cyclic representation needs S >= 1"));
    }
    if !eta.is_finite() {
        return Err(Error::invalid("eta must be finite"));
    }
    if !(xi.re.is_finite() && xi.im.is_finite()) || xi.norm() == 0.0 {
        return Err(Error::invalid("xi must be finite and nonzero"));
    }
    if !opts.allow_nonunitary_xi && (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitXi { modulus: xi.norm() });
    }
    let adm = check_cyclic_admissibility(f, s, eta);
    if !adm.all_pass() {
        let reason = adm
            .entries
            .iter()
            .find_map(|e| e.note.clone())
            .unwrap_or_else(|| "structure function vanishes on the cyclic orbit".into());
        return Err(Error::Inadmissible { reason });
    }
    let dim = s + 1;
    let fdiag: Vec<f64> = (0..dim).map(|k| f.eval(k as f64 + eta)).collect::<Result<_>>()?;
    let fdiag_next: Vec<f64> = (0..dim).map(|k| f.eval(k as f64 + 1.0 + eta)).collect::<Result<_>>()?;
    let band = sqrt_values(f, (1..dim).map(|k| k as f64 + eta))?;
    let wrap = fdiag[0].sqrt();
    let mut a = ComplexMatrix::zeros(dim, dim);
    let mut adag = ComplexMatrix::zeros(dim, dim);
    for (k, b) in band.iter().enumerate() {
        a[(k, k + 1)] = Complex64::new(*b, 0.0);
        adag[(k + 1, k)] = Complex64::new(*b, 0.0);
    }
    a[(s, 0)] = xi.inv() * wrap;
    adag[(0, s)] = xi * wrap;
    Ok(Representation {
        kind: RepKind::Cyclic,
        dim,
        s: Some(s),
        eta: Some(eta),
        xi: Some(xi),
        theta0: None,
        q: f.q(),
        a,
        adag,
        numdiag: (0..dim).map(|k| k as f64 + eta).collect(),
        numdiag2: None,
        fdiag,
        fdiag_next,
        sector: None,
        sector2: None,
        boundary_rows: Vec::new(),
        structure: Some(f.clone()),
    })
}

/// The four defining relations on all rows except `boundary_rows`.
///
/// Cyclic representations are checked on every row, with the commutators
/// in q-form: `q^𝒩 A = q⁻¹ A q^𝒩`, `q^𝒩 A† = q A† q^𝒩`.
pub fn check_gdo_relations(rep: &Representation, tol: f64) -> Result<CheckReport> {
    relations(rep, tol, true)
}

/// As [`check_gdo_relations`] but including the boundary rows.
pub fn check_gdo_relations_all_rows(rep: &Representation, tol: f64) -> Result<CheckReport> {
    relations(rep, tol, false)
}

fn relations(rep: &Representation, tol: f64, exclude: bool) -> Result<CheckReport> {
    rep.validate()?;
    let excluded = exclude && !rep.boundary_rows.is_empty();
    let keep = |r: usize| !(exclude && rep.is_boundary(r));
    let a = &rep.a;
    let adag = &rep.adag;
    let mut report = CheckReport::new();

    let aad = a.matmul(adag)?;
    let fnext = ComplexMatrix::from_real_diag(&rep.fdiag_next);
    report.push(
        CheckEntry::new("A Adag = F(N+1)", scaled_residual(&aad, &fnext, keep)?, tol).boundary_excluded(excluded),
    );
    let ada = adag.matmul(a)?;
    let fcur = ComplexMatrix::from_real_diag(&rep.fdiag);
    report.push(
        CheckEntry::new("Adag A = F(N)", scaled_residual(&ada, &fcur, keep)?, tol).boundary_excluded(excluded),
    );

    if rep.kind == RepKind::Cyclic {
        let qn = rep
            .q_number_operator()
            .ok_or_else(|| Error::invalid("cyclic representation without q"))?;
        let q = rep.q.unwrap_or_default();
        let lhs = qn.matmul(adag)?;
        let rhs = adag.matmul(&qn)?.scale(q);
        report.push(CheckEntry::new("q^N Adag = q Adag q^N", scaled_residual(&lhs, &rhs, keep)?, tol));
        let lhs = qn.matmul(a)?;
        let rhs = a.matmul(&qn)?.scale(q.inv());
        report.push(CheckEntry::new("q^N A = q^-1 A q^N", scaled_residual(&lhs, &rhs, keep)?, tol));
    } else {
        let n = rep.number_operator();
        let c = n.commutator(adag)?;
        report.push(CheckEntry::new("[N, Adag] = Adag", scaled_residual(&c, adag, keep)?, tol).boundary_excluded(excluded));
        let c = n.commutator(a)?;
        let minus_a = a.scale(Complex64::new(-1.0, 0.0));
        report.push(CheckEntry::new("[N, A] = -A", scaled_residual(&c, &minus_a, keep)?, tol).boundary_excluded(excluded));
        if let Some(n2) = &rep.numdiag2 {
            let n2 = ComplexMatrix::from_real_diag(n2);
            let c = n2.commutator(adag)?;
            report.push(
                CheckEntry::new("[N2, Adag] = Adag", scaled_residual(&c, adag, keep)?, tol).boundary_excluded(excluded),
            );
        }
    }
    if rep.adjoint_expected() {
        report.push(CheckEntry::new(
            "Adag = adjoint(A)",
            adag.max_abs_diff(&a.adjoint())?,
            TOL_CONSTRUCTION,
        ));
    }
    Ok(report)
}

/// Raw diagonal defect `(AA† − F(𝒩+1))_{rr}` at each boundary row.
/// For a truncated Fock representation this is `−F(dim)` at `dim−1`.
pub fn boundary_defect(rep: &Representation) -> Result<Vec<(usize, f64)>> {
    let aad = rep.a.matmul(&rep.adag)?;
    Ok(rep
        .boundary_rows
        .iter()
        .map(|&r| (r, aad[(r, r)].re - rep.fdiag_next[r]))
        .collect())
}

/// `A^{S+1} = ξ⁻¹√∏𝓕·I`, `(A†)^{S+1} = ξ√∏𝓕·I`, `(q^𝒩)^{S+1} = q^{η(S+1)}·I`,
/// and `[A^{S+1}, A†] = 0`.
pub fn check_central_elements(rep: &Representation) -> Result<CheckReport> {
    if rep.kind != RepKind::Cyclic {
        return Err(Error::KindMismatch {
            expected: "cyclic".into(),
            found: rep.kind.to_string(),
        });
    }
    let s = rep.s.ok_or_else(|| Error::invalid("cyclic representation without S"))?;
    let eta = rep.eta.unwrap_or(0.0);
    let xi = rep.xi.unwrap_or(Complex64::new(1.0, 0.0));
    let q = rep.q.ok_or_else(|| Error::invalid("cyclic representation without q"))?;
    let p = (s + 1) as u32;
    let dim = rep.dim;
    let tol = TOL_DERIVED;
    let root: f64 = rep.fdiag.iter().product::<f64>().sqrt();
    let mut report = CheckReport::new();

    let ap = rep.a.pow(p)?;
    let expect_a = ComplexMatrix::identity(dim).scale(xi.inv() * root);
    report.push(CheckEntry::new("A^(S+1) = xi^-1 sqrt(prod F) I", scaled_residual(&ap, &expect_a, |_| true)?, tol));

    let adp = rep.adag.pow(p)?;
    let expect_ad = ComplexMatrix::identity(dim).scale(xi * root);
    report.push(CheckEntry::new("Adag^(S+1) = xi sqrt(prod F) I", scaled_residual(&adp, &expect_ad, |_| true)?, tol));

    let qn = rep.q_number_operator().unwrap_or_else(|| ComplexMatrix::identity(dim));
    let qnp = qn.pow(p)?;
    let expect_q = ComplexMatrix::identity(dim).scale(qpow(q, eta * (s as f64 + 1.0)));
    report.push(CheckEntry::new("(q^N)^(S+1) = q^(eta(S+1)) I", scaled_residual(&qnp, &expect_q, |_| true)?, tol));

    let comm = ap.commutator(&rep.adag)?;
    let zero = ComplexMatrix::zeros(dim, dim);
    report.push(CheckEntry::new("[A^(S+1), Adag] = 0", scaled_residual(&comm, &zero, |_| true)?, tol));

    let ratio = ap[(0, 0)] / adp[(0, 0)];
    let target = (xi * xi).inv();
    report.push(CheckEntry::new(
        "A^(S+1) / Adag^(S+1) = xi^-2",
        (ratio - target).norm(),
        tol,
    ));
    Ok(report)
}

/// Reports `𝓕(q^{η+k})` for `k = 0..S`. Passes iff every value is real,
/// nonnegative and above `1e-12`, and `q` is a primitive (S+1)-th root of unity.
/// The first failing entry carries the reason as its note.
pub fn check_cyclic_admissibility(f: &StructureFunction, s: usize, eta: f64) -> CheckReport {
    let tol = TOL_CONSTRUCTION;
    let mut report = CheckReport::new();
    let q_ok = f.q().is_some_and(|q| is_primitive_root(q, s));
    let mut root_entry = CheckEntry::new("q is a primitive (S+1)-th root of unity", if q_ok { 0.0 } else { 1.0 }, 0.0);
    if !q_ok {
        root_entry = root_entry.with_note(format!("q is not a primitive root of unity of order {}", s + 1));
    }
    report.push(root_entry);

    let values: Vec<Complex64> = (0..=s).map(|k| f.value(eta + k as f64)).collect();
    let finite = values.iter().all(|v| v.re.is_finite() && v.im.is_finite());
    let max_im = values
        .iter()
        .map(|v| v.im.abs() / v.re.abs().max(1.0))
        .fold(0.0, f64::max);
    let has_neg = values.iter().any(|v| v.re < -tol);
    let has_pos = values.iter().any(|v| v.re > tol);

    let mut real_entry = CheckEntry::new("F real on the orbit", if finite { max_im } else { f64::INFINITY }, tol);
    if !real_entry.pass {
        real_entry = real_entry.with_note("structure function is not real on the cyclic orbit; the hermiticity condition fails");
    }
    report.push(real_entry);

    let min_re = values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let mut sign_entry = CheckEntry::new("F nonnegative on the orbit", (-min_re).max(0.0), tol);
    if !sign_entry.pass {
        let reason = if has_neg && has_pos {
            "takes negative as well as positive values"
        } else {
            "takes negative values"
        };
        sign_entry = sign_entry.with_note(reason);
    }
    report.push(sign_entry);

    for (k, v) in values.iter().enumerate() {
        let mut e = CheckEntry::above(format!("F(q^(eta+{k}))"), v.re, tol);
        if !e.pass && v.re.abs() <= tol {
            e = e.with_note(format!("structure function vanishes at q^(eta+{k})"));
        }
        report.push(e);
    }
    report
}

/// The reason attached to the first failing admissibility entry.
pub fn admissibility_reason(report: &CheckReport) -> Option<String> {
    report.failures().find_map(|e| e.note.clone())
}

fn is_primitive_root(q: Complex64, s: usize) -> bool {
    let order = s + 1;
    if (q.norm() - 1.0).abs() > 1e-12 {
        return false;
    }
    let turns = q.arg() / (2.0 * PI) * order as f64;
    let j = turns.round();
    if (turns - j).abs() > 1e-9 {
        return false;
    }
    let j = (j as i64).rem_euclid(order as i64) as usize;
    j != 0 && gcd(j, order) == 1
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
