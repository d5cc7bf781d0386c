//! GDOs realized inside ordinary Fock space through intensity-dependent
//! m-photon couplings `A = f(N)aᵐ`, and the two-mode generalization
//! `A = f(N₁,N₂)a₁ᵐa₂ⁿ`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{scaled_vector_residual, ComplexMatrix};
use crate::report::{CheckEntry, CheckReport, Expectation};
use crate::repspace::{RepKind, Representation};
use crate::states::StateVector;
use crate::structure::{qbracket, Bindings, Expr, Scope};

/// Largest backing Fock index a realization may touch.
pub const MAX_BACKING_INDEX: usize = 1 << 20;

/// Serialized coupling: `f` is an expression in `N` (one mode) or `N1`, `N2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub modes: u8,
    pub f: String,
    pub m: usize,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub i: usize,
    #[serde(default)]
    pub j: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

fn one() -> usize {
    1
}

impl CouplingSpec {
    pub fn single(f: &str, m: usize, i: usize) -> Self {
        Self {
            modes: 1,
            f: f.to_string(),
            m,
            n: 1,
            i,
            j: 0,
            params: BTreeMap::new(),
        }
    }

    pub fn two_mode(f: &str, m: usize, n: usize, i: usize, j: usize) -> Self {
        Self {
            modes: 2,
            f: f.to_string(),
            m,
            n,
            i,
            j,
            params: BTreeMap::new(),
        }
    }

    pub fn compile(&self) -> Result<Coupling> {
        let vars: &[&str] = match self.modes {
            1 => &["N"],
            2 => &["N1", "N2"],
            k => return Err(Error::invalid(format!("modes must be 1 or 2, got {k}"))),
        };
        check_multiplicity(self.m, self.i, "m", "i")?;
        if self.modes == 2 {
            check_multiplicity(self.n, self.j, "n", "j")?;
        }
        let scope = Scope {
            variables: vars,
            allow_q: false,
            params: Some(&self.params),
        };
        let expr = Expr::parse(&self.f, &scope)?;
        Ok(Coupling {
            spec: self.clone(),
            expr,
        })
    }
}

fn check_multiplicity(m: usize, i: usize, mname: &str, iname: &str) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid(format!("{mname} must be positive")));
    }
    if i >= m {
        return Err(Error::invalid(format!("sector offset {iname} = {i} must be below {mname} = {m}")));
    }
    Ok(())
}

/// A parsed coupling ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    spec: CouplingSpec,
    expr: Expr,
}

impl Coupling {
    pub fn spec(&self) -> &CouplingSpec {
        &self.spec
    }

    /// `f(N)` or `f(N₁, N₂)`; nonzero and finite or an error.
    pub fn eval(&self, args: &[usize]) -> Result<Complex64> {
        let vars: Vec<Complex64> = args.iter().map(|a| Complex64::new(*a as f64, 0.0)).collect();
        let v = self.expr.eval(&Bindings {
            variables: &vars,
            q: None,
        });
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("coupling f{args:?}"),
            });
        }
        if v.norm() < 1e-14 {
            return Err(Error::invalid(format!("coupling f vanishes at {args:?}")));
        }
        Ok(v)
    }
}

/// `∏_{r=1}^{m} (base + r)`.
fn rising(base: usize, m: usize) -> f64 {
    (1..=m).map(|r| (base + r) as f64).product()
}

/// Amplitude of `aᵐ|N>` on `|N−m>`, one lowering step at a time.
fn lower_amplitude(mut n: usize, m: usize) -> f64 {
    let mut amp = 1.0;
    for _ in 0..m {
        amp *= (n as f64).sqrt();
        n -= 1;
    }
    amp
}

fn backing_top(dim_sector: usize, m: usize, i: usize) -> Result<usize> {
    dim_sector
        .checked_mul(m)
        .and_then(|v| v.checked_add(i + m))
        .filter(|v| *v <= MAX_BACKING_INDEX)
        .ok_or(Error::DimensionTooLarge {
            dim: dim_sector.saturating_mul(m),
            cap: MAX_BACKING_INDEX,
        })
}

/// Single-mode realization on `|km+i>`, `k = 0..dim_sector`, of
/// `A = f(N)aᵐ`, with the lowering band built from the Fock action and
/// `F(k+1) = (mk+i+1)⋯(mk+i+m)|f(mk+i)|²` from the closed form.
fn sector_rep(
    dim_sector: usize,
    m: usize,
    i: usize,
    f: &dyn Fn(usize) -> Result<Complex64>,
) -> Result<Representation> {
    if dim_sector < 2 {
        return Err(Error::invalid("sector dimension must be at least 2"));
    }
    let top = backing_top(dim_sector, m, i)?;
    for n in 0..=top {
        f(n)?;
    }
    let mut a = ComplexMatrix::zeros(dim_sector, dim_sector);
    for k in 0..dim_sector - 1 {
        let src = (k + 1) * m + i;
        a[(k, k + 1)] = f(src - m)? * lower_amplitude(src, m);
    }
    let fnext: Vec<f64> = (0..dim_sector)
        .map(|k| Ok(rising(k * m + i, m) * f(k * m + i)?.norm_sqr()))
        .collect::<Result<_>>()?;
    let mut fcur = vec![0.0];
    fcur.extend_from_slice(&fnext[..dim_sector - 1]);
    let adag = a.adjoint();
    Ok(Representation {
        kind: RepKind::MultiphotonSector,
        dim: dim_sector,
        s: None,
        eta: None,
        xi: None,
        theta0: None,
        q: None,
        a,
        adag,
        numdiag: (0..dim_sector).map(|k| k as f64).collect(),
        numdiag2: None,
        fdiag: fcur,
        fdiag_next: fnext,
        sector: Some((m, i)),
        sector2: None,
        boundary_rows: vec![dim_sector - 1],
        structure: None,
    })
}

pub fn build_sector_realization(spec: &CouplingSpec, dim_sector: usize) -> Result<Representation> {
    if spec.modes != 1 {
        return Err(Error::invalid("sector realization needs a single-mode coupling"));
    }
    let c = spec.compile()?;
    sector_rep(dim_sector, spec.m, spec.i, &|n| c.eval(&[n]))
}

fn check_q_real(q: f64) -> Result<()> {
    if !(q.is_finite() && q > 0.0 && q != 1.0) {
        return Err(Error::invalid(format!("real deformation parameter must be positive and != 1, got {q}")));
    }
    Ok(())
}

fn bracket(q: f64, x: f64) -> f64 {
    qbracket(Complex64::new(q, 0.0), Complex64::new(x, 0.0)).re
}

/// `b_q = f(N)aᵐ` with `f(N) = √([N/m+1]/((N+1)⋯(N+m)))` on the sector
/// `|km+i>`. The target values are `[N_q]` and `[N_q+1]` with
/// `N_q = k + i/m`; the first fails on the sector vacuum when `i > 0`.
pub fn q_multiphoton_realization(q: f64, m: usize, i: usize, dim: usize) -> Result<Representation> {
    check_q_real(q)?;
    check_multiplicity(m, i, "m", "i")?;
    let coupling = |n: usize| -> Result<Complex64> {
        let v = bracket(q, n as f64 / m as f64 + 1.0) / rising(n, m);
        Ok(Complex64::new(v.sqrt(), 0.0))
    };
    let mut rep = sector_rep(dim, m, i, &coupling)?;
    let offset = i as f64 / m as f64;
    rep.numdiag = (0..dim).map(|k| k as f64 + offset).collect();
    rep.fdiag = rep.numdiag.iter().map(|x| bracket(q, *x)).collect();
    rep.fdiag_next = rep.numdiag.iter().map(|x| bracket(q, x + 1.0)).collect();
    rep.q = Some(Complex64::new(q, 0.0));
    Ok(rep)
}

/// `a_q = √([(N−i)/m+1]/((N+1)⋯(N+m)))·aᵐ`: `a_q a_q† = [𝒩+1]` and
/// `a_q†a_q = [𝒩]` hold on every sector row, the vacuum included.
pub fn sector_exact_q_realization(q: f64, m: usize, i: usize, dim: usize) -> Result<Representation> {
    check_q_real(q)?;
    check_multiplicity(m, i, "m", "i")?;
    let coupling = |n: usize| -> Result<Complex64> {
        let v = bracket(q, (n as f64 - i as f64) / m as f64 + 1.0) / rising(n, m);
        Ok(Complex64::new(v.sqrt(), 0.0))
    };
    let mut rep = sector_rep(dim, m, i, &coupling)?;
    rep.fdiag = (0..dim).map(|k| bracket(q, k as f64)).collect();
    rep.fdiag_next = (0..dim).map(|k| bracket(q, k as f64 + 1.0)).collect();
    rep.q = Some(Complex64::new(q, 0.0));
    Ok(rep)
}

/// Quantifies the broken vacuum of [`q_multiphoton_realization`]:
/// the defect of `b†b − [N_q]` on the sector vacuum (expected `[i/m]`), the
/// same on the excited rows (expected zero), and the corresponding defects
/// of `bb† − q b†b − q^{−N_q}` (expected `q[i/m]` on the vacuum).
pub fn check_broken_vacuum(q: f64, m: usize, i: usize, dim: usize) -> Result<CheckReport> {
    let rep = q_multiphoton_realization(q, m, i, dim)?;
    let expected = bracket(q, i as f64 / m as f64);
    let broken = i > 0;
    let ada = rep.adag.matmul(&rep.a)?;
    let aad = rep.a.matmul(&rep.adag)?;
    let diag = |mat: &ComplexMatrix| -> Vec<Complex64> { (0..dim).map(|r| mat[(r, r)]).collect() };
    let ada_d = diag(&ada);
    let aad_d = diag(&aad);
    let target: Vec<Complex64> = rep.fdiag.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let qc: Vec<Complex64> = (0..dim)
        .map(|r| aad_d[r] - q * ada_d[r] - q.powf(-rep.numdiag[r]))
        .collect();
    let excited = |r: usize| r >= 1 && r + 1 < dim;

    let vac_defect = (target[0] - ada_d[0]).re;
    let mut report = CheckReport::new();
    let expect = if broken { Expectation::Above } else { Expectation::AtMost };
    report.push(
        CheckEntry::with_expectation("vacuum: Adag A - [N_q]", vac_defect.abs(), 1e-12, expect)
            .with_note(format!("expected break [i/m]_q = {expected:.15e}")),
    );
    report.push(CheckEntry::new(
        "vacuum: defect - [i/m]_q",
        (vac_defect - expected).abs(),
        1e-10,
    ));
    report.push(CheckEntry::new(
        "excited: Adag A - [N_q]",
        scaled_vector_residual(&ada_d, &target, excited),
        1e-12,
    ));
    let qvac = qc[0].re;
    report.push(
        CheckEntry::with_expectation("vacuum: A Adag - q Adag A - q^-N_q", qvac.abs(), 1e-12, expect)
            .with_note(format!("expected break q[i/m]_q = {:.15e}", q * expected)),
    );
    report.push(CheckEntry::new(
        "vacuum: q-commutator defect - q[i/m]_q",
        (qvac - q * expected).abs(),
        1e-10,
    ));
    let qscale: Vec<Complex64> = (0..dim)
        .map(|r| Complex64::new(aad_d[r].norm() + q * ada_d[r].norm(), 0.0))
        .collect();
    let qres = (0..dim)
        .filter(|r| excited(*r))
        .map(|r| qc[r].norm() / qscale[r].re.max(1.0))
        .fold(0.0, f64::max);
    report.push(CheckEntry::new("excited: A Adag - q Adag A - q^-N_q", qres, 1e-12));
    Ok(report)
}

/// Two-mode realization on `|km+i, kn+j>` of `A = f(N₁,N₂)a₁ᵐa₂ⁿ` with
/// `F(k+1,k+1) = (mk+i+1)⋯(mk+i+m)·(nk+j+1)⋯(nk+j+n)·|f(mk+i, nk+j)|²`.
pub fn build_two_mode_realization(spec: &CouplingSpec, dim_sector: usize) -> Result<Representation> {
    if spec.modes != 2 {
        return Err(Error::invalid("two-mode realization needs a two-mode coupling"));
    }
    if dim_sector < 2 {
        return Err(Error::invalid("sector dimension must be at least 2"));
    }
    let c = spec.compile()?;
    let (m, n, i, j) = (spec.m, spec.n, spec.i, spec.j);
    backing_top(dim_sector, m, i)?;
    backing_top(dim_sector, n, j)?;
    let occ = |k: usize| (k * m + i, k * n + j);
    for k in 0..=dim_sector {
        let (n1, n2) = occ(k);
        c.eval(&[n1, n2])?;
    }
    let mut a = ComplexMatrix::zeros(dim_sector, dim_sector);
    for k in 0..dim_sector - 1 {
        let (n1, n2) = occ(k + 1);
        let amp = lower_amplitude(n1, m) * lower_amplitude(n2, n);
        let (t1, t2) = occ(k);
        a[(k, k + 1)] = c.eval(&[t1, t2])? * amp;
    }
    let fnext: Vec<f64> = (0..dim_sector)
        .map(|k| {
            let (n1, n2) = occ(k);
            Ok(rising(n1, m) * rising(n2, n) * c.eval(&[n1, n2])?.norm_sqr())
        })
        .collect::<Result<_>>()?;
    let mut fcur = vec![0.0];
    fcur.extend_from_slice(&fnext[..dim_sector - 1]);
    let adag = a.adjoint();
    let numdiag: Vec<f64> = (0..dim_sector).map(|k| k as f64).collect();
    Ok(Representation {
        kind: RepKind::TwoMode,
        dim: dim_sector,
        s: None,
        eta: None,
        xi: None,
        theta0: None,
        q: None,
        a,
        adag,
        numdiag: numdiag.clone(),
        numdiag2: Some(numdiag),
        fdiag: fcur,
        fdiag_next: fnext,
        sector: Some((m, i)),
        sector2: Some((n, j)),
        boundary_rows: vec![dim_sector - 1],
        structure: None,
    })
}

/// `(𝒩₁ − 𝒩₂)|ψ>`; zero on the diagonal basis, where the conservation law
/// holds automatically.
pub fn check_two_mode_conservation(rep: &Representation, state: &StateVector) -> Result<CheckReport> {
    if rep.kind != RepKind::TwoMode {
        return Err(Error::KindMismatch {
            expected: "two_mode".into(),
            found: rep.kind.to_string(),
        });
    }
    let n2 = rep
        .numdiag2
        .as_ref()
        .ok_or_else(|| Error::invalid("two-mode representation without second number diagonal"))?;
    if state.dim != rep.dim {
        return Err(Error::DimensionMismatch {
            left_rows: rep.dim,
            left_cols: rep.dim,
            right_rows: state.dim,
            right_cols: 1,
        });
    }
    let residual = state
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| ((rep.numdiag[k] - n2[k]) * c).norm())
        .fold(0.0, f64::max);
    let mut report = CheckReport::new();
    report.push(CheckEntry::new("(N1 - N2)|state>", residual, 0.0));
    Ok(report)
}
