//! The isospectral oscillator system: a GDO with `F(x) = (x−1)²x`, two
//! vacua `ψ₀`, `ψ₁`, and intertwiners `b`, `b†` to the ordinary oscillator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{normalize, scaled_residual, scaled_vector_residual, vector_norm, ComplexMatrix};
use crate::report::{CheckEntry, CheckReport};
use crate::repspace::{check_gdo_relations, RepKind, Representation, TOL_CONSTRUCTION};
use crate::states::{Provenance, StateKind, StateOptions, StateVector};
use crate::structure::StructureFunction;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Term cap for the ₀F₂ series.
pub const HYPERGEOM_MAX_TERMS: usize = 10_000;

/// The ψ-basis representation together with the intertwiners.
///
/// `b` maps ψ-basis vectors to oscillator vectors (`b|ψ_n> = √n|n−1>`),
/// `bdag` goes back (`b†|n> = √(n+1)|ψ_{n+1}>`, top raise dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct IsosSpace {
    pub rep: Representation,
    pub b: ComplexMatrix,
    pub bdag: ComplexMatrix,
    /// Eigenvalues of `H_λ = 𝒩_λ + ½` on `ψ_n`.
    pub energies: Vec<f64>,
    pub lambda: Option<f64>,
}

impl IsosSpace {
    pub fn dim(&self) -> usize {
        self.rep.dim
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&self.energies)
    }
}

fn oscillator_lowering(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// `A|ψ_n> = (n−1)√n|ψ_{n−1}>`, `A†|ψ_n> = n√(n+1)|ψ_{n+1}>`.
pub fn build_isos_rep(dim: usize) -> Result<IsosSpace> {
    if dim < 4 {
        return Err(Error::invalid(format!("isos representation needs dim >= 4, got {dim}")));
    }
    let f = StructureFunction::isos();
    let band: Vec<f64> = (1..dim).map(|n| (n as f64 - 1.0) * (n as f64).sqrt()).collect();
    let fdiag: Vec<f64> = (0..dim).map(|n| f.eval(n as f64)).collect::<Result<_>>()?;
    let fdiag_next: Vec<f64> = (0..dim).map(|n| f.eval(n as f64 + 1.0)).collect::<Result<_>>()?;
    let numdiag = (0..dim).map(|n| n as f64).collect();
    let mut rep = Representation::ladder(RepKind::Isos, &band, numdiag, fdiag, fdiag_next);
    rep.structure = Some(f);
    let b = oscillator_lowering(dim);
    let bdag = b.adjoint();
    Ok(IsosSpace {
        rep,
        b,
        bdag,
        energies: (0..dim).map(|n| n as f64 + 0.5).collect(),
        lambda: None,
    })
}

/// Structural checks: both vacua, the invariant `ψ₀` line, the GDO
/// relations, `bb† = aa†`, `A = b†ab`, and `H_λ b† = b†(H+1)`.
pub fn check_isos_structure(space: &IsosSpace) -> Result<CheckReport> {
    let dim = space.dim();
    let rep = &space.rep;
    let tol = TOL_CONSTRUCTION;
    let mut report = check_gdo_relations(rep, tol)?;
    let a_cols = |m: &ComplexMatrix, c: usize| m.column(c).iter().map(|v| v.norm()).fold(0.0, f64::max);
    report.push(CheckEntry::new("A psi_0 = 0", a_cols(&rep.a, 0), 0.0));
    report.push(CheckEntry::new("A psi_1 = 0", a_cols(&rep.a, 1), 0.0));
    report.push(CheckEntry::new("Adag psi_0 = 0", a_cols(&rep.adag, 0), 0.0));
    let leak = (1..dim)
        .map(|c| rep.adag[(0, c)].norm().max(rep.a[(0, c)].norm()))
        .fold(0.0, f64::max);
    report.push(CheckEntry::new("psi_0 line decoupled", leak, 0.0));

    let a = oscillator_lowering(dim);
    let keep = |r: usize| r + 1 < dim;
    let bbd = space.b.matmul(&space.bdag)?;
    let aad = a.matmul(&a.adjoint())?;
    report.push(
        CheckEntry::new("b bdag = a adag", scaled_residual(&bbd, &aad, keep)?, tol).boundary_excluded(true),
    );
    let a_from_b = space.bdag.matmul(&a)?.matmul(&space.b)?;
    report.push(CheckEntry::new("A = bdag a b", scaled_residual(&a_from_b, &rep.a, |_| true)?, tol));

    let h = space.hamiltonian();
    let h_osc_plus_one = ComplexMatrix::from_real_diag(&(0..dim).map(|n| n as f64 + 1.5).collect::<Vec<_>>());
    let lhs = h.matmul(&space.bdag)?;
    let rhs = space.bdag.matmul(&h_osc_plus_one)?;
    report.push(
        CheckEntry::new("H_l bdag = bdag (H + 1)", scaled_residual(&lhs, &rhs, keep)?, tol).boundary_excluded(true),
    );
    let spec_dev = space
        .energies
        .iter()
        .enumerate()
        .map(|(n, e)| (e - (n as f64 + 0.5)).abs())
        .fold(0.0, f64::max);
    report.push(CheckEntry::new("spectrum n + 1/2", spec_dev, 0.0));
    Ok(report)
}

/// `₀F₂(x, y; z) = Σ Γ(x)Γ(y)/(Γ(x+n)Γ(y+n)) zⁿ/n!`, summed until the last
/// term is below `tol` relative to the partial sum.
pub fn hypergeom_0f2(x: f64, y: f64, z: f64, tol: f64) -> Result<f64> {
    for p in [x, y] {
        if !p.is_finite() {
            return Err(Error::invalid(format!("hypergeometric parameter {p} is not finite")));
        }
        if p <= 0.0 && p.fract() == 0.0 {
            return Err(Error::PoleParameter(p));
        }
    }
    if !z.is_finite() {
        return Err(Error::invalid("hypergeometric argument is not finite"));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..HYPERGEOM_MAX_TERMS {
        let nf = n as f64;
        let ratio = z / ((x + nf) * (y + nf) * (nf + 1.0));
        term *= ratio;
        sum += term;
        if !sum.is_finite() {
            return Err(Error::NonFinite {
                context: "0F2 partial sum".into(),
            });
        }
        if ratio.abs() < 1.0 && term.abs() <= tol * sum.abs().max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConverged {
        terms: HYPERGEOM_MAX_TERMS,
    })
}

/// Unnormalized coherent coefficients: `αⁿ/(n!√((n+1)!))` on `ψ_{n+1}`,
/// zero on `ψ₀`.
pub fn isos_coherent_series(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut c = vec![ZERO; dim];
    if dim < 2 {
        return c;
    }
    c[1] = ONE;
    for n in 1..dim - 1 {
        c[n + 1] = c[n] * alpha / (n as f64 * (n as f64 + 1.0).sqrt());
    }
    c
}

fn tail_check(c: &[Complex64], last: usize, tol: f64, grow: impl Fn(usize) -> usize) -> Result<()> {
    let norm = vector_norm(c);
    let tail = c[last].norm() / norm;
    if tail < tol {
        return Ok(());
    }
    Err(Error::InadequateTruncation {
        tail,
        tol,
        required: grow(c.len()),
    })
}

/// Smallest `d` passing `ok(d)`, doubling from `start`; capped at `2^16`.
fn search_dim(start: usize, ok: impl Fn(usize) -> bool) -> usize {
    let mut d = start.max(4);
    while d < (1 << 16) && !ok(d) {
        d *= 2;
    }
    let (mut lo, mut hi) = (d / 2, d);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Normalized by `₀F₂(1,2;|α|²)^{−1/2}`.
pub fn isos_coherent_state(alpha: Complex64, dim: usize) -> Result<StateVector> {
    isos_coherent_state_with(alpha, dim, StateOptions::default())
}

pub fn isos_coherent_state_with(alpha: Complex64, dim: usize, opts: StateOptions) -> Result<StateVector> {
    if dim < 4 {
        return Err(Error::invalid(format!("isos states need dim >= 4, got {dim}")));
    }
    let c = isos_coherent_series(alpha, dim);
    let tail_ok = |d: usize| {
        let c = isos_coherent_series(alpha, d);
        c[d - 1].norm() / vector_norm(&c) < opts.tail_tol
    };
    tail_check(&c, dim - 1, opts.tail_tol, |d| search_dim(d, tail_ok))?;
    let norm = hypergeom_0f2(1.0, 2.0, alpha.norm_sqr(), 1e-16)?.sqrt();
    let coeffs = c.iter().map(|v| v / norm).collect();
    StateVector::new(
        coeffs,
        Some(Provenance {
            kind: StateKind::IsosCoherent,
            alpha: Some(alpha),
            z: None,
            structure: Some(StructureFunction::isos()),
        }),
    )
}

/// `max |((A − α)ψ)_r|` for rows `r ≤ dim − 3`.
pub fn isos_coherent_eigen_residual(space: &IsosSpace, state: &StateVector, alpha: Complex64) -> Result<f64> {
    let v = space.rep.a.apply(&state.coeffs)?;
    Ok((0..space.dim() - 2)
        .map(|r| (v[r] - alpha * state.coeffs[r]).norm())
        .fold(0.0, f64::max))
}

/// `w = exp(α·diag(1/(N+1))·a†)|0>`, the eigenvector of `(N+2)a`.
fn intertwined_oscillator_state(alpha: Complex64, dim: usize) -> Result<Vec<Complex64>> {
    let a = oscillator_lowering(dim);
    let d: Vec<f64> = (0..dim).map(|n| 1.0 / (n as f64 + 1.0)).collect();
    let gen = ComplexMatrix::from_real_diag(&d).matmul(&a.adjoint())?.scale(alpha);
    Ok(normalize(&gen.matexp_truncated(dim)?.column(0)))
}

/// (a) `b|α>` is an eigenvector of `(N+1)a`; (b) `|α> ∝ b†w` with `w` the
/// eigenvector of `(N+2)a`.
pub fn check_coherent_intertwining(alpha: Complex64, dim: usize) -> Result<CheckReport> {
    let space = build_isos_rep(dim)?;
    let state = isos_coherent_state(alpha, dim)?;
    let a = oscillator_lowering(dim);
    let np1 = ComplexMatrix::from_real_diag(&(0..dim).map(|n| n as f64 + 1.0).collect::<Vec<_>>());
    let op = np1.matmul(&a)?;
    let v = normalize(&space.b.apply(&state.coeffs)?);
    let ov = op.apply(&v)?;
    let res_a = (0..dim - 2).map(|r| (ov[r] - alpha * v[r]).norm()).fold(0.0, f64::max);

    let w = intertwined_oscillator_state(alpha, dim)?;
    let back = normalize(&space.bdag.apply(&w)?);
    let res_b = scaled_vector_residual(&back, &state.coeffs, |r| r + 1 < dim);

    let mut report = CheckReport::new();
    report.push(CheckEntry::new("(N+1)a b|alpha> = alpha b|alpha>", res_a, 1e-9).boundary_excluded(true));
    report.push(CheckEntry::new("|alpha> = bdag w", res_b, 1e-9).boundary_excluded(true));
    Ok(report)
}

/// Unnormalized squeezed coefficients: `C₁ = 1`,
/// `C_{2k+1} = z·C_{2k−1}·(2k−1)/√(2k(2k+1))`, even ones zero.
pub fn isos_squeezed_series(z: Complex64, dim: usize) -> Vec<Complex64> {
    let mut c = vec![ZERO; dim];
    if dim < 2 {
        return c;
    }
    c[1] = ONE;
    let mut k = 1;
    while 2 * k + 1 < dim {
        let kf = k as f64;
        c[2 * k + 1] = c[2 * k - 1] * z * (2.0 * kf - 1.0) / (2.0 * kf * (2.0 * kf + 1.0)).sqrt();
        k += 1;
    }
    c
}

fn last_odd(dim: usize) -> usize {
    if dim.is_multiple_of(2) {
        dim - 1
    } else {
        dim - 2
    }
}

pub fn isos_squeezed_vacuum(z: Complex64, dim: usize) -> Result<StateVector> {
    isos_squeezed_vacuum_with(z, dim, StateOptions::default())
}

pub fn isos_squeezed_vacuum_with(z: Complex64, dim: usize, opts: StateOptions) -> Result<StateVector> {
    if z.norm() >= 1.0 {
        return Err(Error::invalid(format!("squeeze parameter needs |z| < 1, got |z| = {}", z.norm())));
    }
    if dim < 4 {
        return Err(Error::invalid(format!("isos states need dim >= 4, got {dim}")));
    }
    let c = isos_squeezed_series(z, dim);
    let tail_ok = |d: usize| {
        let c = isos_squeezed_series(z, d);
        c[last_odd(d)].norm() / vector_norm(&c) < opts.tail_tol
    };
    tail_check(&c, last_odd(dim), opts.tail_tol, |d| search_dim(d, tail_ok))?;
    StateVector::new(
        normalize(&c),
        Some(Provenance {
            kind: StateKind::IsosSqueezed,
            alpha: None,
            z: Some(z),
            structure: Some(StructureFunction::isos()),
        }),
    )
}

/// `max |((A − zA†)ψ)_r|` for rows `r ≤ dim − 3`.
pub fn isos_squeezed_eigen_residual(space: &IsosSpace, state: &StateVector, z: Complex64) -> Result<f64> {
    let a = space.rep.a.apply(&state.coeffs)?;
    let ad = space.rep.adag.apply(&state.coeffs)?;
    Ok((0..space.dim() - 2).map(|r| (a[r] - z * ad[r]).norm()).fold(0.0, f64::max))
}

/// `b|v> ∝ exp(z a†²/2)|0>`, plus a record that `|v>` has no generic
/// exponential form because `F(1) = 0`.
pub fn check_isos_squeezed_maps_to_oscillator(z: Complex64, dim: usize) -> Result<CheckReport> {
    let space = build_isos_rep(dim)?;
    let v = isos_squeezed_vacuum(z, dim)?;
    let mapped = normalize(&space.b.apply(&v.coeffs)?);
    let ad = oscillator_lowering(dim).adjoint();
    let gen = ad.matmul(&ad)?.scale(z * 0.5);
    let target = normalize(&gen.matexp_truncated(dim)?.column(0));
    let residual = scaled_vector_residual(&mapped, &target, |r| r + 2 < dim);
    let mut report = CheckReport::new();
    report.push(CheckEntry::new("b|v> = exp(z adag^2/2)|0>", residual, 1e-9).boundary_excluded(true));
    let f1 = space.rep.fdiag[1];
    report.push(
        CheckEntry::new("F(1) = 0 obstructs S(z)|0>", f1.abs(), 0.0)
            .with_note("N/F(N) is singular at n = 1, so the squeezed vacuum has no generic exponential form"),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn matrix_elements() {
        let s = build_isos_rep(8).unwrap();
        assert_eq!(s.rep.a[(1, 2)], c(2f64.sqrt()));
        assert_eq!(s.rep.a[(0, 1)], c(0.0));
        assert_eq!(s.rep.adag[(3, 2)], c(2.0 * 3f64.sqrt()));
        let r = check_isos_structure(&s).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(build_isos_rep(3).is_err());
        let bbd = s.b.matmul(&s.bdag).unwrap();
        assert_eq!(bbd[(3, 3)], c(4.0));
    }

    #[test]
    fn hypergeometric_values() {
        assert_eq!(hypergeom_0f2(1.0, 2.0, 0.0, 1e-16).unwrap(), 1.0);
        assert!((hypergeom_0f2(1.0, 2.0, 1.0, 1e-16).unwrap() - 1.542838638501).abs() < 1e-12);
        assert!((hypergeom_0f2(1.0, 2.0, 0.25, 1e-16).unwrap() - 1.12762230776572).abs() < 1e-12);
        assert!((hypergeom_0f2(1.0, 2.0, 4.0, 1e-16).unwrap() - 3.74454479369045).abs() < 1e-12);
        assert!((hypergeom_0f2(0.5, 3.5, -2.0, 1e-16).unwrap() - 0.0184242476814003).abs() < 1e-13);
        assert_eq!(hypergeom_0f2(0.0, 2.0, 1.0, 1e-16).unwrap_err(), Error::PoleParameter(0.0));
        assert_eq!(hypergeom_0f2(1.0, -3.0, 1.0, 1e-16).unwrap_err(), Error::PoleParameter(-3.0));
    }

    #[test]
    fn coherent_state() {
        let s = isos_coherent_state(c(0.0), 8).unwrap();
        assert_eq!(s.coeffs[1], ONE);
        let alpha = c(0.5);
        let st = isos_coherent_state(alpha, 24).unwrap();
        assert_eq!(st.coeffs[0], ZERO);
        let n = hypergeom_0f2(1.0, 2.0, 0.25, 1e-16).unwrap();
        assert!((st.coeffs[1].re - n.powf(-0.5)).abs() < 1e-15);
        assert!(st.normalized);
        let space = build_isos_rep(24).unwrap();
        assert!(isos_coherent_eigen_residual(&space, &st, alpha).unwrap() < 1e-10);
        let raw = isos_coherent_series(c(1.5), 40);
        let norm_sq: f64 = raw.iter().map(|v| v.norm_sqr()).sum();
        assert!((norm_sq - hypergeom_0f2(1.0, 2.0, 2.25, 1e-16).unwrap()).abs() < 1e-10);
        match isos_coherent_state(c(6.0), 8).unwrap_err() {
            Error::InadequateTruncation { required, .. } => assert!(required > 8),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn intertwining() {
        let r = check_coherent_intertwining(c(0.5), 32).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let r = check_coherent_intertwining(c(0.0), 8).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn squeezed() {
        let v = isos_squeezed_vacuum(c(0.0), 8).unwrap();
        assert_eq!(v.coeffs[1], ONE);
        let v = isos_squeezed_vacuum(c(0.3), 48).unwrap();
        assert!((v.coeffs[3] / v.coeffs[1] - c(0.3 / 6f64.sqrt())).norm() < 1e-15);
        assert!((v.coeffs[3].re / v.coeffs[1].re - 0.12247).abs() < 1e-5);
        assert!(v.coeffs.iter().step_by(2).all(|x| *x == ZERO));
        let space = build_isos_rep(48).unwrap();
        assert!(isos_squeezed_eigen_residual(&space, &v, c(0.3)).unwrap() < 1e-9);
        assert!(isos_squeezed_vacuum(c(1.2), 8).is_err());
    }

    #[test]
    fn squeezed_maps_to_oscillator() {
        for (z, dim) in [(0.0, 8), (0.3, 48), (0.45, 64)] {
            let r = check_isos_squeezed_maps_to_oscillator(c(z), dim).unwrap();
            assert!(r.all_pass(), "{z}: {r:?}");
        }
    }
}
