//! Property tests for the invariants of each module.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use gdo_core::isos::{build_isos_rep, check_isos_structure, hypergeom_0f2, isos_coherent_series};
use gdo_core::multiphoton::{build_sector_realization, build_two_mode_realization, CouplingSpec};
use gdo_core::numerics::{normalize, vector_norm};
use gdo_core::phase::{exp_phase_from_rep, pb_phase_operator};
use gdo_core::repspace::{
    boundary_defect, build_cyclic_rep, build_fock_rep, check_cyclic_admissibility, check_gdo_relations,
    check_gdo_relations_all_rows,
};
use gdo_core::states::{
    coherent_eigen_residual_full, coherent_state_on, deformed_exponential_operator, displacement_operator,
    squeeze_operator, squeezed_eigen_residual, squeezed_eigen_residual_full, squeezed_vacuum_on, verify_identity_tt,
    verify_identity_tttt, StateOptions,
};
use gdo_core::structure::{parse_structure, root_of_unity};
use gdo_core::{ComplexMatrix, Complex64, Representation, StructureFunction};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex_in_disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..(2.0 * PI)).prop_map(move |(u, t)| Complex64::from_polar(radius * u.sqrt(), t))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        ComplexMatrix::new(rows, cols, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
    })
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim, dim).prop_map(|m| (&m + &m.adjoint()).scale(c(0.5, 0.0)))
}

fn strictly_triangular(dim: usize, upper: bool) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim, dim).prop_map(move |m| {
        ComplexMatrix::from_fn(dim, dim, |r, col| if (upper && col > r) || (!upper && r > col) { m[(r, col)] } else { c(0.0, 0.0) })
    })
}

/// Built-in families with parameters drawn from their valid ranges.
fn any_family() -> impl Strategy<Value = StructureFunction> {
    prop_oneof![
        Just(StructureFunction::harmonic()),
        Just(StructureFunction::isos()),
        (1.05..3.0f64).prop_map(|q| StructureFunction::q_symmetric(c(q, 0.0)).unwrap()),
        (2usize..12).prop_map(|s| StructureFunction::q_abs(root_of_unity(s)).unwrap()),
        (2usize..12, 0.0..1.0f64).prop_map(|(s, k)| StructureFunction::q_abs_shift(root_of_unity(s), k).unwrap()),
        (1.01..1.3f64, prop::collection::vec(0.1..5.0f64, 2..4))
            .prop_map(|(q, w)| StructureFunction::self_similar(q, w).unwrap()),
    ]
}

/// Families with a Fock representation, excluding isos.
fn fock_family() -> impl Strategy<Value = StructureFunction> {
    prop_oneof![
        Just(StructureFunction::harmonic()),
        (1.05..3.0f64).prop_map(|q| StructureFunction::q_symmetric(c(q, 0.0)).unwrap()),
    ]
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn families_are_finite_and_nonnegative(f in any_family(), xs in prop::collection::vec(0.0..64.0f64, 1000)) {
        for x in xs {
            let v = f.eval(x).unwrap();
            prop_assert!(v.is_finite() && v >= 0.0, "F({x}) = {v}");
        }
    }

    #[test]
    fn q_abs_is_periodic(s in prop::sample::select(vec![3usize, 5, 8]), xs in prop::collection::vec(0.0..64.0f64, 100)) {
        let f = StructureFunction::q_abs(root_of_unity(s)).unwrap();
        for x in xs {
            prop_assert!((f.eval(x).unwrap() - f.eval(x + s as f64 + 1.0).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn matmul_is_associative(
        (a, b, d) in (1usize..7, 1usize..7, 1usize..7, 1usize..7)
            .prop_flat_map(|(n, m, k, l)| (matrix(n, m), matrix(m, k), matrix(k, l)))
    ) {
        let left = a.matmul(&b).unwrap().matmul(&d).unwrap();
        let right = a.matmul(&b.matmul(&d).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() / left.max_abs().max(1.0) < 1e-12);
    }

    #[test]
    fn matexp_of_nilpotent_is_exact(
        m in (2usize..9, any::<bool>()).prop_flat_map(|(n, up)| strictly_triangular(n, up))
    ) {
        let dim = m.rows();
        let short = m.matexp_truncated(dim).unwrap();
        let long = m.matexp_truncated(dim + 5).unwrap();
        prop_assert!(short.max_abs_diff(&long).unwrap() < 1e-13);
    }

    #[test]
    fn eigenvectors_are_orthonormal(h in (1usize..10).prop_flat_map(hermitian)) {
        let e = h.hermitian_eigen().unwrap();
        let v = &e.vectors;
        let gram = v.adjoint().matmul(v).unwrap();
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(h.rows())).unwrap() < 1e-10);
        let av = h.matmul(v).unwrap();
        let vl = v.matmul(&ComplexMatrix::from_real_diag(&e.values)).unwrap();
        prop_assert!(av.max_abs_diff(&vl).unwrap() < 1e-9);
    }

    #[test]
    fn admissible_cyclic_reps_close_on_every_row(s in 2usize..13, eta in 0.0..1.0f64, k in 0.0..1.0f64, shift in any::<bool>(), phase in 0.0..(2.0 * PI)) {
        let q = root_of_unity(s);
        let f = if shift { StructureFunction::q_abs_shift(q, k).unwrap() } else { StructureFunction::q_abs(q).unwrap() };
        prop_assume!(check_cyclic_admissibility(&f, s, eta).all_pass());
        let rep = build_cyclic_rep(&f, s, eta, Complex64::from_polar(1.0, phase)).unwrap();
        prop_assert!(rep.boundary_rows.is_empty());
        let r = check_gdo_relations_all_rows(&rep, 1e-10).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
        prop_assert!(rep.adag.max_abs_diff(&rep.a.adjoint()).unwrap() < 1e-12);
    }

    #[test]
    fn fock_boundary_defect_is_minus_f_dim(f in fock_family(), dim in 2usize..41) {
        let rep = build_fock_rep(&f, dim).unwrap();
        let r = check_gdo_relations(&rep, 1e-10).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
        let d = boundary_defect(&rep).unwrap();
        let fd = f.eval(dim as f64).unwrap();
        prop_assert_eq!(d.len(), 1);
        prop_assert_eq!(d[0].0, dim - 1);
        prop_assert!((d[0].1 + fd).abs() <= 1e-12 * fd.max(1.0));
        prop_assert!(rep.adag.max_abs_diff(&rep.a.adjoint()).unwrap() < 1e-12);
    }

    #[test]
    fn representation_json_round_trips(f in fock_family(), dim in 2usize..20, s in 2usize..9, eta in 0.05..0.95f64) {
        let rep = build_fock_rep(&f, dim).unwrap();
        let text = rep.to_json().unwrap();
        let back = Representation::from_json(&text).unwrap();
        prop_assert_eq!(&back, &rep);
        prop_assert_eq!(back.to_json().unwrap(), text);
        let g = StructureFunction::q_abs(root_of_unity(s)).unwrap();
        if let Ok(cyc) = build_cyclic_rep(&g, s, eta, c(0.0, 1.0)) {
            let text = cyc.to_json().unwrap();
            let back = Representation::from_json(&text).unwrap();
            prop_assert_eq!(&back, &cyc);
            prop_assert_eq!(back.to_json().unwrap(), text);
        }
    }

    #[test]
    fn phase_decomposition_is_unitary_and_complete(s in 1usize..13, theta0 in -PI..PI) {
        let pd = pb_phase_operator(s, theta0).unwrap();
        let dim = s + 1;
        let id = ComplexMatrix::identity(dim);
        prop_assert!(pd.exp_phi.adjoint().matmul(&pd.exp_phi).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
        prop_assert!(pd.phi.max_abs_diff(&pd.phi.adjoint()).unwrap() < 1e-12);
        let u = &pd.phase_states;
        prop_assert!(u.matmul(&u.adjoint()).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
        let mut thetas = pd.thetas.clone();
        thetas.sort_by(f64::total_cmp);
        let values = pd.phi.hermitian_eigen().unwrap().values;
        for (a, b) in values.iter().zip(&thetas) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        for t in &pd.thetas {
            prop_assert!(*t >= theta0 && *t < theta0 + 2.0 * PI);
        }
    }

    #[test]
    fn polar_factor_of_cyclic_rep_is_unitary(s in 2usize..13, eta in 0.0..1.0f64, theta0 in -1.0..1.0f64) {
        let f = StructureFunction::q_abs(root_of_unity(s)).unwrap();
        prop_assume!(check_cyclic_admissibility(&f, s, eta).all_pass());
        let rep = gdo_core::repspace::build_cyclic_rep_theta0(&f, s, eta, theta0).unwrap();
        let pd = exp_phase_from_rep(&rep).unwrap();
        let id = ComplexMatrix::identity(s + 1);
        prop_assert!(pd.exp_phi.adjoint().matmul(&pd.exp_phi).unwrap().max_abs_diff(&id).unwrap() < 1e-12);
        let pb = pb_phase_operator(s, theta0).unwrap();
        prop_assert!(pd.phi.max_abs_diff(&pb.phi).unwrap() < 1e-10);
    }

    #[test]
    fn isos_structure_holds(dim in 4usize..40) {
        let r = check_isos_structure(&build_isos_rep(dim).unwrap()).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn isos_normalizer_is_0f2(alpha in complex_in_disk(1.5)) {
        let norm2 = vector_norm(&isos_coherent_series(alpha, 40)).powi(2);
        let f = hypergeom_0f2(1.0, 2.0, alpha.norm_sqr(), 1e-17).unwrap();
        prop_assert!((norm2 - f).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn series_and_exponential_states_agree(f in fock_family(), alpha in complex_in_disk(1.0), z in complex_in_disk(0.5)) {
        let rep = build_fock_rep(&f, 48).unwrap();
        let coh = coherent_state_on(&rep, alpha, StateOptions::default()).unwrap();
        let via = normalize(&displacement_operator(&rep, alpha).unwrap().column(0));
        prop_assert!(max_abs_diff(&via, &coh.coeffs) < 1e-10);
        let sq = squeezed_vacuum_on(&rep, z, StateOptions { tail_tol: 1e-6 }).unwrap();
        let via = normalize(&squeeze_operator(&rep, z).unwrap().column(0));
        prop_assert!(max_abs_diff(&via, &sq.coeffs) < 1e-10);
        prop_assert!((coh.norm() - 1.0).abs() < 1e-12 && (sq.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_residuals_shrink_with_dim(f in fock_family(), alpha in complex_in_disk(1.0), z in complex_in_disk(0.5)) {
        let loose = StateOptions { tail_tol: 1.0 };
        let mut last = (f64::INFINITY, f64::INFINITY);
        for dim in [16, 32, 48] {
            let rep = build_fock_rep(&f, dim).unwrap();
            let coh = coherent_state_on(&rep, alpha, loose).unwrap();
            let sq = squeezed_vacuum_on(&rep, z, loose).unwrap();
            let now = (
                coherent_eigen_residual_full(&rep, &coh, alpha).unwrap(),
                squeezed_eigen_residual_full(&rep, &sq, z).unwrap(),
            );
            prop_assert!(now.0 <= last.0 && now.1 <= last.1, "dim {dim}: {now:?} after {last:?}");
            last = now;
        }
    }

    #[test]
    fn identities_hold_up_to_half_dim(f in fock_family(), dim in 8usize..33) {
        let rep = build_fock_rep(&f, dim).unwrap();
        let r = verify_identity_tt(&rep, dim / 4).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
        let r = verify_identity_tttt(&rep, dim / 2).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn sector_realizations_close(m in 1usize..5, i_frac in 0.0..1.0f64, a in 1u32..5, b in 0u32..4, dim in 4usize..16) {
        let i = ((m as f64) * i_frac) as usize;
        let mut spec = CouplingSpec::single("a*N^2 + b*N + 1", m, i.min(m - 1));
        spec.params = BTreeMap::from([("a".to_string(), a as f64), ("b".to_string(), b as f64)]);
        let rep = build_sector_realization(&spec, dim).unwrap();
        let r = check_gdo_relations(&rep, 1e-10).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn two_mode_squeezed_states_are_annihilated(m in 1usize..3, n in 1usize..3, z in complex_in_disk(0.3)) {
        let rep = build_two_mode_realization(&CouplingSpec::two_mode("1/(N1+N2+1)", m, n, 0, 0), 48).unwrap();
        let sq = squeezed_vacuum_on(&rep, z, StateOptions { tail_tol: 1e-6 }).unwrap();
        prop_assert!(squeezed_eigen_residual(&rep, &sq, z).unwrap() < 1e-9);
    }
}

#[test]
fn q_symmetric_tends_to_harmonic() {
    let f = StructureFunction::q_symmetric(c(1.0 + 1e-8, 0.0)).unwrap();
    for x in 0..=20 {
        assert!((f.eval(x as f64).unwrap() - x as f64).abs() < 1e-6);
    }
}

#[test]
fn parsed_isos_matches_builtin() {
    let parsed = parse_structure("x*(x-1)^2", BTreeMap::new()).unwrap();
    let builtin = StructureFunction::isos();
    for k in 0..=64 {
        let x = k as f64 * 0.5;
        assert!((parsed.eval(x).unwrap() - builtin.eval(x).unwrap()).abs() < 1e-14);
    }
}

#[test]
fn deformed_exponential_differs_but_agrees_on_vacuum() {
    let f = StructureFunction::q_symmetric(c(2.0, 0.0)).unwrap();
    let rep = build_fock_rep(&f, 24).unwrap();
    let alpha = c(0.6, 0.2);
    let ordinary = displacement_operator(&rep, alpha).unwrap();
    let deformed = deformed_exponential_operator(&rep, alpha).unwrap();
    assert!(max_abs_diff(&ordinary.column(0), &deformed.column(0)) < 1e-10);
    assert!(ordinary.max_abs_diff(&deformed).unwrap() > 1e-2);
}
