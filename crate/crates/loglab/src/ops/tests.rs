use super::*;
use crate::grid::{Grid1D, GridFunction};
use crate::profile;
use crate::specialfn::{dimensional_constants, gamma_fn};
use approx::assert_relative_eq;

fn torsion(grid: &Arc<Grid1D>, s: f64) -> GridFunction {
    GridFunction::from_fn(grid.clone(), |x| (1.0 - x * x).max(0.0).powf(s)).unwrap()
}

#[test]
fn fraclap_symmetric_and_positive_form() {
    let g = Grid1D::shared(-1.0, 1.0, 96).unwrap();
    for &s in &[0.1, 0.3, 0.5, 0.7] {
        let op = assemble_fraclap(&g, s).unwrap();
        assert!(op.max_asymmetry() <= 1e-10 * op.max_abs_entry(), "s={s}");
        for seed in 0..5 {
            let u = profile::smooth_profile(&g, seed);
            assert!(op.quad_form(&u, &u).unwrap() > 0.0, "s={s} seed={seed}");
        }
    }
    assert!(assemble_fraclap(&g, 0.0).is_err());
    assert!(assemble_fraclap(&g, 1.0).is_err());
}

#[test]
fn fraclap_matches_brute_force_quadrature() {
    // zero the probed nodes so the diagonal (with its boundary-model
    // correction) drops out and every band closed form is exercised
    let g = Grid1D::shared(-1.0, 1.0, 48).unwrap();
    for &s in &[0.15, 0.5, 0.55] {
        let op = assemble_fraclap(&g, s).unwrap();
        let mut vals: Vec<f64> =
            g.nodes().iter().map(|&x| (1.3 * x + 0.4).sin() + 0.2).collect();
        for &i in &[0usize, 3, 24, 47] {
            vals[i] = 0.0;
        }
        let u = GridFunction::new(g.clone(), vals.clone()).unwrap();
        let au = op.apply(&u).unwrap();
        for &i in &[0usize, 3, 24, 47] {
            let oracle = super::fraclap::oracle::row_action(&g, s, &vals, i);
            assert_relative_eq!(au.values()[i], oracle, max_relative = 1e-8, epsilon = 1e-10);
        }
    }
}

#[test]
fn fraclap_diagonal_is_base_minus_boundary_model() {
    // on a basis vector the oracle gives the uncorrected diagonal, so the
    // difference isolates the correction, which must be positive and decay
    // into the interior
    let g = Grid1D::shared(-1.0, 1.0, 48).unwrap();
    let s = 0.2;
    let op = assemble_fraclap(&g, s).unwrap();
    let mut prev = f64::INFINITY;
    for i in [0usize, 1, 5, 23] {
        let mut e = vec![0.0; 48];
        e[i] = 1.0;
        let base = super::fraclap::oracle::row_action(&g, s, &e, i);
        let corr = base - op.entry(i, i);
        assert!(corr > 0.0, "i={i}");
        assert!(corr < prev, "i={i}");
        prev = corr;
    }
}

#[test]
fn torsion_oracle_error_decreases_first_order() {
    for &s in &[0.1, 0.2] {
        let target = gamma_fn(2.0 * s + 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for n in [64usize, 128, 256] {
            let g = Grid1D::shared(-1.0, 1.0, n).unwrap();
            let op = assemble_fraclap(&g, s).unwrap();
            let au = op.apply(&torsion(&g, s)).unwrap();
            let err = au
                .values()
                .iter()
                .fold(0.0f64, |m, v| m.max((v - target).abs()))
                / target;
            assert!(err < prev, "s={s} n={n} err={err}");
            assert!(err < 0.02, "s={s} n={n} err={err}");
            prev = err;
        }
    }
}

#[test]
fn fraclap_row_sums_positive_on_ones() {
    for &s in &[0.1, 0.2] {
        let g = Grid1D::shared(-1.0, 1.0, 64).unwrap();
        let op = assemble_fraclap(&g, s).unwrap();
        let ones = GridFunction::from_fn(g.clone(), |_| 1.0).unwrap();
        let row_action = op.apply(&ones).unwrap();
        assert!(row_action.values().iter().all(|&v| v > 0.0), "s={s}");
    }
}

#[test]
fn apply_is_linear_and_zero_preserving() {
    let g = Grid1D::shared(-1.0, 1.0, 64).unwrap();
    let op = assemble_fraclap(&g, 0.25).unwrap();
    let z = GridFunction::zero(g.clone());
    assert!(op.apply(&z).unwrap().values().iter().all(|&v| v == 0.0));

    let u = profile::smooth_profile(&g, 1);
    let v = profile::smooth_profile(&g, 2);
    let sum = GridFunction::new(
        g.clone(),
        u.values().iter().zip(v.values()).map(|(a, b)| a + b).collect(),
    )
    .unwrap();
    let lhs = op.apply(&sum).unwrap();
    let au = op.apply(&u).unwrap();
    let av = op.apply(&v).unwrap();
    let scale = lhs.lp_norm(f64::INFINITY).unwrap();
    for i in 0..64 {
        assert!((lhs.values()[i] - au.values()[i] - av.values()[i]).abs() <= 1e-12 * scale);
    }

    let g2 = Grid1D::shared(-1.0, 1.0, 65).unwrap();
    assert!(op.apply(&GridFunction::zero(g2)).is_err());
}

#[test]
fn loglap_symmetric_and_decomposition_identity() {
    let g = Grid1D::shared(-1.0, 1.0, 80).unwrap();
    let op = assemble_loglap(&g).unwrap();
    assert!(op.max_asymmetry() <= 1e-10 * op.max_abs_entry());

    let consts = dimensional_constants(1).unwrap();
    let parts = assemble_loglap_parts(&g).unwrap();
    let tol = 1e-10 * op.max_abs_entry();
    for i in 0..80 {
        for j in 0..80 {
            let recon = parts.near.entry(i, j) - consts.c_n * parts.far.entry(i, j)
                + if i == j { consts.rho_n } else { 0.0 };
            assert!(
                (op.entry(i, j) - recon).abs() <= tol,
                "entry ({i},{j}): {} vs {recon}",
                op.entry(i, j)
            );
        }
    }
}

#[test]
fn loglap_band_is_s_derivative_of_fraclap_band() {
    let g = Grid1D::shared(-1.0, 1.0, 64).unwrap();
    let log = assemble_loglap(&g).unwrap();
    let s = 1e-5;
    let frac = assemble_fraclap(&g, s).unwrap();
    for k in [1usize, 2, 5, 20, 63] {
        let d = frac.entry(0, k) / s;
        assert_relative_eq!(d, log.entry(0, k), max_relative = 2e-3);
    }
}

#[test]
fn loglap_self_adjoint_against_inner_product() {
    let g = Grid1D::shared(-1.0, 1.0, 96).unwrap();
    let op = assemble_loglap(&g).unwrap();
    let u = profile::smooth_profile(&g, 11);
    let v = profile::smooth_profile(&g, 12);
    let lhs = op.quad_form(&u, &v).unwrap();
    let rhs = u.inner_l2(&op.apply(&v).unwrap()).unwrap();
    assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
    // bilinear symmetry
    assert_relative_eq!(lhs, op.quad_form(&v, &u).unwrap(), max_relative = 1e-12);
}

#[test]
fn loglap_wide_domain_flag_and_negative_form() {
    let g = Grid1D::shared(-4.0, 4.0, 256).unwrap();
    let op = assemble_loglap(&g).unwrap();
    assert!(op.meta().wide_domain);
    // a spread-out low-frequency profile has negative log-energy
    let found = (0..20).any(|seed| {
        let u = profile::low_frequency_profile(&g, seed);
        op.quad_form(&u, &u).unwrap() < 0.0
    });
    assert!(found, "no negative-form witness among 20 seeds");

    let narrow = Grid1D::shared(-1.0, 1.0, 64).unwrap();
    assert!(!assemble_loglap(&narrow).unwrap().meta().wide_domain);
    // resolution guard
    let coarse = Grid1D::shared(-8.0, 8.0, 16).unwrap();
    assert!(assemble_loglap(&coarse).is_err());
}

#[test]
fn energy_form_is_positive_definite_near_field() {
    let g = Grid1D::shared(-1.0, 1.0, 96).unwrap();
    let parts = assemble_loglap_parts(&g).unwrap();
    for seed in 0..20 {
        let u = profile::smooth_profile(&g, seed);
        assert!(parts.near.quad_form(&u, &u).unwrap() > 0.0, "seed={seed}");
    }
}

#[test]
fn operator_expansion_first_order_small_scale() {
    let g = Grid1D::shared(-1.0, 1.0, 256).unwrap();
    let log = assemble_loglap(&g).unwrap();
    let phi = profile::bump(&g);
    let lphi = log.apply(&phi).unwrap();
    let err = |s: f64| -> f64 {
        let a = assemble_fraclap(&g, s).unwrap();
        let aphi = a.apply(&phi).unwrap();
        aphi.values()
            .iter()
            .zip(phi.values())
            .zip(lphi.values())
            .fold(0.0f64, |m, ((ap, p), lp)| m.max(((ap - p) / s - lp).abs()))
    };
    let e1 = err(0.08);
    let e2 = err(0.04);
    assert!(e2 <= 0.7 * e1, "ratio {}", e2 / e1);
}

#[test]
fn quadratic_form_expansion_bound() {
    // |E_sigma(u,u) - |u|_2^2 - sigma E_L(u,u)| <= d_1 sigma^2/(s-sigma)^2 (|u|_1^2 + E_s(u,u))
    let g = Grid1D::shared(-1.0, 1.0, 256).unwrap();
    let log = assemble_loglap(&g).unwrap();
    let s = 0.2;
    let a_s = assemble_fraclap(&g, s).unwrap();
    let d1 = dimensional_constants(1).unwrap().d_n;
    let mut profiles = vec![profile::bump(&g)];
    profiles.extend((0..20).map(|k| profile::smooth_profile(&g, 100 + k)));
    for sigma in [0.05, 0.025, 0.0125] {
        let a_sig = assemble_fraclap(&g, sigma).unwrap();
        for u in &profiles {
            let l1 = u.lp_norm(1.0).unwrap();
            let l2 = u.lp_norm(2.0).unwrap();
            let el = log.quad_form(u, u).unwrap();
            let qs = a_s.quad_form(u, u).unwrap();
            let qsig = a_sig.quad_form(u, u).unwrap();
            let lhs = (qsig - l2 * l2 - sigma * el).abs();
            let rhs = d1 * sigma * sigma / (s - sigma).powi(2) * (l1 * l1 + qs);
            assert!(lhs <= rhs, "sigma={sigma} lhs={lhs} rhs={rhs}");
        }
    }
}

#[test]
fn log_energy_bounded_by_scaled_fractional_energy() {
    // |E_L(u,u)| <= 4 |u|_1^2 + (1/s) E_s(u,u)
    let g = Grid1D::shared(-1.0, 1.0, 256).unwrap();
    let log = assemble_loglap(&g).unwrap();
    let mut profiles = vec![profile::bump(&g)];
    profiles.extend((0..20).map(|k| profile::smooth_profile(&g, 200 + k)));
    for &s in &[0.05, 0.1, 0.2] {
        let a_s = assemble_fraclap(&g, s).unwrap();
        for u in &profiles {
            let l1 = u.lp_norm(1.0).unwrap();
            let el = log.quad_form(u, u).unwrap().abs();
            let qs = a_s.quad_form(u, u).unwrap();
            assert!(el <= 4.0 * l1 * l1 + qs / s, "s={s}");
        }
    }
}

#[test]
fn fourier_cross_checks_on_bump() {
    let g = Grid1D::shared(-1.0, 1.0, 512).unwrap();
    let u = profile::bump(&g);

    let s = 0.1;
    let frac = assemble_fraclap(&g, s).unwrap();
    let q = frac.quad_form(&u, &u).unwrap();
    let f = fourier_form(&u, FourierSymbol::Power(s)).unwrap();
    assert!(!f.tail_flagged);
    assert!((f.value - q).abs() <= 0.01 * q.abs(), "{} vs {q}", f.value);

    let log = assemble_loglap(&g).unwrap();
    let ql = log.quad_form(&u, &u).unwrap();
    let fl = fourier_form(&u, FourierSymbol::Log).unwrap();
    assert!(!fl.tail_flagged);
    assert!((fl.value - ql).abs() <= 0.02 * ql.abs(), "{} vs {ql}", fl.value);

    let z = GridFunction::zero(g);
    assert_eq!(fourier_form(&z, FourierSymbol::Power(0.2)).unwrap().value, 0.0);
}

#[test]
fn far_bilinear_properties() {
    let g = Grid1D::shared(-1.0, 1.0, 128).unwrap();
    for seed in 0..100 {
        let u = profile::smooth_profile(&g, 300 + seed);
        let v = profile::smooth_profile(&g, 400 + seed);
        let fb = far_bilinear(&u, &v).unwrap();
        let bound = u.lp_norm(1.0).unwrap() * v.lp_norm(1.0).unwrap();
        assert!(fb.abs() <= bound * (1.0 + 1e-12), "seed={seed}");
        assert_relative_eq!(fb, far_bilinear(&v, &u).unwrap(), max_relative = 1e-12);
    }

    // no node pairs at distance >= 1 when the support is narrow
    let narrow = Grid1D::shared(-0.5, 0.5, 64).unwrap();
    let w = GridFunction::from_fn(narrow, |x| if x.abs() < 0.4 { 1.0 } else { 0.0 }).unwrap();
    assert_eq!(far_bilinear(&w, &w).unwrap(), 0.0);
}

#[test]
fn triples_dump_shape() {
    let g = Grid1D::shared(-1.0, 1.0, 8).unwrap();
    let op = assemble_fraclap(&g, 0.3).unwrap();
    let mut out = Vec::new();
    op.write_triples_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("i,j,a_ij\n"));
    assert_eq!(text.lines().count(), 1 + 64);
}
