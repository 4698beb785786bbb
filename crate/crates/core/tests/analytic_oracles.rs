//! The closed-form chain against oracles written independently of it: the
//! same long-time and canonical averages expressed through Bogoliubov angles
//! and integrated with a fixed composite Simpson rule, plus limits and finite
//! lattices.

use std::f64::consts::PI;

use xy_ergodicity::analytic::{equilibrium_correlator_set, evolved_correlator_set, evolved_magnetization, ChainPoint};
use xy_ergodicity::dynamics::thermal_state;
use xy_ergodicity::hamiltonian::{build_hamiltonian, ModelParams};
use xy_ergodicity::lattice::{build_lattice, BondClass, Geometry};
use xy_ergodicity::pauli::{Pauli, PauliString};
use xy_ergodicity::quadrature::QuadratureSpec;
use xy_ergodicity::quench::ThermalProfile;
use xy_ergodicity::spectral::spectral_decompose;

fn simpson(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = PI / n as f64;
    let inner: f64 = (1..n)
        .map(|k| f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (f(0.0) + inner + f(PI))
}

/// Bogoliubov angle and quasiparticle energy at field `a`:
/// `Λ e^{iθ} = (cos φ − a) + iγ sin φ`.
fn angle(a: f64, phi: f64, gamma: f64) -> (f64, f64) {
    let (re, im) = (phi.cos() - a, gamma * phi.sin());
    (im.atan2(re), re.hypot(im))
}

fn occupation(beta: f64, lambda: f64) -> f64 {
    (0.5 * beta * lambda).tanh()
}

/// `(m_z, G(−1), G(+1))` after a quench from field `a` to zero.
fn oracle_evolved(a: f64, beta: f64, gamma: f64) -> (f64, f64, f64) {
    let n = 10_000;
    let m = simpson(
        |phi| {
            let (ta, la) = angle(a, phi, gamma);
            let (t0, _) = angle(0.0, phi, gamma);
            occupation(beta, la) * (ta - t0).cos() * t0.cos()
        },
        n,
    ) / PI;
    let g = |r: f64| {
        -simpson(
            |phi| {
                let (ta, la) = angle(a, phi, gamma);
                let (t0, _) = angle(0.0, phi, gamma);
                occupation(beta, la) * (ta - t0).cos() * (r * phi + t0).cos()
            },
            n,
        ) / PI
    };
    (-m, g(-1.0), g(1.0))
}

/// `(m_z, G(−1), G(+1))` in the canonical state at field `a`.
fn oracle_canonical(a: f64, beta: f64, gamma: f64) -> (f64, f64, f64) {
    let n = 10_000;
    let m = simpson(
        |phi| {
            let (t, l) = angle(a, phi, gamma);
            occupation(beta, l) * t.cos()
        },
        n,
    ) / PI;
    let g = |r: f64| {
        -simpson(
            |phi| {
                let (t, l) = angle(a, phi, gamma);
                occupation(beta, l) * (r * phi + t).cos()
            },
            n,
        ) / PI
    };
    (-m, g(-1.0), g(1.0))
}

#[test]
fn evolved_correlators_match_angle_form_oracle() {
    let quad = QuadratureSpec::default();
    for &a in &[0.2, 0.6, 1.2, 2.0] {
        for &beta in &[0.5, 20.0] {
            for &gamma in &[0.5, 0.9] {
                let c = evolved_correlator_set(&ChainPoint::new(a, beta, gamma).unwrap(), &quad)
                    .unwrap()
                    .set;
                let (m, gm, gp) = oracle_evolved(a, beta, gamma);
                let case = format!("a={a} beta={beta} gamma={gamma}");
                assert!((c.m_z - m).abs() < 1e-6, "{case}: {} vs {m}", c.m_z);
                assert!((c.t_xx - gm).abs() < 1e-6, "{case}: {} vs {gm}", c.t_xx);
                assert!((c.t_yy - gp).abs() < 1e-6, "{case}: {} vs {gp}", c.t_yy);
                // Wick
                assert!((c.t_zz - (m * m - gm * gp)).abs() < 1e-6, "{case}");
            }
        }
    }
}

#[test]
fn canonical_correlators_match_angle_form_oracle() {
    let quad = QuadratureSpec::default();
    for &a in &[0.0, 0.6, 1.0, 2.0] {
        for &beta in &[0.3, 2.0, 20.0] {
            let c = equilibrium_correlator_set(&ChainPoint::new(a, beta, 0.5).unwrap(), &quad)
                .unwrap()
                .set;
            let (m, gm, gp) = oracle_canonical(a, beta, 0.5);
            let case = format!("a={a} beta={beta}");
            assert!((c.m_z - m).abs() < 1e-6, "{case}: {} vs {m}", c.m_z);
            assert!((c.t_xx - gm).abs() < 1e-6, "{case}: {} vs {gm}", c.t_xx);
            assert!((c.t_yy - gp).abs() < 1e-6, "{case}: {} vs {gp}", c.t_yy);
        }
    }
}

#[test]
fn no_quench_leaves_the_canonical_state() {
    let quad = QuadratureSpec::default();
    for &beta in &[0.1, 3.0, 50.0, f64::INFINITY] {
        for &gamma in &[0.2, 0.7, 1.0] {
            let p = ChainPoint::new(0.0, beta, gamma).unwrap();
            let ev = evolved_correlator_set(&p, &quad).unwrap().set;
            let eq = equilibrium_correlator_set(&p, &quad).unwrap().set;
            assert!((ev.t_xx - eq.t_xx).abs() < 1e-9);
            assert!((ev.t_yy - eq.t_yy).abs() < 1e-9);
            assert!((ev.t_zz - eq.t_zz).abs() < 1e-9);
            assert!((ev.m_z - eq.m_z).abs() < 1e-9);
        }
    }
}

#[test]
fn reversing_anisotropy_swaps_xx_and_yy() {
    let quad = QuadratureSpec::default();
    for &(a, beta) in &[(0.0, 2.0), (0.6, 20.0), (2.0, 5.0)] {
        let plus = evolved_correlator_set(&ChainPoint::new(a, beta, 0.5).unwrap(), &quad)
            .unwrap()
            .set;
        let minus = evolved_correlator_set(&ChainPoint::new(a, beta, -0.5).unwrap(), &quad)
            .unwrap()
            .set;
        assert!((plus.t_xx - minus.t_yy).abs() < 1e-10);
        assert!((plus.t_yy - minus.t_xx).abs() < 1e-10);
        assert!((plus.m_z - minus.m_z).abs() < 1e-10);
    }
}

#[test]
fn strong_initial_field_leaves_one_over_one_plus_gamma() {
    // a fully polarized state dephases to ∫cos²φ/Λ₀² dφ/π = 1/(1+γ)
    let quad = QuadratureSpec::default();
    for &gamma in &[0.3, 0.5, 1.0] {
        let m = evolved_magnetization(&ChainPoint::new(1e5, 20.0, gamma).unwrap(), &quad)
            .unwrap()
            .value;
        assert!((m - 1.0 / (1.0 + gamma)).abs() < 1e-3, "gamma={gamma}: {m}");
    }
}

#[test]
fn finite_chains_converge_at_high_temperature() {
    // correlation lengths are short at β̃ = 0.5, so ten sites already agree
    let quad = QuadratureSpec::default();
    let (beta, a, gamma) = (0.5, 0.6, 0.5);
    let inf = equilibrium_correlator_set(&ChainPoint::new(a, beta, gamma).unwrap(), &quad)
        .unwrap()
        .set;

    let lattice = build_lattice(Geometry::Chain(10)).unwrap();
    let h = build_hamiltonian(&lattice, &ModelParams::new(1.0, gamma, a, beta).unwrap(), a).unwrap();
    let rho = thermal_state(&spectral_decompose(&h).unwrap(), beta).unwrap();
    let z = PauliString::single(3, Pauli::Z).expectation(rho.as_ref()).re;
    let xx = PauliString::pair(3, Pauli::X, 4, Pauli::X).expectation(rho.as_ref()).re;
    let yy = PauliString::pair(3, Pauli::Y, 4, Pauli::Y).expectation(rho.as_ref()).re;
    assert!((z - inf.m_z).abs() < 1e-4, "{z} vs {}", inf.m_z);
    assert!((xx - inf.t_xx).abs() < 1e-4, "{xx} vs {}", inf.t_xx);
    assert!((yy - inf.t_yy).abs() < 1e-4, "{yy} vs {}", inf.t_yy);

    // zero-field profiles at lower temperature approach from one side
    let target = equilibrium_correlator_set(&ChainPoint::new(0.0, 2.0, gamma).unwrap(), &quad)
        .unwrap()
        .set
        .t_xx;
    let gaps: Vec<f64> = [6, 8, 10]
        .into_iter()
        .map(|n| {
            let l = build_lattice(Geometry::Chain(n)).unwrap();
            let post = spectral_decompose(
                &build_hamiltonian(&l, &ModelParams::new(1.0, gamma, 0.0, 2.0).unwrap(), 0.0).unwrap(),
            )
            .unwrap();
            let b = l.representative(BondClass::Chain).unwrap();
            let p = ThermalProfile::new(&post, &PauliString::pair(b.a, Pauli::X, b.b, Pauli::X)).unwrap();
            p.expectation(2.0).unwrap() - target
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1].abs() < w[0].abs()), "{gaps:?}");
}
