use qhje::linspace;
use qhje::qhj::*;
use qhje::{PotentialModel, Region};
use std::f64::consts::PI;

fn ho(n: usize) -> (PotentialModel, qhje::EnergySlice) {
    let m = PotentialModel::unit_oscillator();
    let e = m.oscillator_energy(n).unwrap();
    let s = m.slice(e).unwrap();
    (m, s)
}

#[test]
fn phase_total_all_paths() {
    for n in [0usize, 1, 2, 3, 10, 20, 40] {
        let (m, s) = ho(n);
        let g = linspace(s.x1, s.x2, 801);
        let want = (n as f64 + 0.5) * PI * s.hbar();
        let seed = default_seed(&s).unwrap();
        let num = integrate_x(&s, &seed, &g).unwrap();
        let orc = companion_oracle(&s, &g).unwrap();
        let (gen, _) = general_solution_ho(n, &m, &g, None, None).unwrap();
        for (name, f) in [("numeric", &num), ("oracle", &orc), ("general", &gen)] {
            let tot = f.real[f.len() - 1] - f.real[0];
            eprintln!("n={n} {name} {:.3e}", tot - want);
            assert!((tot - want).abs() < 1e-6, "{name} n={n}: {tot} vs {want}");
        }
    }
}

#[test]
fn log_slope_identity() {
    for n in [0usize, 2, 20, 60] {
        let (_, s) = ho(n);
        let g = linspace(s.x1, s.x2, 2001);
        let seed = default_seed(&s).unwrap();
        let f = integrate_x(&s, &seed, &g).unwrap();
        let err = f.log_slope_identity_error();
        eprintln!("n={n} identity {err:.3e}");
        assert!(err <= 1e-8);
    }
}

#[test]
fn numeric_matches_oracle_and_general() {
    let diff = |a: &ActionField, b: &ActionField| {
        a.real
            .iter()
            .zip(&b.real)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max)
    };
    for n in [0usize, 1, 2, 5] {
        let (m, s) = ho(n);
        let g = linspace(s.x1, s.x2, 401);
        let seed = default_seed(&s).unwrap();
        let num = integrate_x(&s, &seed, &g).unwrap();
        let orc = companion_oracle(&s, &g).unwrap();
        let (gen, _) = general_solution_ho(n, &m, &g, None, None).unwrap();
        let (a, b, c) = (diff(&num, &orc), diff(&num, &gen), diff(&gen, &orc));
        eprintln!("n={n} num-oracle {a:.3e} num-general {b:.3e} general-oracle {c:.3e}");
        assert!(a <= 1e-6 && b <= 1e-6 && c <= 1e-6);
    }
}

#[test]
fn residuals_small_on_solutions() {
    for n in [2usize, 10] {
        let (_, s) = ho(n);
        let g = linspace(s.x1 + 1e-3, s.x2 - 1e-3, 4001);
        let seed = default_seed(&s).unwrap();
        let num = integrate_x(&s, &seed, &g).unwrap();
        let orc = companion_oracle(&s, &g).unwrap();
        let r1 = qhje_residual(&num);
        let r2 = qhje_residual(&orc);
        eprintln!("n={n} {:?} {:?}", r1, r2);
        assert!(r1.max() < 1e-6 && r2.max() < 1e-6);
    }
}

#[test]
fn energy_derivative_against_finite_differences() {
    let n = 50;
    let (m, s) = ho(n);
    let g = linspace(s.x1 + 0.01, s.x2 - 0.01, 401);
    let seed = default_seed(&s).unwrap();
    let f = integrate_x(&s, &seed, &g).unwrap();
    let xe = integrate_xe(&f, &g).unwrap();
    let xe = xe.energy_derivative.unwrap();
    let de = 1e-5 * s.energy;
    let run = |e: f64| {
        let sl = m.slice(e).unwrap();
        let sd = oracle_seed(
            &sl,
            sl.midpoint(),
            CompanionFamily::LeftSlope(seed.left_slope.unwrap()),
        )
        .unwrap();
        integrate_x(&sl, &sd, &g).unwrap().real
    };
    let (p, q) = (run(s.energy + de), run(s.energy - de));
    let fd: Vec<f64> = p
        .iter()
        .zip(&q)
        .map(|(a, b)| (a - b) / (2.0 * de))
        .collect();
    let r = g.len() / 2;
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..g.len() {
        let a = xe[i] - xe[r];
        let b = fd[i] - fd[r];
        err = err.max((a - b).abs());
        scale = scale.max(b.abs());
    }
    eprintln!("xe rel {:.3e}", err / scale);
    assert!(err / scale < 1e-4);
}

fn assemble(n: usize, pts: usize) -> (qhje::EnergySlice, Wavefunction) {
    let (_, s) = ho(n);
    let gl = linspace(s.x1 - 4.0, s.x1, pts);
    let gm = linspace(s.x1, s.x2, pts);
    let gr = linspace(s.x2, s.x2 + 4.0, pts);
    let left = integrate_y_forbidden(&s, Region::I, &gl).unwrap();
    let right = integrate_y_forbidden(&s, Region::III, &gr).unwrap();
    let seed = default_seed(&s).unwrap();
    let mid = integrate_x(&s, &seed, &gm).unwrap();
    let wf = wavefunction_from_action(&left, &mid, &right).unwrap();
    (s, wf)
}

#[test]
fn wavefunction_matches_hermite_gaussian() {
    let (s, wf) = assemble(2, 1601);
    let exact: Vec<f64> = wf
        .grid
        .iter()
        .map(|&x| qhje::specfun::hermite_function(2, x).0)
        .collect();
    let dot: f64 = wf.psi.iter().zip(&exact).map(|(a, b)| a * b).sum();
    let sign = dot.signum();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..wf.grid.len() {
        let dx = wf.grid[i] - wf.grid[i - 1];
        let e0 = sign * wf.psi[i - 1] - exact[i - 1];
        let e1 = sign * wf.psi[i] - exact[i];
        num += 0.5 * dx * (e0 * e0 + e1 * e1);
        den += 0.5 * dx * (exact[i - 1].powi(2) + exact[i].powi(2));
    }
    let rel = (num / den).sqrt();
    eprintln!("wf rel {rel:.3e}");
    assert!(rel < 1e-6);
    for tp in [s.x1, s.x2] {
        let i = wf.grid.iter().position(|&x| x == tp).unwrap();
        assert!(wf.psi[i].is_finite());
    }
    assert_eq!(wf.nodes_between(s.x1, s.x2), 2);
}

#[test]
fn ground_state_forbidden_action_is_quadratic() {
    let (_, s) = ho(0);
    let g = linspace(s.x2, s.x2 + 3.0, 301);
    let f = integrate_y_forbidden(&s, Region::III, &g).unwrap();
    for (x, y) in g.iter().zip(&f.imag) {
        let want = 0.5 * (x * x - s.x2 * s.x2);
        assert!((y - want).abs() < 1e-8, "{x}: {y} vs {want}");
    }
    let gl = linspace(s.x1 - 3.0, s.x1, 301);
    let f = integrate_y_forbidden(&s, Region::I, &gl).unwrap();
    for (x, y) in gl.iter().zip(&f.imag) {
        assert!((y - 0.5 * (x * x - s.x1 * s.x1)).abs() < 1e-8);
        assert!(*y >= -1e-12);
    }
}

#[test]
fn special_solution_satisfies_the_equation_between_nodes() {
    let m = PotentialModel::unit_oscillator();
    let st = OscillatorState::new(&m, 3).unwrap();
    let s = st.slice().unwrap();
    // between the two central nodes
    let a = st.nodes[1] + 0.05;
    let b = st.nodes[2] - 0.05;
    let g = linspace(a, b, 2001);
    let f = special_field_ho(3, &m, &g).unwrap();
    let r = qhje_residual(&f);
    assert!(r.max() < 1e-7, "{r:?}");
    let _ = s;
}

#[test]
fn classical_action_fails_by_a_term_linear_in_hbar() {
    let mut res = Vec::new();
    for h in [1.0, 0.5, 0.25] {
        let m = PotentialModel::harmonic(1.0, 1.0, h).unwrap();
        let s = m.slice(5.5).unwrap();
        let g = linspace(s.x1 + 0.3, s.x2 - 0.3, 2001);
        let f = ActionField::classical(&s, &g).unwrap();
        res.push(qhje_residual(&f).max());
    }
    assert!(res[0] > 1e-3);
    for w in res.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 2.0).abs() < 0.2, "{res:?}");
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn phase_is_monotone_with_exact_total(n in 0usize..30, pts in 50usize..400) {
            let (_, s) = ho(n);
            let g = linspace(s.x1, s.x2, pts);
            let f = companion_oracle(&s, &g).unwrap();
            prop_assert!(f.real_d1.iter().all(|d| *d > 0.0));
            prop_assert!(f.real.windows(2).all(|w| w[1] > w[0]));
            let want = (n as f64 + 0.5) * PI;
            prop_assert!((f.real[pts - 1] - want).abs() < 1e-8);
        }

        #[test]
        fn oracle_slope_family_keeps_left_phase(n in 0usize..15, k in 0.2f64..5.0) {
            let (_, s) = ho(n);
            let g = linspace(s.x1, s.x2, 200);
            let f = companion_oracle_with(&s, &g, CompanionFamily::LeftSlope(k)).unwrap();
            prop_assert!((f.real_d1[0] - k).abs() < 1e-9 * k.max(1.0));
            prop_assert!(f.real[0] == 0.0);
            prop_assert!(f.log_slope_identity_error() < 1e-12);
        }
    }
}
