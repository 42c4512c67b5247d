use qhje::spectrum::*;
use qhje::PotentialModel;
use std::f64::consts::PI;
use std::time::Instant;

#[test]
fn oscillator_levels_by_matching() {
    let m = PotentialModel::unit_oscillator();
    let t = Instant::now();
    for n in 0..=10usize {
        let e = n as f64 + 0.5;
        let r = find_eigenvalue(&m, (e - 0.3, e + 0.3)).unwrap();
        eprintln!(
            "n={n} err {:.3e} it {} mismatch {:.2e}",
            r.energy - e,
            r.iterations,
            r.mismatch
        );
        assert!((r.energy - e).abs() <= 1e-8);
        assert_eq!(r.n, n);
        assert!(r.mismatch <= 1e-8);
    }
    eprintln!("elapsed {:?}", t.elapsed());
}

#[test]
fn mismatch_examples() {
    let m = PotentialModel::unit_oscillator();
    assert!(match_mismatch(&m, 2.5).unwrap().abs() <= 1e-8);
    assert!(match_mismatch(&m, 2.0).unwrap().abs() > 1e-3);
    let a = match_mismatch(&m, 2.3).unwrap();
    let b = match_mismatch(&m, 2.7).unwrap();
    assert!(a * b < 0.0);
}

#[test]
fn oscillator_levels_by_shooting() {
    let m = PotentialModel::unit_oscillator();
    for n in 0..=10usize {
        let e = n as f64 + 0.5;
        let r = shooting_oracle(&m, (e - 0.3, e + 0.3)).unwrap();
        assert!((r.energy - e).abs() <= 1e-8, "{n} {}", r.energy);
        assert_eq!(r.n, n);
    }
}

#[test]
fn hbar_scaling() {
    for h in [0.5, 0.25] {
        let m = PotentialModel::harmonic(1.0, 2.0, h).unwrap();
        let e = 2.0 * h * 3.5;
        let r = find_eigenvalue(&m, (e * 0.95, e * 1.05)).unwrap();
        assert!(
            (r.energy - e).abs() <= 1e-8 * e.max(1.0),
            "{h}: {}",
            r.energy
        );
        assert_eq!(r.n, 3);
    }
}

#[test]
fn quartic_methods_agree() {
    let m = PotentialModel::quartic(0.5, 1.0, 1.0).unwrap();
    let br = scan_brackets(&m, 0.1, 20.0, 200).unwrap();
    eprintln!("{br:?}");
    assert!(br.len() >= 5);
    for (k, b) in br.iter().take(5).enumerate() {
        let a = find_eigenvalue(&m, *b).unwrap();
        let s = shooting_oracle(&m, *b).unwrap();
        eprintln!("{k} {:.12} {:.12}", a.energy, s.energy);
        assert_eq!(a.n, k);
        assert_eq!(s.n, k);
        assert!((a.energy - s.energy).abs() <= 1e-6 * s.energy);
    }
}

#[test]
fn contour_quantization() {
    let m = PotentialModel::unit_oscillator();
    for n in [0usize, 1, 2, 5, 10] {
        let v = leacock_padgett_check(&m, n).unwrap();
        let want = 2.0 * PI * n as f64;
        eprintln!("n={n} {v}");
        assert!((v.re - want).abs() <= 1e-6 && v.im.abs() <= 1e-8);
    }
}
