use qhje::io::*;
use qhje::limits::{coarse_grain_field, SourceKind};
use qhje::qhj::*;
use qhje::spectrum::{find_eigenvalue, EigenResult};
use qhje::{linspace, PotentialModel};

#[test]
fn action_field_round_trips_exactly() {
    let m = PotentialModel::unit_oscillator();
    let s = m.slice(2.5).unwrap();
    let g = linspace(s.x1, s.x2, 301);
    let f = integrate_x(&s, &default_seed(&s).unwrap(), &g).unwrap();
    let f = integrate_xe(&f, &g).unwrap();
    let text = action_table(&f).to_csv_string();
    let back = action_from_table(&Table::from_csv_str(&text).unwrap()).unwrap();
    assert_eq!(back, f);
}

#[test]
fn momentum_coarse_and_eigen_round_trip() {
    let m = PotentialModel::unit_oscillator();
    let s = m.slice(2.5).unwrap();
    let g = linspace(s.x1, s.x2, 401);
    let (f, p) = general_solution_ho(2, &m, &g, None, None).unwrap();
    let t = Table::from_csv_str(&momentum_table(&s, &p).to_csv_string()).unwrap();
    assert_eq!(momentum_from_table(&t).unwrap(), p);

    let c = coarse_grain_field(&f, SourceKind::MomentumRe, 20).unwrap();
    let t = Table::from_csv_str(&coarse_table(&s, &c, None).to_csv_string()).unwrap();
    assert_eq!(t.len(), 20);
    assert_eq!(coarse_from_table(&t).unwrap(), c);

    let r: Vec<EigenResult> = vec![find_eigenvalue(&m, (2.2, 2.8)).unwrap()];
    let t = Table::from_csv_str(&eigen_table(&m, &r).to_csv_string()).unwrap();
    assert_eq!(eigen_from_table(&t).unwrap(), r);
}

#[test]
fn json_rendering_has_numbers() {
    let mut t = Table::new(Default::default(), ["a", "b"]);
    t.push_numbers(&[1.5, -2.0]);
    let v: serde_json::Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
    assert_eq!(v["rows"][0][0], 1.5);
    assert_eq!(v["columns"][1], "b");
}
