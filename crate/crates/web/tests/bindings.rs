use confperc_web::{crossing_json, lattices, moduli_json, sample_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn lists_every_builtin_lattice() {
    let names = parse(lattices());
    let names: Vec<&str> = names.as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(names.contains(&"T_h") && names.contains(&"Z2_bond"));
}

#[test]
fn moduli_of_the_square_lattices() {
    let m = parse(moduli_json("T_s").unwrap());
    assert!(m["rw"][0].as_f64().unwrap().abs() < 1e-9);
    assert!((m["rw"][1].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((m["cp"][1].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(parse(moduli_json("Z2_bond").unwrap())["cp"].is_null());
    assert!(moduli_json("nope").is_err());
}

#[test]
fn crossing_is_near_one_half_and_seeded() {
    let a = crossing_json("T_h", 0.1, 2000, 3).unwrap();
    assert_eq!(a, crossing_json("T_h", 0.1, 2000, 3).unwrap());
    let v = parse(a);
    let (est, se) = (v["estimate"].as_f64().unwrap(), v["standard_error"].as_f64().unwrap());
    assert!((est - 0.5).abs() < 4.0 * se + 0.02, "{est} ± {se}");
    assert!(crossing_json("T_h", 0.001, 10, 1).is_err());
}

#[test]
fn samples_carry_one_state_per_site() {
    let v = parse(sample_json("T_h", 0.1, 1, 0).unwrap());
    let n = v["open"].as_array().unwrap().len();
    assert_eq!(v["positions"].as_array().unwrap().len(), 2 * n);
    assert!(v["crosses"].is_boolean());
    assert_ne!(sample_json("T_h", 0.1, 1, 0).unwrap(), sample_json("T_h", 0.1, 1, 1).unwrap());
}
