use overlaynet_web::{gamma_curve, route, slot_snapshot};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn gamma_curve_is_bracketed_and_monotone() {
    let v = parse(gamma_curve(2000.0, 1.5, 30));
    assert!(v.get("error").is_none(), "{v}");
    let get = |k: &str| -> Vec<f64> { v[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
    let (g, lo, hi) = (get("gamma"), get("lower"), get("upper"));
    assert_eq!(g.len(), 31);
    for i in 0..g.len() {
        assert!(lo[i] - 1e-12 <= g[i] && g[i] <= hi[i] + 1e-12, "point {i}");
    }
    assert!(g.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!((g[0] - (-1.0f64).exp()).abs() < 1e-9);
}

#[test]
fn slot_snapshot_is_reproducible() {
    let a = slot_snapshot(300.0, 1.2, 0.5, 4);
    assert_eq!(a, slot_snapshot(300.0, 1.2, 0.5, 4));
    let v = parse(a);
    assert!(v.get("error").is_none(), "{v}");
    let sensed = v["secondary_sensed"].as_u64().unwrap();
    let states = v["secondary"].as_array().unwrap();
    assert_eq!(states.iter().filter(|s| s[2] == 1).count() as u64, sensed);
    assert!(v["primary_successes"].as_u64().unwrap() <= v["primary_transmitters"].as_u64().unwrap());
}

#[test]
fn sensing_off_silences_nobody() {
    let v = parse(slot_snapshot(300.0, 1.2, 0.0, 2));
    assert_eq!(v["secondary_sensed"], 0);
}

#[test]
fn oversized_fields_are_refused() {
    let v = parse(slot_snapshot(5000.0, 1.5, 0.5, 1));
    assert!(v["error"].as_str().unwrap().contains("nodes expected"));
    let v = parse(gamma_curve(0.5, 1.5, 10));
    assert!(v["error"].is_string());
}

#[test]
fn route_hops_stay_in_the_forward_half_disk() {
    let v = parse(route(1500.0, 3));
    assert!(v.get("error").is_none(), "{v}");
    let pt = |p: &Value| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap());
    let (dx, dy) = pt(&v["destination"]);
    let rr = v["rr"].as_f64().unwrap();
    let path: Vec<(f64, f64)> = v["path"].as_array().unwrap().iter().map(pt).collect();
    assert_eq!(path.len(), v["hops"].as_u64().unwrap() as usize + 1);
    for w in path.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        assert!((x1 - x0).hypot(y1 - y0) <= rr + 1e-12);
        assert!((x1 - x0) * (dx - x0) + (y1 - y0) * (dy - y0) >= 0.0);
    }
    if v["converged"].as_bool().unwrap() {
        let (x, y) = *path.last().unwrap();
        assert!((x - dx).hypot(y - dy) <= rr);
    }
}
