use udn_cache_wasm::demo::{class_names, classify, load_curves, region_map, UNKNOWN};

#[test]
fn classify_wraps_around_the_torus() {
    let c = classify(3, 3, 0.8, 0.0, 0.0).unwrap();
    assert_eq!(c.family.as_deref(), Some("I"));
    assert_eq!(c.nodes, vec![[0, 0]]);

    // midway between (2,0) and (0,0) across the seam
    let c = classify(3, 3, 0.8, 2.5, 0.0).unwrap();
    assert_eq!(c.nodes.len(), 2);
    assert!(c.nodes.contains(&[0, 0]) && c.nodes.contains(&[2, 0]));
    assert_eq!(c.family.as_deref(), Some("II-2"));

    let c = classify(4, 3, 0.8, -0.5, -0.5).unwrap();
    assert_eq!(c.family.as_deref(), Some("IV"));
    assert_eq!(c.nodes.len(), 4);
    assert_eq!(c.regime, "mid");
}

#[test]
fn classify_rejects_bad_input() {
    assert!(classify(3, 3, 0.5, 0.0, 0.0).is_err());
    assert!(classify(2, 3, 0.8, 0.0, 0.0).is_err());
    assert!(classify(3, 3, 0.8, f64::NAN, 0.0).is_err());
}

#[test]
fn region_map_shows_each_regime() {
    for (r, want) in [(std::f64::consts::FRAC_1_SQRT_2, vec!["I", "II-1", "II-2"]), (0.85, class_names()), (1.0, class_names()[1..].to_vec())] {
        let map = region_map(3, 3, r, 40).unwrap();
        assert_eq!(map.len(), 120 * 120);
        assert!(!map.contains(&UNKNOWN), "r = {r}");
        let mut seen: Vec<&str> = map.iter().map(|&i| class_names()[i as usize]).collect();
        seen.sort_unstable();
        seen.dedup();
        let mut want = want.clone();
        want.sort_unstable();
        assert_eq!(seen, want, "r = {r}");
    }
    assert!(region_map(3, 3, 0.8, 0).is_err());
}

#[test]
fn load_curves_cover_every_t() {
    let c = load_curves(3, 3, "mid").unwrap();
    assert_eq!(c.t.len(), 10);
    assert!((c.a[2] - 56.0 / 3.0).abs() < 1e-12);
    assert!((c.b[2] - 460.0 / 36.0).abs() < 1e-12);
    assert_eq!(c.uncoded[2], 35.0);
    assert_eq!(c.a[9], 0.0);
    assert!(load_curves(3, 3, "huge").is_err());
    assert!(load_curves(30, 30, "min").is_err());
}
