use rankone_web::{divergence_rows, gauss_table, profile};

#[test]
fn gauss_moduli() {
    let rows = gauss_table(15, 1).unwrap();
    assert_eq!(rows.len(), 15);
    for r in rows {
        assert!((r.modulus - 15f64.sqrt()).abs() < 1e-9);
    }
    assert!(gauss_table(8, 1).is_err());
}

#[test]
fn profile_at_time_zero_is_peaked_at_origin() {
    let v = profile("sphere", 2, 64, "schrodinger", 0.0, 50).unwrap();
    assert_eq!(v.len(), 50);
    assert!(v[0] > v[25]);
    assert!(profile("sphere", 2, 0, "schrodinger", 0.0, 50).is_err());
    assert!(profile("sphere", 2, 8, "nope", 0.0, 50).is_err());
}

#[test]
fn scan_rejects_real_projective() {
    assert!(divergence_rows("rp", 2, 64, 0.1).is_err());
    let rows = divergence_rows("sphere", 2, 256, 0.1).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.value.is_finite() && r.q % 2 == 1));
}
