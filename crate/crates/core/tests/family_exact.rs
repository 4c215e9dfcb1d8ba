use qidlab_core::family::{brute_force_max_family, johnson_bound};

#[test]
fn exact_maximum_for_quadruples_on_twenty_points() {
    let start = std::time::Instant::now();
    let best = brute_force_max_family(20, 4, 0.75).unwrap();
    assert_eq!(best, johnson_bound(20, 4, 3));
    assert_eq!(best, 285);
    assert!(start.elapsed().as_secs() < 60);
}
