mod common;

#[test]
fn witness_function_is_subadditive() {
    common::subadditivity(1000).unwrap();
}

#[test]
fn diagonal_entries_bounded_by_operator_norm() {
    common::eigenvalue_bound(1000).unwrap();
}

#[test]
fn discrete_valuations_are_ultrametric_and_multiplicative() {
    common::valuations(1000).unwrap();
}

#[test]
fn bfs_is_schedule_independent() {
    common::bfs_determinism(1000).unwrap();
}

#[test]
fn theta_is_multiplicative() {
    common::theta_multiplicativity(1000).unwrap();
}

#[test]
fn lattice_bound_is_sound() {
    common::lattice_soundness(1000).unwrap();
}
