use qrpm::{random_clifford, RandomStream, StabilizerTableau};

use super::dense::{clifford_unitary, DenseState};

/// Runs one random circuit on both simulators, comparing every subset
/// entropy and every stabilizer expectation after each operation.
pub fn check_random_circuit(n: usize, depth: usize, rng: &mut RandomStream) {
    let mut tab = StabilizerTableau::new_product_state(n).unwrap();
    let mut dense = DenseState::zero(n);
    for _ in 0..depth {
        if rng.chance(0.6) {
            let k = 1 + rng.below(n.min(4) as u64) as usize;
            let start = rng.below((n - k + 1) as u64) as usize;
            let op = random_clifford(k, rng).unwrap();
            tab.apply_clifford(&op, start).unwrap();
            dense.apply(&clifford_unitary(&op), start);
        } else {
            let q = rng.below(n as u64) as usize;
            let p1 = dense.prob_one(q);
            let out = tab.measure_z(q, rng).unwrap();
            let forced = p1 < 1e-9 || p1 > 1.0 - 1e-9;
            assert_eq!(out.deterministic, forced, "p(1) = {p1}");
            if forced {
                assert_eq!(out.value, (p1 > 0.5) as u8);
            } else {
                assert!((p1 - 0.5).abs() < 1e-9);
            }
            dense.project(q, out.value);
        }
        for g in tab.generators() {
            assert!((dense.expectation(&g) - 1.0).abs() < 1e-9, "generator {g} does not stabilize the state");
        }
        for mask in 0..(1usize << n) {
            let subset: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
            let exact = dense.entropy(&subset);
            let s = tab.subset_entropy(&subset).unwrap();
            assert!((exact - s as f64).abs() < 1e-9, "S({subset:?}) = {s}, dense {exact}");
        }
        let profile = tab.prefix_profile();
        for (i, &h) in profile.iter().enumerate() {
            assert_eq!(h, tab.subset_entropy(&(0..i).collect::<Vec<_>>()).unwrap());
        }
        tab.check_invariants().unwrap();
    }
}
