use arboreq::suite::{random_tree, verify_collapse};

#[test]
fn collapse_on_seeded_random_trees() {
    let mut checks = 0;
    for seed in 0..100u64 {
        let leaves = 1 + (seed % 7) as usize;
        let t = random_tree(leaves, 3, seed).unwrap();
        let v = verify_collapse(&t).unwrap();
        assert!(v.passed, "{}: {v}", t.render());
        checks += v.checks;
    }
    assert!(checks >= 100);
}
