mod common;

use rainbow_core::canon::{are_isomorphic, canonical_form};
use rainbow_core::constructions::{fig5, t_star};
use rainbow_core::search::{
    max_family, prove_size, Checkpoint, ProofOutcome, SearchConfig, Target,
};
use rainbow_core::{is_rainbow_free, Mode};

use common::brute_maximum;

fn enumerate(n: usize, mode: Mode) -> SearchConfig {
    SearchConfig::new(n, mode).target(Target::EnumerateExtremal)
}

#[test]
fn matches_brute_force() {
    let cases = [
        (3, Mode::Set),
        (4, Mode::Set),
        (5, Mode::Set),
        (6, Mode::Set),
        (3, Mode::Multiset),
        (4, Mode::Multiset),
        (5, Mode::Multiset),
        (6, Mode::Multiset),
    ];
    for (n, mode) in cases {
        let (best, classes) = brute_maximum(n, mode);
        let r = max_family(&enumerate(n, mode)).unwrap();
        assert!(r.completed);
        assert_eq!(r.best_size, best, "n={n} {mode}");
        let found: Vec<_> = r.witnesses.iter().map(canonical_form).collect();
        assert_eq!(found, classes, "n={n} {mode}");
        assert_eq!(r.extremal_class_count, Some(classes.len()));
    }
}

#[test]
fn set_maxima_within_bound() {
    for (n, expected) in [(4, 2), (5, 3), (6, 4), (7, 6), (8, 8), (9, 10), (10, 12)] {
        let r = max_family(&SearchConfig::new(n, Mode::Set)).unwrap();
        assert!(r.completed);
        assert_eq!(r.best_size, expected, "n={n}");
        assert!(r.best_size <= n * n / 8);
        for w in &r.witnesses {
            assert!(is_rainbow_free(w));
            assert_eq!(w.size(), r.best_size);
        }
    }
}

#[test]
fn unique_extremal_class_at_eight() {
    let r = max_family(&enumerate(8, Mode::Set)).unwrap();
    assert_eq!(r.best_size, 8);
    assert_eq!(r.extremal_class_count, Some(1));
    assert!(are_isomorphic(&r.witnesses[0], &t_star(8).unwrap()));
}

#[test]
fn proofs() {
    let set8 = SearchConfig::new(8, Mode::Set);
    assert_eq!(prove_size(&set8, 9).unwrap().0, ProofOutcome::Refuted);
    assert!(matches!(prove_size(&set8, 8).unwrap().0, ProofOutcome::Found(w) if w.size() == 8));
    let multi9 = SearchConfig::new(9, Mode::Multiset);
    match prove_size(&multi9, 12).unwrap().0 {
        ProofOutcome::Found(w) => {
            assert_eq!(w.size(), 12);
            assert!(is_rainbow_free(&w));
        }
        other => panic!("expected a witness, got {other:?}"),
    }
    let limited = SearchConfig::new(10, Mode::Set).node_limit(3);
    assert_eq!(prove_size(&limited, 13).unwrap().0, ProofOutcome::Undecided);
}

#[test]
fn multiset_nine_maximum_is_fig5_class() {
    let r = max_family(&enumerate(9, Mode::Multiset)).unwrap();
    assert!(r.completed);
    assert_eq!(r.best_size, 12);
    assert_eq!(r.extremal_class_count, Some(1));
    assert!(are_isomorphic(&r.witnesses[0], &fig5()));
}

#[test]
fn worker_count_does_not_change_results() {
    for (n, mode) in [
        (7, Mode::Set),
        (8, Mode::Set),
        (9, Mode::Multiset),
        (10, Mode::Set),
    ] {
        let one = max_family(&enumerate(n, mode)).unwrap();
        for workers in [2, 5] {
            let many = max_family(&enumerate(n, mode).workers(workers)).unwrap();
            assert_eq!(one.best_size, many.best_size);
            assert_eq!(one.witnesses, many.witnesses);
            assert_eq!(one.extremal_class_count, many.extremal_class_count);
        }
        let first = prove_size(&SearchConfig::new(n, mode), one.best_size)
            .unwrap()
            .0;
        let again = prove_size(&SearchConfig::new(n, mode).workers(3), one.best_size)
            .unwrap()
            .0;
        assert!(matches!(first, ProofOutcome::Found(_)));
        assert!(matches!(again, ProofOutcome::Found(_)));
    }
}

#[test]
fn checkpoint_and_resume() {
    let dir = std::env::temp_dir().join(format!("trifam-ckpt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.ckpt");
    let fresh = max_family(&enumerate(10, Mode::Set)).unwrap();

    let partial = max_family(&enumerate(10, Mode::Set).node_limit(150).checkpoint(&path)).unwrap();
    assert!(!partial.completed);
    let ckpt = Checkpoint::load(&path).unwrap();
    assert!(ckpt.next > 0);
    assert_eq!(ckpt.target, Target::EnumerateExtremal);

    let resumed = max_family(&enumerate(10, Mode::Set).resume(ckpt).checkpoint(&path)).unwrap();
    assert!(resumed.completed);
    assert_eq!(resumed.best_size, fresh.best_size);
    assert_eq!(resumed.witnesses, fresh.witnesses);
    assert_eq!(resumed.extremal_class_count, fresh.extremal_class_count);

    let wrong = Checkpoint::load(&path).unwrap();
    assert!(max_family(&SearchConfig::new(10, Mode::Multiset).resume(wrong)).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}
