mod common;

use std::collections::BTreeSet;

use achr_core::search::{
    achromatic, enumerate_colorings, extend_coloring, find_coloring, find_completion, refute,
    AchromaticValue, SearchConfig, SearchStatus,
};
use achr_core::symmetry::canonical_form;
use achr_core::{ColorMatrix, Error};

#[test]
fn enumeration_oracle_matches_known_tables() {
    // independently computed by exhaustive search
    let table: [((usize, usize), &[usize]); 9] = [
        ((1, 1), &[1]),
        ((1, 5), &[5]),
        ((2, 2), &[2]),
        ((2, 3), &[3, 4]),
        ((2, 4), &[4, 5]),
        ((2, 5), &[5, 6]),
        ((2, 6), &[6, 7]),
        ((3, 3), &[3, 4, 5]),
        ((3, 4), &[4, 5, 6]),
    ];
    for ((p, q), ks) in table {
        let want: BTreeSet<usize> = ks.iter().copied().collect();
        assert_eq!(common::feasible_palettes(p, q), want, "{p}x{q}");
    }
}

#[test]
fn search_matches_oracle_both_orientations() {
    let cfg = SearchConfig::default();
    for (p, q) in [
        (2, 3),
        (3, 2),
        (2, 5),
        (5, 2),
        (3, 4),
        (4, 3),
        (1, 7),
        (7, 1),
    ] {
        let truth = common::feasible_palettes(p.min(q), p.max(q));
        for k in 1..=p * q {
            let out = find_coloring(p, q, k, &cfg).unwrap();
            assert_eq!(
                out.status == SearchStatus::Found,
                truth.contains(&k),
                "({p},{q},{k})"
            );
            if let Some(w) = out.witness {
                assert_eq!(w.shape(), (p, q, k));
                assert!(w.in_family(p, q, k));
            }
        }
    }
}

#[test]
fn small_reference_cases() {
    let cfg = SearchConfig::default();
    let out = find_coloring(1, 3, 3, &cfg).unwrap();
    assert_eq!(out.witness.unwrap().row(0), &[1, 2, 3]);
    assert_eq!(
        find_coloring(2, 2, 3, &cfg).unwrap().status,
        SearchStatus::Exhausted
    );
    assert!(!common::literal_feasible(2, 2, 3));
    for n in 1..=8 {
        assert_eq!(
            achromatic(1, n, &cfg).unwrap().value,
            AchromaticValue::Exact { value: n }
        );
    }
    assert_eq!(
        achromatic(2, 2, &cfg).unwrap().value,
        AchromaticValue::Exact { value: 2 }
    );
}

#[test]
fn larger_achromatic_values() {
    let cfg = SearchConfig::default();
    for (p, q, v) in [(3, 5, 7), (4, 4, 8), (4, 5, 10), (3, 6, 9)] {
        let r = achromatic(p, q, &cfg).unwrap();
        assert_eq!(r.value, AchromaticValue::Exact { value: v }, "{p}x{q}");
        assert!(r.witness.unwrap().in_family(p, q, v));
        assert!(r.upper_bound >= v);
    }
}

#[test]
fn achromatic_brackets_on_budget() {
    let cfg = SearchConfig::default().with_nodes(50);
    let r = achromatic(5, 6, &cfg).unwrap();
    match r.value {
        AchromaticValue::Bracket { lower, upper } => {
            assert!(lower < upper);
            assert_eq!(upper, r.upper_bound);
        }
        other => panic!("expected a bracket, got {other}"),
    }
    assert_eq!(
        r.probes.last().unwrap().outcome.status,
        SearchStatus::BudgetExceeded
    );
}

fn canonical_set(ms: &[ColorMatrix]) -> BTreeSet<Vec<u16>> {
    ms.iter()
        .map(|m| canonical_form(m).unwrap().matrix.cells().to_vec())
        .collect()
}

#[test]
fn symmetry_breaking_keeps_every_class() {
    let on = SearchConfig::default();
    let off = SearchConfig::default().with_symmetry_breaking(false);
    for p in 1..=3 {
        for q in 1..=3 {
            for k in p.max(q)..=p * q {
                let all = enumerate_colorings(p, q, k, &off).unwrap();
                let reduced = enumerate_colorings(p, q, k, &on).unwrap();
                assert!(reduced.len() <= all.len());
                assert_eq!(
                    canonical_set(&all),
                    canonical_set(&reduced),
                    "({p},{q},{k})"
                );
                for m in &all {
                    assert!(m.in_family(p, q, k));
                }
            }
        }
    }
}

#[test]
fn unrestricted_enumeration_counts_every_colouring() {
    // labelled count from literal enumeration of all k^(pq) matrices
    let off = SearchConfig::default().with_symmetry_breaking(false);
    for (p, q, k) in [(2usize, 2usize, 2usize), (2, 3, 3), (2, 3, 4), (1, 4, 4)] {
        let mut count = 0;
        let n = p * q;
        let total = k.pow(n as u32);
        for code in 0..total {
            let mut x = code;
            let cells: Vec<usize> = (0..n)
                .map(|_| {
                    let c = x % k + 1;
                    x /= k;
                    c
                })
                .collect();
            let used: BTreeSet<usize> = cells.iter().copied().collect();
            if used.len() == k && common::naive_complete(&cells, p, q, k) {
                count += 1;
            }
        }
        assert_eq!(
            enumerate_colorings(p, q, k, &off).unwrap().len(),
            count,
            "({p},{q},{k})"
        );
    }
}

#[test]
fn sequential_runs_are_reproducible() {
    for seed in [0, 7, 99] {
        let cfg = SearchConfig::default().with_seed(seed);
        let a = find_coloring(5, 5, 12, &cfg).unwrap();
        let b = find_coloring(5, 5, 12, &cfg).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.nodes_expanded, b.nodes_expanded);
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.prunes, b.prunes);
    }
    let cfg = SearchConfig::default().with_nodes(20_000).with_seed(3);
    let a = find_coloring(5, 6, 16, &cfg).unwrap();
    let b = find_coloring(5, 6, 16, &cfg).unwrap();
    assert_eq!((a.status, a.nodes_expanded), (b.status, b.nodes_expanded));
}

#[test]
fn parallel_agrees_with_sequential() {
    let seq = SearchConfig::default();
    let par = SearchConfig::default().with_width(4);
    for (p, q, k) in [
        (3, 4, 6),
        (3, 4, 7),
        (4, 4, 8),
        (4, 4, 9),
        (4, 5, 10),
        (3, 5, 8),
    ] {
        let a = find_coloring(p, q, k, &seq).unwrap();
        let b = find_coloring(p, q, k, &par).unwrap();
        assert_eq!(a.status, b.status, "({p},{q},{k})");
        if let Some(w) = b.witness {
            assert!(w.in_family(p, q, k));
        }
    }
    let all_seq = enumerate_colorings(3, 3, 5, &seq).unwrap();
    let all_par = enumerate_colorings(3, 3, 5, &par).unwrap();
    assert_eq!(canonical_set(&all_seq), canonical_set(&all_par));
    assert_eq!(all_seq.len(), all_par.len());
}

#[test]
fn refute_respects_budget_and_scope() {
    let cfg = SearchConfig::default().with_nodes(100_000);
    let out = refute(&cfg).unwrap();
    assert_eq!(out.status, SearchStatus::BudgetExceeded);
    assert!(out.nodes_expanded > 100_000 - 1);
    let lemma_cfg = cfg.clone().with_lemmas(true);
    assert_ne!(refute(&lemma_cfg).unwrap().status, SearchStatus::Found);
    assert!(matches!(
        find_coloring(6, 6, 18, &SearchConfig::default().with_lemmas(true)),
        Err(Error::Config(_))
    ));
}

#[test]
fn completion_from_partial() {
    let cfg = SearchConfig::default();
    let w = find_coloring(4, 4, 8, &cfg).unwrap().witness.unwrap();
    let mut partial = w.clone();
    for (i, j) in [(0, 0), (1, 2), (3, 3), (2, 1)] {
        partial.clear(i, j);
    }
    let out = find_completion(&partial, &[], &cfg).unwrap();
    assert_eq!(out.status, SearchStatus::Found);
    let done = out.witness.unwrap();
    assert!(done.in_family(4, 4, 8));
    for i in 0..4 {
        for j in 0..4 {
            if let Some(c) = partial.get(i, j) {
                assert_eq!(done.raw(i, j), c);
            }
        }
    }
    let improper =
        ColorMatrix::from_rows(8, &[[1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
            .unwrap();
    assert!(matches!(
        find_completion(&improper, &[], &cfg),
        Err(Error::Improper { .. })
    ));
}

#[test]
fn extension_examples() {
    let latin = ColorMatrix::from_rows(2, &[[1, 2], [2, 1]]).unwrap();
    assert_eq!(extend_coloring(&latin), Err(Error::NoExtension));
    let short = ColorMatrix::from_rows(3, &[[1, 2]]).unwrap();
    let e = extend_coloring(&short).unwrap();
    assert!(e.in_family(1, 3, 3));
    let cfg = SearchConfig::default();
    for (p, q, k) in [(3, 4, 6), (4, 4, 8), (2, 5, 6)] {
        let w = find_coloring(p, q, k, &cfg).unwrap().witness.unwrap();
        let e = extend_coloring(&w).unwrap();
        assert!(e.in_family(p, q + 1, k));
        for i in 0..p {
            assert_eq!(&e.row(i)[..q], w.row(i));
        }
    }
    let partial = ColorMatrix::from_rows(3, &[[1, 0]]).unwrap();
    assert!(matches!(
        extend_coloring(&partial),
        Err(Error::NotInFamily(_))
    ));
}

#[test]
fn monotone_feasibility() {
    let cfg = SearchConfig::default();
    for (p, q) in [(2, 6), (3, 4), (4, 3), (2, 4)] {
        let found: Vec<bool> = (p.max(q)..=p * q)
            .map(|k| find_coloring(p, q, k, &cfg).unwrap().status == SearchStatus::Found)
            .collect();
        let first_gap = found.iter().position(|f| !f).unwrap_or(found.len());
        assert!(found[first_gap..].iter().all(|f| !f), "{p}x{q}: {found:?}");
        assert!(first_gap > 0);
    }
}
