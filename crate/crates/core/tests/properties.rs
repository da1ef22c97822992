mod common;

use std::collections::BTreeSet;

use achr_core::bounds::{feasible_frequency_profiles, pair_capacity_bound, upper_bound};
use achr_core::lemmas::{p_range, qset_generate, QSequence};
use achr_core::model::{parse_matrix, write_matrix};
use achr_core::symmetry::{apply_group, are_equivalent, canonical_form};
use achr_core::{ColorMatrix, Colour, FrequencyProfile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(p: usize, q: usize, extra: usize, seed: u64) -> ColorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::random_total(p, q, p + q - 1 + extra, &mut rng)
}

fn group_element(p: usize, q: usize, k: usize, seed: u64) -> (Vec<usize>, Vec<usize>, Vec<Colour>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = common::random_perm(p, &mut rng);
    let sigma = common::random_perm(q, &mut rng);
    let mut pi = vec![0 as Colour];
    pi.extend(
        common::random_perm(k, &mut rng)
            .into_iter()
            .map(|c| c as Colour + 1),
    );
    (rho, sigma, pi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn canonical_form_is_an_orbit_invariant(p in 1usize..=4, q in 1usize..=4, extra in 0usize..4, s1: u64, s2: u64) {
        let m = matrix(p, q, extra, s1);
        let (rho, sigma, pi) = group_element(p, q, m.palette_size(), s2);
        let moved = apply_group(&m, &rho, &sigma, &pi);
        let a = canonical_form(&m).unwrap();
        let b = canonical_form(&moved).unwrap();
        prop_assert_eq!(&a.matrix, &b.matrix);
        prop_assert_eq!(canonical_form(&a.matrix).unwrap().matrix, a.matrix.clone());
        prop_assert_eq!(b.replay(&moved), b.matrix);
        prop_assert!(are_equivalent(&m, &moved).unwrap());
    }

    #[test]
    fn membership_is_invariant(p in 1usize..=4, q in 1usize..=5, extra in 0usize..3, s1: u64, s2: u64) {
        let m = matrix(p, q, extra, s1);
        let k = m.palette_size();
        let (rho, sigma, pi) = group_element(p, q, k, s2);
        let moved = apply_group(&m, &rho, &sigma, &pi);
        prop_assert_eq!(m.in_family(p, q, k), moved.in_family(p, q, k));
        prop_assert_eq!(m.in_family(p, q, k), m.transpose().in_family(q, p, k));
        prop_assert_eq!(m.frequency_profile().as_slice().to_vec(), moved.frequency_profile().as_slice().to_vec());
    }

    #[test]
    fn ledger_counts_match_direct_count(p in 1usize..=4, q in 1usize..=5, extra in 0usize..4, seed: u64) {
        let m = matrix(p, q, extra, seed);
        let ledger = m.ledger().unwrap();
        let k = m.palette_size() as Colour;
        for a in 1..=k {
            for b in a + 1..=k {
                let mut rows = 0;
                let mut cols = 0;
                for (i, j) in m.positions(a) {
                    rows += (0..q).filter(|&x| m.raw(i, x) == b).count();
                    cols += (0..p).filter(|&y| m.raw(y, j) == b).count();
                }
                prop_assert_eq!(ledger.row_count(a, b) as usize, rows);
                prop_assert_eq!(ledger.col_count(a, b) as usize, cols);
                prop_assert_eq!(ledger.is_good(a, b), rows + cols > 0);
            }
        }
        let cells: Vec<usize> = m.cells().iter().map(|&c| c as usize).collect();
        prop_assert_eq!(m.is_complete(), common::naive_complete(&cells, p, q, k as usize)
            && m.frequencies()[1..].iter().all(|&f| f > 0));
    }

    #[test]
    fn text_format_round_trips(p in 1usize..=5, q in 1usize..=5, extra in 0usize..5, holes in proptest::collection::vec(any::<bool>(), 25), seed: u64) {
        let mut m = matrix(p, q, extra, seed);
        for i in 0..p {
            for j in 0..q {
                if holes[i * 5 + j] {
                    m.clear(i, j);
                }
            }
        }
        let text = write_matrix(&m);
        prop_assert_eq!(parse_matrix(&text).unwrap(), m.clone());
        prop_assert_eq!(text.parse::<ColorMatrix>().unwrap(), m);
    }

    #[test]
    fn profiles_match_direct_enumeration(p in 1usize..=5, q in 1usize..=6, k in 1usize..=20) {
        let got: BTreeSet<Vec<usize>> = feasible_frequency_profiles(p, q, k)
            .iter()
            .map(|f| (1..=p.min(q)).map(|l| f.count(l)).collect())
            .collect();
        let want = direct_profiles(p, q, k);
        prop_assert_eq!(got, want);
    }
}

/// Vectors `(c_1..c_m)` by odometer, filtered by the defining conditions.
fn direct_profiles(p: usize, q: usize, k: usize) -> BTreeSet<Vec<usize>> {
    let m = p.min(q);
    let mut out = BTreeSet::new();
    let mut c = vec![0usize; m];
    loop {
        let colours: usize = c.iter().sum();
        let cells: usize = c.iter().enumerate().map(|(i, &x)| (i + 1) * x).sum();
        let ok = c.iter().enumerate().all(|(i, &x)| {
            let l = i + 1;
            // neighbourhood of l cells in distinct lines must reach k-1 colours
            x == 0 || l * (p + q - 2) - l * (l - 1) + 1 >= k
        });
        if colours == k && cells == p * q && ok {
            out.insert(c.clone());
        }
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            c[i] += 1;
            if c[i] <= k {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn profile_display_and_totals() {
    let prof = FrequencyProfile::from_pairs(6, 7, 19, &[(2, 15), (3, 4)]);
    assert_eq!(prof.colour_total(), 19);
    assert_eq!(prof.cell_total(), 42);
    for prof in feasible_frequency_profiles(6, 7, 19) {
        assert_eq!((prof.colour_total(), prof.cell_total()), (19, 42));
    }
}

#[test]
fn upper_bound_dominates_true_values() {
    for (p, q) in [
        (1, 6),
        (2, 2),
        (2, 3),
        (2, 4),
        (2, 5),
        (2, 6),
        (3, 3),
        (3, 4),
    ] {
        let truth = *common::feasible_palettes(p, q).iter().max().unwrap();
        assert!(upper_bound(p, q) >= truth, "{p}x{q}");
        assert!(upper_bound(p, q) <= pair_capacity_bound(p, q).max(q));
    }
}

#[test]
fn qsets_equal_direct_filter() {
    for r in 5..=7 {
        for p in p_range(r).unwrap() {
            let got: BTreeSet<Vec<u8>> = qset_generate(r, p)
                .unwrap()
                .into_iter()
                .map(|s| s.values)
                .collect();
            let first = 2 * p - 3;
            let len = 8 - first;
            let head = r + 1 - first;
            let cap = 3.min(r as i64 + 4 - 2 * p as i64);
            let mut want = BTreeSet::new();
            for code in 0..4usize.pow(len as u32) {
                let v: Vec<u8> = (0..len).map(|i| ((code >> (2 * i)) & 3) as u8).collect();
                let sum: i64 = v.iter().map(|&x| x as i64).sum();
                let head_ok = v[..head].iter().all(|&x| x >= 1 && (x as i64) <= cap);
                let mono = |s: &[u8]| s.windows(2).all(|w| w[0] >= w[1]);
                if sum == 2 * r as i64 + 8 - 4 * p as i64
                    && head_ok
                    && mono(&v[..head])
                    && mono(&v[head..])
                {
                    want.insert(v);
                }
            }
            assert_eq!(got, want, "Q({r},{p})");
            for s in qset_generate(r, p).unwrap() {
                assert!(s.satisfies_invariants());
                assert_eq!(s.first_column(), first);
            }
        }
    }
    assert!(qset_generate(4, 2).is_err());
    assert!(qset_generate(7, 3).is_err());
    let listed = QSequence {
        r2_1: 7,
        p_param: 4,
        values: vec![3, 2, 1],
    };
    assert_eq!(listed.to_string(), "3,2,1");
}
