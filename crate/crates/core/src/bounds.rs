//! Counting bounds: neighbourhood sizes, colour-class excess, feasible
//! frequency profiles and the resulting upper bounds on the achromatic
//! number of `K_p □ K_q`.

use crate::error::{Error, Result};
use crate::model::FrequencyProfile;

/// Size of the closed-off neighbourhood of `l` cells lying in distinct rows
/// and columns of a `p x q` rook's graph: `l(p+q-2) - l(l-1)`.
pub fn neighborhood_size(l: usize, p: usize, q: usize) -> Result<usize> {
    check_frequency(l, p, q)?;
    Ok(l * (p + q - 2) - l * (l - 1))
}

/// Neighbourhood size minus the `k - 1` other colours that must appear in it.
/// A colour class of frequency `l` with negative excess cannot exist in a
/// complete colouring.
pub fn excess_closed(l: usize, p: usize, q: usize, k: usize) -> Result<i64> {
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "palette size",
            value: 0,
            min: 1,
            max: i64::MAX,
        });
    }
    Ok(neighborhood_size(l, p, q)? as i64 - (k as i64 - 1))
}

fn check_frequency(l: usize, p: usize, q: usize) -> Result<()> {
    let m = p.min(q);
    if l == 0 || l > m {
        return Err(Error::OutOfRange {
            what: "frequency",
            value: l as i64,
            min: 1,
            max: m as i64,
        });
    }
    Ok(())
}

/// Frequencies `l` a colour may take in a complete proper `k`-colouring of
/// `K_p □ K_q`: `1 ≤ l ≤ min(p,q)` with non-negative excess.
pub fn admissible_frequencies(p: usize, q: usize, k: usize) -> Vec<usize> {
    (1..=p.min(q))
        .filter(|&l| excess_closed(l, p, q, k).is_ok_and(|e| e >= 0))
        .collect()
}

/// Every frequency profile with `Σ c_l = k`, `Σ l·c_l = p·q`, and `c_l = 0`
/// whenever a colour of frequency `l` would have negative excess. Profiles
/// come out in lexicographic order of `(c_1, c_2, …)`. An empty result
/// certifies that no complete proper `k`-colouring exists.
pub fn feasible_frequency_profiles(p: usize, q: usize, k: usize) -> Vec<FrequencyProfile> {
    let m = p.min(q);
    if p == 0 || q == 0 || k == 0 {
        return Vec::new();
    }
    let allowed: Vec<bool> = (1..=m)
        .map(|l| excess_closed(l, p, q, k).is_ok_and(|e| e >= 0))
        .collect();
    let mut out = Vec::new();
    let mut counts = vec![0usize; m];
    enumerate_profiles(&allowed, 1, k, p * q, &mut counts, &mut |c| {
        out.push(FrequencyProfile::new(p, q, k, c.to_vec()));
    });
    out
}

fn enumerate_profiles(
    allowed: &[bool],
    l: usize,
    colours_left: usize,
    cells_left: usize,
    counts: &mut [usize],
    emit: &mut dyn FnMut(&[usize]),
) {
    let m = allowed.len();
    if l > m {
        if colours_left == 0 && cells_left == 0 {
            emit(counts);
        }
        return;
    }
    // frequencies still available after this level
    let rest: Vec<usize> = (l + 1..=m).filter(|&x| allowed[x - 1]).collect();
    let (rmin, rmax) = (rest.first().copied(), rest.last().copied());
    let max_here = if allowed[l - 1] {
        colours_left.min(cells_left / l)
    } else {
        0
    };
    for c in 0..=max_here {
        let colours = colours_left - c;
        let cells = cells_left - c * l;
        let ok = match (rmin, rmax) {
            (Some(lo), Some(hi)) => colours * lo <= cells && cells <= colours * hi,
            _ => colours == 0 && cells == 0,
        };
        if ok {
            counts[l - 1] = c;
            enumerate_profiles(allowed, l + 1, colours, cells, counts, emit);
        }
    }
    counts[l - 1] = 0;
}

/// Largest `k` with `C(k,2) ≤ p·C(q,2) + q·C(p,2)`: every pair of colours
/// needs its own witnessing pair of cells on a common line.
pub fn pair_capacity_bound(p: usize, q: usize) -> usize {
    let slots = p * q * (q.saturating_sub(1)) / 2 + q * p * (p.saturating_sub(1)) / 2;
    let mut k = 1;
    while (k + 1) * k / 2 <= slots {
        k += 1;
    }
    k
}

/// Sound upper bound on the achromatic number: the largest `k` not above
/// the pair capacity for which some frequency profile is feasible. Never
/// below the chromatic number `max(p, q)`.
pub fn upper_bound(p: usize, q: usize) -> usize {
    let cap = pair_capacity_bound(p, q);
    let by_profiles = (1..=cap)
        .rev()
        .find(|&k| !feasible_frequency_profiles(p, q, k).is_empty())
        .unwrap_or(1);
    by_profiles.max(p.max(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighborhood_examples() {
        assert_eq!(neighborhood_size(2, 6, 7).unwrap(), 20);
        assert_eq!(neighborhood_size(1, 4, 9).unwrap(), 11);
        assert_eq!(neighborhood_size(2, 2, 2).unwrap(), 2);
        assert!(neighborhood_size(0, 3, 3).is_err());
        assert!(neighborhood_size(4, 3, 5).is_err());
    }

    #[test]
    fn excess_examples() {
        assert_eq!(excess_closed(1, 6, 7, 19).unwrap(), -7);
        assert_eq!(excess_closed(2, 6, 7, 19).unwrap(), 2);
        assert_eq!(excess_closed(1, 1, 2, 2).unwrap(), 0);
        for l in 1..=6i64 {
            assert_eq!(
                excess_closed(l as usize, 6, 7, 19).unwrap(),
                -l * l + 12 * l - 18
            );
        }
    }

    #[test]
    fn profiles_examples() {
        assert!(feasible_frequency_profiles(6, 6, 19).is_empty());
        let p67 = feasible_frequency_profiles(6, 7, 19);
        assert!(!p67.is_empty());
        for prof in &p67 {
            assert_eq!(prof.count(1), 0);
            assert!((15..=18).contains(&prof.count(2)), "{prof}");
            assert_eq!(prof.colour_total(), 19);
            assert_eq!(prof.cell_total(), 42);
        }
        let one_row = feasible_frequency_profiles(1, 3, 3);
        assert_eq!(one_row.len(), 1);
        assert_eq!(one_row[0].count(1), 3);
    }

    #[test]
    fn profiles_are_lexicographic() {
        let profs = feasible_frequency_profiles(4, 5, 8);
        let keys: Vec<Vec<usize>> = profs
            .iter()
            .map(|p| (1..=4).map(|l| p.count(l)).collect())
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(!keys.is_empty());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(pair_capacity_bound(6, 7), 22);
        assert_eq!(pair_capacity_bound(1, 1), 1);
        assert_eq!(pair_capacity_bound(2, 2), 3);
    }

    #[test]
    fn upper_bound_examples() {
        assert_eq!(upper_bound(6, 6), 18);
        for q in 1..10 {
            assert_eq!(upper_bound(1, q), q);
        }
        assert!(upper_bound(6, 7) >= 19);
        assert_eq!(upper_bound(6, 7), 21);
    }
}
