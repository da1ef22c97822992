//! Independent oracles shared by the integration tests. Nothing here calls
//! into the search or bounds code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use achr_core::{ColorMatrix, Colour};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

/// Proper and complete, checked cell by cell.
pub fn naive_complete(cells: &[usize], p: usize, q: usize, k: usize) -> bool {
    let mut good = vec![vec![false; k + 1]; k + 1];
    for i in 0..p {
        for j in 0..q {
            let a = cells[i * q + j];
            for j2 in 0..q {
                let b = cells[i * q + j2];
                if j2 != j && a == b {
                    return false;
                }
                good[a][b] = true;
            }
            for i2 in 0..p {
                let b = cells[i2 * q + j];
                if i2 != i && a == b {
                    return false;
                }
                good[a][b] = true;
            }
        }
    }
    (1..=k).all(|a| (1..=k).all(|b| a == b || good[a][b]))
}

/// Every assignment in `[1,k]^(p·q)`, literally. Only for tiny instances.
pub fn literal_feasible(p: usize, q: usize, k: usize) -> bool {
    let n = p * q;
    let mut cells = vec![1usize; n];
    loop {
        let mut seen = vec![false; k + 1];
        cells.iter().for_each(|&c| seen[c] = true);
        if seen[1..].iter().all(|&s| s) && naive_complete(&cells, p, q, k) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            cells[i] += 1;
            if cells[i] <= k {
                break;
            }
            cells[i] = 1;
            i += 1;
        }
    }
}

/// Every `k` admitting a complete proper colouring of `K_p □ K_q`, by
/// enumerating all proper colourings up to colour renaming (restricted
/// growth strings in row-major order).
pub fn feasible_palettes(p: usize, q: usize) -> BTreeSet<usize> {
    let n = p * q;
    let mut cells = vec![0usize; n];
    let mut out = BTreeSet::new();
    grow(p, q, 0, 0, &mut cells, &mut out);
    out
}

fn grow(
    p: usize,
    q: usize,
    idx: usize,
    used: usize,
    cells: &mut [usize],
    out: &mut BTreeSet<usize>,
) {
    if idx == p * q {
        if !out.contains(&used) && naive_complete(cells, p, q, used) {
            out.insert(used);
        }
        return;
    }
    let (i, j) = (idx / q, idx % q);
    for c in 1..=used + 1 {
        let clash = (0..j).any(|x| cells[i * q + x] == c) || (0..i).any(|y| cells[y * q + j] == c);
        if clash {
            continue;
        }
        cells[idx] = c;
        grow(p, q, idx + 1, used.max(c), cells, out);
    }
    cells[idx] = 0;
}

/// Row and column hit multisets of a colour set, sorted decreasing.
pub fn hit_profile(m: &ColorMatrix, set: &[Colour]) -> (Vec<usize>, Vec<usize>) {
    let (p, q, _) = m.shape();
    let mut rows = vec![0usize; p];
    let mut cols = vec![0usize; q];
    for (i, row_hits) in rows.iter_mut().enumerate() {
        for (j, col_hits) in cols.iter_mut().enumerate() {
            if set.contains(&m.raw(i, j)) {
                *row_hits += 1;
                *col_hits += 1;
            }
        }
    }
    let tidy = |mut v: Vec<usize>| {
        v.retain(|&x| x > 0);
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    };
    (tidy(rows), tidy(cols))
}

/// Random proper matrix; every cell gets a uniformly chosen legal colour
/// from `palette`. `None` if the fill gets stuck.
pub fn random_proper<R: Rng>(m: &mut ColorMatrix, palette: &[Colour], rng: &mut R) -> Option<()> {
    let (p, q, _) = m.shape();
    let mut order: Vec<(usize, usize)> = (0..p).flat_map(|i| (0..q).map(move |j| (i, j))).collect();
    order.shuffle(rng);
    for (i, j) in order {
        if m.get(i, j).is_some() {
            continue;
        }
        let options: Vec<Colour> = palette
            .iter()
            .copied()
            .filter(|&c| {
                (0..q).all(|x| m.get(i, x) != Some(c)) && (0..p).all(|y| m.get(y, j) != Some(c))
            })
            .collect();
        let &c = options.choose(rng)?;
        m.set(i, j, c).unwrap();
    }
    Some(())
}

/// Random total proper `p x q` matrix over `k` colours, retrying until the
/// fill succeeds.
pub fn random_total<R: Rng>(p: usize, q: usize, k: usize, rng: &mut R) -> ColorMatrix {
    let palette: Vec<Colour> = (1..=k as Colour).collect();
    loop {
        let mut m = ColorMatrix::new(p, q, k).unwrap();
        if random_proper(&mut m, &palette, rng).is_some() {
            return m;
        }
    }
}

pub fn random_perm<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// Size of the union of closed neighbourhoods of `cells`, minus the cells.
pub fn union_neighbourhood(cells: &[(usize, usize)], p: usize, q: usize) -> usize {
    let mut n = 0;
    for i in 0..p {
        for j in 0..q {
            if cells.contains(&(i, j)) {
                continue;
            }
            if cells.iter().any(|&(a, b)| a == i || b == j) {
                n += 1;
            }
        }
    }
    n
}

/// All placements of `l` cells in distinct rows and columns.
pub fn placements(l: usize, p: usize, q: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    place(l, p, q, 0, &mut cur, &mut out);
    out
}

fn place(
    l: usize,
    p: usize,
    q: usize,
    row: usize,
    cur: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if cur.len() == l {
        out.push(cur.clone());
        return;
    }
    if row == p {
        return;
    }
    place(l, p, q, row + 1, cur, out);
    for col in 0..q {
        if cur.iter().all(|&(_, c)| c != col) {
            cur.push((row, col));
            place(l, p, q, row + 1, cur, out);
            cur.pop();
        }
    }
}
