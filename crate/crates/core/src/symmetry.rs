//! Canonical forms under row, column and colour permutations.
//!
//! The group acting on `p x q` matrices is `S_p × S_q × S_k`; an element
//! `(ρ, σ, π)` sends `M` to the matrix with `(i, j)` entry `π(M[ρ(i)][σ(j)])`.
//! The canonical representative is the row-major lexicographically least
//! image. Colour permutations are never enumerated: for a fixed `(ρ, σ)` the
//! least relabelling numbers colours by first occurrence.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ColorMatrix, Colour};

/// Default limit on `p·q` for exact canonicalization.
pub const DEFAULT_CELL_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub matrix: ColorMatrix,
    /// Canonical row `i` is original row `row_perm[i]`.
    pub row_perm: Vec<usize>,
    /// Canonical column `j` is original column `col_perm[j]`.
    pub col_perm: Vec<usize>,
    /// `colour_map[old] = new`; index 0 unused.
    pub colour_map: Vec<Colour>,
}

impl CanonicalForm {
    /// Re-applies the certificate to `original`.
    pub fn replay(&self, original: &ColorMatrix) -> ColorMatrix {
        apply_group(original, &self.row_perm, &self.col_perm, &self.colour_map)
    }
}

/// `(ρ, σ, π)·M`
pub fn apply_group(
    m: &ColorMatrix,
    row_perm: &[usize],
    col_perm: &[usize],
    colour_map: &[Colour],
) -> ColorMatrix {
    m.permuted(row_perm, col_perm).relabeled(colour_map)
}

pub fn canonical_form(m: &ColorMatrix) -> Result<CanonicalForm> {
    canonical_form_with_cap(m, DEFAULT_CELL_CAP)
}

pub fn canonical_form_with_cap(m: &ColorMatrix, cap: usize) -> Result<CanonicalForm> {
    let (p, q, k) = m.shape();
    if p * q > cap {
        return Err(Error::TooLarge { cells: p * q, cap });
    }
    if !m.is_total() {
        return Err(Error::NotTotal);
    }
    let row_perms = permutations(p);
    let col_perms = permutations(q);

    let search = |rho: &Vec<usize>| best_for_rows(m, rho, &col_perms);

    #[cfg(feature = "parallel")]
    let best = row_perms
        .par_iter()
        .map(search)
        .reduce_with(pick_smaller)
        .expect("at least one permutation");
    #[cfg(not(feature = "parallel"))]
    let best = row_perms
        .iter()
        .map(search)
        .reduce(pick_smaller)
        .expect("at least one permutation");

    let (seq, rho, sigma) = best;
    let mut colour_map = vec![0 as Colour; k + 1];
    for (orig, &label) in m.permuted(&rho, &sigma).cells().iter().zip(&seq) {
        colour_map[*orig as usize] = label;
    }
    let mut next = seq.iter().copied().max().unwrap_or(0);
    for slot in colour_map.iter_mut().skip(1) {
        if *slot == 0 {
            next += 1;
            *slot = next;
        }
    }
    let matrix = ColorMatrix::from_rows(k, &seq.chunks(q).collect::<Vec<_>>())?;
    Ok(CanonicalForm {
        matrix,
        row_perm: rho,
        col_perm: sigma,
        colour_map,
    })
}

type Candidate = (Vec<Colour>, Vec<usize>, Vec<usize>);

fn pick_smaller(a: Candidate, b: Candidate) -> Candidate {
    if (&b.0, &b.1, &b.2) < (&a.0, &a.1, &a.2) {
        b
    } else {
        a
    }
}

/// Least first-occurrence relabelling over all column orders for a fixed row order.
fn best_for_rows(m: &ColorMatrix, rho: &[usize], col_perms: &[Vec<usize>]) -> Candidate {
    let (p, q, k) = m.shape();
    let n = p * q;
    let mut best: Vec<Colour> = vec![Colour::MAX; n];
    let mut best_sigma: &[usize] = &col_perms[0];
    let mut scratch = vec![0 as Colour; n];
    let mut label = vec![0 as Colour; k + 1];
    let mut stamp = vec![0u32; k + 1];
    let mut epoch = 0u32;

    for sigma in col_perms {
        epoch += 1;
        let mut next: Colour = 0;
        let mut less = false;
        let mut abort = false;
        'cells: for (i, &ri) in rho.iter().enumerate() {
            for (j, &cj) in sigma.iter().enumerate() {
                let c = m.raw(ri, cj) as usize;
                if stamp[c] != epoch {
                    stamp[c] = epoch;
                    next += 1;
                    label[c] = next;
                }
                let v = label[c];
                let idx = i * q + j;
                if !less {
                    if v > best[idx] {
                        abort = true;
                        break 'cells;
                    }
                    if v < best[idx] {
                        less = true;
                    }
                }
                scratch[idx] = v;
            }
        }
        if !abort && less {
            std::mem::swap(&mut best, &mut scratch);
            best_sigma = sigma;
        }
    }
    (best, rho.to_vec(), best_sigma.to_vec())
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n)
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Whether two matrices lie in the same orbit. Shapes must agree.
pub fn are_equivalent(a: &ColorMatrix, b: &ColorMatrix) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.shape(),
            found: b.shape(),
        });
    }
    Ok(canonical_form(a)?.matrix == canonical_form(b)?.matrix)
}
