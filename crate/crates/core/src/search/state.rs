//! Mutable search state over bitmasks. Cells are indexed row-major
//! (`i * q + j`) and colour `c` owns bit `c - 1` of colour masks, so both
//! the grid and the palette are limited to 64 entries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::lemmas;
use crate::model::{ColorMatrix, Colour, FrequencyProfile};

pub(crate) const MAX_BITS: usize = 64;

/// Commitment about a colour's final frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Closure {
    /// No commitment yet.
    Free,
    /// Must receive at least one more copy.
    Open,
    /// Final frequency reached; no more copies.
    Closed,
}

/// Why a node was cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PruneRule {
    /// Uncovered pairs exceed the line-pair slots still open.
    PairPotential,
    /// No feasible frequency profile dominates the current commitments.
    Frequency,
    /// A closed colour can no longer meet some partner.
    ClosedColour,
    /// Colour-introduction or column-order symmetry breaking.
    Symmetry,
    /// A forbidden type signature among closed 2-colours.
    ForbiddenType,
    /// Too many closed 2-colours common to a pair of lines.
    LineCap,
}

impl PruneRule {
    pub const ALL: [PruneRule; 6] = [
        PruneRule::PairPotential,
        PruneRule::Frequency,
        PruneRule::ClosedColour,
        PruneRule::Symmetry,
        PruneRule::ForbiddenType,
        PruneRule::LineCap,
    ];

    pub fn is_lemma(self) -> bool {
        matches!(self, PruneRule::ForbiddenType | PruneRule::LineCap)
    }
}

impl fmt::Display for PruneRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PruneRule::PairPotential => "pair-potential",
            PruneRule::Frequency => "frequency",
            PruneRule::ClosedColour => "closed-colour",
            PruneRule::Symmetry => "symmetry",
            PruneRule::ForbiddenType => "forbidden-type",
            PruneRule::LineCap => "line-cap",
        };
        f.write_str(s)
    }
}

/// Per-rule cut counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneStats {
    pub pair_potential: u64,
    pub frequency: u64,
    pub closed_colour: u64,
    pub symmetry: u64,
    pub forbidden_type: u64,
    pub line_cap: u64,
}

impl PruneStats {
    pub fn record(&mut self, rule: PruneRule) {
        *self.slot(rule) += 1;
    }

    pub fn get(&self, rule: PruneRule) -> u64 {
        match rule {
            PruneRule::PairPotential => self.pair_potential,
            PruneRule::Frequency => self.frequency,
            PruneRule::ClosedColour => self.closed_colour,
            PruneRule::Symmetry => self.symmetry,
            PruneRule::ForbiddenType => self.forbidden_type,
            PruneRule::LineCap => self.line_cap,
        }
    }

    fn slot(&mut self, rule: PruneRule) -> &mut u64 {
        match rule {
            PruneRule::PairPotential => &mut self.pair_potential,
            PruneRule::Frequency => &mut self.frequency,
            PruneRule::ClosedColour => &mut self.closed_colour,
            PruneRule::Symmetry => &mut self.symmetry,
            PruneRule::ForbiddenType => &mut self.forbidden_type,
            PruneRule::LineCap => &mut self.line_cap,
        }
    }

    pub fn merge(&mut self, other: &PruneStats) {
        for rule in PruneRule::ALL {
            *self.slot(rule) += other.get(rule);
        }
    }

    pub fn total(&self) -> u64 {
        PruneRule::ALL.iter().map(|&r| self.get(r)).sum()
    }
}

#[inline]
fn bit(c: Colour) -> u64 {
    1u64 << (c - 1)
}

#[inline]
fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros();
            m &= m - 1;
            Some(b)
        }
    })
}

/// Immutable instance data shared by every worker.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    /// Cells still to fill, in visiting order.
    pub order: Vec<usize>,
    pub row_of: Vec<usize>,
    pub col_of: Vec<usize>,
    pub row_cells: Vec<u64>,
    pub col_cells: Vec<u64>,
    /// Slot counts `c_l` (index `l - 1`) of every admissible profile.
    pub profiles: Vec<Vec<u32>>,
    pub min_freq: usize,
    pub max_freq: usize,
    pub total_line_pairs: u32,
    pub palette_mask: u64,
    pub lemmas: bool,
    pub symmetry: bool,
    /// Column-1 ordering rule; only valid when the search starts empty.
    pub column_rule: bool,
}

impl Problem {
    pub fn new(
        p: usize,
        q: usize,
        k: usize,
        lemmas: bool,
        symmetry: bool,
        start: Option<&ColorMatrix>,
    ) -> Result<Self> {
        if p == 0 || q == 0 || k == 0 {
            return Err(Error::InvalidDimensions {
                rows: p,
                cols: q,
                palette: k,
            });
        }
        if p * q > MAX_BITS || k > MAX_BITS {
            return Err(Error::Config(format!(
                "search supports at most {MAX_BITS} cells and {MAX_BITS} colours (got {}x{}, k={k})",
                p, q
            )));
        }
        if lemmas && !lemmas::Scope::counterexample().admits(p, q, k) {
            return Err(Error::Config(format!(
                "lemma pruning is scoped to {}, not ({p},{q},{k})",
                lemmas::Scope::counterexample()
            )));
        }
        if let Some(m) = start {
            if m.shape() != (p, q, k) {
                return Err(Error::DimensionMismatch {
                    expected: (p, q, k),
                    found: m.shape(),
                });
            }
        }
        let n = p * q;
        let row_of: Vec<usize> = (0..n).map(|c| c / q).collect();
        let col_of: Vec<usize> = (0..n).map(|c| c % q).collect();
        let mut row_cells = vec![0u64; p];
        let mut col_cells = vec![0u64; q];
        for cell in 0..n {
            row_cells[row_of[cell]] |= 1 << cell;
            col_cells[col_of[cell]] |= 1 << cell;
        }
        let order: Vec<usize> = (0..q)
            .flat_map(|j| (0..p).map(move |i| i * q + j))
            .filter(|&cell| start.is_none_or(|m| m.get(row_of[cell], col_of[cell]).is_none()))
            .collect();

        let mut profs = bounds::feasible_frequency_profiles(p, q, k);
        if lemmas {
            profs.retain(|prof| lemmas::frequency_rules_hold(prof).unwrap_or(false));
        }
        let m = p.min(q);
        let profiles: Vec<Vec<u32>> = profs
            .iter()
            .map(|prof| (1..=m).map(|l| prof.count(l) as u32).collect())
            .collect();
        let used_freqs =
            |prof: &FrequencyProfile| prof.entries().map(|(l, _)| l).collect::<Vec<_>>();
        let min_freq = profs.iter().flat_map(used_freqs).min().unwrap_or(1);
        let max_freq = profs.iter().flat_map(used_freqs).max().unwrap_or(m);

        Ok(Self {
            p,
            q,
            k,
            order,
            row_of,
            col_of,
            row_cells,
            col_cells,
            profiles,
            min_freq,
            max_freq,
            total_line_pairs: (p * q * (q - 1) / 2 + q * p * (p - 1) / 2) as u32,
            palette_mask: if k == 64 { u64::MAX } else { (1u64 << k) - 1 },
            lemmas,
            symmetry,
            column_rule: symmetry && start.is_none() && q >= 2,
        })
    }

    fn line_cells(&self, rows: u64, cols: u64) -> u64 {
        let mut out = 0;
        for r in bits(rows) {
            out |= self.row_cells[r as usize];
        }
        for c in bits(cols) {
            out |= self.col_cells[c as usize];
        }
        out
    }
}

/// Undo record for one assignment.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Undo {
    cell: usize,
    colour: Colour,
    prev_closure: Closure,
}

#[derive(Debug, Clone)]
pub(crate) struct State {
    pub cells: Vec<Colour>,
    pub unassigned: u64,
    row_used: Vec<u64>,
    col_used: Vec<u64>,
    pub freq: Vec<u8>,
    rows_of: Vec<u64>,
    cols_of: Vec<u64>,
    pub closure: Vec<Closure>,
    closed_mask: u64,
    pair: Vec<u16>,
    covered: Vec<u64>,
    pub uncovered: u32,
    assigned_line_pairs: u32,
    pub depth: usize,
    pub used: usize,
}

impl State {
    pub fn empty(pb: &Problem) -> Self {
        let n = pb.p * pb.q;
        let k = pb.k;
        Self {
            cells: vec![0; n],
            unassigned: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            row_used: vec![0; pb.p],
            col_used: vec![0; pb.q],
            freq: vec![0; k + 1],
            rows_of: vec![0; k + 1],
            cols_of: vec![0; k + 1],
            closure: vec![Closure::Free; k + 1],
            closed_mask: 0,
            pair: vec![0; (k + 1) * (k + 1)],
            covered: vec![0; k + 1],
            uncovered: (k * (k - 1) / 2) as u32,
            assigned_line_pairs: 0,
            depth: 0,
            used: 0,
        }
    }

    /// State holding the assigned cells of `start`. Colours in `closed`, and
    /// colours already at the largest admissible frequency, are closed.
    pub fn from_partial(pb: &Problem, start: &ColorMatrix, closed: &[Colour]) -> Result<Self> {
        if !start.is_proper() {
            let (colour, line) = start.first_conflict().expect("improper");
            return Err(Error::Improper {
                colour: colour as usize,
                line,
            });
        }
        let mut st = Self::empty(pb);
        for i in 0..pb.p {
            for j in 0..pb.q {
                if let Some(c) = start.get(i, j) {
                    st.assign(pb, i * pb.q + j, c, Closure::Free);
                }
            }
        }
        for c in 1..=pb.k as Colour {
            let f = st.freq[c as usize] as usize;
            if closed.contains(&c) || (f > 0 && f >= pb.max_freq) {
                st.set_closure(c, Closure::Closed);
            }
        }
        Ok(st)
    }

    #[inline]
    pub fn legal_colours(&self, pb: &Problem, cell: usize) -> u64 {
        !(self.row_used[pb.row_of[cell]] | self.col_used[pb.col_of[cell]]) & pb.palette_mask
    }

    pub fn deficit(&self, pb: &Problem, c: Colour) -> u32 {
        (pb.palette_mask & !self.covered[c as usize] & !bit(c)).count_ones()
    }

    fn set_closure(&mut self, c: Colour, to: Closure) {
        self.closure[c as usize] = to;
        if to == Closure::Closed {
            self.closed_mask |= bit(c);
        } else {
            self.closed_mask &= !bit(c);
        }
    }

    pub fn assign(&mut self, pb: &Problem, cell: usize, c: Colour, closure: Closure) -> Undo {
        let (i, j) = (pb.row_of[cell], pb.col_of[cell]);
        let ci = c as usize;
        let stride = pb.k + 1;
        let (rmask, cmask) = (self.row_used[i], self.col_used[j]);
        for d in bits(rmask | cmask) {
            let d = d as usize + 1;
            let w = ((rmask >> (d - 1)) & 1) as u16 + ((cmask >> (d - 1)) & 1) as u16;
            let slot = ci * stride + d;
            if self.pair[slot] == 0 {
                self.covered[ci] |= 1 << (d - 1);
                self.covered[d] |= bit(c);
                self.uncovered -= 1;
            }
            self.pair[slot] += w;
            self.pair[d * stride + ci] += w;
        }
        self.assigned_line_pairs += rmask.count_ones() + cmask.count_ones();
        self.row_used[i] |= bit(c);
        self.col_used[j] |= bit(c);
        if self.freq[ci] == 0 {
            self.used += 1;
        }
        self.freq[ci] += 1;
        self.rows_of[ci] |= 1 << i;
        self.cols_of[ci] |= 1 << j;
        self.unassigned &= !(1u64 << cell);
        self.cells[cell] = c;
        let prev_closure = self.closure[ci];
        self.set_closure(c, closure);
        Undo {
            cell,
            colour: c,
            prev_closure,
        }
    }

    pub fn unassign(&mut self, pb: &Problem, undo: Undo) {
        let Undo {
            cell,
            colour: c,
            prev_closure,
        } = undo;
        let (i, j) = (pb.row_of[cell], pb.col_of[cell]);
        let ci = c as usize;
        let stride = pb.k + 1;
        self.set_closure(c, prev_closure);
        self.cells[cell] = 0;
        self.unassigned |= 1u64 << cell;
        self.rows_of[ci] &= !(1 << i);
        self.cols_of[ci] &= !(1 << j);
        self.freq[ci] -= 1;
        if self.freq[ci] == 0 {
            self.used -= 1;
        }
        self.row_used[i] &= !bit(c);
        self.col_used[j] &= !bit(c);
        let (rmask, cmask) = (self.row_used[i], self.col_used[j]);
        self.assigned_line_pairs -= rmask.count_ones() + cmask.count_ones();
        for d in bits(rmask | cmask) {
            let d = d as usize + 1;
            let w = ((rmask >> (d - 1)) & 1) as u16 + ((cmask >> (d - 1)) & 1) as u16;
            let slot = ci * stride + d;
            self.pair[slot] -= w;
            self.pair[d * stride + ci] -= w;
            if self.pair[slot] == 0 {
                self.covered[ci] &= !(1 << (d - 1));
                self.covered[d] &= !bit(c);
                self.uncovered += 1;
            }
        }
    }

    fn own_lines(&self, pb: &Problem, c: Colour) -> u64 {
        pb.line_cells(self.rows_of[c as usize], self.cols_of[c as usize])
    }

    /// Every admissibility test. `closed_now` is the colour that was just
    /// closed, if any, for the incremental lemma checks.
    pub fn check(&self, pb: &Problem, closed_now: Option<Colour>) -> Result<(), PruneRule> {
        let potential = pb.total_line_pairs - self.assigned_line_pairs;
        if self.uncovered > potential {
            return Err(PruneRule::PairPotential);
        }
        let must_grow = self.check_closed(pb)?;
        if !self.frequency_feasible(pb, must_grow) {
            return Err(PruneRule::Frequency);
        }
        if pb.lemmas {
            if let Some(c) = closed_now {
                if self.freq[c as usize] == 2 {
                    self.lemma_check(c)?;
                }
            }
        }
        Ok(())
    }

    /// Closed colours see their final neighbourhood; every partner they have
    /// not met yet must be able to land in it. Returns the colours that are
    /// thereby forced to receive another copy.
    fn check_closed(&self, pb: &Problem) -> Result<u64, PruneRule> {
        let mut must_grow = 0u64;
        for a in bits(self.closed_mask) {
            let a = a as Colour + 1;
            let free_nbr = self.own_lines(pb, a) & self.unassigned;
            let missing = pb.palette_mask & !self.covered[a as usize] & !bit(a);
            if missing == 0 {
                continue;
            }
            if missing & self.closed_mask != 0 || missing.count_ones() > free_nbr.count_ones() {
                return Err(PruneRule::ClosedColour);
            }
            for b in bits(missing) {
                let b = b as Colour + 1;
                let legal_b = self.unassigned & !self.own_lines(pb, b);
                if free_nbr & legal_b == 0 {
                    return Err(PruneRule::ClosedColour);
                }
            }
            must_grow |= missing;
        }
        Ok(must_grow)
    }

    /// Some admissible profile can host every colour: closed colours take a
    /// slot of exactly their frequency, the rest a slot at least their lower
    /// bound.
    fn frequency_feasible(&self, pb: &Problem, must_grow: u64) -> bool {
        let m = pb.p.min(pb.q);
        let mut closed_hist = [0u32; MAX_BITS + 1];
        let mut lb_hist = [0u32; MAX_BITS + 2];
        for c in 1..=pb.k {
            let f = self.freq[c] as usize;
            let lb = match self.closure[c] {
                Closure::Closed => {
                    if f > m {
                        return false;
                    }
                    closed_hist[f] += 1;
                    continue;
                }
                Closure::Open => f + 1,
                Closure::Free => {
                    if must_grow & (1 << (c - 1)) != 0 {
                        f + 1
                    } else {
                        f.max(1)
                    }
                }
            }
            .max(pb.min_freq);
            if lb > m {
                return false;
            }
            lb_hist[lb] += 1;
        }
        'profiles: for slots in &pb.profiles {
            let mut free = [0u32; MAX_BITS + 1];
            for l in 1..=m {
                let s = slots[l - 1];
                if s < closed_hist[l] {
                    continue 'profiles;
                }
                free[l] = s - closed_hist[l];
            }
            let (mut need, mut have) = (0u32, 0u32);
            for t in (1..=m).rev() {
                need += lb_hist[t];
                have += free[t];
                if need > have {
                    continue 'profiles;
                }
            }
            return true;
        }
        false
    }

    /// Forbidden types and line caps among closed 2-colours involving `a`.
    fn lemma_check(&self, a: Colour) -> Result<(), PruneRule> {
        let twos: u64 = bits(self.closed_mask)
            .map(|b| b as Colour + 1)
            .filter(|&b| self.freq[b as usize] == 2)
            .fold(0, |acc, b| acc | bit(b));
        let ai = a as usize;
        let (ra, ca) = (self.rows_of[ai], self.cols_of[ai]);
        let others = twos & !bit(a);
        let mut same_rows = 0;
        let mut same_cols = 0;
        for b in bits(others) {
            let bi = b as usize + 1;
            let (rb, cb) = (self.rows_of[bi], self.cols_of[bi]);
            if pair_forbidden(ra, ca, rb, cb) {
                return Err(PruneRule::ForbiddenType);
            }
            same_rows += (rb == ra) as u32;
            same_cols += (cb == ca) as u32;
            for c in bits(others & (u64::MAX << b << 1)) {
                let ci = c as usize + 1;
                if triple_forbidden([ra, rb, self.rows_of[ci]], [ca, cb, self.cols_of[ci]]) {
                    return Err(PruneRule::ForbiddenType);
                }
            }
        }
        if same_rows >= 2 || same_cols >= 2 {
            return Err(PruneRule::LineCap);
        }
        Ok(())
    }

    /// Full lemma scan over all closed 2-colours.
    pub fn lemma_scan(&self) -> Result<(), PruneRule> {
        for a in bits(self.closed_mask) {
            let a = a as Colour + 1;
            if self.freq[a as usize] == 2 {
                self.lemma_check(a)?;
            }
        }
        Ok(())
    }

    pub fn to_matrix(&self, pb: &Problem) -> ColorMatrix {
        let rows: Vec<&[Colour]> = self.cells.chunks(pb.q).collect();
        ColorMatrix::from_rows(pb.k, &rows).expect("state cells stay in range")
    }
}

/// Two 2-colours on row sets `ra`, `rb` and column sets `ca`, `cb`. Their
/// type is `(1^4|2^1 1^2|2^2, …)` according to how many rows (columns)
/// they share; exactly one axis fully shared is forbidden.
#[inline]
pub(crate) fn pair_forbidden(ra: u64, ca: u64, rb: u64, cb: u64) -> bool {
    let sr = (ra & rb).count_ones();
    let sc = (ca & cb).count_ones();
    (sr == 2) != (sc == 2)
}

/// Whether the hit counts over lines read exactly `3, 2, 1`.
#[inline]
fn staircase(l: [u64; 3]) -> bool {
    let all = l[0] & l[1] & l[2];
    let two_plus = (l[0] & l[1]) | (l[0] & l[2]) | (l[1] & l[2]);
    let any = l[0] | l[1] | l[2];
    all.count_ones() == 1
        && (two_plus & !all).count_ones() == 1
        && (any & !two_plus).count_ones() == 1
}

#[inline]
pub(crate) fn triple_forbidden(rows: [u64; 3], cols: [u64; 3]) -> bool {
    staircase(rows) && staircase(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lemmas::LemmaId;
    use crate::model::TypeSignature;

    fn sig_of(lines: &[(u64, u64)], p: usize, q: usize) -> TypeSignature {
        let mut rh = vec![0u32; p];
        let mut ch = vec![0u32; q];
        for &(r, c) in lines {
            for b in bits(r) {
                rh[b as usize] += 1;
            }
            for b in bits(c) {
                ch[b as usize] += 1;
            }
        }
        TypeSignature::new(rh, ch)
    }

    fn two_subsets(n: usize) -> Vec<u64> {
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (1u64 << a) | (1u64 << b)))
            .collect()
    }

    #[test]
    fn fast_predicates_match_signatures() {
        let rs = two_subsets(4);
        let cs = two_subsets(4);
        for &ra in &rs {
            for &ca in &cs {
                for &rb in &rs {
                    for &cb in &cs {
                        let sig = sig_of(&[(ra, ca), (rb, cb)], 4, 4);
                        let slow = LemmaId::forbidding(&sig).is_some();
                        assert_eq!(pair_forbidden(ra, ca, rb, cb), slow, "{sig}");
                    }
                }
            }
        }
        let rs = two_subsets(3);
        for &r0 in &rs {
            for &r1 in &rs {
                for &r2 in &rs {
                    for &c0 in &rs {
                        for &c1 in &rs {
                            for &c2 in &rs {
                                let sig = sig_of(&[(r0, c0), (r1, c1), (r2, c2)], 3, 3);
                                let slow =
                                    LemmaId::forbidding(&sig) == Some(LemmaId::StaircaseTriple);
                                assert_eq!(
                                    triple_forbidden([r0, r1, r2], [c0, c1, c2]),
                                    slow,
                                    "{sig}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn assign_unassign_round_trip() {
        let pb = Problem::new(3, 4, 6, false, true, None).unwrap();
        let mut st = State::empty(&pb);
        let before = format!("{:?}", st);
        let u1 = st.assign(&pb, 0, 1, Closure::Free);
        let u2 = st.assign(&pb, 1, 2, Closure::Open);
        let u3 = st.assign(&pb, 5, 1, Closure::Closed);
        assert_eq!(st.uncovered, 15 - 1);
        st.unassign(&pb, u3);
        st.unassign(&pb, u2);
        st.unassign(&pb, u1);
        assert_eq!(format!("{:?}", st), before);
    }

    #[test]
    fn lemma_scope_enforced() {
        assert!(Problem::new(6, 6, 18, true, true, None).is_err());
        assert!(Problem::new(6, 7, 19, true, true, None).is_ok());
        assert!(Problem::new(8, 9, 10, false, true, None).is_err());
    }
}
