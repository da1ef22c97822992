use crate::error::{Error, Result};
use crate::model::matrix::{ColorMatrix, Colour, UNASSIGNED};

/// Witness counts for every unordered pair of distinct colours, split by
/// the axis of the witnessing line. A pair is good iff its total count is
/// positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairLedger {
    palette: usize,
    row_counts: Vec<u32>,
    col_counts: Vec<u32>,
}

impl PairLedger {
    pub fn empty(palette: usize) -> Self {
        let n = (palette + 1) * (palette + 1);
        Self {
            palette,
            row_counts: vec![0; n],
            col_counts: vec![0; n],
        }
    }

    /// Counts every (line, position pair) witness in `m`. Unassigned cells
    /// are skipped; improper matrices are rejected.
    pub fn build(m: &ColorMatrix) -> Result<Self> {
        if let Some((colour, line)) = m.first_conflict() {
            return Err(Error::Improper {
                colour: colour as usize,
                line,
            });
        }
        let mut ledger = Self::empty(m.palette_size());
        for i in 0..m.rows() {
            let row: Vec<Colour> = m
                .row(i)
                .iter()
                .copied()
                .filter(|&c| c != UNASSIGNED)
                .collect();
            for (x, &a) in row.iter().enumerate() {
                for &b in &row[x + 1..] {
                    ledger.bump_row(a, b);
                }
            }
        }
        for j in 0..m.cols() {
            let col: Vec<Colour> = m.column(j).filter(|&c| c != UNASSIGNED).collect();
            for (x, &a) in col.iter().enumerate() {
                for &b in &col[x + 1..] {
                    ledger.bump_col(a, b);
                }
            }
        }
        Ok(ledger)
    }

    fn idx(&self, a: Colour, b: Colour) -> usize {
        a as usize * (self.palette + 1) + b as usize
    }

    fn bump_row(&mut self, a: Colour, b: Colour) {
        let (x, y) = (self.idx(a, b), self.idx(b, a));
        self.row_counts[x] += 1;
        self.row_counts[y] += 1;
    }

    fn bump_col(&mut self, a: Colour, b: Colour) {
        let (x, y) = (self.idx(a, b), self.idx(b, a));
        self.col_counts[x] += 1;
        self.col_counts[y] += 1;
    }

    pub fn palette_size(&self) -> usize {
        self.palette
    }

    pub fn row_count(&self, a: Colour, b: Colour) -> u32 {
        if a == b {
            return 0;
        }
        self.row_counts[self.idx(a, b)]
    }

    pub fn col_count(&self, a: Colour, b: Colour) -> u32 {
        if a == b {
            return 0;
        }
        self.col_counts[self.idx(a, b)]
    }

    pub fn count(&self, a: Colour, b: Colour) -> u32 {
        self.row_count(a, b) + self.col_count(a, b)
    }

    pub fn is_good(&self, a: Colour, b: Colour) -> bool {
        self.count(a, b) > 0
    }

    /// All unordered pairs `a < b` of the palette.
    pub fn pairs(&self) -> impl Iterator<Item = (Colour, Colour)> + '_ {
        let k = self.palette as Colour;
        (1..=k).flat_map(move |a| (a + 1..=k).map(move |b| (a, b)))
    }

    pub fn good_pairs(&self) -> impl Iterator<Item = (Colour, Colour)> + '_ {
        self.pairs().filter(|&(a, b)| self.is_good(a, b))
    }

    pub fn uncovered_pairs(&self) -> impl Iterator<Item = (Colour, Colour)> + '_ {
        self.pairs().filter(|&(a, b)| !self.is_good(a, b))
    }

    pub fn uncovered_count(&self) -> usize {
        self.uncovered_pairs().count()
    }

    /// Sum of witness counts over all pairs.
    pub fn total_witnesses(&self) -> u64 {
        self.pairs().map(|(a, b)| self.count(a, b) as u64).sum()
    }

    pub fn row_witnesses(&self) -> u64 {
        self.pairs().map(|(a, b)| self.row_count(a, b) as u64).sum()
    }

    pub fn col_witnesses(&self) -> u64 {
        self.pairs().map(|(a, b)| self.col_count(a, b) as u64).sum()
    }

    /// Number of colours `γ` in `others` for which the pair
    /// `{M(i,j), γ}` is witnessed by the copy at `(i, j)`, i.e. `γ` shares
    /// row `i` or column `j` with it. Debug helper; no pruning relies on it.
    pub fn witnessed_by_cell(m: &ColorMatrix, i: usize, j: usize, others: &[Colour]) -> usize {
        let Some(own) = m.get(i, j) else {
            return 0;
        };
        others
            .iter()
            .filter(|&&g| g != own && g != UNASSIGNED)
            .filter(|&&g| m.row(i).contains(&g) || m.column(j).any(|c| c == g))
            .count()
    }
}
