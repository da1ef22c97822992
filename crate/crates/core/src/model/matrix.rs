use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ledger::PairLedger;
use crate::model::profile::FrequencyProfile;
use crate::model::signature::TypeSignature;

/// Colour ids are `1..=palette_size`.
pub type Colour = u16;

/// Sentinel for a cell that has not been assigned a colour.
pub const UNASSIGNED: Colour = 0;

/// A `rows x cols` grid of colour ids describing a vertex colouring of
/// `K_rows □ K_cols`. Cell `(i, j)` is the vertex in row `i`, column `j`;
/// two cells are adjacent iff they share a row or a column.
///
/// Cells may be [`UNASSIGNED`]; every predicate on the matrix skips them.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorMatrix {
    rows: usize,
    cols: usize,
    palette: usize,
    cells: Vec<Colour>,
}

/// Outcome of a membership test against the family of complete proper
/// `p x q` colourings with `k` colours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member,
    DimensionMismatch {
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },
    NotTotal,
    Improper,
    /// Proper and total, but some colours are unused or some pairs never meet.
    Incomplete {
        unused: Vec<Colour>,
        bad_pairs: usize,
    },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Membership::Member => write!(f, "member"),
            Membership::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{} k={}, found {}x{} k={}",
                expected.0, expected.1, expected.2, found.0, found.1, found.2
            ),
            Membership::NotTotal => write!(f, "matrix not total"),
            Membership::Improper => write!(f, "matrix not proper"),
            Membership::Incomplete { unused, bad_pairs } => write!(
                f,
                "not complete: {} unused colour(s), {} pair(s) not good",
                unused.len(),
                bad_pairs
            ),
        }
    }
}

impl ColorMatrix {
    /// An all-unassigned matrix.
    pub fn new(rows: usize, cols: usize, palette: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || palette == 0 || palette > Colour::MAX as usize {
            return Err(Error::InvalidDimensions {
                rows,
                cols,
                palette,
            });
        }
        Ok(Self {
            rows,
            cols,
            palette,
            cells: vec![UNASSIGNED; rows * cols],
        })
    }

    /// Builds a matrix from row vectors; `0` ([`UNASSIGNED`]) marks empty cells.
    pub fn from_rows<R: AsRef<[Colour]>>(palette: usize, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::new(rows.len(), cols, palette)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: (rows.len(), cols, palette),
                    found: (rows.len(), row.len(), palette),
                });
            }
            for (j, &c) in row.iter().enumerate() {
                m.set(i, j, c)?;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn palette_size(&self) -> usize {
        self.palette
    }

    /// `(rows, cols, palette_size)`
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.rows, self.cols, self.palette)
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Colour> {
        match self.cells[row * self.cols + col] {
            UNASSIGNED => None,
            c => Some(c),
        }
    }

    /// Raw cell value, [`UNASSIGNED`] included.
    pub fn raw(&self, row: usize, col: usize) -> Colour {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, colour: Colour) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::CellOutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        if colour as usize > self.palette {
            return Err(Error::ColourOutOfRange {
                colour: colour as usize,
                palette: self.palette,
            });
        }
        self.cells[row * self.cols + col] = colour;
        Ok(())
    }

    pub fn clear(&mut self, row: usize, col: usize) {
        self.cells[row * self.cols + col] = UNASSIGNED;
    }

    pub fn row(&self, i: usize) -> &[Colour] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = Colour> + '_ {
        (0..self.rows).map(move |i| self.raw(i, j))
    }

    /// Row-major cell values.
    pub fn cells(&self) -> &[Colour] {
        &self.cells
    }

    pub fn is_total(&self) -> bool {
        self.cells.iter().all(|&c| c != UNASSIGNED)
    }

    pub fn assigned_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != UNASSIGNED).count()
    }

    /// Positions `(row, col)` holding `colour`.
    pub fn positions(&self, colour: Colour) -> Vec<(usize, usize)> {
        self.cells
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == colour && c != UNASSIGNED)
            .map(|(idx, _)| (idx / self.cols, idx % self.cols))
            .collect()
    }

    /// Occurrence count of each colour, indexed by colour id (index 0 unused).
    pub fn frequencies(&self) -> Vec<usize> {
        let mut freq = vec![0; self.palette + 1];
        for &c in &self.cells {
            if c != UNASSIGNED {
                freq[c as usize] += 1;
            }
        }
        freq
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self {
            rows: self.cols,
            cols: self.rows,
            palette: self.palette,
            cells: vec![UNASSIGNED; self.cells.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.cells[j * self.rows + i] = self.raw(i, j);
            }
        }
        t
    }

    /// `(M_{ρ,σ})_{i,j} = M_{ρ(i),σ(j)}`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        assert_eq!(row_perm.len(), self.rows);
        assert_eq!(col_perm.len(), self.cols);
        let mut out = self.clone();
        for (i, &ri) in row_perm.iter().enumerate() {
            for (j, &cj) in col_perm.iter().enumerate() {
                out.cells[i * self.cols + j] = self.raw(ri, cj);
            }
        }
        out
    }

    /// Applies a colour bijection given as `map[old] = new` (index 0 ignored).
    pub fn relabeled(&self, map: &[Colour]) -> Self {
        assert_eq!(map.len(), self.palette + 1);
        let mut out = self.clone();
        for c in out.cells.iter_mut() {
            if *c != UNASSIGNED {
                *c = map[*c as usize];
            }
        }
        out
    }

    /// Returns a copy with one extra column appended.
    pub fn with_column(&self, column: &[Colour]) -> Result<Self> {
        if column.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.rows, self.cols + 1, self.palette),
                found: (column.len(), self.cols + 1, self.palette),
            });
        }
        let mut out = Self::new(self.rows, self.cols + 1, self.palette)?;
        for (i, &c) in column.iter().enumerate() {
            let start = i * (self.cols + 1);
            out.cells[start..start + self.cols].copy_from_slice(self.row(i));
            out.set(i, self.cols, c)?;
        }
        Ok(out)
    }

    /// The first repeated colour found in some line, if any.
    pub fn first_conflict(&self) -> Option<(Colour, String)> {
        let mut seen = vec![false; self.palette + 1];
        for i in 0..self.rows {
            seen.iter_mut().for_each(|s| *s = false);
            for &c in self.row(i) {
                if c != UNASSIGNED {
                    if seen[c as usize] {
                        return Some((c, format!("row {i}")));
                    }
                    seen[c as usize] = true;
                }
            }
        }
        for j in 0..self.cols {
            seen.iter_mut().for_each(|s| *s = false);
            for c in self.column(j) {
                if c != UNASSIGNED {
                    if seen[c as usize] {
                        return Some((c, format!("column {j}")));
                    }
                    seen[c as usize] = true;
                }
            }
        }
        None
    }

    /// No line contains two equal assigned colours.
    pub fn is_proper(&self) -> bool {
        self.first_conflict().is_none()
    }

    pub fn ledger(&self) -> Result<PairLedger> {
        PairLedger::build(self)
    }

    /// Every colour of the palette occurs and every pair of distinct colours
    /// is good. Improper matrices are never complete.
    pub fn is_complete(&self) -> bool {
        let Ok(ledger) = self.ledger() else {
            return false;
        };
        let freq = self.frequencies();
        freq[1..].iter().all(|&f| f > 0) && ledger.uncovered_count() == 0
    }

    pub fn membership(&self, p: usize, q: usize, k: usize) -> Membership {
        if self.shape() != (p, q, k) {
            return Membership::DimensionMismatch {
                expected: (p, q, k),
                found: self.shape(),
            };
        }
        if !self.is_total() {
            return Membership::NotTotal;
        }
        let Ok(ledger) = self.ledger() else {
            return Membership::Improper;
        };
        let unused: Vec<Colour> = self
            .frequencies()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|&(_, &f)| f == 0)
            .map(|(c, _)| c as Colour)
            .collect();
        let bad_pairs = ledger.uncovered_count();
        if unused.is_empty() && bad_pairs == 0 {
            Membership::Member
        } else {
            Membership::Incomplete { unused, bad_pairs }
        }
    }

    /// Whether this matrix is a complete proper `p x q` colouring with `k` colours.
    pub fn in_family(&self, p: usize, q: usize, k: usize) -> bool {
        self.membership(p, q, k).is_member()
    }

    pub fn frequency_profile(&self) -> FrequencyProfile {
        FrequencyProfile::of_matrix(self)
    }

    /// Number of 2-colours with one copy in each of rows `i1` and `i2`.
    pub fn row_stats(&self, i1: usize, i2: usize) -> Result<usize> {
        if i1 == i2 {
            return Err(Error::EqualIndices(i1));
        }
        self.check_index(i1, 0)?;
        self.check_index(i2, 0)?;
        let freq = self.frequencies();
        Ok(self
            .row(i1)
            .iter()
            .filter(|&&c| c != UNASSIGNED && freq[c as usize] == 2 && self.row(i2).contains(&c))
            .count())
    }

    /// Number of 2-colours with one copy in each of columns `j1` and `j2`.
    pub fn col_stats(&self, j1: usize, j2: usize) -> Result<usize> {
        if j1 == j2 {
            return Err(Error::EqualIndices(j1));
        }
        self.check_index(0, j1)?;
        self.check_index(0, j2)?;
        let freq = self.frequencies();
        let other: Vec<Colour> = self.column(j2).collect();
        Ok(self
            .column(j1)
            .filter(|&c| c != UNASSIGNED && freq[c as usize] == 2 && other.contains(&c))
            .count())
    }

    /// The type signature of a set of 2-colours.
    pub fn type_of(&self, set: &[Colour]) -> Result<TypeSignature> {
        let freq = self.frequencies();
        let mut row_hits = vec![0u32; self.rows];
        let mut col_hits = vec![0u32; self.cols];
        let mut seen = Vec::with_capacity(set.len());
        for &c in set {
            if c == UNASSIGNED || c as usize > self.palette {
                return Err(Error::ColourOutOfRange {
                    colour: c as usize,
                    palette: self.palette,
                });
            }
            if freq[c as usize] != 2 {
                return Err(Error::NotTwoColour {
                    colour: c as usize,
                    frequency: freq[c as usize],
                });
            }
            if seen.contains(&c) {
                continue;
            }
            seen.push(c);
            for (i, j) in self.positions(c) {
                row_hits[i] += 1;
                col_hits[j] += 1;
            }
        }
        Ok(TypeSignature::new(row_hits, col_hits))
    }

    fn check_index(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            Err(Error::CellOutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for ColorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColorMatrix(\n{self})")
    }
}
