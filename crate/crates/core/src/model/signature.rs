use std::fmt;

use serde::{Deserialize, Serialize};

/// How a set of 2-colours spreads over the lines of a matrix: the multiset
/// of nonzero per-row hit counts and the multiset of nonzero per-column hit
/// counts, each kept in decreasing order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeSignature {
    row_part: Vec<u32>,
    col_part: Vec<u32>,
}

impl TypeSignature {
    /// Zero entries are dropped; both parts are sorted decreasing.
    pub fn new(mut row_part: Vec<u32>, mut col_part: Vec<u32>) -> Self {
        row_part.retain(|&x| x > 0);
        col_part.retain(|&x| x > 0);
        row_part.sort_unstable_by(|a, b| b.cmp(a));
        col_part.sort_unstable_by(|a, b| b.cmp(a));
        Self { row_part, col_part }
    }

    /// `(m_1^{a_1} … , n_1^{b_1} …)` given as `(value, multiplicity)` lists.
    pub fn from_powers(rows: &[(u32, usize)], cols: &[(u32, usize)]) -> Self {
        let expand = |parts: &[(u32, usize)]| {
            parts
                .iter()
                .flat_map(|&(v, n)| std::iter::repeat_n(v, n))
                .collect::<Vec<_>>()
        };
        Self::new(expand(rows), expand(cols))
    }

    pub fn row_part(&self) -> &[u32] {
        &self.row_part
    }

    pub fn col_part(&self) -> &[u32] {
        &self.col_part
    }

    pub fn row_sum(&self) -> u32 {
        self.row_part.iter().sum()
    }

    pub fn col_sum(&self) -> u32 {
        self.col_part.iter().sum()
    }

    /// Rows and columns swap roles under transposition.
    pub fn transposed(&self) -> Self {
        Self {
            row_part: self.col_part.clone(),
            col_part: self.row_part.clone(),
        }
    }

    fn fmt_part(part: &[u32], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < part.len() {
            let v = part[i];
            let run = part[i..].iter().take_while(|&&x| x == v).count();
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}^{run}")?;
            first = false;
            i += run;
        }
        Ok(())
    }
}

impl fmt::Display for TypeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        Self::fmt_part(&self.row_part, f)?;
        write!(f, ", ")?;
        Self::fmt_part(&self.col_part, f)?;
        write!(f, ")")
    }
}

impl fmt::Debug for TypeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeSignature{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_order() {
        let a = TypeSignature::new(vec![1, 2, 0, 1], vec![2, 2]);
        let b = TypeSignature::from_powers(&[(2, 1), (1, 2)], &[(2, 2)]);
        assert_eq!(a, b);
        assert_eq!(a.row_part(), &[2, 1, 1]);
        assert_eq!(a.to_string(), "(2^1 1^2, 2^2)");
        assert_eq!(a.row_sum(), a.col_sum());
    }

    #[test]
    fn empty_display() {
        assert_eq!(TypeSignature::default().to_string(), "(, )");
    }
}
