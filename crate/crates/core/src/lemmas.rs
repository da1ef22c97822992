//! Executable statements about a hypothetical complete proper 19-colouring
//! of `K_6 □ K_7`.
//!
//! Everything here is scoped to that one instance ([`COUNTEREXAMPLE`]): the
//! frequency arithmetic, the forbidden type signatures of small sets of
//! 2-colours and the line-pair caps are consequences of the assumption that
//! such a colouring exists, so they may only prune searches for it. The
//! Q-sequence generator enumerates the column-count patterns of the row
//! carrying the most 2-colours.

use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ColorMatrix, Colour, FrequencyProfile, TypeSignature};

/// `(p, q, k)` of the only instance the lemmas speak about.
pub const COUNTEREXAMPLE: (usize, usize, usize) = (6, 7, 19);

/// Where a lemma may be applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    Counterexample { p: usize, q: usize, k: usize },
}

impl Scope {
    pub const fn counterexample() -> Self {
        Scope::Counterexample {
            p: COUNTEREXAMPLE.0,
            q: COUNTEREXAMPLE.1,
            k: COUNTEREXAMPLE.2,
        }
    }

    pub fn admits(&self, p: usize, q: usize, k: usize) -> bool {
        match *self {
            Scope::Counterexample {
                p: sp,
                q: sq,
                k: sk,
            } => (sp, sq, sk) == (p, q, k),
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Counterexample { p, q, k } => write!(f, "counterexample({p},{q},{k})"),
        }
    }
}

fn check_scope(found: (usize, usize, usize)) -> Result<()> {
    if found != COUNTEREXAMPLE {
        return Err(Error::WrongInstance {
            expected: COUNTEREXAMPLE,
            found,
        });
    }
    Ok(())
}

/// The ten arithmetic facts about the frequency profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrequencyRule {
    NoSingletons,
    NoOverfull,
    TwoColourRange,
    HeavyRange,
    FourPlusBelowSurplus,
    NoFourPlusForcesFourThrees,
    FourPlusLimitsHeavy,
    HeavyPlusFourPlus,
    FivePlusLimits,
    HeavyCellRange,
}

impl FrequencyRule {
    pub const ALL: [FrequencyRule; 10] = [
        FrequencyRule::NoSingletons,
        FrequencyRule::NoOverfull,
        FrequencyRule::TwoColourRange,
        FrequencyRule::HeavyRange,
        FrequencyRule::FourPlusBelowSurplus,
        FrequencyRule::NoFourPlusForcesFourThrees,
        FrequencyRule::FourPlusLimitsHeavy,
        FrequencyRule::HeavyPlusFourPlus,
        FrequencyRule::FivePlusLimits,
        FrequencyRule::HeavyCellRange,
    ];

    pub fn holds(self, prof: &FrequencyProfile) -> bool {
        let c = |l| prof.count(l) as i64;
        let at_least = |l| prof.count_at_least(l) as i64;
        let (c2, c3, h3, h4, h5) = (c(2), c(3), at_least(3), at_least(4), at_least(5));
        match self {
            FrequencyRule::NoSingletons => c(1) == 0,
            FrequencyRule::NoOverfull => at_least(7) == 0,
            FrequencyRule::TwoColourRange => (15..=18).contains(&c2),
            FrequencyRule::HeavyRange => (1..=4).contains(&h3),
            FrequencyRule::FourPlusBelowSurplus => h4 <= c2 - 15,
            FrequencyRule::NoFourPlusForcesFourThrees => h4 != 0 || (h3 == 4 && c3 == 4),
            FrequencyRule::FourPlusLimitsHeavy => h4 == 0 || h3 <= 3,
            FrequencyRule::HeavyPlusFourPlus => h3 + h4 <= 4,
            FrequencyRule::FivePlusLimits => h5 == 0 || h3 + h4 <= 3,
            FrequencyRule::HeavyCellRange => (6..=12).contains(&(prof.heavy_cells() as i64)),
        }
    }
}

/// Rules from [`FrequencyRule::ALL`] that `prof` breaks.
pub fn failed_frequency_rules(prof: &FrequencyProfile) -> Result<Vec<FrequencyRule>> {
    check_scope(prof.instance())?;
    Ok(FrequencyRule::ALL
        .into_iter()
        .filter(|r| !r.holds(prof))
        .collect())
}

/// Whether a `(6,7,19)` profile satisfies all ten frequency rules.
pub fn frequency_rules_hold(prof: &FrequencyProfile) -> Result<bool> {
    Ok(failed_frequency_rules(prof)?.is_empty())
}

/// Every `(c_1, …, c_6)` with `Σ c_l = 19`, `Σ l·c_l = 42` and no colour
/// class of negative excess `-l² + 12l - 18`.
pub fn counterexample_profiles() -> Vec<[usize; 6]> {
    let allowed = |l: i64| -l * l + 12 * l - 18 >= 0;
    let mut out = Vec::new();
    for c1 in 0..=19usize {
        for c2 in 0..=19 - c1 {
            for c3 in 0..=19 - c1 - c2 {
                for c4 in 0..=19 - c1 - c2 - c3 {
                    for c5 in 0..=19 - c1 - c2 - c3 - c4 {
                        let c6 = 19 - c1 - c2 - c3 - c4 - c5;
                        let v = [c1, c2, c3, c4, c5, c6];
                        let cells: usize = v.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
                        let ok = v
                            .iter()
                            .enumerate()
                            .all(|(i, &c)| c == 0 || allowed(i as i64 + 1));
                        if cells == 42 && ok {
                            out.push(v);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Checks the ten frequency rules against every vector that the two
/// conservation laws and excess non-negativity permit.
pub fn frequency_rules_hold_universally() -> bool {
    let (p, q, k) = COUNTEREXAMPLE;
    counterexample_profiles().iter().all(|v| {
        let prof = FrequencyProfile::new(p, q, k, v.to_vec());
        frequency_rules_hold(&prof).expect("scoped instance")
    })
}

/// Identifies a structural lemma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    /// Two 2-colours over four rows, sharing two columns: `(1^4, 2^2)`.
    SplitRowsPairedColumns,
    /// `(2^1 1^2, 2^2)`
    MixedRowsPairedColumns,
    /// `(2^2, 1^4)`
    PairedRowsSplitColumns,
    /// `(2^2, 2^1 1^2)`
    PairedRowsMixedColumns,
    /// Three 2-colours of type `(3^1 2^1 1^1, 3^1 2^1 1^1)`.
    StaircaseTriple,
    /// At most two 2-colours common to any two columns.
    ColumnPairCap,
    /// At most two 2-colours common to any two rows.
    RowPairCap,
    /// At most three 2-colours common to any two rows (excess bound).
    RowPairExcessCap,
}

impl LemmaId {
    pub const FORBIDDEN_TYPES: [LemmaId; 5] = [
        LemmaId::SplitRowsPairedColumns,
        LemmaId::MixedRowsPairedColumns,
        LemmaId::PairedRowsSplitColumns,
        LemmaId::PairedRowsMixedColumns,
        LemmaId::StaircaseTriple,
    ];

    pub fn scope(self) -> Scope {
        Scope::counterexample()
    }

    /// The forbidden signature, for the five type lemmas.
    pub fn signature(self) -> Option<TypeSignature> {
        let sig = match self {
            LemmaId::SplitRowsPairedColumns => TypeSignature::from_powers(&[(1, 4)], &[(2, 2)]),
            LemmaId::MixedRowsPairedColumns => {
                TypeSignature::from_powers(&[(2, 1), (1, 2)], &[(2, 2)])
            }
            LemmaId::PairedRowsSplitColumns => TypeSignature::from_powers(&[(2, 2)], &[(1, 4)]),
            LemmaId::PairedRowsMixedColumns => {
                TypeSignature::from_powers(&[(2, 2)], &[(2, 1), (1, 2)])
            }
            LemmaId::StaircaseTriple => {
                TypeSignature::from_powers(&[(3, 1), (2, 1), (1, 1)], &[(3, 1), (2, 1), (1, 1)])
            }
            _ => return None,
        };
        Some(sig)
    }

    /// Largest permitted share, for the cap lemmas.
    pub fn cap(self) -> Option<usize> {
        match self {
            LemmaId::ColumnPairCap | LemmaId::RowPairCap => Some(2),
            LemmaId::RowPairExcessCap => Some(3),
            _ => None,
        }
    }

    /// Matches a signature of a 2- or 3-set against the forbidden list.
    pub fn forbidding(sig: &TypeSignature) -> Option<LemmaId> {
        Self::FORBIDDEN_TYPES
            .into_iter()
            .find(|id| id.signature().as_ref() == Some(sig))
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.signature(), self.cap()) {
            (Some(sig), _) => write!(f, "{self:?} {sig}"),
            (_, Some(cap)) => write!(f, "{self:?} (share <= {cap})"),
            _ => write!(f, "{self:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationWitness {
    Colours(Vec<Colour>),
    Rows(usize, usize),
    Columns(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaViolation {
    pub lemma: LemmaId,
    pub witness: ViolationWitness,
}

impl LemmaViolation {
    /// Re-checks the violation against `m` through the generic matrix operations.
    pub fn replays(&self, m: &ColorMatrix) -> bool {
        match (&self.witness, self.lemma.signature(), self.lemma.cap()) {
            (ViolationWitness::Colours(set), Some(sig), _) => {
                m.type_of(set).is_ok_and(|t| t == sig)
            }
            (ViolationWitness::Rows(a, b), _, Some(cap)) => {
                m.row_stats(*a, *b).is_ok_and(|s| s > cap)
            }
            (ViolationWitness::Columns(a, b), _, Some(cap)) => {
                m.col_stats(*a, *b).is_ok_and(|s| s > cap)
            }
            _ => false,
        }
    }
}

/// Row and column index sets of each 2-colour of `m`.
fn two_colour_lines(m: &ColorMatrix) -> Vec<(Colour, [usize; 2], [usize; 2])> {
    let freq = m.frequencies();
    (1..=m.palette_size() as Colour)
        .filter(|&c| freq[c as usize] == 2)
        .map(|c| {
            let pos = m.positions(c);
            (c, [pos[0].0, pos[1].0], [pos[0].1, pos[1].1])
        })
        .collect()
}

fn signature_of(
    members: &[&(Colour, [usize; 2], [usize; 2])],
    rows: usize,
    cols: usize,
) -> TypeSignature {
    let mut rh = vec![0u32; rows];
    let mut ch = vec![0u32; cols];
    for (_, r, c) in members {
        rh[r[0]] += 1;
        rh[r[1]] += 1;
        ch[c[0]] += 1;
        ch[c[1]] += 1;
    }
    TypeSignature::new(rh, ch)
}

/// Every 2- and 3-subset of the 2-colours of `m` whose type is one of the
/// five forbidden signatures.
pub fn forbidden_type_violations(m: &ColorMatrix) -> Vec<LemmaViolation> {
    let twos = two_colour_lines(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut out = Vec::new();
    for a in 0..twos.len() {
        for b in a + 1..twos.len() {
            let sig = signature_of(&[&twos[a], &twos[b]], rows, cols);
            if let Some(lemma) = LemmaId::forbidding(&sig) {
                out.push(LemmaViolation {
                    lemma,
                    witness: ViolationWitness::Colours(vec![twos[a].0, twos[b].0]),
                });
            }
            for c in b + 1..twos.len() {
                let sig = signature_of(&[&twos[a], &twos[b], &twos[c]], rows, cols);
                if let Some(lemma) = LemmaId::forbidding(&sig) {
                    out.push(LemmaViolation {
                        lemma,
                        witness: ViolationWitness::Colours(vec![twos[a].0, twos[b].0, twos[c].0]),
                    });
                }
            }
        }
    }
    out
}

/// Row pairs sharing more than two (and, separately, more than three)
/// 2-colours, and column pairs sharing more than two.
pub fn cap_violations(m: &ColorMatrix) -> Vec<LemmaViolation> {
    let mut out = Vec::new();
    for a in 0..m.rows() {
        for b in a + 1..m.rows() {
            let share = m.row_stats(a, b).expect("distinct rows");
            for lemma in [LemmaId::RowPairCap, LemmaId::RowPairExcessCap] {
                if share > lemma.cap().expect("cap lemma") {
                    out.push(LemmaViolation {
                        lemma,
                        witness: ViolationWitness::Rows(a, b),
                    });
                }
            }
        }
    }
    for a in 0..m.cols() {
        for b in a + 1..m.cols() {
            if m.col_stats(a, b).expect("distinct columns") > 2 {
                out.push(LemmaViolation {
                    lemma: LemmaId::ColumnPairCap,
                    witness: ViolationWitness::Columns(a, b),
                });
            }
        }
    }
    out
}

/// Counts of the distinguished row's 2-colours per column, for the columns
/// `2·p_param - 3 ..= 7` (1-based, as in the row/column numbering of a
/// `6 x 7` matrix).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QSequence {
    pub r2_1: usize,
    pub p_param: usize,
    pub values: Vec<u8>,
}

impl QSequence {
    /// 1-based column index of `values[0]`.
    pub fn first_column(&self) -> usize {
        2 * self.p_param - 3
    }

    /// Required `Σ q_j`.
    pub fn required_sum(r2_1: usize, p_param: usize) -> i64 {
        2 * r2_1 as i64 + 8 - 4 * p_param as i64
    }

    /// Number of leading entries (columns up to `r2_1`).
    pub fn head_len(&self) -> usize {
        (self.r2_1 + 1).saturating_sub(self.first_column())
    }

    pub fn satisfies_invariants(&self) -> bool {
        if self.values.len() != 8 - self.first_column() {
            return false;
        }
        let sum: i64 = self.values.iter().map(|&v| v as i64).sum();
        if sum != Self::required_sum(self.r2_1, self.p_param) {
            return false;
        }
        if self.values.iter().any(|&v| v > 3) {
            return false;
        }
        let head_cap = 3.min(self.r2_1 as i64 + 4 - 2 * self.p_param as i64);
        let (head, tail) = self.values.split_at(self.head_len());
        head.iter().all(|&v| v >= 1 && v as i64 <= head_cap)
            && head.windows(2).all(|w| w[0] >= w[1])
            && tail.windows(2).all(|w| w[0] >= w[1])
    }
}

impl fmt::Display for QSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Admissible pivot indices for a given `r2_1 ∈ [5, 7]`.
pub fn p_range(r2_1: usize) -> Result<RangeInclusive<usize>> {
    if !(5..=7).contains(&r2_1) {
        return Err(Error::OutOfRange {
            what: "r2_1",
            value: r2_1 as i64,
            min: 5,
            max: 7,
        });
    }
    Ok(2.max(r2_1 - 3)..=5.min((r2_1 + 4) / 2))
}

/// All sequences meeting the sum rule, the per-column bounds and the
/// monotonicity of both the head (columns ≤ `r2_1`) and the tail. Ordered
/// lexicographically decreasing.
pub fn qset_generate(r2_1: usize, p_param: usize) -> Result<Vec<QSequence>> {
    let range = p_range(r2_1)?;
    if !range.contains(&p_param) {
        return Err(Error::OutOfRange {
            what: "p_param",
            value: p_param as i64,
            min: *range.start() as i64,
            max: *range.end() as i64,
        });
    }
    let len = 8 - (2 * p_param - 3);
    let mut out = Vec::new();
    let mut values = vec![0u8; len];
    loop {
        let seq = QSequence {
            r2_1,
            p_param,
            values: values.clone(),
        };
        if seq.satisfies_invariants() {
            out.push(seq);
        }
        // odometer over [0, 3]^len
        let Some(pos) = values.iter().rposition(|&v| v < 3) else {
            break;
        };
        values[pos] += 1;
        values[pos + 1..].iter_mut().for_each(|v| *v = 0);
    }
    out.sort_by(|a, b| b.values.cmp(&a.values));
    Ok(out)
}
