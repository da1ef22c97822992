//! Soundness audit for the structural cuts used in refutation mode.
//!
//! Cuts are sampled from the lemma-guided search itself and also planted
//! into random proper `6 x 7` matrices over 19 colours. Each one is replayed
//! through the lemma pruner and then handed to the generic search, which
//! has no lemma pruning, for a bounded exhaustive re-search. Any completion
//! found is a counterexample to the cut.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::{Problem, State};
use super::{CutSample, CutSampler, Limits, Mode, SearchConfig, Searcher};
use crate::error::Result;
use crate::lemmas::{LemmaId, COUNTEREXAMPLE};
use crate::model::{ColorMatrix, Colour};

/// Relative cell layouts, `(row, col)` per copy, one inner slice per colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlantedLayout {
    SplitRowsPairedColumns,
    MixedRowsPairedColumns,
    PairedRowsSplitColumns,
    PairedRowsMixedColumns,
    StaircaseTriple,
}

impl PlantedLayout {
    pub const ALL: [PlantedLayout; 5] = [
        PlantedLayout::SplitRowsPairedColumns,
        PlantedLayout::MixedRowsPairedColumns,
        PlantedLayout::PairedRowsSplitColumns,
        PlantedLayout::PairedRowsMixedColumns,
        PlantedLayout::StaircaseTriple,
    ];

    pub fn lemma(self) -> LemmaId {
        match self {
            PlantedLayout::SplitRowsPairedColumns => LemmaId::SplitRowsPairedColumns,
            PlantedLayout::MixedRowsPairedColumns => LemmaId::MixedRowsPairedColumns,
            PlantedLayout::PairedRowsSplitColumns => LemmaId::PairedRowsSplitColumns,
            PlantedLayout::PairedRowsMixedColumns => LemmaId::PairedRowsMixedColumns,
            PlantedLayout::StaircaseTriple => LemmaId::StaircaseTriple,
        }
    }

    fn cells(self) -> &'static [[(usize, usize); 2]] {
        match self {
            PlantedLayout::SplitRowsPairedColumns => &[[(0, 0), (1, 1)], [(2, 0), (3, 1)]],
            PlantedLayout::MixedRowsPairedColumns => &[[(0, 0), (1, 1)], [(0, 1), (2, 0)]],
            PlantedLayout::PairedRowsSplitColumns => &[[(0, 0), (1, 1)], [(0, 2), (1, 3)]],
            PlantedLayout::PairedRowsMixedColumns => &[[(0, 0), (1, 1)], [(1, 0), (0, 2)]],
            // two colours on the diagonals of a 2x2 box, a third sharing one row and one column
            PlantedLayout::StaircaseTriple => {
                &[[(0, 0), (1, 1)], [(0, 1), (1, 0)], [(0, 2), (2, 0)]]
            }
        }
    }
}

/// A random proper total `6 x 7` matrix over 19 colours containing `layout`
/// under random row and column permutations. Returns the planted colours.
pub fn planted_matrix<R: Rng>(layout: PlantedLayout, rng: &mut R) -> (ColorMatrix, Vec<Colour>) {
    let (p, q, k) = COUNTEREXAMPLE;
    let mut rows: Vec<usize> = (0..p).collect();
    let mut cols: Vec<usize> = (0..q).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let mut palette: Vec<Colour> = (1..=k as Colour).collect();
    palette.shuffle(rng);
    let shape = layout.cells();
    let planted: Vec<Colour> = palette[..shape.len()].to_vec();
    let rest: Vec<Colour> = palette[shape.len()..].to_vec();

    loop {
        let mut m = ColorMatrix::new(p, q, k).expect("valid shape");
        for (colour, copies) in planted.iter().zip(shape) {
            for &(i, j) in copies {
                m.set(rows[i], cols[j], *colour).expect("in range");
            }
        }
        if super::random_fill(&mut m, &rest, rng).is_some() {
            return (m, planted);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Cuts audited in total.
    pub samples: usize,
    /// Cuts taken from a lemma-guided search of the refutation instance.
    pub from_search: usize,
    /// Cuts planted into random matrices.
    pub planted: usize,
    /// Cuts whose state the lemma pruner rejects again on replay.
    pub confirmed: usize,
    /// Cuts the lemma pruner failed to reproduce.
    pub missed: usize,
    /// Re-searches that ran out of options before the horizon.
    pub resolved: usize,
    /// States the generic search still kept at the horizon.
    pub horizon_states: u64,
    /// Completions found below a cut; each one refutes the cut.
    pub completions: usize,
    /// Nodes spent in generic re-searches.
    pub nodes: u64,
    /// Nodes spent producing the search-sampled cuts.
    pub sampling_nodes: u64,
    pub by_rule: BTreeMap<String, usize>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.missed == 0 && self.completions == 0 && self.confirmed == self.samples
    }
}

/// Audits `samples` lemma cuts. Half come from seeded lemma-guided searches
/// of the refutation instance; the rest are planted forbidden arrangements
/// with up to `horizon` cells left open. Every cut is replayed through the
/// lemma pruner and then re-searched by the generic search, without lemma
/// pruning or symmetry breaking, exhaustively to `horizon` further cells.
pub fn audit_lemma_cuts(samples: usize, horizon: usize, seed: u64) -> Result<AuditReport> {
    let (p, q, k) = COUNTEREXAMPLE;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AuditReport::default();

    let from_search = samples.div_ceil(2);
    let (cuts, sampling_nodes) = sample_search_cuts(from_search, 7, 4_000_000, seed)?;
    report.sampling_nodes = sampling_nodes;
    for cut in cuts {
        report.from_search += 1;
        audit_one(
            &cut.matrix,
            &cut.closed,
            cut.rule.to_string(),
            horizon,
            &mut report,
        )?;
    }

    for s in 0..samples - from_search {
        let layout = PlantedLayout::ALL[s % PlantedLayout::ALL.len()];
        let (mut m, planted) = planted_matrix(layout, &mut rng);
        let mut open: Vec<(usize, usize)> = (0..p)
            .flat_map(|i| (0..q).map(move |j| (i, j)))
            .filter(|&(i, j)| !planted.contains(&m.raw(i, j)))
            .collect();
        open.shuffle(&mut rng);
        let free = rng.random_range(1..=horizon.max(1));
        for &(i, j) in open.iter().take(free) {
            m.clear(i, j);
        }
        report.planted += 1;
        audit_one(
            &m,
            &planted,
            format!("planted {:?}", layout.lemma()),
            horizon,
            &mut report,
        )?;
    }
    debug_assert_eq!(k, 19);
    Ok(report)
}

fn audit_one(
    m: &ColorMatrix,
    closed: &[Colour],
    label: String,
    horizon: usize,
    report: &mut AuditReport,
) -> Result<()> {
    let (p, q, k) = m.shape();
    report.samples += 1;
    *report.by_rule.entry(label).or_default() += 1;

    let lemma_pb = Problem::new(p, q, k, true, false, Some(m))?;
    if State::from_partial(&lemma_pb, m, closed)?
        .lemma_scan()
        .is_err()
    {
        report.confirmed += 1;
    } else {
        report.missed += 1;
    }

    let generic_pb = Problem::new(p, q, k, false, false, Some(m))?;
    let root = State::from_partial(&generic_pb, m, closed)?;
    if root.check(&generic_pb, None).is_err() {
        report.nodes += 1;
        report.resolved += 1;
        return Ok(());
    }
    let cfg = SearchConfig::default();
    let limits = Limits::new(&cfg, std::time::Instant::now());
    let mut s = Searcher::new(&generic_pb, root, &limits, Mode::Horizon(horizon), 0);
    let flow = s.dfs();
    report.nodes += s.nodes;
    if flow == super::Flow::Found {
        report.completions += 1;
    } else if s.horizon_hits == 0 {
        report.resolved += 1;
    } else {
        report.horizon_states += s.horizon_hits;
    }
    Ok(())
}

/// Lemma cuts taken from seeded lemma-guided searches of the refutation
/// instance.
pub(crate) fn sample_search_cuts(
    count: usize,
    every: u64,
    node_cap: u64,
    seed: u64,
) -> Result<(Vec<CutSample>, u64)> {
    let (p, q, k) = COUNTEREXAMPLE;
    let pb = Problem::new(p, q, k, true, true, None)?;
    let mut out = Vec::new();
    let mut nodes = 0;
    let mut run = 0u64;
    // many short runs with different tie-breaking reach different subtrees
    let per_run = count.div_ceil(16).max(1);
    while out.len() < count {
        let cfg = SearchConfig::default().with_nodes(node_cap);
        let limits = Limits::new(&cfg, std::time::Instant::now());
        let mut s = Searcher::new(
            &pb,
            State::empty(&pb),
            &limits,
            Mode::First,
            seed.wrapping_add(run),
        );
        s.sampler = Some(CutSampler {
            every,
            seen: 0,
            limit: per_run.min(count - out.len()),
            samples: Vec::new(),
        });
        s.dfs();
        nodes += s.nodes;
        out.extend(s.sampler.take().expect("sampler").samples);
        run += 1;
    }
    Ok((out, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TypeSignature;

    #[test]
    fn layouts_have_their_signatures() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for layout in PlantedLayout::ALL {
            for _ in 0..20 {
                let (m, planted) = planted_matrix(layout, &mut rng);
                assert!(m.is_proper() && m.is_total());
                let sig: TypeSignature = m.type_of(&planted).unwrap();
                assert_eq!(
                    LemmaId::forbidding(&sig),
                    Some(layout.lemma()),
                    "{layout:?} {sig}"
                );
                for &c in &planted {
                    assert_eq!(m.positions(c).len(), 2);
                }
            }
        }
    }

    #[test]
    #[ignore]
    fn cut_depths() {
        let (cuts, nodes) = sample_search_cuts(5000, 7, 4_000_000, 0).unwrap();
        let mut hist = BTreeMap::new();
        for c in &cuts {
            *hist.entry(42 - c.matrix.assigned_count()).or_insert(0) += 1;
        }
        eprintln!("{nodes} nodes; free-cell histogram {hist:?}");
    }

    #[test]
    fn small_audit_passes() {
        let r = audit_lemma_cuts(60, 8, 3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!((r.samples, r.from_search, r.planted), (60, 30, 30));
    }
}
