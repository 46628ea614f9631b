//! Batch runs over ranges of levels and discriminants, and the rows of the
//! data tables.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::ane::compute_ane;
use crate::error::{Error, Result};
use crate::exactalg::FgAbGroup;
use crate::psi::{image_of_psi, Budget};
use crate::quadfield::{make_field, QuadraticField};
use crate::voronoi::{cached_homology, GammaFlavor};

/// One `(N, delta)` result with the table columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    #[serde(rename = "N")]
    pub level: u64,
    pub delta: u64,
    #[serde(rename = "U")]
    pub u: FgAbGroup,
    #[serde(rename = "A")]
    pub a: FgAbGroup,
    #[serde(rename = "Q")]
    pub q: FgAbGroup,
    #[serde(rename = "C")]
    pub c: FgAbGroup,
    pub r: usize,
    #[serde(rename = "T")]
    pub t: FgAbGroup,
    pub s: Option<u64>,
    pub stabilized: bool,
    pub early_exit: bool,
    pub candidates: u64,
}

/// Rows sharing every column but `delta`, with the deltas collected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AggregatedRow {
    #[serde(rename = "N")]
    pub level: u64,
    #[serde(rename = "U")]
    pub u: FgAbGroup,
    #[serde(rename = "A")]
    pub a: FgAbGroup,
    #[serde(rename = "Q")]
    pub q: FgAbGroup,
    #[serde(rename = "C")]
    pub c: FgAbGroup,
    pub r: usize,
    #[serde(rename = "T")]
    pub t: FgAbGroup,
    pub s: Option<u64>,
    pub deltas: Vec<u64>,
}

pub fn compute_row(n: u64, field: &QuadraticField, flavor: GammaFlavor, budget: &Budget) -> Result<TableRow> {
    let report = image_of_psi(n, field, flavor, budget)?;
    let ane = compute_ane(field, n, flavor);
    Ok(TableRow {
        level: n,
        delta: field.delta,
        u: ane.u,
        a: ane.a,
        q: ane.q,
        c: report.cokernel,
        r: report.rank,
        t: report.torsion,
        s: report.shrinkage,
        stabilized: report.stabilized,
        early_exit: report.early_exit,
        candidates: report.candidates_used,
    })
}

/// Squarefree `delta >= 2` in the range.
pub fn discriminants(discs: RangeInclusive<u64>) -> Vec<u64> {
    QuadraticField::squarefree_range((*discs.start()).max(2), *discs.end())
}

/// All rows for levels with nontrivial cuspidal homology, sorted by
/// `(N, delta)`, computed on a pool of `jobs` threads.
pub fn run_table(
    levels: RangeInclusive<u64>,
    discs: RangeInclusive<u64>,
    flavor: GammaFlavor,
    budget: &Budget,
    jobs: usize,
) -> Result<Vec<TableRow>> {
    if *levels.start() == 0 {
        return Err(Error::InvalidArgument("levels must be positive".into()));
    }
    let deltas = discriminants(discs);
    let mut fields = Vec::with_capacity(deltas.len());
    for &d in &deltas {
        fields.push(make_field(d as i64)?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| {
        let levels: Vec<u64> = levels.collect();
        let nontrivial: Vec<u64> = levels
            .par_iter()
            .map(|&n| cached_homology(n, flavor).map(|h| (n, !h.group.is_trivial())))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter_map(|(n, keep)| keep.then_some(n))
            .collect();
        let jobs: Vec<(u64, &QuadraticField)> = nontrivial
            .iter()
            .flat_map(|&n| fields.iter().map(move |f| (n, f)))
            .collect();
        let mut rows = jobs
            .par_iter()
            .map(|&(n, f)| compute_row(n, f, flavor, budget))
            .collect::<Result<Vec<_>>>()?;
        rows.sort_by_key(|r| (r.level, r.delta));
        Ok(rows)
    })
}

/// Group rows by every column except `delta`; delta lists ascend and the
/// groups are ordered by level, then by smallest delta.
pub fn aggregate(rows: &[TableRow]) -> Vec<AggregatedRow> {
    let mut groups: BTreeMap<(u64, String), AggregatedRow> = BTreeMap::new();
    for r in rows {
        let key = format!("{}|{}|{}|{}|{}|{}|{:?}", r.u, r.a, r.q, r.c, r.r, r.t, r.s);
        groups
            .entry((r.level, key))
            .or_insert_with(|| AggregatedRow {
                level: r.level,
                u: r.u.clone(),
                a: r.a.clone(),
                q: r.q.clone(),
                c: r.c.clone(),
                r: r.r,
                t: r.t.clone(),
                s: r.s,
                deltas: Vec::new(),
            })
            .deltas
            .push(r.delta);
    }
    let mut out: Vec<AggregatedRow> = groups
        .into_values()
        .map(|mut g| {
            g.deltas.sort_unstable();
            g
        })
        .collect();
    out.sort_by_key(|g| (g.level, g.deltas[0]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_7_rows() {
        let rows = run_table(7..=7, 2..=50, GammaFlavor::Gamma0Pm, &Budget::default(), 2).unwrap();
        assert_eq!(rows.len(), 30);
        let agg = aggregate(&rows);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].deltas[0], 2);
        assert_eq!(agg[0].a.to_string(), "C3");
        assert_eq!(agg[1].c.to_string(), "C3");
    }

    #[test]
    fn trivial_levels_and_empty_ranges() {
        let rows = run_table(1..=6, 2..=50, GammaFlavor::Gamma0Pm, &Budget::default(), 1).unwrap();
        assert!(rows.is_empty());
        let rows = run_table(11..=11, 4..=4, GammaFlavor::Gamma0Pm, &Budget::default(), 1).unwrap();
        assert!(rows.is_empty());
    }
}
