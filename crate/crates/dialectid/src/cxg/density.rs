//! Per-region construction density: how much more or less constructional
//! a region's text is than the average region.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cxg::{annotate_text, CxgError, Grammar, Lexicon, Matcher};
use crate::sampling::RegionSample;

pub fn group_by_region(samples: &[RegionSample]) -> BTreeMap<String, Vec<&RegionSample>> {
    let mut groups: BTreeMap<String, Vec<&RegionSample>> = BTreeMap::new();
    for s in samples {
        groups.entry(s.region.clone()).or_default().push(s);
    }
    groups
}

/// Mean total matches per sample for each region. Totals are integer sums,
/// so the parallel reduction is exact and order-free.
pub fn region_mean_totals(
    grammar: &Grammar,
    lexicon: &Lexicon,
    groups: &BTreeMap<String, Vec<&RegionSample>>,
) -> Result<BTreeMap<String, f64>, CxgError> {
    if groups.is_empty() {
        return Err(CxgError::NoSamples);
    }
    let matcher = Matcher::new(grammar);
    let mut means = BTreeMap::new();
    for (region, samples) in groups {
        if samples.is_empty() {
            return Err(CxgError::EmptyRegion(region.clone()));
        }
        let total: u64 = samples
            .par_iter()
            .map(|s| {
                let tokens = annotate_text(&s.text, lexicon);
                matcher.count(&tokens).iter().map(|&c| c as u64).sum::<u64>()
            })
            .sum();
        means.insert(region.clone(), total as f64 / samples.len() as f64);
    }
    Ok(means)
}

/// Deviation of each region mean from the unweighted grand mean, in
/// percent. Deviations sum to ~0 by construction. All-zero means are
/// reported as uniformly 0%.
pub fn relative_density_from_means(
    means: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>, CxgError> {
    if means.is_empty() {
        return Err(CxgError::NoSamples);
    }
    let grand = means.values().sum::<f64>() / means.len() as f64;
    let out = means
        .iter()
        .map(|(region, &m)| {
            let rel = if grand == 0.0 { 0.0 } else { (m - grand) / grand * 100.0 };
            (region.clone(), rel)
        })
        .collect();
    Ok(out)
}

/// Relative density percentage per region.
pub fn feature_density(
    grammar: &Grammar,
    lexicon: &Lexicon,
    groups: &BTreeMap<String, Vec<&RegionSample>>,
) -> Result<BTreeMap<String, f64>, CxgError> {
    relative_density_from_means(&region_mean_totals(grammar, lexicon, groups)?)
}

/// One row per region, one percentage column per grammar:
/// `region,<name>,...`. Every column must cover the same regions.
pub fn write_density_csv(
    path: &std::path::Path,
    columns: &[(String, BTreeMap<String, f64>)],
) -> Result<(), CxgError> {
    use std::io::Write;

    let Some((_, first)) = columns.first() else {
        return Err(CxgError::NoSamples);
    };
    for (name, column) in columns {
        if !column.keys().eq(first.keys()) {
            return Err(CxgError::ColumnMismatch(name.clone()));
        }
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let names: Vec<&str> = columns.iter().map(|(n, _)| n.as_str()).collect();
    writeln!(w, "region,{}", names.join(","))?;
    for region in first.keys() {
        let cells: Vec<String> =
            columns.iter().map(|(_, col)| format!("{:.4}", col[region])).collect();
        writeln!(w, "{region},{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}
