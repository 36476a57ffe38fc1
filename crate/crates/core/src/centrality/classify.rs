//! Rule-based structure classifier over walk degree statistics.

use std::collections::BTreeMap;

use super::{CentralityError, Result};
use crate::graph::Family;
use crate::promptgen::WalkStats;

const LATTICE_DEGREES: [usize; 4] = [2, 3, 4, 6];
const SKEW_THRESHOLD: f64 = 2.9;
const DISPERSION_THRESHOLD: f64 = 0.5;
const MIN_DEGREE_SHARE: f64 = 0.12;

/// Degree features of the distinct nodes seen across all walks.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureFeatures {
    pub distinct_degrees: Vec<usize>,
    pub degree_variance: f64,
    /// Standard deviation over mean.
    pub dispersion: f64,
    /// Maximum over median observed degree.
    pub skew: f64,
    /// Fraction of distinct nodes sitting at the smallest observed degree.
    pub min_degree_share: f64,
}

impl StructureFeatures {
    pub fn from_stats(stats: &[WalkStats]) -> Result<Self> {
        let mut degree_of: BTreeMap<u64, usize> = BTreeMap::new();
        for s in stats {
            for v in &s.node_visits {
                degree_of.insert(v.name, v.degree);
            }
        }
        if degree_of.is_empty() {
            return Err(CentralityError::EmptyStats);
        }
        let mut degrees: Vec<usize> = degree_of.into_values().collect();
        degrees.sort_unstable();
        let n = degrees.len() as f64;
        let mean = degrees.iter().sum::<usize>() as f64 / n;
        let degree_variance = degrees.iter().map(|&d| (d as f64 - mean).powi(2)).sum::<f64>() / n;
        let median = degrees[degrees.len() / 2].max(1) as f64;
        let max = *degrees.last().unwrap() as f64;
        let min = degrees[0];
        let at_min = degrees.iter().take_while(|&&d| d == min).count();
        let mut distinct_degrees = degrees.clone();
        distinct_degrees.dedup();
        Ok(Self {
            distinct_degrees,
            degree_variance,
            dispersion: degree_variance.sqrt() / mean.max(f64::MIN_POSITIVE),
            skew: max / median,
            min_degree_share: at_min as f64 / n,
        })
    }

    fn is_heavy_tailed(&self) -> bool {
        self.skew >= SKEW_THRESHOLD || self.dispersion >= DISPERSION_THRESHOLD
    }

    pub fn classify(&self) -> Family {
        let lattice = self.distinct_degrees.iter().all(|d| LATTICE_DEGREES.contains(d));
        if self.distinct_degrees.len() == 1 || lattice {
            Family::Grid
        } else if self.is_heavy_tailed() && self.min_degree_share >= MIN_DEGREE_SHARE {
            Family::BA
        } else if self.is_heavy_tailed() {
            Family::LFR
        } else {
            Family::ER
        }
    }
}

/// Grid for lattice degree sets, BA for a heavy tail anchored at a common minimum
/// degree, LFR for a heavy tail without one, ER otherwise.
pub fn classify_structure(stats: &[WalkStats]) -> Result<Family> {
    Ok(StructureFeatures::from_stats(stats)?.classify())
}
