use serde::{Deserialize, Serialize};

use crate::degree::DegreeFamily;
use crate::rng::{RngStream, StreamRole};
use crate::spectral::{dense_spectrum, EsdHistogram};
use crate::theory::{alon_boppana_bound, kesten_mckay_mass, kesten_mckay_pdf, semicircle_mass, semicircle_pdf};

use super::config::{EsdReference, ExperimentConfig};
use super::gap::build_sampler;
use super::report::{sequence_for, ReportMeta};
use super::{run_replicates, HarnessError};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EsdReport {
    pub meta: ReportMeta,
    /// Pooled over replicates.
    pub histogram: EsdHistogram,
    pub reference: EsdReference,
    /// `None` when there is a single bin and the distance says nothing.
    pub l1_distance: Option<f64>,
    pub degenerate_binning: bool,
    /// Reference density at the bin centers, in the histogram's units.
    pub overlay: Vec<(f64, f64)>,
    /// `2√(d−1)` in the histogram's units (regular families only).
    pub alon_boppana: Option<f64>,
    pub lambda1: Vec<f64>,
    /// `max(|λ2|, |λn|)` per replicate.
    pub nontrivial_radius: Vec<f64>,
}

impl EsdReport {
    pub fn overlay_csv(&self) -> String {
        let mut out = String::from("x,density\n");
        for (x, y) in &self.overlay {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

/// Pooled spectral histogram of sampled microcanonical graphs against the
/// Kesten-McKay law (fixed `d`) or the semicircle (rescaled by `√ω`).
pub fn run_esd_experiment(cfg: &ExperimentConfig) -> Result<EsdReport, HarnessError> {
    cfg.validate()?;
    let (seq, info) = sequence_for(cfg, cfg.n)?;
    let sampler = build_sampler(&cfg.sampler, cfg)?;
    let scale = if cfg.rescale { seq.mean_degree().sqrt() } else { 1.0 };
    let radius = seq.m_inf() as f64 / scale;
    let grid = EsdHistogram::empty(cfg.bins, -radius, radius, scale);

    let per_replicate = run_replicates(cfg.workers, cfg.replicates, |replicate| {
        let mut rng = RngStream::for_role(cfg.seed, StreamRole::Microcanonical, replicate as u64);
        let g = sampler
            .sample(&seq, &mut rng)
            .map_err(|source| HarnessError::Sample { replicate, source })?
            .graph;
        let eigs = dense_spectrum(&g).map_err(|source| HarnessError::Solver { replicate, source })?;
        let mut h = grid.clone();
        h.add_values(&eigs.iter().map(|x| x / scale).collect::<Vec<_>>());
        let n = eigs.len();
        let lambda1 = eigs[n - 1];
        let nontrivial = if n >= 2 { eigs[n - 2].abs().max(eigs[0].abs()) } else { 0.0 };
        Ok((h, lambda1, nontrivial))
    })?;

    let mut histogram = grid.clone();
    let mut lambda1 = Vec::new();
    let mut nontrivial_radius = Vec::new();
    for (h, l1, nt) in &per_replicate {
        histogram.merge(h);
        lambda1.push(*l1);
        nontrivial_radius.push(*nt);
    }

    let reference = cfg.esd_reference();
    let regular_d = match cfg.family {
        DegreeFamily::Regular { d } => Some(d),
        _ => None,
    };
    let (distance, overlay) = match reference {
        EsdReference::KestenMckay => {
            let d = regular_d.ok_or_else(|| HarnessError::Config("Kesten-McKay needs a regular family".into()))?;
            let dist = histogram.l1_distance(|a, b| kesten_mckay_mass(d, a, b, scale).unwrap_or(0.0));
            let overlay = histogram
                .centers()
                .into_iter()
                .map(|x| Ok((x, scale * kesten_mckay_pdf(d, x * scale)?)))
                .collect::<Result<Vec<_>, crate::theory::TheoryError>>()?;
            (dist, overlay)
        }
        EsdReference::Semicircle => {
            let dist = histogram.l1_distance(semicircle_mass);
            let overlay = histogram.centers().into_iter().map(|x| (x, semicircle_pdf(x))).collect();
            (dist, overlay)
        }
    };
    let degenerate_binning = histogram.bins() == 1;
    let alon_boppana = match regular_d {
        Some(d) if d >= 2 => Some(alon_boppana_bound(d)? / scale),
        _ => None,
    };

    Ok(EsdReport {
        meta: ReportMeta::new(cfg, vec![info]),
        histogram,
        reference,
        l1_distance: (!degenerate_binning).then_some(distance),
        degenerate_binning,
        overlay,
        alon_boppana,
        lambda1,
        nontrivial_radius,
    })
}
