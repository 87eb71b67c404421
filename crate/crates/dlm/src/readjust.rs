use nalgebra::{DMatrix, DVector};

use crate::adjust::SequentialAdjustment;
use crate::error::Result;
use crate::filter::{filter_final_step, first_order_filter, FilterStep};
use crate::model::{difference_observables, DlmSpec, QuarticSpec};
use crate::space::DlmSpace;

/// One entry of an iterative re-adjustment timeline.
#[derive(Debug, Clone)]
pub struct ReadjustStep {
    /// Time index of the forecast, starting at 1.
    pub t: usize,
    /// Observation variance used for the forecast of `x_t`, adjusted by
    /// data up to `t − 1`.
    pub v: DMatrix<f64>,
    /// Evolution variance used for the forecast of `x_t`.
    pub w: DMatrix<f64>,
    /// Resolution of `V^ν` by data up to `t − 1`; zero before any adjustment.
    pub resolution_nu: f64,
    /// Resolution of `FᵀV^ωF` by data up to `t − 1`.
    pub resolution_omega: f64,
    /// Whether either adjusted matrix needed an NND repair.
    pub repaired: bool,
    /// Filter step at time `t` from a run over `x_1..x_t` with `v` and `w`.
    pub step: FilterStep,
}

/// Re-adjusts the covariance matrices as data arrive and refilters.
///
/// For each `t`, the variances are adjusted by the observables built from
/// `x_1..x_{t−1}` (the prior is used until three observations exist), and
/// the series is refiltered from the start with them. The recorded forecast
/// of `x_t` therefore never uses `x_t` itself.
pub fn iterative_readjust(spec: &DlmSpec, quartic: &QuarticSpec, data: &[DVector<f64>]) -> Result<Vec<ReadjustStep>> {
    let space = DlmSpace::new(spec.clone(), quartic)?;
    let diffs = if data.len() >= 3 {
        Some(difference_observables(space.structure.h(), data)?)
    } else {
        None
    };
    let plain = first_order_filter(spec, &spec.v, &spec.w, data)?;
    let mut seq = SequentialAdjustment::new(&space);
    let mut out = Vec::with_capacity(data.len());
    for t in 1..=data.len() {
        let known = t - 1;
        let (v, w, res_nu, res_omega, repaired, step) = match &diffs {
            Some(d) if known >= 3 => {
                seq.extend_to(d, known)?;
                let adj = seq.covariances()?;
                let step = filter_final_step(spec, &adj.v, &adj.w, &data[..t])?.expect("at least one step");
                let repaired = adj.nu.repair.was_repaired() || adj.w_repair.was_repaired();
                (adj.v, adj.w, adj.nu.resolution, adj.omega.resolution, repaired, step)
            }
            _ => (spec.v.clone(), spec.w.clone(), 0.0, 0.0, false, plain[t - 1].clone()),
        };
        out.push(ReadjustStep {
            t,
            v,
            w,
            resolution_nu: res_nu,
            resolution_omega: res_omega,
            repaired,
            step,
        });
    }
    Ok(out)
}

/// Mean `|ln ρ|` over consecutive blocks of `block` forecasts in the final
/// `fraction` of a run, where `ρ` is the block's summed observed forecast
/// size over its summed expected size. Blocks with no expected size are
/// skipped; returns `None` when no block qualifies.
pub fn block_log_size_ratio(steps: &[FilterStep], block: usize, fraction: f64) -> Option<f64> {
    let sizes: Vec<(f64, f64)> = steps.iter().map(|s| (s.forecast_size, s.forecast_expected)).collect();
    block_log_ratio(&sizes, block, fraction)
}

/// [`block_log_size_ratio`] over `(observed, expected)` size pairs.
pub fn block_log_ratio(sizes: &[(f64, f64)], block: usize, fraction: f64) -> Option<f64> {
    let block = block.max(1);
    let start = sizes.len() - ((sizes.len() as f64) * fraction.clamp(0.0, 1.0)).round() as usize;
    let logs: Vec<f64> = sizes[start..]
        .chunks(block)
        .filter(|c| c.len() == block)
        .filter_map(|c| {
            let observed: f64 = c.iter().map(|s| s.0).sum();
            let expected: f64 = c.iter().map(|s| s.1).sum();
            (expected > 0.0 && observed > 0.0).then(|| (observed / expected).ln().abs())
        })
        .collect();
    (!logs.is_empty()).then(|| logs.iter().sum::<f64>() / logs.len() as f64)
}
