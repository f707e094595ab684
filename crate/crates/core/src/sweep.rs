//! Turning-effort sweep over the normalized heading plane, with start at the
//! origin and goal at `(1, 0)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::control::{domain_of, law_for, simulate_with, ControlParams, Motion, Pose};
use crate::metrics::{distance, DistanceKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// Cells along each heading axis.
    pub resolution: usize,
    pub theta_range: (f64, f64),
    pub goal_theta_range: (f64, f64),
    /// Coefficient of the dual-headway orientation distance.
    pub kappa: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            resolution: 64,
            theta_range: (-PI, PI),
            goal_theta_range: (-PI, PI),
            kappa: crate::metrics::DEFAULT_KAPPA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepResult {
    pub motion: Motion,
    pub turning: f64,
    pub path_length: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub row: usize,
    pub col: usize,
    pub theta: f64,
    pub goal_theta: f64,
    pub dualhead_orient: f64,
    pub cosine: f64,
    /// `None` outside both control domains.
    pub result: Option<SweepResult>,
}

/// Heading of grid index `i` on `[lo, hi)` split into `n` cells.
pub fn cell_angle(i: usize, n: usize, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * i as f64 / n as f64
}

/// One sweep cell.
pub fn sweep_cell(
    theta: f64,
    goal_theta: f64,
    control: &ControlParams,
    kappa: f64,
) -> (f64, f64, Option<SweepResult>) {
    let start = Pose::new(0.0, 0.0, theta);
    let goal = Pose::new(1.0, 0.0, goal_theta);
    let dualhead_orient = distance(DistanceKind::DualheadOrient { kappa }, &start, &goal);
    let cosine = distance(DistanceKind::Cosine, &start, &goal);
    let result = domain_of(&start, &goal, control).map(|motion| {
        let law = law_for(motion);
        let traj = simulate_with(&start, &goal, control, |p, g| law(p, g, control));
        SweepResult {
            motion,
            turning: traj.turning,
            path_length: traj.path_length,
            converged: traj.converged,
        }
    });
    (dualhead_orient, cosine, result)
}

/// Runs every cell in parallel; the output is in row-major grid order.
pub fn sweep_turning(config: &SweepConfig, control: &ControlParams) -> Vec<SweepCell> {
    let n = config.resolution;
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (row, col) = (k / n, k % n);
            let theta = cell_angle(col, n, config.theta_range);
            let goal_theta = cell_angle(row, n, config.goal_theta_range);
            let (dualhead_orient, cosine, result) =
                sweep_cell(theta, goal_theta, control, config.kappa);
            SweepCell {
                row,
                col,
                theta,
                goal_theta,
                dualhead_orient,
                cosine,
                result,
            }
        })
        .collect()
}

/// Ranks starting at 1, ties sharing their average rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return f64::NAN;
    }
    sab / (saa * sbb).sqrt()
}

/// Spearman rank correlation; `NaN` for fewer than two points or a constant input.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "paired samples");
    if a.len() < 2 {
        return f64::NAN;
    }
    pearson(&ranks(a), &ranks(b))
}

/// Rank correlations of simulated turning with the dual-headway and cosine
/// orientation distances over the cells inside a control domain.
pub fn turning_correlations(cells: &[SweepCell]) -> (f64, f64) {
    let (mut turn, mut dual, mut cos) = (Vec::new(), Vec::new(), Vec::new());
    for c in cells {
        if let Some(r) = c.result {
            turn.push(r.turning);
            dual.push(c.dualhead_orient);
            cos.push(c.cosine);
        }
    }
    (spearman(&dual, &turn), spearman(&cos, &turn))
}
