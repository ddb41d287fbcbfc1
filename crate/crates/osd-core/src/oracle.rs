use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::OracleError;
use crate::pairs::{build_closure, BalancedPair, PairGraph, SplitCtx};
use crate::rule::{InflationData, SubstitutionRule, Word};

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryStep {
    pub n: u32,
    pub total_length: f64,
    pub discrepancy_length: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairTrajectory {
    pub steps: Vec<TrajectoryStep>,
    pub d_log_lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayEstimate {
    pub slope: f64,
    pub estimated_log_lambda_dc: f64,
    pub r_squared: f64,
}

/// Trajectory plus the exact per-step type counts it was computed from.
#[derive(Debug)]
pub struct TrajectoryData {
    pub trajectory: PairTrajectory,
    pub graph: PairGraph,
    pub seed_index: usize,
    pub counts: Vec<Vec<BigUint>>,
}

/// Evolves the multiplicity vector of pair types under substitution and
/// records exact discrepancy densities. Types are transported through the
/// closure edges; words are never materialized.
pub fn iterate_pair_density(
    seed: &BalancedPair,
    rule: &SubstitutionRule,
    data: &InflationData,
    n_max: u32,
    cap: usize,
) -> Result<TrajectoryData, OracleError> {
    let ctx = SplitCtx::new(&data.lengths);
    let graph = build_closure(std::slice::from_ref(seed), rule, &ctx, cap)?;
    let seed_index = graph
        .nodes
        .iter()
        .position(|p| p == seed)
        .expect("seed is interned by the closure");
    let node_lengths: Vec<_> = (0..graph.len())
        .map(|i| graph.node_length(i, &data.lengths))
        .collect();
    let mut counts: Vec<Vec<BigUint>> = Vec::new();
    let mut v = vec![BigUint::zero(); graph.len()];
    v[seed_index] = BigUint::one();
    let mut steps = Vec::new();
    let mut prev_total = None;
    for n in 0..=n_max {
        let mut total = data.field.zero();
        let mut disc = data.field.zero();
        for (i, count) in v.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            let contrib =
                node_lengths[i].scale(&BigRational::from_integer(count.clone().into()));
            total = total.add(&contrib);
            if !graph.coincidence[i] {
                disc = disc.add(&contrib);
            }
        }
        // Exact conservation: lengths scale by λ per step.
        if let Some(prev) = &prev_total {
            let expected = data.field.generator().mul(prev);
            assert!(
                total.sub(&expected).is_zero(),
                "length bookkeeping drifted at step {n}"
            );
        }
        let total_f = total.to_f64(1e-12);
        let disc_f = disc.to_f64(1e-12);
        steps.push(TrajectoryStep {
            n,
            total_length: total_f,
            discrepancy_length: disc_f,
            density: if total_f > 0.0 { disc_f / total_f } else { 0.0 },
        });
        prev_total = Some(total);
        counts.push(v.clone());
        if n < n_max {
            let mut next = vec![BigUint::zero(); graph.len()];
            for (parent, count) in v.iter().enumerate() {
                if count.is_zero() {
                    continue;
                }
                for (&child, &mult) in &graph.edges[parent] {
                    next[child] += count * BigUint::from(mult);
                }
            }
            v = next;
        }
    }
    Ok(TrajectoryData {
        trajectory: PairTrajectory {
            steps,
            d_log_lambda: data.lambda.ln(),
        },
        graph,
        seed_index,
        counts,
    })
}

/// Least-squares fit of log density against the step index, skipping the
/// transient prefix. Needs at least four positive post-burn-in densities.
pub fn estimate_decay(t: &PairTrajectory, burn_in: u32) -> Result<DecayEstimate, OracleError> {
    let points: Vec<(f64, f64)> = t
        .steps
        .iter()
        .filter(|s| s.n > burn_in && s.density > 0.0)
        .map(|s| (f64::from(s.n), s.density.ln()))
        .collect();
    if points.len() < 4 {
        return Err(OracleError::InsufficientData);
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(DecayEstimate {
        slope,
        estimated_log_lambda_dc: slope + t.d_log_lambda,
        r_squared,
    })
}

/// Distinct return words of a letter, scanned from the words σⁿ(letter)
/// truncated at the horizon. Discovery order is preserved.
pub fn return_words(rule: &SubstitutionRule, letter: usize, horizon: usize) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut w = vec![letter];
    loop {
        w = rule.substitute(&w);
        let prefix = &w[..w.len().min(horizon)];
        let occurrences: Vec<usize> = prefix
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == letter).then_some(i))
            .collect();
        for pair in occurrences.windows(2) {
            let ret = prefix[pair[0]..pair[1]].to_vec();
            if !out.contains(&ret) {
                out.push(ret);
            }
        }
        if w.len() >= horizon {
            break;
        }
    }
    out
}
