use serde::Serialize;
use thiserror::Error;

use crate::error::{PairError, RuleError};
use crate::osd::{osd, window_report, OsdResult, WindowReport};
use crate::pairs::{build_closure, default_seeds, discrepancy_graph, pure_point_verdict, SplitCtx};
use crate::parse::print_rule;
use crate::rule::{inflation_matrix, pf_data, InflationData, SubstitutionRule};
use crate::spectral::{spectral_report, SpectralReport};

/// Rounds to 12 significant digits for stable report output.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Pair(#[from] PairError),
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleEcho {
    pub letters: Vec<String>,
    pub images: Vec<String>,
    pub text: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueWithPoly {
    pub min_poly: String,
    pub decimal: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthEntry {
    pub decimal: f64,
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum OsdValue {
    Finite(f64),
    Marker(&'static str),
    Absent(Option<()>),
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum OsdBounds {
    Finite([f64; 2]),
    Marker(&'static str),
}

#[derive(Debug, Clone, Serialize)]
pub struct OsdJson {
    pub pure_point: bool,
    pub exact: bool,
    pub value: OsdValue,
    pub bounds: OsdBounds,
    pub lyapunov_max: f64,
    pub lyapunov_min_lower_bound: f64,
    pub clamped: bool,
}

impl OsdJson {
    pub fn from_result(r: &OsdResult) -> Self {
        let value = if !r.pure_point {
            OsdValue::Marker("infinite")
        } else {
            match r.value {
                Some(v) => OsdValue::Finite(sig12(v)),
                None => OsdValue::Absent(None),
            }
        };
        let bounds = match r.bounds {
            Some((lo, hi)) => OsdBounds::Finite([sig12(lo), sig12(hi)]),
            None => OsdBounds::Marker("infinite"),
        };
        OsdJson {
            pure_point: r.pure_point,
            exact: r.exact,
            value,
            bounds,
            lyapunov_max: sig12(r.lyapunov_max),
            lyapunov_min_lower_bound: sig12(r.lyapunov_min_lower_bound),
            clamped: r.clamped,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowJson {
    pub d_int: u32,
    pub isotropic: bool,
    pub applicable: bool,
    pub boundary_dim: Option<f64>,
    pub lower_bound: f64,
    pub naive_upper_bound: f64,
}

impl WindowJson {
    pub fn from_report(w: &WindowReport) -> Self {
        WindowJson {
            d_int: w.d_int,
            isotropic: w.isotropic,
            applicable: w.applicable,
            boundary_dim: w.boundary_dim.map(sig12),
            lower_bound: sig12(w.lower_bound),
            naive_upper_bound: sig12(w.naive_upper_bound),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub rule: RuleEcho,
    pub inflation_matrix: Vec<Vec<u64>>,
    pub char_poly: String,
    pub lambda: ValueWithPoly,
    pub primitive: bool,
    pub pisot: bool,
    pub unit: bool,
    pub lengths: Vec<LengthEntry>,
    pub pure_point: bool,
    pub pair_graph_size: usize,
    pub discrepancy_char_poly: String,
    pub lambda_dc: Option<ValueWithPoly>,
    pub uniform: bool,
    pub dc_primitive: bool,
    pub osd: OsdJson,
    pub window: WindowJson,
    pub warnings: Vec<String>,
}

pub struct AnalyzeOptions {
    pub seed_factor_length: usize,
    pub cap: usize,
    pub precision_bits: u32,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed_factor_length: 2,
            cap: 100_000,
            precision_bits: 128,
        }
    }
}

struct ClosureOutcome {
    pure_point: bool,
    graph_size: usize,
    spectral: SpectralReport,
}

fn run_closure(
    rule: &SubstitutionRule,
    data: &InflationData,
    seed_factor_length: usize,
    cap: usize,
) -> Result<ClosureOutcome, PairError> {
    let ctx = SplitCtx::new(&data.lengths);
    let seeds = default_seeds(rule, &ctx, seed_factor_length)?;
    let graph = build_closure(&seeds, rule, &ctx, cap)?;
    let pure_point = pure_point_verdict(&graph);
    let (m_dc, _) = discrepancy_graph(&graph);
    let spectral = spectral_report(&m_dc);
    Ok(ClosureOutcome {
        pure_point,
        graph_size: graph.len(),
        spectral,
    })
}

/// Full analysis pipeline for a one-dimensional rule.
pub fn analyze_rule(
    rule: &SubstitutionRule,
    opts: &AnalyzeOptions,
) -> Result<AnalysisReport, AnalyzeError> {
    analyze_with_osd(rule, opts).map(|(report, _)| report)
}

/// Like [`analyze_rule`], but also hands back the raw OSD result for
/// callers that combine systems.
pub fn analyze_with_osd(
    rule: &SubstitutionRule,
    opts: &AnalyzeOptions,
) -> Result<(AnalysisReport, OsdResult), AnalyzeError> {
    let data = pf_data(rule, opts.precision_bits)?;
    let outcome = run_closure(rule, &data, opts.seed_factor_length, opts.cap)?;
    let mut warnings = Vec::new();
    // Reachability and contraction must agree; report disagreement instead
    // of picking a side.
    if let Some(lambda_dc) = &outcome.spectral.lambda_dc {
        let contracting = lambda_dc.cmp_exact(&data.lambda) == std::cmp::Ordering::Less;
        if outcome.pure_point && !contracting {
            warnings.push(
                "coincidence reachability holds but the discrepancy rate does not contract"
                    .to_string(),
            );
        }
        if !outcome.pure_point && contracting {
            warnings.push(
                "discrepancy rate contracts but some pair never reaches a coincidence"
                    .to_string(),
            );
        }
    }
    // Transposition seeds are a heuristic; cross-check against the next
    // seed length and recommend a sweep when the outcome moves.
    if opts.seed_factor_length == 2 {
        if let Ok(wider) = run_closure(rule, &data, 3, opts.cap) {
            let same_verdict = wider.pure_point == outcome.pure_point;
            let same_rate = match (&wider.spectral.lambda_dc, &outcome.spectral.lambda_dc) {
                (None, None) => true,
                (Some(a), Some(b)) => a.equals(b),
                _ => false,
            };
            if !(same_verdict && same_rate) {
                warnings.push(
                    "seed length 3 changes the result; run a seed-length sweep".to_string(),
                );
            }
        }
    }
    let matrix = inflation_matrix(rule);
    let inflation: Vec<Vec<u64>> = matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| u64::try_from(e).expect("letter multiplicities fit in u64"))
                .collect()
        })
        .collect();
    let lengths = data
        .lengths
        .iter()
        .map(|l| LengthEntry {
            decimal: sig12(l.to_f64(1e-12)),
            coefficients: l.repr().coeffs().iter().map(|c| c.to_string()).collect(),
        })
        .collect();
    let lambda_dc = outcome.spectral.lambda_dc.as_ref().map(|l| {
        let poly = outcome
            .spectral
            .leading_scc()
            .map(|i| outcome.spectral.sccs[i].char_poly.to_string())
            .unwrap_or_default();
        ValueWithPoly {
            min_poly: poly,
            decimal: sig12(l.to_f64()),
        }
    });
    let osd_result = osd(&data.lambda, 1, &outcome.spectral, outcome.pure_point);
    let window = window_report(
        &data.lambda,
        outcome.spectral.lambda_dc.as_ref(),
        1,
        &data.min_poly_lambda,
        data.unit,
    );
    let report = AnalysisReport {
        rule: RuleEcho {
            letters: (0..rule.letter_count())
                .map(|i| rule.alphabet.name(i).to_string())
                .collect(),
            images: (0..rule.letter_count())
                .map(|i| rule.alphabet.word_to_string(rule.image(i)))
                .collect(),
            text: print_rule(rule).trim_end().to_string(),
        },
        inflation_matrix: inflation,
        char_poly: data.char_poly.to_string(),
        lambda: ValueWithPoly {
            min_poly: data.min_poly_lambda.to_string(),
            decimal: sig12(data.lambda.to_f64()),
        },
        primitive: data.primitive,
        pisot: data.pisot,
        unit: data.unit,
        lengths,
        pure_point: outcome.pure_point,
        pair_graph_size: outcome.graph_size,
        discrepancy_char_poly: outcome.spectral.char_poly_dc.to_string(),
        lambda_dc,
        uniform: outcome.spectral.uniform,
        dc_primitive: outcome.spectral.dc_primitive,
        osd: OsdJson::from_result(&osd_result),
        window: WindowJson::from_report(&window),
        warnings,
    };
    Ok((report, osd_result))
}

/// The underlying OSD data for pipeline callers that need more than JSON.
pub fn analyze_osd(
    rule: &SubstitutionRule,
    opts: &AnalyzeOptions,
) -> Result<OsdResult, AnalyzeError> {
    let data = pf_data(rule, opts.precision_bits)?;
    let outcome = run_closure(rule, &data, opts.seed_factor_length, opts.cap)?;
    Ok(osd(&data.lambda, 1, &outcome.spectral, outcome.pure_point))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds_and_preserves() {
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(1.0), 1.0);
        assert_eq!(sig12(1.2345678901234567), 1.23456789012);
        assert_eq!(sig12(-0.915785461953657), -0.915785461954);
        assert!(sig12(f64::NEG_INFINITY).is_infinite());
    }

    #[test]
    fn fibonacci_report_values() {
        let rule = SubstitutionRule::from_strs(&["a", "b"], &["ab", "a"]);
        let report = analyze_rule(&rule, &AnalyzeOptions::default()).unwrap();
        assert_eq!(report.char_poly, "x^2 - x - 1");
        assert_eq!(report.lambda.decimal, 1.61803398875);
        assert!(report.pisot && report.unit && report.primitive);
        assert!(report.pure_point);
        assert_eq!(report.pair_graph_size, 3);
        assert_eq!(report.lambda_dc.as_ref().unwrap().decimal, 1.0);
        assert!(report.osd.exact);
        assert!(matches!(report.osd.value, OsdValue::Finite(v) if v == 1.0));
        assert_eq!(report.window.boundary_dim, Some(0.0));
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn thue_morse_report_is_infinite() {
        let rule = SubstitutionRule::from_strs(&["a", "b"], &["ab", "ba"]);
        let report = analyze_rule(&rule, &AnalyzeOptions::default()).unwrap();
        assert!(!report.pure_point);
        assert!(matches!(report.osd.value, OsdValue::Marker("infinite")));
        assert!(matches!(report.osd.bounds, OsdBounds::Marker("infinite")));
        assert!(!report.window.applicable);
    }

    #[test]
    fn json_is_deterministic() {
        let rule = SubstitutionRule::from_strs(&["a", "b", "c"], &["ab", "ac", "a"]);
        let a = serde_json::to_string_pretty(
            &analyze_rule(&rule, &AnalyzeOptions::default()).unwrap(),
        )
        .unwrap();
        let b = serde_json::to_string_pretty(
            &analyze_rule(&rule, &AnalyzeOptions::default()).unwrap(),
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"pure_point\": true"));
    }

    #[test]
    fn non_primitive_is_reported() {
        let rule = SubstitutionRule::from_strs(&["a", "b"], &["a", "ab"]);
        assert!(matches!(
            analyze_rule(&rule, &AnalyzeOptions::default()),
            Err(AnalyzeError::Rule(RuleError::NotPrimitive))
        ));
    }
}
