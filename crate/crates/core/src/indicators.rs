//! Per-network spam-likelihood indicators.
//!
//! Combines the structural features that separate social from bulk traffic
//! (clustering against its random baseline, out-degree distance from a
//! power law, reply reciprocity) into one transparent weighted score in
//! [0, 1]. The score is monotone non-decreasing in the power-law deviation
//! and non-increasing in clustering and reciprocity; no learned components.

use thiserror::Error;

use crate::graph::EmailNetwork;
use crate::metrics::{self, MetricsError};
use crate::powerlaw::{self, FitError};

#[derive(Debug, Error)]
pub enum IndicatorError {
    #[error("invalid score configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Structural features of one network, all computed on the same window.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FeatureVector {
    pub avg_clustering: f64,
    /// Average clustering over the random baseline of equal density.
    pub clustering_vs_random: f64,
    pub powerlaw_deviation_out: f64,
    pub powerlaw_deviation_undirected: f64,
    /// Giant-component share of the undirected view.
    pub giant_fraction: f64,
    /// Fraction of directed edges with the reverse edge present.
    pub reciprocity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Social,
    NonSocial,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct IndicatorReport {
    pub features: FeatureVector,
    pub spam_score: f64,
    pub verdict: Verdict,
    pub thresholds_used: ScoreConfig,
}

/// Weights, saturation cut points and the decision threshold for the score.
/// Cut points are calibrated on the synthetic models only; treat absolute
/// scores on other traffic accordingly.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScoreConfig {
    pub weight_deviation_out: f64,
    pub weight_deviation_undirected: f64,
    pub weight_clustering: f64,
    pub weight_clustering_ratio: f64,
    pub weight_reciprocity: f64,
    pub weight_giant_fraction: f64,
    /// KS distance at or above this reads as fully non-social.
    pub deviation_saturation: f64,
    /// Average clustering at or above this reads as fully social.
    pub clustering_saturation: f64,
    /// Clustering-to-baseline ratio at or above this reads as fully social.
    pub ratio_saturation: f64,
    /// Scores at or above this verdict as non-social.
    pub decision_threshold: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            weight_deviation_out: 0.3,
            weight_deviation_undirected: 0.1,
            weight_clustering: 0.1,
            weight_clustering_ratio: 0.25,
            weight_reciprocity: 0.25,
            weight_giant_fraction: 0.0,
            deviation_saturation: 0.25,
            clustering_saturation: 0.02,
            ratio_saturation: 50.0,
            decision_threshold: 0.5,
        }
    }
}

impl ScoreConfig {
    fn weights(&self) -> [(&'static str, f64); 6] {
        [
            ("weight_deviation_out", self.weight_deviation_out),
            ("weight_deviation_undirected", self.weight_deviation_undirected),
            ("weight_clustering", self.weight_clustering),
            ("weight_clustering_ratio", self.weight_clustering_ratio),
            ("weight_reciprocity", self.weight_reciprocity),
            ("weight_giant_fraction", self.weight_giant_fraction),
        ]
    }

    pub fn validate(&self) -> Result<(), IndicatorError> {
        let mut sum = 0.0;
        for (name, w) in self.weights() {
            if !w.is_finite() || w < 0.0 {
                return Err(IndicatorError::BadConfig(format!(
                    "{name} must be finite and non-negative, got {w}"
                )));
            }
            sum += w;
        }
        if sum <= 0.0 {
            return Err(IndicatorError::BadConfig("weights sum to zero".into()));
        }
        for (name, v) in [
            ("deviation_saturation", self.deviation_saturation),
            ("clustering_saturation", self.clustering_saturation),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(IndicatorError::BadConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.ratio_saturation > 1.0) || !self.ratio_saturation.is_finite() {
            return Err(IndicatorError::BadConfig(format!(
                "ratio_saturation must exceed 1, got {}",
                self.ratio_saturation
            )));
        }
        if !(0.0..=1.0).contains(&self.decision_threshold) {
            return Err(IndicatorError::BadConfig(format!(
                "decision_threshold must lie in [0, 1], got {}",
                self.decision_threshold
            )));
        }
        Ok(())
    }

    /// Renders as `key=value` lines, the same format [`parse`] accepts.
    ///
    /// [`parse`]: ScoreConfig::parse
    pub fn render(&self) -> String {
        format!(
            "weight_deviation_out={}\nweight_deviation_undirected={}\nweight_clustering={}\n\
             weight_clustering_ratio={}\nweight_reciprocity={}\nweight_giant_fraction={}\n\
             deviation_saturation={}\nclustering_saturation={}\nratio_saturation={}\n\
             decision_threshold={}\n",
            self.weight_deviation_out,
            self.weight_deviation_undirected,
            self.weight_clustering,
            self.weight_clustering_ratio,
            self.weight_reciprocity,
            self.weight_giant_fraction,
            self.deviation_saturation,
            self.clustering_saturation,
            self.ratio_saturation,
            self.decision_threshold
        )
    }

    /// Parses `key=value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<ScoreConfig, IndicatorError> {
        let mut cfg = ScoreConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                IndicatorError::BadConfig(format!("line {}: expected key=value", lineno + 1))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                IndicatorError::BadConfig(format!("line {}: bad number {value}", lineno + 1))
            })?;
            let slot = match key.trim() {
                "weight_deviation_out" => &mut cfg.weight_deviation_out,
                "weight_deviation_undirected" => &mut cfg.weight_deviation_undirected,
                "weight_clustering" => &mut cfg.weight_clustering,
                "weight_clustering_ratio" => &mut cfg.weight_clustering_ratio,
                "weight_reciprocity" => &mut cfg.weight_reciprocity,
                "weight_giant_fraction" => &mut cfg.weight_giant_fraction,
                "deviation_saturation" => &mut cfg.deviation_saturation,
                "clustering_saturation" => &mut cfg.clustering_saturation,
                "ratio_saturation" => &mut cfg.ratio_saturation,
                "decision_threshold" => &mut cfg.decision_threshold,
                other => {
                    return Err(IndicatorError::BadConfig(format!(
                        "line {}: unknown key {other}",
                        lineno + 1
                    )))
                }
            };
            *slot = value;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Extracts the feature vector from a directed network. Degenerate degree
/// histograms (a single distinct positive degree, e.g. every sender with an
/// identical fan-out) read as maximal power-law deviation rather than
/// failing: a one-point distribution is as far from scale-free as it gets.
pub fn extract_features(net: &EmailNetwork) -> Result<FeatureVector, IndicatorError> {
    if net.vertex_count() == 0 {
        return Err(MetricsError::EmptyNetwork.into());
    }
    let view = net.undirected_view();
    let clustering = metrics::clustering(&view)?;
    let components = metrics::connected_components(&view)?;
    let reciprocity = metrics::reciprocity(net)?;

    let deviation_of = |hist: &powerlaw::DegreeHistogram| -> Result<f64, IndicatorError> {
        match powerlaw::powerlaw_deviation(hist) {
            Ok(d) => Ok(d),
            Err(FitError::DegenerateHistogram) => Ok(1.0),
            Err(e) => Err(e.into()),
        }
    };
    let out_hist = powerlaw::degree_histogram(net, powerlaw::DegreeFlavor::Out)?;
    let und_hist = powerlaw::degree_histogram_from_view(&view);

    let clustering_vs_random = if clustering.random_baseline > 0.0 {
        clustering.average / clustering.random_baseline
    } else {
        0.0
    };
    Ok(FeatureVector {
        avg_clustering: clustering.average,
        clustering_vs_random,
        powerlaw_deviation_out: deviation_of(&out_hist)?,
        powerlaw_deviation_undirected: deviation_of(&und_hist)?,
        giant_fraction: components.giant_fraction,
        reciprocity,
    })
}

/// Per-feature spamminess transforms, each clamped to [0, 1].
fn spamminess(f: &FeatureVector, cfg: &ScoreConfig) -> [f64; 6] {
    let ratio_term = 1.0
        - (f.clustering_vs_random.max(1.0).ln() / cfg.ratio_saturation.ln()).clamp(0.0, 1.0);
    [
        (f.powerlaw_deviation_out / cfg.deviation_saturation).clamp(0.0, 1.0),
        (f.powerlaw_deviation_undirected / cfg.deviation_saturation).clamp(0.0, 1.0),
        1.0 - (f.avg_clustering / cfg.clustering_saturation).clamp(0.0, 1.0),
        ratio_term,
        1.0 - f.reciprocity.clamp(0.0, 1.0),
        1.0 - f.giant_fraction.clamp(0.0, 1.0),
    ]
}

/// Weighted spam score in [0, 1]; weights are re-normalized, so scaling all
/// of them leaves the score unchanged.
pub fn spam_score(features: &FeatureVector, cfg: &ScoreConfig) -> Result<f64, IndicatorError> {
    cfg.validate()?;
    let parts = spamminess(features, cfg);
    let total: f64 = cfg.weights().iter().map(|(_, w)| w).sum();
    let weighted: f64 = cfg
        .weights()
        .iter()
        .zip(parts)
        .map(|((_, w), s)| w * s)
        .sum();
    Ok(weighted / total)
}

/// Scores a feature vector and applies the decision threshold.
pub fn evaluate(features: &FeatureVector, cfg: &ScoreConfig) -> Result<IndicatorReport, IndicatorError> {
    let score = spam_score(features, cfg)?;
    Ok(IndicatorReport {
        features: *features,
        spam_score: score,
        verdict: if score >= cfg.decision_threshold {
            Verdict::NonSocial
        } else {
            Verdict::Social
        },
        thresholds_used: *cfg,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FeatureComparison {
    pub name: &'static str,
    pub left: f64,
    pub right: f64,
    pub ratio: f64,
    pub difference: f64,
}

fn ratio_of(left: f64, right: f64) -> f64 {
    if left == right {
        1.0
    } else {
        left / right
    }
}

/// Side-by-side feature diff in a fixed order, with left/right ratios.
pub fn compare_features(left: &FeatureVector, right: &FeatureVector) -> Vec<FeatureComparison> {
    let rows: [(&'static str, f64, f64); 6] = [
        ("avg_clustering", left.avg_clustering, right.avg_clustering),
        ("clustering_vs_random", left.clustering_vs_random, right.clustering_vs_random),
        ("powerlaw_deviation_out", left.powerlaw_deviation_out, right.powerlaw_deviation_out),
        (
            "powerlaw_deviation_undirected",
            left.powerlaw_deviation_undirected,
            right.powerlaw_deviation_undirected,
        ),
        ("giant_fraction", left.giant_fraction, right.giant_fraction),
        ("reciprocity", left.reciprocity, right.reciprocity),
    ];
    rows.into_iter()
        .map(|(name, l, r)| FeatureComparison {
            name,
            left: l,
            right: r,
            ratio: ratio_of(l, r),
            difference: l - r,
        })
        .collect()
}
