//! Degree histograms and discrete power-law fitting.
//!
//! The primary fit is the discrete maximum-likelihood estimator with a
//! zeta-normalized model on `k >= k_min`, scored by the Kolmogorov-Smirnov
//! distance between the empirical and fitted tail CDFs. The lower cutoff is
//! either fixed or chosen by scanning distinct degrees for the smallest KS
//! distance. A least-squares fit on logarithmically binned fractions is kept
//! as a cross-check method. The KS distance doubles as the network's
//! "distance from scale-free" score.

use thiserror::Error;

use crate::graph::{EmailNetwork, UndirectedView};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("in/out degree histograms require a directed network")]
    RequiresDirected,
    #[error("operation undefined on an empty network")]
    EmptyNetwork,
    #[error("histogram has no tail with at least two distinct positive degrees")]
    DegenerateHistogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeFlavor {
    Undirected,
    In,
    Out,
}

impl DegreeFlavor {
    pub fn as_str(self) -> &'static str {
        match self {
            DegreeFlavor::Undirected => "undirected",
            DegreeFlavor::In => "in",
            DegreeFlavor::Out => "out",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HistogramRow {
    pub degree: u64,
    pub count: u64,
    pub fraction: f64,
}

/// Degree-to-count table, sorted by degree; fractions are counts over the
/// vertex total. Degree-0 rows are kept (directed flavors produce them) but
/// never enter a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeHistogram {
    pub flavor: DegreeFlavor,
    pub rows: Vec<HistogramRow>,
    pub total_vertices: u64,
}

impl DegreeHistogram {
    /// Builds a histogram from one degree value per vertex.
    pub fn from_degrees<I>(flavor: DegreeFlavor, degrees: I) -> DegreeHistogram
    where
        I: IntoIterator<Item = u64>,
    {
        let mut counts: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
        let mut total = 0u64;
        for d in degrees {
            *counts.entry(d).or_insert(0) += 1;
            total += 1;
        }
        Self::from_sorted_counts(flavor, counts.into_iter().collect(), total)
    }

    /// Builds a histogram from (degree, count) pairs; degrees need not be
    /// sorted or unique.
    pub fn from_counts(flavor: DegreeFlavor, pairs: &[(u64, u64)]) -> DegreeHistogram {
        let mut counts: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
        let mut total = 0u64;
        for &(d, c) in pairs {
            *counts.entry(d).or_insert(0) += c;
            total += c;
        }
        Self::from_sorted_counts(flavor, counts.into_iter().collect(), total)
    }

    fn from_sorted_counts(
        flavor: DegreeFlavor,
        counts: Vec<(u64, u64)>,
        total: u64,
    ) -> DegreeHistogram {
        let rows = counts
            .into_iter()
            .map(|(degree, count)| HistogramRow {
                degree,
                count,
                fraction: count as f64 / total as f64,
            })
            .collect();
        DegreeHistogram {
            flavor,
            rows,
            total_vertices: total,
        }
    }
}

/// Degree histogram of a network. In/out flavors need a directed network;
/// the undirected flavor follows the self-loop-adds-two convention.
pub fn degree_histogram(
    net: &EmailNetwork,
    flavor: DegreeFlavor,
) -> Result<DegreeHistogram, FitError> {
    if net.vertex_count() == 0 {
        return Err(FitError::EmptyNetwork);
    }
    match flavor {
        DegreeFlavor::Undirected => Ok(degree_histogram_from_view(&net.undirected_view())),
        DegreeFlavor::In | DegreeFlavor::Out => {
            if !net.directed() {
                return Err(FitError::RequiresDirected);
            }
            let n = net.vertex_count();
            let mut degrees = vec![0u64; n];
            if flavor == DegreeFlavor::Out {
                for v in 0..n as u32 {
                    degrees[v as usize] = net.out_edges(v).len() as u64;
                }
            } else {
                for e in net.edges() {
                    degrees[e.dst as usize] += 1;
                }
            }
            Ok(DegreeHistogram::from_degrees(flavor, degrees))
        }
    }
}

/// Undirected degree histogram from an existing view, sparing a rebuild.
pub fn degree_histogram_from_view(view: &UndirectedView) -> DegreeHistogram {
    DegreeHistogram::from_degrees(
        DegreeFlavor::Undirected,
        (0..view.vertex_count() as u32).map(|v| view.degree(v)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Mle,
    LogbinLs,
}

#[derive(Debug, Clone, Copy)]
pub enum KMinPolicy {
    Fixed(u64),
    Scan,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PowerLawFit {
    /// Fitted exponent of `n(k)` proportional to `k^-gamma`.
    pub gamma: f64,
    pub k_min: u64,
    /// Kolmogorov-Smirnov distance between empirical and fitted tail CDFs.
    pub ks_statistic: f64,
    /// Fraction of all vertices with degree at least `k_min`.
    pub tail_fraction: f64,
    pub method: FitMethod,
}

const GAMMA_MIN: f64 = 1.01;
const GAMMA_MAX: f64 = 20.0;
/// Cutoff candidates must keep at least this many tail observations, unless
/// the histogram is too small to afford it; tiny tails fit anything.
const SCAN_MIN_TAIL_COUNT: u64 = 10;
const LOGBIN_FIT_BINS_PER_DECADE: u32 = 10;

/// Hurwitz zeta, the sum over `i >= a` of `i^-s`, for `s > 1`. Direct
/// summation of the first terms plus an Euler-Maclaurin tail.
fn hurwitz_zeta(s: f64, a: u64) -> f64 {
    debug_assert!(s > 1.0 && a >= 1);
    const DIRECT_TERMS: u64 = 60;
    let mut sum = 0.0f64;
    for i in a..a + DIRECT_TERMS {
        sum += (i as f64).powf(-s);
    }
    let b = (a + DIRECT_TERMS) as f64;
    sum + b.powf(1.0 - s) / (s - 1.0) + 0.5 * b.powf(-s) + s * b.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * b.powf(-s - 3.0) / 720.0
}

/// Tail of a histogram at a cutoff: distinct degrees with counts.
struct Tail<'a> {
    rows: &'a [HistogramRow],
    k_min: u64,
    total: u64,
    weighted_ln_sum: f64,
}

impl<'a> Tail<'a> {
    fn at(hist: &'a DegreeHistogram, k_min: u64) -> Option<Tail<'a>> {
        let start = hist.rows.partition_point(|r| r.degree < k_min.max(1));
        let rows = &hist.rows[start..];
        if rows.len() < 2 {
            return None;
        }
        let total = rows.iter().map(|r| r.count).sum();
        let weighted_ln_sum = rows
            .iter()
            .map(|r| r.count as f64 * (r.degree as f64).ln())
            .sum();
        Some(Tail {
            rows,
            k_min: rows[0].degree.min(k_min.max(1)),
            total,
            weighted_ln_sum,
        })
    }

    /// Exponent maximizing the zeta-normalized discrete likelihood, found by
    /// golden-section search; the negative log-likelihood is unimodal in the
    /// exponent.
    fn mle_gamma(&self) -> f64 {
        let neg_log_lik = |gamma: f64| {
            self.total as f64 * hurwitz_zeta(gamma, self.k_min).ln()
                + gamma * self.weighted_ln_sum
        };
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (GAMMA_MIN, GAMMA_MAX);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = neg_log_lik(x1);
        let mut f2 = neg_log_lik(x2);
        for _ in 0..80 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = neg_log_lik(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = neg_log_lik(x2);
            }
        }
        (lo + hi) / 2.0
    }

    /// KS distance between the empirical tail CDF and the fitted model CDF,
    /// evaluated at the observed degrees.
    fn ks_distance(&self, gamma: f64) -> f64 {
        let z_min = hurwitz_zeta(gamma, self.k_min);
        let mut cumulative = 0u64;
        let mut worst = 0.0f64;
        for row in self.rows {
            cumulative += row.count;
            let empirical = cumulative as f64 / self.total as f64;
            let model = 1.0 - hurwitz_zeta(gamma, row.degree + 1) / z_min;
            worst = worst.max((empirical - model).abs());
        }
        worst
    }

    /// Exponent from a least-squares line through the log-binned
    /// (log degree, log mean fraction) points; needs two bins.
    fn logbin_gamma(&self, hist: &DegreeHistogram) -> Option<f64> {
        let tail_hist = DegreeHistogram::from_counts(
            hist.flavor,
            &self
                .rows
                .iter()
                .map(|r| (r.degree, r.count))
                .collect::<Vec<_>>(),
        );
        let points = log_bin(&tail_hist, LOGBIN_FIT_BINS_PER_DECADE);
        if points.len() < 2 {
            return None;
        }
        let n = points.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &(center, fraction) in &points {
            let (x, y) = (center.ln(), fraction.ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-12 {
            return None;
        }
        let slope = (n * sxy - sx * sy) / denom;
        Some((-slope).clamp(GAMMA_MIN, GAMMA_MAX))
    }
}

fn fit_at(hist: &DegreeHistogram, k_min: u64, method: FitMethod) -> Option<PowerLawFit> {
    let tail = Tail::at(hist, k_min)?;
    let gamma = match method {
        FitMethod::Mle => tail.mle_gamma(),
        FitMethod::LogbinLs => tail.logbin_gamma(hist)?,
    };
    Some(PowerLawFit {
        gamma,
        k_min: tail.k_min,
        ks_statistic: tail.ks_distance(gamma),
        tail_fraction: tail.total as f64 / hist.total_vertices as f64,
        method,
    })
}

/// Fits a discrete power law to the positive-degree tail of a histogram.
/// The scan policy tries every distinct degree as the cutoff, keeps
/// candidates whose tail retains enough observations, and returns the fit
/// with the smallest KS distance (ties to the smaller cutoff).
pub fn fit_power_law(
    hist: &DegreeHistogram,
    method: FitMethod,
    policy: KMinPolicy,
) -> Result<PowerLawFit, FitError> {
    match policy {
        KMinPolicy::Fixed(k) => fit_at(hist, k, method).ok_or(FitError::DegenerateHistogram),
        KMinPolicy::Scan => {
            let candidates: Vec<u64> = hist
                .rows
                .iter()
                .filter(|r| r.degree >= 1)
                .map(|r| r.degree)
                .collect();
            let fits = |floor: u64| -> Vec<PowerLawFit> {
                let eligible: Vec<u64> = candidates
                    .iter()
                    .copied()
                    .filter(|&k| {
                        Tail::at(hist, k).is_some_and(|t| t.total >= floor)
                    })
                    .collect();
                #[cfg(feature = "parallel")]
                {
                    use rayon::prelude::*;
                    eligible
                        .par_iter()
                        .filter_map(|&k| fit_at(hist, k, method))
                        .collect()
                }
                #[cfg(not(feature = "parallel"))]
                eligible
                    .iter()
                    .filter_map(|&k| fit_at(hist, k, method))
                    .collect()
            };
            let mut results = fits(SCAN_MIN_TAIL_COUNT);
            if results.is_empty() {
                results = fits(0);
            }
            results
                .into_iter()
                .min_by(|a, b| {
                    a.ks_statistic
                        .total_cmp(&b.ks_statistic)
                        .then(a.k_min.cmp(&b.k_min))
                })
                .ok_or(FitError::DegenerateHistogram)
        }
    }
}

/// How far the histogram is from its best scale-free fit: the KS distance
/// of the scan-selected maximum-likelihood fit.
pub fn powerlaw_deviation(hist: &DegreeHistogram) -> Result<f64, FitError> {
    fit_power_law(hist, FitMethod::Mle, KMinPolicy::Scan).map(|f| f.ks_statistic)
}

fn bin_index(k: u64, bins_per_decade: u32) -> i64 {
    ((k as f64).log10() * bins_per_decade as f64 + 1e-12).floor() as i64
}

/// Geometric binning of the positive-degree rows for log-log plotting:
/// returns (bin center, mean fraction over the integer degrees in the bin),
/// omitting empty bins. The center is the geometric mean of the integers
/// the bin actually covers, so sparsely populated low-degree bins sit on
/// their degree instead of an idealized continuous midpoint.
pub fn log_bin(hist: &DegreeHistogram, bins_per_decade: u32) -> Vec<(f64, f64)> {
    assert!(bins_per_decade >= 1, "bins_per_decade must be at least 1");
    let mut bins: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    for row in &hist.rows {
        if row.degree == 0 {
            continue;
        }
        *bins.entry(bin_index(row.degree, bins_per_decade)).or_insert(0.0) += row.fraction;
    }
    // Monotone bin index; bisect for the first integer in each bin.
    let first_at_least = |target: i64| -> u64 {
        let (mut lo, mut hi) = (1u64, 1u64);
        while bin_index(hi, bins_per_decade) < target {
            hi *= 2;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if bin_index(mid, bins_per_decade) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    };
    bins.into_iter()
        .map(|(j, fraction_sum)| {
            let lo = first_at_least(j);
            let hi = first_at_least(j + 1);
            let center = ((lo as f64) * (hi - 1) as f64).sqrt();
            (center, fraction_sum / (hi - lo) as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EmailNetwork;
    use crate::ingest::{DeliveryStatus, MessageLabel, Transmission};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ham(s: &str, r: &str) -> Transmission {
        Transmission {
            sender: s.into(),
            recipient: r.into(),
            timestamp: 0,
            status: DeliveryStatus::Accepted,
            label: MessageLabel::Ham,
        }
    }

    /// Independent sampling oracle: inverse-CDF draws from a truncated
    /// discrete power law, normalized by direct summation.
    fn sample_power_law(gamma: f64, k_min: u64, n: usize, seed: u64) -> Vec<u64> {
        const CUTOFF: u64 = 200_000;
        let weights: Vec<f64> = (k_min..=CUTOFF).map(|k| (k as f64).powf(-gamma)).collect();
        let total: f64 = weights.iter().sum();
        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w / total;
            cdf.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let idx = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
                k_min + idx as u64
            })
            .collect()
    }

    #[test]
    fn histogram_triangle_undirected() {
        let net = EmailNetwork::from_transmissions(
            vec![ham("a", "b"), ham("b", "c"), ham("c", "a")],
            None,
        );
        let hist = degree_histogram(&net, DegreeFlavor::Undirected).unwrap();
        assert_eq!(hist.rows.len(), 1);
        assert_eq!(hist.rows[0], HistogramRow { degree: 2, count: 3, fraction: 1.0 });
    }

    #[test]
    fn histogram_directed_star() {
        let net = EmailNetwork::from_transmissions(
            vec![ham("hub", "a"), ham("hub", "b"), ham("hub", "c")],
            None,
        );
        let out = degree_histogram(&net, DegreeFlavor::Out).unwrap();
        assert_eq!(
            out.rows,
            vec![
                HistogramRow { degree: 0, count: 3, fraction: 0.75 },
                HistogramRow { degree: 3, count: 1, fraction: 0.25 },
            ]
        );
        let incoming = degree_histogram(&net, DegreeFlavor::In).unwrap();
        assert_eq!(
            incoming.rows,
            vec![
                HistogramRow { degree: 0, count: 1, fraction: 0.25 },
                HistogramRow { degree: 1, count: 3, fraction: 0.75 },
            ]
        );
    }

    #[test]
    fn histogram_counts_self_loop_per_convention() {
        let net = EmailNetwork::from_transmissions(vec![ham("a", "a"), ham("a", "b")], None);
        let und = degree_histogram(&net, DegreeFlavor::Undirected).unwrap();
        // Vertex a: loop (2) plus b (1); vertex b: 1.
        assert_eq!(
            und.rows,
            vec![
                HistogramRow { degree: 1, count: 1, fraction: 0.5 },
                HistogramRow { degree: 3, count: 1, fraction: 0.5 },
            ]
        );
        let out = degree_histogram(&net, DegreeFlavor::Out).unwrap();
        assert_eq!(out.rows[1], HistogramRow { degree: 2, count: 1, fraction: 0.5 });
    }

    #[test]
    fn histogram_flavor_mismatch_errors() {
        let net = crate::synth::generate_random(10, 0.5, 1).unwrap();
        assert!(matches!(
            degree_histogram(&net, DegreeFlavor::Out),
            Err(FitError::RequiresDirected)
        ));
        assert!(degree_histogram(&net, DegreeFlavor::Undirected).is_ok());
    }

    #[test]
    fn histogram_fractions_sum_to_one() {
        let degrees = (0..500u64).map(|i| i % 17);
        let hist = DegreeHistogram::from_degrees(DegreeFlavor::Undirected, degrees);
        let sum: f64 = hist.rows.iter().map(|r| r.fraction).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let total: u64 = hist.rows.iter().map(|r| r.count).sum();
        assert_eq!(total, hist.total_vertices);
    }

    #[test]
    fn fit_recovers_exponent_from_oracle_samples() {
        let samples = sample_power_law(2.4, 1, 30_000, 7);
        let hist = DegreeHistogram::from_degrees(DegreeFlavor::Undirected, samples);
        let fit = fit_power_law(&hist, FitMethod::Mle, KMinPolicy::Scan).unwrap();
        assert!(
            (2.25..=2.55).contains(&fit.gamma),
            "fitted gamma {} out of range",
            fit.gamma
        );
        assert!(fit.ks_statistic < 0.03, "ks {}", fit.ks_statistic);
    }

    #[test]
    fn fit_fixed_cutoff_respects_policy() {
        let samples = sample_power_law(2.4, 3, 20_000, 8);
        let hist = DegreeHistogram::from_degrees(DegreeFlavor::Undirected, samples);
        let fit = fit_power_law(&hist, FitMethod::Mle, KMinPolicy::Fixed(3)).unwrap();
        assert_eq!(fit.k_min, 3);
        assert!((2.2..=2.6).contains(&fit.gamma), "gamma {}", fit.gamma);
    }

    #[test]
    fn fit_consistency_improves_with_sample_size() {
        let err = |n: usize| {
            let samples = sample_power_law(2.4, 1, n, 21);
            let hist = DegreeHistogram::from_degrees(DegreeFlavor::Undirected, samples);
            let fit = fit_power_law(&hist, FitMethod::Mle, KMinPolicy::Fixed(1)).unwrap();
            (fit.gamma - 2.4).abs()
        };
        assert!(err(50_000) <= err(1_000) + 0.02);
    }

    #[test]
    fn fit_rejects_constant_degree_histogram() {
        let hist = DegreeHistogram::from_degrees(DegreeFlavor::Undirected, vec![4u64; 100]);
        assert!(matches!(
            fit_power_law(&hist, FitMethod::Mle, KMinPolicy::Scan),
            Err(FitError::DegenerateHistogram)
        ));
    }

    #[test]
    fn fit_is_scale_invariant_in_counts() {
        let base: Vec<(u64, u64)> = (1..60u64).map(|k| (k, 1 + 6000 / (k * k))).collect();
        let scaled: Vec<(u64, u64)> = base.iter().map(|&(k, c)| (k, c * 7)).collect();
        let h1 = DegreeHistogram::from_counts(DegreeFlavor::Undirected, &base);
        let h2 = DegreeHistogram::from_counts(DegreeFlavor::Undirected, &scaled);
        let f1 = fit_power_law(&h1, FitMethod::Mle, KMinPolicy::Scan).unwrap();
        let f2 = fit_power_law(&h2, FitMethod::Mle, KMinPolicy::Scan).unwrap();
        assert_eq!(f1.gamma, f2.gamma);
        assert_eq!(f1.ks_statistic, f2.ks_statistic);
        assert_eq!(f1.k_min, f2.k_min);
    }

    #[test]
    fn deviation_two_point_histogram_is_finite() {
        let hist =
            DegreeHistogram::from_counts(DegreeFlavor::Undirected, &[(1, 5), (2, 5)]);
        let dev = powerlaw_deviation(&hist).unwrap();
        assert!(dev.is_finite());
        assert!((0.0..=1.0).contains(&dev));
    }

    #[test]
    fn geometric_tail_scores_worse_than_power_law() {
        let n = 30_000usize;
        let power = sample_power_law(2.4, 1, n, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let geometric: Vec<u64> = (0..n)
            .map(|_| {
                let mut k = 1u64;
                while rng.random::<f64>() > 0.25 {
                    k += 1;
                }
                k
            })
            .collect();
        let dev_power = powerlaw_deviation(&DegreeHistogram::from_degrees(
            DegreeFlavor::Undirected,
            power,
        ))
        .unwrap();
        let dev_geom = powerlaw_deviation(&DegreeHistogram::from_degrees(
            DegreeFlavor::Undirected,
            geometric,
        ))
        .unwrap();
        assert!(
            dev_geom > dev_power,
            "geometric {dev_geom} should exceed power {dev_power}"
        );
    }

    #[test]
    fn logbin_method_agrees_on_clean_data() {
        let rows: Vec<(u64, u64)> = (1..=300u64)
            .map(|k| (k, ((k as f64).powf(-2.4) * 1e7) as u64))
            .filter(|&(_, c)| c > 0)
            .collect();
        let hist = DegreeHistogram::from_counts(DegreeFlavor::Undirected, &rows);
        let ls = fit_power_law(&hist, FitMethod::LogbinLs, KMinPolicy::Fixed(1)).unwrap();
        assert!((ls.gamma - 2.4).abs() < 0.15, "ls gamma {}", ls.gamma);
    }

    #[test]
    fn log_bin_single_row() {
        let hist = DegreeHistogram::from_counts(DegreeFlavor::Undirected, &[(5, 10)]);
        let bins = log_bin(&hist, 10);
        assert_eq!(bins.len(), 1);
        assert!(bins[0].1 > 0.0 && bins[0].1 <= 1.0);
        // Degrees 4 and 5 share the bin; its center is their geometric mean.
        assert!((bins[0].0 - 20.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn log_bin_uniform_decade_is_monotone() {
        let rows: Vec<(u64, u64)> = (1..=10u64).map(|k| (k, 10)).collect();
        let hist = DegreeHistogram::from_counts(DegreeFlavor::Undirected, &rows);
        let bins = log_bin(&hist, 5);
        assert!(bins.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(bins.first().unwrap().0 >= 1.0);
        // The last bin holds degree 10, centered at 10^1.1.
        assert!(bins.last().unwrap().0 <= 16.0);
    }

    #[test]
    fn log_bin_power_law_is_collinear() {
        // Rounded counts, ending on a bin boundary (10^3.3) so the last bin
        // is fully populated.
        let rows: Vec<(u64, u64)> = (1..=1995u64)
            .map(|k| (k, ((k as f64).powf(-2.4) * 1e9).round() as u64))
            .filter(|&(_, c)| c > 0)
            .collect();
        let hist = DegreeHistogram::from_counts(DegreeFlavor::Undirected, &rows);
        let bins = log_bin(&hist, 10);
        assert!(bins.len() > 10);
        // Least-squares line in log-log space; residuals stay small when
        // the points are collinear.
        let points: Vec<(f64, f64)> = bins.iter().map(|&(c, f)| (c.ln(), f.ln())).collect();
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        let max_residual = points
            .iter()
            .map(|&(x, y)| (y - (slope * x + intercept)).abs())
            .fold(0.0f64, f64::max);
        assert!(max_residual < 0.1, "max residual {max_residual}");
        assert!((slope + 2.4).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn zeta_matches_reference_values() {
        // Riemann zeta at 2 and 4 in closed form.
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta(2.0, 1) - pi * pi / 6.0).abs() < 1e-10);
        assert!((hurwitz_zeta(4.0, 1) - pi.powi(4) / 90.0).abs() < 1e-10);
        // Tabulated zeta(3/2).
        assert!((hurwitz_zeta(1.5, 1) - 2.612_375_348_685_488).abs() < 1e-9);
    }

    #[test]
    fn zeta_shift_identity() {
        // Dropping the first term advances the offset by one.
        for (s, a) in [(1.2, 1u64), (2.4, 1), (2.4, 7), (5.0, 3), (1.01, 2)] {
            let lhs = hurwitz_zeta(s, a) - (a as f64).powf(-s);
            let rhs = hurwitz_zeta(s, a + 1);
            assert!(
                (lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0),
                "shift at ({s},{a}): {lhs} vs {rhs}"
            );
        }
    }
}
