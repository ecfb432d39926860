//! Report assembly: runs the full metric pipeline over an event stream and
//! produces a machine-readable JSON report plus plot-ready CSV tables.
//!
//! Reports are deterministic for fixed inputs, seeds and options: JSON is
//! rendered with sorted keys, sampling is seeded, and every kernel is
//! deterministic regardless of thread count.

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::graph::{EmailNetwork, GraphError, Selector, TimeWindow};
use crate::indicators::{self, IndicatorReport, ScoreConfig};
use crate::ingest::{expand_recipients, EmailEvent};
use crate::metrics::{self, ComponentMode, MetricsError, PathLengthEstimate, PathMode};
use crate::powerlaw::{self, DegreeFlavor, FitMethod, KMinPolicy, PowerLawFit};

pub const SCHEMA_VERSION: u32 = 1;

/// The four standard sub-networks every report tabulates.
pub const STANDARD_SELECTORS: [Selector; 4] = [
    Selector::All,
    Selector::Ham,
    Selector::Spam,
    Selector::RejectedPlusSpam,
];

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("no transmissions in the selected window")]
    NoTransmissions,
    #[error("empty selection: no edges match selector {}", .0.as_str())]
    EmptySelection(Selector),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(
        "exact path length refused: giant component has {size} vertices (limit {limit}); \
         use sampled mode or force the computation"
    )]
    ExactPathsRefused { size: usize, limit: usize },
    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Path-length estimation requested from the analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathsOption {
    Skip,
    Sampled { sources: usize },
    /// All-source BFS; refused on giant components above
    /// [`metrics::EXACT_PATH_VERTEX_LIMIT`] unless forced.
    Exact { force: bool },
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub window: Option<TimeWindow>,
    /// Echo of the window specification the caller used (`all`, `day=3`,
    /// `1234..5678`); reports tag every number with it.
    pub window_spec: String,
    /// Selectors to analyze in depth; stats rows always cover all four.
    pub selectors: Vec<Selector>,
    pub paths: PathsOption,
    pub seed: u64,
    pub score_config: ScoreConfig,
    /// Also hand back the analyzed networks (for serialization).
    pub keep_networks: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            window: None,
            window_spec: "all".into(),
            selectors: vec![Selector::All],
            paths: PathsOption::Sampled { sources: 100 },
            seed: 42,
            score_config: ScoreConfig::default(),
            keep_networks: false,
        }
    }
}

#[derive(Debug, serde::Serialize)]
pub struct NetworkStatsRow {
    pub selector: Selector,
    pub vertices: usize,
    pub edges_directed: usize,
    pub edges_undirected: u64,
    pub mean_degree: f64,
}

#[derive(Debug, serde::Serialize)]
pub struct ClusteringSummary {
    pub average: f64,
    pub random_baseline: f64,
    pub vs_random_ratio: f64,
}

#[derive(Debug, serde::Serialize)]
pub struct ComponentsReport {
    pub mode: ComponentMode,
    pub component_count: usize,
    pub giant_size: usize,
    pub giant_fraction: f64,
    pub second_largest: usize,
}

#[derive(Debug, serde::Serialize)]
pub struct FitOutcome {
    pub flavor: DegreeFlavor,
    pub fit: Option<PowerLawFit>,
    pub error: Option<String>,
}

#[derive(Debug, serde::Serialize)]
pub struct SelectorReport {
    pub selector: Selector,
    pub clustering: ClusteringSummary,
    pub components: Vec<ComponentsReport>,
    pub fits: Vec<FitOutcome>,
    pub paths: Option<PathLengthEstimate>,
    pub indicators: Option<IndicatorReport>,
    pub indicator_error: Option<String>,
}

#[derive(Debug, serde::Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub window_spec: String,
    pub window: Option<TimeWindow>,
    pub seed: u64,
    pub network_stats: Vec<NetworkStatsRow>,
    pub selections: Vec<SelectorReport>,
}

/// A CSV table with the file name the command surface writes it under.
#[derive(Debug, Clone)]
pub struct NamedTable {
    pub file_name: String,
    pub csv: String,
}

#[derive(Debug)]
pub struct AnalysisOutput {
    pub report: AnalysisReport,
    pub tables: Vec<NamedTable>,
    /// Analyzed networks per selector; empty unless requested.
    pub networks: Vec<(Selector, EmailNetwork)>,
}

fn stats_row(selector: Selector, net: &EmailNetwork) -> NetworkStatsRow {
    NetworkStatsRow {
        selector,
        vertices: net.vertex_count(),
        edges_directed: net.edge_count(),
        edges_undirected: net.undirected_edge_count(),
        mean_degree: net.mean_degree().unwrap_or(0.0),
    }
}

fn degree_csv(hist: &powerlaw::DegreeHistogram) -> String {
    let mut out = String::from("k,count,fraction\n");
    for row in &hist.rows {
        out.push_str(&format!("{},{},{}\n", row.degree, row.count, row.fraction));
    }
    out
}

fn component_sizes_csv(summaries: &[&metrics::ComponentSummary]) -> String {
    let mut out = String::from("mode,size,fraction\n");
    for summary in summaries {
        let mode = match summary.mode {
            ComponentMode::UndirectedConnected => "undirected_connected",
            ComponentMode::DirectedStrong => "directed_strong",
        };
        for (size, fraction) in metrics::component_size_histogram(summary) {
            out.push_str(&format!("{mode},{size},{fraction}\n"));
        }
    }
    out
}

fn fit_outcome(flavor: DegreeFlavor, hist: &powerlaw::DegreeHistogram) -> FitOutcome {
    match powerlaw::fit_power_law(hist, FitMethod::Mle, KMinPolicy::Scan) {
        Ok(fit) => FitOutcome { flavor, fit: Some(fit), error: None },
        Err(e) => FitOutcome { flavor, fit: None, error: Some(e.to_string()) },
    }
}

/// Runs the full analysis over an event stream: builds the deduplicated
/// network for the window, tabulates the four standard sub-networks, and
/// computes clustering, components, degree fits, optional path lengths and
/// the spam indicators for each requested selector.
pub fn analyze_events(
    events: &[EmailEvent],
    opts: &AnalyzeOptions,
) -> Result<AnalysisOutput, AnalyzeError> {
    let full = EmailNetwork::from_transmissions(
        events.iter().flat_map(expand_recipients),
        opts.window,
    );
    if full.vertex_count() == 0 {
        return Err(AnalyzeError::NoTransmissions);
    }

    let mut network_stats = Vec::new();
    for selector in STANDARD_SELECTORS {
        let sub;
        let net = if selector == Selector::All {
            &full
        } else {
            sub = full.subnetwork(selector);
            &sub
        };
        network_stats.push(stats_row(selector, net));
    }

    let mut selections = Vec::new();
    let mut tables = Vec::new();
    let mut networks = Vec::new();
    for &selector in &opts.selectors {
        let sub;
        let net = if selector == Selector::All {
            &full
        } else {
            sub = full.subnetwork(selector);
            &sub
        };
        if net.vertex_count() == 0 {
            return Err(AnalyzeError::EmptySelection(selector));
        }
        let view = net.undirected_view();

        let clustering = metrics::clustering(&view)?;
        let connected = metrics::connected_components(&view)?;
        let strong = metrics::strongly_connected_components(net)?;

        let und_hist = powerlaw::degree_histogram_from_view(&view);
        let out_hist = powerlaw::degree_histogram(net, DegreeFlavor::Out)
            .expect("directed network has out-degrees");
        let in_hist = powerlaw::degree_histogram(net, DegreeFlavor::In)
            .expect("directed network has in-degrees");

        let paths = match opts.paths {
            PathsOption::Skip => None,
            PathsOption::Sampled { sources } => Some(metrics::average_path_length(
                &view,
                PathMode::Sampled { sources, seed: opts.seed },
            )?),
            PathsOption::Exact { force } => {
                let size = connected.giant_size();
                if !force && size > metrics::EXACT_PATH_VERTEX_LIMIT {
                    return Err(AnalyzeError::ExactPathsRefused {
                        size,
                        limit: metrics::EXACT_PATH_VERTEX_LIMIT,
                    });
                }
                Some(metrics::average_path_length(&view, PathMode::Exact)?)
            }
        };

        let (indicator_report, indicator_error) =
            match indicators::extract_features(net)
                .and_then(|f| indicators::evaluate(&f, &opts.score_config))
            {
                Ok(report) => (Some(report), None),
                Err(e) => (None, Some(e.to_string())),
            };

        let name = selector.as_str();
        tables.push(NamedTable {
            file_name: format!("{name}_undirected_degree.csv"),
            csv: degree_csv(&und_hist),
        });
        tables.push(NamedTable {
            file_name: format!("{name}_in_degree.csv"),
            csv: degree_csv(&in_hist),
        });
        tables.push(NamedTable {
            file_name: format!("{name}_out_degree.csv"),
            csv: degree_csv(&out_hist),
        });
        tables.push(NamedTable {
            file_name: format!("{name}_scc_sizes.csv"),
            csv: component_sizes_csv(&[&strong, &connected]),
        });

        selections.push(SelectorReport {
            selector,
            clustering: ClusteringSummary {
                average: clustering.average,
                random_baseline: clustering.random_baseline,
                vs_random_ratio: if clustering.random_baseline > 0.0 {
                    clustering.average / clustering.random_baseline
                } else {
                    0.0
                },
            },
            components: vec![
                ComponentsReport {
                    mode: ComponentMode::UndirectedConnected,
                    component_count: connected.component_count(),
                    giant_size: connected.giant_size(),
                    giant_fraction: connected.giant_fraction,
                    second_largest: connected.second_largest,
                },
                ComponentsReport {
                    mode: ComponentMode::DirectedStrong,
                    component_count: strong.component_count(),
                    giant_size: strong.giant_size(),
                    giant_fraction: strong.giant_fraction,
                    second_largest: strong.second_largest,
                },
            ],
            fits: vec![
                fit_outcome(DegreeFlavor::Undirected, &und_hist),
                fit_outcome(DegreeFlavor::In, &in_hist),
                fit_outcome(DegreeFlavor::Out, &out_hist),
            ],
            paths,
            indicators: indicator_report,
            indicator_error,
        });
        if opts.keep_networks {
            networks.push((selector, net.clone()));
        }
    }

    Ok(AnalysisOutput {
        report: AnalysisReport {
            schema_version: SCHEMA_VERSION,
            window_spec: opts.window_spec.clone(),
            window: opts.window,
            seed: opts.seed,
            network_stats,
            selections,
        },
        tables,
        networks,
    })
}

/// Renders JSON with sorted object keys and a trailing newline, byte-stable
/// for identical reports.
pub fn to_sorted_json<T: serde::Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let value = serde_json::to_value(value)?;
    let mut out = serde_json::to_string_pretty(&value)?;
    out.push('\n');
    Ok(out)
}

/// Writes via a temporary file in the same directory plus an atomic rename,
/// so readers never observe a half-written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp = file_name.to_os_string();
    tmp.push(".tmp");
    let tmp_path = match parent {
        Some(p) => p.join(tmp),
        None => std::path::PathBuf::from(tmp),
    };
    std::fs::write(&tmp_path, contents)?;
    std::fs::rename(&tmp_path, path)
}

/// Flattens every numeric leaf of a JSON value into dotted-path keys, the
/// basis of report comparison.
pub fn flatten_numbers(value: &serde_json::Value) -> Vec<(String, f64)> {
    fn walk(prefix: &str, value: &serde_json::Value, out: &mut Vec<(String, f64)>) {
        match value {
            serde_json::Value::Number(n) => {
                if let Some(f) = n.as_f64() {
                    out.push((prefix.to_string(), f));
                }
            }
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, out);
                }
            }
            serde_json::Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    // Prefer a self-describing tag over the array index when
                    // the element carries one.
                    let tag = v
                        .get("selector")
                        .or_else(|| v.get("mode"))
                        .or_else(|| v.get("flavor"))
                        .and_then(|t| t.as_str())
                        .map(str::to_string)
                        .unwrap_or_else(|| i.to_string());
                    walk(&format!("{prefix}.{tag}"), v, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

/// Parses a degree CSV back into (degree, count, fraction) rows; exists so
/// emitted tables can be checked loss-free against the in-memory histogram.
pub fn parse_degree_csv(csv: &str) -> Option<Vec<(u64, u64, f64)>> {
    let mut lines = csv.lines();
    if lines.next()? != "k,count,fraction" {
        return None;
    }
    let mut rows = Vec::new();
    for line in lines {
        let mut f = line.split(',');
        let degree = f.next()?.parse().ok()?;
        let count = f.next()?.parse().ok()?;
        let fraction = f.next()?.parse().ok()?;
        if f.next().is_some() {
            return None;
        }
        rows.push((degree, count, fraction));
    }
    Some(rows)
}
