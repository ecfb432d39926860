//! Reconstruction and structural analysis of email social networks.
//!
//! The pipeline runs in stages: SMTP session logs are parsed and classified
//! into email events ([`ingest`]), events are expanded into per-recipient
//! transmissions and aggregated into deduplicated directed networks
//! ([`graph`]), and the networks are measured with the metrics that separate
//! social from non-social traffic: clustering coefficients, path lengths and
//! component structure ([`metrics`]), degree histograms with discrete
//! power-law fits ([`powerlaw`]). Labeled synthetic traffic for calibration
//! and testing comes from [`synth`], per-network spam indicators from
//! [`indicators`], and machine-readable reports from [`report`].
//!
//! Per-vertex metric kernels are data-parallel via rayon when the `parallel`
//! feature (default) is enabled; every kernel keeps a sequential twin so the
//! two paths can be checked against each other. Results are identical and
//! deterministic under both.

pub mod graph;
pub mod indicators;
pub mod ingest;
pub mod metrics;
pub mod powerlaw;
pub mod report;
pub mod synth;

/// Sizes the global rayon pool; call once at process start. A no-op (other
/// than argument validation) when built without the `parallel` feature.
pub fn configure_thread_pool(threads: Option<usize>) -> Result<(), String> {
    if let Some(0) = threads {
        return Err("thread count must be at least 1".into());
    }
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}
