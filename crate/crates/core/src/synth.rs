//! Seeded generators for labeled synthetic SMTP event streams.
//!
//! The ham model grows a contact graph by preferential attachment with a
//! triadic-closure step (so the graph is both heavy-tailed and clustered),
//! then samples conversations from it with probabilistic replies. The spam
//! model is a set of senders blasting uniformly chosen victims in short
//! bursts, never replied to, with a per-transmission rejection probability.
//! Everything is a pure function of its parameters and seed: identical
//! inputs produce byte-identical streams.

use std::collections::HashSet;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EmailNetwork, TimeWindow};
use crate::ingest::{DeliveryStatus, EmailEvent, MessageLabel};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("fan-out exceeds the target pool")]
    FanOutExceedsPool,
    #[error("input stream {0} is not time-ordered")]
    UnsortedStream(usize),
}

/// Parameters of the social (ham) traffic model.
#[derive(Debug, Clone)]
pub struct HamModelParams {
    pub n_users: usize,
    /// Contacts each newly arriving user attaches to (the growth parameter);
    /// one forces a tree.
    pub attachment_edges: usize,
    /// Probability that a transmission is answered.
    pub reciprocity: f64,
    /// Probability that a new user's contacts get linked to each other,
    /// closing a triangle. Pure preferential attachment clusters vanishingly.
    pub triadic_closure: f64,
    pub events_per_day: u64,
    pub seed: u64,
}

impl Default for HamModelParams {
    fn default() -> Self {
        HamModelParams {
            n_users: 10_000,
            attachment_edges: 2,
            reciprocity: 0.3,
            triadic_closure: 0.1,
            events_per_day: 10_000,
            seed: 42,
        }
    }
}

impl HamModelParams {
    fn validate(&self) -> Result<(), SynthError> {
        if self.attachment_edges < 1 || self.attachment_edges >= self.n_users {
            return Err(SynthError::InvalidParams(
                "attachment_edges must satisfy 1 <= m < n_users".into(),
            ));
        }
        for (name, p) in [
            ("reciprocity", self.reciprocity),
            ("triadic_closure", self.triadic_closure),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::InvalidParams(format!(
                    "{name} must be a probability, got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the bulk (spam) traffic model.
#[derive(Debug, Clone)]
pub struct SpamModelParams {
    pub n_spammers: usize,
    pub targets_per_spammer: usize,
    /// Number of distinct victim addresses targets are drawn from.
    pub target_pool: usize,
    /// Probability a transmission is refused during the command exchange.
    pub rejection_rate: f64,
    pub seed: u64,
}

impl Default for SpamModelParams {
    fn default() -> Self {
        SpamModelParams {
            n_spammers: 200,
            targets_per_spammer: 100,
            target_pool: 20_000,
            rejection_rate: 0.2,
            seed: 43,
        }
    }
}

impl SpamModelParams {
    fn validate(&self) -> Result<(), SynthError> {
        if self.targets_per_spammer < 1 {
            return Err(SynthError::InvalidParams("fan-out must be at least 1".into()));
        }
        if self.targets_per_spammer > self.target_pool {
            return Err(SynthError::FanOutExceedsPool);
        }
        if !(0.0..=1.0).contains(&self.rejection_rate) {
            return Err(SynthError::InvalidParams(format!(
                "rejection_rate must be a probability, got {}",
                self.rejection_rate
            )));
        }
        Ok(())
    }
}

pub fn ham_address(user: u32) -> String {
    format!("u{user}@ham.example")
}

pub fn spam_address(spammer: u32) -> String {
    format!("s{spammer}@spam.example")
}

fn canonical(a: u32, b: u32) -> (u32, u32) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Grows the ham contact graph: each arriving vertex attaches to
/// `attachment_edges` distinct earlier vertices chosen proportionally to
/// degree, and with probability `triadic_closure` two of its contacts get
/// connected too. Edges are ordered (initiator, responder) and unique.
pub fn ham_contact_edges(params: &HamModelParams) -> Result<Vec<(u32, u32)>, SynthError> {
    params.validate()?;
    let n = params.n_users;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n * params.attachment_edges);
    let mut present: HashSet<(u32, u32)> = HashSet::with_capacity(n * params.attachment_edges);
    // Every edge endpoint lands in the pool, so uniform pool draws realize
    // degree-proportional host selection.
    let mut pool: Vec<u32> = Vec::with_capacity(2 * n * params.attachment_edges);
    let mut hosts: Vec<u32> = Vec::with_capacity(params.attachment_edges);

    for v in 1..n as u32 {
        let wanted = params.attachment_edges.min(v as usize);
        hosts.clear();
        let mut attempts = 0;
        while hosts.len() < wanted {
            let candidate = if pool.is_empty() || attempts > 10 * (wanted + 1) {
                // Degenerate early graph or collision streak: scan earlier
                // vertices instead of resampling forever.
                (0..v).find(|c| !hosts.contains(c)).expect("wanted <= v")
            } else {
                pool[rng.random_range(0..pool.len())]
            };
            attempts += 1;
            if !hosts.contains(&candidate) {
                hosts.push(candidate);
            }
        }
        for &h in &hosts {
            edges.push((v, h));
            present.insert(canonical(v, h));
            pool.push(v);
            pool.push(h);
        }
        if wanted >= 2 && rng.random_bool(params.triadic_closure) {
            let i = rng.random_range(0..hosts.len());
            let mut j = rng.random_range(0..hosts.len() - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = (hosts[i], hosts[j]);
            if present.insert(canonical(a, b)) {
                edges.push((a, b));
                pool.push(a);
                pool.push(b);
            }
        }
    }
    Ok(edges)
}

fn event_budget(events_per_day: u64, window: &TimeWindow) -> u64 {
    let duration = window.end - window.start;
    (events_per_day as u128 * duration as u128 / 86_400) as u64
}

/// Generates accepted ham events: conversations sampled from the contact
/// graph, timestamps uniform in the window, replies at the reciprocity
/// probability. Output is time-ordered.
pub fn generate_ham(
    params: &HamModelParams,
    window: TimeWindow,
) -> Result<Vec<EmailEvent>, SynthError> {
    let edges = ham_contact_edges(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x68616d); // distinct stream from growth
    let duration = window.end - window.start;
    let total = event_budget(params.events_per_day, &window);
    let mut events = Vec::with_capacity(total as usize);
    for _ in 0..total {
        let (initiator, responder) = edges[rng.random_range(0..edges.len())];
        let ts = window.start + rng.random_range(0..duration);
        events.push(EmailEvent {
            timestamp: ts,
            sender: ham_address(initiator),
            recipients: vec![ham_address(responder)],
            status: DeliveryStatus::Accepted,
            label: MessageLabel::Ham,
        });
        if rng.random_bool(params.reciprocity) {
            let reply_ts = ts + rng.random_range(0..window.end - ts);
            events.push(EmailEvent {
                timestamp: reply_ts,
                sender: ham_address(responder),
                recipients: vec![ham_address(initiator)],
                status: DeliveryStatus::Accepted,
                label: MessageLabel::Ham,
            });
        }
    }
    events.sort_by_key(|e| e.timestamp);
    Ok(events)
}

/// Generates spam events: every sender blasts its uniformly drawn victims
/// (without replacement) in one short burst somewhere in the window; each
/// transmission is independently rejected at the rejection rate, otherwise
/// it is accepted spam. Nothing is ever replied to. Output is time-ordered.
pub fn generate_spam(
    params: &SpamModelParams,
    window: TimeWindow,
) -> Result<Vec<EmailEvent>, SynthError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x7370616d);
    let duration = window.end - window.start;
    let burst = (duration / 100).max(1).min(duration);
    let mut events = Vec::with_capacity(params.n_spammers * params.targets_per_spammer);
    for s in 0..params.n_spammers as u32 {
        let burst_start = window.start + rng.random_range(0..duration - burst + 1);
        let targets = sample_indices(&mut rng, params.target_pool, params.targets_per_spammer);
        for t in targets {
            let ts = burst_start + rng.random_range(0..burst);
            let rejected = rng.random_bool(params.rejection_rate);
            events.push(EmailEvent {
                timestamp: ts,
                sender: spam_address(s),
                recipients: vec![ham_address(t as u32)],
                status: if rejected {
                    DeliveryStatus::Rejected
                } else {
                    DeliveryStatus::Accepted
                },
                label: if rejected {
                    MessageLabel::Unknown
                } else {
                    MessageLabel::Spam
                },
            });
        }
    }
    events.sort_by_key(|e| e.timestamp);
    Ok(events)
}

/// Seeded Erdos-Renyi instance as an undirected network, via geometric
/// pair skipping so sparse graphs stay cheap. Isolated vertices are kept;
/// baseline comparisons need the full vertex count.
pub fn generate_random(n: usize, edge_probability: f64, seed: u64) -> Result<EmailNetwork, SynthError> {
    if !(edge_probability > 0.0 && edge_probability < 1.0) {
        return Err(SynthError::InvalidParams(format!(
            "edge_probability must lie strictly between 0 and 1, got {edge_probability}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let log_q = (1.0 - edge_probability).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor() as i64;
        w += 1 + skip;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as u32, v as u32));
        }
    }
    let addresses = (0..n).map(|i| format!("u{i}@rand.example")).collect();
    Ok(EmailNetwork::from_undirected_edges(addresses, edges))
}

/// Merges time-ordered streams into one time-ordered stream, breaking
/// timestamp ties by stream index.
pub fn interleave(streams: Vec<Vec<EmailEvent>>) -> Result<Vec<EmailEvent>, SynthError> {
    for (i, s) in streams.iter().enumerate() {
        if s.windows(2).any(|w| w[0].timestamp > w[1].timestamp) {
            return Err(SynthError::UnsortedStream(i));
        }
    }
    let total = streams.iter().map(Vec::len).sum();
    let mut cursors = vec![0usize; streams.len()];
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(u64, usize)>> = streams
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(i, s)| std::cmp::Reverse((s[0].timestamp, i)))
        .collect();
    let mut merged = Vec::with_capacity(total);
    while let Some(std::cmp::Reverse((_, i))) = heap.pop() {
        merged.push(streams[i][cursors[i]].clone());
        cursors[i] += 1;
        if cursors[i] < streams[i].len() {
            heap.push(std::cmp::Reverse((streams[i][cursors[i]].timestamp, i)));
        }
    }
    Ok(merged)
}
