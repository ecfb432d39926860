//! Deduplicated directed email networks and their undirected views.
//!
//! A network holds one edge per ordered (sender, recipient) pair no matter
//! how many transmissions it saw; the edge carries the union of transmission
//! labels and the first-seen timestamp. Vertices are dense integer ids
//! assigned at build time, with a side table back to the address tokens.
//! After construction a network is immutable and safe to share across
//! threads.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::ingest::{DeliveryStatus, MessageLabel, Transmission};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("operation undefined on an empty network")]
    EmptyNetwork,
    #[error("cannot merge networks of mixed directedness")]
    MixedDirectedness,
    #[error("time window start must precede end")]
    BadWindow,
    #[error("malformed network file: {0}")]
    MalformedFile(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Set of traffic classes observed on an edge, stored as a bitmask
/// (bit 0 ham, bit 1 spam, bit 2 rejected).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelSet(u8);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);
    pub const HAM: LabelSet = LabelSet(1);
    pub const SPAM: LabelSet = LabelSet(1 << 1);
    pub const REJECTED: LabelSet = LabelSet(1 << 2);
    pub const ALL: LabelSet = LabelSet(0b111);

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn from_bits(bits: u8) -> Option<LabelSet> {
        (bits & !Self::ALL.0 == 0).then_some(LabelSet(bits))
    }

    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    pub fn intersects(self, other: LabelSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn contains(self, other: LabelSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// Sub-network selector: which edge labels to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    All,
    Ham,
    Spam,
    RejectedPlusSpam,
}

impl Selector {
    pub fn label_set(self) -> LabelSet {
        match self {
            Selector::All => LabelSet::ALL,
            Selector::Ham => LabelSet::HAM,
            Selector::Spam => LabelSet::SPAM,
            Selector::RejectedPlusSpam => LabelSet::SPAM.union(LabelSet::REJECTED),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Selector::All => "all",
            Selector::Ham => "ham",
            Selector::Spam => "spam",
            Selector::RejectedPlusSpam => "rejected_plus_spam",
        }
    }

    pub fn parse(s: &str) -> Option<Selector> {
        match s {
            "all" => Some(Selector::All),
            "ham" => Some(Selector::Ham),
            "spam" => Some(Selector::Spam),
            "rejected_plus_spam" => Some(Selector::RejectedPlusSpam),
            _ => None,
        }
    }
}

/// Half-open interval of epoch seconds: `start` inclusive, `end` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct TimeWindow {
    pub start: u64,
    pub end: u64,
}

impl TimeWindow {
    pub fn new(start: u64, end: u64) -> Result<TimeWindow, GraphError> {
        if start < end {
            Ok(TimeWindow { start, end })
        } else {
            Err(GraphError::BadWindow)
        }
    }

    pub fn contains(&self, ts: u64) -> bool {
        self.start <= ts && ts < self.end
    }
}

/// One deduplicated directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub labels: LabelSet,
    pub first_seen: u64,
}

/// Deduplicated email network. `directed == false` marks networks whose
/// edges are inherently unordered (stored canonically with `src <= dst`),
/// e.g. random baselines; transmissions always build directed networks.
#[derive(Debug, Clone)]
pub struct EmailNetwork {
    directed: bool,
    addresses: Vec<String>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    transmissions_seen: u64,
}

impl EmailNetwork {
    /// Builds a directed network from transmissions, deduplicating ordered
    /// pairs, unioning labels, keeping first-seen timestamps, and dropping
    /// anything outside `window`. Incomplete transmissions carry no label
    /// and are skipped.
    pub fn from_transmissions<I>(transmissions: I, window: Option<TimeWindow>) -> EmailNetwork
    where
        I: IntoIterator<Item = Transmission>,
    {
        let mut addresses: Vec<String> = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut pairs: HashMap<(u32, u32), (LabelSet, u64)> = HashMap::new();
        let mut seen = 0u64;

        for tx in transmissions {
            if let Some(w) = &window {
                if !w.contains(tx.timestamp) {
                    continue;
                }
            }
            let label = match (tx.status, tx.label) {
                (DeliveryStatus::Accepted, MessageLabel::Ham) => LabelSet::HAM,
                (DeliveryStatus::Accepted, MessageLabel::Spam) => LabelSet::SPAM,
                (DeliveryStatus::Rejected, _) => LabelSet::REJECTED,
                _ => continue,
            };
            if tx.sender.is_empty() || tx.recipient.is_empty() {
                continue;
            }
            seen += 1;
            let mut intern = |addr: &str| -> u32 {
                if let Some(&id) = index.get(addr) {
                    return id;
                }
                let id = addresses.len() as u32;
                addresses.push(addr.to_string());
                index.insert(addr.to_string(), id);
                id
            };
            let src = intern(&tx.sender);
            let dst = intern(&tx.recipient);
            pairs
                .entry((src, dst))
                .and_modify(|(l, ts)| {
                    *l = l.union(label);
                    *ts = (*ts).min(tx.timestamp);
                })
                .or_insert((label, tx.timestamp));
        }

        let edges = pairs
            .into_iter()
            .map(|((src, dst), (labels, first_seen))| Edge {
                src,
                dst,
                labels,
                first_seen,
            })
            .collect();
        Self::assemble(true, addresses, edges, seen)
    }

    /// Assembles a network from loose parts: sorts edges, builds the CSR
    /// offset table, and for undirected networks canonicalizes pairs.
    fn assemble(
        directed: bool,
        addresses: Vec<String>,
        mut edges: Vec<Edge>,
        transmissions_seen: u64,
    ) -> EmailNetwork {
        if !directed {
            for e in &mut edges {
                if e.src > e.dst {
                    std::mem::swap(&mut e.src, &mut e.dst);
                }
            }
        }
        edges.sort_unstable_by_key(|e| (e.src, e.dst));
        edges.dedup_by(|b, a| {
            if a.src == b.src && a.dst == b.dst {
                a.labels = a.labels.union(b.labels);
                a.first_seen = a.first_seen.min(b.first_seen);
                true
            } else {
                false
            }
        });
        let n = addresses.len();
        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.src as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        EmailNetwork {
            directed,
            addresses,
            edges,
            offsets,
            transmissions_seen,
        }
    }

    /// Constructs an undirected network from explicit vertex/edge lists.
    /// Unlike transmission builds, isolated vertices are preserved; the
    /// random-graph baselines need them.
    pub(crate) fn from_undirected_edges(
        addresses: Vec<String>,
        edges: Vec<(u32, u32)>,
    ) -> EmailNetwork {
        let edges = edges
            .into_iter()
            .map(|(a, b)| Edge {
                src: a,
                dst: b,
                labels: LabelSet::HAM,
                first_seen: 0,
            })
            .collect();
        Self::assemble(false, addresses, edges, 0)
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn vertex_count(&self) -> usize {
        self.addresses.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Transmissions consumed by the build (or sum thereof for merges);
    /// an aggregate statistic, not part of network identity.
    pub fn transmissions_seen(&self) -> u64 {
        self.transmissions_seen
    }

    pub fn address(&self, v: u32) -> &str {
        &self.addresses[v as usize]
    }

    pub fn addresses(&self) -> &[String] {
        &self.addresses
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-edges of `v` (or incident canonical edges with `src == v` for
    /// undirected networks), sorted by destination.
    pub fn out_edges(&self, v: u32) -> &[Edge] {
        &self.edges[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn has_edge(&self, src: u32, dst: u32) -> bool {
        self.out_edges(src).binary_search_by_key(&dst, |e| e.dst).is_ok()
    }

    /// Number of edges in the undirected view: ordered pairs collapsed,
    /// self-loops counted once.
    pub fn undirected_edge_count(&self) -> u64 {
        if !self.directed {
            return self.edges.len() as u64;
        }
        self.edges
            .iter()
            .filter(|e| e.src <= e.dst || !self.has_edge(e.dst, e.src))
            .count() as u64
    }

    /// Mean vertex degree under the undirected convention: a self-loop adds
    /// two to its endpoint, so the mean equals `2|E|/|V|` with self-loops
    /// counted once in `|E|`.
    pub fn mean_degree(&self) -> Result<f64, GraphError> {
        if self.addresses.is_empty() {
            return Err(GraphError::EmptyNetwork);
        }
        Ok(2.0 * self.undirected_edge_count() as f64 / self.addresses.len() as f64)
    }

    /// Keeps only edges whose label set intersects the selector, restricting
    /// vertices to the endpoints of surviving edges.
    pub fn subnetwork(&self, selector: Selector) -> EmailNetwork {
        let keep = selector.label_set();
        let mut addresses: Vec<String> = Vec::new();
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut edges = Vec::new();
        for e in &self.edges {
            if !e.labels.intersects(keep) {
                continue;
            }
            let mut map = |v: u32| {
                *remap.entry(v).or_insert_with(|| {
                    addresses.push(self.addresses[v as usize].clone());
                    (addresses.len() - 1) as u32
                })
            };
            edges.push(Edge {
                src: map(e.src),
                dst: map(e.dst),
                ..*e
            });
        }
        Self::assemble(self.directed, addresses, edges, self.transmissions_seen)
    }

    /// Unions vertex and edge sets; per-edge labels union and first-seen
    /// timestamps take the minimum. Merging daily builds equals one build
    /// over the concatenated stream.
    pub fn merge<'a, I>(nets: I) -> Result<EmailNetwork, GraphError>
    where
        I: IntoIterator<Item = &'a EmailNetwork>,
    {
        let mut directed: Option<bool> = None;
        let mut addresses: Vec<String> = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut pairs: HashMap<(u32, u32), (LabelSet, u64)> = HashMap::new();
        let mut seen = 0u64;

        for net in nets {
            match directed {
                None => directed = Some(net.directed),
                Some(d) if d != net.directed => return Err(GraphError::MixedDirectedness),
                _ => {}
            }
            seen += net.transmissions_seen;
            let mut local: Vec<u32> = Vec::with_capacity(net.addresses.len());
            for addr in &net.addresses {
                let id = match index.get(addr.as_str()) {
                    Some(&id) => id,
                    None => {
                        let id = addresses.len() as u32;
                        addresses.push(addr.clone());
                        index.insert(addr.clone(), id);
                        id
                    }
                };
                local.push(id);
            }
            for e in &net.edges {
                let key = (local[e.src as usize], local[e.dst as usize]);
                pairs
                    .entry(key)
                    .and_modify(|(l, ts)| {
                        *l = l.union(e.labels);
                        *ts = (*ts).min(e.first_seen);
                    })
                    .or_insert((e.labels, e.first_seen));
            }
        }

        let edges = pairs
            .into_iter()
            .map(|((src, dst), (labels, first_seen))| Edge {
                src,
                dst,
                labels,
                first_seen,
            })
            .collect();
        Ok(Self::assemble(directed.unwrap_or(true), addresses, edges, seen))
    }

    /// Edge list keyed by address rather than id, sorted; the basis of
    /// semantic network equality.
    fn canonical_edges(&self) -> Vec<(&str, &str, u8, u64)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (self.address(e.src), self.address(e.dst));
                let (a, b) = if !self.directed && a > b { (b, a) } else { (a, b) };
                (a, b, e.labels.bits(), e.first_seen)
            })
            .collect();
        out.sort_unstable();
        out
    }

    fn sorted_addresses(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.addresses.iter().map(String::as_str).collect();
        out.sort_unstable();
        out
    }

    /// Serializes in the v1 network format: a header line
    /// `#emailnet v1 directed=<bool> |V|=<n> |E|=<m>` followed by one edge
    /// per line, `src_id\tdst_id\tlabelmask\tfirst_seen`.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "#emailnet v1 directed={} |V|={} |E|={}",
            self.directed,
            self.addresses.len(),
            self.edges.len()
        )?;
        for e in &self.edges {
            writeln!(w, "{}\t{}\t{}\t{}", e.src, e.dst, e.labels.bits(), e.first_seen)?;
        }
        Ok(())
    }

    /// Reads the v1 network format. Ids in the file become the vertex
    /// addresses (the format does not carry an address table).
    pub fn read_from<R: BufRead>(reader: R) -> Result<EmailNetwork, GraphError> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| GraphError::MalformedFile("missing header".into()))??;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("#emailnet") || tokens.next() != Some("v1") {
            return Err(GraphError::MalformedFile("bad magic".into()));
        }
        let mut expect = |prefix: &str| -> Result<String, GraphError> {
            tokens
                .next()
                .and_then(|t| t.strip_prefix(prefix))
                .map(str::to_string)
                .ok_or_else(|| GraphError::MalformedFile(format!("missing {prefix} field")))
        };
        let directed: bool = expect("directed=")?
            .parse()
            .map_err(|_| GraphError::MalformedFile("bad directed flag".into()))?;
        let n: usize = expect("|V|=")?
            .parse()
            .map_err(|_| GraphError::MalformedFile("bad |V|".into()))?;
        let m: usize = expect("|E|=")?
            .parse()
            .map_err(|_| GraphError::MalformedFile("bad |E|".into()))?;

        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut f = line.split('\t');
            let parse = |s: Option<&str>| -> Result<u64, GraphError> {
                s.and_then(|s| s.parse().ok())
                    .ok_or_else(|| GraphError::MalformedFile(format!("bad edge line: {line}")))
            };
            let src = parse(f.next())? as u32;
            let dst = parse(f.next())? as u32;
            let mask = parse(f.next())? as u8;
            let first_seen = parse(f.next())?;
            let labels = LabelSet::from_bits(mask)
                .ok_or_else(|| GraphError::MalformedFile(format!("bad labelmask {mask}")))?;
            if (src as usize) >= n || (dst as usize) >= n {
                return Err(GraphError::MalformedFile(format!(
                    "edge {src}->{dst} out of range for |V|={n}"
                )));
            }
            edges.push(Edge { src, dst, labels, first_seen });
        }
        if edges.len() != m {
            return Err(GraphError::MalformedFile(format!(
                "expected {m} edges, found {}",
                edges.len()
            )));
        }
        let addresses = (0..n).map(|i| i.to_string()).collect();
        Ok(Self::assemble(directed, addresses, edges, 0))
    }

    /// Builds the undirected adjacency view used by the metric kernels.
    pub fn undirected_view(&self) -> UndirectedView {
        UndirectedView::new(self)
    }
}

/// Semantic equality: same directedness and the same address-keyed edge set
/// (labels and first-seen included). Vertex numbering does not matter.
impl PartialEq for EmailNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed
            && self.sorted_addresses() == other.sorted_addresses()
            && self.canonical_edges() == other.canonical_edges()
    }
}

impl Eq for EmailNetwork {}

/// Undirected adjacency derived from a network: per-vertex sorted neighbor
/// lists in CSR layout, self-loops tracked separately and excluded from
/// neighbor sets. Degrees follow the convention that a self-loop adds two.
pub struct UndirectedView {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    self_loop: Vec<bool>,
    edge_count: u64,
}

impl UndirectedView {
    fn new(net: &EmailNetwork) -> UndirectedView {
        let n = net.vertex_count();
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut self_loop = vec![false; n];
        for e in net.edges() {
            if e.src == e.dst {
                self_loop[e.src as usize] = true;
            } else {
                lists[e.src as usize].push(e.dst);
                lists[e.dst as usize].push(e.src);
            }
        }
        sort_dedup_lists(&mut lists);
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        let mut total = 0usize;
        for l in &lists {
            total += l.len();
            offsets.push(total);
        }
        let mut neighbors = Vec::with_capacity(total);
        for l in &lists {
            neighbors.extend_from_slice(l);
        }
        let loops = self_loop.iter().filter(|&&b| b).count() as u64;
        UndirectedView {
            offsets,
            neighbors,
            self_loop,
            edge_count: total as u64 / 2 + loops,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.self_loop.len()
    }

    /// Undirected edges, self-loops counted once.
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Sorted neighbors of `v`, excluding `v` itself.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn has_self_loop(&self, v: u32) -> bool {
        self.self_loop[v as usize]
    }

    /// Degree under the self-loop-adds-two convention.
    pub fn degree(&self, v: u32) -> u64 {
        self.neighbors(v).len() as u64 + if self.self_loop[v as usize] { 2 } else { 0 }
    }

    pub fn mean_degree(&self) -> Result<f64, GraphError> {
        if self.vertex_count() == 0 {
            return Err(GraphError::EmptyNetwork);
        }
        Ok(2.0 * self.edge_count as f64 / self.vertex_count() as f64)
    }
}

#[cfg(feature = "parallel")]
fn sort_dedup_lists(lists: &mut [Vec<u32>]) {
    use rayon::prelude::*;
    lists.par_iter_mut().for_each(|l| {
        l.sort_unstable();
        l.dedup();
    });
}

#[cfg(not(feature = "parallel"))]
fn sort_dedup_lists(lists: &mut [Vec<u32>]) {
    for l in lists.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
}
