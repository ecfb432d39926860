//! `emailnet`: reconstruct email networks from session logs, generate
//! synthetic labeled traffic, and report the graph metrics that separate
//! social from bulk senders.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 degenerate input.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use emailnet_core::graph::{Selector, TimeWindow};
use emailnet_core::indicators::ScoreConfig;
use emailnet_core::ingest::{
    anonymize_events, classify_session, parse_event_log, parse_session_log, write_event_log,
    EmailEvent,
};
use emailnet_core::report::{
    analyze_events, flatten_numbers, to_sorted_json, write_atomic, AnalyzeError, AnalyzeOptions,
    PathsOption, SCHEMA_VERSION,
};
use emailnet_core::synth::{
    generate_ham, generate_spam, interleave, HamModelParams, SpamModelParams,
};

#[derive(Parser)]
#[command(name = "emailnet", version, about = "Email network structure analysis")]
struct Cli {
    /// Seed for generators and sampled estimators.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory analysis artifacts are written into.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    /// Tab-separated SMTP session records.
    Session,
    /// Pre-classified one-line-per-event records.
    Event,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathsArg {
    None,
    Sampled,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Parse SMTP logs into the pre-classified event format.
    Ingest {
        /// Input log files, processed in order.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = InputFormat::Session)]
        format: InputFormat,
        /// Event file to write.
        #[arg(long)]
        out: PathBuf,
        /// Replace addresses with keyed one-way tokens.
        #[arg(long)]
        anonymize: bool,
        /// Anonymization key (UTF-8 string).
        #[arg(long)]
        key: Option<String>,
        /// File holding the anonymization key (trailing newline ignored).
        #[arg(long)]
        key_file: Option<PathBuf>,
    },
    /// Generate a synthetic labeled event stream.
    Synth {
        /// Traffic model: ham, spam, or mix.
        model: String,
        /// Model parameters as key=value pairs (run with no pairs for
        /// defaults): ham takes n, m, reciprocity, triadic, events_per_day;
        /// spam takes spammers, fanout, pool, rejection; both take seed,
        /// start, days.
        params: Vec<String>,
        /// Event file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build networks from an event file and report their structure.
    Analyze {
        /// Pre-classified event file.
        #[arg(long)]
        events: PathBuf,
        /// Window: `all`, `day=<n>` (1-based), or `<start>..<end>` epoch
        /// seconds.
        #[arg(long, default_value = "all")]
        window: String,
        /// Comma-separated subset of all,ham,spam,rejected_plus_spam.
        #[arg(long, default_value = "all")]
        selectors: String,
        #[arg(long, value_enum, default_value_t = PathsArg::Sampled)]
        paths: PathsArg,
        /// BFS roots for sampled path estimation.
        #[arg(long, default_value_t = 100)]
        path_sources: usize,
        /// Run exact paths even above the size guardrail.
        #[arg(long)]
        force: bool,
        /// Shift day boundaries away from UTC by this many seconds.
        #[arg(long, default_value_t = 0)]
        tz_offset: i64,
        /// Indicator scoring configuration (key=value file).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write each analyzed network in the network file format.
        #[arg(long)]
        dump_networks: bool,
    },
    /// Compare two analysis reports metric by metric.
    Compare { left: PathBuf, right: PathBuf },
    /// Print the indicator scoring configuration.
    ShowConfig {
        /// Configuration file to merge over the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Io(String),
    Degenerate(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Degenerate(m) => m,
        }
    }
}

fn io_err(context: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", context.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = emailnet_core::configure_thread_pool(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { inputs, format, out, anonymize, key, key_file } => {
            cmd_ingest(inputs, format, out, anonymize, key, key_file)
        }
        Command::Synth { model, params, out } => cmd_synth(&model, &params, out, cli.seed),
        Command::Analyze {
            events,
            window,
            selectors,
            paths,
            path_sources,
            force,
            tz_offset,
            config,
            dump_networks,
        } => cmd_analyze(
            &cli.output_dir,
            events,
            &window,
            &selectors,
            paths,
            path_sources,
            force,
            tz_offset,
            config,
            dump_networks,
            cli.seed,
        ),
        Command::Compare { left, right } => cmd_compare(&left, &right),
        Command::ShowConfig { config } => {
            let cfg = load_score_config(config.as_deref())?;
            print!("{}", cfg.render());
            Ok(())
        }
    }
}

fn load_score_config(path: Option<&Path>) -> Result<ScoreConfig, CliError> {
    match path {
        None => Ok(ScoreConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            ScoreConfig::parse(&text).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

fn cmd_ingest(
    inputs: Vec<PathBuf>,
    format: InputFormat,
    out: PathBuf,
    anonymize: bool,
    key: Option<String>,
    key_file: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut events: Vec<EmailEvent> = Vec::new();
    let mut sessions = 0u64;
    let mut malformed = 0u64;
    let mut incomplete = 0u64;
    let mut null_sender = 0u64;

    for path in &inputs {
        let file = File::open(path).map_err(|e| io_err(path, e))?;
        let reader = BufReader::new(file);
        match format {
            InputFormat::Session => {
                let parsed = parse_session_log(reader).map_err(|e| io_err(path, e))?;
                sessions += parsed.sessions.len() as u64;
                malformed += parsed.malformed;
                for session in &parsed.sessions {
                    let classified = classify_session(session);
                    incomplete += classified.incomplete;
                    null_sender += classified.null_sender;
                    events.extend(classified.events);
                }
            }
            InputFormat::Event => {
                let parsed = parse_event_log(reader).map_err(|e| io_err(path, e))?;
                malformed += parsed.malformed;
                null_sender += parsed.null_sender_skipped;
                events.extend(parsed.events);
            }
        }
    }

    if anonymize {
        let key_bytes: Vec<u8> = match (key, key_file) {
            (Some(k), _) => k.into_bytes(),
            (None, Some(p)) => {
                let mut bytes = std::fs::read(&p).map_err(|e| io_err(&p, e))?;
                while bytes.last() == Some(&b'\n') || bytes.last() == Some(&b'\r') {
                    bytes.pop();
                }
                bytes
            }
            (None, None) => {
                return Err(CliError::Usage(
                    "--anonymize requires --key or --key-file".into(),
                ))
            }
        };
        anonymize_events(&mut events, &key_bytes)
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let mut buf = Vec::new();
    write_event_log(&mut buf, &events).map_err(|e| io_err(&out, e))?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    write_atomic(&out, &buf).map_err(|e| io_err(&out, e))?;

    let accepted = events
        .iter()
        .filter(|e| e.status == emailnet_core::ingest::DeliveryStatus::Accepted)
        .count();
    let rejected = events.len() - accepted;
    println!(
        "sessions={sessions} malformed={malformed} events={} accepted={accepted} \
         rejected={rejected} incomplete={incomplete} null_sender_skipped={null_sender} out={}",
        events.len(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    fn parse(pairs: &[String]) -> Result<KeyValues, CliError> {
        let mut map = BTreeMap::new();
        for pair in pairs {
            let (k, v) = pair.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("expected key=value, got `{pair}`"))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(KeyValues(map))
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        match self.0.remove(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("bad value for {key}: `{v}`"))),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        match self.0.into_keys().next() {
            None => Ok(()),
            Some(k) => Err(CliError::Usage(format!("unknown parameter `{k}`"))),
        }
    }
}

fn cmd_synth(model: &str, params: &[String], out: PathBuf, seed: u64) -> Result<(), CliError> {
    let mut kv = KeyValues::parse(params)?;
    let seed = kv.take("seed", seed)?;
    let start: u64 = kv.take("start", 0)?;
    let days: u64 = kv.take("days", 7)?;
    if days == 0 {
        return Err(CliError::Usage("days must be at least 1".into()));
    }
    let window = TimeWindow::new(start, start + days * 86_400)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let ham_params = |kv: &mut KeyValues, seed: u64| -> Result<HamModelParams, CliError> {
        let n = kv.take("n", 10_000usize)?;
        Ok(HamModelParams {
            n_users: n,
            attachment_edges: kv.take("m", 2)?,
            reciprocity: kv.take("reciprocity", 0.3)?,
            triadic_closure: kv.take("triadic", 0.1)?,
            events_per_day: kv.take("events_per_day", n as u64)?,
            seed,
        })
    };
    let spam_params = |kv: &mut KeyValues, seed: u64| -> Result<SpamModelParams, CliError> {
        Ok(SpamModelParams {
            n_spammers: kv.take("spammers", 200)?,
            targets_per_spammer: kv.take("fanout", 100)?,
            target_pool: kv.take("pool", 20_000)?,
            rejection_rate: kv.take("rejection", 0.2)?,
            seed,
        })
    };

    let usage = |e: emailnet_core::synth::SynthError| CliError::Usage(e.to_string());
    let events = match model {
        "ham" => generate_ham(&ham_params(&mut kv, seed)?, window).map_err(usage)?,
        "spam" => generate_spam(&spam_params(&mut kv, seed)?, window).map_err(usage)?,
        "mix" => {
            let ham = generate_ham(&ham_params(&mut kv, seed)?, window).map_err(usage)?;
            let spam = generate_spam(&spam_params(&mut kv, seed.wrapping_add(1))?, window)
                .map_err(usage)?;
            interleave(vec![ham, spam]).map_err(usage)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown model `{other}` (expected ham, spam, or mix)"
            )))
        }
    };
    kv.finish()?;

    let mut buf = Vec::new();
    write_event_log(&mut buf, &events).map_err(|e| io_err(&out, e))?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    write_atomic(&out, &buf).map_err(|e| io_err(&out, e))?;
    println!(
        "model={model} seed={seed} window={}..{} events={} out={}",
        window.start,
        window.end,
        events.len(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn parse_window(
    spec: &str,
    events: &[EmailEvent],
    tz_offset: i64,
) -> Result<Option<TimeWindow>, CliError> {
    if spec == "all" {
        return Ok(None);
    }
    if let Some(day) = spec.strip_prefix("day=") {
        let day: u64 = day
            .parse()
            .ok()
            .filter(|&d| d >= 1)
            .ok_or_else(|| CliError::Usage(format!("bad day number in `{spec}`")))?;
        let first = events
            .iter()
            .map(|e| e.timestamp)
            .min()
            .ok_or_else(|| CliError::Degenerate("event file is empty".into()))?;
        // Shift into local time, snap to midnight, then shift back.
        let local_first = first as i64 + tz_offset;
        let day_zero = local_first.div_euclid(86_400) * 86_400;
        let start_local = day_zero + (day as i64 - 1) * 86_400;
        let start = (start_local - tz_offset).max(0) as u64;
        return TimeWindow::new(start, start + 86_400)
            .map(Some)
            .map_err(|e| CliError::Usage(e.to_string()));
    }
    if let Some((a, b)) = spec.split_once("..") {
        let start: u64 = a
            .parse()
            .map_err(|_| CliError::Usage(format!("bad window start `{a}`")))?;
        let end: u64 = b
            .parse()
            .map_err(|_| CliError::Usage(format!("bad window end `{b}`")))?;
        return TimeWindow::new(start, end)
            .map(Some)
            .map_err(|e| CliError::Usage(e.to_string()));
    }
    Err(CliError::Usage(format!(
        "bad window spec `{spec}` (expected all, day=<n>, or <start>..<end>)"
    )))
}

fn parse_selectors(spec: &str) -> Result<Vec<Selector>, CliError> {
    let mut out = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let selector = Selector::parse(token)
            .ok_or_else(|| CliError::Usage(format!("unknown selector `{token}`")))?;
        if !out.contains(&selector) {
            out.push(selector);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no selectors given".into()));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    output_dir: &Path,
    events_path: PathBuf,
    window_spec: &str,
    selectors_spec: &str,
    paths: PathsArg,
    path_sources: usize,
    force: bool,
    tz_offset: i64,
    config: Option<PathBuf>,
    dump_networks: bool,
    seed: u64,
) -> Result<(), CliError> {
    let file = File::open(&events_path).map_err(|e| io_err(&events_path, e))?;
    let parsed = parse_event_log(BufReader::new(file)).map_err(|e| io_err(&events_path, e))?;
    if parsed.malformed > 0 {
        eprintln!(
            "warning: skipped {} malformed record(s) in {}",
            parsed.malformed,
            events_path.display()
        );
    }
    if parsed.events.is_empty() {
        return Err(CliError::Degenerate(format!(
            "no usable events in {}",
            events_path.display()
        )));
    }

    let opts = AnalyzeOptions {
        window: parse_window(window_spec, &parsed.events, tz_offset)?,
        window_spec: window_spec.to_string(),
        selectors: parse_selectors(selectors_spec)?,
        paths: match paths {
            PathsArg::None => PathsOption::Skip,
            PathsArg::Sampled => PathsOption::Sampled { sources: path_sources },
            PathsArg::Exact => PathsOption::Exact { force },
        },
        seed,
        score_config: load_score_config(config.as_deref())?,
        keep_networks: dump_networks,
    };

    let output = analyze_events(&parsed.events, &opts).map_err(|e| match e {
        AnalyzeError::NoTransmissions | AnalyzeError::EmptySelection(_) => {
            CliError::Degenerate(e.to_string())
        }
        AnalyzeError::ExactPathsRefused { .. } => CliError::Usage(e.to_string()),
        AnalyzeError::Metrics(_) | AnalyzeError::Graph(_) => CliError::Degenerate(e.to_string()),
        AnalyzeError::Json(_) => CliError::Io(e.to_string()),
    })?;

    std::fs::create_dir_all(output_dir).map_err(|e| io_err(output_dir, e))?;
    let report_path = output_dir.join("report.json");
    let json = to_sorted_json(&output.report).map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(&report_path, json.as_bytes()).map_err(|e| io_err(&report_path, e))?;
    for table in &output.tables {
        let path = output_dir.join(&table.file_name);
        write_atomic(&path, table.csv.as_bytes()).map_err(|e| io_err(&path, e))?;
    }
    for (selector, net) in &output.networks {
        let mut buf = Vec::new();
        net.write_to(&mut buf)
            .map_err(|e| CliError::Io(e.to_string()))?;
        let path = output_dir.join(format!("{}_network.tsv", selector.as_str()));
        write_atomic(&path, &buf).map_err(|e| io_err(&path, e))?;
    }
    println!(
        "report={} tables={} window={window_spec}",
        report_path.display(),
        output.tables.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

fn cmd_compare(left_path: &Path, right_path: &Path) -> Result<(), CliError> {
    let load = |p: &Path| -> Result<serde_json::Value, CliError> {
        let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
        serde_json::from_str(&text).map_err(|e| io_err(p, e))
    };
    let left = load(left_path)?;
    let right = load(right_path)?;

    let version = |v: &serde_json::Value| v.get("schema_version").and_then(|s| s.as_u64());
    let (lv, rv) = (version(&left), version(&right));
    if lv != rv || lv != Some(SCHEMA_VERSION as u64) {
        return Err(CliError::Usage(format!(
            "schema version mismatch: {} has {:?}, {} has {:?} (expected {SCHEMA_VERSION})",
            left_path.display(),
            lv,
            right_path.display(),
            rv
        )));
    }

    let left_flat: BTreeMap<String, f64> = flatten_numbers(&left).into_iter().collect();
    let right_flat: BTreeMap<String, f64> = flatten_numbers(&right).into_iter().collect();
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    let _ = writeln!(w, "metric\tleft\tright\tratio\tdifference");
    for (key, lval) in &left_flat {
        let Some(rval) = right_flat.get(key) else {
            continue;
        };
        let ratio = if lval == rval { 1.0 } else { lval / rval };
        let _ = writeln!(w, "{key}\t{lval}\t{rval}\t{ratio}\t{}", lval - rval);
    }
    Ok(())
}
