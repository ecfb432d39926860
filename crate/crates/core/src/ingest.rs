//! SMTP session-log parsing, event classification and address anonymization.
//!
//! Two line-delimited input formats are accepted, both UTF-8 and
//! tab-separated:
//!
//! * session format: `<unix_ts>\t<session_id>\t<verb>\t<argument>` with verb
//!   in `{MAIL_FROM, RCPT_TO, DATA, DATA_END, LABEL}`; records of one
//!   session are contiguous,
//! * pre-classified event format:
//!   `<unix_ts>\t<sender>\t<recipient[,recipient...]>\t<status>\t<label>`.
//!
//! Malformed lines are counted and skipped, never fatal. Emails whose sender
//! is null (`MAIL FROM:<>`) are dropped and counted separately; they carry
//! no usable edge.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error reading log: {0}")]
    Io(#[from] io::Error),
    #[error("anonymization key must not be empty")]
    EmptyKey,
}

/// Spam/ham verdict attached by an upstream content filter. `Unknown` is
/// reserved for traffic that never completed the SMTP exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageLabel {
    Ham,
    Spam,
    Unknown,
}

impl MessageLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            MessageLabel::Ham => "ham",
            MessageLabel::Spam => "spam",
            MessageLabel::Unknown => "unknown",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "ham" => Some(MessageLabel::Ham),
            "spam" => Some(MessageLabel::Spam),
            "unknown" => Some(MessageLabel::Unknown),
            _ => None,
        }
    }
}

/// Outcome of one transmission attempt: delivered, refused during the
/// command exchange, or too broken to tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeliveryStatus {
    Accepted,
    Rejected,
    Incomplete,
}

impl DeliveryStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DeliveryStatus::Accepted => "accepted",
            DeliveryStatus::Rejected => "rejected",
            DeliveryStatus::Incomplete => "incomplete",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "accepted" => Some(DeliveryStatus::Accepted),
            "rejected" => Some(DeliveryStatus::Rejected),
            "incomplete" => Some(DeliveryStatus::Incomplete),
            _ => None,
        }
    }
}

/// SMTP commands retained from a session; everything else in the exchange
/// (greetings, extensions, server replies) is out of scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmtpVerb {
    MailFrom,
    RcptTo,
    Data,
    DataEnd,
}

/// One captured SMTP session: ordered commands plus the label the content
/// filter assigned once the session delivered data.
#[derive(Debug, Clone, PartialEq)]
pub struct SmtpSession {
    pub session_id: String,
    /// Seconds since epoch of the first record seen for this session.
    pub timestamp: u64,
    pub commands: Vec<(SmtpVerb, String)>,
    pub label: MessageLabel,
}

/// One classified transmission attempt, possibly multi-recipient.
#[derive(Debug, Clone, PartialEq)]
pub struct EmailEvent {
    pub timestamp: u64,
    pub sender: String,
    pub recipients: Vec<String>,
    pub status: DeliveryStatus,
    pub label: MessageLabel,
}

/// One (sender, recipient) leg of an event; the unit the graph builder
/// consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub sender: String,
    pub recipient: String,
    pub timestamp: u64,
    pub status: DeliveryStatus,
    pub label: MessageLabel,
}

/// Result of parsing a session-format log. Every non-empty input line is
/// accounted for: `records_parsed + malformed == total_records`.
#[derive(Debug, Default)]
pub struct ParsedSessions {
    pub sessions: Vec<SmtpSession>,
    pub malformed: u64,
    pub records_parsed: u64,
    pub total_records: u64,
}

/// Result of parsing a pre-classified event log.
#[derive(Debug, Default)]
pub struct ParsedEvents {
    pub events: Vec<EmailEvent>,
    pub malformed: u64,
    /// Well-formed records dropped because the sender was null.
    pub null_sender_skipped: u64,
    pub total_records: u64,
}

/// Events produced from one session, plus what had to be dropped.
#[derive(Debug, Default, PartialEq)]
pub struct Classification {
    pub events: Vec<EmailEvent>,
    /// Emails (or whole sessions) with no usable commands: no sender and no
    /// way to form an edge. Scanning attempts and capture errors land here.
    pub incomplete: u64,
    /// Emails dropped because of a null sender (`MAIL FROM:<>`), mainly
    /// delivery-failure notifications.
    pub null_sender: u64,
}

fn strip_angle(addr: &str) -> &str {
    let a = addr.trim();
    a.strip_prefix('<')
        .and_then(|a| a.strip_suffix('>'))
        .unwrap_or(a)
        .trim()
}

/// Parses a session-format log. Records for one `session_id` must be
/// contiguous; a record with a new id closes the previous session. Malformed
/// lines (wrong field count, bad timestamp, unknown verb, bad label) are
/// counted and skipped.
pub fn parse_session_log<R: BufRead>(reader: R) -> Result<ParsedSessions, IngestError> {
    let mut out = ParsedSessions::default();
    let mut current: Option<SmtpSession> = None;

    for line in reader.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        out.total_records += 1;

        let mut fields = line.splitn(4, '\t');
        let parsed = (|| {
            let ts: u64 = fields.next()?.parse().ok()?;
            let sid = fields.next()?;
            let verb = fields.next()?;
            let arg = fields.next().unwrap_or("");
            Some((ts, sid.to_string(), verb.to_string(), arg.to_string()))
        })();
        let Some((ts, sid, verb, arg)) = parsed else {
            out.malformed += 1;
            continue;
        };

        let verb = match verb.as_str() {
            "MAIL_FROM" => Some(SmtpVerb::MailFrom),
            "RCPT_TO" => Some(SmtpVerb::RcptTo),
            "DATA" => Some(SmtpVerb::Data),
            "DATA_END" => Some(SmtpVerb::DataEnd),
            "LABEL" => None,
            _ => {
                out.malformed += 1;
                continue;
            }
        };
        if verb.is_none() && MessageLabel::parse(&arg).is_none() {
            out.malformed += 1;
            continue;
        }

        let switch = current.as_ref().is_none_or(|s| s.session_id != sid);
        if switch {
            if let Some(done) = current.take() {
                out.sessions.push(done);
            }
            current = Some(SmtpSession {
                session_id: sid,
                timestamp: ts,
                commands: Vec::new(),
                label: MessageLabel::Unknown,
            });
        }
        let session = current.as_mut().expect("session installed above");
        match verb {
            Some(v) => session.commands.push((v, arg)),
            None => session.label = MessageLabel::parse(&arg).expect("label checked above"),
        }
        out.records_parsed += 1;
    }
    if let Some(done) = current.take() {
        out.sessions.push(done);
    }
    Ok(out)
}

/// Parses the pre-classified event format. Rows violating the event
/// invariants (accepted must be ham/spam, rejected/incomplete must be
/// unknown, at least one recipient) are malformed; null-sender rows are
/// counted and skipped.
pub fn parse_event_log<R: BufRead>(reader: R) -> Result<ParsedEvents, IngestError> {
    let mut out = ParsedEvents::default();
    for line in reader.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        out.total_records += 1;
        match parse_event_line(&line) {
            Some(ev) if ev.sender.is_empty() => out.null_sender_skipped += 1,
            Some(ev) => out.events.push(ev),
            None => out.malformed += 1,
        }
    }
    Ok(out)
}

fn parse_event_line(line: &str) -> Option<EmailEvent> {
    let mut fields = line.split('\t');
    let ts: u64 = fields.next()?.parse().ok()?;
    let sender = strip_angle(fields.next()?).to_string();
    let recipients: Vec<String> = fields
        .next()?
        .split(',')
        .map(strip_angle)
        .filter(|r| !r.is_empty())
        .map(str::to_string)
        .collect();
    let status = DeliveryStatus::parse(fields.next()?)?;
    let label = MessageLabel::parse(fields.next()?)?;
    if fields.next().is_some() || recipients.is_empty() {
        return None;
    }
    let consistent = match status {
        DeliveryStatus::Accepted => label != MessageLabel::Unknown,
        DeliveryStatus::Rejected | DeliveryStatus::Incomplete => label == MessageLabel::Unknown,
    };
    if !consistent {
        return None;
    }
    Some(EmailEvent {
        timestamp: ts,
        sender,
        recipients,
        status,
        label,
    })
}

/// Writes events in the pre-classified format, one line each.
pub fn write_event_log<W: Write>(mut w: W, events: &[EmailEvent]) -> io::Result<()> {
    for ev in events {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            ev.timestamp,
            ev.sender,
            ev.recipients.join(","),
            ev.status.as_str(),
            ev.label.as_str()
        )?;
    }
    Ok(())
}

/// Classifies a session into events. A session carries one or more emails,
/// each starting at `MAIL_FROM`. An email with `DATA` and `DATA_END` was
/// delivered and becomes an accepted event carrying the session label; one
/// that stalled during the command exchange becomes a rejected event; one
/// that never produced a sender/recipient pair is counted incomplete.
/// Classification is total: malformed input downgrades, it never errors.
pub fn classify_session(session: &SmtpSession) -> Classification {
    let mut out = Classification::default();

    let mut emails: Vec<&[(SmtpVerb, String)]> = Vec::new();
    let starts: Vec<usize> = session
        .commands
        .iter()
        .enumerate()
        .filter(|(_, (v, _))| *v == SmtpVerb::MailFrom)
        .map(|(i, _)| i)
        .collect();
    for (k, &start) in starts.iter().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(session.commands.len());
        emails.push(&session.commands[start..end]);
    }
    if emails.is_empty() {
        out.incomplete += 1;
        return out;
    }

    for email in emails {
        let sender = strip_angle(&email[0].1);
        if sender.is_empty() {
            out.null_sender += 1;
            continue;
        }
        let recipients: Vec<String> = email
            .iter()
            .filter(|(v, _)| *v == SmtpVerb::RcptTo)
            .map(|(_, a)| strip_angle(a).to_string())
            .filter(|r| !r.is_empty())
            .collect();
        let has_data = email.iter().any(|(v, _)| *v == SmtpVerb::Data);
        let has_end = email.iter().any(|(v, _)| *v == SmtpVerb::DataEnd);

        if recipients.is_empty() {
            out.incomplete += 1;
            continue;
        }
        let (status, label) = if has_data && has_end {
            if session.label == MessageLabel::Unknown {
                // Delivered but never labeled; unusable without breaking the
                // accepted-implies-labeled invariant.
                out.incomplete += 1;
                continue;
            }
            (DeliveryStatus::Accepted, session.label)
        } else {
            (DeliveryStatus::Rejected, MessageLabel::Unknown)
        };
        out.events.push(EmailEvent {
            timestamp: session.timestamp,
            sender: sender.to_string(),
            recipients,
            status,
            label,
        });
    }
    out
}

/// Expands a multi-recipient event into one transmission per recipient,
/// preserving order. Self-loops (sender equals recipient) are kept.
pub fn expand_recipients(event: &EmailEvent) -> Vec<Transmission> {
    event
        .recipients
        .iter()
        .map(|r| Transmission {
            sender: event.sender.clone(),
            recipient: r.clone(),
            timestamp: event.timestamp,
            status: event.status,
            label: event.label,
        })
        .collect()
}

/// Opaque 128-bit address token from a keyed one-way digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnonymizedAddress([u8; 16]);

impl AnonymizedAddress {
    pub fn token(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for AnonymizedAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// Maps an address to a fixed-width opaque token: SHA-256 over the key and
/// the normalized (trimmed, lowercased) address, truncated to 128 bits.
/// Equal normalized addresses map to equal tokens under the same key; the
/// key is never part of the output.
pub fn anonymize(address: &str, key: &[u8]) -> Result<AnonymizedAddress, IngestError> {
    if key.is_empty() {
        return Err(IngestError::EmptyKey);
    }
    let normalized = address.trim().to_lowercase();
    let mut hasher = Sha256::new();
    hasher.update(key);
    hasher.update([0u8]);
    hasher.update(normalized.as_bytes());
    let digest = hasher.finalize();
    let mut id = [0u8; 16];
    id.copy_from_slice(&digest[..16]);
    Ok(AnonymizedAddress(id))
}

/// Rewrites every address in `events` to its anonymized token. Tokens are
/// memoized so repeated addresses hash once.
pub fn anonymize_events(events: &mut [EmailEvent], key: &[u8]) -> Result<(), IngestError> {
    if key.is_empty() {
        return Err(IngestError::EmptyKey);
    }
    let mut cache: HashMap<String, String> = HashMap::new();
    let mut token = |addr: &mut String| {
        match cache.entry(addr.clone()) {
            Entry::Occupied(e) => *addr = e.get().clone(),
            Entry::Vacant(e) => {
                let t = anonymize(addr, key).expect("key verified non-empty").token();
                e.insert(t.clone());
                *addr = t;
            }
        };
    };
    for ev in events {
        token(&mut ev.sender);
        for r in &mut ev.recipients {
            token(r);
        }
    }
    Ok(())
}
