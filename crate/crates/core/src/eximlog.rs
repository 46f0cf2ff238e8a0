//! Exim mainlog parsing, transaction grouping, and synthetic log generation.
//!
//! Mainlog lines open with a `YYYY-MM-DD HH:MM:SS` timestamp; lines that
//! belong to a mail transaction carry a message ID (six, six, and two
//! base-62 characters joined by dashes, e.g. `1Abcde-0123Fg-Hz`) followed
//! by an event token:
//!
//! ```text
//! <=  arrival        =>  delivery        ->  additional delivery
//! ==  deferral       **  failure         Completed
//! ```
//!
//! Parsing is total: unrecognized lines come back with empty optionals and
//! the raw bytes untouched, never an error. Grouping collects the lines of
//! each ID in file order. The generator fabricates a plausible mainlog from
//! a seed together with a manifest of exactly what it wrote, which is what
//! the round-trip tests and the parsing workload check against.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rng::SplitMix64;

/// A message ID in the 6-6-2 base-62 shape, stored as its 16 ASCII bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageId([u8; 16]);

impl MessageId {
    /// Accepts exactly the ID shape: `XXXXXX-XXXXXX-XX` with base-62 `X`.
    pub fn parse(token: &[u8]) -> Option<MessageId> {
        if token.len() != 16 || token[6] != b'-' || token[13] != b'-' {
            return None;
        }
        let chars_ok = token
            .iter()
            .enumerate()
            .all(|(i, b)| matches!(i, 6 | 13) || b.is_ascii_alphanumeric());
        if !chars_ok {
            return None;
        }
        let mut bytes = [0u8; 16];
        bytes.copy_from_slice(token);
        Some(MessageId(bytes))
    }

    pub fn as_str(&self) -> &str {
        core::str::from_utf8(&self.0).expect("message IDs are ASCII")
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Event tag of a transaction line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFlag {
    Arrival,
    Delivery,
    AdditionalDelivery,
    Deferral,
    Failure,
    Completed,
    Other,
}

impl EventFlag {
    fn from_token(token: &[u8]) -> EventFlag {
        match token {
            b"<=" => EventFlag::Arrival,
            b"=>" => EventFlag::Delivery,
            b"->" => EventFlag::AdditionalDelivery,
            b"==" => EventFlag::Deferral,
            b"**" => EventFlag::Failure,
            b"Completed" => EventFlag::Completed,
            _ => EventFlag::Other,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EventFlag::Arrival => "arrival",
            EventFlag::Delivery => "delivery",
            EventFlag::AdditionalDelivery => "additional-delivery",
            EventFlag::Deferral => "deferral",
            EventFlag::Failure => "failure",
            EventFlag::Completed => "completed",
            EventFlag::Other => "other",
        }
    }
}

impl fmt::Display for EventFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One parsed mainlog line. `raw` always holds the input bytes verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogLine {
    timestamp: Option<String>,
    message_id: Option<MessageId>,
    flag: Option<EventFlag>,
    raw: Vec<u8>,
}

impl LogLine {
    pub fn timestamp(&self) -> Option<&str> {
        self.timestamp.as_deref()
    }

    pub fn message_id(&self) -> Option<MessageId> {
        self.message_id
    }

    pub fn flag(&self) -> Option<EventFlag> {
        self.flag
    }

    pub fn raw(&self) -> &[u8] {
        &self.raw
    }
}

fn timestamp_shape(bytes: &[u8]) -> bool {
    if bytes.len() < 19 {
        return false;
    }
    bytes[..19].iter().enumerate().all(|(i, b)| match i {
        4 | 7 => *b == b'-',
        10 => *b == b' ',
        13 | 16 => *b == b':',
        _ => b.is_ascii_digit(),
    })
}

/// Parses one line (without its trailing newline). Total: every input
/// yields a `LogLine`; fields that do not match their shape stay empty.
pub fn parse_line(line: &[u8]) -> LogLine {
    let timestamp = if timestamp_shape(line) {
        Some(String::from_utf8(line[..19].to_vec()).expect("digits and separators are ASCII"))
    } else {
        None
    };
    // Token-anchored ID search keeps IDs inside addresses from matching.
    let rest = if timestamp.is_some() {
        &line[19..]
    } else {
        line
    };
    let mut message_id = None;
    let mut flag = None;
    let mut tokens = rest
        .split(|b| *b == b' ' || *b == b'\t')
        .filter(|t| !t.is_empty());
    for token in tokens.by_ref() {
        if let Some(id) = MessageId::parse(token) {
            message_id = Some(id);
            flag = tokens.next().map(EventFlag::from_token);
            break;
        }
    }
    LogLine {
        timestamp,
        message_id,
        flag,
        raw: line.to_vec(),
    }
}

/// Parses a whole mainlog, splitting on LF. A trailing newline does not
/// produce an empty final line.
pub fn parse_log(log: &[u8]) -> Vec<LogLine> {
    let mut lines = Vec::new();
    let mut start = 0;
    for (i, b) in log.iter().enumerate() {
        if *b == b'\n' {
            lines.push(parse_line(&log[start..i]));
            start = i + 1;
        }
    }
    if start < log.len() {
        lines.push(parse_line(&log[start..]));
    }
    lines
}

/// The lines of one message ID, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    id: MessageId,
    lines: Vec<LogLine>,
}

impl Transaction {
    pub fn id(&self) -> MessageId {
        self.id
    }

    pub fn lines(&self) -> &[LogLine] {
        &self.lines
    }
}

/// Grouping result: transactions in first-appearance order plus a tally of
/// the lines that carried no message ID.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionGroups {
    transactions: Vec<Transaction>,
    index: BTreeMap<MessageId, usize>,
    skipped: usize,
}

impl TransactionGroups {
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn get(&self, id: &MessageId) -> Option<&Transaction> {
        self.index.get(id).map(|&i| &self.transactions[i])
    }

    /// Transactions in the order their IDs first appeared.
    pub fn iter(&self) -> impl Iterator<Item = &Transaction> {
        self.transactions.iter()
    }

    /// Count of input lines without a message ID.
    pub fn skipped_lines(&self) -> usize {
        self.skipped
    }
}

/// Groups parsed lines into one [`Transaction`] per distinct message ID.
///
/// Single pass with an insertion-ordered result, so the output ordering is
/// deterministic. Lines without an ID are excluded and counted.
pub fn group_transactions(lines: &[LogLine]) -> TransactionGroups {
    let mut groups = TransactionGroups {
        transactions: Vec::new(),
        index: BTreeMap::new(),
        skipped: 0,
    };
    for line in lines {
        match line.message_id() {
            None => groups.skipped += 1,
            Some(id) => match groups.index.get(&id) {
                Some(&i) => groups.transactions[i].lines.push(line.clone()),
                None => {
                    groups.index.insert(id, groups.transactions.len());
                    groups.transactions.push(Transaction {
                        id,
                        lines: alloc::vec![line.clone()],
                    });
                }
            },
        }
    }
    groups
}

/// Ground truth for one generated transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Number of lines written for this ID.
    pub lines: usize,
    /// Event flags of those lines, in emission order.
    pub flags: Vec<EventFlag>,
}

/// Per-ID ground truth of a generated log.
pub type Manifest = BTreeMap<MessageId, ManifestEntry>;

const BASE62: &[u8; 62] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
const LOCALS: [&str; 8] = [
    "alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi",
];
const DOMAINS: [&str; 4] = ["example.com", "example.org", "example.net", "mail.test"];

// Wall clock for generated timestamps, starting 2010-01-01 00:00:00 and
// carrying across day/month/year boundaries.
struct LogClock {
    year: u32,
    month: u32,
    day: u32,
    second_of_day: u32,
}

impl LogClock {
    fn new() -> Self {
        LogClock {
            year: 2010,
            month: 1,
            day: 1,
            second_of_day: 9 * 3600,
        }
    }

    fn days_in_month(year: u32, month: u32) -> u32 {
        let leap =
            (year.is_multiple_of(4) && !year.is_multiple_of(100)) || year.is_multiple_of(400);
        match month {
            1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
            4 | 6 | 9 | 11 => 30,
            2 if leap => 29,
            _ => 28,
        }
    }

    fn advance(&mut self, seconds: u32) {
        self.second_of_day += seconds;
        while self.second_of_day >= 86_400 {
            self.second_of_day -= 86_400;
            self.day += 1;
            if self.day > Self::days_in_month(self.year, self.month) {
                self.day = 1;
                self.month += 1;
                if self.month > 12 {
                    self.month = 1;
                    self.year += 1;
                }
            }
        }
    }

    fn stamp(&self) -> String {
        let (h, rest) = (self.second_of_day / 3600, self.second_of_day % 3600);
        alloc::format!(
            "{:04}-{:02}-{:02} {:02}:{:02}:{:02}",
            self.year,
            self.month,
            self.day,
            h,
            rest / 60,
            rest % 60
        )
    }
}

fn random_id(rng: &mut SplitMix64) -> MessageId {
    let mut bytes = [0u8; 16];
    for (i, b) in bytes.iter_mut().enumerate() {
        *b = match i {
            6 | 13 => b'-',
            _ => BASE62[rng.next_below(62) as usize],
        };
    }
    MessageId(bytes)
}

fn push_noise_line(out: &mut Vec<u8>, clock: &mut LogClock, rng: &mut SplitMix64) {
    clock.advance(1 + rng.next_below(5) as u32);
    let pid = 1000 + rng.next_below(60_000);
    let line = match rng.next_below(4) {
        0 => alloc::format!("{} Start queue run: pid={pid}", clock.stamp()),
        1 => alloc::format!("{} End queue run: pid={pid}", clock.stamp()),
        2 => alloc::format!(
            "{} exim 4.72 daemon started: pid={pid}, -q30m, listening for SMTP on port 25",
            clock.stamp()
        ),
        _ => alloc::format!(
            "{} SMTP connection from [10.0.0.{}] (TCP/IP connection count = {})",
            clock.stamp(),
            rng.next_below(250),
            1 + rng.next_below(9)
        ),
    };
    out.extend_from_slice(line.as_bytes());
    out.push(b'\n');
}

fn address(rng: &mut SplitMix64) -> String {
    alloc::format!(
        "{}@{}",
        LOCALS[rng.next_below(LOCALS.len() as u64) as usize],
        DOMAINS[rng.next_below(DOMAINS.len() as u64) as usize]
    )
}

fn push_event_line(
    out: &mut Vec<u8>,
    clock: &mut LogClock,
    rng: &mut SplitMix64,
    id: &MessageId,
    flag: EventFlag,
) {
    clock.advance(1 + rng.next_below(5) as u32);
    let line = match flag {
        EventFlag::Arrival => alloc::format!(
            "{} {id} <= {} H=({}) [192.168.{}.{}] P=esmtp S={}",
            clock.stamp(),
            address(rng),
            DOMAINS[rng.next_below(DOMAINS.len() as u64) as usize],
            rng.next_below(200),
            1 + rng.next_below(250),
            500 + rng.next_below(90_000)
        ),
        EventFlag::Delivery => alloc::format!(
            "{} {id} => {} R=dnslookup T=remote_smtp H=mx.{} [192.168.{}.{}]",
            clock.stamp(),
            address(rng),
            DOMAINS[rng.next_below(DOMAINS.len() as u64) as usize],
            rng.next_below(200),
            1 + rng.next_below(250)
        ),
        EventFlag::Completed => alloc::format!("{} {id} Completed", clock.stamp()),
        other => alloc::format!("{} {id} {} event", clock.stamp(), other.name()),
    };
    out.extend_from_slice(line.as_bytes());
    out.push(b'\n');
}

/// Generates a deterministic mainlog with `transactions` distinct message
/// IDs and the manifest describing it.
///
/// Each transaction contributes an arrival, zero to three deliveries, and a
/// `Completed` line, in that order, interleaved with the other transactions
/// that are in flight (at most 16 at a time) and with occasional
/// queue-runner noise lines. Identical `(transactions, seed)` inputs yield
/// identical bytes.
pub fn generate_log(transactions: usize, seed: u64) -> (Vec<u8>, Manifest) {
    let mut rng = SplitMix64::new(seed);
    let mut clock = LogClock::new();
    let mut out = Vec::new();
    let mut manifest = Manifest::new();

    // Mainlogs open with daemon chatter; this also keeps the empty-manifest
    // case from producing an empty file.
    let pid = 1000 + rng.next_below(60_000);
    let first = alloc::format!(
        "{} exim 4.72 daemon started: pid={pid}, -q30m, listening for SMTP on port 25",
        clock.stamp()
    );
    out.extend_from_slice(first.as_bytes());
    out.push(b'\n');
    if transactions == 0 {
        push_noise_line(&mut out, &mut clock, &mut rng);
        push_noise_line(&mut out, &mut clock, &mut rng);
        return (out, manifest);
    }

    // Distinct IDs plus each transaction's event schedule.
    let mut schedules: Vec<(MessageId, Vec<EventFlag>)> = Vec::with_capacity(transactions);
    for _ in 0..transactions {
        let id = loop {
            let candidate = random_id(&mut rng);
            if !manifest.contains_key(&candidate) {
                break candidate;
            }
        };
        let deliveries = rng.next_below(4) as usize;
        let mut flags = Vec::with_capacity(deliveries + 2);
        flags.push(EventFlag::Arrival);
        flags.extend(core::iter::repeat_n(EventFlag::Delivery, deliveries));
        flags.push(EventFlag::Completed);
        manifest.insert(
            id,
            ManifestEntry {
                lines: flags.len(),
                flags: flags.clone(),
            },
        );
        schedules.push((id, flags));
    }

    // Emit events transaction-interleaved with a bounded in-flight window.
    const WINDOW: usize = 16;
    let mut next_unstarted = 0;
    let mut active: Vec<(usize, usize)> = Vec::new(); // (schedule index, next event)
    while next_unstarted < schedules.len() && active.len() < WINDOW {
        active.push((next_unstarted, 0));
        next_unstarted += 1;
    }
    while !active.is_empty() {
        if rng.next_below(8) == 0 {
            push_noise_line(&mut out, &mut clock, &mut rng);
            continue;
        }
        let slot = rng.next_below(active.len() as u64) as usize;
        let (schedule_idx, event_idx) = active[slot];
        let (id, flags) = &schedules[schedule_idx];
        push_event_line(&mut out, &mut clock, &mut rng, id, flags[event_idx]);
        if event_idx + 1 < flags.len() {
            active[slot].1 += 1;
        } else {
            active.swap_remove(slot);
            if next_unstarted < schedules.len() {
                active.push((next_unstarted, 0));
                next_unstarted += 1;
            }
        }
    }
    (out, manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_arrival_line() {
        let line = b"2010-01-01 09:00:00 1Abcde-0123Fg-Hz <= alice@example.com H=(example.org) [192.168.1.2] P=esmtp S=1024";
        let parsed = parse_line(line);
        assert_eq!(parsed.timestamp(), Some("2010-01-01 09:00:00"));
        assert_eq!(parsed.message_id().unwrap().as_str(), "1Abcde-0123Fg-Hz");
        assert_eq!(parsed.flag(), Some(EventFlag::Arrival));
        assert_eq!(parsed.raw(), line);
    }

    #[test]
    fn parses_non_transaction_line() {
        let parsed = parse_line(b"2010-01-01 09:00:05 Start queue run: pid=1234");
        assert_eq!(parsed.timestamp(), Some("2010-01-01 09:00:05"));
        assert_eq!(parsed.message_id(), None);
        assert_eq!(parsed.flag(), None);
    }

    #[test]
    fn parses_every_flag_token() {
        let cases = [
            ("<=", EventFlag::Arrival),
            ("=>", EventFlag::Delivery),
            ("->", EventFlag::AdditionalDelivery),
            ("==", EventFlag::Deferral),
            ("**", EventFlag::Failure),
            ("Completed", EventFlag::Completed),
            ("frozen", EventFlag::Other),
        ];
        for (token, expected) in cases {
            let line = alloc::format!("2010-01-01 09:00:00 1Abcde-0123Fg-Hz {token} rest");
            assert_eq!(
                parse_line(line.as_bytes()).flag(),
                Some(expected),
                "token {token}"
            );
        }
        // ID with nothing after it has no flag.
        let bare = parse_line(b"2010-01-01 09:00:00 1Abcde-0123Fg-Hz");
        assert_eq!(bare.message_id().unwrap().as_str(), "1Abcde-0123Fg-Hz");
        assert_eq!(bare.flag(), None);
    }

    #[test]
    fn id_inside_an_address_does_not_match() {
        let parsed =
            parse_line(b"2010-01-01 09:00:00 bounce to 1Abcde-0123Fg-Hz@example.com failed");
        assert_eq!(parsed.message_id(), None);
    }

    #[test]
    fn id_shape_is_enforced() {
        assert!(MessageId::parse(b"1Abcde-0123Fg-Hz").is_some());
        assert!(MessageId::parse(b"1Abcde-0123Fg-H").is_none()); // too short
        assert!(MessageId::parse(b"1Abcde-0123Fg-Hzz").is_none()); // too long
        assert!(MessageId::parse(b"1Abcde_0123Fg-Hz").is_none()); // bad separator
        assert!(MessageId::parse(b"1Abc!e-0123Fg-Hz").is_none()); // bad character
    }

    #[test]
    fn parse_is_total_on_arbitrary_bytes() {
        let mut rng = SplitMix64::new(5150);
        for _ in 0..500 {
            let len = rng.next_below(64) as usize;
            let bytes: Vec<u8> = (0..len).map(|_| rng.next_below(256) as u8).collect();
            let parsed = parse_line(&bytes);
            assert_eq!(parsed.raw(), &bytes[..]);
        }
    }

    #[test]
    fn grouping_single_transaction_keeps_file_order() {
        let log = b"2010-01-01 09:00:00 1Abcde-0123Fg-Hz <= a@example.com\n\
                    2010-01-01 09:00:01 1Abcde-0123Fg-Hz => b@example.org\n\
                    2010-01-01 09:00:02 1Abcde-0123Fg-Hz Completed\n";
        let groups = group_transactions(&parse_log(log));
        assert_eq!(groups.len(), 1);
        let tx = groups.iter().next().unwrap();
        assert_eq!(tx.lines().len(), 3);
        let flags: Vec<_> = tx.lines().iter().map(|l| l.flag().unwrap()).collect();
        assert_eq!(
            flags,
            [
                EventFlag::Arrival,
                EventFlag::Delivery,
                EventFlag::Completed
            ]
        );
    }

    #[test]
    fn grouping_without_ids_is_empty() {
        let log = b"2010-01-01 09:00:00 Start queue run: pid=1\n\
                    2010-01-01 09:00:09 End queue run: pid=1\n";
        let groups = group_transactions(&parse_log(log));
        assert!(groups.is_empty());
        assert_eq!(groups.skipped_lines(), 2);
    }

    #[test]
    fn grouping_interleaved_ids_is_a_stable_filter() {
        let log = b"2010-01-01 09:00:00 aaaaaa-000000-AA <= x@example.com\n\
                    2010-01-01 09:00:01 bbbbbb-111111-BB <= y@example.com\n\
                    2010-01-01 09:00:02 aaaaaa-000000-AA => z@example.net\n\
                    2010-01-01 09:00:03 bbbbbb-111111-BB Completed\n\
                    2010-01-01 09:00:04 aaaaaa-000000-AA Completed\n";
        let lines = parse_log(log);
        let groups = group_transactions(&lines);
        assert_eq!(groups.len(), 2);
        for tx in groups.iter() {
            // Oracle: filter the input stream by this transaction's ID.
            let expected: Vec<&LogLine> = lines
                .iter()
                .filter(|l| l.message_id() == Some(tx.id()))
                .collect();
            assert_eq!(tx.lines().len(), expected.len());
            for (got, want) in tx.lines().iter().zip(expected) {
                assert_eq!(got, want);
            }
        }
        // First-appearance order.
        let ids: Vec<String> = groups.iter().map(|t| t.id().to_string()).collect();
        assert_eq!(ids, ["aaaaaa-000000-AA", "bbbbbb-111111-BB"]);
    }

    #[test]
    fn line_accounting_is_conserved() {
        let (log, _) = generate_log(50, 31);
        let lines = parse_log(&log);
        let groups = group_transactions(&lines);
        let grouped: usize = groups.iter().map(|t| t.lines().len()).sum();
        assert_eq!(grouped + groups.skipped_lines(), lines.len());
    }

    #[test]
    fn generator_is_deterministic() {
        let (a, ma) = generate_log(10, 7);
        let (b, mb) = generate_log(10, 7);
        assert_eq!(a, b);
        assert_eq!(ma, mb);
        let (c, _) = generate_log(10, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_log_round_trips_through_parse_and_group() {
        for count in [0usize, 1, 10, 1000] {
            let (log, manifest) = generate_log(count, 7);
            assert_eq!(manifest.len(), count);
            let groups = group_transactions(&parse_log(&log));
            assert_eq!(groups.len(), count, "count {count}");
            for (id, entry) in &manifest {
                let tx = groups.get(id).unwrap_or_else(|| panic!("missing {id}"));
                assert_eq!(tx.lines().len(), entry.lines, "{id}");
                let flags: Vec<EventFlag> = tx.lines().iter().map(|l| l.flag().unwrap()).collect();
                assert_eq!(flags, entry.flags, "{id}");
            }
            if count == 0 {
                assert!(!log.is_empty());
                assert_eq!(groups.skipped_lines(), parse_log(&log).len());
            }
        }
    }

    #[test]
    fn generated_timestamps_parse_back() {
        let (log, _) = generate_log(5, 99);
        for line in parse_log(&log) {
            assert!(line.timestamp().is_some(), "line {:?}", line.raw());
        }
    }

    #[test]
    fn clock_rolls_over_boundaries() {
        let mut clock = LogClock::new();
        clock.advance(86_400 * 31); // into February
        assert!(clock.stamp().starts_with("2010-02-01 09:"));
        let mut year_end = LogClock::new();
        year_end.advance(86_400 * 365);
        assert!(year_end.stamp().starts_with("2011-01-01 09:"));
    }
}
