//! Price and dividend CSV files.
//!
//! Prices: header `date,ticker,close`. Dividends: header `date,ticker,amount`.
//! Dates are `YYYY-MM-DD`; `\n` and `\r\n` line endings are both accepted.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use tailpc_core::{DividendEvent, NaiveDate, PricePanel};

use crate::error::{Error, Result};

const PRICE_HEADER: [&str; 3] = ["date", "ticker", "close"];
const DIVIDEND_HEADER: [&str; 3] = ["date", "ticker", "amount"];

struct Row {
    line: u64,
    date: NaiveDate,
    ticker: String,
    value: f64,
}

fn parse_err(source: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse { path: source.to_string(), line, message: message.into() }
}

/// Reads three-column rows after checking the header; `source` names the
/// input in error messages.
fn read_rows(input: impl Read, source: &str, header: [&str; 3]) -> Result<Vec<Row>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = rdr.records();
    let want = header.join(",");
    match records.next() {
        None => return Err(parse_err(source, 1, format!("missing header, expected `{want}`"))),
        Some(rec) => {
            let rec = rec.map_err(|e| csv_err(source, e))?;
            let got: Vec<&str> = rec.iter().collect();
            if got != header {
                return Err(parse_err(source, 1, format!("expected header `{want}`, found `{}`", got.join(","))));
            }
        }
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_err(source, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(parse_err(source, line, format!("expected 3 columns, found {}", rec.len())));
        }
        let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d")
            .map_err(|_| parse_err(source, line, format!("invalid date `{}`", &rec[0])))?;
        let ticker = rec[1].to_string();
        if ticker.is_empty() {
            return Err(parse_err(source, line, "empty ticker"));
        }
        let value: f64 = rec[2]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| parse_err(source, line, format!("invalid {} `{}`", header[2], &rec[2])))?;
        rows.push(Row { line, date, ticker, value });
    }
    Ok(rows)
}

fn csv_err(source: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_err(source, line, e.to_string())
}

fn reject_duplicates(rows: &[Row], source: &str) -> Result<()> {
    let mut seen: HashMap<(NaiveDate, &str), u64> = HashMap::new();
    for r in rows {
        if let Some(first) = seen.insert((r.date, r.ticker.as_str()), r.line) {
            return Err(parse_err(
                source,
                r.line,
                format!("duplicate row for {} on {} (first on line {first})", r.ticker, r.date),
            ));
        }
    }
    Ok(())
}

/// Parses a prices file into a panel with no dividends.
pub fn parse_prices(input: impl Read, source: &str) -> Result<PricePanel> {
    let rows = read_rows(input, source, PRICE_HEADER)?;
    if let Some(bad) = rows.iter().find(|r| r.value <= 0.0) {
        return Err(parse_err(source, bad.line, format!("close must be positive, found {}", bad.value)));
    }
    reject_duplicates(&rows, source)?;
    Ok(PricePanel::from_observations(rows.into_iter().map(|r| (r.date, r.ticker, r.value)))?)
}

/// Parses a dividends file and attaches its events to `panel`.
///
/// Amounts of zero are dropped. Events without a matching price row are a
/// data error listing every offending event.
pub fn parse_dividends(input: impl Read, source: &str, panel: &PricePanel) -> Result<PricePanel> {
    let rows = read_rows(input, source, DIVIDEND_HEADER)?;
    if let Some(bad) = rows.iter().find(|r| r.value < 0.0) {
        return Err(parse_err(source, bad.line, format!("amount must not be negative, found {}", bad.value)));
    }
    reject_duplicates(&rows, source)?;
    let events = rows
        .into_iter()
        .map(|r| DividendEvent { date: r.date, ticker: r.ticker, amount: r.value });
    Ok(panel.with_dividends(events)?)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub fn read_prices(path: &Path) -> Result<PricePanel> {
    parse_prices(open(path)?, &path.display().to_string())
}

pub fn read_dividends(path: &Path, panel: &PricePanel) -> Result<PricePanel> {
    parse_dividends(open(path)?, &path.display().to_string(), panel)
}

/// Writes every observed price, ticker by ticker, so that parsing the output
/// rebuilds the same panel.
pub fn write_prices(panel: &PricePanel, out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PRICE_HEADER)?;
    for (ti, ticker) in panel.tickers().iter().enumerate() {
        for (di, date) in panel.dates().iter().enumerate() {
            if let Some(p) = panel.price(ti, di) {
                w.write_record([date.to_string(), ticker.clone(), p.to_string()])?;
            }
        }
    }
    w.flush()
}

pub fn write_dividends(panel: &PricePanel, out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIVIDEND_HEADER)?;
    for ev in panel.dividend_events() {
        w.write_record([ev.date.to_string(), ev.ticker, ev.amount.to_string()])?;
    }
    w.flush()
}
