//! Aligned date × asset price grid with sparse cash-dividend events.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::NaiveDate;

#[derive(Debug, Clone, PartialEq)]
pub enum PanelError {
    /// Close price that is not finite or not strictly positive.
    InvalidPrice { date: NaiveDate, ticker: String, close: f64 },
    DuplicateKey { date: NaiveDate, ticker: String },
    /// Negative or non-finite dividend amount.
    InvalidDividend { date: NaiveDate, ticker: String, amount: f64 },
    /// Dividend events whose (ticker, date) has no price in the panel.
    UnknownDividendKeys(Vec<DividendEvent>),
    EmptyUniverse,
}

impl fmt::Display for PanelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PanelError::InvalidPrice { date, ticker, close } => {
                write!(f, "invalid close {close} for {ticker} on {date}")
            }
            PanelError::DuplicateKey { date, ticker } => {
                write!(f, "duplicate price row for {ticker} on {date}")
            }
            PanelError::InvalidDividend { date, ticker, amount } => {
                write!(f, "invalid dividend {amount} for {ticker} on {date}")
            }
            PanelError::UnknownDividendKeys(events) => {
                write!(f, "{} dividend event(s) reference no price row:", events.len())?;
                for e in events {
                    write!(f, " ({}, {}, {})", e.date, e.ticker, e.amount)?;
                }
                Ok(())
            }
            PanelError::EmptyUniverse => f.write_str("no ticker has a complete price history"),
        }
    }
}

impl core::error::Error for PanelError {}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DividendEvent {
    pub date: NaiveDate,
    pub ticker: String,
    pub amount: f64,
}

/// Closing prices on the union of all observed dates, one row per ticker.
///
/// Cells are `None` where a ticker has no quote on a date. After
/// [`PricePanel::filter_complete`] every cell is present.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    tickers: Vec<String>,
    prices: Vec<Vec<Option<f64>>>,
    // (ticker index, date index) -> amount, strictly positive
    dividends: BTreeMap<(usize, usize), f64>,
}

/// A ticker removed by [`PricePanel::filter_complete`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dropped {
    pub ticker: String,
    pub missing_days: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub panel: PricePanel,
    pub dropped: Vec<Dropped>,
}

impl PricePanel {
    pub fn empty() -> Self {
        PricePanel {
            dates: Vec::new(),
            tickers: Vec::new(),
            prices: Vec::new(),
            dividends: BTreeMap::new(),
        }
    }

    /// Builds a panel from `(date, ticker, close)` observations in any order.
    ///
    /// Dates are the sorted union of all observed dates; tickers keep their
    /// first-seen order.
    pub fn from_observations<I, S>(rows: I) -> Result<Self, PanelError>
    where
        I: IntoIterator<Item = (NaiveDate, S, f64)>,
        S: Into<String>,
    {
        let mut ticker_index: BTreeMap<String, usize> = BTreeMap::new();
        let mut tickers: Vec<String> = Vec::new();
        let mut cells: BTreeMap<(usize, NaiveDate), f64> = BTreeMap::new();
        let mut dates: BTreeSet<NaiveDate> = BTreeSet::new();

        for (date, ticker, close) in rows {
            let ticker = ticker.into();
            if !(close.is_finite() && close > 0.0) {
                return Err(PanelError::InvalidPrice { date, ticker, close });
            }
            let idx = match ticker_index.get(&ticker) {
                Some(&i) => i,
                None => {
                    let i = tickers.len();
                    ticker_index.insert(ticker.clone(), i);
                    tickers.push(ticker.clone());
                    i
                }
            };
            if cells.insert((idx, date), close).is_some() {
                return Err(PanelError::DuplicateKey { date, ticker });
            }
            dates.insert(date);
        }

        let dates: Vec<NaiveDate> = dates.into_iter().collect();
        let mut prices = alloc::vec![alloc::vec![None; dates.len()]; tickers.len()];
        for ((ti, date), close) in cells {
            // dates is sorted and contains every observed date
            let di = dates.binary_search(&date).expect("date collected above");
            prices[ti][di] = Some(close);
        }

        Ok(PricePanel {
            dates,
            tickers,
            prices,
            dividends: BTreeMap::new(),
        })
    }

    /// Builds a complete panel from one full price row per ticker.
    pub fn from_columns(
        dates: Vec<NaiveDate>,
        tickers: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, PanelError> {
        assert_eq!(tickers.len(), rows.len(), "one price row per ticker");
        let mut obs = Vec::with_capacity(dates.len() * tickers.len());
        for (ticker, row) in tickers.iter().zip(&rows) {
            assert_eq!(row.len(), dates.len(), "one price per date");
            for (date, &close) in dates.iter().zip(row) {
                obs.push((*date, ticker.clone(), close));
            }
        }
        let mut panel = Self::from_observations(obs)?;
        // keep tickers that never appear (empty dates) out of the picture
        if dates.is_empty() {
            panel.tickers = tickers;
            panel.prices = alloc::vec![Vec::new(); panel.tickers.len()];
        }
        Ok(panel)
    }

    /// Returns a copy of the panel with dividend events attached.
    ///
    /// Zero amounts are accepted and dropped. Events on a (ticker, date) with
    /// no price are collected and reported together.
    pub fn with_dividends<I>(&self, events: I) -> Result<Self, PanelError>
    where
        I: IntoIterator<Item = DividendEvent>,
    {
        let mut out = self.clone();
        let mut unknown = Vec::new();
        for ev in events {
            if !(ev.amount.is_finite() && ev.amount >= 0.0) {
                return Err(PanelError::InvalidDividend {
                    date: ev.date,
                    ticker: ev.ticker,
                    amount: ev.amount,
                });
            }
            let key = self
                .ticker_index(&ev.ticker)
                .zip(self.date_index(ev.date))
                .filter(|&(ti, di)| self.prices[ti][di].is_some());
            match key {
                None => unknown.push(ev),
                Some(_) if ev.amount == 0.0 => {}
                Some(k) => {
                    // same-day events for one ticker accumulate
                    *out.dividends.entry(k).or_insert(0.0) += ev.amount;
                }
            }
        }
        if unknown.is_empty() {
            Ok(out)
        } else {
            Err(PanelError::UnknownDividendKeys(unknown))
        }
    }

    /// Keeps exactly the tickers with a price on every date of the panel.
    pub fn filter_complete(&self) -> Result<FilterOutcome, PanelError> {
        let mut keep = Vec::new();
        let mut dropped = Vec::new();
        for (ti, row) in self.prices.iter().enumerate() {
            let missing = row.iter().filter(|c| c.is_none()).count();
            if missing == 0 {
                keep.push(ti);
            } else {
                dropped.push(Dropped {
                    ticker: self.tickers[ti].clone(),
                    missing_days: missing,
                });
            }
        }
        if keep.is_empty() || self.dates.is_empty() {
            return Err(PanelError::EmptyUniverse);
        }
        Ok(FilterOutcome {
            panel: self.select(&keep),
            dropped,
        })
    }

    /// Sub-panel holding the given ticker indices, in the given order.
    pub fn select(&self, ticker_indices: &[usize]) -> Self {
        let mut remap = BTreeMap::new();
        for (new, &old) in ticker_indices.iter().enumerate() {
            remap.insert(old, new);
        }
        let dividends = self
            .dividends
            .iter()
            .filter_map(|(&(ti, di), &amt)| remap.get(&ti).map(|&n| ((n, di), amt)))
            .collect();
        PricePanel {
            dates: self.dates.clone(),
            tickers: ticker_indices.iter().map(|&i| self.tickers[i].clone()).collect(),
            prices: ticker_indices.iter().map(|&i| self.prices[i].clone()).collect(),
            dividends,
        }
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    pub fn n_tickers(&self) -> usize {
        self.tickers.len()
    }

    pub fn ticker_index(&self, ticker: &str) -> Option<usize> {
        self.tickers.iter().position(|t| t == ticker)
    }

    pub fn date_index(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    pub fn price(&self, ticker: usize, date: usize) -> Option<f64> {
        self.prices[ticker][date]
    }

    /// Raw row of a ticker, `None` where unobserved.
    pub fn price_row(&self, ticker: usize) -> &[Option<f64>] {
        &self.prices[ticker]
    }

    /// Full price row, or `None` when any day is missing.
    pub fn complete_row(&self, ticker: usize) -> Option<Vec<f64>> {
        self.prices[ticker].iter().copied().collect()
    }

    pub fn is_complete(&self) -> bool {
        self.prices.iter().all(|row| row.iter().all(Option::is_some))
    }

    pub fn dividend(&self, ticker: usize, date: usize) -> f64 {
        self.dividends.get(&(ticker, date)).copied().unwrap_or(0.0)
    }

    /// Dividend events ordered by (date, ticker index).
    pub fn dividend_events(&self) -> Vec<DividendEvent> {
        let mut evs: Vec<_> = self.dividends.iter().map(|(&(ti, di), &a)| (di, ti, a)).collect();
        evs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        evs.into_iter()
            .map(|(di, ti, amount)| DividendEvent {
                date: self.dates[di],
                ticker: self.tickers[ti].clone(),
                amount,
            })
            .collect()
    }

    /// Observed `(date, ticker, close)` triples ordered by date, then ticker.
    pub fn observations(&self) -> Vec<(NaiveDate, &str, f64)> {
        let mut out = Vec::new();
        for (di, date) in self.dates.iter().enumerate() {
            for (ti, ticker) in self.tickers.iter().enumerate() {
                if let Some(c) = self.prices[ti][di] {
                    out.push((*date, ticker.as_str(), c));
                }
            }
        }
        out
    }
}
