//! Dividend factors, dividend-adjusted prices and forward simple returns.
//!
//! On a day with a cash dividend `D(t)` the daily factor is `1 + D(t)/P(t)`,
//! using the close of the same day; otherwise it is 1. The cumulative factor is
//! the running product of daily factors and the adjusted price is
//! `P(t) * cumulative(t)`. Returns are forward-indexed:
//! `R(t) = (adj(t+1) - adj(t)) / adj(t)` is labelled with its start date `t`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::NaiveDate;

use crate::panel::PricePanel;

#[derive(Debug, Clone, PartialEq)]
pub enum ReturnsError {
    UnknownTicker(String),
    IncompleteTicker(String),
    /// Fewer than three price dates leave fewer than two returns.
    InsufficientHistory { dates: usize },
}

impl fmt::Display for ReturnsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReturnsError::UnknownTicker(t) => write!(f, "unknown ticker {t}"),
            ReturnsError::IncompleteTicker(t) => write!(f, "ticker {t} has missing prices"),
            ReturnsError::InsufficientHistory { dates } => {
                write!(f, "insufficient history: {dates} price dates, need at least 3")
            }
        }
    }
}

impl core::error::Error for ReturnsError {}

fn complete_row(panel: &PricePanel, ticker: &str) -> Result<(usize, Vec<f64>), ReturnsError> {
    let ti = panel
        .ticker_index(ticker)
        .ok_or_else(|| ReturnsError::UnknownTicker(ticker.into()))?;
    let row = panel
        .complete_row(ti)
        .ok_or_else(|| ReturnsError::IncompleteTicker(ticker.into()))?;
    Ok((ti, row))
}

fn cumulative_factors(panel: &PricePanel, ti: usize, prices: &[f64]) -> Vec<f64> {
    let mut acc = 1.0;
    prices
        .iter()
        .enumerate()
        .map(|(di, &p)| {
            let d = panel.dividend(ti, di);
            if d > 0.0 {
                acc *= 1.0 + d / p;
            }
            acc
        })
        .collect()
}

/// Cumulative dividend factor for each date of the panel.
pub fn dividend_factors(panel: &PricePanel, ticker: &str) -> Result<Vec<f64>, ReturnsError> {
    let (ti, prices) = complete_row(panel, ticker)?;
    Ok(cumulative_factors(panel, ti, &prices))
}

/// Dividend-adjusted price for each date of the panel.
pub fn adjust_prices(panel: &PricePanel, ticker: &str) -> Result<Vec<f64>, ReturnsError> {
    let (ti, prices) = complete_row(panel, ticker)?;
    let factors = cumulative_factors(panel, ti, &prices);
    Ok(prices.iter().zip(&factors).map(|(p, f)| p * f).collect())
}

/// Simple returns of dividend-adjusted prices, one row per ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    price_dates: Vec<NaiveDate>,
    tickers: Vec<String>,
    returns: Vec<Vec<f64>>,
    adjusted: Vec<Vec<f64>>,
}

impl ReturnPanel {
    /// Builds a panel directly from return series, integrating adjusted
    /// prices from 1.0. `price_dates` has one more entry than each series.
    pub fn from_returns(price_dates: Vec<NaiveDate>, tickers: Vec<String>, returns: Vec<Vec<f64>>) -> Self {
        assert_eq!(tickers.len(), returns.len(), "one series per ticker");
        let adjusted = returns
            .iter()
            .map(|r| {
                assert_eq!(r.len() + 1, price_dates.len(), "series length must be dates - 1");
                let mut v = 1.0;
                core::iter::once(1.0)
                    .chain(r.iter().map(|x| {
                        v *= 1.0 + x;
                        v
                    }))
                    .collect()
            })
            .collect();
        ReturnPanel { price_dates, tickers, returns, adjusted }
    }

    /// Start date of each return.
    pub fn dates(&self) -> &[NaiveDate] {
        &self.price_dates[..self.price_dates.len().saturating_sub(1)]
    }

    /// All price dates (one more than [`ReturnPanel::dates`]).
    pub fn price_dates(&self) -> &[NaiveDate] {
        &self.price_dates
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn n_tickers(&self) -> usize {
        self.tickers.len()
    }

    pub fn n_returns(&self) -> usize {
        self.price_dates.len().saturating_sub(1)
    }

    pub fn series(&self, ticker: usize) -> &[f64] {
        &self.returns[ticker]
    }

    pub fn all_series(&self) -> &[Vec<f64>] {
        &self.returns
    }

    pub fn adjusted_prices(&self, ticker: usize) -> &[f64] {
        &self.adjusted[ticker]
    }

    pub fn ticker_index(&self, ticker: &str) -> Option<usize> {
        self.tickers.iter().position(|t| t == ticker)
    }

    /// Sub-panel with the given tickers in the given order.
    pub fn select(&self, ticker_indices: &[usize]) -> Self {
        ReturnPanel {
            price_dates: self.price_dates.clone(),
            tickers: ticker_indices.iter().map(|&i| self.tickers[i].clone()).collect(),
            returns: ticker_indices.iter().map(|&i| self.returns[i].clone()).collect(),
            adjusted: ticker_indices.iter().map(|&i| self.adjusted[i].clone()).collect(),
        }
    }

    /// Returns `start..start + len`, with the matching `len + 1` price dates.
    pub fn window(&self, start: usize, len: usize) -> Self {
        let end = start + len;
        ReturnPanel {
            price_dates: self.price_dates[start..=end].to_vec(),
            tickers: self.tickers.clone(),
            returns: self.returns.iter().map(|r| r[start..end].to_vec()).collect(),
            adjusted: self.adjusted.iter().map(|a| a[start..=end].to_vec()).collect(),
        }
    }
}

/// Computes adjusted prices and forward simple returns for every ticker.
pub fn compute_returns(panel: &PricePanel) -> Result<ReturnPanel, ReturnsError> {
    if panel.n_dates() < 3 {
        return Err(ReturnsError::InsufficientHistory { dates: panel.n_dates() });
    }
    let mut returns = Vec::with_capacity(panel.n_tickers());
    let mut adjusted = Vec::with_capacity(panel.n_tickers());
    for ticker in panel.tickers() {
        let adj = adjust_prices(panel, ticker)?;
        returns.push(adj.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect());
        adjusted.push(adj);
    }
    Ok(ReturnPanel {
        price_dates: panel.dates().to_vec(),
        tickers: panel.tickers().to_vec(),
        returns,
        adjusted,
    })
}
