use alloc::string::String;
use alloc::vec::Vec;

use super::SpectraError;
use crate::returns::ReturnPanel;

/// Symmetric p × p Pearson correlation matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    tickers: Vec<String>,
    values: Vec<f64>,
}

impl CorrelationMatrix {
    /// Wraps precomputed values after checking symmetry, unit diagonal and
    /// the `[-1, 1]` range.
    pub fn from_values(tickers: Vec<String>, values: Vec<f64>) -> Result<Self, SpectraError> {
        let p = tickers.len();
        if values.len() != p * p {
            return Err(SpectraError::InvalidMatrix("values must be p*p"));
        }
        for i in 0..p {
            if values[i * p + i] != 1.0 {
                return Err(SpectraError::InvalidMatrix("diagonal must be exactly 1"));
            }
            for j in 0..p {
                let v = values[i * p + j];
                if !v.is_finite() || !(-1.0..=1.0).contains(&v) {
                    return Err(SpectraError::InvalidMatrix("entries must lie in [-1, 1]"));
                }
                if v != values[j * p + i] {
                    return Err(SpectraError::InvalidMatrix("matrix must be symmetric"));
                }
            }
        }
        Ok(CorrelationMatrix { tickers, values })
    }

    pub fn dim(&self) -> usize {
        self.tickers.len()
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim() + j]
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same matrix with rows and columns reordered: entry `(a, b)` of the
    /// result is entry `(order[a], order[b])` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let p = self.dim();
        assert_eq!(order.len(), p);
        let mut values = alloc::vec![0.0; p * p];
        for a in 0..p {
            for b in 0..p {
                values[a * p + b] = self.get(order[a], order[b]);
            }
        }
        CorrelationMatrix {
            tickers: order.iter().map(|&i| self.tickers[i].clone()).collect(),
            values,
        }
    }
}

/// Correlation over the full common sample of a return panel.
pub fn correlation(rp: &ReturnPanel) -> Result<CorrelationMatrix, SpectraError> {
    let series: Vec<&[f64]> = rp.all_series().iter().map(Vec::as_slice).collect();
    correlation_of(rp.tickers(), &series)
}

/// Sample Pearson correlation of equal-length series.
///
/// Each series is centred once; every unordered pair is computed once and
/// mirrored, the diagonal is set to exactly 1, and entries are clamped to
/// `[-1, 1]`.
pub fn correlation_of(tickers: &[String], series: &[&[f64]]) -> Result<CorrelationMatrix, SpectraError> {
    assert_eq!(tickers.len(), series.len(), "one series per ticker");
    let p = series.len();
    let n = series.first().map_or(0, |s| s.len());
    if n < 2 {
        return Err(SpectraError::InsufficientObservations { observations: n });
    }

    let mut centred: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut norms = Vec::with_capacity(p);
    for (ticker, s) in tickers.iter().zip(series) {
        assert_eq!(s.len(), n, "series lengths differ");
        let first = s[0];
        if s.iter().all(|&x| x == first) {
            return Err(SpectraError::DegenerateSeries(ticker.clone()));
        }
        let mean = s.iter().sum::<f64>() / n as f64;
        let c: Vec<f64> = s.iter().map(|x| x - mean).collect();
        let ss: f64 = c.iter().map(|x| x * x).sum();
        if !(ss > 0.0) || !ss.is_finite() {
            return Err(SpectraError::DegenerateSeries(ticker.clone()));
        }
        norms.push(libm::sqrt(ss));
        centred.push(c);
    }

    let mut values = alloc::vec![0.0; p * p];
    for i in 0..p {
        values[i * p + i] = 1.0;
        for j in (i + 1)..p {
            let cross: f64 = centred[i].iter().zip(&centred[j]).map(|(a, b)| a * b).sum();
            let r = (cross / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            values[i * p + j] = r;
            values[j * p + i] = r;
        }
    }
    Ok(CorrelationMatrix { tickers: tickers.to_vec(), values })
}
