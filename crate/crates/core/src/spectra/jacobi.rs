use alloc::string::String;
use alloc::vec::Vec;

use super::{CorrelationMatrix, SpectraError};

pub const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a correlation matrix, sorted by descending eigenvalue.
///
/// Rank `k` (1-based) is the component with the `k`-th largest eigenvalue, so
/// rank `p` is the lowest-variance component. Each loading vector has unit
/// norm and its largest-magnitude entry positive; ties go to the lowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    tickers: Vec<String>,
    eigenvalues: Vec<f64>,
    loadings: Vec<Vec<f64>>,
    sweeps: usize,
}

impl EigenDecomposition {
    /// Wraps eigenpairs computed elsewhere. Eigenvalues must be finite and
    /// descending; loading vectors must be orthonormal to within 1e-9.
    pub fn from_parts(
        tickers: Vec<String>,
        eigenvalues: Vec<f64>,
        loadings: Vec<Vec<f64>>,
    ) -> Result<Self, SpectraError> {
        let p = tickers.len();
        if eigenvalues.len() != p || loadings.len() != p || loadings.iter().any(|v| v.len() != p) {
            return Err(SpectraError::InvalidMatrix("need p eigenvalues and p loading vectors of length p"));
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) || eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(SpectraError::InvalidMatrix("eigenvalues must be finite and descending"));
        }
        for a in 0..p {
            for b in a..p {
                let d: f64 = loadings[a].iter().zip(&loadings[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                if !((d - want).abs() <= 1e-9) {
                    return Err(SpectraError::InvalidMatrix("loading vectors must be orthonormal"));
                }
            }
        }
        Ok(EigenDecomposition { tickers, eigenvalues, loadings, sweeps: 0 })
    }

    pub fn dim(&self) -> usize {
        self.tickers.len()
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, rank: usize) -> f64 {
        self.eigenvalues[rank - 1]
    }

    /// Loading vector of the component with the given 1-based rank.
    pub fn loadings(&self, rank: usize) -> &[f64] {
        &self.loadings[rank - 1]
    }

    pub fn all_loadings(&self) -> &[Vec<f64>] {
        &self.loadings
    }

    /// Jacobi sweeps used.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Value of the component's linear combination for one observation of the
    /// standardized variables. Its variance over the sample is the eigenvalue.
    pub fn score(&self, rank: usize, standardized: &[f64]) -> f64 {
        self.loadings(rank).iter().zip(standardized).map(|(a, x)| a * x).sum()
    }
}

/// Full spectrum of a correlation matrix by cyclic Jacobi rotations.
pub fn eigendecompose(cm: &CorrelationMatrix) -> Result<EigenDecomposition, SpectraError> {
    let p = cm.dim();
    let (values, vectors, sweeps) = jacobi_eigen(cm.values(), p)?;

    // stable: equal eigenvalues keep rotation output order
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut eigenvalues = Vec::with_capacity(p);
    let mut loadings = Vec::with_capacity(p);
    for k in order {
        eigenvalues.push(values[k]);
        let mut v: Vec<f64> = (0..p).map(|i| vectors[i * p + k]).collect();
        orient(&mut v);
        loadings.push(v);
    }
    Ok(EigenDecomposition {
        tickers: cm.tickers().to_vec(),
        eigenvalues,
        loadings,
        sweeps,
    })
}

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is positive.
fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    libm::sqrt(s)
}

/// Cyclic Jacobi on a symmetric row-major `n × n` matrix.
///
/// Returns unsorted eigenvalues, the eigenvector matrix (column `k` pairs with
/// eigenvalue `k`, row-major) and the number of sweeps. Stops once the
/// Frobenius norm of the off-diagonal part is at most `1e-12 * n`.
pub fn jacobi_eigen(matrix: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>, usize), SpectraError> {
    assert_eq!(matrix.len(), n * n, "matrix must be n*n");
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(SpectraError::InvalidMatrix("entries must be finite"));
    }
    let mut a = matrix.to_vec();
    let mut v = alloc::vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let tol = 1e-12 * n as f64;

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a, n);
        if off <= tol {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(SpectraError::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                rotate(&mut a, &mut v, n, p, q, apq);
            }
        }
    }

    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, v, sweeps))
}

fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, apq: f64) {
    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;

    a[p * n + p] -= t * apq;
    a[q * n + q] += t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp;
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq;
    }
    for r in 0..n {
        let vrp = v[r * n + p];
        let vrq = v[r * n + q];
        v[r * n + p] = c * vrp - s * vrq;
        v[r * n + q] = s * vrp + c * vrq;
    }
}
