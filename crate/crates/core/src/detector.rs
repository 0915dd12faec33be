//! Detection of near-constant relationships in the lowest-variance components.
//!
//! If a component with a small eigenvalue puts large weight on a few assets and
//! almost none on the rest, the weighted sum of those assets barely moves: they
//! are highly correlated. Two assets with opposite-signed loadings in such a
//! component are positively correlated; equal signs mean negative correlation.
//!
//! Detection runs in four steps:
//!
//! 1. pick the trailing components (fixed count or eigenvalue ceiling) and find
//!    each one's significant loadings, `|a| >= max(abs_threshold,
//!    rel_threshold * max|a|)`;
//! 2. keep only components whose remainder is near zero, judged jointly
//!    (see [`kept_components`]): diffuse noise components spread over many
//!    assets and fail, while any rotation of a few tight relationships
//!    passes;
//! 3. take every asset significant in some kept component and join two such
//!    assets when both reach `noise_floor` in the same kept component;
//!    connected components of this graph are the candidate groups;
//! 4. split each component by loading direction: two members stay together
//!    when their loading rows over the component's detecting PCs are parallel
//!    or antiparallel to within `link_threshold` (absolute cosine). This is
//!    the sign-pattern split made independent of the basis chosen inside a
//!    cluster of near-equal eigenvalues.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::NaiveDate;

use crate::returns::ReturnPanel;
use crate::spectra::{correlation_of, eigendecompose, EigenDecomposition, SpectraError};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DetectorConfig {
    /// Number of smallest-eigenvalue components to scan.
    pub trailing_count: usize,
    /// When set, scan every component with eigenvalue below this instead.
    pub eigenvalue_ceiling: Option<f64>,
    pub abs_threshold: f64,
    /// Fraction of the component's largest absolute loading.
    pub rel_threshold: f64,
    pub min_group_size: usize,
    /// Loadings below this magnitude count as near zero.
    pub noise_floor: f64,
    /// The kept components together may touch at most this share of the
    /// assets (never fewer than 2) beyond one asset per component.
    pub max_spread_fraction: f64,
    /// Minimum absolute cosine between two members' loading rows.
    pub link_threshold: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            trailing_count: 6,
            eigenvalue_ceiling: None,
            abs_threshold: 0.2,
            rel_threshold: 0.5,
            min_group_size: 2,
            noise_floor: 0.05,
            max_spread_fraction: 0.25,
            link_threshold: 0.1,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), DetectError> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if self.trailing_count == 0 {
            return Err(DetectError::Config("trailing_count must be at least 1".into()));
        }
        if !unit(self.abs_threshold) {
            return Err(DetectError::Config("abs_threshold must lie in (0, 1]".into()));
        }
        if !unit(self.rel_threshold) {
            return Err(DetectError::Config("rel_threshold must lie in (0, 1]".into()));
        }
        if self.min_group_size < 2 {
            return Err(DetectError::Config("min_group_size must be at least 2".into()));
        }
        if !(self.noise_floor >= 0.0 && self.noise_floor < self.abs_threshold) {
            return Err(DetectError::Config("noise_floor must lie in [0, abs_threshold)".into()));
        }
        if !unit(self.max_spread_fraction) {
            return Err(DetectError::Config("max_spread_fraction must lie in (0, 1]".into()));
        }
        if !unit(self.link_threshold) {
            return Err(DetectError::Config("link_threshold must lie in (0, 1]".into()));
        }
        if let Some(c) = self.eigenvalue_ceiling {
            if !(c.is_finite() && c > 0.0) {
                return Err(DetectError::Config("eigenvalue_ceiling must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DetectError {
    Config(String),
    TooFewAssets { assets: usize },
    Window(String),
    Spectra(SpectraError),
}

impl fmt::Display for DetectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectError::Config(why) => write!(f, "invalid detector configuration: {why}"),
            DetectError::TooFewAssets { assets } => write!(f, "need at least 2 assets, got {assets}"),
            DetectError::Window(why) => write!(f, "invalid rolling window: {why}"),
            DetectError::Spectra(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DetectError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            DetectError::Spectra(e) => Some(e),
            _ => None,
        }
    }
}

impl From<SpectraError> for DetectError {
    fn from(e: SpectraError) -> Self {
        DetectError::Spectra(e)
    }
}

/// Implied correlation sign of one member pair.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairSign {
    pub a: String,
    pub b: String,
    /// +1 for positive correlation, -1 for negative.
    pub sign: i8,
    /// Per-component votes from every detecting PC in which both are
    /// significant, in `detecting_pcs` order.
    pub votes: Vec<i8>,
    pub consistent: bool,
}

/// A set of assets that move together, with the evidence that found them.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RelationshipGroup {
    pub members: Vec<String>,
    /// Positions of the members in the decomposition's ticker order.
    pub member_indices: Vec<usize>,
    /// 1-based ranks, largest rank (smallest eigenvalue) first.
    pub detecting_pcs: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    /// `loadings[m][k]`: loading of member `m` on `detecting_pcs[k]`.
    pub loadings: Vec<Vec<f64>>,
    /// Sign of each significant loading, 0 where the member is not significant.
    pub sign_pattern: Vec<Vec<i8>>,
    pub max_abs_loading: Vec<f64>,
    pub implied_signs: Vec<PairSign>,
    /// Set when any pair's per-component votes disagree.
    pub inconsistent: bool,
}

impl RelationshipGroup {
    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, ticker: &str) -> bool {
        self.members.iter().any(|m| m == ticker)
    }

    pub fn implied_sign(&self, a: &str, b: &str) -> Option<i8> {
        self.implied_signs
            .iter()
            .find(|s| (s.a == a && s.b == b) || (s.a == b && s.b == a))
            .map(|s| s.sign)
    }
}

/// `(ticker index, loading)` for every significant loading of component `rank`.
pub fn significant_loadings(ed: &EigenDecomposition, rank: usize, cfg: &DetectorConfig) -> Vec<(usize, f64)> {
    let alpha = ed.loadings(rank);
    let peak = alpha.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    let cut = cfg.abs_threshold.max(cfg.rel_threshold * peak);
    alpha
        .iter()
        .enumerate()
        .filter(|(_, a)| a.abs() >= cut)
        .map(|(i, &a)| (i, a))
        .collect()
}

/// Number of loadings at or above `floor` in magnitude.
pub fn support_size(alpha: &[f64], floor: f64) -> usize {
    alpha.iter().filter(|a| a.abs() >= floor).count()
}

/// The scanned components whose remainder is near zero, as a set.
///
/// `d` components spanning exactly `r` separate relationships touch `d + r`
/// assets whatever basis the solver picked inside a cluster of near-equal
/// eigenvalues, while a diffuse component touches many assets on its own.
/// Components are therefore judged jointly: taken from the smallest
/// eigenvalue up, and repeated until nothing changes, a component is kept
/// when the assets at or above `noise_floor` in any kept component, less the
/// number of kept components, stay within `max(2, max_spread_fraction * p)`.
/// A component that does not fit alone is retried together with later ones.
/// Components without significant loadings are never kept.
pub fn kept_components(ed: &EigenDecomposition, cfg: &DetectorConfig) -> Result<Vec<usize>, DetectError> {
    let p = ed.dim();
    let limit = ((cfg.max_spread_fraction * p as f64) as usize).max(2);
    let candidates: Vec<usize> = scanned_ranks(ed, cfg)?
        .into_iter()
        .filter(|&rank| !significant_loadings(ed, rank, cfg).is_empty())
        .collect();
    let mut kept = alloc::vec![false; candidates.len()];
    let mut touched = alloc::vec![false; p];
    let mut n_touched: usize = 0;
    let mut n_kept = 0;
    let support = |c: usize| {
        let alpha = ed.loadings(candidates[c]);
        (0..p).filter(move |&i| alpha[i].abs() >= cfg.noise_floor)
    };
    loop {
        let mut changed = false;
        // rejected components retried together with the next one, so that
        // two rotated halves of one cluster can enter at once
        let mut pending: Vec<usize> = Vec::new();
        for c in 0..candidates.len() {
            if kept[c] {
                continue;
            }
            let with_pending: Vec<usize> = pending.iter().copied().chain(core::iter::once(c)).collect();
            let tries: &[&[usize]] = if pending.is_empty() { &[&[c]] } else { &[&with_pending, &[c]] };
            for set in tries {
                let mut seen = touched.clone();
                let mut fresh = 0;
                for &m in *set {
                    for i in support(m) {
                        if !seen[i] {
                            seen[i] = true;
                            fresh += 1;
                        }
                    }
                }
                if (n_touched + fresh).saturating_sub(n_kept + set.len()) <= limit {
                    for &m in *set {
                        kept[m] = true;
                    }
                    touched = seen;
                    n_touched += fresh;
                    n_kept += set.len();
                    changed = true;
                    break;
                }
            }
            pending.retain(|&m| !kept[m]);
            if !kept[c] {
                pending.push(c);
            }
        }
        if !changed {
            break;
        }
    }
    Ok(candidates.into_iter().zip(kept).filter(|(_, k)| *k).map(|(r, _)| r).collect())
}

/// Ranks to scan, largest rank first.
pub fn scanned_ranks(ed: &EigenDecomposition, cfg: &DetectorConfig) -> Result<Vec<usize>, DetectError> {
    let p = ed.dim();
    match cfg.eigenvalue_ceiling {
        Some(ceiling) => Ok((1..=p).rev().filter(|&k| ed.eigenvalue(k) < ceiling).collect()),
        None => {
            if cfg.trailing_count >= p {
                return Err(DetectError::Config(alloc::format!(
                    "trailing_count {} must be below the number of assets {p}",
                    cfg.trailing_count
                )));
            }
            Ok((p + 1 - cfg.trailing_count..=p).rev().collect())
        }
    }
}

struct Scanned {
    rank: usize,
    significant: Vec<(usize, f64)>,
    /// Assets at or above the noise floor.
    support: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // smaller root wins so labels do not depend on edge order
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

/// Groups of `nodes` connected by `linked`, each sorted, ordered by first member.
fn components(nodes: &[usize], mut linked: impl FnMut(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    for a in 0..nodes.len() {
        for b in (a + 1)..nodes.len() {
            if linked(nodes[a], nodes[b]) {
                union(&mut parent, a, b);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = alloc::vec![None; nodes.len()];
    for a in 0..nodes.len() {
        let r = find(&mut parent, a);
        match root_slot[r] {
            Some(s) => out[s].push(nodes[a]),
            None => {
                root_slot[r] = Some(out.len());
                out.push(alloc::vec![nodes[a]]);
            }
        }
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort_by_key(|c| c[0]);
    out
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Scans the trailing components of `ed` for groups of highly correlated assets.
pub fn detect(ed: &EigenDecomposition, cfg: &DetectorConfig) -> Result<Vec<RelationshipGroup>, DetectError> {
    cfg.validate()?;
    let p = ed.dim();
    if p < 2 {
        return Err(DetectError::TooFewAssets { assets: p });
    }

    let scanned: Vec<Scanned> = kept_components(ed, cfg)?
        .into_iter()
        .map(|rank| Scanned {
            rank,
            significant: significant_loadings(ed, rank, cfg),
            support: (0..p).filter(|&i| ed.loadings(rank)[i].abs() >= cfg.noise_floor).collect(),
        })
        .collect();

    // members must be significant somewhere; they are joined through any kept
    // component in which both carry weight, since rotation inside a cluster of
    // near-equal eigenvalues can leave a member significant only on its own
    let mut linked = alloc::vec![false; p * p];
    let mut member = alloc::vec![false; p];
    for s in &scanned {
        for &(i, _) in &s.significant {
            member[i] = true;
        }
        for &i in &s.support {
            for &j in &s.support {
                linked[i * p + j] = true;
            }
        }
    }
    let nodes: Vec<usize> = (0..p).filter(|&i| member[i]).collect();
    let candidates = components(&nodes, |a, b| linked[a * p + b]);

    let mut groups = Vec::new();
    for comp in candidates {
        let pcs: Vec<&Scanned> = scanned
            .iter()
            .filter(|s| s.support.iter().any(|i| comp.contains(i)))
            .collect();
        let row = |i: usize| -> Vec<f64> { pcs.iter().map(|s| ed.loadings(s.rank)[i]).collect() };
        let rows: Vec<Vec<f64>> = comp.iter().map(|&i| row(i)).collect();
        let pos = |i: usize| comp.iter().position(|&c| c == i).unwrap();
        let subgroups = components(&comp, |a, b| {
            let (ra, rb) = (&rows[pos(a)], &rows[pos(b)]);
            cosine(ra, rb).abs() >= cfg.link_threshold
        });
        for members in subgroups {
            if members.len() >= cfg.min_group_size {
                groups.push(build_group(ed, &scanned, &members));
            }
        }
    }
    groups.sort_by(|a, b| {
        a.smallest_eigenvalue()
            .total_cmp(&b.smallest_eigenvalue())
            .then(a.member_indices[0].cmp(&b.member_indices[0]))
    });
    Ok(groups)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let den = libm::sqrt(dot(a, a) * dot(b, b));
    if den > 0.0 {
        dot(a, b) / den
    } else {
        0.0
    }
}

fn build_group(ed: &EigenDecomposition, scanned: &[Scanned], members: &[usize]) -> RelationshipGroup {
    let pcs: Vec<&Scanned> = scanned
        .iter()
        .filter(|s| s.significant.iter().any(|(i, _)| members.contains(i)))
        .collect();
    let tickers = ed.tickers();
    let loadings: Vec<Vec<f64>> = members
        .iter()
        .map(|&i| pcs.iter().map(|s| ed.loadings(s.rank)[i]).collect())
        .collect();
    let sign_pattern: Vec<Vec<i8>> = members
        .iter()
        .map(|&i| {
            pcs.iter()
                .map(|s| s.significant.iter().find(|(j, _)| *j == i).map_or(0, |&(_, a)| sign_of(a)))
                .collect()
        })
        .collect();

    let mut implied_signs = Vec::new();
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            let votes: Vec<i8> = sign_pattern[a]
                .iter()
                .zip(&sign_pattern[b])
                .filter(|(x, y)| **x != 0 && **y != 0)
                .map(|(x, y)| -(x * y))
                .collect();
            let consistent = votes.windows(2).all(|w| w[0] == w[1]);
            // summed over the detecting PCs; reduces to the single-PC rule when
            // the pair is the only structure in one component
            let sign = match sign_of(-dot(&loadings[a], &loadings[b])) {
                0 => votes.first().copied().unwrap_or(1),
                s => s,
            };
            implied_signs.push(PairSign {
                a: tickers[members[a]].clone(),
                b: tickers[members[b]].clone(),
                sign,
                votes,
                consistent,
            });
        }
    }
    let inconsistent = implied_signs.iter().any(|s| !s.consistent);

    RelationshipGroup {
        members: members.iter().map(|&i| tickers[i].clone()).collect(),
        member_indices: members.to_vec(),
        detecting_pcs: pcs.iter().map(|s| s.rank).collect(),
        eigenvalues: pcs.iter().map(|s| ed.eigenvalue(s.rank)).collect(),
        max_abs_loading: loadings
            .iter()
            .map(|r| r.iter().fold(0.0_f64, |m, a| m.max(a.abs())))
            .collect(),
        loadings,
        sign_pattern,
        implied_signs,
        inconsistent,
    }
}

/// Detection result for one rolling window.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WindowDetection {
    /// Index of the first return in the window.
    pub start_index: usize,
    pub start_date: NaiveDate,
    /// Start date of the last return in the window.
    pub end_date: NaiveDate,
    pub observations: usize,
    pub assets: usize,
    /// Tickers left out of this window for having zero variance in it.
    pub dropped: Vec<String>,
    /// Fewer observations than assets + 1: the correlation matrix is singular.
    pub rank_deficient: bool,
    pub groups: Vec<RelationshipGroup>,
}

/// Start indices of the windows of `window` returns, `step` apart.
pub fn window_starts(n_returns: usize, window: usize, step: usize) -> Result<Vec<usize>, DetectError> {
    if window < 3 {
        return Err(DetectError::Window(alloc::format!("window {window} is below 3 observations")));
    }
    if window > n_returns {
        return Err(DetectError::Window(alloc::format!(
            "window {window} exceeds the {n_returns} available returns"
        )));
    }
    if step == 0 {
        return Err(DetectError::Window("step must be at least 1".into()));
    }
    Ok((0..=n_returns - window).step_by(step).collect())
}

/// Correlation, eigendecomposition and detection on one window of returns.
pub fn detect_window(
    rp: &ReturnPanel,
    start: usize,
    window: usize,
    cfg: &DetectorConfig,
) -> Result<WindowDetection, DetectError> {
    let slice = |i: usize| &rp.series(i)[start..start + window];
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    for (i, t) in rp.tickers().iter().enumerate() {
        let s = slice(i);
        if s.iter().all(|&x| x == s[0]) {
            dropped.push(t.clone());
        } else {
            kept.push(i);
        }
    }
    if kept.len() < 2 {
        return Err(DetectError::TooFewAssets { assets: kept.len() });
    }
    let tickers: Vec<String> = kept.iter().map(|&i| rp.tickers()[i].clone()).collect();
    let series: Vec<&[f64]> = kept.iter().map(|&i| slice(i)).collect();
    let cm = correlation_of(&tickers, &series)?;
    let ed = eigendecompose(&cm)?;
    let groups = detect(&ed, cfg)?;
    Ok(WindowDetection {
        start_index: start,
        start_date: rp.dates()[start],
        end_date: rp.dates()[start + window - 1],
        observations: window,
        assets: kept.len(),
        dropped,
        rank_deficient: window < kept.len() + 1,
        groups,
    })
}

/// Detection repeated over sliding windows, in window order.
pub fn rolling_detect(
    rp: &ReturnPanel,
    window: usize,
    step: usize,
    cfg: &DetectorConfig,
) -> Result<Vec<WindowDetection>, DetectError> {
    cfg.validate()?;
    window_starts(rp.n_returns(), window, step)?
        .into_iter()
        .map(|start| detect_window(rp, start, window, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::CorrelationMatrix;
    use alloc::vec;

    fn names(p: usize) -> Vec<String> {
        (0..p).map(|i| alloc::format!("T{i}")).collect()
    }

    fn unit(p: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; p];
        v[i] = 1.0;
        v
    }

    #[test]
    fn significance_threshold_arithmetic() {
        let cfg = DetectorConfig::default();
        let mut pcs: Vec<Vec<f64>> = (0..4).map(|i| unit(4, i)).collect();
        // an orthonormal 4-basis whose last vector is close to (0.70, -0.71, 0.02, 0.01)
        let last = [0.70, -0.71, 0.02, 0.01];
        let n = libm::sqrt(last.iter().map(|x| x * x).sum::<f64>());
        let last: Vec<f64> = last.iter().map(|x| x / n).collect();
        pcs[3] = last.clone();
        // Gram-Schmidt the others against it
        for k in 0..3 {
            let mut v = unit(4, k);
            for prev in pcs[..k].iter().chain(core::iter::once(&pcs[3])) {
                let d = dot(&v, prev);
                v.iter_mut().zip(prev).for_each(|(x, y)| *x -= d * y);
            }
            let n = libm::sqrt(dot(&v, &v));
            pcs[k] = v.iter().map(|x| x / n).collect();
        }
        let ed = EigenDecomposition::from_parts(names(4), vec![2.0, 1.0, 0.9, 0.1], pcs).unwrap();
        let sig: Vec<usize> = significant_loadings(&ed, 4, &cfg).iter().map(|s| s.0).collect();
        assert_eq!(sig, vec![0, 1]);
    }

    #[test]
    fn flat_component_has_no_significant_loading() {
        let p = 100;
        let flat = vec![0.1; p];
        let mut pcs = vec![flat];
        // Householder basis completing the flat vector
        let mut u = vec![0.1; p];
        u[0] -= 1.0;
        let uu = dot(&u, &u);
        for k in 1..p {
            let e = unit(p, k);
            let c = 2.0 * dot(&u, &e) / uu;
            pcs.push(e.iter().zip(&u).map(|(x, y)| x - c * y).collect());
        }
        pcs.rotate_left(1);
        let vals: Vec<f64> = (0..p).map(|k| (p - k) as f64).collect();
        let ed = EigenDecomposition::from_parts(names(p), vals, pcs).unwrap();
        assert!(significant_loadings(&ed, p, &DetectorConfig::default()).is_empty());
    }

    #[test]
    fn perfect_pair_of_two() {
        let cm = CorrelationMatrix::from_values(names(2), vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let ed = crate::spectra::eigendecompose(&cm).unwrap();
        let cfg = DetectorConfig { trailing_count: 1, ..Default::default() };
        let groups = detect(&ed, &cfg).unwrap();
        assert_eq!(groups.len(), 1);
        let g = &groups[0];
        assert_eq!(g.members, vec!["T0", "T1"]);
        assert_eq!(g.detecting_pcs, vec![2]);
        assert!(g.eigenvalues[0].abs() < 1e-15);
        assert_eq!(g.sign_pattern, vec![vec![1], vec![-1]]);
        assert_eq!(g.implied_sign("T0", "T1"), Some(1));
        assert!(!g.inconsistent);
    }

    /// Sixteen assets; the last two components carry assets 0..4 with sign
    /// patterns A(+,-), B(+,-), C(+,+), D(+,+).
    fn two_pairs_sharing_components() -> EigenDecomposition {
        let p = 16;
        let span = [
            vec![0.5, -0.5, 0.5, -0.5],
            vec![0.5, -0.5, -0.5, 0.5],
            vec![0.5, 0.5, 0.5, 0.5],
            vec![-0.5, -0.5, 0.5, 0.5],
        ];
        let mut pcs: Vec<Vec<f64>> = Vec::new();
        for k in 0..2 {
            let mut v = vec![0.0; p];
            v[..4].copy_from_slice(&span[k]);
            pcs.push(v);
        }
        for i in 4..p {
            pcs.push(unit(p, i));
        }
        for k in 2..4 {
            let mut v = vec![0.0; p];
            v[..4].copy_from_slice(&span[k]);
            pcs.push(v);
        }
        let mut vals = vec![1.9, 1.8];
        vals.extend((4..p).map(|i| 1.5 - 0.01 * i as f64));
        vals.extend([0.02, 0.01]);
        EigenDecomposition::from_parts(names(p), vals, pcs).unwrap()
    }

    #[test]
    fn sign_patterns_split_a_shared_neighbourhood() {
        let ed = two_pairs_sharing_components();
        let cfg = DetectorConfig::default();
        for rank in [15, 16] {
            let sig: Vec<usize> = significant_loadings(&ed, rank, &cfg).iter().map(|s| s.0).collect();
            assert_eq!(sig, vec![0, 1, 2, 3]);
        }
        let groups = detect(&ed, &cfg).unwrap();
        let members: Vec<&[usize]> = groups.iter().map(|g| g.member_indices.as_slice()).collect();
        assert_eq!(members, vec![&[0, 1][..], &[2, 3][..]]);
        let ab = &groups[0];
        assert_eq!(ab.detecting_pcs, vec![16, 15]);
        assert_eq!(ab.sign_pattern, vec![vec![-1, 1], vec![-1, 1]]);
        assert_eq!(groups[1].sign_pattern, vec![vec![1, 1], vec![1, 1]]);
        for g in &groups {
            assert_eq!(g.implied_signs.len(), 1);
            assert_eq!(g.implied_signs[0].sign, -1);
            assert_eq!(g.implied_signs[0].votes, vec![-1, -1]);
            assert!(!g.inconsistent);
        }
    }

    #[test]
    fn rotated_relationships_are_kept_jointly() {
        // eight assets, pairs (0,1) and (2,3) sharing two mixed components;
        // each touches four assets, above the limit of two on its own
        let p = 8;
        let mut pcs = vec![
            vec![0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0],
            vec![-0.5, -0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0],
        ];
        pcs.extend((4..p).map(|i| unit(p, i)));
        pcs.push(vec![0.5, -0.5, 0.5, -0.5, 0.0, 0.0, 0.0, 0.0]);
        pcs.push(vec![0.5, -0.5, -0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let vals = vec![1.9, 1.8, 1.2, 1.1, 1.0, 0.9, 0.02, 0.01];
        let ed = EigenDecomposition::from_parts(names(p), vals, pcs).unwrap();
        let cfg = DetectorConfig { trailing_count: 2, ..Default::default() };
        assert_eq!(kept_components(&ed, &cfg).unwrap(), vec![8, 7]);
        let groups = detect(&ed, &cfg).unwrap();
        let members: Vec<&[usize]> = groups.iter().map(|g| g.member_indices.as_slice()).collect();
        assert_eq!(members, vec![&[0, 1][..], &[2, 3][..]]);
        assert!(groups.iter().all(|g| g.implied_signs[0].sign == 1));
    }

    #[test]
    fn diffuse_component_is_not_kept() {
        // last component spread evenly over eight of sixteen assets
        let p = 16;
        let s = 1.0 / libm::sqrt(8.0);
        let spread: Vec<f64> = (0..p).map(|i| if i < 8 { if i % 2 == 0 { s } else { -s } } else { 0.0 }).collect();
        let ed = EigenDecomposition::from_parts(names(p), (0..p).map(|k| (p - k) as f64).collect(), {
            let mut pcs: Vec<Vec<f64>> = Vec::new();
            // Householder reflection sending e_0 to the spread vector
            let mut u = spread.clone();
            u[0] -= 1.0;
            let uu = dot(&u, &u);
            for k in 1..p {
                let e = unit(p, k);
                let c = 2.0 * dot(&u, &e) / uu;
                pcs.push(e.iter().zip(&u).map(|(x, y)| x - c * y).collect());
            }
            pcs.push(spread);
            pcs
        })
        .unwrap();
        let cfg = DetectorConfig { trailing_count: 1, abs_threshold: 0.3, ..Default::default() };
        assert_eq!(significant_loadings(&ed, p, &cfg).len(), 8);
        assert!(kept_components(&ed, &cfg).unwrap().is_empty());
        assert!(detect(&ed, &cfg).unwrap().is_empty());
    }

    #[test]
    fn groups_sorted_by_smallest_eigenvalue() {
        // pair (2,3) in the last component, pair (0,1) in the one before
        let p = 12;
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let pair = |a: usize, b: usize, s: f64| {
            let mut v = vec![0.0; p];
            v[a] = h;
            v[b] = s * h;
            v
        };
        let mut pcs = vec![pair(0, 1, 1.0), pair(2, 3, 1.0)];
        pcs.extend((4..p).map(|i| unit(p, i)));
        pcs.push(pair(0, 1, -1.0));
        pcs.push(pair(2, 3, -1.0));
        let mut vals = vec![1.9, 1.8];
        vals.extend((4..p).map(|i| 1.5 - 0.01 * i as f64));
        vals.extend([0.05, 0.03]);
        let ed = EigenDecomposition::from_parts(names(p), vals, pcs).unwrap();
        let groups = detect(&ed, &DetectorConfig::default()).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].member_indices, vec![2, 3]);
        assert_eq!(groups[1].member_indices, vec![0, 1]);
        assert_eq!(groups[0].implied_sign("T2", "T3"), Some(1));
    }

    #[test]
    fn config_errors() {
        let ed = two_pairs_sharing_components();
        let too_many = DetectorConfig { trailing_count: 16, ..Default::default() };
        assert!(matches!(detect(&ed, &too_many), Err(DetectError::Config(_))));
        let bad = DetectorConfig { abs_threshold: 0.0, ..Default::default() };
        assert!(matches!(detect(&ed, &bad), Err(DetectError::Config(_))));
        let bad = DetectorConfig { rel_threshold: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = DetectorConfig { min_group_size: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = DetectorConfig { eigenvalue_ceiling: Some(-1.0), ..Default::default() };
        assert!(bad.validate().is_err());
        let ceiling = DetectorConfig { trailing_count: 100, eigenvalue_ceiling: Some(0.1), ..Default::default() };
        assert_eq!(scanned_ranks(&ed, &ceiling).unwrap(), vec![16, 15]);
    }

    #[test]
    fn window_counting() {
        assert_eq!(window_starts(10, 5, 5).unwrap(), vec![0, 5]);
        assert_eq!(window_starts(10, 10, 3).unwrap(), vec![0]);
        assert_eq!(window_starts(10, 4, 3).unwrap(), vec![0, 3, 6]);
        assert!(window_starts(10, 2, 1).is_err());
        assert!(window_starts(10, 11, 1).is_err());
        assert!(window_starts(10, 5, 0).is_err());
    }

    #[test]
    fn components_are_deterministic() {
        let c = components(&[9, 1, 7, 3, 5], |a, b| a.abs_diff(b) == 2 && a.max(b) <= 5);
        assert_eq!(c, vec![vec![1, 3, 5], vec![7], vec![9]]);
    }
}
