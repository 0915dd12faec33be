//! Seeded synthetic markets with a known correlation structure.
//!
//! Every stock follows a one-factor model,
//! `r_i(t) = beta_i * market_vol * m(t) + sigma_i * e_i(t)`, with independent
//! standard normal `m` and `e`. Plant members copy the market exposure and
//! volatility of the first listed member (the leader), sign-flipped for a
//! negative target, and their shocks are mixed so that the population
//! correlation between any two members equals the target:
//!
//! * a pair replaces the follower's shock with
//!   `rho * e_leader + sqrt(1 - rho^2) * e_own`;
//! * a larger group gives every member `sqrt(rho) * z + sqrt(1 - rho) * e_own`
//!   with a shared latent `z`, which needs a non-negative `rho`.
//!
//! Outside the plant's day window members keep their own shock.
//!
//! Normal variates come from the ziggurat sampler of `rand_distr` driven by
//! ChaCha20 seeded from `seed`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::{Datelike, NaiveDate, Weekday};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::panel::{DividendEvent, PanelError, PricePanel};

pub const NORMAL_METHOD: &str = "ziggurat (rand_distr::StandardNormal) over ChaCha20 seeded from seed";

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SynthSpec {
    pub seed: u64,
    /// Number of price dates; there is one return fewer.
    pub n_days: usize,
    pub n_stocks: usize,
    pub market_vol: f64,
    pub market_beta_range: [f64; 2],
    pub idio_vol_range: [f64; 2],
    pub planted: Vec<Plant>,
    pub base_price: f64,
    pub start_date: NaiveDate,
    pub dividend_schedule: Option<DividendSchedule>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            n_days: 1001,
            n_stocks: 50,
            market_vol: 0.01,
            market_beta_range: [0.5, 1.3],
            idio_vol_range: [0.012, 0.025],
            planted: Vec::new(),
            base_price: 50.0,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date"),
            dividend_schedule: None,
        }
    }
}

/// Followers tied to a leader (`members[0]`).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Plant {
    /// Stock indices, leader first.
    pub members: Vec<usize>,
    /// Population correlation between any two members.
    pub target_corr: f64,
    /// First return day the tie is active (default 0).
    #[cfg_attr(feature = "serde", serde(default))]
    pub start_day: Option<usize>,
    /// Return day the tie stops (exclusive; default: end of sample).
    #[cfg_attr(feature = "serde", serde(default))]
    pub end_day: Option<usize>,
    /// Correlates this plant's follower noise with an earlier plant's.
    #[cfg_attr(feature = "serde", serde(default))]
    pub coupling: Option<PlantCoupling>,
}

impl Plant {
    pub fn pair(a: usize, b: usize, target_corr: f64) -> Self {
        Plant {
            members: alloc::vec![a, b],
            target_corr,
            start_day: None,
            end_day: None,
            coupling: None,
        }
    }
}

/// The own shock of every follower of this plant is mixed with the own shock
/// of the first follower of plant `plant` at correlation `strength`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PlantCoupling {
    pub plant: usize,
    pub strength: f64,
}

/// Stock `i` pays on price dates `t >= 1` with `(t + i) % every_days == 0`,
/// a cash amount worth `yield_fraction` of the cum-dividend value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct DividendSchedule {
    pub every_days: usize,
    pub yield_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    Invalid(String),
    /// The target cannot be reached given the shared market exposure.
    Infeasible { plant: usize, target_corr: f64, required_mixing: f64 },
    Panel(PanelError),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::Invalid(why) => write!(f, "invalid synthetic spec: {why}"),
            SynthError::Infeasible { plant, target_corr, required_mixing } => write!(
                f,
                "plant {plant}: target correlation {target_corr} needs shock correlation {required_mixing}, outside [-1, 1]"
            ),
            SynthError::Panel(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SynthError {}

/// The true structure behind a generated market.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnswerKey {
    pub tickers: Vec<String>,
    pub betas: Vec<f64>,
    pub idio_vols: Vec<f64>,
    pub plants: Vec<PlantKey>,
    pub normal_method: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlantKey {
    pub tickers: Vec<String>,
    pub target_corr: f64,
    /// Shock correlation between members while active.
    pub mixing: f64,
    pub start_day: usize,
    pub end_day: usize,
    pub coupled_with: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthMarket {
    pub panel: PricePanel,
    /// Generated simple total returns, `returns[i][t]` spanning price dates `t -> t+1`.
    pub returns: Vec<Vec<f64>>,
    pub answer: AnswerKey,
}

pub fn ticker_name(i: usize) -> String {
    format!("S{i:03}")
}

/// Weekdays from `start` on, `n` of them.
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

fn invalid(why: impl Into<String>) -> SynthError {
    SynthError::Invalid(why.into())
}

fn check_range(name: &str, r: [f64; 2]) -> Result<(), SynthError> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] >= 0.0 && r[0] <= r[1]) {
        return Err(invalid(format!("{name} must be a finite non-negative [lo, hi] with lo <= hi")));
    }
    Ok(())
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_stocks < 2 {
            return Err(invalid("n_stocks must be at least 2"));
        }
        if self.n_days < 3 {
            return Err(invalid("n_days must be at least 3"));
        }
        if !(self.market_vol.is_finite() && self.market_vol >= 0.0) {
            return Err(invalid("market_vol must be non-negative"));
        }
        check_range("market_beta_range", self.market_beta_range)?;
        check_range("idio_vol_range", self.idio_vol_range)?;
        if !(self.base_price.is_finite() && self.base_price > 0.0) {
            return Err(invalid("base_price must be positive"));
        }
        if let Some(d) = &self.dividend_schedule {
            if d.every_days == 0 || !(0.0..1.0).contains(&d.yield_fraction) {
                return Err(invalid("dividend schedule needs every_days >= 1 and yield in [0, 1)"));
            }
        }
        let mut used = alloc::vec![false; self.n_stocks];
        for (k, plant) in self.planted.iter().enumerate() {
            if plant.members.len() < 2 {
                return Err(invalid(format!("plant {k} needs at least 2 members")));
            }
            for &m in &plant.members {
                if m >= self.n_stocks {
                    return Err(invalid(format!("plant {k} member {m} out of range")));
                }
                if used[m] {
                    return Err(invalid(format!("plant {k} member {m} already belongs to a plant")));
                }
                used[m] = true;
            }
            if !(plant.target_corr > -1.0 && plant.target_corr <= 1.0) {
                return Err(invalid(format!("plant {k} target_corr must lie in (-1, 1]")));
            }
            if plant.members.len() > 2 && plant.target_corr < 0.0 {
                return Err(invalid(format!("plant {k}: groups of more than two need a non-negative target")));
            }
            let returns = self.n_days - 1;
            let start = plant.start_day.unwrap_or(0);
            let end = plant.end_day.unwrap_or(returns);
            if start >= end || end > returns {
                return Err(invalid(format!("plant {k} day window [{start}, {end}) is empty or past {returns}")));
            }
            if let Some(c) = &plant.coupling {
                if c.plant >= k {
                    return Err(invalid(format!("plant {k} can only couple to an earlier plant")));
                }
                if !(c.strength.abs() <= 1.0) {
                    return Err(invalid(format!("plant {k} coupling strength must lie in [-1, 1]")));
                }
            }
        }
        Ok(())
    }
}

/// Shock correlation giving `target` between two stocks sharing market
/// variance `b` (sign-flipped for negative targets) and idiosyncratic variance `s`.
fn solve_mixing(target: f64, b: f64, s: f64) -> Option<f64> {
    let sgn = if target < 0.0 { -1.0 } else { 1.0 };
    if s == 0.0 {
        return (target == sgn).then_some(sgn);
    }
    let rho = (target * (b + s) - sgn * b) / s;
    Some(rho)
}

pub fn generate(spec: &SynthSpec) -> Result<SynthMarket, SynthError> {
    spec.validate()?;
    let p = spec.n_stocks;
    let n_ret = spec.n_days - 1;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);

    let uniform = |r: [f64; 2]| Uniform::new_inclusive(r[0], r[1]).expect("checked range");
    let beta_dist = uniform(spec.market_beta_range);
    let vol_dist = uniform(spec.idio_vol_range);
    let mut betas: Vec<f64> = (0..p).map(|_| beta_dist.sample(&mut rng)).collect();
    let mut vols: Vec<f64> = (0..p).map(|_| vol_dist.sample(&mut rng)).collect();

    let mut keys = Vec::with_capacity(spec.planted.len());
    for (k, plant) in spec.planted.iter().enumerate() {
        let lead = plant.members[0];
        let b = betas[lead] * spec.market_vol * betas[lead] * spec.market_vol;
        let s = vols[lead] * vols[lead];
        let rho = solve_mixing(plant.target_corr, b, s).unwrap_or(f64::NAN);
        let group = plant.members.len() > 2;
        if !(rho.abs() <= 1.0) || (group && rho < 0.0) {
            return Err(SynthError::Infeasible {
                plant: k,
                target_corr: plant.target_corr,
                required_mixing: rho,
            });
        }
        let sgn = if plant.target_corr < 0.0 { -1.0 } else { 1.0 };
        for &f in &plant.members[1..] {
            betas[f] = sgn * betas[lead];
            vols[f] = vols[lead];
        }
        keys.push(PlantKey {
            tickers: plant.members.iter().map(|&m| ticker_name(m)).collect(),
            target_corr: plant.target_corr,
            mixing: rho,
            start_day: plant.start_day.unwrap_or(0),
            end_day: plant.end_day.unwrap_or(n_ret),
            coupled_with: plant.coupling.as_ref().map(|c| c.plant),
        });
    }

    let mut returns = alloc::vec![Vec::with_capacity(n_ret); p];
    let mut own = alloc::vec![0.0; p];
    let mut shock = alloc::vec![0.0; p];
    for t in 0..n_ret {
        let m: f64 = StandardNormal.sample(&mut rng);
        for e in own.iter_mut() {
            *e = StandardNormal.sample(&mut rng);
        }
        shock.copy_from_slice(&own);
        // plants in order so couplings see their source already mixed
        let mut follower_own: Vec<f64> = Vec::with_capacity(spec.planted.len());
        for (k, plant) in spec.planted.iter().enumerate() {
            let active = (keys[k].start_day..keys[k].end_day).contains(&t);
            let rho = keys[k].mixing;
            let lead = plant.members[0];
            let group = plant.members.len() > 2;
            // the group latent is drawn every day to keep the stream aligned
            let latent: f64 = if group { StandardNormal.sample(&mut rng) } else { 0.0 };
            let mut fresh_first = None;
            let mixed = if group { &plant.members[..] } else { &plant.members[1..] };
            for &f in mixed {
                let mut fresh = own[f];
                if let Some(c) = &plant.coupling {
                    let g = c.strength;
                    fresh = g * follower_own[c.plant] + libm::sqrt(1.0 - g * g) * own[f];
                }
                if f != lead && fresh_first.is_none() {
                    fresh_first = Some(fresh);
                }
                shock[f] = match (active, group) {
                    (false, _) => fresh,
                    (true, false) => rho * own[lead] + libm::sqrt(1.0 - rho * rho) * fresh,
                    (true, true) => libm::sqrt(rho) * latent + libm::sqrt(1.0 - rho) * fresh,
                };
            }
            follower_own.push(fresh_first.unwrap_or(0.0));
        }
        for i in 0..p {
            returns[i].push(betas[i] * spec.market_vol * m + vols[i] * shock[i]);
        }
    }

    let dates = business_days(spec.start_date, spec.n_days);
    let tickers: Vec<String> = (0..p).map(ticker_name).collect();
    let mut rows = Vec::with_capacity(p);
    let mut events = Vec::new();
    for (i, r) in returns.iter().enumerate() {
        let mut value = spec.base_price;
        let mut factor = 1.0;
        let mut row = Vec::with_capacity(spec.n_days);
        row.push(value);
        for (t, x) in r.iter().enumerate() {
            if *x <= -1.0 {
                return Err(invalid(format!("stock {i} lost its whole value on day {t}; lower the volatilities")));
            }
            value *= 1.0 + x;
            let date_idx = t + 1;
            let pays = spec
                .dividend_schedule
                .as_ref()
                .filter(|d| d.yield_fraction > 0.0 && (date_idx + i) % d.every_days == 0);
            match pays {
                Some(d) => {
                    let y = d.yield_fraction;
                    factor /= 1.0 - y;
                    let price = value / factor;
                    row.push(price);
                    events.push(DividendEvent {
                        date: dates[date_idx],
                        ticker: tickers[i].clone(),
                        amount: price * y / (1.0 - y),
                    });
                }
                None => row.push(value / factor),
            }
        }
        rows.push(row);
    }
    let panel = PricePanel::from_columns(dates, tickers.clone(), rows)
        .and_then(|p| p.with_dividends(events))
        .map_err(SynthError::Panel)?;

    Ok(SynthMarket {
        panel,
        returns,
        answer: AnswerKey {
            tickers,
            betas,
            idio_vols: vols,
            plants: keys,
            normal_method: NORMAL_METHOD.into(),
        },
    })
}
