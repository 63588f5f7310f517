//! Closed-form Map, Shuffle, and total delay, plus minimization over the
//! concatenated-code parameters (r1, r2) and the non-straggler count q.
//!
//! Shuffle delay per input datum for a multiplicity-j group is
//! `B_j / (m · gain)`, where the gain is the scheme's effective number of
//! intermediate values moved per channel use: `j` for coded multicasting,
//! `α·min(q, 2j)` for one-shot zero-forcing, and their superposition
//! `(1−α)·j + α·min(q, 2j)`. Everything is exact rational; `+∞` marks
//! infeasible or zero-rate cases.

use crate::placement::{
    feasibility, multiplicity_profile, q_min, MultiplicityProfile, SystemConfig,
};
use crate::rational::{binomial_ratio, frac, harmonic, int, uint, Delay, Ratio};
use crate::lagrange::recovery_threshold;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// Shuffle strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    CodedMulticasting,
    ZeroForcing,
    Superposition,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::CodedMulticasting,
        Scheme::ZeroForcing,
        Scheme::Superposition,
    ];

    /// Short code used in CSV column names and config files.
    pub fn code(&self) -> &'static str {
        match self {
            Scheme::CodedMulticasting => "cm",
            Scheme::ZeroForcing => "zf",
            Scheme::Superposition => "sc",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cm" | "coded-multicasting" | "multicast" => Ok(Scheme::CodedMulticasting),
            "zf" | "zero-forcing" | "precoding" => Ok(Scheme::ZeroForcing),
            "sc" | "superposition" => Ok(Scheme::Superposition),
            other => Err(format!("unknown scheme {other:?} (expected cm, zf or sc)")),
        }
    }
}

/// Whether the batch size b may be fractional (figure-style continuous
/// relaxation) or must be an integer realizable by an actual placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Concrete,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Mode::Analytic),
            "concrete" => Ok(Mode::Concrete),
            other => Err(format!("unknown mode {other:?} (expected analytic or concrete)")),
        }
    }
}

/// Normalized Map-phase delay `(μ/2)·(1 + Σ_{j=K−q+1}^{K} 1/j)`.
pub fn map_delay(mu: &Ratio, q: u32, k: u32) -> Ratio {
    mu / int(2) * (int(1) + harmonic((k - q + 1) as u64, k as u64))
}

/// Effective IVs delivered per channel use for a multiplicity-j group.
pub fn gain(scheme: Scheme, j: u32, q: u32, alpha: &Ratio) -> Ratio {
    let cooperative = uint(q.min(2 * j) as u64);
    match scheme {
        Scheme::CodedMulticasting => uint(j as u64),
        Scheme::ZeroForcing => alpha * cooperative,
        Scheme::Superposition => (int(1) - alpha) * uint(j as u64) + alpha * cooperative,
    }
}

/// Shuffle delay for a fixed code choice, from its multiplicity profile:
/// full groups from s_max down to s_q plus the partial group at s_q − 1.
pub fn shuffle_delay_fixed(
    scheme: Scheme,
    profile: &MultiplicityProfile,
    m: u64,
    q: u32,
    alpha: &Ratio,
) -> Delay {
    if profile.is_empty() {
        return Delay::zero();
    }
    let m = uint(m);
    let mut total = Ratio::zero();
    for (j, b_j) in profile.full_groups() {
        let g = gain(scheme, j, q, alpha);
        if g.is_zero() {
            return Delay::Infinite;
        }
        total += b_j / (&m * g);
    }
    if profile.remainder.is_positive() {
        let g = gain(scheme, profile.s_q - 1, q, alpha);
        if g.is_zero() {
            return Delay::Infinite;
        }
        total += &profile.remainder / (&m * g);
    }
    Delay::Finite(total)
}

/// The minimizing concatenated-code parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeChoice {
    pub r1: Ratio,
    pub r2: u32,
    pub b: Ratio,
}

/// Lagrange-redundancy candidates for one repetition factor, honoring the
/// storage bound r1·r2 ≤ μK. Concrete mode enumerates the integral batch
/// sizes; analytic mode takes the storage endpoint plus a uniform grid of 64
/// interior points (the delay is piecewise monotone in r1, so endpoints and
/// a grid resolve the curves).
pub fn r1_candidates(k: u32, mu: &Ratio, r2: u32, m: u64, mode: Mode) -> Vec<Ratio> {
    let upper = mu * uint(k as u64) / uint(r2 as u64);
    let mut out = Vec::new();
    if upper < int(1) {
        return out;
    }
    let n_batches = binomial_ratio(k as u64, r2 as i64);
    match mode {
        Mode::Analytic => {
            out.push(int(1));
            if upper > int(1) {
                let step = (&upper - int(1)) / int(65);
                for i in 1..=64 {
                    out.push(int(1) + int(i) * &step);
                }
                out.push(upper);
            }
        }
        Mode::Concrete => {
            // r1 = b·C(K, r2)/m for integral b; r1 = 1 needs C(K, r2) | m
            for b in 1u64.. {
                let r1 = uint(b) * &n_batches / uint(m);
                if r1 > upper {
                    break;
                }
                if r1 >= int(1) {
                    out.push(r1);
                }
            }
        }
    }
    out
}

/// Minimize the shuffle delay over (r1, r2) subject to feasibility and the
/// storage bound. Uncoded (r1 = 1) candidates are scanned first so exact
/// ties resolve toward no Lagrange coding; within a block, smaller r2 and
/// then smaller r1 win ties.
pub fn min_shuffle_delay(
    scheme: Scheme,
    cfg: &SystemConfig,
    q: u32,
    mode: Mode,
) -> (Delay, Option<CodeChoice>) {
    let mut best: Option<(Delay, CodeChoice)> = None;
    let r2_max = cfg.mu_k_floor();
    let consider = |r1: &Ratio, r2: u32, best: &mut Option<(Delay, CodeChoice)>| {
        if !feasibility(cfg.k, q, cfg.m, cfg.d, r1, r2) {
            return;
        }
        let b = r1 * uint(cfg.m) / binomial_ratio(cfg.k as u64, r2 as i64);
        let m_star = recovery_threshold(cfg.m, cfg.d, r1);
        let profile = match multiplicity_profile(cfg.k, q, r2, &b, m_star) {
            Ok(p) => p,
            Err(_) => {
                debug_assert!(false, "feasible code must admit a profile");
                return;
            }
        };
        let delay = shuffle_delay_fixed(scheme, &profile, cfg.m, q, &cfg.alpha);
        let replace = match best {
            Some((cur, _)) => delay < *cur,
            None => true,
        };
        if replace {
            *best = Some((
                delay,
                CodeChoice {
                    r1: r1.clone(),
                    r2,
                    b,
                },
            ));
        }
    };

    for r2 in 1..=r2_max {
        let one = int(1);
        let has_one = match mode {
            Mode::Analytic => true,
            Mode::Concrete => (uint(cfg.m) / binomial_ratio(cfg.k as u64, r2 as i64)).is_integer(),
        };
        if has_one {
            consider(&one, r2, &mut best);
        }
    }
    for r2 in 1..=r2_max {
        for r1 in r1_candidates(cfg.k, &cfg.mu, r2, cfg.m, mode) {
            if !r1.is_one() {
                consider(&r1, r2, &mut best);
            }
        }
    }

    match best {
        Some((delay, choice)) => (delay, Some(choice)),
        None => (Delay::Infinite, None),
    }
}

/// Map, Shuffle, and total delay at one operating point.
#[derive(Clone, Debug)]
pub struct DelayBreakdown {
    pub q: u32,
    pub map: Ratio,
    pub shuffle: Delay,
    pub total: Delay,
    pub choice: Option<CodeChoice>,
}

/// Total delay `γ·δ_M + δ_S` with the minimizing (r1, r2) recorded.
pub fn total_delay(scheme: Scheme, cfg: &SystemConfig, q: u32, mode: Mode) -> DelayBreakdown {
    let map = map_delay(&cfg.mu, q, cfg.k);
    let (shuffle, choice) = min_shuffle_delay(scheme, cfg, q, mode);
    let total = shuffle.plus_scaled(&cfg.gamma, &map);
    DelayBreakdown {
        q,
        map,
        shuffle,
        total,
        choice,
    }
}

/// Argmin of the total delay over q ∈ [q_min, K]; ties break toward
/// smaller q. None when q_min exceeds K.
pub fn optimize_q(scheme: Scheme, cfg: &SystemConfig, mode: Mode) -> Option<DelayBreakdown> {
    let lo = q_min(cfg.k, &cfg.mu, cfg.m, cfg.d);
    let mut best: Option<DelayBreakdown> = None;
    for q in lo..=cfg.k {
        let cand = total_delay(scheme, cfg, q, mode);
        let replace = match &best {
            Some(cur) => cand.total < cur.total,
            None => true,
        };
        if replace {
            best = Some(cand);
        }
    }
    best
}

/// Paper-style default α grid helper: {0, 1/10, …, 1}.
pub fn alpha_grid() -> Vec<Ratio> {
    (0..=10).map(|i| frac(i, 10)).collect()
}
