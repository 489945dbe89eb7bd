//! Achievable secrecy rates of a Shannon strategy and the rate-splitting
//! constraints behind them.
//!
//! For a joint law of `(U,S,X,Y,Z)` three rates are available:
//!
//! * `R0 = I(U;Y) − I(U;Z)` (plain wiretap coding),
//! * `R1 = min[I(U;Y) − I(U;SZ) + H(S|Z) − H(S|UY), I(U;Y) − H(S|UY)]`
//!   (wiretap coding plus a one-time pad keyed from the state),
//! * `R2 = min[H(S|Z) − H(S|UY), I(U;Y) − H(S|UY)]` (one-time pad only).

mod exponent;
mod optimize;

pub use exponent::{gallager_e0, resolvability_bound};
pub use optimize::{
    lower_bound, upper_bound_degraded, LowerBound, Objective, OptimizerConfig, StrategyFamily,
    UpperBound,
};

use serde::{Deserialize, Serialize};

use crate::channel::{S, U, Y, Z};
use crate::error::Result;
use crate::prob::JointTable;

/// Slack applied to the strict inequalities of the rate region.
pub const STRICT_SLACK: f64 = 1e-9;

/// The five information quantities the rates are built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateComponents {
    pub i_uy: f64,
    pub i_uz: f64,
    pub i_usz: f64,
    pub h_s_given_z: f64,
    pub h_s_given_uy: f64,
}

impl RateComponents {
    pub fn from_joint(joint: &JointTable) -> Result<Self> {
        Ok(RateComponents {
            i_uy: joint.mutual_information(&[U], &[Y], &[])?,
            i_uz: joint.mutual_information(&[U], &[Z], &[])?,
            i_usz: joint.mutual_information(&[U], &[S, Z], &[])?,
            h_s_given_z: joint.conditional_entropy(&[S], &[Z])?.max(0.0),
            h_s_given_uy: joint.conditional_entropy(&[S], &[U, Y])?.max(0.0),
        })
    }

    /// Net key rate `H(S|Z) − H(S|UY)`.
    pub fn key_gain(&self) -> f64 {
        self.h_s_given_z - self.h_s_given_uy
    }

    /// Wiretap margin against Eve holding the state, `I(U;Y) − I(U;SZ)`.
    pub fn wiretap_margin(&self) -> f64 {
        self.i_uy - self.i_usz
    }

    /// Total-rate cap `I(U;Y) − H(S|UY)`.
    pub fn total_cap(&self) -> f64 {
        self.i_uy - self.h_s_given_uy
    }

    pub fn r_csi0(&self) -> f64 {
        self.i_uy - self.i_uz
    }

    /// The two bracket terms of `R1`.
    pub fn r_csi1_terms(&self) -> (f64, f64) {
        (self.wiretap_margin() + self.key_gain(), self.total_cap())
    }

    pub fn r_csi1(&self) -> f64 {
        let (a, b) = self.r_csi1_terms();
        a.min(b)
    }

    pub fn r_csi2(&self) -> f64 {
        self.key_gain().min(self.total_cap())
    }

    pub fn case(&self) -> RateCase {
        if self.key_gain() <= 0.0 {
            RateCase::Case0
        } else if self.wiretap_margin() > 0.0 {
            RateCase::Case1
        } else {
            RateCase::Case2
        }
    }
}

/// Which of the three regimes the `R1` expression falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateCase {
    /// No net key: `H(S|Z) ≤ H(S|UY)`; plain wiretap coding dominates.
    Case0,
    /// Positive wiretap margin and positive key gain; both mechanisms add up.
    Case1,
    /// Key gain only; the pad-only rate dominates.
    Case2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub r_csi0: f64,
    pub r_csi1: f64,
    pub r_csi2: f64,
    pub case: RateCase,
    pub components: RateComponents,
}

impl RateBounds {
    pub fn best(&self) -> f64 {
        self.r_csi0.max(self.r_csi1).max(self.r_csi2)
    }

    pub fn get(&self, which: Objective) -> f64 {
        match which {
            Objective::Csi0 => self.r_csi0,
            Objective::Csi1 => self.r_csi1,
            Objective::Csi2 => self.r_csi2,
        }
    }
}

/// All three rates and the case label for a joint law over `(U,S,X,Y,Z)`
/// (any table containing `U,S,Y,Z` works).
pub fn rate_components(joint: &JointTable) -> Result<RateBounds> {
    let c = RateComponents::from_joint(joint)?;
    Ok(RateBounds {
        r_csi0: c.r_csi0(),
        r_csi1: c.r_csi1(),
        r_csi2: c.r_csi2(),
        case: c.case(),
        components: c,
    })
}

/// The same `R1` written with `I(U;SY)` and `H(S|Y)`:
/// `min[I(U;SY) − I(U;SZ) + H(S|Z) − H(S|Y), I(U;SY) − H(S|Y)]`.
pub fn r_csi1_state_output_form(joint: &JointTable) -> Result<f64> {
    let i_usy = joint.mutual_information(&[U], &[S, Y], &[])?;
    let i_usz = joint.mutual_information(&[U], &[S, Z], &[])?;
    let h_s_z = joint.conditional_entropy(&[S], &[Z])?;
    let h_s_y = joint.conditional_entropy(&[S], &[Y])?;
    Ok((i_usy - i_usz + h_s_z - h_s_y).min(i_usy - h_s_y))
}

/// A rate split: total codebook rate `r_bar`, wiretap-protected `r0`,
/// pad-protected `r1`, reconciliation `r2` (bits per channel use).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTuple {
    pub r_bar: f64,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
}

impl RateTuple {
    /// Secret-message rate `R = R0 + R1`.
    pub fn secret_rate(&self) -> f64 {
        self.r0 + self.r1
    }
}

/// A default operating point strictly inside the achievable region of `c`.
///
/// When the state offers a key gain and there is room for a
/// reconciliation index, the split leaves a third of the gain to the pad
/// and a third as margin on `R2`; otherwise it falls back to plain wiretap
/// coding at half the main-channel rate with half the available secrecy.
pub fn interior_split(c: &RateComponents) -> RateTuple {
    let gain = c.key_gain();
    if gain > STRICT_SLACK && c.total_cap() > STRICT_SLACK && c.r_csi2().max(c.r_csi1()) > c.r_csi0() {
        let r_bar = 0.9 * c.i_uy;
        let r2 = c.h_s_given_uy + gain / 3.0;
        let r1 = (gain / 3.0).min(((r_bar - r2) / 2.0).max(0.0));
        let r0 = if c.wiretap_margin() > STRICT_SLACK {
            ((r_bar - c.i_usz).min(r_bar - r1 - r2) / 2.0).max(0.0)
        } else {
            0.0
        };
        RateTuple { r_bar, r0, r1, r2 }
    } else {
        let r_bar = c.i_uy / 2.0;
        RateTuple {
            r_bar,
            r0: ((r_bar - c.i_uz) / 2.0).max(0.0),
            r1: 0.0,
            r2: 0.0,
        }
    }
}

/// Checks the six strict constraints on a rate split:
/// `R̄ < I(U;Y)`, `R̄ − R0 > I(U;SZ)`, `R2 > H(S|UY)`, `R0+R1+R2 < R̄`,
/// `R1+R2 < H(S|Z)`, with `R = R0 + R1` and all rates nonnegative.
pub fn fm_feasible(rates: &RateTuple, joint: &JointTable) -> Result<bool> {
    let c = RateComponents::from_joint(joint)?;
    Ok(feasible_with(rates, &c, true))
}

/// Same constraints without the wiretap requirement on `R̄ − R0`, for splits
/// with `R0 = 0`.
pub fn fm_feasible_pad_only(rates: &RateTuple, joint: &JointTable) -> Result<bool> {
    let c = RateComponents::from_joint(joint)?;
    Ok(rates.r0 == 0.0 && feasible_with(rates, &c, false))
}

fn feasible_with(r: &RateTuple, c: &RateComponents, wiretap: bool) -> bool {
    let e = STRICT_SLACK;
    let nonneg = r.r_bar >= 0.0 && r.r0 >= 0.0 && r.r1 >= 0.0 && r.r2 >= 0.0;
    nonneg
        && r.r_bar < c.i_uy - e
        && (!wiretap || r.r_bar - r.r0 > c.i_usz + e)
        && r.r2 > c.h_s_given_uy + e
        && r.r0 + r.r1 + r.r2 < r.r_bar - e
        && r.r1 + r.r2 < c.h_s_given_z - e
}

/// Grid-search supremum of `R = R0 + R1` over the closed rate region.
///
/// `R0` runs over `{0, g, 2g, ..}` and `R2` over `{H(S|UY), H(S|UY) + g, ..}`
/// (the grid is anchored on the closed boundary); for each grid pair the
/// remaining rates are pushed to their extreme feasible values
/// (`R̄ = I(U;Y)`, largest admissible `R1`). Returns `None` when the region
/// holds no grid point.
pub fn fm_supremum(joint: &JointTable, grid: f64) -> Result<Option<f64>> {
    let c = RateComponents::from_joint(joint)?;
    Ok(grid_supremum(&c, grid, true))
}

/// [`fm_supremum`] with `R0` pinned to 0 and the wiretap constraint dropped.
pub fn fm_supremum_pad_only(joint: &JointTable, grid: f64) -> Result<Option<f64>> {
    let c = RateComponents::from_joint(joint)?;
    Ok(grid_supremum(&c, grid, false))
}

fn grid_supremum(c: &RateComponents, grid: f64, wiretap: bool) -> Option<f64> {
    assert!(grid > 0.0, "grid resolution must be positive");
    // the strict region is empty unless every chain of inequalities has room
    let e = STRICT_SLACK;
    if c.key_gain() <= e || c.total_cap() <= e || (wiretap && c.wiretap_margin() <= e) {
        return None;
    }
    let r_bar = c.i_uy;
    let r2_span = r_bar.max(c.h_s_given_z) - c.h_s_given_uy;
    let steps = |hi: f64| (hi / grid).floor().max(0.0) as usize;
    let mut best: Option<f64> = None;
    let r0_steps = if wiretap { steps(r_bar) } else { 0 };
    for i0 in 0..=r0_steps {
        let r0 = i0 as f64 * grid;
        if wiretap && r_bar - r0 < c.i_usz {
            break;
        }
        for i2 in 0..=steps(r2_span) {
            let r2 = c.h_s_given_uy + i2 as f64 * grid;
            let r1 = (c.h_s_given_z - r2).min(r_bar - r0 - r2);
            if r1 < 0.0 {
                break;
            }
            let total = r0 + r1;
            if best.map_or(true, |b| total > b) {
                best = Some(total);
            }
        }
    }
    best
}
