//! Two-input fuzzy PD controller.
//!
//! Inputs are the tracking error `e` and its per-sample difference `Δe`; the
//! output is the feedback command. Each variable has five symmetric
//! triangular sets (NL, NS, Z, PS, PL) forming a partition of unity. The
//! scaling factor `S` places PL at `S·U` and the deforming coefficient `D`
//! places PS at `D·S·U`; the negative side mirrors the positive one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SF_RANGE: (f64, f64) = (0.1, 1.0);
pub const DC_RANGE: (f64, f64) = (0.5, 0.999);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    NL,
    NS,
    Z,
    PS,
    PL,
}

impl Label {
    pub const ALL: [Label; 5] = [Label::NL, Label::NS, Label::Z, Label::PS, Label::PL];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn mirror(self) -> Label {
        Label::ALL[4 - self.index()]
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::NL => "NL",
            Label::NS => "NS",
            Label::Z => "Z",
            Label::PS => "PS",
            Label::PL => "PL",
        };
        f.write_str(s)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NL" => Ok(Label::NL),
            "NS" => Ok(Label::NS),
            "Z" | "ZE" => Ok(Label::Z),
            "PS" => Ok(Label::PS),
            "PL" => Ok(Label::PL),
            _ => Err(Error::config("rules", format!("unknown label `{s}`"))),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Rule consequents indexed `[e label][Δe label]`.
pub type RuleTable = [[Label; 5]; 5];

/// The standard PD rule base: rows are `e`, columns are `Δe`, both NL..PL.
pub const DEFAULT_RULES: RuleTable = {
    use Label::*;
    [
        [NL, NL, NL, NS, Z],
        [NL, NL, NS, Z, PS],
        [NL, NS, Z, PS, PL],
        [NS, Z, PS, PL, PL],
        [Z, PS, PL, PL, PL],
    ]
};

/// Five symmetric triangular sets on `[-U, U]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipSet {
    centers: [f64; 5],
    bound: f64,
}

impl MembershipSet {
    /// Sets with PL at `scale·bound` and PS at `deform·scale·bound`.
    pub fn from_scale(scale: f64, deform: f64, bound: f64) -> Result<Self> {
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(Error::Domain(format!(
                "universe bound must be positive, got {bound}"
            )));
        }
        let pl = scale * bound;
        let ps = deform * pl;
        if !(ps > 0.0 && ps < pl && pl <= bound) {
            return Err(Error::Domain(format!(
                "centers must satisfy 0 < PS < PL <= U, got PS={ps}, PL={pl}"
            )));
        }
        Ok(MembershipSet {
            centers: [-pl, -ps, 0.0, ps, pl],
            bound,
        })
    }

    pub fn centers(&self) -> [f64; 5] {
        self.centers
    }

    pub fn center(&self, label: Label) -> f64 {
        self.centers[label.index()]
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Membership degrees of `x` (clamped to the universe) in NL..PL order.
    pub fn degrees(&self, x: f64) -> [f64; 5] {
        let x = x.clamp(-self.bound, self.bound);
        let pos = self.degrees_nonneg(x.abs());
        if x < 0.0 {
            [pos[4], pos[3], pos[2], pos[1], pos[0]]
        } else {
            pos
        }
    }

    fn degrees_nonneg(&self, x: f64) -> [f64; 5] {
        let ps = self.centers[3];
        let pl = self.centers[4];
        let mut mu = [0.0; 5];
        if x >= pl {
            mu[4] = 1.0;
        } else if x >= ps {
            let t = (x - ps) / (pl - ps);
            mu[3] = 1.0 - t;
            mu[4] = t;
        } else {
            let t = x / ps;
            mu[2] = 1.0 - t;
            mu[3] = t;
        }
        mu
    }
}

/// Rule firing and aggregation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inference {
    /// Product AND, summed rule strengths, weighted average of consequent
    /// centers. With partition-of-unity inputs this is bilinear
    /// interpolation of the rule table over the center grid.
    #[default]
    ProductSum,
    /// Min AND, max aggregation per output label, weighted average of
    /// label centers. Odd, but not monotone in general: near the label
    /// crossovers the output can dip slightly as an input rises.
    MinMax,
}

/// Scaling factors and deforming coefficients, chromosome order
/// `[S_I1, S_I2, S_O1, D_I1, D_I2, D_O1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SfDcGenes {
    pub s_e: f64,
    pub s_de: f64,
    pub s_out: f64,
    pub d_e: f64,
    pub d_de: f64,
    pub d_out: f64,
}

impl SfDcGenes {
    pub const BOUNDS: [(f64, f64); 6] =
        [SF_RANGE, SF_RANGE, SF_RANGE, DC_RANGE, DC_RANGE, DC_RANGE];

    pub fn from_array(g: [f64; 6]) -> Self {
        SfDcGenes {
            s_e: g[0],
            s_de: g[1],
            s_out: g[2],
            d_e: g[3],
            d_de: g[4],
            d_out: g[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.s_e, self.s_de, self.s_out, self.d_e, self.d_de, self.d_out,
        ]
    }

    /// Centre of every gene interval.
    pub fn midpoint() -> Self {
        let mut g = [0.0; 6];
        for (v, (lo, hi)) in g.iter_mut().zip(Self::BOUNDS) {
            *v = 0.5 * (lo + hi);
        }
        Self::from_array(g)
    }

    pub fn validate(&self) -> Result<()> {
        const NAMES: [&str; 6] = ["S_I1", "S_I2", "S_O1", "D_I1", "D_I2", "D_O1"];
        for ((v, (lo, hi)), name) in self.to_array().into_iter().zip(Self::BOUNDS).zip(NAMES) {
            if !(v >= lo && v <= hi) {
                return Err(Error::config(
                    format!("genes.{name}"),
                    format!("{v} outside [{lo}, {hi}]"),
                ));
            }
        }
        Ok(())
    }
}

/// Universe bounds for the three fuzzy variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Universes {
    pub e: f64,
    pub de: f64,
    pub out: f64,
}

impl Universes {
    /// `U_e = 0.4 L`, `U_de = L/10`, `U_out = 1`.
    pub fn for_stroke(stroke: f64) -> Self {
        Universes {
            e: 0.4 * stroke,
            de: stroke / 10.0,
            out: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPdConfig {
    pub input_e: MembershipSet,
    pub input_de: MembershipSet,
    pub output: MembershipSet,
    pub rules: RuleTable,
    pub inference: Inference,
}

impl FuzzyPdConfig {
    pub fn with_rules(mut self, rules: RuleTable) -> Self {
        self.rules = rules;
        self
    }

    pub fn with_inference(mut self, inference: Inference) -> Self {
        self.inference = inference;
        self
    }

    /// Small-signal proportional gain `center(PS)_out / center(PS)_e`.
    pub fn small_signal_kp(&self) -> f64 {
        self.output.center(Label::PS) / self.input_e.center(Label::PS)
    }

    /// Small-signal difference gain `center(PS)_out / center(PS)_Δe`.
    pub fn small_signal_kd(&self) -> f64 {
        self.output.center(Label::PS) / self.input_de.center(Label::PS)
    }
}

/// Membership sets for all three variables from the six genes.
pub fn build_memberships(genes: &SfDcGenes, universes: &Universes) -> Result<FuzzyPdConfig> {
    genes.validate()?;
    Ok(FuzzyPdConfig {
        input_e: MembershipSet::from_scale(genes.s_e, genes.d_e, universes.e)?,
        input_de: MembershipSet::from_scale(genes.s_de, genes.d_de, universes.de)?,
        output: MembershipSet::from_scale(genes.s_out, genes.d_out, universes.out)?,
        rules: DEFAULT_RULES,
        inference: Inference::default(),
    })
}

/// Per-sample backward difference of the error.
pub fn delta_error(e_now: f64, e_prev: f64) -> f64 {
    e_now - e_prev
}

/// Feedback command for error `e` and error difference `de`.
pub fn fuzzy_pd(e: f64, de: f64, cfg: &FuzzyPdConfig) -> f64 {
    let mu_e = cfg.input_e.degrees(e);
    let mu_de = cfg.input_de.degrees(de);
    let w = |i: usize, j: usize| match cfg.inference {
        Inference::ProductSum => mu_e[i] * mu_de[j],
        Inference::MinMax => mu_e[i].min(mu_de[j]),
    };
    let add = |acc: f64, v: f64| match cfg.inference {
        Inference::ProductSum => acc + v,
        Inference::MinMax => acc.max(v),
    };
    // Per-label firing strengths. Labels above ZE are accumulated over mirrored
    // cells in the same order as their negative twins, and ZE over mirrored
    // pairs, so negating both inputs swaps the aggregates bit-for-bit.
    let mut agg = [0.0f64; 5];
    for i in 0..5 {
        for j in 0..5 {
            let (mi, mj) = (4 - i, 4 - j);
            let l = cfg.rules[i][j].index();
            if l < 2 {
                agg[l] = add(agg[l], w(i, j));
            }
            let ml = cfg.rules[mi][mj].index();
            if ml > 2 {
                agg[ml] = add(agg[ml], w(mi, mj));
            }
            if (i, j) <= (mi, mj) {
                let z = |a: usize, b: usize| {
                    if cfg.rules[a][b] == Label::Z {
                        w(a, b)
                    } else {
                        0.0
                    }
                };
                let pair = if (i, j) == (mi, mj) {
                    z(i, j)
                } else {
                    z(i, j) + z(mi, mj)
                };
                agg[2] = add(agg[2], pair);
            }
        }
    }
    defuzzify(&agg, &cfg.output.centers())
}

/// Centroid of singleton-reduced output sets. Weights are normalised before
/// scaling so a single firing label returns its center exactly.
fn defuzzify(agg: &[f64; 5], c: &[f64; 5]) -> f64 {
    let den = (agg[0] + agg[4]) + (agg[1] + agg[3]) + agg[2];
    let outer = (agg[4] - agg[0]) / den;
    let inner = (agg[3] - agg[1]) / den;
    outer * c[4] + inner * c[3]
}
