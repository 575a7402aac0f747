use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    adjective_rating, bootstrap_ci, cronbach_alpha, descriptive, spearman_rho,
    wilcoxon_signed_rank, Adjective, Correlation, StatsError, Wilcoxon,
};

/// Technology-acceptance constructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Construct {
    /// Perceived usefulness.
    #[serde(rename = "PU")]
    Pu,
    /// Perceived ease of use.
    #[serde(rename = "PEOU")]
    Peou,
    /// Attitude towards using.
    #[serde(rename = "ATT")]
    Att,
    /// Behavioral intention.
    #[serde(rename = "BI")]
    Bi,
}

impl Construct {
    pub const ALL: [Construct; 4] = [Construct::Pu, Construct::Peou, Construct::Att, Construct::Bi];

    pub fn code(self) -> &'static str {
        match self {
            Construct::Pu => "PU",
            Construct::Peou => "PEOU",
            Construct::Att => "ATT",
            Construct::Bi => "BI",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Construct::Pu => "Perceived Usefulness",
            Construct::Peou => "Perceived Ease of Use",
            Construct::Att => "Attitude Towards Using",
            Construct::Bi => "Behavioral Intention",
        }
    }
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Construct {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Construct::ALL
            .into_iter()
            .find(|c| c.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| StatsError::Matrix(format!("unknown construct {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    pub construct: Construct,
}

/// Complete participants x items grid of 1..=5 responses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LikertMatrix {
    participants: Vec<String>,
    items: Vec<Item>,
    /// Row-major, one row per participant.
    scores: Vec<u8>,
}

impl LikertMatrix {
    pub fn new(
        participants: Vec<String>,
        items: Vec<Item>,
        scores: Vec<Vec<u8>>,
    ) -> Result<Self, StatsError> {
        if participants.is_empty() || items.is_empty() {
            return Err(StatsError::Matrix("no participants or no items".into()));
        }
        if scores.len() != participants.len() {
            return Err(StatsError::Matrix(format!(
                "{} score rows for {} participants",
                scores.len(),
                participants.len()
            )));
        }
        for (i, p) in participants.iter().enumerate() {
            if participants[..i].contains(p) {
                return Err(StatsError::Matrix(format!("duplicate participant {p:?}")));
            }
        }
        for (j, it) in items.iter().enumerate() {
            if items[..j].iter().any(|o| o.id == it.id) {
                return Err(StatsError::Matrix(format!("duplicate item {:?}", it.id)));
            }
        }
        let mut flat = Vec::with_capacity(participants.len() * items.len());
        for (p, row) in participants.iter().zip(&scores) {
            if row.len() != items.len() {
                return Err(StatsError::Matrix(format!(
                    "participant {p:?} has {} scores for {} items",
                    row.len(),
                    items.len()
                )));
            }
            if let Some(bad) = row.iter().find(|s| !(1..=5).contains(*s)) {
                return Err(StatsError::Matrix(format!(
                    "participant {p:?} has score {bad} outside 1..=5"
                )));
            }
            flat.extend_from_slice(row);
        }
        Ok(Self {
            participants,
            items,
            scores: flat,
        })
    }

    pub fn participants(&self) -> &[String] {
        &self.participants
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn score(&self, participant: usize, item: usize) -> u8 {
        self.scores[participant * self.items.len() + item]
    }

    pub fn item_column(&self, item: usize) -> Vec<f64> {
        (0..self.participants.len())
            .map(|p| f64::from(self.score(p, item)))
            .collect()
    }

    pub fn construct_items(&self, construct: Construct) -> Vec<usize> {
        (0..self.items.len())
            .filter(|&j| self.items[j].construct == construct)
            .collect()
    }

    /// Constructs present in the matrix, in canonical order.
    pub fn constructs(&self) -> Vec<Construct> {
        Construct::ALL
            .into_iter()
            .filter(|c| self.items.iter().any(|it| it.construct == *c))
            .collect()
    }

    /// Each participant's mean over the construct's items.
    pub fn construct_scores(&self, construct: Construct) -> Vec<f64> {
        let cols = self.construct_items(construct);
        (0..self.participants.len())
            .map(|p| {
                cols.iter().map(|&j| f64::from(self.score(p, j))).sum::<f64>() / cols.len() as f64
            })
            .collect()
    }
}

/// One row of the descriptive table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    pub iqr: f64,
    pub mean: f64,
    pub sd: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub adjective: Adjective,
}

impl Summary {
    pub fn of(values: &[f64], resamples: usize, seed: u64) -> Result<Self, StatsError> {
        let d = descriptive(values)?;
        let (ci_low, ci_high) = bootstrap_ci(values, resamples, 0.95, seed)?;
        Ok(Self {
            median: d.median,
            iqr: d.iqr,
            mean: d.mean,
            sd: d.sd,
            ci_low,
            ci_high,
            adjective: adjective_rating(d.mean)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reliability {
    Alpha(f64),
    /// Alpha is undefined (fewer than two items or participants, or no variance).
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRow {
    pub item: Item,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructRow {
    pub construct: Construct,
    pub summary: Summary,
    pub alpha: Reliability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub participants: usize,
    pub resamples: usize,
    pub seed: u64,
    pub items: Vec<ItemRow>,
    pub constructs: Vec<ConstructRow>,
    /// PU vs PEOU on per-participant construct means.
    pub pu_vs_peou: Option<Wilcoxon>,
    /// Spearman of each other construct against BI; `None` where undefined.
    pub bi_correlations: Vec<(Construct, Option<Correlation>)>,
    /// Construct with the highest defined rho against BI.
    pub bi_top_correlate: Option<Construct>,
}

fn row_seed(seed: u64, row: usize) -> u64 {
    seed ^ (row as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs the full survey analysis.
pub fn analyze(matrix: &LikertMatrix, resamples: usize, seed: u64) -> Result<Analysis, StatsError> {
    let mut row = 0;
    let mut next_seed = || {
        row += 1;
        row_seed(seed, row)
    };

    let mut items = Vec::with_capacity(matrix.items().len());
    for (j, item) in matrix.items().iter().enumerate() {
        items.push(ItemRow {
            item: item.clone(),
            summary: Summary::of(&matrix.item_column(j), resamples, next_seed())?,
        });
    }

    let mut constructs = Vec::new();
    for c in matrix.constructs() {
        let columns: Vec<Vec<f64>> = matrix
            .construct_items(c)
            .into_iter()
            .map(|j| matrix.item_column(j))
            .collect();
        let alpha = match cronbach_alpha(&columns) {
            Ok(a) => Reliability::Alpha(a),
            Err(StatsError::Degenerate(_) | StatsError::TooFew { .. }) => Reliability::Degenerate,
            Err(e) => return Err(e),
        };
        constructs.push(ConstructRow {
            construct: c,
            summary: Summary::of(&matrix.construct_scores(c), resamples, next_seed())?,
            alpha,
        });
    }

    let present = matrix.constructs();
    let pu_vs_peou = if present.contains(&Construct::Pu) && present.contains(&Construct::Peou) {
        Some(wilcoxon_signed_rank(
            &matrix.construct_scores(Construct::Pu),
            &matrix.construct_scores(Construct::Peou),
        )?)
    } else {
        None
    };

    let mut bi_correlations = Vec::new();
    if present.contains(&Construct::Bi) {
        let bi = matrix.construct_scores(Construct::Bi);
        for c in present.iter().copied().filter(|c| *c != Construct::Bi) {
            let r = match spearman_rho(&matrix.construct_scores(c), &bi) {
                Ok(r) => Some(r),
                Err(StatsError::Degenerate(_) | StatsError::TooFew { .. }) => None,
                Err(e) => return Err(e),
            };
            bi_correlations.push((c, r));
        }
    }
    let bi_top_correlate = bi_correlations
        .iter()
        .filter_map(|(c, r)| r.map(|r| (*c, r.rho)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c);

    Ok(Analysis {
        participants: matrix.participants().len(),
        resamples,
        seed,
        items,
        constructs,
        pu_vs_peou,
        bi_correlations,
        bi_top_correlate,
    })
}
