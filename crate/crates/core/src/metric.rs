//! Registry of the metrics the pipeline knows how to compute.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Whether larger values of a metric indicate a better system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

impl Orientation {
    /// Maps a value onto the "higher is better" scale.
    pub fn orient(self, value: f64) -> f64 {
        match self {
            Orientation::HigherBetter => value,
            Orientation::LowerBetter => -value,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::HigherBetter => "higher",
            Orientation::LowerBetter => "lower",
        }
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "higher" | "higher-better" => Ok(Orientation::HigherBetter),
            "lower" | "lower-better" => Ok(Orientation::LowerBetter),
            other => Err(Error::format(format!("unknown orientation '{other}'"))),
        }
    }
}

/// Report grouping, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    WordOverlap,
    EmbeddingBased,
    DistributionBased,
    Other,
}

impl Category {
    /// Category of a metric name; names outside the registry are `Other`.
    pub fn of(name: &str) -> Category {
        name.parse::<Metric>()
            .map(Metric::category)
            .unwrap_or(Category::Other)
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::WordOverlap => "word-overlap",
            Category::EmbeddingBased => "embedding-based",
            Category::DistributionBased => "distribution-based",
            Category::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Metric {
    Bleu,
    RougeL,
    Greedy,
    Average,
    Extrema,
    BertScore,
    Fbd,
    Prd,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::Bleu,
        Metric::RougeL,
        Metric::Greedy,
        Metric::Average,
        Metric::Extrema,
        Metric::BertScore,
        Metric::Fbd,
        Metric::Prd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Bleu => "bleu",
            Metric::RougeL => "rouge-l",
            Metric::Greedy => "greedy",
            Metric::Average => "average",
            Metric::Extrema => "extrema",
            Metric::BertScore => "bertscore",
            Metric::Fbd => "fbd",
            Metric::Prd => "prd",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Metric::Fbd => Orientation::LowerBetter,
            _ => Orientation::HigherBetter,
        }
    }

    pub fn category(self) -> Category {
        match self {
            Metric::Bleu | Metric::RougeL => Category::WordOverlap,
            Metric::Greedy | Metric::Average | Metric::Extrema | Metric::BertScore => {
                Category::EmbeddingBased
            }
            Metric::Fbd | Metric::Prd => Category::DistributionBased,
        }
    }

    /// Metrics scored once per turn and averaged to system level.
    pub fn is_turn_level(self) -> bool {
        matches!(
            self,
            Metric::RougeL | Metric::Greedy | Metric::Average | Metric::Extrema | Metric::BertScore
        )
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.to_ascii_lowercase();
        let key = match lower.as_str() {
            "rouge" | "rougel" | "rouge_l" => "rouge-l",
            "embedding-average" | "avg" => "average",
            "vector-extrema" => "extrema",
            "greedy-matching" => "greedy",
            "bert-score" => "bertscore",
            other => other,
        };
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::Manifest(format!("unknown metric '{s}'")))
    }
}

impl TryFrom<String> for Metric {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<Metric> for String {
    fn from(m: Metric) -> String {
        m.name().to_string()
    }
}
