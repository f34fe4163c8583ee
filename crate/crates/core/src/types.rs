//! Closed vocabularies shared by every stage of the pipeline: venue
//! categories, intra-day periods and calendar months.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Foursquare top-level venue categories, in the fixed order used for
/// category vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    ArtsEntertainment,
    CollegeUniversity,
    Event,
    Food,
    NightlifeSpot,
    OutdoorsRecreation,
    ProfessionalOther,
    Residence,
    ShopService,
    TravelTransport,
}

impl Category {
    pub const COUNT: usize = 10;

    pub const ALL: [Category; Category::COUNT] = [
        Category::ArtsEntertainment,
        Category::CollegeUniversity,
        Category::Event,
        Category::Food,
        Category::NightlifeSpot,
        Category::OutdoorsRecreation,
        Category::ProfessionalOther,
        Category::Residence,
        Category::ShopService,
        Category::TravelTransport,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::ArtsEntertainment => "Arts & Entertainment",
            Category::CollegeUniversity => "College & University",
            Category::Event => "Event",
            Category::Food => "Food",
            Category::NightlifeSpot => "Nightlife Spot",
            Category::OutdoorsRecreation => "Outdoors & Recreation",
            Category::ProfessionalOther => "Professional & Other Places",
            Category::Residence => "Residence",
            Category::ShopService => "Shop & Service",
            Category::TravelTransport => "Travel & Transport",
        }
    }

    /// Position of the category in vectors built over [`Category::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn valid_labels() -> String {
        Category::ALL
            .iter()
            .map(|c| c.label())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::UnknownCategory {
                label: s.to_string(),
                valid: Category::valid_labels(),
            })
    }
}

/// Intra-day time bucket of a movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    Overnight,
    Morning,
    Midday,
    Afternoon,
    Night,
}

impl Period {
    pub const ALL: [Period; 5] = [
        Period::Overnight,
        Period::Morning,
        Period::Midday,
        Period::Afternoon,
        Period::Night,
    ];

    /// Buckets an hour of day: overnight 00-05, morning 06-09, midday 10-14,
    /// afternoon 15-18, night 19-23 (both ends inclusive).
    pub fn from_hour(hour: u32) -> Result<Period> {
        match hour {
            0..=5 => Ok(Period::Overnight),
            6..=9 => Ok(Period::Morning),
            10..=14 => Ok(Period::Midday),
            15..=18 => Ok(Period::Afternoon),
            19..=23 => Ok(Period::Night),
            _ => Err(Error::Parameter(format!("hour {hour} is outside 0-23"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Period::Overnight => "overnight",
            Period::Morning => "morning",
            Period::Midday => "midday",
            Period::Afternoon => "afternoon",
            Period::Night => "night",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Alias for [`Period::from_hour`].
pub fn classify_period(hour: u32) -> Result<Period> {
    Period::from_hour(hour)
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Period::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                Error::Parameter(format!(
                    "unknown period {s:?}; expected one of overnight|morning|midday|afternoon|night"
                ))
            })
    }
}

/// Calendar month, serialized as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearMonth {
    pub year: u16,
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: u16, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Parameter(format!("month {month} is outside 1-12")));
        }
        Ok(YearMonth { year, month })
    }

    /// The month `n` months after this one.
    pub fn plus_months(self, n: u32) -> YearMonth {
        let total = self.year as u32 * 12 + (self.month as u32 - 1) + n;
        YearMonth {
            year: (total / 12) as u16,
            month: (total % 12 + 1) as u8,
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl TryFrom<String> for YearMonth {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<YearMonth> for String {
    fn from(ym: YearMonth) -> String {
        ym.to_string()
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("expected YYYY-MM, found {s:?}"));
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year = y.parse().map_err(|_| bad())?;
        let month = m.parse().map_err(|_| bad())?;
        YearMonth::new(year, month)
    }
}
