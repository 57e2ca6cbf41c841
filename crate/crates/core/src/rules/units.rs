//! Unit conversion constants and area conversion.
//!
//! All query results elsewhere in the crate are normalized to SI through the
//! constants defined here.

use serde::{Deserialize, Serialize};

use super::RulesError;

/// Square feet per square meter.
pub const FT2_PER_M2: f64 = 10.763910417;

/// Meters per international foot.
pub const M_PER_FT: f64 = 0.3048;
pub const M_PER_INCH: f64 = 0.0254;
pub const M_PER_MM: f64 = 0.001;

/// Square meters per square foot, derived from the exact foot definition.
/// Used for converting model geometry; [`FT2_PER_M2`] is used for code
/// allowance arithmetic.
pub const M2_PER_FT2_EXACT: f64 = M_PER_FT * M_PER_FT;

/// h·ft²·°F/Btu to m²·K/W.
pub const RSI_PER_RIP: f64 = 0.176_110_2;
/// Btu/(h·ft·°F) to W/(m·K).
pub const W_PER_MK_PER_BTU_H_FT_F: f64 = 1.730_734_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AreaUnit {
    #[serde(rename = "m2")]
    SquareMeters,
    #[serde(rename = "ft2")]
    SquareFeet,
}

impl AreaUnit {
    pub fn label(self) -> &'static str {
        match self {
            AreaUnit::SquareMeters => "m2",
            AreaUnit::SquareFeet => "ft2",
        }
    }
}

impl std::str::FromStr for AreaUnit {
    type Err = RulesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m2" | "m²" | "sqm" | "square_meters" | "squaremeters" => Ok(AreaUnit::SquareMeters),
            "ft2" | "ft²" | "sqft" | "square_feet" | "squarefeet" => Ok(AreaUnit::SquareFeet),
            _ => Err(RulesError::UnknownAreaUnit(s.to_string())),
        }
    }
}

impl std::fmt::Display for AreaUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An area value tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub value: f64,
    pub unit: AreaUnit,
}

impl Area {
    pub fn new(value: f64, unit: AreaUnit) -> Self {
        Self { value, unit }
    }

    pub fn m2(value: f64) -> Self {
        Self::new(value, AreaUnit::SquareMeters)
    }

    pub fn ft2(value: f64) -> Self {
        Self::new(value, AreaUnit::SquareFeet)
    }

    pub fn to(self, unit: AreaUnit) -> Result<Area, RulesError> {
        convert_area(self.value, self.unit, unit).map(|value| Area { value, unit })
    }
}

/// Converts an area between square meters and square feet.
///
/// The IP and SI editions of the energy standard do not always use exact
/// translations of each other's thresholds (25,000 ft² is published as a
/// nominal 2,300 m², not the 2,322.576 m² returned here). This function does
/// direct arithmetic conversion only and makes no attempt to map between
/// nominal edition thresholds.
pub fn convert_area(value: f64, from: AreaUnit, to: AreaUnit) -> Result<f64, RulesError> {
    if !value.is_finite() {
        return Err(RulesError::NonFiniteArea);
    }
    if value < 0.0 {
        return Err(RulesError::NegativeArea(value));
    }
    Ok(match (from, to) {
        (a, b) if a == b => value,
        (AreaUnit::SquareMeters, AreaUnit::SquareFeet) => value * FT2_PER_M2,
        (AreaUnit::SquareFeet, AreaUnit::SquareMeters) => value / FT2_PER_M2,
        _ => unreachable!(),
    })
}
