//! Deterministic energy-code rule evaluation.
//!
//! Only the building area method for interior lighting carries rule content.
//! Envelope and HVAC checks have no tables here.

mod lighting;
mod lpd;
pub mod units;

pub use lighting::{
    check_interior_lighting, lighting_allowed_wattage, Citation, ComplianceInput,
    ComplianceResult, ComplianceStatus,
};
pub use lpd::{BuildingUseType, CodeVersion, LightingMethod, LpdCatalog, LpdEntry, LpdTable};
pub use units::{convert_area, Area, AreaUnit};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RulesError {
    #[error("NegativeArea: area must be non-negative, got {0}")]
    NegativeArea(f64),
    #[error("NonFiniteArea: area must be a finite number")]
    NonFiniteArea,
    #[error("UnknownAreaUnit: '{0}' (expected m2 or ft2)")]
    UnknownAreaUnit(String),
    #[error("UnknownUseType: '{0}' has no entry in the lighting power density table")]
    UnknownUseType(String),
    #[error("UnknownCodeVersion: no lighting power density table loaded for '{0}'")]
    UnknownCodeVersion(String),
    #[error("InvalidTable: {0}")]
    InvalidTable(String),
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl RulesError {
    pub fn kind(&self) -> &'static str {
        match self {
            RulesError::NegativeArea(_) => "NegativeArea",
            RulesError::NonFiniteArea => "NonFiniteArea",
            RulesError::UnknownAreaUnit(_) => "UnknownAreaUnit",
            RulesError::UnknownUseType(_) => "UnknownUseType",
            RulesError::UnknownCodeVersion(_) => "UnknownCodeVersion",
            RulesError::InvalidTable(_) => "InvalidTable",
            RulesError::InvalidInput(_) => "InvalidInput",
        }
    }
}
