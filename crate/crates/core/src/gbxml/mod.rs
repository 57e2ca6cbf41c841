//! gbXML building models: parsing, serialization and geometry queries.
//!
//! Query results are always SI (m², m²·K/W) whatever units the source file
//! uses. Surface geometry is derived from the `PolyLoop`; exported
//! `RectangularGeometry` tilt/azimuth values are only compared against it.

pub mod geometry;
mod model;
mod parse;
mod query;
mod write;

pub use model::{
    BuildingModel, Construction, LengthUnit, Material, ModelAreaUnit, NamedSchedule, Space, Surface,
    SurfaceType, Vertex,
};
pub use parse::{parse_gbxml, surface_geometry_warnings, ParsedModel};
pub use query::{
    extract_attributes, model_summary, surface_area, surface_azimuth, surface_r_value, surface_tilt,
    AttributeDocument, ModelSummary, SurfaceAttributes,
};
pub use write::write_gbxml;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GbxmlError {
    #[error("MalformedXml: {0}")]
    MalformedXml(String),
    #[error("MissingCampus: document has no <Campus> building geometry")]
    MissingCampus,
    #[error("UnknownUnit: {attribute} '{value}' is not supported")]
    UnknownUnit { attribute: String, value: String },
    #[error("UnknownSurface: no surface with id '{0}'")]
    UnknownSurface(String),
    #[error("DegenerateLoop: surface '{surface}': {reason}")]
    DegenerateLoop { surface: String, reason: String },
    #[error("HorizontalSurface: surface '{0}' is horizontal, azimuth is undefined")]
    HorizontalSurface(String),
    #[error("NoConstruction: surface {0} has no resolvable construction")]
    NoConstruction(String),
    #[error("UnresolvedMaterial: surface '{surface}' layer material '{material}' is missing or has no resistance data")]
    UnresolvedMaterial { surface: String, material: String },
}

impl GbxmlError {
    pub fn kind(&self) -> &'static str {
        match self {
            GbxmlError::MalformedXml(_) => "MalformedXml",
            GbxmlError::MissingCampus => "MissingCampus",
            GbxmlError::UnknownUnit { .. } => "UnknownUnit",
            GbxmlError::UnknownSurface(_) => "UnknownSurface",
            GbxmlError::DegenerateLoop { .. } => "DegenerateLoop",
            GbxmlError::HorizontalSurface(_) => "HorizontalSurface",
            GbxmlError::NoConstruction(_) => "NoConstruction",
            GbxmlError::UnresolvedMaterial { .. } => "UnresolvedMaterial",
        }
    }
}
