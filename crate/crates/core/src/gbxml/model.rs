use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rules::units::{M_PER_FT, M_PER_INCH, M_PER_MM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    #[default]
    Meters,
    Feet,
    Inches,
    Millimeters,
}

impl LengthUnit {
    pub fn to_meters(self) -> f64 {
        match self {
            LengthUnit::Meters => 1.0,
            LengthUnit::Feet => M_PER_FT,
            LengthUnit::Inches => M_PER_INCH,
            LengthUnit::Millimeters => M_PER_MM,
        }
    }

    pub fn gbxml_name(self) -> &'static str {
        match self {
            LengthUnit::Meters => "Meters",
            LengthUnit::Feet => "Feet",
            LengthUnit::Inches => "Inches",
            LengthUnit::Millimeters => "Millimeters",
        }
    }

    pub fn from_gbxml(s: &str) -> Option<Self> {
        match s {
            "Meters" => Some(LengthUnit::Meters),
            "Feet" => Some(LengthUnit::Feet),
            "Inches" => Some(LengthUnit::Inches),
            "Millimeters" => Some(LengthUnit::Millimeters),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelAreaUnit {
    #[default]
    SquareMeters,
    SquareFeet,
}

impl ModelAreaUnit {
    pub fn to_square_meters(self) -> f64 {
        match self {
            ModelAreaUnit::SquareMeters => 1.0,
            ModelAreaUnit::SquareFeet => M_PER_FT * M_PER_FT,
        }
    }

    pub fn gbxml_name(self) -> &'static str {
        match self {
            ModelAreaUnit::SquareMeters => "SquareMeters",
            ModelAreaUnit::SquareFeet => "SquareFeet",
        }
    }

    pub fn from_gbxml(s: &str) -> Option<Self> {
        match s {
            "SquareMeters" => Some(ModelAreaUnit::SquareMeters),
            "SquareFeet" => Some(ModelAreaUnit::SquareFeet),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceType {
    ExteriorWall,
    InteriorWall,
    Roof,
    Ceiling,
    RaisedFloor,
    SlabOnGrade,
    Shade,
    Other,
}

impl SurfaceType {
    pub fn from_gbxml(s: &str) -> Self {
        match s {
            "ExteriorWall" => SurfaceType::ExteriorWall,
            "InteriorWall" => SurfaceType::InteriorWall,
            "Roof" => SurfaceType::Roof,
            "Ceiling" => SurfaceType::Ceiling,
            "RaisedFloor" => SurfaceType::RaisedFloor,
            "SlabOnGrade" => SurfaceType::SlabOnGrade,
            "Shade" => SurfaceType::Shade,
            _ => SurfaceType::Other,
        }
    }

    pub fn gbxml_name(self) -> &'static str {
        match self {
            SurfaceType::ExteriorWall => "ExteriorWall",
            SurfaceType::InteriorWall => "InteriorWall",
            SurfaceType::Roof => "Roof",
            SurfaceType::Ceiling => "Ceiling",
            SurfaceType::RaisedFloor => "RaisedFloor",
            SurfaceType::SlabOnGrade => "SlabOnGrade",
            SurfaceType::Shade => "Shade",
            SurfaceType::Other => "Other",
        }
    }

    pub fn is_floor(self) -> bool {
        matches!(self, SurfaceType::RaisedFloor | SurfaceType::SlabOnGrade)
    }
}

/// A point in model length units. +Z is up, +Y is project north.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vertex {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub id: String,
    pub name: String,
    /// Floor area in the model's area unit, when the export carries one.
    pub area: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub id: String,
    pub name: String,
    pub surface_type: SurfaceType,
    pub vertices: Vec<Vertex>,
    pub construction_id: Option<String>,
    pub adjacent_space_ids: Vec<String>,
    /// `RectangularGeometry/Tilt` as exported, degrees.
    pub declared_tilt: Option<f64>,
    /// `RectangularGeometry/Azimuth` as exported, degrees.
    pub declared_azimuth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub id: String,
    pub name: String,
    /// Outside to inside.
    pub layer_material_ids: Vec<String>,
}

/// Material properties in SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub id: String,
    pub name: String,
    /// m²·K/W
    pub r_value_si: Option<f64>,
    /// m
    pub thickness: Option<f64>,
    /// W/(m·K)
    pub conductivity: Option<f64>,
}

impl Material {
    /// Layer resistance: the explicit R-value, else thickness / conductivity.
    pub fn resistance(&self) -> Option<f64> {
        match (self.r_value_si, self.thickness, self.conductivity) {
            (Some(r), _, _) => Some(r),
            (None, Some(t), Some(k)) if t > 0.0 && k > 0.0 => Some(t / k),
            _ => None,
        }
    }
}

/// A schedule with 24 hourly fractions per day type (e.g. "Weekday").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedSchedule {
    pub id: String,
    pub name: String,
    pub hourly_values: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BuildingModel {
    pub length_unit: LengthUnit,
    pub area_unit: ModelAreaUnit,
    pub spaces: Vec<Space>,
    pub surfaces: Vec<Surface>,
    pub constructions: Vec<Construction>,
    pub materials: Vec<Material>,
    pub schedules: Vec<NamedSchedule>,
}

impl BuildingModel {
    pub fn surface(&self, id: &str) -> Option<&Surface> {
        self.surfaces.iter().find(|s| s.id == id)
    }

    pub fn construction(&self, id: &str) -> Option<&Construction> {
        self.constructions.iter().find(|c| c.id == id)
    }

    pub fn material(&self, id: &str) -> Option<&Material> {
        self.materials.iter().find(|m| m.id == id)
    }
}
