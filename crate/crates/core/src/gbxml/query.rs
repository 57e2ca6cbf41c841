use serde::{Deserialize, Serialize};

use super::geometry::{analyze_loop, GeometryError, LoopGeometry};
use super::model::{BuildingModel, Surface, SurfaceType};
use super::parse::surface_geometry_warnings;
use super::GbxmlError;

fn find<'m>(model: &'m BuildingModel, surface_id: &str) -> Result<&'m Surface, GbxmlError> {
    model
        .surface(surface_id)
        .ok_or_else(|| GbxmlError::UnknownSurface(surface_id.to_string()))
}

fn geometry(surface: &Surface) -> Result<LoopGeometry, GbxmlError> {
    analyze_loop(&surface.vertices).map_err(|e| match e {
        GeometryError::DegenerateLoop(reason) => GbxmlError::DegenerateLoop {
            surface: surface.id.clone(),
            reason,
        },
        GeometryError::HorizontalSurface => GbxmlError::HorizontalSurface(surface.id.clone()),
    })
}

/// Surface area in m².
pub fn surface_area(model: &BuildingModel, surface_id: &str) -> Result<f64, GbxmlError> {
    let s = find(model, surface_id)?;
    let scale = model.length_unit.to_meters();
    Ok(geometry(s)?.area * scale * scale)
}

/// Tilt in degrees: 0 for an up-facing roof, 90 for a wall, 180 for a
/// down-facing floor.
pub fn surface_tilt(model: &BuildingModel, surface_id: &str) -> Result<f64, GbxmlError> {
    Ok(geometry(find(model, surface_id)?)?.tilt_deg())
}

/// Azimuth in degrees clockwise from project north.
pub fn surface_azimuth(model: &BuildingModel, surface_id: &str) -> Result<f64, GbxmlError> {
    let s = find(model, surface_id)?;
    geometry(s)?
        .azimuth_deg()
        .map_err(|_| GbxmlError::HorizontalSurface(s.id.clone()))
}

/// Layer-sum thermal resistance of the surface's construction in m²·K/W,
/// without air films.
pub fn surface_r_value(model: &BuildingModel, surface_id: &str) -> Result<f64, GbxmlError> {
    let s = find(model, surface_id)?;
    let cid = s
        .construction_id
        .as_deref()
        .ok_or_else(|| GbxmlError::NoConstruction(s.id.clone()))?;
    let construction = model
        .construction(cid)
        .ok_or_else(|| GbxmlError::NoConstruction(format!("{} (construction '{cid}' not found)", s.id)))?;
    if construction.layer_material_ids.is_empty() {
        return Err(GbxmlError::NoConstruction(format!("{} (construction '{cid}' has no layers)", s.id)));
    }
    construction
        .layer_material_ids
        .iter()
        .map(|mid| {
            model
                .material(mid)
                .and_then(|m| m.resistance())
                .ok_or_else(|| GbxmlError::UnresolvedMaterial {
                    surface: s.id.clone(),
                    material: mid.clone(),
                })
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub spaces: usize,
    pub surfaces: usize,
    pub constructions: usize,
    pub total_floor_area_m2: f64,
}

/// Counts plus total floor area: the sum of space areas when any space carries
/// one, otherwise the sum of floor-type surface areas.
pub fn model_summary(model: &BuildingModel) -> ModelSummary {
    let space_areas: Vec<f64> = model.spaces.iter().filter_map(|s| s.area).collect();
    let total_floor_area_m2 = if !space_areas.is_empty() {
        space_areas.iter().sum::<f64>() * model.area_unit.to_square_meters()
    } else {
        model
            .surfaces
            .iter()
            .filter(|s| s.surface_type.is_floor())
            .filter_map(|s| surface_area(model, &s.id).ok())
            .sum()
    };
    ModelSummary {
        spaces: model.spaces.len(),
        surfaces: model.surfaces.len(),
        constructions: model.constructions.len(),
        total_floor_area_m2,
    }
}

/// Per-surface attribute record for the structured extraction document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceAttributes {
    pub id: String,
    pub name: String,
    pub surface_type: SurfaceType,
    pub area_m2: Option<f64>,
    pub tilt_deg: Option<f64>,
    pub azimuth_deg: Option<f64>,
    pub r_value_si: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeDocument {
    pub summary: ModelSummary,
    pub surfaces: Vec<SurfaceAttributes>,
}

pub fn extract_attributes(model: &BuildingModel) -> AttributeDocument {
    let surfaces = model
        .surfaces
        .iter()
        .map(|s| {
            let mut warnings = surface_geometry_warnings(s);
            let r_value_si = match surface_r_value(model, &s.id) {
                Ok(r) => Some(r),
                Err(GbxmlError::NoConstruction(_)) if s.construction_id.is_none() => None,
                Err(e) => {
                    warnings.push(e.to_string());
                    None
                }
            };
            SurfaceAttributes {
                id: s.id.clone(),
                name: s.name.clone(),
                surface_type: s.surface_type,
                area_m2: surface_area(model, &s.id).ok(),
                tilt_deg: surface_tilt(model, &s.id).ok(),
                azimuth_deg: surface_azimuth(model, &s.id).ok(),
                r_value_si,
                warnings,
            }
        })
        .collect();
    AttributeDocument {
        summary: model_summary(model),
        surfaces,
    }
}
