use std::collections::{BTreeMap, HashMap, HashSet};

use roxmltree::{Document, Node};

use super::geometry::analyze_loop;
use super::model::{
    BuildingModel, Construction, LengthUnit, Material, ModelAreaUnit, NamedSchedule, Space, Surface,
    SurfaceType, Vertex,
};
use super::GbxmlError;
use crate::rules::units::{RSI_PER_RIP, W_PER_MK_PER_BTU_H_FT_F};

/// Declared tilt/azimuth may differ from the loop-derived value by this much
/// before a warning is raised.
const DECLARED_ANGLE_TOLERANCE_DEG: f64 = 1.0;

/// A parsed model together with the non-fatal issues found while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedModel {
    pub model: BuildingModel,
    pub warnings: Vec<String>,
}

fn local<'a>(node: &Node<'a, '_>) -> &'a str {
    node.tag_name().name()
}

fn children<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|n| n.is_element())
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    children(node).find(|n| local(n) == name)
}

fn child_text(node: Node<'_, '_>, name: &str) -> Option<String> {
    child(node, name).and_then(|n| n.text()).map(|t| t.trim().to_string())
}

#[derive(Default)]
struct Warnings {
    list: Vec<String>,
    ignored: BTreeMap<(String, String), usize>,
}

impl Warnings {
    fn push(&mut self, msg: impl Into<String>) {
        self.list.push(msg.into());
    }

    fn ignored(&mut self, parent: &str, element: &str) {
        *self.ignored.entry((parent.to_string(), element.to_string())).or_default() += 1;
    }

    fn finish(mut self) -> Vec<String> {
        for ((parent, element), count) in std::mem::take(&mut self.ignored) {
            self.list.push(format!("ignored {count} unrecognized <{element}> element(s) in <{parent}>"));
        }
        self.list
    }
}

/// Parses gbXML text into a [`BuildingModel`].
pub fn parse_gbxml(text: &str) -> Result<ParsedModel, GbxmlError> {
    let doc = Document::parse(text).map_err(|e| GbxmlError::MalformedXml(e.to_string()))?;
    let root = doc.root_element();
    let mut w = Warnings::default();

    if local(&root) != "gbXML" {
        w.push(format!("root element is <{}>, expected <gbXML>", local(&root)));
    }
    let length_unit = match root.attribute("lengthUnit") {
        None => LengthUnit::Meters,
        Some(v) => LengthUnit::from_gbxml(v).ok_or_else(|| GbxmlError::UnknownUnit {
            attribute: "lengthUnit".into(),
            value: v.into(),
        })?,
    };
    let area_unit = match root.attribute("areaUnit") {
        None => ModelAreaUnit::SquareMeters,
        Some(v) => ModelAreaUnit::from_gbxml(v).ok_or_else(|| GbxmlError::UnknownUnit {
            attribute: "areaUnit".into(),
            value: v.into(),
        })?,
    };

    let campus = child(root, "Campus").ok_or(GbxmlError::MissingCampus)?;

    let mut model = BuildingModel {
        length_unit,
        area_unit,
        ..Default::default()
    };

    let mut layers: HashMap<String, Vec<String>> = HashMap::new();
    let mut day_schedules: HashMap<String, (Option<String>, Vec<f64>)> = HashMap::new();
    let mut week_schedules: HashMap<String, Vec<(String, String)>> = HashMap::new();
    let mut schedule_nodes = Vec::new();
    let mut construction_nodes = Vec::new();

    for node in children(root) {
        match local(&node) {
            "Campus" => {}
            "Construction" => construction_nodes.push(node),
            "Layer" => {
                if let Some(id) = node.attribute("id") {
                    let ids = children(node)
                        .filter(|n| local(n) == "MaterialId")
                        .filter_map(|n| n.attribute("materialIdRef"))
                        .map(str::to_string)
                        .collect();
                    layers.insert(id.to_string(), ids);
                }
            }
            "Material" => {
                if let Some(m) = parse_material(node, &mut w)? {
                    if model.material(&m.id).is_some() {
                        w.push(format!("duplicate material id '{}' ignored", m.id));
                    } else {
                        model.materials.push(m);
                    }
                }
            }
            "Schedule" => schedule_nodes.push(node),
            "WeekSchedule" => {
                if let Some(id) = node.attribute("id") {
                    let days = children(node)
                        .filter(|n| local(n) == "Day")
                        .filter_map(|n| {
                            Some((n.attribute("dayType")?.to_string(), n.attribute("dayScheduleIdRef")?.to_string()))
                        })
                        .collect();
                    week_schedules.insert(id.to_string(), days);
                }
            }
            "DaySchedule" => {
                if let Some(id) = node.attribute("id") {
                    let list = child(node, "ValueList").unwrap_or(node);
                    let mut values = Vec::new();
                    for v in children(list).filter(|n| local(n) == "Value") {
                        match v.text().and_then(|t| t.trim().parse::<f64>().ok()) {
                            Some(x) => values.push(x),
                            None => w.push(format!("day schedule '{id}' has a non-numeric value")),
                        }
                    }
                    day_schedules.insert(id.to_string(), (node.attribute("type").map(str::to_string), values));
                }
            }
            other => w.ignored("gbXML", other),
        }
    }

    for node in children(campus) {
        match local(&node) {
            "Building" => {
                for b in children(node) {
                    match local(&b) {
                        "Space" => parse_space(b, &mut model, &mut w),
                        "Name" | "Description" => {}
                        other => w.ignored("Building", other),
                    }
                }
            }
            "Surface" => {
                if let Some(s) = parse_surface(node, &mut w) {
                    if model.surface(&s.id).is_some() {
                        w.push(format!("duplicate surface id '{}' ignored", s.id));
                    } else {
                        model.surfaces.push(s);
                    }
                }
            }
            "Name" | "Description" => {}
            other => w.ignored("Campus", other),
        }
    }

    for node in construction_nodes {
        let Some(id) = node.attribute("id") else {
            w.push("construction without id ignored");
            continue;
        };
        let mut material_ids = Vec::new();
        for c in children(node) {
            match local(&c) {
                "LayerId" => match c.attribute("layerIdRef") {
                    Some(lref) => match layers.get(lref) {
                        Some(ids) => material_ids.extend(ids.iter().cloned()),
                        None => w.push(format!("construction '{id}' references missing layer '{lref}'")),
                    },
                    None => w.push(format!("construction '{id}' has a LayerId without layerIdRef")),
                },
                "MaterialId" => {
                    if let Some(mref) = c.attribute("materialIdRef") {
                        material_ids.push(mref.to_string());
                    }
                }
                _ => {}
            }
        }
        if material_ids.is_empty() {
            w.push(format!("construction '{id}' has no layers"));
        }
        if model.construction(id).is_some() {
            w.push(format!("duplicate construction id '{id}' ignored"));
            continue;
        }
        model.constructions.push(Construction {
            id: id.to_string(),
            name: child_text(node, "Name").unwrap_or_default(),
            layer_material_ids: material_ids,
        });
    }

    for node in schedule_nodes {
        if let Some(s) = parse_schedule(node, &week_schedules, &day_schedules, &mut w) {
            model.schedules.push(s);
        }
    }

    check_references(&model, &mut w);
    for surface in &model.surfaces {
        w.list.extend(surface_geometry_warnings(surface));
    }

    Ok(ParsedModel {
        model,
        warnings: w.finish(),
    })
}

fn parse_f64(node: Node<'_, '_>, what: &str, w: &mut Warnings) -> Option<f64> {
    let text = node.text().unwrap_or("").trim();
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => {
            w.push(format!("{what}: '{text}' is not a finite number"));
            None
        }
    }
}

fn parse_space(node: Node<'_, '_>, model: &mut BuildingModel, w: &mut Warnings) {
    let Some(id) = node.attribute("id") else {
        w.push("space without id ignored");
        return;
    };
    let area = child(node, "Area").and_then(|a| parse_f64(a, &format!("space '{id}' area"), w));
    model.spaces.push(Space {
        id: id.to_string(),
        name: child_text(node, "Name").unwrap_or_default(),
        area,
    });
}

fn parse_surface(node: Node<'_, '_>, w: &mut Warnings) -> Option<Surface> {
    let Some(id) = node.attribute("id") else {
        w.push("surface without id ignored");
        return None;
    };
    let mut surface = Surface {
        id: id.to_string(),
        name: String::new(),
        surface_type: SurfaceType::from_gbxml(node.attribute("surfaceType").unwrap_or("")),
        vertices: Vec::new(),
        construction_id: node.attribute("constructionIdRef").map(str::to_string),
        adjacent_space_ids: Vec::new(),
        declared_tilt: None,
        declared_azimuth: None,
    };
    let mut has_geometry = false;
    for c in children(node) {
        match local(&c) {
            "Name" => surface.name = c.text().unwrap_or("").trim().to_string(),
            "AdjacentSpaceId" => {
                if let Some(r) = c.attribute("spaceIdRef") {
                    if surface.adjacent_space_ids.len() < 2 {
                        surface.adjacent_space_ids.push(r.to_string());
                    } else {
                        w.push(format!("surface '{id}' has more than 2 adjacent spaces; extra ignored"));
                    }
                }
            }
            "RectangularGeometry" => {
                surface.declared_tilt = child(c, "Tilt").and_then(|t| parse_f64(t, &format!("surface '{id}' tilt"), w));
                surface.declared_azimuth =
                    child(c, "Azimuth").and_then(|t| parse_f64(t, &format!("surface '{id}' azimuth"), w));
            }
            "PlanarGeometry" => {
                let Some(poly) = child(c, "PolyLoop") else {
                    w.push(format!("surface '{id}' PlanarGeometry has no PolyLoop"));
                    continue;
                };
                for p in children(poly).filter(|n| local(n) == "CartesianPoint") {
                    let coords: Vec<f64> = children(p)
                        .filter(|n| local(n) == "Coordinate")
                        .filter_map(|n| n.text().and_then(|t| t.trim().parse::<f64>().ok()))
                        .filter(|v| v.is_finite())
                        .collect();
                    if coords.len() != 3 {
                        w.push(format!("surface '{id}' has a CartesianPoint without 3 finite coordinates; surface ignored"));
                        return None;
                    }
                    surface.vertices.push(Vertex::new(coords[0], coords[1], coords[2]));
                }
                has_geometry = true;
            }
            "CADObjectId" | "Description" => {}
            other => w.ignored("Surface", other),
        }
    }
    if !has_geometry {
        w.push(format!("surface '{id}' has no PlanarGeometry; surface ignored"));
        return None;
    }
    Some(surface)
}

fn parse_material(node: Node<'_, '_>, w: &mut Warnings) -> Result<Option<Material>, GbxmlError> {
    let Some(id) = node.attribute("id") else {
        w.push("material without id ignored");
        return Ok(None);
    };
    let mut m = Material {
        id: id.to_string(),
        name: child_text(node, "Name").unwrap_or_default(),
        r_value_si: None,
        thickness: None,
        conductivity: None,
    };
    if let Some(n) = child(node, "R-value") {
        let factor = match n.attribute("unit") {
            None | Some("SquareMeterKPerWatt") => 1.0,
            Some("HrSquareFtFPerBTU") => RSI_PER_RIP,
            Some(u) => return Err(GbxmlError::UnknownUnit { attribute: "R-value unit".into(), value: u.into() }),
        };
        m.r_value_si = parse_f64(n, &format!("material '{id}' R-value"), w).map(|v| v * factor);
    }
    if let Some(n) = child(node, "Thickness") {
        let factor = match n.attribute("unit") {
            None => 1.0,
            Some(u) => LengthUnit::from_gbxml(u)
                .ok_or_else(|| GbxmlError::UnknownUnit { attribute: "Thickness unit".into(), value: u.into() })?
                .to_meters(),
        };
        m.thickness = parse_f64(n, &format!("material '{id}' thickness"), w).map(|v| v * factor);
    }
    if let Some(n) = child(node, "Conductivity") {
        let factor = match n.attribute("unit") {
            None | Some("WPerMeterK") => 1.0,
            Some("BtuPerHourFtF") => W_PER_MK_PER_BTU_H_FT_F,
            Some(u) => return Err(GbxmlError::UnknownUnit { attribute: "Conductivity unit".into(), value: u.into() }),
        };
        m.conductivity = parse_f64(n, &format!("material '{id}' conductivity"), w).map(|v| v * factor);
    }
    if m.resistance().is_none() {
        w.push(format!(
            "material '{id}' has neither an R-value nor positive thickness and conductivity"
        ));
    }
    Ok(Some(m))
}

fn parse_schedule(
    node: Node<'_, '_>,
    weeks: &HashMap<String, Vec<(String, String)>>,
    days: &HashMap<String, (Option<String>, Vec<f64>)>,
    w: &mut Warnings,
) -> Option<NamedSchedule> {
    let Some(id) = node.attribute("id") else {
        w.push("schedule without id ignored");
        return None;
    };
    let week_refs: Vec<&str> = children(node)
        .filter(|n| local(n) == "YearSchedule")
        .filter_map(|y| child(y, "WeekScheduleId"))
        .filter_map(|n| n.attribute("weekScheduleIdRef"))
        .collect();
    if week_refs.len() > 1 {
        w.push(format!("schedule '{id}' has {} year schedules; only the first is used", week_refs.len()));
    }
    let mut hourly_values = BTreeMap::new();
    if let Some(week_ref) = week_refs.first() {
        match weeks.get(*week_ref) {
            None => w.push(format!("schedule '{id}' references missing week schedule '{week_ref}'")),
            Some(day_refs) => {
                for (day_type, day_ref) in day_refs {
                    match days.get(day_ref) {
                        None => w.push(format!("schedule '{id}' references missing day schedule '{day_ref}'")),
                        Some((kind, values)) => {
                            if kind.as_deref().is_some_and(|k| k != "Fraction") {
                                w.push(format!("schedule '{id}' day '{day_type}' is not a fraction schedule; skipped"));
                            } else if values.len() != 24 || values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                                w.push(format!(
                                    "schedule '{id}' day '{day_type}' needs 24 values in [0,1]; skipped"
                                ));
                            } else {
                                hourly_values.insert(day_type.clone(), values.clone());
                            }
                        }
                    }
                }
            }
        }
    }
    Some(NamedSchedule {
        id: id.to_string(),
        name: child_text(node, "Name").unwrap_or_default(),
        hourly_values,
    })
}

fn check_references(model: &BuildingModel, w: &mut Warnings) {
    let constructions: HashSet<&str> = model.constructions.iter().map(|c| c.id.as_str()).collect();
    let materials: HashSet<&str> = model.materials.iter().map(|m| m.id.as_str()).collect();
    let spaces: HashSet<&str> = model.spaces.iter().map(|s| s.id.as_str()).collect();
    for s in &model.surfaces {
        if let Some(c) = &s.construction_id {
            if !constructions.contains(c.as_str()) {
                w.push(format!("dangling reference: surface '{}' references missing construction '{c}'", s.id));
            }
        }
        for sp in &s.adjacent_space_ids {
            if !spaces.contains(sp.as_str()) {
                w.push(format!("dangling reference: surface '{}' references missing space '{sp}'", s.id));
            }
        }
    }
    for c in &model.constructions {
        for m in &c.layer_material_ids {
            if !materials.contains(m.as_str()) {
                w.push(format!("dangling reference: construction '{}' references missing material '{m}'", c.id));
            }
        }
    }
}

/// Geometry issues for one surface: degenerate or non-planar loops, and
/// exported tilt/azimuth values that disagree with the loop-derived ones.
pub fn surface_geometry_warnings(surface: &Surface) -> Vec<String> {
    let mut out = Vec::new();
    let g = match analyze_loop(&surface.vertices) {
        Ok(g) => g,
        Err(e) => {
            out.push(format!("surface '{}': {e}", surface.id));
            return out;
        }
    };
    if !g.is_planar() {
        out.push(format!(
            "surface '{}': vertex loop is not planar (max deviation {:.3e} in model units)",
            surface.id, g.max_deviation
        ));
    }
    if let Some(t) = surface.declared_tilt {
        let derived = g.tilt_deg();
        if (t - derived).abs() > DECLARED_ANGLE_TOLERANCE_DEG {
            out.push(format!(
                "surface '{}': declared tilt {t}° differs from derived {derived:.3}°; derived value used",
                surface.id
            ));
        }
    }
    if let (Some(a), Ok(derived)) = (surface.declared_azimuth, g.azimuth_deg()) {
        let diff = (a - derived).rem_euclid(360.0);
        if diff.min(360.0 - diff) > DECLARED_ANGLE_TOLERANCE_DEG {
            out.push(format!(
                "surface '{}': declared azimuth {a}° differs from derived {derived:.3}°; derived value used",
                surface.id
            ));
        }
    }
    out
}
