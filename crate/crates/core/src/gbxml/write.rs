//! Serializes the recognized subset of a model back to gbXML.

use std::fmt::Write as _;

use super::model::BuildingModel;

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Writes a gbXML document that parses back to an equal [`BuildingModel`].
/// Material properties are written in SI units.
pub fn write_gbxml(model: &BuildingModel) -> String {
    let mut x = String::new();
    let _ = writeln!(x, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        x,
        r#"<gbXML xmlns="http://www.gbxml.org/schema" version="6.01" lengthUnit="{}" areaUnit="{}">"#,
        model.length_unit.gbxml_name(),
        model.area_unit.gbxml_name()
    );
    let _ = writeln!(x, r#"  <Campus id="campus">"#);
    let _ = writeln!(x, r#"    <Building id="building" buildingType="Unknown">"#);
    for s in &model.spaces {
        let _ = writeln!(x, r#"      <Space id="{}">"#, esc(&s.id));
        if !s.name.is_empty() {
            let _ = writeln!(x, "        <Name>{}</Name>", esc(&s.name));
        }
        if let Some(a) = s.area {
            let _ = writeln!(x, "        <Area>{a}</Area>");
        }
        let _ = writeln!(x, "      </Space>");
    }
    let _ = writeln!(x, "    </Building>");
    for s in &model.surfaces {
        let _ = write!(x, r#"    <Surface id="{}" surfaceType="{}""#, esc(&s.id), s.surface_type.gbxml_name());
        if let Some(c) = &s.construction_id {
            let _ = write!(x, r#" constructionIdRef="{}""#, esc(c));
        }
        let _ = writeln!(x, ">");
        if !s.name.is_empty() {
            let _ = writeln!(x, "      <Name>{}</Name>", esc(&s.name));
        }
        for a in &s.adjacent_space_ids {
            let _ = writeln!(x, r#"      <AdjacentSpaceId spaceIdRef="{}"/>"#, esc(a));
        }
        if s.declared_tilt.is_some() || s.declared_azimuth.is_some() {
            let _ = writeln!(x, "      <RectangularGeometry>");
            if let Some(a) = s.declared_azimuth {
                let _ = writeln!(x, "        <Azimuth>{a}</Azimuth>");
            }
            if let Some(t) = s.declared_tilt {
                let _ = writeln!(x, "        <Tilt>{t}</Tilt>");
            }
            let _ = writeln!(x, "      </RectangularGeometry>");
        }
        let _ = writeln!(x, "      <PlanarGeometry>\n        <PolyLoop>");
        for v in &s.vertices {
            let _ = writeln!(
                x,
                "          <CartesianPoint><Coordinate>{}</Coordinate><Coordinate>{}</Coordinate><Coordinate>{}</Coordinate></CartesianPoint>",
                v.x, v.y, v.z
            );
        }
        let _ = writeln!(x, "        </PolyLoop>\n      </PlanarGeometry>");
        let _ = writeln!(x, "    </Surface>");
    }
    let _ = writeln!(x, "  </Campus>");

    for c in &model.constructions {
        let _ = writeln!(x, r#"  <Construction id="{}">"#, esc(&c.id));
        if !c.name.is_empty() {
            let _ = writeln!(x, "    <Name>{}</Name>", esc(&c.name));
        }
        if !c.layer_material_ids.is_empty() {
            let _ = writeln!(x, r#"    <LayerId layerIdRef="{}-layers"/>"#, esc(&c.id));
        }
        let _ = writeln!(x, "  </Construction>");
        if !c.layer_material_ids.is_empty() {
            let _ = writeln!(x, r#"  <Layer id="{}-layers">"#, esc(&c.id));
            for m in &c.layer_material_ids {
                let _ = writeln!(x, r#"    <MaterialId materialIdRef="{}"/>"#, esc(m));
            }
            let _ = writeln!(x, "  </Layer>");
        }
    }
    for m in &model.materials {
        let _ = writeln!(x, r#"  <Material id="{}">"#, esc(&m.id));
        if !m.name.is_empty() {
            let _ = writeln!(x, "    <Name>{}</Name>", esc(&m.name));
        }
        if let Some(r) = m.r_value_si {
            let _ = writeln!(x, r#"    <R-value unit="SquareMeterKPerWatt">{r}</R-value>"#);
        }
        if let Some(t) = m.thickness {
            let _ = writeln!(x, r#"    <Thickness unit="Meters">{t}</Thickness>"#);
        }
        if let Some(k) = m.conductivity {
            let _ = writeln!(x, r#"    <Conductivity unit="WPerMeterK">{k}</Conductivity>"#);
        }
        let _ = writeln!(x, "  </Material>");
    }
    for s in &model.schedules {
        let id = esc(&s.id);
        let _ = writeln!(x, r#"  <Schedule id="{id}" type="Fraction">"#);
        if !s.name.is_empty() {
            let _ = writeln!(x, "    <Name>{}</Name>", esc(&s.name));
        }
        if !s.hourly_values.is_empty() {
            let _ = writeln!(
                x,
                r#"    <YearSchedule id="{id}-year"><WeekScheduleId weekScheduleIdRef="{id}-week"/></YearSchedule>"#
            );
        }
        let _ = writeln!(x, "  </Schedule>");
        if s.hourly_values.is_empty() {
            continue;
        }
        let _ = writeln!(x, r#"  <WeekSchedule id="{id}-week">"#);
        for (i, day) in s.hourly_values.keys().enumerate() {
            let _ = writeln!(x, r#"    <Day dayType="{}" dayScheduleIdRef="{id}-day{i}"/>"#, esc(day));
        }
        let _ = writeln!(x, "  </WeekSchedule>");
        for (i, values) in s.hourly_values.values().enumerate() {
            let _ = write!(x, r#"  <DaySchedule id="{id}-day{i}" type="Fraction"><ValueList>"#);
            for v in values {
                let _ = write!(x, "<Value>{v}</Value>");
            }
            let _ = writeln!(x, "</ValueList></DaySchedule>");
        }
    }
    let _ = writeln!(x, "</gbXML>");
    x
}
