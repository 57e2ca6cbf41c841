//! Built-in tool registrations shared by the agent, the MCP server and the
//! chat service.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::agent::{FieldKind, FieldSpec, ToolArgs, ToolFault, ToolOutput, ToolRegistry, ToolSpec};
use crate::comcheck::{AllowanceRequest, ComcheckClient};
use crate::gbxml::{self, BuildingModel, GbxmlError};
use crate::retrieval::{self, ProvisionIndex, DEFAULT_K};
use crate::rules::{check_interior_lighting, Area, AreaUnit, BuildingUseType, CodeVersion, ComplianceInput, RulesError};

pub const LIGHTING_ALLOWED_WATTAGE: &str = "LightingAllowedWattage";
pub const CHECK_INTERIOR_LIGHTING: &str = "CheckInteriorLighting";

/// What the registry is built over. Model and index tools are registered only
/// when the corresponding input is loaded.
#[derive(Clone)]
pub struct ToolEnvironment {
    pub comcheck: Arc<ComcheckClient>,
    pub model: Option<Arc<BuildingModel>>,
    pub index: Option<Arc<ProvisionIndex>>,
}

impl ToolEnvironment {
    pub fn new(comcheck: Arc<ComcheckClient>) -> Self {
        Self { comcheck, model: None, index: None }
    }

    pub fn with_model(mut self, model: BuildingModel) -> Self {
        self.model = Some(Arc::new(model));
        self
    }

    pub fn with_index(mut self, index: ProvisionIndex) -> Self {
        self.index = Some(Arc::new(index));
        self
    }
}

pub fn build_registry(env: &ToolEnvironment) -> ToolRegistry {
    let mut r = ToolRegistry::new();
    let mut add = |spec| r.register(spec).expect("built-in tool names are unique");
    add(lighting_allowed_wattage_tool(env.comcheck.clone()));
    add(check_interior_lighting_tool(env.comcheck.clone()));
    if let Some(model) = &env.model {
        for spec in model_tools(model.clone()) {
            add(spec);
        }
    }
    if let Some(index) = &env.index {
        add(retrieve_provisions_tool(index.clone()));
    }
    r
}

fn rules_fault(e: RulesError) -> ToolFault {
    ToolFault::new(e.kind(), e.to_string())
}

fn gbxml_fault(e: GbxmlError) -> ToolFault {
    ToolFault::new(e.kind(), e.to_string())
}

fn str_arg<'a>(args: &'a ToolArgs, name: &str) -> &'a str {
    args.get(name).and_then(Value::as_str).unwrap_or_default()
}

fn area_fields() -> Vec<FieldSpec> {
    vec![
        FieldSpec::required("area", FieldKind::Number, "Gross floor area."),
        FieldSpec::required("area_unit", FieldKind::String, "Unit of area: m2 or ft2."),
        FieldSpec::required("use_type", FieldKind::String, "Building area type, e.g. bank_financial_institution."),
        FieldSpec::required("code_version", FieldKind::String, "Energy code edition, e.g. ashrae_90_1_2022."),
    ]
}

struct AreaQuery {
    area: Area,
    use_type: BuildingUseType,
    code_version: CodeVersion,
}

fn area_query(args: &ToolArgs) -> Result<AreaQuery, ToolFault> {
    let value = args.get("area").and_then(Value::as_f64).unwrap_or(f64::NAN);
    let unit: AreaUnit = str_arg(args, "area_unit").parse().map_err(rules_fault)?;
    Ok(AreaQuery {
        area: Area::new(value, unit),
        use_type: BuildingUseType::new(str_arg(args, "use_type")).map_err(rules_fault)?,
        code_version: CodeVersion::new(str_arg(args, "code_version")).map_err(rules_fault)?,
    })
}

fn lighting_allowed_wattage_tool(client: Arc<ComcheckClient>) -> ToolSpec {
    ToolSpec::new(
        LIGHTING_ALLOWED_WATTAGE,
        "Interior lighting power allowance in watts by the building area method.",
        area_fields(),
        move |args| {
            let q = area_query(args)?;
            let ft2 = q.area.to(AreaUnit::SquareFeet).map_err(rules_fault)?.value;
            let request = AllowanceRequest::new(ft2, q.use_type.as_str(), q.code_version.as_str())
                .map_err(|e| ToolFault::new(e.kind(), e.to_string()))?;
            let watts = client
                .allowed_wattage_default(&request)
                .map_err(|e| ToolFault::new(e.kind(), e.to_string()))?;
            Ok(ToolOutput::with_structured(
                watts.to_string(),
                json!({ "allowed_wattage_w": watts, "floor_area_ft2": ft2 }),
            ))
        },
    )
}

fn check_interior_lighting_tool(client: Arc<ComcheckClient>) -> ToolSpec {
    let mut fields = area_fields();
    fields.push(FieldSpec::optional("designed_w", FieldKind::Number, "Designed interior lighting power in watts."));
    ToolSpec::new(
        CHECK_INTERIOR_LIGHTING,
        "Checks designed interior lighting power against the building area method allowance.",
        fields,
        move |args| {
            let q = area_query(args)?;
            let input = ComplianceInput {
                floor_area: q.area,
                use_type: q.use_type,
                code_version: q.code_version,
                designed_wattage: args.get("designed_w").and_then(Value::as_f64),
            };
            let result = check_interior_lighting(client.catalog(), &input).map_err(rules_fault)?;
            Ok(ToolOutput::with_structured(result.summary(), serde_json::to_value(&result).unwrap()))
        },
    )
}

fn surface_tool(
    model: Arc<BuildingModel>,
    name: &str,
    description: &str,
    unit: &'static str,
    query: fn(&BuildingModel, &str) -> Result<f64, GbxmlError>,
) -> ToolSpec {
    ToolSpec::new(
        name,
        description,
        vec![FieldSpec::required("surface_id", FieldKind::String, "gbXML Surface id.")],
        move |args| {
            let id = str_arg(args, "surface_id");
            let v = query(&model, id).map_err(gbxml_fault)?;
            Ok(ToolOutput::with_structured(format!("{v:.3} {unit}"), json!({ "surface_id": id, "value": v, "unit": unit })))
        },
    )
}

fn model_tools(model: Arc<BuildingModel>) -> Vec<ToolSpec> {
    let summary_model = model.clone();
    vec![
        surface_tool(model.clone(), "get_surface_area", "Area of a gbXML surface in square meters.", "m2", gbxml::surface_area),
        surface_tool(
            model.clone(),
            "get_surface_tilt",
            "Tilt of a gbXML surface in degrees (0 roof facing up, 90 wall, 180 floor facing down).",
            "deg",
            gbxml::surface_tilt,
        ),
        surface_tool(
            model.clone(),
            "get_surface_azimuth",
            "Azimuth of a gbXML surface in degrees clockwise from north.",
            "deg",
            gbxml::surface_azimuth,
        ),
        surface_tool(
            model,
            "get_surface_r_value",
            "Layer-sum thermal resistance of a surface's construction in m2K/W, excluding air films.",
            "m2K/W",
            gbxml::surface_r_value,
        ),
        ToolSpec::new("get_model_summary", "Counts and total floor area of the loaded model.", vec![], move |_| {
            let s = gbxml::model_summary(&summary_model);
            let v = serde_json::to_value(&s).unwrap();
            Ok(ToolOutput::with_structured(v.to_string(), v))
        }),
    ]
}

fn retrieve_provisions_tool(index: Arc<ProvisionIndex>) -> ToolSpec {
    ToolSpec::new(
        "retrieve_provisions",
        "Ranks energy-code provisions by relevance to a query.",
        vec![
            FieldSpec::required("query", FieldKind::String, "Search text."),
            FieldSpec::optional("k", FieldKind::Integer, "Number of provisions to return (default 4)."),
        ],
        move |args| {
            let k = args.get("k").and_then(Value::as_i64).map_or(DEFAULT_K as i64, |k| k);
            let k = usize::try_from(k).map_err(|_| ToolFault::new("InvalidK", "k must be positive"))?;
            let results = retrieval::retrieve(&index, str_arg(args, "query"), k)
                .map_err(|e| {
                    let msg = e.to_string();
                    let kind = msg.split(':').next().unwrap_or("RetrievalError").to_string();
                    ToolFault::new(kind, msg)
                })?;
            if results.is_empty() {
                return Ok(ToolOutput::with_structured(retrieval::NO_PROVISIONS_MARKER, json!([])));
            }
            let mut text = String::new();
            for r in &results {
                let p = index.provision(&r.provision_id).expect("result ids come from the index");
                text.push_str(&format!("[{}] {}\n{}\n", p.section_label, p.heading, p.body));
            }
            Ok(ToolOutput::with_structured(text.trim_end().to_string(), serde_json::to_value(&results).unwrap()))
        },
    )
}
