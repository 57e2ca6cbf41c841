use serde::{Deserialize, Serialize};

use super::lpd::{BuildingUseType, CodeVersion, LpdCatalog};
use super::units::{Area, AreaUnit};
use super::RulesError;

/// Interior lighting power allowance in whole watts (building area method).
///
/// The product of floor area in ft² and the table LPD is rounded half away
/// from zero.
pub fn lighting_allowed_wattage(
    catalog: &LpdCatalog,
    area: Area,
    use_type: &BuildingUseType,
    code_version: &CodeVersion,
) -> Result<i64, RulesError> {
    let ft2 = area.to(AreaUnit::SquareFeet)?.value;
    let lpd = catalog.lpd_lookup(use_type, code_version)?;
    Ok((ft2 * lpd).round() as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceInput {
    pub floor_area: Area,
    pub use_type: BuildingUseType,
    pub code_version: CodeVersion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designed_wattage: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplianceStatus {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Citation {
    pub source_label: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceResult {
    pub allowance_w: i64,
    pub designed_w: Option<f64>,
    pub status: ComplianceStatus,
    pub deficiencies: Vec<String>,
    pub citations: Vec<Citation>,
}

impl ComplianceResult {
    /// One-paragraph human summary for terminals and chat replies.
    pub fn summary(&self) -> String {
        let head = match (self.status, self.designed_w) {
            (ComplianceStatus::Pass, Some(d)) => format!(
                "PASS: designed interior lighting power {} W is within the {} W allowance.",
                fmt_watts(d),
                self.allowance_w
            ),
            (ComplianceStatus::Fail, Some(d)) => format!(
                "FAIL: designed interior lighting power {} W exceeds the {} W allowance.",
                fmt_watts(d),
                self.allowance_w
            ),
            _ => format!(
                "UNKNOWN: allowance is {} W but no designed lighting power was provided.",
                self.allowance_w
            ),
        };
        let mut out = head;
        for d in &self.deficiencies {
            out.push_str("\n  - ");
            out.push_str(d);
        }
        for c in &self.citations {
            out.push_str(&format!("\n  [{}] {}", c.source_label, c.detail));
        }
        out
    }
}

fn fmt_watts(w: f64) -> String {
    if w.fract() == 0.0 && w.abs() < 1e15 {
        format!("{}", w as i64)
    } else {
        format!("{w}")
    }
}

/// Evaluates designed interior lighting power against the building area
/// method allowance.
pub fn check_interior_lighting(
    catalog: &LpdCatalog,
    input: &ComplianceInput,
) -> Result<ComplianceResult, RulesError> {
    if let Some(d) = input.designed_wattage {
        if !(d.is_finite() && d >= 0.0) {
            return Err(RulesError::InvalidInput(format!(
                "designed wattage must be a non-negative number, got {d}"
            )));
        }
    }
    let allowance_w =
        lighting_allowed_wattage(catalog, input.floor_area, &input.use_type, &input.code_version)?;
    let (table, entry) = catalog.entry(&input.use_type, &input.code_version)?;

    let mut deficiencies = Vec::new();
    let status = match input.designed_wattage {
        None => {
            deficiencies.push(
                "missing information: designed interior lighting power (W) was not provided"
                    .to_string(),
            );
            ComplianceStatus::Unknown
        }
        Some(d) if d <= allowance_w as f64 => ComplianceStatus::Pass,
        Some(d) => {
            deficiencies.push(format!(
                "designed interior lighting power exceeds the allowance by {} W ({} W designed, {} W allowed)",
                fmt_watts(d - allowance_w as f64),
                fmt_watts(d),
                allowance_w
            ));
            ComplianceStatus::Fail
        }
    };
    if entry.placeholder {
        deficiencies.push(format!(
            "LPD for {} is a placeholder value, not verified against {}",
            entry.use_type,
            table.source_label()
        ));
    }

    let name = entry.display_name.as_deref().unwrap_or(entry.use_type.as_str());
    let citations = vec![Citation {
        source_label: table.source_label().to_string(),
        detail: format!(
            "{name}: {:.3} W/ft² (building area method) × {:.3} ft²",
            entry.lpd_w_per_ft2,
            input.floor_area.to(AreaUnit::SquareFeet)?.value
        ),
    }];

    Ok(ComplianceResult {
        allowance_w,
        designed_w: input.designed_wattage,
        status,
        deficiencies,
        citations,
    })
}
