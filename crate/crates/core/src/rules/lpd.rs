//! Lighting power density tables for the building area method.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RulesError;

const BUILTIN_TABLES: &[&str] = &[include_str!("../../data/lpd_ashrae_90_1_2022_building_area.json")];

fn valid_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

macro_rules! identifier_newtype {
    ($(#[$meta:meta])* $name:ident, $err:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Result<Self, RulesError> {
                let id = id.into();
                if valid_identifier(&id) {
                    Ok(Self(id))
                } else {
                    Err(RulesError::$err(id))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = RulesError;
            fn try_from(s: String) -> Result<Self, Self::Error> {
                Self::new(s)
            }
        }

        impl From<$name> for String {
            fn from(v: $name) -> String {
                v.0
            }
        }

        impl std::str::FromStr for $name {
            type Err = RulesError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s.trim())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

identifier_newtype!(
    /// Energy code edition identifier, e.g. `ashrae_90_1_2022`.
    CodeVersion,
    UnknownCodeVersion
);
identifier_newtype!(
    /// Building use type identifier, e.g. `bank_financial_institution`.
    BuildingUseType,
    UnknownUseType
);

impl CodeVersion {
    pub fn ashrae_90_1_2022() -> Self {
        Self("ashrae_90_1_2022".into())
    }
}

impl BuildingUseType {
    pub fn bank_financial_institution() -> Self {
        Self("bank_financial_institution".into())
    }

    pub fn office() -> Self {
        Self("office".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightingMethod {
    BuildingArea,
    /// Declared so tables can be tagged; no rule content is evaluated for it.
    SpaceBySpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpdEntry {
    pub use_type: BuildingUseType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display_name: Option<String>,
    pub lpd_w_per_ft2: f64,
    /// Marks values that are not verified against the published table.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub placeholder: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LpdTableFile {
    code_version: CodeVersion,
    method: LightingMethod,
    source_label: String,
    entries: Vec<LpdEntry>,
}

/// A read-only LPD table for one code version and method. Values are in W/ft²,
/// stored at three-decimal precision.
#[derive(Debug, Clone, PartialEq)]
pub struct LpdTable {
    code_version: CodeVersion,
    method: LightingMethod,
    source_label: String,
    entries: BTreeMap<BuildingUseType, LpdEntry>,
}

impl LpdTable {
    pub fn from_json(text: &str) -> Result<Self, RulesError> {
        let file: LpdTableFile =
            serde_json::from_str(text).map_err(|e| RulesError::InvalidTable(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for mut entry in file.entries {
            if !(entry.lpd_w_per_ft2.is_finite() && entry.lpd_w_per_ft2 > 0.0) {
                return Err(RulesError::InvalidTable(format!(
                    "LPD for {} must be positive, got {}",
                    entry.use_type, entry.lpd_w_per_ft2
                )));
            }
            entry.lpd_w_per_ft2 = (entry.lpd_w_per_ft2 * 1000.0).round() / 1000.0;
            let key = entry.use_type.clone();
            if entries.insert(key.clone(), entry).is_some() {
                return Err(RulesError::InvalidTable(format!("duplicate use type {key}")));
            }
        }
        Ok(Self {
            code_version: file.code_version,
            method: file.method,
            source_label: file.source_label,
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self, RulesError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RulesError::InvalidTable(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let file = LpdTableFile {
            code_version: self.code_version.clone(),
            method: self.method,
            source_label: self.source_label.clone(),
            entries: self.entries.values().cloned().collect(),
        };
        serde_json::to_string_pretty(&file).expect("table serializes")
    }

    pub fn code_version(&self) -> &CodeVersion {
        &self.code_version
    }

    pub fn method(&self) -> LightingMethod {
        self.method
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn entry(&self, use_type: &BuildingUseType) -> Option<&LpdEntry> {
        self.entries.get(use_type)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LpdEntry> {
        self.entries.values()
    }
}

/// All loaded LPD tables, keyed by code version.
#[derive(Debug, Clone, Default)]
pub struct LpdCatalog {
    tables: BTreeMap<CodeVersion, LpdTable>,
}

impl LpdCatalog {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Catalog holding the tables shipped with the crate.
    pub fn builtin() -> Self {
        let mut catalog = Self::empty();
        for text in BUILTIN_TABLES {
            let table = LpdTable::from_json(text).expect("built-in LPD table is valid");
            catalog.insert(table);
        }
        catalog
    }

    /// Adds or replaces the table for its code version.
    pub fn insert(&mut self, table: LpdTable) -> Option<LpdTable> {
        self.tables.insert(table.code_version.clone(), table)
    }

    pub fn table(&self, code_version: &CodeVersion) -> Result<&LpdTable, RulesError> {
        self.tables
            .get(code_version)
            .ok_or_else(|| RulesError::UnknownCodeVersion(code_version.to_string()))
    }

    pub fn code_versions(&self) -> impl Iterator<Item = &CodeVersion> {
        self.tables.keys()
    }

    pub fn entry(
        &self,
        use_type: &BuildingUseType,
        code_version: &CodeVersion,
    ) -> Result<(&LpdTable, &LpdEntry), RulesError> {
        let table = self.table(code_version)?;
        let entry = table
            .entry(use_type)
            .ok_or_else(|| RulesError::UnknownUseType(use_type.to_string()))?;
        Ok((table, entry))
    }

    /// Lighting power density in W/ft² for a use type under a code version.
    pub fn lpd_lookup(
        &self,
        use_type: &BuildingUseType,
        code_version: &CodeVersion,
    ) -> Result<f64, RulesError> {
        self.entry(use_type, code_version).map(|(_, e)| e.lpd_w_per_ft2)
    }
}
