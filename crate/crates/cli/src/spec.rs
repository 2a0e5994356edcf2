//! The family input document.

use crate::error::{CliError, CliResult};
use famzeta_core::cohomology::CurveFamily;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// `Y² = Σ c X^i Γ^j` over `F_q = F_p[x]/chi`.
///
/// ```json
/// { "p": 5, "a": 1, "chi": [0, 1],
///   "Q": [[3, 0, [1]], [2, 1, [4]], [1, 1, [1]], [1, 0, [4]]] }
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub p: u64,
    pub a: usize,
    /// `χ̄_0..χ̄_a`, monic.
    pub chi: Vec<u64>,
    /// `(i, j, c)`: `c X^i Γ^j`, `c` given by its coordinates over `F_p`.
    #[serde(rename = "Q")]
    pub q: Vec<(usize, usize, Vec<u64>)>,
    #[serde(default)]
    pub variant_basis: bool,
    #[serde(default)]
    pub heuristic_m: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enum_cap: Option<u64>,
}

impl FamilySpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::BadFamily(format!("family spec: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }

    /// Validates field by field, then builds the family.
    pub fn to_family(&self) -> CliResult<CurveFamily> {
        let bad = |m: String| CliError::BadFamily(m);
        if self.chi.len() != self.a + 1 {
            return Err(bad(format!(
                "field `chi`: expected a + 1 = {} coefficients, found {}",
                self.a + 1,
                self.chi.len()
            )));
        }
        if self.chi.last().map(|c| c % self.p.max(1)) != Some(1) {
            return Err(bad("field `chi`: polynomial must be monic".into()));
        }
        if self.q.is_empty() {
            return Err(bad("field `Q`: no terms".into()));
        }
        for (k, (_, _, c)) in self.q.iter().enumerate() {
            if c.len() > self.a {
                return Err(bad(format!(
                    "field `Q[{k}]`: coefficient has {} coordinates, expected at most a = {}",
                    c.len(),
                    self.a
                )));
            }
        }
        CurveFamily::new(self.p, &self.chi, &self.q).map_err(|e| bad(e.to_string()))
    }

    pub fn from_family(family: &CurveFamily) -> Self {
        FamilySpec {
            p: family.p(),
            a: family.a(),
            chi: family.chibar().to_vec(),
            q: family.terms(),
            variant_basis: false,
            heuristic_m: false,
            enum_cap: None,
        }
    }
}
