//! Built-in catalogue of nice nilpotent Lie algebras with expected Einstein outcomes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::FamilyAlgebra;
use crate::diagram::NodePermutation;
use crate::einstein::{classify, parameter_solve, Mode, Options};
use crate::error::CatalogError;
use crate::linalg::{parse_rat, Rat};
use crate::record::ResultRecord;

const BUILTIN: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    /// Values at which the structure equations degenerate.
    #[serde(default)]
    pub excluded: Vec<String>,
    #[serde(default)]
    pub samples: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseMode {
    Diagonal,
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Expectation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_s: Option<Vec<String>>,
    /// Keys are `"p,q"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub found: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub mode: CaseMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(default = "zero")]
    pub k: String,
    #[serde(default)]
    pub values: BTreeMap<String, String>,
    /// Parameter left free and solved for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<String>,
    #[serde(default)]
    pub expect: Expectation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn zero() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub structure: String,
    #[serde(default)]
    pub params: Vec<ParamSpec>,
    pub cases: Vec<Case>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CaseReport {
    pub record: ResultRecord,
    /// Mismatches against the expectation; empty when the case agrees.
    pub diffs: Vec<String>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty()
    }
}

pub fn builtin() -> Vec<CatalogEntry> {
    parse(BUILTIN).expect("embedded catalogue is valid")
}

pub fn parse(json: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    Ok(serde_json::from_str(json)?)
}

/// Shell-style match supporting `*` and `?`.
pub fn glob_match(pattern: &str, name: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let s: Vec<char> = name.chars().collect();
    let (mut i, mut j) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while j < s.len() {
        if i < p.len() && (p[i] == '?' || p[i] == s[j]) {
            i += 1;
            j += 1;
        } else if i < p.len() && p[i] == '*' {
            star = Some((i, j));
            i += 1;
        } else if let Some((si, sj)) = star {
            i = si + 1;
            j = sj + 1;
            star = Some((si, sj + 1));
        } else {
            return false;
        }
    }
    p[i..].iter().all(|&c| c == '*')
}

fn rat_of(entry: &str, what: &str, s: &str) -> Result<Rat, CatalogError> {
    parse_rat(s)
        .ok_or_else(|| CatalogError::Entry { entry: entry.into(), msg: format!("{what}: `{s}` is not a rational") })
}

impl CatalogEntry {
    pub fn family(&self) -> Result<FamilyAlgebra, CatalogError> {
        FamilyAlgebra::parse(&self.structure)
            .map_err(|e| CatalogError::Entry { entry: self.name.clone(), msg: e.to_string() })
    }

    fn values(&self, case: &Case) -> Result<BTreeMap<String, Rat>, CatalogError> {
        let mut out = BTreeMap::new();
        for (p, v) in &case.values {
            let r = rat_of(&self.name, p, v)?;
            if let Some(spec) = self.params.iter().find(|s| &s.name == p) {
                for x in &spec.excluded {
                    if rat_of(&self.name, p, x)? == r {
                        return Err(CatalogError::Entry {
                            entry: self.name.clone(),
                            msg: format!("{p} = {v} is excluded"),
                        });
                    }
                }
            }
            out.insert(p.clone(), r);
        }
        Ok(out)
    }

    pub fn run_case(&self, case: &Case, opts: &Options) -> Result<CaseReport, CatalogError> {
        let err = |source| CatalogError::Einstein { entry: self.name.clone(), source };
        let family = self.family()?;
        let values = self.values(case)?;
        let k = rat_of(&self.name, "k", &case.k)?;
        let sigma = match (&case.mode, &case.sigma) {
            (CaseMode::Diagonal, _) => None,
            (CaseMode::Sigma, Some(s)) => Some(
                NodePermutation::parse(s, family.n())
                    .map_err(|e| CatalogError::Entry { entry: self.name.clone(), msg: e.to_string() })?,
            ),
            (CaseMode::Sigma, None) => {
                return Err(CatalogError::Entry {
                    entry: self.name.clone(),
                    msg: "sigma case without a permutation".into(),
                })
            }
        };
        let mut record = match &case.solve {
            Some(p) => {
                let sol = parameter_solve(&family.partial(&values), p, sigma.as_ref(), &k, opts).map_err(err)?;
                ResultRecord::from_param_solution(
                    &self.name,
                    &self.structure,
                    sigma.as_ref().map(|s| s.to_string()),
                    &k,
                    &values,
                    &sol,
                )
            }
            None => {
                let a = family.substitute(&values).map_err(|e| err(e.into()))?;
                let mode = sigma.map_or(Mode::Diagonal, Mode::Sigma);
                let c = classify(&a, mode, &k, opts).map_err(err)?;
                ResultRecord::from_classification(&self.name, &self.structure, &values, &c)
            }
        };
        if let Some(n) = &case.note {
            record.notes.push(n.clone());
        }
        let diffs = compare(&case.expect, &record);
        record.diffs = diffs.clone();
        Ok(CaseReport { record, diffs })
    }
}

fn compare(e: &Expectation, r: &ResultRecord) -> Vec<String> {
    let mut diffs = Vec::new();
    let mut check = |what: &str, want: String, got: String| {
        if want != got {
            diffs.push(format!("{what}: expected {want}, got {got}"));
        }
    };
    if let Some(f) = &e.found {
        check("found", f.to_string(), r.is_found().to_string());
    }
    if let Some(f) = &e.failure {
        check("failure", f.clone(), r.failed_at.clone().unwrap_or_else(|| "none".into()));
    }
    if let Some(h) = &e.half_s {
        check(
            "½S",
            format!("{{{}}}", h.join(",")),
            r.half_s.as_ref().map_or("none".into(), |h| format!("{{{}}}", h.join(","))),
        );
    }
    if let Some(sets) = &e.sets {
        let got: BTreeMap<String, Vec<String>> =
            r.signatures.iter().map(|g| (format!("{},{}", g.p, g.q), g.deltas.clone())).collect();
        if sets != &got {
            let show = |m: &BTreeMap<String, Vec<String>>| {
                m.iter().map(|(k, v)| format!("S({k})={{{}}}", v.join(","))).collect::<Vec<_>>().join(" ")
            };
            check("signature sets", show(sets), show(&got));
        }
    }
    if let Some(v) = &e.values {
        check("values", v.join(","), r.values.join(","));
    }
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glob() {
        assert!(glob_match("7*", "741:6"));
        assert!(glob_match("*:6", "741:6"));
        assert!(glob_match("84?:*", "842:111a"));
        assert!(!glob_match("7*", "8542:15a"));
        assert!(glob_match("*", ""));
        assert!(!glob_match("?", ""));
        assert!(glob_match("a*b*c", "axxbyyc"));
        assert!(!glob_match("a*b*c", "axxbyy"));
    }

    #[test]
    fn builtin_parses() {
        let cat = builtin();
        assert!(cat.len() >= 20);
        for e in &cat {
            e.family().unwrap();
            for c in &e.cases {
                assert_eq!(c.mode == CaseMode::Sigma, c.sigma.is_some(), "{}", e.name);
            }
        }
    }

    #[test]
    fn excluded_value_is_rejected() {
        let e = builtin().into_iter().find(|e| e.name == "741:6").unwrap();
        let mut case = e.cases[0].clone();
        case.values.insert("lambda".into(), "1".into());
        assert!(matches!(e.run_case(&case, &Options::default()), Err(CatalogError::Entry { .. })));
    }

    #[test]
    fn small_entry_matches() {
        let e = builtin().into_iter().find(|e| e.name == "631:6").unwrap();
        for c in &e.cases {
            let r = e.run_case(c, &Options::default()).unwrap();
            assert!(r.passed(), "{:?}", r.diffs);
        }
    }
}
