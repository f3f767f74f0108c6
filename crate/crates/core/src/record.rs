pub mod rat_vec_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::rat::{fmt_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(fmt_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|x| parse_rat(x).ok_or_else(|| serde::de::Error::custom(format!("bad rational {x:?}"))))
            .collect()
    }
}

pub mod rat_mat_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::rat::{fmt_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(v: &[Vec<Rat>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rat>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|r| {
                r.iter()
                    .map(|x| parse_rat(x).ok_or_else(|| serde::de::Error::custom(format!("bad rational {x:?}"))))
                    .collect()
            })
            .collect()
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::einstein::{Classification, Condition, Outcome, ParamSolution, SignVec};
use crate::linalg::rat::{fmt_rat, Rat};

/// Version of the JSON layout produced by [`RecordSet`].
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 8] = ["name", "mode", "k", "outcome", "half_S", "sigma", "p", "q"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureGroup {
    pub p: usize,
    pub q: usize,
    pub deltas: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub x: Vec<String>,
    pub orthant: String,
    pub metric: Vec<String>,
    pub signature: (usize, usize),
    pub deltas: Vec<String>,
    pub family: Vec<String>,
    pub exact: bool,
    pub residual: f64,
}

/// Outcome of one run, flattened for output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub name: String,
    pub structure: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<String>,
    pub k: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub params: BTreeMap<String, String>,
    /// `found`, or `failed` with `failed_at` set.
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failed_at: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub numeric: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub half_s: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub s: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub signatures: Vec<SignatureGroup>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub certificates: Vec<CertificateRecord>,
    /// Parameter being solved for, with the values found.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solve: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub values: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sign_blocked: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    /// Mismatches against a catalogue expectation.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub diffs: Vec<String>,
}

fn strings(v: &[SignVec]) -> Vec<String> {
    v.iter().map(|d| d.to_string()).collect()
}

impl ResultRecord {
    fn blank(
        name: &str,
        structure: &str,
        mode: &str,
        sigma: Option<String>,
        k: &Rat,
        params: &BTreeMap<String, Rat>,
    ) -> Self {
        Self {
            name: name.to_string(),
            structure: structure.to_string(),
            mode: mode.to_string(),
            sigma,
            k: fmt_rat(k),
            params: params.iter().map(|(p, v)| (p.clone(), fmt_rat(v))).collect(),
            outcome: String::new(),
            failed_at: None,
            numeric: false,
            detail: None,
            half_s: None,
            s: Vec::new(),
            signatures: Vec::new(),
            certificates: Vec::new(),
            solve: None,
            values: Vec::new(),
            sign_blocked: Vec::new(),
            timing_ms: None,
            notes: Vec::new(),
            diffs: Vec::new(),
        }
    }

    pub fn from_classification(
        name: &str,
        structure: &str,
        params: &BTreeMap<String, Rat>,
        c: &Classification,
    ) -> Self {
        let mode = if c.mode.sigma().is_some() { "sigma" } else { "diagonal" };
        let mut r = Self::blank(name, structure, mode, c.mode.sigma().map(|s| s.to_string()), &c.k, params);
        r.notes = c.notes.clone();
        match &c.outcome {
            Outcome::Found { certificates, report } => {
                r.outcome = "found".into();
                r.half_s = report.half.as_deref().map(strings);
                r.s = strings(&report.full);
                r.signatures = report
                    .by_signature()
                    .into_iter()
                    .map(|((p, q), deltas)| SignatureGroup { p, q, deltas: strings(&deltas) })
                    .collect();
                r.certificates = certificates
                    .iter()
                    .map(|cert| CertificateRecord {
                        x: cert.x.to_strings(),
                        orthant: cert.orthant.to_string(),
                        metric: cert.metric.g().to_strings(),
                        signature: cert.metric.signature().unwrap_or((0, 0)),
                        deltas: strings(&cert.deltas),
                        family: cert.family.relations(),
                        exact: cert.exact,
                        residual: cert.residual,
                    })
                    .collect();
            }
            Outcome::Failed { condition, detail, numeric } => {
                r.outcome = "failed".into();
                r.failed_at = Some(condition.to_string());
                r.numeric = *numeric;
                r.detail = Some(detail.clone());
            }
        }
        r
    }

    pub fn from_param_solution(
        name: &str,
        structure: &str,
        sigma: Option<String>,
        k: &Rat,
        fixed: &BTreeMap<String, Rat>,
        sol: &ParamSolution,
    ) -> Self {
        let mode = if sigma.is_some() { "sigma" } else { "diagonal" };
        let mut r = Self::blank(name, structure, mode, sigma, k, fixed);
        r.solve = Some(sol.param.clone());
        r.values = sol.values.iter().map(|v| v.to_string()).collect();
        r.sign_blocked = sol.sign_blocked.iter().map(|v| v.to_string()).collect();
        r.notes = sol.notes.clone();
        match sol.failure {
            None => r.outcome = "found".into(),
            Some(c) => {
                r.outcome = "failed".into();
                r.failed_at = Some(c.to_string());
                r.numeric = c == Condition::P
                    && sol
                        .sign_blocked
                        .iter()
                        .chain(&sol.values)
                        .any(|v| matches!(v, crate::einstein::ParamValue::Approx(_)));
            }
        }
        r
    }

    pub fn is_found(&self) -> bool {
        self.outcome == "found"
    }

    /// `found`, `failed:L`, or `failed:P(numeric)`.
    pub fn outcome_label(&self) -> String {
        match &self.failed_at {
            None => self.outcome.clone(),
            Some(c) if self.numeric => format!("failed:{c}(numeric)"),
            Some(c) => format!("failed:{c}"),
        }
    }

    fn header(&self) -> String {
        let mut h = self.name.clone();
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = write!(h, " [{}]", p.join(", "));
        }
        let _ = write!(h, "  {}", self.mode);
        if let Some(s) = &self.sigma {
            h.push_str(s);
        }
        let _ = write!(h, "  k={}", self.k);
        if let Some(p) = &self.solve {
            let _ = write!(h, "  solve {p}");
        }
        h
    }

    /// Multi-line human-readable form.
    pub fn to_text(&self) -> String {
        let mut out = self.header();
        let _ = write!(out, "\n  outcome: {}", self.outcome_label());
        if let Some(d) = &self.detail {
            let _ = write!(out, " ({d})");
        }
        if self.solve.is_some() {
            if !self.values.is_empty() {
                let _ = write!(out, "\n  values: {}", self.values.join(", "));
            }
            if !self.sign_blocked.is_empty() {
                let _ = write!(out, "\n  (P) holds but (L) fails at: {}", self.sign_blocked.join(", "));
            }
        }
        if let Some(h) = &self.half_s {
            let _ = write!(out, "\n  ½S = {{{}}}", h.join(", "));
        } else if !self.s.is_empty() {
            let _ = write!(out, "\n  S = {{{}}}", self.s.join(", "));
        }
        if self.sigma.is_some() {
            for g in &self.signatures {
                let _ = write!(out, "\n  S({},{}) = {{{}}}", g.p, g.q, g.deltas.join(", "));
            }
        }
        if let Some(c) = self.certificates.first() {
            let _ = write!(out, "\n  X = ({})", c.x.join(", "));
            let _ = write!(out, "\n  g = ({})  signature {:?}", c.metric.join(", "), c.signature);
            if !c.family.is_empty() {
                let _ = write!(out, "\n  family: {}", c.family.join(", "));
            }
            let _ = write!(
                out,
                "\n  oracle residual: {}",
                if c.exact { "0 (exact)".to_string() } else { format!("{:.3e}", c.residual) }
            );
        }
        if let Some(t) = self.timing_ms {
            let _ = write!(out, "\n  time: {t:.1} ms");
        }
        for n in &self.notes {
            let _ = write!(out, "\n  note: {n}");
        }
        for d in &self.diffs {
            let _ = write!(out, "\n  MISMATCH {d}");
        }
        out
    }

    /// Rows under [`CSV_HEADER`]: one per signature class `(p, q)` carrying the members of ½S
    /// (or of S when it is not closed under complement) in that class.
    pub fn csv_rows(&self) -> Vec<[String; 8]> {
        let row = |half: String, p: String, q: String| {
            [
                self.name.clone(),
                self.mode.clone(),
                self.k.clone(),
                self.outcome_label(),
                half,
                self.sigma.clone().unwrap_or_default(),
                p,
                q,
            ]
        };
        if self.solve.is_some() {
            return vec![row(self.values.join(" "), String::new(), String::new())];
        }
        let keep = self.half_s.as_ref().unwrap_or(&self.s);
        let rows: Vec<[String; 8]> = self
            .signatures
            .iter()
            .filter_map(|g| {
                let members: Vec<&str> = g.deltas.iter().filter(|d| keep.contains(d)).map(String::as_str).collect();
                (!members.is_empty()).then(|| row(members.join(" "), g.p.to_string(), g.q.to_string()))
            })
            .collect();
        if rows.is_empty() {
            vec![row(String::new(), String::new(), String::new())]
        } else {
            rows
        }
    }
}

/// Versioned wrapper used for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSet {
    pub schema_version: u32,
    pub records: Vec<ResultRecord>,
}

impl RecordSet {
    pub fn new(records: Vec<ResultRecord>) -> Self {
        Self { schema_version: SCHEMA_VERSION, records }
    }
}

pub fn write_csv<W: std::io::Write>(records: &[ResultRecord], w: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        for row in r.csv_rows() {
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}
