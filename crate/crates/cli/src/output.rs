//! CSV and JSON rendering. Values are printed as computed by the library;
//! CSV rounds to 9 significant digits.

use serde::Serialize;
use uqdecomp::{CurvePoint64, EntropyBounds64, UncertaintyTriple64, Unit};

pub const RECORD_HEADER: &str = "name,total,aleatoric,epistemic,alea_lower,alea_upper,error_bound";
pub const CURVE_HEADER: &str = "n,total,aleatoric,epistemic,total_minus_epistemic";

#[derive(Debug, Serialize)]
pub struct Record {
    pub name: String,
    pub total: f64,
    pub aleatoric: f64,
    pub epistemic: f64,
    pub alea_lower: f64,
    pub alea_upper: f64,
    pub error_bound: f64,
    pub unit: Unit,
    pub normalized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl Record {
    pub fn new(name: impl Into<String>, t: &UncertaintyTriple64, b: &EntropyBounds64) -> Self {
        Self {
            name: name.into(),
            total: t.total,
            aleatoric: t.aleatoric,
            epistemic: t.epistemic,
            alea_lower: b.lower,
            alea_upper: b.upper,
            error_bound: t.error_bound,
            unit: t.unit,
            normalized: t.normalized,
            members: None,
            k: None,
        }
    }

    fn csv_row(&self) -> String {
        [
            self.name.clone(),
            sig9(self.total),
            sig9(self.aleatoric),
            sig9(self.epistemic),
            sig9(self.alea_lower),
            sig9(self.alea_upper),
            sig9(self.error_bound),
        ]
        .join(",")
    }
}

#[derive(Debug, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub total: f64,
    pub aleatoric: f64,
    pub epistemic: f64,
    pub total_minus_epistemic: f64,
    pub alea_lower: f64,
    pub alea_upper: f64,
    pub replications: usize,
}

impl From<&CurvePoint64> for CurveRow {
    fn from(p: &CurvePoint64) -> Self {
        Self {
            n: p.n,
            total: p.triple.total,
            aleatoric: p.triple.aleatoric,
            epistemic: p.triple.epistemic,
            total_minus_epistemic: p.total_minus_epistemic(),
            alea_lower: p.bounds.lower,
            alea_upper: p.bounds.upper,
            replications: p.replications,
        }
    }
}

pub fn records_csv(records: &[Record]) -> String {
    let mut out = String::from(RECORD_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.n.to_string(),
            sig9(r.total),
            sig9(r.aleatoric),
            sig9(r.epistemic),
            sig9(r.total_minus_epistemic),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

/// Formats with 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Exponent after rounding, so 0.9999999999 counts as magnitude 0.
    let sci = format!("{x:.8e}");
    let magnitude: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..9).contains(&magnitude) {
        let decimals = (8 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}
