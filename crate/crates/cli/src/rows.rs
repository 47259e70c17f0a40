//! Output row schemas. Field order fixes both the CSV header order and the
//! JSON key order.

use serde::Serialize;

#[derive(Serialize)]
pub struct ExactCoeffRow {
    pub k: usize,
    pub c_k: String,
}

#[derive(Serialize)]
pub struct NumericCoeffRow {
    pub k: usize,
    pub c_k: f64,
}

#[derive(Serialize)]
pub struct IterateRow {
    pub t: f64,
    pub x: f64,
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct ErrorRow {
    pub t: f64,
    pub x: f64,
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct LeadingRow {
    pub t: f64,
    pub x: f64,
    pub r_exact: Option<f64>,
    pub r_leading: Option<f64>,
    pub delta_r: Option<f64>,
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct SchroederRow {
    pub term: String,
    pub exact: String,
    pub approx: f64,
}

#[derive(Serialize)]
pub struct RadiusRow {
    pub k: usize,
    pub estimate: Option<f64>,
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct ExtremaRow {
    pub t: f64,
    pub computed: f64,
    pub reference: f64,
    pub rel_discrepancy: f64,
}
