use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "quadrature")]
    Quadrature,
    #[serde(rename = "montecarlo")]
    MonteCarlo,
    #[serde(rename = "closed_form")]
    ClosedForm,
}

/// One grid point. Failed rows keep `None` in the numeric columns and the
/// reason in `status`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub u: f64,
    pub log_sf_exact: Option<f64>,
    pub log_h: Option<f64>,
    pub ratio: Option<f64>,
    pub method: Method,
    pub status: String,
}

impl RatioRow {
    pub fn ok(u: f64, log_sf_exact: f64, log_h: f64, method: Method) -> Self {
        RatioRow {
            u,
            log_sf_exact: Some(log_sf_exact),
            log_h: Some(log_h),
            ratio: Some((log_sf_exact - log_h).exp()),
            method,
            status: "ok".into(),
        }
    }

    pub fn failed(u: f64, log_sf_exact: Option<f64>, log_h: Option<f64>, method: Method, err: &Error) -> Self {
        RatioRow { u, log_sf_exact, log_h, ratio: None, method, status: format!("failed: {err}") }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
}

impl RatioTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Ratios of the successful rows, in grid order.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio).collect()
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(RatioRow::is_ok)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Domain(format!("CSV write failed: {e}"));
        for r in &self.rows {
            out.serialize(r).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Domain(format!("CSV write failed: {e}")))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_columns_and_failed_rows() {
        let t = RatioTable {
            rows: vec![
                RatioRow::ok(4.0, -17.0, -17.5, Method::Quadrature),
                RatioRow::failed(6.0, None, Some(-38.0), Method::Quadrature, &Error::Domain("x".into())),
            ],
        };
        let s = t.to_csv_string();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "u,log_sf_exact,log_h,ratio,method,status");
        assert!(lines.next().unwrap().starts_with("4.0,-17.0,-17.5,1.648"));
        assert_eq!(lines.next().unwrap(), "6.0,,-38.0,,quadrature,failed: domain error: x");
        assert!(!t.all_ok());
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<RatioTable>(&json).unwrap(), t);
    }
}
