//! Long-format CSV tables.
//!
//! Columns: `alpha,chi,pe,m,n,t,x1[,x2],value,estimator`. Absent values are
//! empty fields. Numbers carry ten significant digits.

use std::io::{self, Write};

/// Ten significant digits, positional for moderate magnitudes.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..10).contains(&mag) {
        format!("{:.*}", (9 - mag).max(0) as usize, v)
    } else {
        format!("{v:.9e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub alpha: Option<f64>,
    pub chi: Option<f64>,
    pub pe: Option<f64>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub t: Option<f64>,
    pub x: Vec<Option<f64>>,
    pub value: Option<f64>,
    pub estimator: String,
}

/// Writes the header and rows for `dims` coordinate columns.
pub fn write_csv<W: Write>(mut w: W, dims: usize, rows: &[Row]) -> io::Result<()> {
    let xs: Vec<String> = (1..=dims).map(|k| format!("x{k}")).collect();
    writeln!(w, "alpha,chi,pe,m,n,t,{},value,estimator", xs.join(","))?;
    for r in rows {
        let mut fields = vec![
            fmt_opt(r.alpha),
            fmt_opt(r.chi),
            fmt_opt(r.pe),
            r.m.map(|v| v.to_string()).unwrap_or_default(),
            r.n.map(|v| v.to_string()).unwrap_or_default(),
            fmt_opt(r.t),
        ];
        for k in 0..dims {
            fields.push(fmt_opt(r.x.get(k).copied().flatten()));
        }
        fields.push(fmt_opt(r.value));
        fields.push(r.estimator.clone());
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}
