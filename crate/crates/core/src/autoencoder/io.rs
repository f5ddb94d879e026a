//! Plain-text model files.
//!
//! ```text
//! SAE1
//! input_dim = d
//! hidden_dim = h
//! decoder = linear|logsig
//! W_enc
//! <h rows of d values>
//! b_enc
//! <one row of h values>
//! W_dec
//! <d rows of h values>
//! b_dec
//! <one row of d values>
//! ```
//!
//! Values are space-separated with 17 significant digits.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{Activation, AutoencoderModel};
use crate::error::{Error, Result};
use crate::format::{format_sample, parse_key_value};

pub const MODEL_MAGIC: &str = "SAE1";

fn push_rows<'a>(out: &mut String, rows: impl Iterator<Item = ndarray::ArrayView1<'a, f64>>) {
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format_sample(*v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

pub fn model_to_text(model: &AutoencoderModel) -> String {
    let mut out = format!(
        "{MODEL_MAGIC}\ninput_dim = {}\nhidden_dim = {}\ndecoder = {}\n",
        model.input_dim(),
        model.hidden_dim(),
        model.decoder
    );
    out.push_str("W_enc\n");
    push_rows(&mut out, model.w_enc.rows().into_iter());
    out.push_str("b_enc\n");
    push_rows(&mut out, std::iter::once(model.b_enc.view()));
    out.push_str("W_dec\n");
    push_rows(&mut out, model.w_dec.rows().into_iter());
    out.push_str("b_dec\n");
    push_rows(&mut out, std::iter::once(model.b_dec.view()));
    out
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    fn next_line(&mut self, what: &str) -> std::result::Result<(usize, &'a str), String> {
        self.lines
            .next()
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or_else(|| format!("unexpected end of file while reading {what}"))
    }

    fn header(&mut self, key: &str) -> std::result::Result<&'a str, String> {
        let (n, line) = self.next_line(key)?;
        match parse_key_value(line) {
            Some((k, v)) if k == key => Ok(v),
            _ => Err(format!("line {n}: expected `{key} = ...`")),
        }
    }

    fn section(&mut self, name: &str) -> std::result::Result<(), String> {
        let (n, line) = self.next_line(name)?;
        if line != name {
            return Err(format!("line {n}: expected section `{name}`, found {line:?}"));
        }
        Ok(())
    }

    fn rows(&mut self, name: &str, rows: usize, cols: usize) -> std::result::Result<Vec<f64>, String> {
        let mut values = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (n, line) = self.next_line(name)?;
            let before = values.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| format!("line {n}: invalid number {tok:?}"))?;
                if !v.is_finite() {
                    return Err(format!("line {n}: non-finite value in {name}"));
                }
                values.push(v);
            }
            if values.len() - before != cols {
                return Err(format!(
                    "line {n}: {name} row has {} values, expected {cols}",
                    values.len() - before
                ));
            }
        }
        Ok(values)
    }
}

fn parse_model(text: &str) -> std::result::Result<AutoencoderModel, String> {
    let mut r = Reader {
        lines: text.lines().enumerate(),
    };
    let (_, magic) = r.next_line("magic")?;
    if magic != MODEL_MAGIC {
        return Err(format!("unsupported model format {magic:?}, expected {MODEL_MAGIC}"));
    }
    let d: usize = r
        .header("input_dim")?
        .parse()
        .map_err(|_| "invalid input_dim".to_string())?;
    let h: usize = r
        .header("hidden_dim")?
        .parse()
        .map_err(|_| "invalid hidden_dim".to_string())?;
    let decoder: Activation = r.header("decoder")?.parse().map_err(|e: Error| e.to_string())?;
    if d == 0 || h == 0 {
        return Err("dimensions must be positive".into());
    }

    r.section("W_enc")?;
    let w_enc = r.rows("W_enc", h, d)?;
    r.section("b_enc")?;
    let b_enc = r.rows("b_enc", 1, h)?;
    r.section("W_dec")?;
    let w_dec = r.rows("W_dec", d, h)?;
    r.section("b_dec")?;
    let b_dec = r.rows("b_dec", 1, d)?;
    if let Some((n, extra)) = r.lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(format!("line {}: trailing content {extra:?}", n + 1));
    }

    AutoencoderModel::from_parts(
        Array2::from_shape_vec((h, d), w_enc).map_err(|e| e.to_string())?,
        Array1::from_vec(b_enc),
        Array2::from_shape_vec((d, h), w_dec).map_err(|e| e.to_string())?,
        Array1::from_vec(b_dec),
        decoder,
    )
    .map_err(|e| e.to_string())
}

/// Parses the text produced by [`model_to_text`]. `origin` names the source
/// in error messages.
pub fn model_from_text(text: &str, origin: &Path) -> Result<AutoencoderModel> {
    parse_model(text).map_err(|m| Error::corrupt(origin, m))
}

pub fn save_model(model: &AutoencoderModel, path: &Path) -> Result<()> {
    fs::write(path, model_to_text(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<AutoencoderModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_text(&text, path)
}
