use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::vector::{Block, SpectralVector};
use super::TransformError;
use crate::spectrum::{levels_through, Manifold, ModelOperator};

pub const COEF_FORMAT: &str = "eigencoef-v1";
const COLUMNS: &str = "j\tlambda\tk_index\tlabel\tre\tim\tlog_offset";

/// A coefficient file: operator, coefficients and free-form provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefFile {
    pub vector: SpectralVector,
    pub provenance: BTreeMap<String, String>,
}

/// Header lines `key value`, then a column line, then one TSV record per
/// mode in level order. Floats use 17 significant digits.
pub fn write_coef_file(v: &SpectralVector, provenance: &BTreeMap<String, String>) -> String {
    let v = v.materialize();
    let op = v.op();
    let mut out = String::new();
    let _ = writeln!(out, "format {COEF_FORMAT}");
    let _ = writeln!(out, "manifold {}", op.manifold.name());
    let _ = writeln!(out, "nu {}", op.nu());
    let _ = writeln!(out, "shift {:.16e}", op.shift);
    let _ = writeln!(out, "j_max {}", v.j_max());
    out.push_str("basis_convention v1\n");
    for (k, val) in provenance {
        let _ = writeln!(out, "provenance.{k} {}", val.replace(['\n', '\r'], " "));
    }
    out.push_str(COLUMNS);
    out.push('\n');
    for (lv, b) in v.levels().iter().zip(v.blocks()) {
        for (k, (label, c)) in lv.labels.iter().zip(&b.coeffs).enumerate() {
            let _ = writeln!(
                out,
                "{}\t{:.16e}\t{k}\t{label}\t{:.16e}\t{:.16e}\t{:.16e}",
                lv.j, lv.lambda, c.re, c.im, b.log_offset
            );
        }
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> TransformError {
    TransformError::Parse { line, msg: msg.into() }
}

fn parse_f64(line: usize, s: &str, what: &str) -> Result<f64, TransformError> {
    let v: f64 = s.trim().parse().map_err(|_| perr(line, format!("bad {what} `{s}`")))?;
    if !v.is_finite() {
        return Err(perr(line, format!("{what} must be finite")));
    }
    Ok(v)
}

pub fn parse_coef_file(text: &str) -> Result<CoefFile, TransformError> {
    let mut header: BTreeMap<&str, &str> = BTreeMap::new();
    let mut provenance = BTreeMap::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut saw_columns = false;
    for (n, line) in lines.by_ref() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if line == COLUMNS {
            saw_columns = true;
            break;
        }
        let (key, value) = line.split_once(' ').ok_or_else(|| perr(n, "expected `key value`"))?;
        if let Some(p) = key.strip_prefix("provenance.") {
            provenance.insert(p.to_string(), value.to_string());
        } else if header.insert(key, value).is_some() {
            return Err(perr(n, format!("duplicate header `{key}`")));
        } else if !matches!(key, "format" | "manifold" | "nu" | "shift" | "j_max" | "basis_convention") {
            return Err(perr(n, format!("unknown header `{key}`")));
        }
    }
    let end = text.lines().count().max(1);
    if !saw_columns {
        return Err(perr(end, "missing column line"));
    }
    let get = |k: &str| header.get(k).copied().ok_or_else(|| perr(end, format!("missing header `{k}`")));
    if get("format")? != COEF_FORMAT {
        return Err(perr(1, format!("unsupported format `{}`", get("format")?)));
    }
    if get("basis_convention")? != "v1" {
        return Err(perr(1, "unsupported basis convention"));
    }
    let manifold: Manifold = get("manifold")?.parse().map_err(|_| perr(1, "unknown manifold"))?;
    if get("nu")? != "2" {
        return Err(perr(1, "model operators have nu = 2"));
    }
    let shift = parse_f64(1, get("shift")?, "shift")?;
    let op = ModelOperator::new(manifold, shift).map_err(|e| perr(1, e.to_string()))?;
    let j_max: usize = get("j_max")?.parse().map_err(|_| perr(1, "bad j_max"))?;
    if j_max > 1 << 20 {
        return Err(perr(1, "j_max too large"));
    }
    let levels = levels_through(&op, j_max);
    let mut blocks: Vec<Block> = Vec::with_capacity(levels.len());
    let mut offsets: Vec<Vec<f64>> = Vec::with_capacity(levels.len());
    let mut expect = (0usize, 0usize);
    for (n, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(perr(n, format!("expected 7 tab-separated fields, got {}", f.len())));
        }
        let (j, k) = expect;
        if j > j_max {
            return Err(perr(n, "records beyond j_max"));
        }
        let lv = &levels[j];
        let jj: usize = f[0].parse().map_err(|_| perr(n, "bad j"))?;
        let kk: usize = f[2].parse().map_err(|_| perr(n, "bad k_index"))?;
        if (jj, kk) != (j, k) {
            return Err(perr(n, format!("expected record ({j}, {k}), found ({jj}, {kk})")));
        }
        let lambda = parse_f64(n, f[1], "lambda")?;
        if (lambda - lv.lambda).abs() > 1e-9 * (1.0 + lv.lambda.abs()) {
            return Err(perr(n, format!("lambda {lambda} does not match level value {}", lv.lambda)));
        }
        if f[3] != lv.labels[k].to_string() {
            return Err(perr(n, format!("label `{}` does not match `{}`", f[3], lv.labels[k])));
        }
        let c = Complex64::new(parse_f64(n, f[4], "re")?, parse_f64(n, f[5], "im")?);
        let off = parse_f64(n, f[6], "log_offset")?;
        if k == 0 {
            blocks.push(Block { coeffs: Vec::with_capacity(lv.d), log_offset: 0.0 });
            offsets.push(Vec::with_capacity(lv.d));
        }
        blocks[j].coeffs.push(c);
        offsets[j].push(off);
        expect = if k + 1 == lv.d { (j + 1, 0) } else { (j, k + 1) };
    }
    if expect != (j_max + 1, 0) {
        return Err(perr(end, format!("file ends before level {} mode {}", expect.0, expect.1)));
    }
    // One offset per block: rebase modes written with different offsets.
    for (b, offs) in blocks.iter_mut().zip(&offsets) {
        let top = offs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        b.log_offset = top;
        for (c, o) in b.coeffs.iter_mut().zip(offs) {
            if *o != top {
                *c *= (o - top).exp();
            }
        }
    }
    let vector = SpectralVector::new(op, levels, blocks)?;
    Ok(CoefFile { vector, provenance })
}
