use std::fmt::Write as _;
use std::path::PathBuf;

use super::sequence::{make_weights, ConditionCertificate, WeightKind, WeightSequence};
use super::WeightsError;

/// Parsed form of the weights text record.
///
/// ```text
/// kind gevrey
/// s 2
/// nu 2
/// certificate 1 4 50
/// log_m 0 0.0000000000000000e0
/// log_m 1 0.0000000000000000e0
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct WeightsRecord {
    pub kind: WeightKind,
    pub nu: u32,
    pub certificate: Option<ConditionCertificate>,
    pub table: Vec<f64>,
}

impl WeightsRecord {
    pub fn to_sequence(&self) -> Result<WeightSequence, WeightsError> {
        let mut w = make_weights(self.kind.clone(), self.nu)?;
        w.set_certificate(self.certificate);
        Ok(w)
    }
}

/// Writes `w` with its table through `k_max`; 17 significant digits.
pub fn write_weights_record(w: &WeightSequence, k_max: usize) -> String {
    let mut out = String::new();
    let custom_len = w.defined_len();
    match w.kind() {
        WeightKind::Gevrey(s) => {
            let _ = writeln!(out, "kind gevrey\ns {s:.16e}");
        }
        WeightKind::Factorial => out.push_str("kind factorial\n"),
        WeightKind::Custom(_) | WeightKind::CustomLog(_) => out.push_str("kind custom\n"),
    }
    let _ = writeln!(out, "nu {}", w.nu());
    if let Some(c) = w.certificate() {
        let _ = writeln!(out, "certificate {:.16e} {:.16e} {}", c.a, c.h, c.k_max_checked);
    }
    // Custom tables are written in full so the continuation is reproduced.
    let n = custom_len.unwrap_or(k_max + 1);
    for k in 0..n {
        let _ = writeln!(out, "log_m {k} {:.16e}", w.log_m(k as u64));
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> WeightsError {
    WeightsError::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, WeightsError> {
    tok.ok_or_else(|| perr(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| perr(line, format!("bad {what}")))
}

pub fn parse_weights_record(text: &str) -> Result<WeightsRecord, WeightsError> {
    let mut kind: Option<String> = None;
    let mut s: Option<f64> = None;
    let mut nu: Option<u32> = None;
    let mut certificate = None;
    let mut table = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let key = toks.next().unwrap_or_default();
        match key {
            "kind" => kind = Some(toks.next().ok_or_else(|| perr(line, "missing kind"))?.to_string()),
            "s" => s = Some(num(line, toks.next(), "s")?),
            "nu" => nu = Some(num(line, toks.next(), "nu")?),
            "certificate" => {
                certificate = Some(ConditionCertificate {
                    a: num(line, toks.next(), "A")?,
                    h: num(line, toks.next(), "H")?,
                    k_max_checked: num(line, toks.next(), "k_max")?,
                })
            }
            "log_m" => {
                let k: usize = num(line, toks.next(), "index")?;
                let v: f64 = num(line, toks.next(), "value")?;
                if k != table.len() {
                    return Err(perr(line, format!("expected index {}, found {k}", table.len())));
                }
                if !v.is_finite() {
                    return Err(perr(line, "log_m must be finite"));
                }
                table.push(v);
            }
            other => return Err(perr(line, format!("unknown key `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(perr(line, "trailing tokens"));
        }
    }
    let end = text.lines().count().max(1);
    let nu = nu.ok_or_else(|| perr(end, "missing nu"))?;
    let kind = match kind.as_deref() {
        Some("gevrey") => WeightKind::Gevrey(s.ok_or_else(|| perr(end, "gevrey record needs s"))?),
        Some("factorial") => WeightKind::Factorial,
        Some("custom") => WeightKind::CustomLog(table.clone()),
        Some(other) => return Err(perr(end, format!("unknown kind `{other}`"))),
        None => return Err(perr(end, "missing kind")),
    };
    // Validate through the constructor so bad tables fail here.
    make_weights(kind.clone(), nu)?;
    Ok(WeightsRecord { kind, nu, certificate, table })
}

/// Weight choice as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Gevrey(f64),
    Factorial,
    File(PathBuf),
}

/// Parses `gevrey:S`, `factorial` or `file:PATH`.
pub fn parse_weight_spec(spec: &str) -> Result<WeightSpec, WeightsError> {
    let bad = |msg: String| WeightsError::Parse { line: 1, msg };
    let spec = spec.trim();
    if spec == "factorial" {
        return Ok(WeightSpec::Factorial);
    }
    if let Some(s) = spec.strip_prefix("gevrey:") {
        let s: f64 = s.parse().map_err(|_| bad(format!("bad Gevrey order `{s}`")))?;
        if !(s >= 1.0 && s.is_finite()) {
            return Err(WeightsError::GevreyOrder(s));
        }
        return Ok(WeightSpec::Gevrey(s));
    }
    if let Some(p) = spec.strip_prefix("file:") {
        if p.is_empty() {
            return Err(bad("empty path".into()));
        }
        return Ok(WeightSpec::File(PathBuf::from(p)));
    }
    Err(bad(format!("expected gevrey:S, factorial or file:PATH, got `{spec}`")))
}

impl WeightSpec {
    /// Builds the sequence; files hold a weights record whose `nu` must match.
    pub fn resolve(&self, nu: u32) -> Result<WeightSequence, WeightsError> {
        match self {
            WeightSpec::Gevrey(s) => make_weights(WeightKind::Gevrey(*s), nu),
            WeightSpec::Factorial => make_weights(WeightKind::Factorial, nu),
            WeightSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| WeightsError::InvalidArgument(format!("{}: {e}", path.display())))?;
                let rec = parse_weights_record(&text)?;
                if rec.nu != nu {
                    return Err(WeightsError::InvalidArgument(format!(
                        "weights file has nu = {}, operator has nu = {nu}",
                        rec.nu
                    )));
                }
                rec.to_sequence()
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightSpec::Gevrey(s) => format!("gevrey:{s}"),
            WeightSpec::Factorial => "factorial".into(),
            WeightSpec::File(p) => format!("file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::check_conditions;

    #[test]
    fn gevrey_record_round_trips_bitwise() {
        let mut w = make_weights(WeightKind::Gevrey(1.5), 2).unwrap();
        check_conditions(&mut w, 20).unwrap();
        let text = write_weights_record(&w, 30);
        let rec = parse_weights_record(&text).unwrap();
        assert_eq!(rec.table.len(), 31);
        for (k, v) in rec.table.iter().enumerate() {
            assert_eq!(*v, w.log_m(k as u64));
        }
        let back = rec.to_sequence().unwrap();
        assert_eq!(back.certificate(), w.certificate());
        assert_eq!(back.gevrey_order(), Some(1.5));
    }

    #[test]
    fn custom_record_keeps_continuation() {
        let w = make_weights(WeightKind::Custom(vec![1.0, 1.0, 3.0, 10.0]), 1).unwrap();
        let back = parse_weights_record(&write_weights_record(&w, 0)).unwrap().to_sequence().unwrap();
        for k in 0..40 {
            assert_eq!(back.log_m(k), w.log_m(k));
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_weights_record("kind custom\nnu 1\nlog_m 0 0\nlog_m 2 1\n").unwrap_err();
        assert!(matches!(err, WeightsError::Parse { line: 4, .. }));
        let err = parse_weights_record("kind custom\nnu 1\nlog_m 0 1\nlog_m 1 2\n").unwrap_err();
        assert!(matches!(err, WeightsError::M0NotOne(_)));
        assert!(parse_weights_record("kind gevrey\nnu 2\n").is_err());
        assert!(parse_weights_record("bogus 1\n").is_err());
    }

    #[test]
    fn weight_specs() {
        assert_eq!(parse_weight_spec("gevrey:2").unwrap(), WeightSpec::Gevrey(2.0));
        assert_eq!(parse_weight_spec("factorial").unwrap(), WeightSpec::Factorial);
        assert_eq!(parse_weight_spec("file:w.txt").unwrap(), WeightSpec::File("w.txt".into()));
        assert!(parse_weight_spec("gevrey:0.5").is_err());
        assert!(parse_weight_spec("gevrey:x").is_err());
        assert!(parse_weight_spec("poly").is_err());
    }
}
