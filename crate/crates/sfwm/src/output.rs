//! Bit-stable file emission. Everything is rendered in memory and only
//! written once the whole run has succeeded.

use std::path::{Path, PathBuf};

use crate::error::{RunError, Stage};

/// Twelve significant digits, shortest form, `.` as decimal point.
/// Fixed notation for exponents in [-5, 12), scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// CSV text with `\n` line endings.
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer
            .write_record(header.iter().map(AsRef::as_ref))
            .expect("write to memory");
        Self { writer }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        self.writer
            .write_record(fields.iter().map(AsRef::as_ref))
            .expect("write to memory");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("flush to memory")
    }
}

/// `x_nm,intensity` rows.
pub fn xy_csv(x: &[f64], y: &[f64]) -> Vec<u8> {
    let mut csv = Csv::new(&["x_nm", "intensity"]);
    for (a, b) in x.iter().zip(y) {
        csv.row(&[fmt_num(*a), fmt_num(*b)]);
    }
    csv.into_bytes()
}

pub fn json_bytes<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("value serializes");
    out.push(b'\n');
    out
}

/// Files produced by a run, in emission order.
#[derive(Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Creates `dir` if needed and writes every file. Each file goes to a
    /// temporary name first and is renamed into place.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
        let io = |p: &Path, e: std::io::Error| RunError::new(Stage::Output, format!("{}: {e}", p.display()));
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            let tmp = dir.join(format!(".{name}.partial"));
            std::fs::write(&tmp, bytes).map_err(|e| io(&tmp, e))?;
            std::fs::rename(&tmp, &path).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Keeps file names portable.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1070.0), "1070");
        assert_eq!(fmt_num(1409.190000000004), "1409.19");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.0 / 3.0 * 1e-3), "-0.000666666666667");
        assert_eq!(fmt_num(1.77e15), "1.77e15");
        assert_eq!(fmt_num(123456789012.4), "123456789012");
        assert_eq!(fmt_num(1.234e-7), "1.234e-7");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(999999999999.9), "1e12");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn round_trip_within_twelve_digits() {
        for &x in &[std::f64::consts::PI, 2.998e8, 6.02e-23, -1.5e-5, 0.1 + 0.2] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-12, "{x}");
        }
    }

    #[test]
    fn csv_lines() {
        let bytes = xy_csv(&[1.0, 2.5], &[0.5, 1e-20]);
        assert_eq!(String::from_utf8(bytes).unwrap(), "x_nm,intensity\n1,0.5\n2.5,1e-20\n");
        assert_eq!(file_stem("S1+S3 (1.5 m)"), "S1_S3__1_5_m_");
    }
}
