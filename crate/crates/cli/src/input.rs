use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use fracpole_core::{sample_autocov, AutocovSeq, Complex64};
use serde::Deserialize;

use crate::error::CliError;

pub const MAX_ORDER: usize = 32;

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Moments file: JSON `{"r": [[re, im], ...]}` or CSV lines `re,im`
    #[arg(short, long)]
    pub input: Option<PathBuf>,

    /// Inline moments, comma separated; complex entries as `re:im`
    #[arg(long, allow_hyphen_values = true)]
    pub moments: Option<String>,

    /// Raw series, CSV with one real sample per line
    #[arg(long)]
    pub series: Option<PathBuf>,

    /// Number of lags to estimate from `--series`
    #[arg(long)]
    pub estimate_lags: Option<usize>,
}

impl InputArgs {
    pub fn is_empty(&self) -> bool {
        self.input.is_none() && self.moments.is_none() && self.series.is_none()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Deserialize)]
struct MomentsFile {
    r: Vec<Entry>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))
}

fn parse_number(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Malformed(format!("not a number: {s:?}")))
}

fn parse_inline(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(',')
        .map(|item| match item.split_once(':') {
            Some((re, im)) => Ok(Complex64::new(parse_number(re)?, parse_number(im)?)),
            None => Ok(Complex64::new(parse_number(item)?, 0.0)),
        })
        .collect()
}

fn csv_records(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .filter(|f| !f.is_empty())
            .map(parse_number)
            .collect::<Result<Vec<_>, _>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn parse_file(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let text = read(path)?;
    let json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{');
    if json {
        let file: MomentsFile = serde_json::from_str(&text)?;
        return Ok(file
            .r
            .into_iter()
            .map(|e| match e {
                Entry::Real(x) => Complex64::new(x, 0.0),
                Entry::Complex([re, im]) => Complex64::new(re, im),
            })
            .collect());
    }
    csv_records(&text)?
        .into_iter()
        .map(|row| match row.as_slice() {
            [re] => Ok(Complex64::new(*re, 0.0)),
            [re, im] => Ok(Complex64::new(*re, *im)),
            _ => Err(CliError::Malformed(format!(
                "expected `re,im` per line, got {} fields",
                row.len()
            ))),
        })
        .collect()
}

fn parse_series(path: &Path) -> Result<Vec<f64>, CliError> {
    csv_records(&read(path)?)?
        .into_iter()
        .map(|row| match row.as_slice() {
            [x] => Ok(*x),
            _ => Err(CliError::Malformed(
                "series files hold one value per line".into(),
            )),
        })
        .collect()
}

fn validate(r: Vec<Complex64>) -> Result<AutocovSeq, CliError> {
    if r.is_empty() {
        return Err(CliError::Malformed("no moments given".into()));
    }
    if r.len() - 1 > MAX_ORDER {
        return Err(CliError::Malformed(format!(
            "at most {MAX_ORDER} lags are supported, got {}",
            r.len() - 1
        )));
    }
    if r.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(CliError::Malformed("moments must be finite".into()));
    }
    if r[0].im != 0.0 {
        return Err(CliError::Malformed("R0 must be real".into()));
    }
    Ok(AutocovSeq::new(r)?)
}

pub fn load_autocov(args: &InputArgs) -> Result<AutocovSeq, CliError> {
    let given = [
        args.input.is_some(),
        args.moments.is_some(),
        args.series.is_some(),
    ];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(CliError::Malformed(
            "give exactly one of --input, --moments or --series".into(),
        ));
    }
    if args.estimate_lags.is_some() && args.series.is_none() {
        return Err(CliError::Malformed(
            "--estimate-lags applies to --series only".into(),
        ));
    }
    if let Some(path) = &args.series {
        let lags = args
            .estimate_lags
            .ok_or_else(|| CliError::Malformed("--series needs --estimate-lags".into()))?;
        let series = parse_series(path)?;
        if series.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Malformed("series must be finite".into()));
        }
        return validate(sample_autocov(&series, lags)?.as_slice().to_vec());
    }
    let r = match (&args.input, &args.moments) {
        (Some(path), _) => parse_file(path)?,
        (_, Some(inline)) => parse_inline(inline)?,
        _ => unreachable!(),
    };
    validate(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_parsing() {
        let r = parse_inline("3, 1.5:-0.5,0").unwrap();
        assert_eq!(r[1], Complex64::new(1.5, -0.5));
        assert_eq!(r.len(), 3);
        assert!(parse_inline("1,x").is_err());
    }

    #[test]
    fn csv_parsing() {
        let rows = csv_records("# lags\n1, 0\n0.5,0.25\n\n").unwrap();
        assert_eq!(rows, vec![vec![1.0, 0.0], vec![0.5, 0.25]]);
    }

    #[test]
    fn validation() {
        assert!(matches!(validate(vec![]), Err(CliError::Malformed(_))));
        let too_long = vec![Complex64::new(1.0, 0.0); MAX_ORDER + 2];
        assert!(matches!(validate(too_long), Err(CliError::Malformed(_))));
        let bad = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert_eq!(validate(bad).unwrap_err().exit_code(), 2);
    }
}
