use std::fmt;
use std::io::Read;
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};
use crate::nnkernel::Tensor2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingRate {
    Hourly,
    Min15,
    Min10,
    Weekly,
    Daily,
    Unknown,
}

impl fmt::Display for SamplingRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingRate::Hourly => "hourly",
            SamplingRate::Min15 => "15min",
            SamplingRate::Min10 => "10min",
            SamplingRate::Weekly => "weekly",
            SamplingRate::Daily => "daily",
            SamplingRate::Unknown => "unknown",
        })
    }
}

impl SamplingRate {
    fn from_seconds(secs: i64) -> Self {
        match secs {
            3600 => SamplingRate::Hourly,
            900 => SamplingRate::Min15,
            600 => SamplingRate::Min10,
            86_400 => SamplingRate::Daily,
            604_800 => SamplingRate::Weekly,
            _ => SamplingRate::Unknown,
        }
    }
}

/// A multichannel series as read from disk, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub name: String,
    pub sampling_rate: SamplingRate,
    pub channel_names: Vec<String>,
    pub timestamps: Vec<String>,
    /// `T x C`
    pub values: Tensor2,
}

impl RawDataset {
    pub fn timesteps(&self) -> usize {
        self.values.rows()
    }

    pub fn channels(&self) -> usize {
        self.values.cols()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub date_column: String,
    pub expected_channels: Option<usize>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            date_column: "date".to_string(),
            expected_channels: None,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<RawDataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| {
        Error::Data(format!("cannot read dataset {}: {e}", path.display()))
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    parse_csv(&name, bytes.as_slice(), schema)
}

/// Parses a header-led CSV whose date column holds timestamps and every
/// other column is numeric.
pub fn parse_csv(name: &str, input: impl Read, schema: &CsvSchema) -> Result<RawDataset> {
    let mut reader = ::csv::ReaderBuilder::new()
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| Error::Format(format!("unreadable header: {e}")))?
        .clone();
    let date_idx = header
        .iter()
        .position(|h| h == schema.date_column)
        .ok_or_else(|| {
            Error::Format(format!("no '{}' column in header", schema.date_column))
        })?;
    let channel_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != date_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    let c = channel_names.len();
    if c == 0 {
        return Err(Error::Format("no value columns".into()));
    }
    if let Some(expected) = schema.expected_channels {
        if expected != c {
            return Err(Error::Format(format!(
                "expected {expected} channels, header has {c}"
            )));
        }
    }

    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let record = record.map_err(|e| Error::Format(format!("line {line}: {e}")))?;
        if record.len() != header.len() {
            return Err(Error::Format(format!(
                "line {line} has {} fields, header has {}",
                record.len(),
                header.len()
            )));
        }
        for (j, field) in record.iter().enumerate() {
            if j == date_idx {
                timestamps.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row: line,
                column: header[j].to_string(),
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    column: header[j].to_string(),
                    message: format!("'{field}' is not a finite number"),
                });
            }
            values.push(v);
        }
    }
    let t = timestamps.len();
    if t == 0 {
        return Err(Error::Data(format!("{name}: no data rows")));
    }
    Ok(RawDataset {
        name: name.to_string(),
        sampling_rate: infer_rate(&timestamps),
        channel_names,
        timestamps,
        values: Tensor2::from_vec(t, c, values)?,
    })
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    const FORMATS: [&str; 4] = ["%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M", "%Y/%m/%d %H:%M", "%m/%d/%Y %H:%M"];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .or_else(|| {
            NaiveDate::parse_from_str(s, "%Y-%m-%d")
                .ok()
                .and_then(|d| d.and_hms_opt(0, 0, 0))
        })
}

fn infer_rate(timestamps: &[String]) -> SamplingRate {
    if timestamps.len() < 2 {
        return SamplingRate::Unknown;
    }
    match (parse_timestamp(&timestamps[0]), parse_timestamp(&timestamps[1])) {
        (Some(a), Some(b)) => SamplingRate::from_seconds((b - a).num_seconds()),
        _ => SamplingRate::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "date,a,b\n2016-07-01 00:00:00,1.0,2.0\n2016-07-01 01:00:00,3.5,-4\n2016-07-01 02:00:00,5,6e-1\n";

    #[test]
    fn toy_file() {
        let ds = parse_csv("toy", TOY.as_bytes(), &CsvSchema::default()).unwrap();
        assert_eq!(ds.timesteps(), 3);
        assert_eq!(ds.channels(), 2);
        assert_eq!(ds.channel_names, vec!["a", "b"]);
        assert_eq!(ds.values.row(1), &[3.5, -4.0]);
        assert_eq!(ds.sampling_rate, SamplingRate::Hourly);
    }

    #[test]
    fn nan_cell_is_a_parse_error() {
        let text = "date,a,b\n2016-07-01 00:00:00,1.0,NaN\n";
        match parse_csv("bad", text.as_bytes(), &CsvSchema::default()) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn text_cell_is_a_parse_error() {
        let text = "date,a\n2016-07-01 00:00:00,abc\n";
        assert!(matches!(
            parse_csv("bad", text.as_bytes(), &CsvSchema::default()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn ragged_rows_are_a_format_error() {
        let text = "date,a,b\n2016-07-01 00:00:00,1.0\n";
        assert!(matches!(
            parse_csv("bad", text.as_bytes(), &CsvSchema::default()),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn expected_channel_count_is_checked() {
        let schema = CsvSchema {
            expected_channels: Some(7),
            ..CsvSchema::default()
        };
        assert!(parse_csv("toy", TOY.as_bytes(), &schema).is_err());
    }

    #[test]
    fn rates() {
        let ts = |a: &str, b: &str| infer_rate(&[a.to_string(), b.to_string()]);
        assert_eq!(ts("2016-07-01 00:00:00", "2016-07-01 00:15:00"), SamplingRate::Min15);
        assert_eq!(ts("2020-01-01 00:10", "2020-01-01 00:20"), SamplingRate::Min10);
        assert_eq!(ts("2002-01-01", "2002-01-08"), SamplingRate::Weekly);
        assert_eq!(ts("x", "y"), SamplingRate::Unknown);
    }
}
