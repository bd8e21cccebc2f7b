use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Method, SweepResult, SweepRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 11] = [
    "method",
    "sweep_value",
    "trial",
    "jam_gain_db",
    "malicious_sinr_db",
    "comm_gain_db",
    "sum_rate",
    "p_det_malicious",
    "p_det_isac",
    "feasible_flag",
    "wall_time_ms",
];

/// RFC-4180 CSV with LF line endings. Floats use the shortest
/// representation that round-trips.
pub fn write_csv<W: Write>(out: W, result: &SweepResult) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &result.rows {
        w.write_record([
            r.method.as_str().to_string(),
            r.sweep_value.to_string(),
            r.trial.to_string(),
            r.jam_gain_db.to_string(),
            r.malicious_sinr_db.to_string(),
            r.comm_gain_db.to_string(),
            r.sum_rate.to_string(),
            r.p_det_malicious.to_string(),
            r.p_det_isac.to_string(),
            r.feasible_flag.to_string(),
            r.wall_time_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, result: &SweepResult) -> Result<()> {
    write_csv(File::create(path)?, result)
}

pub fn read_csv<R: Read>(input: R) -> Result<SweepResult> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header: {}", header.join(","))));
    }
    let mut result = SweepResult::default();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|_| Error::Config(format!("line {line}: bad {} '{}'", CSV_HEADER[k], &rec[k])))
        };
        result.rows.push(SweepRow {
            method: rec[0].parse::<Method>()?,
            sweep_value: num(1)?,
            trial: rec[2].parse().map_err(|_| Error::Config(format!("line {line}: bad trial '{}'", &rec[2])))?,
            jam_gain_db: num(3)?,
            malicious_sinr_db: num(4)?,
            comm_gain_db: num(5)?,
            sum_rate: num(6)?,
            p_det_malicious: num(7)?,
            p_det_isac: num(8)?,
            feasible_flag: match &rec[9] {
                "true" => true,
                "false" => false,
                other => return Err(Error::Config(format!("line {line}: bad feasible_flag '{other}'"))),
            },
            wall_time_ms: num(10)?,
        });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let row = SweepRow {
            method: Method::SafeIsac,
            sweep_value: 4.0,
            trial: 2,
            jam_gain_db: -66.25,
            malicious_sinr_db: f64::NAN,
            comm_gain_db: -73.5,
            sum_rate: 1.0 / 3.0,
            p_det_malicious: 0.25,
            p_det_isac: 0.5,
            feasible_flag: true,
            wall_time_ms: 0.0,
        };
        let res = SweepResult { rows: vec![row.clone()], partial: false };
        let mut buf = Vec::new();
        write_csv(&mut buf, &res).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&(CSV_HEADER.join(",") + "\n")));
        assert!(!text.contains('\r'));
        let back = read_csv(&buf[..]).unwrap();
        assert_eq!(back.rows.len(), 1);
        let b = &back.rows[0];
        assert_eq!(b.sum_rate, row.sum_rate);
        assert!(b.malicious_sinr_db.is_nan());
        assert_eq!(b.method, Method::SafeIsac);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
