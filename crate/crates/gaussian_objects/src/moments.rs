//! Ensemble second-moment tables.

use std::io::Write;

use serde::{Deserialize, Serialize};

/// One row of a moment table. Oracle rows carry `n_samples = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub kind: String,
    pub k: Option<usize>,
    pub j: Option<i32>,
    pub n_samples: usize,
    pub m2: f64,
    pub stderr: f64,
}

/// Sample mean and its standard error, summed in slice order.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::INFINITY);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

impl MomentRow {
    pub fn from_samples(kind: &str, k: Option<usize>, j: Option<i32>, values: &[f64]) -> Self {
        let (m2, stderr) = mean_stderr(values);
        Self {
            kind: kind.to_owned(),
            k,
            j,
            n_samples: values.len(),
            m2,
            stderr,
        }
    }

    pub fn oracle(kind: &str, k: Option<usize>, j: Option<i32>, m2: f64) -> Self {
        Self {
            kind: kind.to_owned(),
            k,
            j,
            n_samples: 0,
            m2,
            stderr: 0.0,
        }
    }
}

pub fn write_moments_csv<W: Write>(out: W, rows: &[MomentRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stderr_of_constant_is_zero() {
        assert_eq!(mean_stderr(&[2.0; 10]), (2.0, 0.0));
        let (m, se) = mean_stderr(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-15);
    }

    #[test]
    fn csv_schema() {
        let rows = [
            MomentRow::from_samples("ou", Some(3), None, &[1.0, 3.0]),
            MomentRow::oracle("ou", Some(3), None, 2.0),
        ];
        let mut buf = Vec::new();
        write_moments_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("kind,k,j,n_samples,m2,stderr"));
        assert_eq!(lines.next(), Some("ou,3,,2,2.0,1.0"));
        assert_eq!(lines.next(), Some("ou,3,,0,2.0,0.0"));
    }
}
