use std::io::Read;

use crate::error::{Error, Result};
use crate::polysys::CompensatedSum;
use crate::polysys::C64;

use super::table::{MomentKey, MomentTable};

/// Row-major N×n sample matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    n: usize,
    data: Vec<f64>,
}

impl Samples {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map(Vec::len).ok_or(Error::NoSamples)?;
        let mut data = Vec::with_capacity(rows.len() * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: r + 1, column: c + 1 });
                }
            }
            data.extend_from_slice(row);
        }
        if n == 0 {
            return Err(Error::NoSamples);
        }
        Ok(Samples { n, data })
    }

    /// Parses CSV with `n` numeric columns per row. A first row that does
    /// not parse as numbers is taken as a header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => {
                    for (c, v) in row.iter().enumerate() {
                        if !v.is_finite() {
                            return Err(Error::NonFinite {
                                row: line + 1,
                                column: c + 1,
                            });
                        }
                    }
                    rows.push(row);
                }
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("row {}: {e}", line + 1))),
            }
        }
        if rows.is_empty() {
            return Err(Error::NoSamples);
        }
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// `m̄_key = (1/N) Σ_samples Π_s y_s^{i_s}` for every key.
pub fn sample_moments(samples: &Samples, keys: &[MomentKey]) -> Result<MomentTable> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let mut table = MomentTable::new(samples.dim());
    let count = samples.len() as f64;
    for key in keys {
        if key.dim() != samples.dim() {
            return Err(Error::DimensionMismatch {
                expected: samples.dim(),
                got: key.dim(),
            });
        }
        let support: Vec<(usize, i32)> = key.support().into_iter().map(|s| (s, key.index()[s] as i32)).collect();
        let mut sum = CompensatedSum::default();
        for i in 0..samples.len() {
            let row = samples.row(i);
            let v: f64 = support.iter().map(|&(s, e)| row[s].powi(e)).product();
            sum.add(C64::new(v, 0.0));
        }
        table.insert(key.clone(), sum.value().re / count)?;
    }
    Ok(table)
}
