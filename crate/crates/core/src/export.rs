//! File formats: matrices as JSON or CSV, root listings, suite reports.
//!
//! Complex numbers are always written as `[re, im]` pairs with
//! shortest round-trip decimal formatting, so a written matrix parses back
//! to bitwise identical values.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cartan_weyl::{real_root_monomial, Monomial};
use crate::error::{Error, Result};
use crate::representations::GradingVector;
use crate::root_data::{AffineRoot, RootKind, RootSystem};
use crate::verify::VerificationReport;
use crate::{CMatrix, C64};

/// Output format of the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format '{other}' (expected json or csv)"))),
        }
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// A matrix with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub m: usize,
    pub n: usize,
    pub q: [f64; 2],
    pub zeta1: [f64; 2],
    pub zeta2: [f64; 2],
    pub grading: Vec<i64>,
    pub mode: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub entries: Vec<[f64; 2]>,
    #[serde(default)]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

impl MatrixFile {
    #[allow(clippy::too_many_arguments)]
    pub fn new(m: usize, n: usize, q: C64, zeta1: C64, zeta2: C64, grading: &GradingVector, mode: &str, matrix: &CMatrix) -> Self {
        let mut entries = Vec::with_capacity(matrix.len());
        for r in 0..matrix.nrows() {
            for c in 0..matrix.ncols() {
                entries.push(pair(matrix[(r, c)]));
            }
        }
        Self {
            m,
            n,
            q: pair(q),
            zeta1: pair(zeta1),
            zeta2: pair(zeta2),
            grading: grading.as_slice().to_vec(),
            mode: mode.into(),
            rows: matrix.nrows(),
            cols: matrix.ncols(),
            entries,
            metadata: serde_json::Map::new(),
        }
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {}x{} matrix", self.entries.len(), self.rows, self.cols)));
        }
        Ok(CMatrix::from_row_iterator(self.rows, self.cols, self.entries.iter().map(|[re, im]| C64::new(*re, *im))))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(s)?;
        f.matrix()?;
        Ok(f)
    }
}

/// Writes a matrix as CSV: one line per row, each entry as an `re,im`
/// column pair.
pub fn write_matrix_csv<W: Write>(matrix: &CMatrix, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let header: Vec<String> = (0..matrix.ncols()).flat_map(|c| [format!("re{c}"), format!("im{c}")]).collect();
    out.write_record(&header)?;
    for r in 0..matrix.nrows() {
        let rec: Vec<String> = (0..matrix.ncols()).flat_map(|c| [matrix[(r, c)].re.to_string(), matrix[(r, c)].im.to_string()]).collect();
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv<R: Read>(r: R) -> Result<CMatrix> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() % 2 != 0 {
            return Err(Error::ShapeMismatch("odd number of CSV columns".into()));
        }
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(|s| s.parse::<f64>()).collect();
        let vals = vals.map_err(|e| Error::Io(format!("bad number in CSV: {e}")))?;
        rows.push(vals.chunks(2).map(|c| C64::new(c[0], c[1])).collect());
    }
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::ShapeMismatch("ragged CSV rows".into()));
    }
    Ok(CMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

/// One entry of a normally ordered root listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub position: usize,
    pub root: String,
    pub kind: String,
    pub level: usize,
    pub coefficients: Vec<i64>,
    pub parity: u8,
    pub self_pairing: i64,
    /// Closed-form image of `e_γ`, real roots only.
    pub monomial: Option<Monomial>,
}

/// All positive roots up to a level cutoff, in normal order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootListing {
    pub m: usize,
    pub n: usize,
    pub n_max: usize,
    pub grading: Vec<i64>,
    pub roots: Vec<RootEntry>,
}

impl RootListing {
    pub fn new(system: &RootSystem, grading: &GradingVector, n_max: usize) -> Result<Self> {
        let rank = *system.rank();
        let mut roots = Vec::new();
        for (position, root) in system.positive_roots(n_max).into_iter().enumerate() {
            let kind = match root.kind {
                RootKind::RealPlus { .. } => "alpha+n delta",
                RootKind::Imaginary { .. } => "n delta",
                RootKind::RealMinusWrap { .. } => "(delta-alpha)+n delta",
            };
            let monomial = if root.is_real() { Some(real_root_monomial(&root, &rank, grading)?) } else { None };
            roots.push(RootEntry {
                position,
                root: root.to_string(),
                kind: kind.into(),
                level: root.level(),
                coefficients: root.coefficients(&rank).0,
                parity: system.parity(&root).bit() as u8,
                self_pairing: system.bilinear(&root, &root),
                monomial,
            });
        }
        Ok(Self { m: rank.m(), n: rank.n(), n_max, grading: grading.as_slice().to_vec(), roots })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["position", "root", "kind", "level", "parity", "self_pairing", "zeta_power", "sign", "q_power", "unit_row", "unit_col"])?;
        for e in &self.roots {
            let mono = e.monomial.map(|m| [m.zeta_power.to_string(), m.sign.to_string(), m.q_power.to_string(), m.unit.0.to_string(), m.unit.1.to_string()]);
            let mono = mono.unwrap_or_else(|| std::array::from_fn(|_| String::new()));
            let mut rec = vec![e.position.to_string(), e.root.clone(), e.kind.clone(), e.level.to_string(), e.parity.to_string(), e.self_pairing.to_string()];
            rec.extend(mono);
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Checks a listing against the ordering rule: all imaginary roots sit
/// between the last `α + nδ` root and the first `(δ - α) + nδ` root.
pub fn imaginary_block_is_contiguous(roots: &[AffineRoot]) -> bool {
    let class = |r: &AffineRoot| match r.kind {
        RootKind::RealPlus { .. } => 0,
        RootKind::Imaginary { .. } => 1,
        RootKind::RealMinusWrap { .. } => 2,
    };
    roots.windows(2).all(|w| class(&w[0]) <= class(&w[1]))
}

/// Writes a suite report as CSV, one line per check.
pub fn write_report_csv<W: Write>(report: &VerificationReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["check", "parameters", "residual", "threshold", "passed", "wall_time_ms", "error"])?;
    for c in &report.checks {
        out.write_record([
            c.name.clone(),
            c.parameters.clone(),
            c.residual.to_string(),
            c.threshold.to_string(),
            c.passed.to_string(),
            c.wall_time_ms.to_string(),
            c.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::SuperRank;
    use proptest::prelude::*;

    fn sample(seed: u64) -> CMatrix {
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        CMatrix::from_fn(4, 3, |_, _| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (x >> 11) as f64 / (1u64 << 53) as f64;
            C64::new(a * 3.0 - 1.0, (a * 1e7).sin() / 7.0)
        })
    }

    #[test]
    fn json_roundtrip_is_bitwise() {
        let r = SuperRank::new(2, 1).unwrap();
        let m = sample(5);
        let f = MatrixFile::new(2, 1, C64::new(0.1, 0.7), C64::new(1.0 / 3.0, 0.0), C64::new(2.0, -1e-300), &GradingVector::standard(&r), "closed", &m);
        let back = MatrixFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        let bm = back.matrix().unwrap();
        for (a, b) in m.iter().zip(bm.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn corrupt_json_rejected() {
        let r = SuperRank::new(2, 1).unwrap();
        let mut f = MatrixFile::new(2, 1, C64::new(0.1, 0.7), C64::new(1.0, 0.0), C64::new(2.0, 0.0), &GradingVector::standard(&r), "closed", &sample(1));
        f.entries.pop();
        assert!(MatrixFile::from_json(&f.to_json().unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn csv_roundtrip_is_bitwise(seed in any::<u64>()) {
            let m = sample(seed);
            let mut buf = Vec::new();
            write_matrix_csv(&m, &mut buf).unwrap();
            let back = read_matrix_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.shape(), m.shape());
            for (a, b) in m.iter().zip(back.iter()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn root_listing_sl21() {
        let r = SuperRank::new(2, 1).unwrap();
        let sys = RootSystem::new(r);
        let listing = RootListing::new(&sys, &GradingVector::standard(&r), 1).unwrap();
        let first = &listing.roots[0];
        assert_eq!(first.coefficients, AffineRoot::real_plus(1, 2, 0).coefficients(&r).0);
        assert_eq!(first.monomial.unwrap().unit, (1, 2));
        assert!(imaginary_block_is_contiguous(&sys.positive_roots(1)));
        for (e, root) in listing.roots.iter().zip(sys.positive_roots(1)) {
            assert_eq!(e.parity as i64, sys.parity(&root).bit());
        }
        let mut buf = Vec::new();
        listing.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), listing.roots.len() + 1);
    }
}
