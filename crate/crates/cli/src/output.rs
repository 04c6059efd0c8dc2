//! Serialization of results. Floats are written with 17 significant
//! digits (CSV) or shortest round-trip form (JSON).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use cryptoherm::{Matrix, StateTrajectory, Vector};

use crate::config::TableFormat;

pub type JsonComplex = [f64; 2];

pub fn complex(z: Complex64) -> JsonComplex {
    [z.re, z.im]
}

pub fn vector(v: &Vector) -> Vec<JsonComplex> {
    v.iter().copied().map(complex).collect()
}

/// Row-major nested arrays.
pub fn matrix(m: &Matrix) -> Vec<Vec<JsonComplex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex(m[(i, j)])).collect())
        .collect()
}

pub fn columns(m: &Matrix) -> Vec<Vec<JsonComplex>> {
    (0..m.ncols())
        .map(|j| m.column(j).iter().copied().map(complex).collect())
        .collect()
}

/// Collects written files in order.
#[derive(Debug)]
pub struct Sink {
    dir: PathBuf,
    format: TableFormat,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, format: TableFormat) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, body: String) -> io::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> io::Result<()> {
        let mut body = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        body.push('\n');
        self.put(&format!("{stem}.json"), body)
    }

    pub fn trajectory(&mut self, stem: &str, traj: &StateTrajectory) -> io::Result<()> {
        let body = trajectory_table(traj, self.format.delimiter());
        self.put(&format!("{stem}.{}", self.format.extension()), body)
    }
}

fn push_num(row: &mut String, delim: char, x: f64) {
    row.push(delim);
    let _ = write!(row, "{x:.16e}");
}

/// Columns: `t`, Φ and Ψ components, overlap, cumulative drift
/// `max_{j≤k} |overlap_j − overlap_0|`.
pub fn trajectory_table(traj: &StateTrajectory, delim: char) -> String {
    let n = traj.dim();
    let mut header = vec!["t".to_string()];
    for side in ["phi", "psi"] {
        for j in 0..n {
            header.push(format!("{side}_{j}_re"));
            header.push(format!("{side}_{j}_im"));
        }
    }
    header.extend(["overlap_re", "overlap_im", "drift"].map(String::from));
    let mut out = header.join(&delim.to_string());
    out.push('\n');

    for (k, drift) in traj.cumulative_drift().into_iter().enumerate() {
        let mut row = format!("{:.16e}", traj.times[k]);
        for z in traj.phi[k].iter().chain(traj.psi[k].iter()) {
            push_num(&mut row, delim, z.re);
            push_num(&mut row, delim, z.im);
        }
        push_num(&mut row, delim, traj.overlap[k].re);
        push_num(&mut row, delim, traj.overlap[k].im);
        push_num(&mut row, delim, drift);
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Header and numeric rows of a table written by [`trajectory_table`].
pub fn read_table(text: &str, delim: char) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty table")?
        .split(delim)
        .map(String::from)
        .collect();
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row: Vec<f64> = line
                .split(delim)
                .map(|s| s.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
                .collect::<Result<_, _>>()?;
            if row.len() != header.len() {
                return Err(format!(
                    "row {} has {} fields, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                ));
            }
            Ok(row)
        })
        .collect::<Result<_, String>>()?;
    Ok((header, rows))
}
