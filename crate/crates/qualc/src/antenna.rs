//! Antenna CSV input, pair-table CSV output and synthetic datasets.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use qualc_core::geo::{inverse_mercator, project_mercator, Antenna, Region, SpatialPair, MAX_LATITUDE};

use crate::error::{io_err, Error, Result};

#[derive(Deserialize, Serialize)]
struct AntennaRow {
    id: String,
    lat: f64,
    lon: f64,
}

/// Reads `id,lat,lon` rows, checking coordinate bounds and id uniqueness.
pub fn read_antennas<R: Read>(input: R, origin: &Path) -> Result<Vec<Antenna>> {
    let csv_err = |message: String| Error::Csv {
        path: origin.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| csv_err(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "lat", "lon"] {
        return Err(csv_err(format!("expected header `id,lat,lon`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<AntennaRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| csv_err(format!("line {line}: {e}")))?;
        if !(-90.0..=90.0).contains(&row.lat) || !(-180.0..=180.0).contains(&row.lon) {
            return Err(csv_err(format!("line {line}: coordinates ({}, {}) out of range", row.lat, row.lon)));
        }
        if !seen.insert(row.id.clone()) {
            return Err(csv_err(format!("line {line}: duplicate id `{}`", row.id)));
        }
        out.push(Antenna {
            id: row.id,
            lat: row.lat,
            lon: row.lon,
        });
    }
    Ok(out)
}

pub fn read_antennas_file(path: &Path) -> Result<Vec<Antenna>> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    read_antennas(file, path)
}

pub fn write_antennas<W: Write>(out: W, antennas: &[Antenna]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for a in antennas {
        w.serialize(AntennaRow {
            id: a.id.clone(),
            lat: a.lat,
            lon: a.lon,
        })?;
    }
    w.flush()
}

/// `a,b,de9im,rcc5` rows keyed by region id.
pub fn write_pair_table<W: Write>(out: W, regions: &[Region], pairs: &[SpatialPair]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a", "b", "de9im", "rcc5"])?;
    for p in pairs {
        w.write_record([
            regions[p.a].id.as_str(),
            regions[p.b].id.as_str(),
            p.de9im.as_str(),
            p.rcc5(),
        ])?;
    }
    w.flush()
}

/// Parameters of a synthetic dataset: `count` points drawn uniformly from a
/// square of the projected plane centred on `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthetic {
    pub count: usize,
    pub seed: u64,
    pub center: (f64, f64),
    /// Side of the square in projected meters.
    pub side_m: f64,
}

/// Expected number of overlapping neighbours per disk used by
/// [`Synthetic::new`] to size the square.
pub const MEAN_OVERLAPS: f64 = 3.0;

impl Synthetic {
    /// Square sized so that a disk of `radius` overlaps about
    /// [`MEAN_OVERLAPS`] others.
    pub fn new(count: usize, seed: u64, radius: f64) -> Self {
        let reach = std::f64::consts::PI * (2.0 * radius) * (2.0 * radius);
        let side = (count.saturating_sub(1).max(1) as f64 * reach / MEAN_OVERLAPS).sqrt();
        Synthetic {
            count,
            seed,
            center: (40.75, -73.98),
            side_m: side,
        }
    }

    pub fn generate(&self) -> Result<Vec<Antenna>> {
        if self.center.0.abs() > MAX_LATITUDE {
            return Err(Error::Invalid(format!("center latitude {} out of range", self.center.0)));
        }
        let (cx, cy) = project_mercator(self.center.0, self.center.1)?;
        let half = self.side_m / 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let width = self.count.max(1).to_string().len();
        Ok((0..self.count)
            .map(|i| {
                let x = cx + rng.gen_range(-half..=half);
                let y = cy + rng.gen_range(-half..=half);
                let (lat, lon) = inverse_mercator(x, y);
                Antenna {
                    id: format!("a{i:0width$}"),
                    lat,
                    lon,
                }
            })
            .collect())
    }
}
