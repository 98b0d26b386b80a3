//! User location records for the caching case study.
//!
//! CSV layout: header `user_id,x,y[,floor]`, coordinates in metres. When the
//! floor column is present, only users on the same floor can be linked.

use std::fs;
use std::path::Path;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationRecord {
    pub user_id: String,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<i64>,
}

pub fn parse_locations(text: &str) -> Result<Vec<LocationRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    let has_floor = match names.as_slice() {
        ["user_id", "x", "y"] => false,
        ["user_id", "x", "y", "floor"] => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header user_id,x,y[,floor], found {}", names.join(",")),
            })
        }
    };
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != names.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", names.len(), record.len()),
            });
        }
        let coord = |idx: usize| -> Result<f64> {
            record[idx]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("invalid {} coordinate {:?}", names[idx], &record[idx]),
                })
        };
        let floor = if has_floor {
            Some(record[3].parse::<i64>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid floor {:?}", &record[3]),
            })?)
        } else {
            None
        };
        if record[0].is_empty() {
            return Err(Error::Parse { line, message: "empty user_id".into() });
        }
        out.push(LocationRecord {
            user_id: record[0].to_string(),
            x: coord(1)?,
            y: coord(2)?,
            floor,
        });
    }
    Ok(out)
}

pub fn read_locations(path: impl AsRef<Path>) -> Result<Vec<LocationRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_locations(&text)
}

pub fn write_locations(records: &[LocationRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let with_floor = records.iter().any(|r| r.floor.is_some());
    if with_floor {
        w.write_record(["user_id", "x", "y", "floor"])?;
    } else {
        w.write_record(["user_id", "x", "y"])?;
    }
    for r in records {
        let mut row = vec![r.user_id.clone(), r.x.to_string(), r.y.to_string()];
        if with_floor {
            row.push(r.floor.unwrap_or(0).to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Footprint of the synthetic building, metres.
pub const SYNTHETIC_WIDTH: f64 = 80.0;
pub const SYNTHETIC_DEPTH: f64 = 40.0;

/// Synthetic stand-in for an indoor positioning snapshot: `users` people over
/// `floors` floors of an 80 m x 40 m building. Per floor, 70% of users
/// cluster around six hotspots (rooms, sd 5 m) and the rest spread uniformly.
pub fn synthetic_locations(users: usize, floors: usize, seed: u64) -> Vec<LocationRecord> {
    let floors = floors.max(1);
    let mut rng = rng_from_seed(seed);
    let hotspots: Vec<Vec<[f64; 2]>> = (0..floors)
        .map(|_| {
            (0..6)
                .map(|_| {
                    [
                        rng.random_range(5.0..SYNTHETIC_WIDTH - 5.0),
                        rng.random_range(5.0..SYNTHETIC_DEPTH - 5.0),
                    ]
                })
                .collect()
        })
        .collect();
    let spread = Normal::new(0.0, 5.0).expect("positive sd");
    (0..users)
        .map(|u| {
            let floor = u % floors;
            let (x, y) = if rng.random::<f64>() < 0.7 {
                let h = hotspots[floor][rng.random_range(0..6)];
                (
                    (h[0] + spread.sample(&mut rng)).clamp(0.0, SYNTHETIC_WIDTH),
                    (h[1] + spread.sample(&mut rng)).clamp(0.0, SYNTHETIC_DEPTH),
                )
            } else {
                (rng.random_range(0.0..SYNTHETIC_WIDTH), rng.random_range(0.0..SYNTHETIC_DEPTH))
            };
            LocationRecord {
                user_id: format!("u{u}"),
                x,
                y,
                floor: Some(floor as i64),
            }
        })
        .collect()
}
