//! Graph file formats: JSON `{n, edges: [[i, j, w]], quantities?, coords?}`
//! and a CSV edge list with header `i,j,w`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::WeightedGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantities: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[f64; 2]>>,
    /// Full weight support, kept so levels survive a round trip even when
    /// some support values never occur on an edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<f64>>,
}

impl From<&WeightedGraph> for GraphFile {
    fn from(g: &WeightedGraph) -> Self {
        GraphFile {
            n: g.n(),
            edges: g.edges().iter().map(|e| (e.u as usize, e.v as usize, e.weight)).collect(),
            quantities: g.quantities().map(<[u32]>::to_vec),
            coords: g.coords().map(<[[f64; 2]]>::to_vec),
            support: Some(g.support().to_vec()),
        }
    }
}

impl TryFrom<GraphFile> for WeightedGraph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        let mut g = match file.support {
            Some(support) => {
                let mut levelled = Vec::with_capacity(file.edges.len());
                for &(i, j, w) in &file.edges {
                    let level = support
                        .iter()
                        .position(|s| *s == w)
                        .ok_or_else(|| Error::InvalidInput(format!("edge ({i}, {j}) weight {w} is not in the support")))?;
                    levelled.push((i, j, level as u16));
                }
                WeightedGraph::from_levels(file.n, levelled, support)?
            }
            None => WeightedGraph::from_weighted_edges(file.n, &file.edges)?,
        };
        if let Some(q) = file.quantities {
            g = g.with_quantities(q)?;
        }
        if let Some(c) = file.coords {
            g = g.with_coords(c)?;
        }
        Ok(g)
    }
}

impl WeightedGraph {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GraphFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        file.try_into()
    }

    /// CSV edge list; node count is inferred as `max id + 1` on reading, so
    /// trailing isolated nodes and per-node attributes are not carried.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["i", "j", "w"])?;
        for e in self.edges() {
            w.serialize((e.u, e.v, e.weight))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut edges = Vec::new();
        let mut n = 0;
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 3 fields (i,j,w), found {}", record.len()),
                });
            }
            let parse_id = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid node id {s:?}"),
                })
            };
            let (i, j) = (parse_id(&record[0])?, parse_id(&record[1])?);
            let w: f64 = record[2].parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid weight {:?}", &record[2]),
            })?;
            n = n.max(i + 1).max(j + 1);
            edges.push((i, j, w));
        }
        WeightedGraph::from_weighted_edges(n, &edges)
    }

    /// Reads `.csv` as an edge list and anything else as JSON.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if is_csv(path) {
            Self::from_csv(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = if is_csv(path) { self.to_csv()? } else { self.to_json()? };
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_attributes() {
        let g = WeightedGraph::from_levels(3, vec![(0, 1, 0), (1, 2, 2)], vec![1.0, 1.5, 2.0])
            .unwrap()
            .with_quantities(vec![1, 2, 1])
            .unwrap()
            .with_coords(vec![[0.0, 0.0], [1.0, 0.5], [2.0, -1.0]])
            .unwrap();
        let back = WeightedGraph::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_without_support_infers_it() {
        let g = WeightedGraph::from_json(r#"{"n":3,"edges":[[0,1,2.5],[1,2,1]]}"#).unwrap();
        assert_eq!(g.support(), &[1.0, 2.5]);
        assert_eq!(g.edges()[0].level, 1);
    }

    #[test]
    fn csv_round_trip() {
        let g = WeightedGraph::from_weighted_edges(4, &[(0, 1, 1.0), (2, 3, 0.25)]).unwrap();
        let back = WeightedGraph::from_csv(&g.to_csv().unwrap()).unwrap();
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn csv_errors_name_the_line() {
        let err = WeightedGraph::from_csv("i,j,w\n0,1,1\n1,x,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }
}
