//! CSV formats. Times, symbols and states are 1-based in files.
//!
//! * trajectories: `t,x,y` (discrete) or `t,x_1,…,x_d,y` (Euclidean);
//! * observation input: the same layout, the `y` column being optional;
//! * decoded paths: `t,v`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scorer::{Observation, ObservationSpace};
use crate::simulate::Trajectory;

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Schema(format!("CSV: {other:?}")),
    }
}

fn obs_header(space: ObservationSpace) -> Vec<String> {
    match space {
        ObservationSpace::Discrete { .. } => vec!["x".into()],
        ObservationSpace::Euclidean { dim } => (1..=dim).map(|k| format!("x_{k}")).collect(),
    }
}

fn obs_fields(o: &Observation) -> Vec<String> {
    match o {
        Observation::Symbol(s) => vec![(s + 1).to_string()],
        Observation::Point(p) => p.iter().map(|v| format!("{v:?}")).collect(),
    }
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, space: ObservationSpace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(obs_header(space));
    header.push("y".into());
    w.write_record(&header).map_err(csv_err)?;
    for (t, (o, y)) in traj.observations.iter().zip(&traj.hidden).enumerate() {
        let mut row = vec![(t + 1).to_string()];
        row.extend(obs_fields(o));
        row.push((y + 1).to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses one data row into an observation given the header layout.
#[derive(Clone, Debug)]
pub struct ObservationParser {
    space: ObservationSpace,
    columns: Vec<usize>,
}

impl ObservationParser {
    /// Locates the observation columns in `header`. A header without `t`
    /// whose first column is numeric is not accepted; headers are required.
    pub fn from_header(header: &[&str], space: ObservationSpace) -> Result<Self> {
        let want = obs_header(space);
        let mut columns = Vec::with_capacity(want.len());
        for name in &want {
            let alt = if matches!(space, ObservationSpace::Euclidean { dim: 1 }) { Some("x") } else { None };
            let pos = header
                .iter()
                .position(|h| h.trim() == name || Some(h.trim()) == alt)
                .ok_or_else(|| Error::Schema(format!("observation CSV lacks column '{name}'")))?;
            columns.push(pos);
        }
        Ok(ObservationParser { space, columns })
    }

    pub fn parse(&self, row: &[&str], line: usize) -> Result<Observation> {
        let field = |c: usize| -> Result<&str> {
            row.get(c)
                .map(|s| s.trim())
                .ok_or_else(|| Error::Schema(format!("line {line}: missing column {}", c + 1)))
        };
        match self.space {
            ObservationSpace::Discrete { .. } => {
                let s = field(self.columns[0])?;
                let v: usize = s
                    .parse()
                    .map_err(|_| Error::Schema(format!("line {line}: bad symbol '{s}'")))?;
                if v == 0 {
                    return Err(Error::Schema(format!("line {line}: symbols are 1-based")));
                }
                Ok(Observation::Symbol(v - 1))
            }
            ObservationSpace::Euclidean { .. } => self
                .columns
                .iter()
                .map(|&c| {
                    let s = field(c)?;
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Schema(format!("line {line}: bad coordinate '{s}'")))
                })
                .collect::<Result<Vec<f64>>>()
                .map(Observation::Point),
        }
    }
}

pub fn read_observations_csv<R: Read>(input: R, space: ObservationSpace) -> Result<Vec<Observation>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let parser = ObservationParser::from_header(&header, space)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row: Vec<&str> = rec.iter().collect();
        out.push(parser.parse(&row, i + 2)?);
    }
    Ok(out)
}

/// Writes `t,v` rows; `offset` is the 0-based time of `path[0]`.
pub fn write_path_csv<W: Write>(path: &[usize], offset: usize, header: bool, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(["t", "v"]).map_err(csv_err)?;
    }
    for (k, v) in path.iter().enumerate() {
        w.write_record([(offset + k + 1).to_string(), (v + 1).to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes serializable records with a header row taken from the field names.
pub fn write_records_csv<T: serde::Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical;
    use crate::scorer::Scorer;
    use crate::simulate::{simulate, Seed};

    #[test]
    fn trajectory_round_trips_through_csv() {
        for m in [canonical::two_state_pmm(), canonical::glm_scalar()] {
            let t = simulate(&m, 50, Seed(5)).unwrap();
            let mut buf = Vec::new();
            write_trajectory_csv(&t, m.observation_space(), &mut buf).unwrap();
            let back = read_observations_csv(&buf[..], m.observation_space()).unwrap();
            assert_eq!(back, t.observations);
        }
    }

    #[test]
    fn euclidean_header_has_d_columns() {
        let t = Trajectory {
            observations: vec![Observation::Point(vec![1.0, 2.5])],
            hidden: vec![0],
        };
        let mut buf = Vec::new();
        write_trajectory_csv(&t, ObservationSpace::Euclidean { dim: 2 }, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,x_1,x_2,y\n1,1.0,2.5,1\n");
    }

    #[test]
    fn symbol_zero_is_rejected() {
        let err = read_observations_csv("t,x\n1,0\n".as_bytes(), ObservationSpace::Discrete { symbols: 2 });
        assert!(err.is_err());
    }
}
