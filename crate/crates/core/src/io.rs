//! JSON formats for operators, decompositions and channels.
//!
//! Operators: `{"dim": n, "entries": [[re, im], ...]}` row-major with `n²`
//! entries. Decompositions: `{"dims": [n₁, ..., n_K]}`. Channels:
//! `{"dim": n, "kraus": [[[re, im], ...], ...]}`. Floats are written in the
//! shortest form that parses back to the identical double.

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::{make_density, Decomposition, DensityOperator, Operator, PureStateEnsemble};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionJson {
    dims: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    dim: usize,
    kraus: Vec<Vec<[f64; 2]>>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn entries_to_matrix(dim: usize, entries: &[[f64; 2]]) -> Result<CMat> {
    if entries.len() != dim * dim {
        return Err(Error::Parse(format!(
            "expected {} entries for dim {dim}, found {}",
            dim * dim,
            entries.len()
        )));
    }
    let data: Vec<_> = entries.iter().map(|[re, im]| linalg::c(*re, *im)).collect();
    Ok(CMat::from_row_slice(dim, dim, &data))
}

fn matrix_to_entries(m: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<CMat> {
    let j: OperatorJson = serde_json::from_str(text).map_err(parse_err)?;
    entries_to_matrix(j.dim, &j.entries)
}

pub fn parse_operator(text: &str) -> Result<Operator> {
    Operator::new(parse_matrix(text)?)
}

pub fn parse_density(text: &str) -> Result<DensityOperator> {
    make_density(parse_matrix(text)?)
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition> {
    let j: DecompositionJson = serde_json::from_str(text).map_err(parse_err)?;
    Decomposition::new(j.dims)
}

/// Comma-separated block sizes, e.g. `2,3`.
pub fn parse_dims(text: &str) -> Result<Decomposition> {
    let dims = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad block size {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new(dims)
}

pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    let j: ChannelJson = serde_json::from_str(text).map_err(parse_err)?;
    let kraus = j
        .kraus
        .iter()
        .map(|e| entries_to_matrix(j.dim, e))
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(kraus)
}

pub fn matrix_to_json(m: &CMat) -> String {
    assert_eq!(m.nrows(), m.ncols(), "operators are square");
    serde_json::to_string(&OperatorJson {
        dim: m.nrows(),
        entries: matrix_to_entries(m),
    })
    .expect("finite floats serialize")
}

pub fn matrix_to_value(m: &CMat) -> serde_json::Value {
    serde_json::to_value(OperatorJson {
        dim: m.nrows(),
        entries: matrix_to_entries(m),
    })
    .expect("finite floats serialize")
}

/// `{"weights": [...], "vectors": [[[re, im], ...], ...]}`.
pub fn ensemble_to_value(e: &PureStateEnsemble) -> serde_json::Value {
    let vectors: Vec<Vec<[f64; 2]>> = e
        .vectors
        .iter()
        .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
        .collect();
    serde_json::json!({ "weights": e.weights, "vectors": vectors })
}

pub fn decomposition_to_json(l: &Decomposition) -> String {
    serde_json::to_string(&DecompositionJson { dims: l.dims().to_vec() }).expect("serializable")
}

pub fn channel_to_json(phi: &KrausChannel) -> String {
    serde_json::to_string(&ChannelJson {
        dim: phi.dim(),
        kraus: phi.kraus().iter().map(matrix_to_entries).collect(),
    })
    .expect("finite floats serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn state_round_trip_is_bit_exact() {
        let mut g = random::rng(1, 0);
        for n in 1..6 {
            let rho = random::random_state(&mut g, n);
            let back = parse_matrix(&matrix_to_json(rho.matrix())).unwrap();
            assert_eq!(&back, rho.matrix());
        }
    }

    #[test]
    fn channel_round_trip() {
        let mut g = random::rng(2, 0);
        let phi = crate::channels::random_channel(&mut g, 3, 2);
        let back = parse_channel(&channel_to_json(&phi)).unwrap();
        assert_eq!(back.kraus(), phi.kraus());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_matrix("{\"dim\": 2, \"entries\": [[1,0]]}"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("{not json"), Err(Error::Parse(_))));
        assert!(matches!(parse_dims("1,x"), Err(Error::Parse(_))));
        assert_eq!(parse_dims("2, 3").unwrap().dims(), &[2, 3]);
        assert_eq!(parse_decomposition("{\"dims\":[1,1]}").unwrap().dims(), &[1, 1]);
        let plus = "{\"dim\":2,\"entries\":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}";
        assert!(parse_density(plus).is_ok());
    }
}
