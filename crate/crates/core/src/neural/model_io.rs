//! Text model format:
//!
//! ```text
//! PSWM-MODEL v1
//! 2 4 1
//! <one line per weight-matrix row, space separated>
//! ```
//!
//! Rows run source unit ascending with the bias row last, matrices in layer
//! order. Values use Rust's shortest round-trip float formatting, so a
//! save/load cycle reproduces every weight bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::Network;
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &str = "PSWM-MODEL v1";

pub fn encode_model(net: &Network) -> String {
    let mut out = String::new();
    out.push_str(MODEL_MAGIC);
    out.push('\n');
    let sizes: Vec<String> = net.layer_sizes().iter().map(usize::to_string).collect();
    out.push_str(&sizes.join(" "));
    out.push('\n');
    for w in net.weights() {
        for row in w.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v:?}").expect("writing to a String");
            }
            out.push('\n');
        }
    }
    out
}

pub fn decode_model(text: &str) -> Result<Network> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != MODEL_MAGIC {
        return Err(Error::Version {
            expected: MODEL_MAGIC.to_owned(),
            found: header.to_owned(),
        });
    }

    let size_line = lines
        .next()
        .ok_or_else(|| Error::data("model file truncated before layer sizes"))?;
    let sizes: Vec<usize> = size_line
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::data(format!("bad layer size line `{size_line}`")))?;
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::data(format!("bad layer size line `{size_line}`")));
    }

    let mut weights = Vec::with_capacity(sizes.len() - 1);
    for (l, pair) in sizes.windows(2).enumerate() {
        let (rows, cols) = (pair[0] + 1, pair[1]);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines.next().ok_or_else(|| {
                Error::data(format!("model file truncated in matrix {l}, row {r}"))
            })?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::data(format!("matrix {l}, row {r}: unparsable value")))?;
            if row.len() != cols {
                return Err(Error::data(format!(
                    "matrix {l}, row {r}: {} values, expected {cols}",
                    row.len()
                )));
            }
            if !row.iter().all(|v| v.is_finite()) {
                return Err(Error::data(format!(
                    "matrix {l}, row {r}: non-finite weight"
                )));
            }
            data.extend(row);
        }
        weights.push(Array2::from_shape_vec((rows, cols), data).expect("row lengths checked"));
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::data(
            "model file has more rows than its layer sizes allow",
        ));
    }

    Network::from_weights(&sizes, weights).map_err(|e| Error::data(e.to_string()))
}

pub fn save_model(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_model(net)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_model(&text)
}
