//! JSON channel files.
//!
//! ```json
//! { "d_in": 2, "d_out": 2, "gibbs_in": [0.5, 0.5], "gibbs_out": [0.5, 0.5],
//!   "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]] }
//! ```
//!
//! Matrices are row lists; each entry is an `[re, im]` pair. Exactly one of `kraus`
//! (a list of `d_out × d_in` matrices) or `choi` (`d_in·d_out` square, input factor first)
//! must be present.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::qmat::CMatrix;
use crate::thermo::ThermalState;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub d_in: usize,
    pub d_out: usize,
    pub gibbs_in: Vec<f64>,
    pub gibbs_out: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<JsonMatrix>,
}

/// A validated channel with its input and output Gibbs states.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    pub channel: QuantumChannel<f64>,
    pub gibbs_in: ThermalState<f64>,
    pub gibbs_out: ThermalState<f64>,
}

pub fn matrix_from_json(m: &JsonMatrix, rows: usize, cols: usize, what: &str) -> Result<CMatrix<f64>> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("{what} must be {rows}x{cols}")));
    }
    let data = m
        .iter()
        .flatten()
        .map(|&[re, im]| {
            if re.is_finite() && im.is_finite() {
                Ok(Complex64::new(re, im))
            } else {
                Err(Error::Parse(format!("{what} has a non-finite entry")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CMatrix::from_vec(rows, cols, data)
}

pub fn matrix_to_json(m: &CMatrix<f64>) -> JsonMatrix {
    m.data()
        .chunks(m.cols())
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn gibbs(pops: &[f64], dim: usize, what: &str) -> Result<ThermalState<f64>> {
    if pops.len() != dim {
        return Err(Error::Parse(format!("{what} has {} entries, expected {dim}", pops.len())));
    }
    ThermalState::from_f64(pops)
}

impl ChannelJson {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()? + "\n")?;
        Ok(())
    }

    pub fn from_channel(ch: &QuantumChannel<f64>, gibbs_in: &ThermalState<f64>, gibbs_out: &ThermalState<f64>) -> Self {
        let (kraus, choi) = match ch.kraus() {
            Some(ks) => (Some(ks.iter().map(matrix_to_json).collect()), None),
            None => (None, Some(matrix_to_json(ch.choi()))),
        };
        Self {
            d_in: ch.d_in(),
            d_out: ch.d_out(),
            gibbs_in: gibbs_in.populations().to_vec(),
            gibbs_out: gibbs_out.populations().to_vec(),
            kraus,
            choi,
        }
    }

    pub fn to_spec(&self) -> Result<ChannelSpec> {
        if self.d_in == 0 || self.d_out == 0 {
            return Err(Error::Parse("dimensions must be positive".into()));
        }
        let gibbs_in = gibbs(&self.gibbs_in, self.d_in, "gibbs_in")?;
        let gibbs_out = gibbs(&self.gibbs_out, self.d_out, "gibbs_out")?;
        let channel = match (&self.kraus, &self.choi) {
            (Some(ks), None) => {
                if ks.is_empty() {
                    return Err(Error::Parse("kraus list is empty".into()));
                }
                let ops = ks
                    .iter()
                    .enumerate()
                    .map(|(k, m)| matrix_from_json(m, self.d_out, self.d_in, &format!("kraus[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                QuantumChannel::from_kraus(ops)?
            }
            (None, Some(j)) => {
                let n = self.d_in * self.d_out;
                QuantumChannel::from_choi(self.d_in, self.d_out, matrix_from_json(j, n, n, "choi")?)?
            }
            _ => return Err(Error::Parse("exactly one of 'kraus' or 'choi' is required".into())),
        };
        Ok(ChannelSpec {
            channel,
            gibbs_in,
            gibbs_out,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<S: Serialize>(path: impl AsRef<Path>, value: &S) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_gamma, make_identity};

    const IDENTITY: &str = r#"{"d_in":2,"d_out":2,"gibbs_in":[0.5,0.5],"gibbs_out":[0.5,0.5],
        "kraus":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;

    #[test]
    fn parses_identity() {
        let spec = ChannelJson::parse(IDENTITY).unwrap().to_spec().unwrap();
        assert!(spec.channel.choi_distance(&make_identity(2)) < 1e-12);
    }

    #[test]
    fn round_trips_kraus_and_choi() {
        let g = ThermalState::from_f64(&[0.75, 0.25]).unwrap();
        let ch = make_gamma(&g, 2);
        let j = ChannelJson::from_channel(&ch, &g, &g);
        let back = ChannelJson::parse(&j.to_json_string().unwrap()).unwrap();
        assert_eq!(back, j);
        assert!(back.to_spec().unwrap().channel.choi_distance(&ch) < 1e-12);

        let choi_only = ChannelJson {
            kraus: None,
            choi: Some(matrix_to_json(ch.choi())),
            ..j
        };
        assert!(choi_only.to_spec().unwrap().channel.choi_distance(&ch) < 1e-12);
    }

    #[test]
    fn rejects_malformed() {
        let cases = [
            IDENTITY.replace("[0.5,0.5],\n", "[0.6,0.5],\n"),
            IDENTITY.replace("\"gibbs_in\":[0.5,0.5]", "\"gibbs_in\":[1.0,0.0]"),
            IDENTITY.replace("\"d_out\":2", "\"d_out\":3"),
            IDENTITY.replace("[[1,0],[0,0]],[[0,0],[1,0]]", "[[0.5,0],[0,0]],[[0,0],[0.5,0]]"),
            IDENTITY.replace("\"kraus\"", "\"krause\""),
            "{".to_string(),
        ];
        for c in &cases {
            assert!(ChannelJson::parse(c).and_then(|j| j.to_spec()).is_err(), "{c}");
        }
    }
}
