//! Discrete memoryless channels `(Ω₁, r(y|x), Ω₂)`.
//!
//! A [`Channel`] is a row-stochastic matrix whose rows are indexed by input
//! symbols. Zero entries inside a row are kept (erasure channels need them);
//! output columns that are zero for every input are dropped on ingestion,
//! since such symbols never occur and removing them leaves the capacity
//! unchanged.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{kl_divergence_slices, Distribution, JointDistribution, NORMALIZATION_SLACK};

const EXACT_SLACK: f64 = 1e-12;

/// Serialized layout of a channel file.
#[derive(Debug, Serialize, Deserialize)]
struct ChannelFile {
    matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output_labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelFormat {
    Json,
    Csv,
}

/// Standard channel families with known capacities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    /// Binary symmetric channel with crossover probability `p`.
    Bsc(f64),
    /// Binary erasure channel with erasure probability `ε`; the middle output
    /// is the erasure symbol.
    Bec(f64),
    /// Z-channel: input 0 is noiseless, input 1 flips to 0 with probability `p`.
    Z(f64),
    /// Input `x` lands on `x` or `x + 1 mod n` with probability 1/2 each.
    NoisyTypewriter(usize),
    Identity(usize),
    /// `n` inputs, `m` outputs, every row uniform.
    UniformRows(usize, usize),
}

/// Notes produced while ingesting a channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestWarning {
    /// Output column (original index) was zero for every input and was removed.
    DroppedZeroColumn(usize),
}

impl std::fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IngestWarning::DroppedZeroColumn(col) => {
                write!(f, "output column {col} is zero for every input and was dropped")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    matrix: Vec<f64>,
    input_labels: Option<Vec<String>>,
    output_labels: Option<Vec<String>>,
}

impl Channel {
    /// Validates rows and drops all-zero output columns, logging a warning
    /// for each one.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let (channel, warnings) = Self::from_rows_with_report(rows, None, None)?;
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(channel)
    }

    pub fn from_rows_with_report(
        rows: &[Vec<f64>],
        input_labels: Option<Vec<String>>,
        output_labels: Option<Vec<String>>,
    ) -> Result<(Self, Vec<IngestWarning>)> {
        let inputs = rows.len();
        let outputs = rows.first().map(Vec::len).ok_or(Error::Empty)?;
        if outputs == 0 {
            return Err(Error::Empty);
        }
        let mut matrix = Vec::with_capacity(inputs * outputs);
        for (row_index, row) in rows.iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::DimensionMismatch {
                    expected: outputs,
                    found: row.len(),
                });
            }
            let mut sum = 0.0;
            for (col, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        index: row_index * outputs + col,
                        value,
                    });
                }
                if value < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: row_index,
                        col,
                        value,
                    });
                }
                sum += value;
            }
            let deviation = sum - 1.0;
            if deviation.abs() > NORMALIZATION_SLACK {
                return Err(Error::RowNotStochastic {
                    row: row_index,
                    deviation,
                });
            }
            if deviation.abs() > EXACT_SLACK {
                matrix.extend(row.iter().map(|v| v / sum));
            } else {
                matrix.extend_from_slice(row);
            }
        }
        if let Some(labels) = &input_labels {
            if labels.len() != inputs {
                return Err(Error::DimensionMismatch {
                    expected: inputs,
                    found: labels.len(),
                });
            }
        }
        if let Some(labels) = &output_labels {
            if labels.len() != outputs {
                return Err(Error::DimensionMismatch {
                    expected: outputs,
                    found: labels.len(),
                });
            }
        }

        let keep: Vec<usize> = (0..outputs)
            .filter(|&y| (0..inputs).any(|x| matrix[x * outputs + y] > 0.0))
            .collect();
        let warnings: Vec<IngestWarning> = (0..outputs)
            .filter(|y| !keep.contains(y))
            .map(IngestWarning::DroppedZeroColumn)
            .collect();
        let (matrix, output_labels) = if warnings.is_empty() {
            (matrix, output_labels)
        } else {
            let mut reduced = Vec::with_capacity(inputs * keep.len());
            for x in 0..inputs {
                reduced.extend(keep.iter().map(|&y| matrix[x * outputs + y]));
            }
            let labels = output_labels.map(|l| keep.iter().map(|&y| l[y].clone()).collect());
            (reduced, labels)
        };

        Ok((
            Self {
                inputs,
                outputs: keep.len(),
                matrix,
                input_labels,
                output_labels,
            },
            warnings,
        ))
    }

    pub fn canonical(kind: ChannelKind) -> Result<Self> {
        let unit = |name: &'static str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(p)
            } else {
                Err(Error::ParameterOutOfRange { name, value: p })
            }
        };
        let rows: Vec<Vec<f64>> = match kind {
            ChannelKind::Bsc(p) => {
                let p = unit("p", p)?;
                vec![vec![1.0 - p, p], vec![p, 1.0 - p]]
            }
            ChannelKind::Bec(e) => {
                let e = unit("epsilon", e)?;
                vec![vec![1.0 - e, e, 0.0], vec![0.0, e, 1.0 - e]]
            }
            ChannelKind::Z(p) => {
                let p = unit("p", p)?;
                vec![vec![1.0, 0.0], vec![p, 1.0 - p]]
            }
            ChannelKind::NoisyTypewriter(n) => {
                if n < 2 {
                    return Err(Error::ParameterOutOfRange {
                        name: "n",
                        value: n as f64,
                    });
                }
                (0..n)
                    .map(|x| {
                        let mut row = vec![0.0; n];
                        row[x] = 0.5;
                        row[(x + 1) % n] = 0.5;
                        row
                    })
                    .collect()
            }
            ChannelKind::Identity(n) => {
                if n == 0 {
                    return Err(Error::ParameterOutOfRange { name: "n", value: 0.0 });
                }
                (0..n)
                    .map(|x| {
                        let mut row = vec![0.0; n];
                        row[x] = 1.0;
                        row
                    })
                    .collect()
            }
            ChannelKind::UniformRows(n, m) => {
                if n == 0 || m == 0 {
                    let value = if n == 0 { n } else { m };
                    return Err(Error::ParameterOutOfRange {
                        name: if n == 0 { "n" } else { "m" },
                        value: value as f64,
                    });
                }
                vec![vec![1.0 / m as f64; m]; n]
            }
        };
        Self::from_rows_with_report(&rows, None, None).map(|(ch, _)| ch)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// Conditional distribution `r(·|x)`.
    pub fn row(&self, x: usize) -> &[f64] {
        &self.matrix[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.matrix.chunks_exact(self.outputs)
    }

    pub fn input_labels(&self) -> Option<&[String]> {
        self.input_labels.as_deref()
    }

    pub fn output_labels(&self) -> Option<&[String]> {
        self.output_labels.as_deref()
    }

    fn check_input(&self, q: &Distribution) -> Result<()> {
        if q.len() != self.inputs {
            return Err(Error::DimensionMismatch {
                expected: self.inputs,
                found: q.len(),
            });
        }
        Ok(())
    }

    /// The point `q(x)·r(y|x)` of the channel manifold.
    pub fn joint(&self, q: &Distribution) -> Result<JointDistribution> {
        self.check_input(q)?;
        let mut weights = Vec::with_capacity(self.matrix.len());
        for (row, &qx) in self.rows().zip(q.weights()) {
            weights.extend(row.iter().map(|&r| qx * r));
        }
        Ok(JointDistribution::from_vec_unchecked(
            self.inputs,
            self.outputs,
            weights,
        ))
    }

    /// `r_q(y) = Σ_x q(x)·r(y|x)`.
    pub fn output_marginal(&self, q: &Distribution) -> Result<Distribution> {
        self.check_input(q)?;
        let mut r = vec![0.0; self.outputs];
        for (row, &qx) in self.rows().zip(q.weights()) {
            for (acc, &v) in r.iter_mut().zip(row) {
                *acc += qx * v;
            }
        }
        Ok(Distribution::from_vec_unchecked(r))
    }

    /// Per-input divergences `D(r(·|x) || r)`.
    pub fn divergences_to(&self, r: &Distribution) -> Result<Vec<f64>> {
        if r.len() != self.outputs {
            return Err(Error::DimensionMismatch {
                expected: self.outputs,
                found: r.len(),
            });
        }
        self.rows()
            .map(|row| kl_divergence_slices(row, r.weights()))
            .collect()
    }

    /// Per-input divergences where an infinite value is reported as `+inf`
    /// instead of an error.
    pub(crate) fn divergences_to_extended(&self, r: &Distribution) -> Vec<f64> {
        self.rows()
            .map(|row| kl_divergence_slices(row, r.weights()).unwrap_or(f64::INFINITY))
            .collect()
    }

    fn to_file(&self) -> ChannelFile {
        ChannelFile {
            matrix: self.rows().map(<[f64]>::to_vec).collect(),
            input_labels: self.input_labels.clone(),
            output_labels: self.output_labels.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("channel serialization cannot fail")
    }

    pub fn save_json<W: Write>(&self, mut writer: W) -> Result<()> {
        writer.write_all(self.to_json().as_bytes())?;
        writer.write_all(b"\n")?;
        Ok(())
    }
}

/// Reads and validates a channel, returning the ingestion warnings.
pub fn load_channel_with_warnings<R: Read>(
    mut source: R,
    format: ChannelFormat,
) -> Result<(Channel, Vec<IngestWarning>)> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match format {
        ChannelFormat::Json => {
            let file: ChannelFile =
                serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            Channel::from_rows_with_report(&file.matrix, file.input_labels, file.output_labels)
        }
        ChannelFormat::Csv => {
            let rows = parse_csv_rows(&text)?;
            Channel::from_rows_with_report(&rows, None, None)
        }
    }
}

/// Reads and validates a channel; ingestion warnings go to the logger.
pub fn load_channel<R: Read>(source: R, format: ChannelFormat) -> Result<Channel> {
    let (channel, warnings) = load_channel_with_warnings(source, format)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(channel)
}

fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(line_no, line)| {
            line.split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("line {}: {:?}: {e}", line_no + 1, field.trim()))
                    })
                })
                .collect()
        })
        .collect()
}
