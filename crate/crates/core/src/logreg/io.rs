//! Versioned text format for [`LogRegModel`].
//!
//! ```text
//! toxbias-model 1
//! dimension <D>
//! bias <f64>
//! learning_rate <f64>
//! ...
//! weights <nnz>
//! <index>\t<value>
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so reading back is exact.

use std::io::{BufRead, Write};

use super::{AdamHyper, LogRegError, LogRegModel, TrainConfig};
use crate::tfidf::{LineReader, TfidfError};

const MODEL_MAGIC: &str = "toxbias-model";
const MODEL_VERSION: u32 = 1;

fn format_err(e: TfidfError) -> LogRegError {
    match e {
        TfidfError::Format { line, message } => LogRegError::Format { line, message },
        other => LogRegError::Io(other.to_string()),
    }
}

impl LogRegModel {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), LogRegError> {
        let io = |e: std::io::Error| LogRegError::Io(e.to_string());
        let c = &self.trained_config;
        let nnz = self.weights.iter().filter(|v| **v != 0.0).count();
        write!(
            w,
            "{MODEL_MAGIC} {MODEL_VERSION}\n\
             dimension {}\n\
             bias {}\n\
             learning_rate {}\n\
             batch_size {}\n\
             epochs {}\n\
             class_weights {}\n\
             seed {}\n\
             adam_beta1 {}\n\
             adam_beta2 {}\n\
             adam_epsilon {}\n\
             optimizer {}\n\
             l2 {}\n\
             weights {nnz}\n",
            self.weights.len(),
            self.bias,
            c.learning_rate,
            c.batch_size,
            c.epochs,
            c.class_weights,
            c.seed,
            c.adam.beta1,
            c.adam.beta2,
            c.adam.epsilon,
            c.optimizer,
            c.l2,
        )
        .map_err(io)?;
        for (i, v) in self.weights.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            writeln!(w, "{i}\t{v}").map_err(io)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: &mut R) -> Result<Self, LogRegError> {
        let mut lines = LineReader::new(r);
        let header = lines.next_line().map_err(format_err)?;
        if header != format!("{MODEL_MAGIC} {MODEL_VERSION}") {
            return Err(format_err(
                lines.err(format!("unexpected header `{header}`")),
            ));
        }
        let dimension: usize = lines.keyed("dimension").map_err(format_err)?;
        let bias: f64 = lines.keyed("bias").map_err(format_err)?;
        let learning_rate = lines.keyed("learning_rate").map_err(format_err)?;
        let batch_size = lines.keyed("batch_size").map_err(format_err)?;
        let epochs = lines.keyed("epochs").map_err(format_err)?;
        let class_weights = lines.keyed("class_weights").map_err(format_err)?;
        let seed = lines.keyed("seed").map_err(format_err)?;
        let adam = AdamHyper {
            beta1: lines.keyed("adam_beta1").map_err(format_err)?,
            beta2: lines.keyed("adam_beta2").map_err(format_err)?,
            epsilon: lines.keyed("adam_epsilon").map_err(format_err)?,
        };
        let optimizer = lines.keyed("optimizer").map_err(format_err)?;
        let l2 = lines.keyed("l2").map_err(format_err)?;
        let nnz: usize = lines.keyed("weights").map_err(format_err)?;
        let trained_config = TrainConfig {
            learning_rate,
            batch_size,
            epochs,
            class_weights,
            seed,
            adam,
            optimizer,
            l2,
        };
        let mut weights = vec![0.0; dimension];
        for _ in 0..nnz {
            let line = lines.next_line().map_err(format_err)?;
            let parsed = line
                .split_once('\t')
                .and_then(|(i, v)| Some((i.parse::<usize>().ok()?, v.parse::<f64>().ok()?)));
            match parsed {
                Some((i, v)) if i < dimension && v.is_finite() => weights[i] = v,
                _ => return Err(format_err(lines.err(format!("bad weight line `{line}`")))),
            }
        }
        if !bias.is_finite() {
            return Err(format_err(lines.err("non-finite bias".into())));
        }
        Ok(Self {
            weights,
            bias,
            trained_config,
        })
    }
}
