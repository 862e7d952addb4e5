//! Photon-level model of one RUS trial: spin-controlled emission into dual
//! rails, per-emitter loss, the four-mode interferometer and number-resolving
//! detection.

mod detection;
mod fock;
mod tableau;

use num_complex::Complex64;
use thiserror::Error;

use crate::quantum::{c, max_abs_diff, CMatrix, I};

pub use detection::{
    detection_distribution, distinguishability_channel, distinguishability_distribution, emitted_pair,
    table1_column, verify_table1, ConditionalMap, Correction, DetectionDistribution, DetectionPattern,
    SuccessChannel, Table1Report, Table1Row, TargetGate,
};
pub use fock::{Emitter, InternalState, JointState, MODES};
pub use tableau::{tableau_check, TableauReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("{name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },
    #[error("dual rail starting at mode {0} is already occupied")]
    OccupiedMode(u8),
    #[error("interferometer matrix is not unitary")]
    NotUnitary,
}

/// Linear-optical network on the four interferometer modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferometer {
    matrix: CMatrix,
}

impl Interferometer {
    pub fn new(matrix: CMatrix) -> Result<Self, OpticsError> {
        if matrix.shape() != (MODES, MODES) {
            return Err(OpticsError::NotUnitary);
        }
        let gram = &matrix * matrix.adjoint();
        if max_abs_diff(&gram, &CMatrix::identity(MODES, MODES)) > 1e-12 {
            return Err(OpticsError::NotUnitary);
        }
        Ok(Self { matrix })
    }

    /// The RUS gate network.
    pub fn rus() -> Self {
        let one = c(0.5);
        let i: Complex64 = I * 0.5;
        #[rustfmt::skip]
        let m = CMatrix::from_row_slice(4, 4, &[
            one,  one,  one,  one,
            one,  one, -one, -one,
            one, -one,   -i,    i,
            one, -one,    i,   -i,
        ]);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Every oracle comparison in one place: the gate table over a grid of
/// transmissions, the tableau rows, and the distinguishability channel.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub table1: Vec<Table1Report>,
    pub tableau: TableauReport,
    /// `(D, largest deviation over the four success patterns)`.
    pub distinguishability: Vec<(f64, f64)>,
}

impl OracleReport {
    pub fn max_deviation(&self) -> f64 {
        self.table1
            .iter()
            .map(Table1Report::max_deviation)
            .chain([self.tableau.max_deviation()])
            .chain(self.distinguishability.iter().map(|x| x.1))
            .fold(0.0, f64::max)
    }
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for t in &self.table1 {
            writeln!(f, "{t}\n")?;
        }
        writeln!(f, "{}\n", self.tableau)?;
        for (d, dev) in &self.distinguishability {
            writeln!(f, "distinguishability D = {d}: max deviation {dev:.2e}")?;
        }
        write!(f, "overall max deviation {:.2e}", self.max_deviation())
    }
}

pub fn oracle_report() -> Result<OracleReport, OpticsError> {
    let etas = [(1.0, 1.0), (0.9, 0.9), (0.7, 0.9), (0.5, 0.2)];
    let table1 = etas.iter().map(|&(a, b)| verify_table1(a, b)).collect::<Result<_, _>>()?;
    let distinguishability = [0.0, 0.3, 1.0]
        .iter()
        .map(|&d| {
            let dev = distinguishability_distribution(d)?
                .iter()
                .map(|sc| {
                    let channel = sc.channel.max_abs_diff(&distinguishability_channel(d, sc.correction));
                    channel.max((sc.probability - 0.125).abs())
                })
                .fold(0.0, f64::max);
            Ok((d, dev))
        })
        .collect::<Result<_, OpticsError>>()?;
    Ok(OracleReport { table1, tableau: tableau_check(), distinguishability })
}
