use crate::code::{CheckKind, EdgePauli, TannerEdge, TannerGraph};

use super::CircuitError;

/// Position of a data qubit relative to its check (north is smaller row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    NW,
    NE,
    SW,
    SE,
}

impl Direction {
    fn from_offset(dr: i32, dc: i32) -> Option<Direction> {
        match (dr, dc) {
            (-1, -1) => Some(Direction::NW),
            (-1, 1) => Some(Direction::NE),
            (1, -1) => Some(Direction::SW),
            (1, 1) => Some(Direction::SE),
            _ => None,
        }
    }
}

const X_ORDER: [Direction; 4] = [Direction::SW, Direction::NW, Direction::SE, Direction::NE];
const Z_ORDER: [Direction; 4] = [Direction::SW, Direction::SE, Direction::NW, Direction::NE];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleLayer {
    /// 1-based position in the round.
    pub index: usize,
    pub edges: Vec<TannerEdge>,
}

/// Split the Tanner edges into four vertex-disjoint CZ layers.
pub fn cz_schedule(g: &TannerGraph) -> Result<Vec<ScheduleLayer>, CircuitError> {
    let mut layers: Vec<ScheduleLayer> = (1..=4).map(|index| ScheduleLayer { index, edges: Vec::new() }).collect();
    for e in g.edges() {
        let (dc, cc) = match (g.coord(e.data), g.coord(e.check)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(CircuitError::MissingCoordinates(e.data)),
        };
        let dir = Direction::from_offset(dc.row - cc.row, dc.col - cc.col)
            .ok_or(CircuitError::AmbiguousDirection { data: e.data, check: e.check })?;
        let order = match (g.check_kind(e.check), e.pauli) {
            (Some(CheckKind::X), _) | (_, EdgePauli::X) => &X_ORDER,
            _ => &Z_ORDER,
        };
        let slot = order.iter().position(|&d| d == dir).expect("every direction is scheduled");
        layers[slot].edges.push(*e);
    }
    for layer in &layers {
        let mut seen = std::collections::BTreeSet::new();
        for e in &layer.edges {
            if !seen.insert(e.data) || !seen.insert(e.check) {
                return Err(CircuitError::LayerOverlap { layer: layer.index, qubit: e.data.max(e.check) });
            }
        }
    }
    Ok(layers)
}
