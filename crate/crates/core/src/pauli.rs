use std::fmt;

use serde::{Deserialize, Serialize};

/// Single-qubit Pauli, phases dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn from_index(i: usize) -> Pauli {
        match i & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    /// (x, z) symplectic bits.
    pub const fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub const fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product up to phase.
    pub const fn mul(self, other: Pauli) -> Pauli {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        Pauli::from_bits(ax ^ bx, az ^ bz)
    }

    pub const fn is_identity(self) -> bool {
        matches!(self, Pauli::I)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Two-qubit Pauli `a ⊗ b`; the index is `4·a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pauli2 {
    pub a: Pauli,
    pub b: Pauli,
}

impl Pauli2 {
    pub const fn new(a: Pauli, b: Pauli) -> Self {
        Self { a, b }
    }

    pub const fn index(self) -> usize {
        4 * self.a.index() + self.b.index()
    }

    pub const fn from_index(i: usize) -> Self {
        Self { a: Pauli::from_index(i >> 2), b: Pauli::from_index(i) }
    }

    pub const fn mul(self, other: Pauli2) -> Pauli2 {
        Pauli2 { a: self.a.mul(other.a), b: self.b.mul(other.b) }
    }

    pub fn all() -> impl Iterator<Item = Pauli2> {
        (0..16).map(Pauli2::from_index)
    }
}

impl fmt::Display for Pauli2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_table() {
        assert_eq!(Pauli::X.mul(Pauli::Z), Pauli::Y);
        assert_eq!(Pauli::Y.mul(Pauli::Y), Pauli::I);
        for p in Pauli::ALL {
            assert_eq!(Pauli::from_index(p.index()), p);
            let (x, z) = p.bits();
            assert_eq!(Pauli::from_bits(x, z), p);
        }
    }

    #[test]
    fn two_qubit_index() {
        for i in 0..16 {
            assert_eq!(Pauli2::from_index(i).index(), i);
        }
        assert_eq!(Pauli2::new(Pauli::Z, Pauli::I).to_string(), "ZI");
    }
}
