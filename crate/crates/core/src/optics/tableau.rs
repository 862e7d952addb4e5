use std::fmt;

use super::detection::{emitted_pair, table1_column, Correction, DetectionPattern};
use super::fock::mode;
use super::Interferometer;
use crate::pauli::Pauli;
use crate::quantum::{c, cz, identity, max_abs_diff, pauli_matrix, CMatrix, ZERO};

/// Pauli string over qubits ordered (qe1, qe2, ph1, ph2) or a prefix of them,
/// with a sign.
fn pauli_string(sign: i32, labels: &str) -> CMatrix {
    let m = labels.chars().fold(CMatrix::identity(1, 1), |acc, ch| {
        let p = match ch {
            'I' => Pauli::I,
            'X' => Pauli::X,
            'Y' => Pauli::Y,
            'Z' => Pauli::Z,
            _ => panic!("bad Pauli label {ch}"),
        };
        acc.kronecker(&pauli_matrix(p))
    });
    m * c(f64::from(sign))
}

fn sign(m: u8) -> i32 {
    if m == 0 {
        1
    } else {
        -1
    }
}

/// Two emissions as an isometry from the spins into (qe1, qe2, ph1, ph2):
/// `|a b⟩ ↦ |a b a b⟩`.
fn emission_pair() -> CMatrix {
    let mut e = CMatrix::zeros(16, 4);
    for a in 0..2 {
        for b in 0..2 {
            e[(8 * a + 4 * b + 2 * a + b, 2 * a + b)] = c(1.0);
        }
    }
    e
}

/// `(I_spins ⊗ ⟨χ|) E` for a two-photon state `χ`.
fn project_photons(chi: &CMatrix) -> CMatrix {
    let bra = chi.adjoint();
    identity(4).kronecker(&bra) * emission_pair()
}

/// Photon-qubit state `χ` (rails of photon a, photon b) selected by each
/// success pattern, read off the Fock model: `⟨k l| U |r_a r_b⟩ = conj χ(r_a r_b)`.
fn success_projections() -> Vec<(DetectionPattern, Correction, CMatrix)> {
    let out = emitted_pair(0.0)
        .expect("valid D")
        .apply_interferometer(&Interferometer::rus());
    let input = out.spin_input();
    [(0u8, 2u8), (1, 3), (0, 3), (1, 2)]
        .into_iter()
        .map(|(k, l)| {
            let pattern = DetectionPattern::Pair(k, l);
            let (_, correction, _) = table1_column(pattern, 1.0, 1.0);
            let mut key = vec![mode(k, 0), mode(l, 0)];
            key.sort_unstable();
            let mut chi = CMatrix::zeros(4, 1);
            for s in 0..4u8 {
                let amp = out.fock_branch(s).get(&key).copied().unwrap_or(ZERO) / input[s as usize];
                chi[(s as usize, 0)] = amp.conj();
            }
            let n = chi.norm();
            (pattern, correction, chi / c(n))
        })
        .collect()
}

/// Distance of `a` from the ray through `b`, relative to `‖b‖`.
fn proportional_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap = (b.adjoint() * a).trace() / (b.adjoint() * b).trace();
    let scaled = b * overlap;
    if overlap.norm() < 1e-12 {
        return f64::INFINITY;
    }
    max_abs_diff(&(a / overlap), &(&scaled / overlap))
}

/// `P_out W = W P_in`: a state stabilised by `P_in` leaves stabilised by `P_out`.
fn maps(w: &CMatrix, p_in: &CMatrix, p_out: &CMatrix) -> f64 {
    max_abs_diff(&(p_out * w), &(w * p_in))
}

#[derive(Debug, Clone)]
pub struct TableauReport {
    pub checks: Vec<(String, f64)>,
}

impl TableauReport {
    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|(_, d)| *d).fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

impl fmt::Display for TableauReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, d) in &self.checks {
            writeln!(f, "{name:<48} {d:.1e}")?;
        }
        write!(f, "max deviation {:.2e}", self.max_deviation())
    }
}

/// Check the stabilizer-tableau description of emission, repeat and success
/// at the level of spin and photon qubits. Success outcomes use the photon
/// projections of the Fock model and the corrections of the gate table.
pub fn tableau_check() -> TableauReport {
    let mut checks = Vec::new();
    let e = emission_pair();

    for (p_in, p_out) in [("XI", "XIXI"), ("IX", "IXIX"), ("ZI", "ZIII"), ("IZ", "IZII")] {
        checks.push((
            format!("emission {p_in} -> {p_out}"),
            maps(&e, &pauli_string(1, p_in), &pauli_string(1, p_out)),
        ));
    }
    for stab in ["ZIZI", "IZIZ"] {
        checks.push((format!("emission stabilizer {stab}"), max_abs_diff(&(pauli_string(1, stab) * &e), &e)));
    }
    let single = {
        let mut m = CMatrix::zeros(4, 2);
        m[(0, 0)] = c(1.0);
        m[(3, 1)] = c(1.0);
        m
    };
    let zero = CMatrix::from_column_slice(2, 1, &[c(1.0), ZERO]);
    let out = &single * &zero;
    let z_qe = pauli_string(1, "ZI");
    checks.push(("emission from |0> keeps Z_qe".into(), max_abs_diff(&(&z_qe * &out), &out)));

    let h = std::f64::consts::FRAC_1_SQRT_2;
    for m in 0..2u8 {
        let x = CMatrix::from_column_slice(2, 1, &[c(h), c(h * f64::from(sign(m)))]);
        let w = project_photons(&x.kronecker(&x));
        let s = sign(m);
        for (p_in, p_out, sg) in [("XI", "XI", s), ("IX", "IX", s), ("ZI", "ZI", 1), ("IZ", "IZ", 1)] {
            checks.push((
                format!("repeat m1={m} {p_in} -> {}{p_out}", if sg < 0 { "-" } else { "+" }),
                maps(&w, &pauli_string(1, p_in), &pauli_string(sg, p_out)),
            ));
        }
        let corr = if m == 1 { pauli_string(1, "ZZ") } else { identity(4) };
        checks.push((format!("repeat m1={m} corrected to identity"), proportional_deviation(&(corr * &w), &identity(4))));
    }

    let detected = success_projections();
    for (pattern, correction, chi) in detected {
        let m2 = u8::from(correction == Correction::SaDagSb);
        let w = project_photons(&chi);
        let s = sign(m2);
        let tag = format!("success {pattern} (m2={m2})");
        for (p_in, p_out, sg) in [("XI", "YZ", -s), ("IX", "ZY", s), ("ZI", "ZI", 1), ("IZ", "IZ", 1)] {
            checks.push((
                format!("{tag} {p_in} -> {}{p_out}", if sg < 0 { "-" } else { "+" }),
                maps(&w, &pauli_string(1, p_in), &pauli_string(sg, p_out)),
            ));
        }
        // The detected photon pair is a joint XX, ZY eigenstate.
        for stab in ["XX", "ZY"] {
            let p = pauli_string(1, stab);
            let ev = (chi.adjoint() * &p * &chi)[(0, 0)];
            checks.push((format!("{tag} photons {stab} eigenstate"), max_abs_diff(&(&p * &chi), &(&chi * ev))));
        }
        let fixed = correction.matrix() * &w;
        checks.push((format!("{tag} corrected to CZ"), proportional_deviation(&fixed, &cz())));
    }
    TableauReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_tableau_rows_hold() {
        let r = tableau_check();
        assert!(r.passed(1e-12), "{r}");
        assert_eq!(r.checks.len(), 7 + 2 * 5 + 4 * 7);
    }

    #[test]
    fn wrong_sign_is_detected() {
        let x = CMatrix::from_column_slice(2, 1, &[c(0.5f64.sqrt()), c(-(0.5f64.sqrt()))]);
        let w = project_photons(&x.kronecker(&x));
        assert!(maps(&w, &pauli_string(1, "XI"), &pauli_string(1, "XI")) > 0.1);
    }
}
