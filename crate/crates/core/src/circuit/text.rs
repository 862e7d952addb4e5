//! Line-oriented circuit format: a `CIRCUIT` header, one `HERALD` line per
//! herald site, then one op per line as `NAME key=value ...`. Lists are
//! comma-separated and floats use the shortest exact decimal form, so
//! `from_text(to_text(c)) == c`.

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use super::{Basis, CircuitOp, HeraldSite, SyndromeCircuit};
use crate::code::{CheckKind, EdgePauli};
use crate::noise::{PauliChannel1, PauliChannel2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn list<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn kind_name(k: CheckKind) -> &'static str {
    match k {
        CheckKind::X => "X",
        CheckKind::Z => "Z",
        CheckKind::Mixed => "M",
    }
}

fn pauli_name(p: EdgePauli) -> &'static str {
    match p {
        EdgePauli::X => "X",
        EdgePauli::Y => "Y",
        EdgePauli::Z => "Z",
    }
}

impl SyndromeCircuit {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "CIRCUIT qubits={} distance={} rounds={} basis={} records={}",
            self.qubit_count, self.distance, self.rounds, self.basis, self.record_count
        );
        for (id, h) in self.herald_sites.iter().enumerate() {
            let _ = writeln!(
                s,
                "HERALD id={id} p={} data={} check={} round={} layer={}",
                h.p_fail, h.data, h.check, h.round, h.layer
            );
        }
        for op in &self.ops {
            let _ = match op {
                CircuitOp::ResetZ(q) => writeln!(s, "RESET q={q}"),
                CircuitOp::Hadamard(q) => writeln!(s, "H q={q}"),
                CircuitOp::HadamardYZ(q) => writeln!(s, "HYZ q={q}"),
                CircuitOp::Tick => writeln!(s, "TICK"),
                CircuitOp::RusCz { data, check, pauli, herald } => {
                    writeln!(s, "RUSCZ data={data} check={check} pauli={} herald={herald}", pauli_name(*pauli))
                }
                CircuitOp::PauliNoise1 { qubit, channel } => {
                    writeln!(s, "NOISE1 q={qubit} probs={}", list(&channel.probs()))
                }
                CircuitOp::PauliNoise2 { a, b, channel, herald } => {
                    let h = herald.map_or("-".to_string(), |h| h.to_string());
                    writeln!(s, "NOISE2 a={a} b={b} herald={h} probs={}", list(channel.probs()))
                }
                CircuitOp::MeasureZ { qubit, record } => writeln!(s, "MEASURE q={qubit} record={record}"),
                CircuitOp::Detector { records, coords, family } => writeln!(
                    s,
                    "DETECTOR family={} coords={} records={}",
                    kind_name(*family),
                    list(coords),
                    list(records)
                ),
                CircuitOp::ObservableInclude { records } => writeln!(s, "OBSERVABLE records={}", list(records)),
            };
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SyndromeCircuit, ParseError> {
        let mut header: Option<(usize, usize, usize, Basis, usize)> = None;
        let mut heralds: Vec<HeraldSite> = Vec::new();
        let mut ops = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ParseError { line, message };
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let mut parts = raw.split_whitespace();
            let name = parts.next().expect("nonempty line");
            let mut kv = BTreeMap::new();
            for p in parts {
                let (k, v) = p.split_once('=').ok_or_else(|| err(format!("expected key=value, got {p:?}")))?;
                kv.insert(k, v);
            }
            let get = |k: &str| kv.get(k).copied().ok_or_else(|| err(format!("{name} needs {k}=")));
            let num = |k: &str| -> Result<usize, ParseError> {
                get(k)?.parse().map_err(|_| err(format!("{k} is not an integer")))
            };
            let floats = |k: &str| -> Result<Vec<f64>, ParseError> {
                get(k)?
                    .split(',')
                    .map(|v| v.parse::<f64>().map_err(|_| err(format!("bad number {v:?}"))))
                    .collect()
            };
            let ints = |k: &str| -> Result<Vec<usize>, ParseError> {
                let v = get(k)?;
                if v.is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',').map(|x| x.parse().map_err(|_| err(format!("bad index {x:?}")))).collect()
            };
            match name {
                "CIRCUIT" => {
                    let basis = get("basis")?.parse().map_err(|e: super::CircuitError| err(e.to_string()))?;
                    header = Some((num("qubits")?, num("distance")?, num("rounds")?, basis, num("records")?));
                }
                "HERALD" => {
                    if num("id")? != heralds.len() {
                        return Err(err("herald ids must be consecutive from 0".into()));
                    }
                    let p = get("p")?.parse().map_err(|_| err("bad p".into()))?;
                    heralds.push(HeraldSite {
                        p_fail: p,
                        data: num("data")?,
                        check: num("check")?,
                        round: num("round")?,
                        layer: num("layer")?,
                    });
                }
                "RESET" => ops.push(CircuitOp::ResetZ(num("q")?)),
                "H" => ops.push(CircuitOp::Hadamard(num("q")?)),
                "HYZ" => ops.push(CircuitOp::HadamardYZ(num("q")?)),
                "TICK" => ops.push(CircuitOp::Tick),
                "RUSCZ" => {
                    let pauli = match get("pauli")? {
                        "X" => EdgePauli::X,
                        "Y" => EdgePauli::Y,
                        "Z" => EdgePauli::Z,
                        p => return Err(err(format!("bad pauli {p:?}"))),
                    };
                    ops.push(CircuitOp::RusCz { data: num("data")?, check: num("check")?, pauli, herald: num("herald")? });
                }
                "NOISE1" => {
                    let p = floats("probs")?;
                    if p.len() != 4 {
                        return Err(err("NOISE1 needs 4 probabilities".into()));
                    }
                    let channel = PauliChannel1::new(p[0], p[1], p[2], p[3]).map_err(|e| err(e.to_string()))?;
                    ops.push(CircuitOp::PauliNoise1 { qubit: num("q")?, channel });
                }
                "NOISE2" => {
                    let p: [f64; 16] =
                        floats("probs")?.try_into().map_err(|_| err("NOISE2 needs 16 probabilities".into()))?;
                    let channel = PauliChannel2::new(p).map_err(|e| err(e.to_string()))?;
                    let herald = match get("herald")? {
                        "-" => None,
                        _ => Some(num("herald")?),
                    };
                    ops.push(CircuitOp::PauliNoise2 { a: num("a")?, b: num("b")?, channel, herald });
                }
                "MEASURE" => ops.push(CircuitOp::MeasureZ { qubit: num("q")?, record: num("record")? }),
                "DETECTOR" => {
                    let family = match get("family")? {
                        "X" => CheckKind::X,
                        "Z" => CheckKind::Z,
                        "M" => CheckKind::Mixed,
                        f => return Err(err(format!("bad family {f:?}"))),
                    };
                    let c: Vec<i32> = get("coords")?
                        .split(',')
                        .map(|v| v.parse().map_err(|_| err(format!("bad coordinate {v:?}"))))
                        .collect::<Result<_, _>>()?;
                    let coords: [i32; 3] = c.try_into().map_err(|_| err("coords needs 3 values".into()))?;
                    ops.push(CircuitOp::Detector { records: ints("records")?, coords, family });
                }
                "OBSERVABLE" => ops.push(CircuitOp::ObservableInclude { records: ints("records")? }),
                other => return Err(err(format!("unknown op {other:?}"))),
            }
        }
        let (qubit_count, distance, rounds, basis, record_count) =
            header.ok_or(ParseError { line: 0, message: "missing CIRCUIT header".into() })?;
        let mut c = SyndromeCircuit {
            ops,
            qubit_count,
            distance,
            rounds,
            basis,
            herald_sites: heralds,
            record_count,
            detectors: Vec::new(),
            observable: Vec::new(),
        };
        c.index_annotations();
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use crate::circuit::{build_memory_experiment, Basis, NoiseParams, SyndromeCircuit};

    #[test]
    fn round_trip() {
        let noise = NoiseParams { p_fail: 0.1, distinguishability: 0.03, t_rus_over_t2: 0.007, t_rus_over_t1: 0.0 };
        for basis in [Basis::Z, Basis::X] {
            let c = build_memory_experiment(3, basis, 2, &noise).unwrap();
            let text = c.to_text();
            assert_eq!(SyndromeCircuit::from_text(&text).unwrap(), c);
        }
    }

    #[test]
    fn golden_prefix() {
        let c = build_memory_experiment(3, Basis::Z, 1, &NoiseParams::noiseless()).unwrap();
        let text = c.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "CIRCUIT qubits=17 distance=3 rounds=1 basis=Z records=17");
        assert_eq!(lines[1], "HERALD id=0 p=0 data=0 check=9 round=0 layer=1");
        let layer = text.split("TICK\n").nth(1).unwrap();
        assert!(layer.starts_with("H q=3\n"));
        assert!(layer.contains("RUSCZ data=0 check=9 pauli=Z herald=0\nNOISE2 a=0 b=9 herald=0 probs=1,0,0"));
        assert!(layer.contains("RUSCZ data=3 check=10 pauli=X herald=1\nNOISE2 a=3 b=10 herald=1 probs=1,"));
        assert_eq!(layer.matches("H q=3\n").count(), 2);
        assert!(text.ends_with("OBSERVABLE records=8,11,14\n"));
    }

    #[test]
    fn reports_bad_lines() {
        let e = SyndromeCircuit::from_text("CIRCUIT qubits=1 distance=1 rounds=1 basis=Z records=0\nFOO q=1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = SyndromeCircuit::from_text("NOISE1 q=0 probs=0.5,0.5\n").unwrap_err();
        assert!(e.message.contains("4 probabilities"));
    }
}
