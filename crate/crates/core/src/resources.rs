//! Basis lowering, greedy SWAP routing and depth / CNOT accounting.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;

use serde::Serialize;

use crate::ansatz::AnsatzSpec;
use crate::circuit::{hop_decomposition, rxxyy_decomposition, Angle, Circuit, Gate, GateKind};
use crate::error::{Result, VqeError};

/// Undirected qubit connectivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    n_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl CouplingMap {
    pub fn new(n_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n_qubits || b >= n_qubits {
                return Err(VqeError::Contract(format!(
                    "edge ({a}, {b}) invalid for {n_qubits} qubits"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self {
            n_qubits,
            edges: set,
        })
    }

    pub fn all_to_all(n_qubits: usize) -> Self {
        let edges = (0..n_qubits).flat_map(|a| (a + 1..n_qubits).map(move |b| (a, b)));
        Self::new(n_qubits, edges).expect("complete graph is valid")
    }

    pub fn linear(n_qubits: usize) -> Self {
        Self::new(n_qubits, (1..n_qubits).map(|b| (b - 1, b))).expect("chain is valid")
    }

    /// Edge list text: optional `qubits N` header, then `a b` per line; `#` comments.
    /// Without a header the register size is one past the largest index.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',' || c == '-')
                .filter(|s| !s.is_empty())
                .collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| VqeError::parse(line_no, format!("bad qubit index '{s}'")))
            };
            match f.as_slice() {
                ["qubits", n] => declared = Some(num(n)?),
                [a, b] => edges.push((num(a)?, num(b)?)),
                _ => return Err(VqeError::parse(line_no, "expected 'a b'")),
            }
        }
        let n =
            declared.unwrap_or_else(|| edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0));
        Self::new(n, edges)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn neighbours(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == q {
                Some(b)
            } else if b == q {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Shortest path `from → to` (inclusive), lowest-index neighbours first.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.n_qubits];
        let mut seen = vec![false; self.n_qubits];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(q) = queue.pop_front() {
            if q == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for nb in self.neighbours(q) {
                if !seen[nb] {
                    seen[nb] = true;
                    prev[nb] = q;
                    queue.push_back(nb);
                }
            }
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        self.n_qubits <= 1 || (1..self.n_qubits).all(|q| self.shortest_path(0, q).is_some())
    }
}

fn lower_one_qubit(g: Gate, out: &mut Vec<Gate>) {
    let q = g.targets()[0];
    match g.kind {
        GateKind::H => out.extend([
            Gate::rz(q, Angle::Fixed(FRAC_PI_2)),
            Gate::sx(q),
            Gate::rz(q, Angle::Fixed(FRAC_PI_2)),
        ]),
        GateKind::Ry => {
            let angle = g.angle.expect("Ry carries an angle");
            out.extend([
                Gate::sx(q),
                Gate::rz(q, angle.shifted(PI)),
                Gate::sx(q),
                Gate::rz(q, Angle::Fixed(PI)),
            ]);
        }
        _ => out.push(g),
    }
}

/// Rewrite over `{CNOT, Rz, SX, X}`; equal to the input up to global phase.
pub fn lower_to_basis(circuit: &Circuit) -> Result<Circuit> {
    let mut gates = Vec::new();
    for &g in circuit.gates() {
        let expanded = match g.kind {
            GateKind::Hop => hop_decomposition(g.targets()[0], g.targets()[1], angle_of(&g)?),
            GateKind::Rxxyy => rxxyy_decomposition(g.targets()[0], g.targets()[1], angle_of(&g)?),
            _ => vec![g],
        };
        for e in expanded {
            lower_one_qubit(e, &mut gates);
        }
    }
    Ok(Circuit::from_parts(
        circuit.n_qubits(),
        circuit.n_parameters(),
        gates,
    ))
}

fn angle_of(g: &Gate) -> Result<Angle> {
    g.angle
        .ok_or_else(|| VqeError::Contract(format!("{} without an angle", g.kind.name())))
}

/// Drop `Rz` gates whose fixed angle is a multiple of 2π.
pub fn remove_identity_rz(circuit: &Circuit) -> Circuit {
    let gates = circuit
        .gates()
        .iter()
        .filter(|g| match (g.kind, g.angle) {
            (GateKind::Rz, Some(Angle::Fixed(a))) => {
                let r = a.rem_euclid(TAU);
                r.min(TAU - r) > 1e-12
            }
            _ => true,
        })
        .copied()
        .collect();
    Circuit::from_parts(circuit.n_qubits(), circuit.n_parameters(), gates)
}

/// Output of [`route`]: the physical circuit and where each logical qubit ended up.
#[derive(Debug, Clone)]
pub struct RoutedCircuit {
    pub circuit: Circuit,
    /// `final_layout[logical] = physical` after the last gate; starts as the identity.
    pub final_layout: Vec<usize>,
    pub swaps: usize,
}

/// Greedy routing: before each non-adjacent two-qubit gate, walk its first qubit along a
/// shortest path with SWAPs (3 CNOTs each) until the pair is adjacent.
pub fn route(circuit: &Circuit, map: &CouplingMap) -> Result<RoutedCircuit> {
    if circuit.n_qubits() > map.n_qubits() {
        return Err(VqeError::Size(format!(
            "{}-qubit circuit on a {}-qubit coupling map",
            circuit.n_qubits(),
            map.n_qubits()
        )));
    }
    if !map.is_connected() {
        return Err(VqeError::Contract("coupling map is disconnected".into()));
    }
    let n = map.n_qubits();
    let mut layout: Vec<usize> = (0..n).collect(); // logical -> physical
    let mut inverse: Vec<usize> = (0..n).collect(); // physical -> logical
    let mut gates = Vec::new();
    let mut swaps = 0;
    for g in circuit.gates() {
        if g.is_two_qubit() {
            let (la, lb) = (g.targets()[0], g.targets()[1]);
            let path = map
                .shortest_path(layout[la], layout[lb])
                .expect("connected map");
            for w in path.windows(2).take(path.len().saturating_sub(2)) {
                let (x, y) = (w[0], w[1]);
                gates.extend([Gate::cnot(x, y), Gate::cnot(y, x), Gate::cnot(x, y)]);
                swaps += 1;
                let (lx, ly) = (inverse[x], inverse[y]);
                inverse.swap(x, y);
                layout[lx] = y;
                layout[ly] = x;
            }
        }
        gates.push(g.remapped(|q| layout[q]));
    }
    layout.truncate(circuit.n_qubits());
    Ok(RoutedCircuit {
        circuit: Circuit::from_parts(n, circuit.n_parameters(), gates),
        final_layout: layout,
        swaps,
    })
}

/// Longest path through the gate dependency DAG.
pub fn depth(circuit: &Circuit) -> usize {
    let mut level = vec![0usize; circuit.n_qubits()];
    for g in circuit.gates() {
        let l = 1 + g.targets().iter().map(|&q| level[q]).max().unwrap_or(0);
        for &q in g.targets() {
            level[q] = l;
        }
    }
    level.into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub family: String,
    pub parameters: usize,
    pub depth: usize,
    pub cnot_count: usize,
    pub total_gates: usize,
    pub swaps: usize,
}

/// Counts for an already lowered (and possibly routed) circuit.
pub fn report(label: &str, circuit: &Circuit) -> ResourceReport {
    ResourceReport {
        family: label.to_string(),
        parameters: circuit.n_parameters(),
        depth: depth(circuit),
        cnot_count: circuit.count(GateKind::Cnot),
        total_gates: circuit.len(),
        swaps: 0,
    }
}

/// Lower, drop identity rotations, route and count.
pub fn estimate_circuit(
    label: &str,
    circuit: &Circuit,
    map: &CouplingMap,
) -> Result<ResourceReport> {
    let lowered = remove_identity_rz(&lower_to_basis(circuit)?);
    let routed = route(&lowered, map)?;
    Ok(ResourceReport {
        swaps: routed.swaps,
        ..report(label, &routed.circuit)
    })
}

pub fn estimate(spec: &AnsatzSpec, map: &CouplingMap) -> Result<ResourceReport> {
    let label = if spec.family.is_hardware_efficient() {
        format!("{}(r={})", spec.family, spec.repetitions)
    } else {
        spec.family.to_string()
    };
    estimate_circuit(&label, &spec.build()?, map)
}
