//! Nodal analysis with the ideal op-amp as a nullor: its inputs sit at the
//! same voltage and draw no current, and its output current is free, so the
//! KCL row at the output node is replaced by `V(+) - V(-) = 0`.
//!
//! Each KCL row is multiplied by the product of the distinct resistor values
//! meeting at the node, which keeps every entry a polynomial in `s`. The
//! system is solved by Cramer's rule with fraction-free (Bareiss)
//! determinants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::netlist::{ComponentKind, Netlist};
use super::CircuitError;
use crate::algebra::{ParamPoly, SPoly, TransferFunction};

#[derive(Clone, Debug, PartialEq)]
pub enum EliminationStep {
    /// Rows `k` and `with` exchanged to find a nonzero pivot.
    Swap { k: usize, with: usize },
    /// Column `k` eliminated below the diagonal using `pivot`.
    Pivot { k: usize, pivot: SPoly },
}

/// Everything needed to redo the derivation by hand or by [`replay`].
///
/// [`replay`]: DerivationTrace::replay
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationTrace {
    /// Unknown node voltages, in column order.
    pub unknowns: Vec<String>,
    /// One line per row: the equation as written, then after clearing
    /// denominators.
    pub equations: Vec<String>,
    pub matrix: Vec<Vec<SPoly>>,
    /// Right-hand side for `V_in = 1`.
    pub rhs: Vec<SPoly>,
    pub output_column: usize,
    pub den_steps: Vec<EliminationStep>,
    pub num_steps: Vec<EliminationStep>,
    /// Common factors divided out of `det(A_out) / det(A)`, in order.
    pub cancelled: Vec<SPoly>,
}

impl DerivationTrace {
    /// Recomputes the transfer function from the recorded system, following
    /// the recorded row exchanges and cancellations. `None` if any recorded
    /// step does not apply.
    pub fn replay(&self) -> Option<TransferFunction> {
        let den = bareiss(self.matrix.clone(), Some(&self.den_steps))?.0;
        let num = bareiss(
            replace_column(&self.matrix, self.output_column, &self.rhs),
            Some(&self.num_steps),
        )?
        .0;
        let mut tf = TransferFunction::new(num, den).ok()?;
        for f in &self.cancelled {
            tf = tf.cancel_factor(f)?;
        }
        Some(tf.remove_content())
    }
}

impl fmt::Display for DerivationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "unknowns: {}",
            self.unknowns
                .iter()
                .map(|n| format!("V({n})"))
                .collect::<Vec<_>>()
                .join(", ")
        )?;
        for e in &self.equations {
            writeln!(f, "{e}")?;
        }
        for (label, steps) in [("det(A)", &self.den_steps), ("det(A_out)", &self.num_steps)] {
            writeln!(f, "{label}:")?;
            for s in steps.iter() {
                match s {
                    EliminationStep::Swap { k, with } => writeln!(f, "  swap rows {k} and {with}")?,
                    EliminationStep::Pivot { k, pivot } => writeln!(f, "  eliminate column {k} with pivot {pivot}")?,
                }
            }
        }
        for c in &self.cancelled {
            writeln!(f, "cancel ({c})")?;
        }
        Ok(())
    }
}

fn replace_column(m: &[Vec<SPoly>], col: usize, v: &[SPoly]) -> Vec<Vec<SPoly>> {
    m.iter()
        .zip(v)
        .map(|(row, x)| {
            let mut row = row.clone();
            row[col] = x.clone();
            row
        })
        .collect()
}

/// Determinant by fraction-free elimination. With `plan`, row exchanges are
/// taken from it instead of searched for.
fn bareiss(mut m: Vec<Vec<SPoly>>, plan: Option<&[EliminationStep]>) -> Option<(SPoly, Vec<EliminationStep>)> {
    let n = m.len();
    let mut steps = Vec::new();
    let mut planned = plan.map(|p| p.iter());
    let mut negate = false;
    let mut prev = SPoly::one();
    for k in 0..n {
        let swap = match planned.as_mut() {
            Some(it) => match it.next()? {
                EliminationStep::Swap { k: sk, with } if *sk == k => {
                    let with = *with;
                    match it.next()? {
                        EliminationStep::Pivot { k: pk, .. } if *pk == k => {}
                        _ => return None,
                    }
                    Some(with)
                }
                EliminationStep::Pivot { k: pk, .. } if *pk == k => None,
                _ => return None,
            },
            None if m[k][k].is_zero() => match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => Some(i),
                None => return Some((SPoly::zero(), steps)),
            },
            None => None,
        };
        if let Some(i) = swap {
            m.swap(k, i);
            negate = !negate;
            steps.push(EliminationStep::Swap { k, with: i });
        }
        if m[k][k].is_zero() {
            return if plan.is_some() {
                None
            } else {
                Some((SPoly::zero(), steps))
            };
        }
        steps.push(EliminationStep::Pivot {
            k,
            pivot: m[k][k].clone(),
        });
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev).expect("Bareiss quotients are exact");
            }
            m[i][k] = SPoly::zero();
        }
        prev = m[k][k].clone();
    }
    if let Some(mut it) = planned {
        if it.next().is_some() {
            return None;
        }
    }
    let det = if n == 0 { SPoly::one() } else { m[n - 1][n - 1].clone() };
    Some((if negate { -&det } else { det }, steps))
}

fn voltage(node: &str) -> String {
    format!("V({node})")
}

/// `V_out / V_in` of the netlist, with the derivation.
pub fn netlist_tf(net: &Netlist) -> Result<(TransferFunction, DerivationTrace), CircuitError> {
    let ground = net.ground();
    let input = net.input();
    if net.output() == ground {
        return Err(CircuitError::UnsupportedTopology("output is the ground node".into()));
    }
    let mut driven = BTreeSet::new();
    for c in net.components().iter().filter(|c| c.kind == ComponentKind::OpAmp) {
        let out = c.nodes[2].as_str();
        if out == ground || out == input {
            return Err(CircuitError::UnsupportedTopology(format!(
                "op-amp `{}` drives a source node",
                c.name
            )));
        }
        if !driven.insert(out) {
            return Err(CircuitError::UnsupportedTopology(format!(
                "node `{out}` is driven by two op-amps"
            )));
        }
    }
    let unknowns: Vec<String> = net
        .nodes()
        .into_iter()
        .filter(|n| *n != ground && *n != input)
        .map(str::to_string)
        .collect();
    let col: BTreeMap<&str, usize> = unknowns.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let width = unknowns.len();
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    let mut equations = Vec::new();

    // Adds `coef * V(node)` to the left-hand side of a row.
    let place = |row: &mut Vec<SPoly>, b: &mut SPoly, node: &str, coef: &SPoly| {
        if let Some(&j) = col.get(node) {
            row[j] = &row[j] + coef;
        } else if node == input {
            *b = &*b - coef;
        }
    };

    for node in unknowns.iter().filter(|n| !driven.contains(n.as_str())) {
        let incident: Vec<_> = net
            .components()
            .iter()
            .filter(|c| c.kind != ComponentKind::OpAmp && c.nodes.contains(node))
            .collect();
        let mut resistors: Vec<&ParamPoly> = Vec::new();
        for c in incident.iter().filter(|c| c.kind == ComponentKind::Resistor) {
            let v = c.value.as_ref().expect("passive value");
            if !resistors.contains(&v) {
                resistors.push(v);
            }
        }
        let multiplier = resistors.iter().fold(ParamPoly::one(), |acc, r| &acc * *r);
        let mut row = vec![SPoly::zero(); width];
        let mut b = SPoly::zero();
        let mut written = Vec::new();
        for c in &incident {
            let other = if c.nodes[0] == *node { &c.nodes[1] } else { &c.nodes[0] };
            if other == node {
                continue;
            }
            let value = c.value.as_ref().expect("passive value");
            let (y, shown) = match c.kind {
                ComponentKind::Resistor => (
                    SPoly::constant(multiplier.div_exact(value).expect("multiplier contains every resistor")),
                    format!("({} - {})/{}", voltage(node), voltage(other), c.name),
                ),
                _ => (
                    SPoly::monomial(&multiplier * value, 1),
                    format!("{}*s*({} - {})", c.name, voltage(node), voltage(other)),
                ),
            };
            written.push(shown);
            place(&mut row, &mut b, node, &y);
            place(&mut row, &mut b, other, &-&y);
        }
        equations.push(format!("KCL at {node}: {} = 0", written.join(" + ")));
        equations.push(format!(
            "  times {}: {}",
            multiplier,
            render_row(&row, &unknowns, &b, input)
        ));
        matrix.push(row);
        rhs.push(b);
    }
    for c in net.components().iter().filter(|c| c.kind == ComponentKind::OpAmp) {
        let mut row = vec![SPoly::zero(); width];
        let mut b = SPoly::zero();
        place(&mut row, &mut b, &c.nodes[0], &SPoly::one());
        place(&mut row, &mut b, &c.nodes[1], &-&SPoly::one());
        equations.push(format!(
            "op-amp {}: {} - {} = 0 (virtual short, KCL at {} dropped)",
            c.name,
            voltage(&c.nodes[0]),
            voltage(&c.nodes[1]),
            c.nodes[2]
        ));
        matrix.push(row);
        rhs.push(b);
    }
    if matrix.len() != width {
        return Err(CircuitError::UnsupportedTopology(format!(
            "{} equations for {} unknown node voltages",
            matrix.len(),
            width
        )));
    }
    let output_column = col[net.output()];
    let (den, den_steps) = bareiss(matrix.clone(), None).expect("unplanned elimination always completes");
    if den.is_zero() {
        return Err(CircuitError::SingularCircuit);
    }
    let (num, num_steps) =
        bareiss(replace_column(&matrix, output_column, &rhs), None).expect("unplanned elimination always completes");
    let mut tf = TransferFunction::new(num, den)?;
    let mut cancelled = Vec::new();
    let mut candidates: Vec<SPoly> = vec![SPoly::s()];
    for c in net.components() {
        if let Some(v) = &c.value {
            let f = SPoly::constant(v.clone());
            if !v.is_constant() && !candidates.contains(&f) {
                candidates.push(f);
            }
        }
    }
    for f in &candidates {
        while let Some(reduced) = tf.cancel_factor(f) {
            tf = reduced;
            cancelled.push(f.clone());
        }
    }
    let tf = tf.remove_content();
    let trace = DerivationTrace {
        unknowns,
        equations,
        matrix,
        rhs,
        output_column,
        den_steps,
        num_steps,
        cancelled,
    };
    Ok((tf, trace))
}

fn render_row(row: &[SPoly], unknowns: &[String], b: &SPoly, input: &str) -> String {
    let mut terms: Vec<String> = row
        .iter()
        .zip(unknowns)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| format!("({c})*{}", voltage(n)))
        .collect();
    if terms.is_empty() {
        terms.push("0".into());
    }
    format!("{} = ({b})*{}", terms.join(" + "), voltage(input))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_tf;
    use crate::circuits::parse_netlist;

    fn tf_of(text: &str) -> (TransferFunction, DerivationTrace) {
        netlist_tf(&parse_netlist(text).unwrap()).unwrap()
    }

    fn assert_tf(text: &str, want: &str) {
        let (tf, trace) = tf_of(text);
        assert!(tf.equals(&parse_tf(want).unwrap()), "got {tf}, want {want}\n{trace}");
        let replayed = trace.replay().expect("trace replays");
        assert_eq!(replayed, tf);
    }

    #[test]
    fn passive_low_pass() {
        assert_tf("R R in out R\nC C out gnd C\nVIN in\nVOUT out", "1/(R*C*s + 1)");
        let (tf, _) = tf_of("R R in out R\nC C out gnd C\nVIN in\nVOUT out");
        assert_eq!(tf.to_string(), "1/(C*R*s + 1)");
    }

    #[test]
    fn inverting_amplifier() {
        assert_tf(
            "R R1 in a R1\nR R2 a out R2\nOPAMP U gnd a out\nVIN in\nVOUT out",
            "-R2/R1",
        );
    }

    #[test]
    fn pid_matches_closed_form() {
        assert_tf(
            "R R1 in a R1\nC C1 in a C1\nR R2 a b R2\nC C2 b out C2\nOPAMP U gnd a out\nVIN in\nVOUT out",
            "-(R1*C1*R2*C2*s^2 + (R2*C2 + R1*C1)*s + 1)/(R1*C2*s)",
        );
    }

    #[test]
    fn equal_resistors_share_multiplier() {
        assert_tf("R R1 in a R\nR R2 a gnd R\nVIN in\nVOUT a", "1/2");
    }

    #[test]
    fn singular_and_unsupported() {
        // the output node floats behind a capacitor-free open op-amp loop
        let net = parse_netlist("R R1 in a 1\nOPAMP U a a out\nR R2 out gnd 1\nVIN in\nVOUT out").unwrap();
        assert_eq!(netlist_tf(&net).unwrap_err(), CircuitError::SingularCircuit);
        let net = parse_netlist("R R1 in a 1\nOPAMP U gnd a in\nR R2 a gnd 1\nVIN in\nVOUT a").unwrap();
        assert!(matches!(netlist_tf(&net), Err(CircuitError::UnsupportedTopology(_))));
    }

    #[test]
    fn corrupted_trace_does_not_replay() {
        let (_, mut trace) = tf_of("R R1 in a R1\nR R2 a out R2\nOPAMP U gnd a out\nVIN in\nVOUT out");
        trace.den_steps.clear();
        assert!(trace.replay().is_none());
    }
}
