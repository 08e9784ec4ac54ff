//! Netlist text format.
//!
//! ```text
//! # comment
//! R <name> <n1> <n2> <value>
//! C <name> <n1> <n2> <value>
//! OPAMP <name> <n+> <n-> <nout>
//! VIN <node>
//! VOUT <node>
//! GND <node>
//! ```
//!
//! Values are decimal literals (read exactly) or parameter expressions such
//! as `R1` or `2*R`. The ground node is `gnd` unless a `GND` line renames it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;

use super::{CircuitError, SyntaxKind};
use crate::algebra::{parse_param_poly, ParamPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Resistor,
    Capacitor,
    OpAmp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub kind: ComponentKind,
    pub name: String,
    /// Two terminals for R and C; `in+`, `in-`, `out` for an op-amp.
    pub nodes: Vec<String>,
    /// Ohms or farads; `None` for an op-amp.
    pub value: Option<ParamPoly>,
}

impl Component {
    pub fn resistor(name: &str, a: &str, b: &str, value: ParamPoly) -> Self {
        Component::passive(ComponentKind::Resistor, name, a, b, value)
    }

    pub fn capacitor(name: &str, a: &str, b: &str, value: ParamPoly) -> Self {
        Component::passive(ComponentKind::Capacitor, name, a, b, value)
    }

    pub fn opamp(name: &str, plus: &str, minus: &str, out: &str) -> Self {
        Component {
            kind: ComponentKind::OpAmp,
            name: name.to_string(),
            nodes: vec![plus.to_string(), minus.to_string(), out.to_string()],
            value: None,
        }
    }

    fn passive(kind: ComponentKind, name: &str, a: &str, b: &str, value: ParamPoly) -> Self {
        Component {
            kind,
            name: name.to_string(),
            nodes: vec![a.to_string(), b.to_string()],
            value: Some(value),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Netlist {
    components: Vec<Component>,
    input: String,
    output: String,
    ground: String,
}

impl Netlist {
    /// Checks names, component values and connectivity.
    pub fn new(components: Vec<Component>, input: &str, output: &str, ground: &str) -> Result<Self, CircuitError> {
        let mut names = BTreeSet::new();
        for c in &components {
            if !names.insert(c.name.as_str()) {
                return Err(CircuitError::DuplicateName(c.name.clone()));
            }
            if let Some(v) = &c.value {
                let non_positive = v.is_zero() || v.as_constant().is_some_and(|c| !c.is_positive());
                if non_positive {
                    return Err(CircuitError::NonPositiveComponent {
                        name: c.name.clone(),
                        value: v.to_string(),
                    });
                }
            }
        }
        let net = Netlist {
            components,
            input: input.to_string(),
            output: output.to_string(),
            ground: ground.to_string(),
        };
        net.check_connected()?;
        Ok(net)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn input(&self) -> &str {
        &self.input
    }

    pub fn output(&self) -> &str {
        &self.output
    }

    pub fn ground(&self) -> &str {
        &self.ground
    }

    /// Every node name, in ascending order.
    pub fn nodes(&self) -> BTreeSet<&str> {
        self.components
            .iter()
            .flat_map(|c| c.nodes.iter().map(String::as_str))
            .collect()
    }

    fn check_connected(&self) -> Result<(), CircuitError> {
        let nodes = self.nodes();
        if !nodes.contains(self.ground.as_str()) {
            return Err(CircuitError::MissingGround(self.ground.clone()));
        }
        for port in [&self.input, &self.output] {
            if !nodes.contains(port.as_str()) {
                return Err(CircuitError::DisconnectedGraph(port.clone()));
            }
        }
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for c in &self.components {
            for a in &c.nodes {
                for b in &c.nodes {
                    adj.entry(a).or_default().push(b);
                }
            }
        }
        let mut seen = BTreeSet::from([self.ground.as_str()]);
        let mut stack = vec![self.ground.as_str()];
        while let Some(n) = stack.pop() {
            for &m in &adj[n] {
                if seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        match nodes.iter().find(|n| !seen.contains(*n)) {
            Some(n) => Err(CircuitError::DisconnectedGraph(n.to_string())),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.components {
            let tag = match c.kind {
                ComponentKind::Resistor => "R",
                ComponentKind::Capacitor => "C",
                ComponentKind::OpAmp => "OPAMP",
            };
            write!(f, "{tag} {} {}", c.name, c.nodes.join(" "))?;
            if let Some(v) = &c.value {
                write!(f, " {}", v.to_string().replace(' ', ""))?;
            }
            writeln!(f)?;
        }
        writeln!(f, "VIN {}", self.input)?;
        writeln!(f, "VOUT {}", self.output)?;
        writeln!(f, "GND {}", self.ground)
    }
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    col: line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_netlist(text: &str) -> Result<Netlist, CircuitError> {
    let mut components = Vec::new();
    let (mut input, mut output, mut ground) = (None, None, None);
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        let err = |tok: &Token<'_>, kind: SyntaxKind, msg: String| CircuitError::Syntax {
            line: lineno,
            col: tok.col,
            kind,
            msg,
        };
        let malformed = |tok: &Token<'_>, msg: String| err(tok, SyntaxKind::Malformed, msg);
        let keyword = head.text.to_ascii_uppercase();
        let arity = match keyword.as_str() {
            "R" | "C" => 5,
            "OPAMP" => 5,
            "VIN" | "VOUT" | "GND" => 2,
            "L" => {
                return Err(err(
                    head,
                    SyntaxKind::UnsupportedComponent,
                    "inductors are not supported".into(),
                ))
            }
            _ => return Err(malformed(head, format!("unknown element `{}`", head.text))),
        };
        if toks.len() != arity {
            let at = toks.get(arity).unwrap_or(toks.last().expect("non-empty"));
            return Err(malformed(
                at,
                format!("`{keyword}` takes {} field(s), found {}", arity - 1, toks.len() - 1),
            ));
        }
        let node_fields = if keyword == "R" || keyword == "C" {
            1..4
        } else {
            1..arity
        };
        for t in &toks[node_fields] {
            if !is_ident(t.text) {
                return Err(malformed(t, format!("`{}` is not a valid name", t.text)));
            }
        }
        match keyword.as_str() {
            "R" | "C" => {
                let value = parse_param_poly(toks[4].text)
                    .map_err(|e| malformed(&toks[4], format!("bad component value `{}`: {e}", toks[4].text)))?;
                let (name, a, b) = (toks[1].text, toks[2].text, toks[3].text);
                components.push(if keyword == "R" {
                    Component::resistor(name, a, b, value)
                } else {
                    Component::capacitor(name, a, b, value)
                });
            }
            "OPAMP" => components.push(Component::opamp(toks[1].text, toks[2].text, toks[3].text, toks[4].text)),
            _ => {
                let slot = match keyword.as_str() {
                    "VIN" => &mut input,
                    "VOUT" => &mut output,
                    _ => &mut ground,
                };
                if slot.is_some() {
                    return Err(malformed(head, format!("second `{keyword}` line")));
                }
                *slot = Some(toks[1].text.to_string());
            }
        }
    }
    let eof = |kind, msg: &str| CircuitError::Syntax {
        line: last_line + 1,
        col: 1,
        kind,
        msg: msg.to_string(),
    };
    let input = input.ok_or_else(|| eof(SyntaxKind::MissingInput, "no VIN line"))?;
    let output = output.ok_or_else(|| eof(SyntaxKind::MissingOutput, "no VOUT line"))?;
    if input == output {
        return Err(eof(SyntaxKind::Malformed, "input and output are the same node"));
    }
    Netlist::new(components, &input, &output, ground.as_deref().unwrap_or("gnd"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;

    const RC: &str = "R r1 in a 1000\nC c1 a gnd 1e-6\nVIN in\nVOUT a\n";

    #[test]
    fn parses_rc() {
        let net = parse_netlist(RC).unwrap();
        assert_eq!(net.components().len(), 2);
        assert_eq!(
            net.components()[1].value,
            Some(ParamPoly::constant(rational::frac(1, 1_000_000)))
        );
        assert_eq!((net.input(), net.output(), net.ground()), ("in", "a", "gnd"));
    }

    #[test]
    fn round_trip() {
        let net = parse_netlist(RC).unwrap();
        assert_eq!(parse_netlist(&net.to_string()).unwrap(), net);
        let sym = parse_netlist("# symbolic\nR R1 in x 2*R + 1  \nOPAMP U1 gnd x out\nC C2 x out C\nVIN in\nVOUT out")
            .unwrap_err();
        assert!(matches!(sym, CircuitError::Syntax { line: 2, col: 15, .. }), "{sym}");
        let sym = parse_netlist("R R1 in x 2*R+1 # bias\nOPAMP U1 gnd x out\nC C2 x out C\nVIN in\nVOUT out").unwrap();
        assert_eq!(parse_netlist(&sym.to_string()).unwrap(), sym);
    }

    #[test]
    fn errors() {
        let e = parse_netlist("R r1 in a 1000\nC c1 a gnd 1e-6\nVIN in\n").unwrap_err();
        assert!(matches!(
            e,
            CircuitError::Syntax {
                kind: SyntaxKind::MissingOutput,
                line: 4,
                ..
            }
        ));
        let e = parse_netlist("R r1 in a 1000\nL l1 a gnd 1e-3\nVIN in\nVOUT a").unwrap_err();
        assert!(matches!(
            e,
            CircuitError::Syntax {
                kind: SyntaxKind::UnsupportedComponent,
                line: 2,
                col: 1,
                ..
            }
        ));
        let e = parse_netlist("R r1 in a 1000\nC r1 a gnd 1e-6\nVIN in\nVOUT a").unwrap_err();
        assert_eq!(e, CircuitError::DuplicateName("r1".into()));
        let e = parse_netlist("R r1 in a 1000\nC c1 a b 1e-6\nVIN in\nVOUT a").unwrap_err();
        assert_eq!(e, CircuitError::MissingGround("gnd".into()));
        let e = parse_netlist("R r1 in a 1000\nC c1 a gnd 1e-6\nR r2 x y 5\nVIN in\nVOUT a").unwrap_err();
        assert_eq!(e, CircuitError::DisconnectedGraph("x".into()));
        let e = parse_netlist("R r1 in a -5\nC c1 a gnd 1e-6\nVIN in\nVOUT a").unwrap_err();
        assert!(matches!(e, CircuitError::NonPositiveComponent { .. }));
        let e = parse_netlist("R r1 in a\nVIN in\nVOUT a").unwrap_err();
        assert!(matches!(e, CircuitError::Syntax { line: 1, col: 9, .. }), "{e}");
    }

    #[test]
    fn renamed_ground() {
        let net = parse_netlist("R r1 in a 1\nC c1 a 0 1\nVIN in\nVOUT a\nGND 0").unwrap();
        assert_eq!(net.ground(), "0");
    }
}
