//! Standard analog realizations of controllers and compensators.
//!
//! Active circuits are one inverting stage: impedance `Z_A` from the input
//! to the virtual-ground node `a`, impedance `Z_B` from `a` to the output,
//! and `V_out / V_in = -Z_B / Z_A`.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;

use super::netlist::{Component, Netlist};
use super::CircuitError;
use crate::algebra::{ParamPoly, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControllerKind {
    P,
    I,
    D,
    PI,
    PD,
    PID,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompensatorKind {
    Lag,
    Lead,
    LagLead,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Realization {
    Active,
    Passive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompensatorClass {
    Lag,
    Lead,
    Unity,
}

fn unknown(what: &str, s: &str) -> String {
    format!("unknown {what} `{s}`")
}

impl FromStr for ControllerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "P" => ControllerKind::P,
            "I" => ControllerKind::I,
            "D" => ControllerKind::D,
            "PI" => ControllerKind::PI,
            "PD" => ControllerKind::PD,
            "PID" => ControllerKind::PID,
            _ => return Err(unknown("controller", s)),
        })
    }
}

impl FromStr for CompensatorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "lag" => CompensatorKind::Lag,
            "lead" => CompensatorKind::Lead,
            "laglead" => CompensatorKind::LagLead,
            _ => return Err(unknown("compensator", s)),
        })
    }
}

impl FromStr for Realization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "active" => Ok(Realization::Active),
            "passive" => Ok(Realization::Passive),
            _ => Err(unknown("realization", s)),
        }
    }
}

impl fmt::Display for CompensatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompensatorClass::Lag => "lag",
            CompensatorClass::Lead => "lead",
            CompensatorClass::Unity => "unity",
        })
    }
}

/// Values for the components named `R1`, `R2`, `C1`, `C2`. Each realization
/// uses the subset it needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentValues {
    pub r1: ParamPoly,
    pub r2: ParamPoly,
    pub c1: ParamPoly,
    pub c2: ParamPoly,
}

impl Default for ComponentValues {
    /// Every value is the parameter of the same name.
    fn default() -> Self {
        ComponentValues {
            r1: ParamPoly::var("R1"),
            r2: ParamPoly::var("R2"),
            c1: ParamPoly::var("C1"),
            c2: ParamPoly::var("C2"),
        }
    }
}

impl ComponentValues {
    /// Overrides one value by component name, case-insensitively.
    pub fn set(&mut self, name: &str, value: ParamPoly) -> Result<(), String> {
        let slot = match name.to_ascii_uppercase().as_str() {
            "R1" => &mut self.r1,
            "R2" => &mut self.r2,
            "C1" => &mut self.c1,
            "C2" => &mut self.c2,
            _ => return Err(format!("no component `{name}`; expected R1, R2, C1 or C2")),
        };
        *slot = value;
        Ok(())
    }

    fn r1(&self) -> Component {
        Component::resistor("R1", "in", "a", self.r1.clone())
    }

    fn c1(&self) -> Component {
        Component::capacitor("C1", "in", "a", self.c1.clone())
    }
}

fn inverting(za: Vec<Component>, zb: Vec<Component>) -> Result<Netlist, CircuitError> {
    let mut parts = za;
    parts.extend(zb);
    parts.push(Component::opamp("U1", "gnd", "a", "out"));
    Netlist::new(parts, "in", "out", "gnd")
}

pub fn realize_controller(kind: ControllerKind, v: &ComponentValues) -> Result<Netlist, CircuitError> {
    use ControllerKind::*;
    let r2 = |to: &str| Component::resistor("R2", "a", to, v.r2.clone());
    let c2 = |from: &str| Component::capacitor("C2", from, "out", v.c2.clone());
    match kind {
        P => inverting(vec![v.r1()], vec![r2("out")]),
        I => inverting(vec![v.r1()], vec![c2("a")]),
        D => inverting(vec![v.c1()], vec![r2("out")]),
        PI => inverting(vec![v.r1()], vec![r2("b"), c2("b")]),
        PD => inverting(vec![v.r1(), v.c1()], vec![r2("out")]),
        PID => inverting(vec![v.r1(), v.c1()], vec![r2("b"), c2("b")]),
    }
}

pub fn realize_compensator(
    kind: CompensatorKind,
    realization: Realization,
    v: &ComponentValues,
) -> Result<Netlist, CircuitError> {
    match (realization, kind) {
        (Realization::Active, CompensatorKind::LagLead) => Err(CircuitError::UnsupportedCombination(
            "the lag-lead compensator has only a passive realization".into(),
        )),
        // Z_A = R1 || C1, Z_B = R2 || C2; lag or lead depending on values
        (Realization::Active, _) => inverting(
            vec![v.r1(), v.c1()],
            vec![
                Component::resistor("R2", "a", "out", v.r2.clone()),
                Component::capacitor("C2", "a", "out", v.c2.clone()),
            ],
        ),
        (Realization::Passive, kind) => {
            let mut parts = vec![Component::resistor("R1", "in", "out", v.r1.clone())];
            if kind != CompensatorKind::Lag {
                parts.push(Component::capacitor("C1", "in", "out", v.c1.clone()));
            }
            if kind == CompensatorKind::Lead {
                parts.push(Component::resistor("R2", "out", "gnd", v.r2.clone()));
            } else {
                parts.push(Component::resistor("R2", "out", "m", v.r2.clone()));
                parts.push(Component::capacitor("C2", "m", "gnd", v.c2.clone()));
            }
            Netlist::new(parts, "in", "out", "gnd")
        }
    }
}

/// Lag when `R2 C2 > R1 C1`, lead when `R1 C1 > R2 C2`.
pub fn classify_active_compensator(
    r1: &Rational,
    c1: &Rational,
    r2: &Rational,
    c2: &Rational,
) -> Result<CompensatorClass, CircuitError> {
    for (name, value) in [("R1", r1), ("C1", c1), ("R2", r2), ("C2", c2)] {
        if !value.is_positive() {
            return Err(CircuitError::NonPositiveComponent {
                name: name.into(),
                value: value.to_string(),
            });
        }
    }
    let (t1, t2) = (r1 * c1, r2 * c2);
    Ok(match t2.cmp(&t1) {
        std::cmp::Ordering::Greater => CompensatorClass::Lag,
        std::cmp::Ordering::Less => CompensatorClass::Lead,
        std::cmp::Ordering::Equal => CompensatorClass::Unity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_tf, rational};
    use crate::circuits::netlist_tf;

    fn tf(net: &Netlist) -> crate::TransferFunction {
        netlist_tf(net).unwrap().0
    }

    fn check_controller(kind: ControllerKind, want: &str) {
        let net = realize_controller(kind, &ComponentValues::default()).unwrap();
        let got = tf(&net);
        assert!(got.equals(&parse_tf(want).unwrap()), "{kind:?}: got {got}, want {want}");
    }

    #[test]
    fn controllers() {
        check_controller(ControllerKind::P, "-R2/R1");
        check_controller(ControllerKind::I, "-1/(R1*C2*s)");
        check_controller(ControllerKind::D, "-R2*C1*s");
        check_controller(ControllerKind::PI, "-(R2*C2*s + 1)/(R1*C2*s)");
        check_controller(ControllerKind::PD, "-(R2/R1)*(R1*C1*s + 1)");
        check_controller(
            ControllerKind::PID,
            "-(R1*C1*R2*C2*s^2 + (R2*C2 + R1*C1)*s + 1)/(R1*C2*s)",
        );
    }

    #[test]
    fn compensators() {
        let v = ComponentValues::default();
        let active = tf(&realize_compensator(CompensatorKind::Lag, Realization::Active, &v).unwrap());
        assert!(active.equals(&parse_tf("-(R2/R1)*(R1*C1*s + 1)/(R2*C2*s + 1)").unwrap()));
        let lag = tf(&realize_compensator(CompensatorKind::Lag, Realization::Passive, &v).unwrap());
        assert!(lag.equals(&parse_tf("(R2*C2*s + 1)/((R1 + R2)*C2*s + 1)").unwrap()));
        let lead = tf(&realize_compensator(CompensatorKind::Lead, Realization::Passive, &v).unwrap());
        assert!(lead.equals(&parse_tf("R2*(R1*C1*s + 1)/(R1*R2*C1*s + R1 + R2)").unwrap()));
        let both = tf(&realize_compensator(CompensatorKind::LagLead, Realization::Passive, &v).unwrap());
        assert!(both.equals(&parse_tf("(R1*C1*s + 1)*(R2*C2*s + 1)/((R1*C1*s + 1)*(R2*C2*s + 1) + R1*C2*s)").unwrap()));
        assert!(matches!(
            realize_compensator(CompensatorKind::LagLead, Realization::Active, &v),
            Err(CircuitError::UnsupportedCombination(_))
        ));
    }

    #[test]
    fn rejects_non_positive_values() {
        let mut v = ComponentValues::default();
        v.set("r1", ParamPoly::int(0)).unwrap();
        assert!(matches!(
            realize_controller(ControllerKind::P, &v),
            Err(CircuitError::NonPositiveComponent { .. })
        ));
    }

    #[test]
    fn classification() {
        let r = |v: i64| rational::int(v);
        assert_eq!(
            classify_active_compensator(&r(1), &r(1), &r(1), &r(2)).unwrap(),
            CompensatorClass::Lag
        );
        assert_eq!(
            classify_active_compensator(&r(2), &r(1), &r(1), &r(1)).unwrap(),
            CompensatorClass::Lead
        );
        assert_eq!(
            classify_active_compensator(&r(1), &r(1), &r(1), &r(1)).unwrap(),
            CompensatorClass::Unity
        );
        assert!(classify_active_compensator(&r(0), &r(1), &r(1), &r(1)).is_err());
    }
}
