//! Sign equations over the seven ±1 outcome symbols and their exhaustive
//! satisfiability check.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::observables::Sign;

/// One of the seven ±1 outcome symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symbol {
    AAlpha,
    ABeta,
    B,
    CAlpha,
    CBeta,
    DAlpha,
    DBeta,
}

impl Symbol {
    pub const ALL: [Symbol; 7] = [
        Symbol::AAlpha,
        Symbol::ABeta,
        Symbol::B,
        Symbol::CAlpha,
        Symbol::CBeta,
        Symbol::DAlpha,
        Symbol::DBeta,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Symbol::AAlpha => "aα",
            Symbol::ABeta => "aβ",
            Symbol::B => "b",
            Symbol::CAlpha => "cα",
            Symbol::CBeta => "cβ",
            Symbol::DAlpha => "dα",
            Symbol::DBeta => "dβ",
        }
    }
}

/// A value `±1` for each of the seven symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignAssignment([Sign; 7]);

impl SignAssignment {
    pub fn new(values: [Sign; 7]) -> Self {
        Self(values)
    }

    /// Bit `k` of `bits` set means symbol `k` (in [`Symbol::ALL`] order) is `-1`.
    pub fn from_bits(bits: u8) -> Self {
        let mut values = [Sign::Plus; 7];
        for (k, v) in values.iter_mut().enumerate() {
            if (bits >> k) & 1 == 1 {
                *v = Sign::Minus;
            }
        }
        Self(values)
    }

    pub fn get(&self, symbol: Symbol) -> Sign {
        self.0[symbol.index()]
    }

    pub fn product(&self, monomial: &[Symbol]) -> Sign {
        monomial.iter().fold(Sign::Plus, |acc, &s| acc * self.get(s))
    }
}

impl Serialize for SignAssignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(7))?;
        for s in Symbol::ALL {
            map.serialize_entry(&s, &self.get(s))?;
        }
        map.end()
    }
}

/// `Π left = sign · Π right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignEquation {
    pub left: Vec<Symbol>,
    pub right: Vec<Symbol>,
    pub sign: Sign,
}

impl SignEquation {
    pub fn new(left: &[Symbol], sign: Sign, right: &[Symbol]) -> Self {
        Self {
            left: left.to_vec(),
            right: right.to_vec(),
            sign,
        }
    }

    pub fn holds(&self, a: &SignAssignment) -> bool {
        a.product(&self.left) == self.sign * a.product(&self.right)
    }
}

impl fmt::Display for SignEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |m: &[Symbol]| m.iter().map(|s| s.label()).collect::<Vec<_>>().join("");
        let sign = if self.sign == Sign::Minus { "-" } else { "" };
        write!(f, "{} = {}{}", mono(&self.left), sign, mono(&self.right))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub equations: Vec<SignEquation>,
}

impl ConstraintSet {
    /// The four product constraints forced on the outcomes by the detection
    /// chain of the no-go scenario:
    ///
    /// ```text
    /// aα b = -cα dα,  aβ b = -cβ dα,  aβ b = -cα dβ,  aα b = cβ dβ
    /// ```
    pub fn no_go() -> Self {
        use Symbol::*;
        Self {
            equations: vec![
                SignEquation::new(&[AAlpha, B], Sign::Minus, &[CAlpha, DAlpha]),
                SignEquation::new(&[ABeta, B], Sign::Minus, &[CBeta, DAlpha]),
                SignEquation::new(&[ABeta, B], Sign::Minus, &[CAlpha, DBeta]),
                SignEquation::new(&[AAlpha, B], Sign::Plus, &[CBeta, DBeta]),
            ],
        }
    }

    pub fn evaluate(&self, a: &SignAssignment) -> Vec<bool> {
        self.equations.iter().map(|eq| eq.holds(a)).collect()
    }

    pub fn satisfied_by(&self, a: &SignAssignment) -> bool {
        self.equations.iter().all(|eq| eq.holds(a))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub satisfying: Vec<SignAssignment>,
    pub total: usize,
}

/// Tries all `2⁷` sign assignments.
pub fn enumerate_constraints(cs: &ConstraintSet) -> Enumeration {
    let satisfying = (0u8..128)
        .map(SignAssignment::from_bits)
        .filter(|a| cs.satisfied_by(a))
        .collect();
    Enumeration { satisfying, total: 128 }
}
