//! Primary and secondary particles and the relations between them.

use serde::{Deserialize, Serialize};

use crate::energy::{MinimalEnergy, State, StateSet};
use crate::error::{Error, Result};

/// A primary particle `k_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Primary {
    pub k: i64,
    pub state: State,
}

/// A secondary particle `(k, c, c')` with potential `2k + ε(c,c')`.
///
/// Only the half-potential is stored; the potential is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Secondary {
    pub k: i64,
    pub upper: State,
    pub lower: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Particle {
    Primary(Primary),
    Secondary(Secondary),
}

/// Which relation an E-side partition is ordered by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Relation {
    #[default]
    Standard,
    Dual,
}

impl Primary {
    pub fn new(k: i64, state: State) -> Self {
        Primary { k, state }
    }
}

impl Secondary {
    pub fn new(k: i64, upper: State, lower: State) -> Self {
        Secondary { k, upper, lower }
    }

    pub fn potential(&self, e: &MinimalEnergy) -> i64 {
        2 * self.k + e.get(self.upper, self.lower)
    }

    /// Upper half `(k + ε(c,c'), c)`.
    pub fn gamma(&self, e: &MinimalEnergy) -> Primary {
        Primary::new(self.k + e.get(self.upper, self.lower), self.upper)
    }

    /// Lower half `(k, c')`.
    pub fn mu(&self) -> Primary {
        Primary::new(self.k, self.lower)
    }
}

impl Particle {
    pub fn primary(k: i64, state: State) -> Self {
        Particle::Primary(Primary::new(k, state))
    }

    pub fn secondary(k: i64, upper: State, lower: State) -> Self {
        Particle::Secondary(Secondary::new(k, upper, lower))
    }

    pub fn degree(&self) -> usize {
        match self {
            Particle::Primary(_) => 1,
            Particle::Secondary(_) => 2,
        }
    }

    pub fn potential(&self, e: &MinimalEnergy) -> i64 {
        match self {
            Particle::Primary(p) => p.k,
            Particle::Secondary(s) => s.potential(e),
        }
    }

    pub fn as_primary(&self) -> Option<&Primary> {
        match self {
            Particle::Primary(p) => Some(p),
            Particle::Secondary(_) => None,
        }
    }

    pub fn as_secondary(&self) -> Option<&Secondary> {
        match self {
            Particle::Primary(_) => None,
            Particle::Secondary(s) => Some(s),
        }
    }

    /// Appends the states of this particle, upper before lower.
    pub fn push_states(&self, out: &mut Vec<State>) {
        match self {
            Particle::Primary(p) => out.push(p.state),
            Particle::Secondary(s) => {
                out.push(s.upper);
                out.push(s.lower);
            }
        }
    }

    /// Text shorthand: `11:bbar` or `5*b.a`.
    pub fn format(&self, states: &StateSet) -> String {
        match self {
            Particle::Primary(p) => format!("{}:{}", p.k, states.label(p.state)),
            Particle::Secondary(s) => format!(
                "{}*{}.{}",
                s.k,
                states.label(s.upper),
                states.label(s.lower)
            ),
        }
    }

    pub fn parse(text: &str, states: &StateSet) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Parse(format!("bad particle `{text}`"));
        if let Some((k, rest)) = text.split_once('*') {
            let (u, l) = rest.split_once('.').ok_or_else(bad)?;
            let k = k.trim().parse().map_err(|_| bad())?;
            Ok(Particle::secondary(
                k,
                states.index_of(u.trim())?,
                states.index_of(l.trim())?,
            ))
        } else {
            let (k, c) = text.split_once(':').ok_or_else(bad)?;
            let k = k.trim().parse().map_err(|_| bad())?;
            Ok(Particle::primary(k, states.index_of(c.trim())?))
        }
    }

    pub fn to_json(&self, states: &StateSet) -> ParticleJson {
        match self {
            Particle::Primary(p) => ParticleJson::Primary {
                k: p.k,
                state: states.label(p.state).to_string(),
            },
            Particle::Secondary(s) => ParticleJson::Secondary {
                k: s.k,
                upper: states.label(s.upper).to_string(),
                lower: states.label(s.lower).to_string(),
            },
        }
    }

    pub fn from_json(json: &ParticleJson, states: &StateSet) -> Result<Self> {
        Ok(match json {
            ParticleJson::Primary { k, state } => Particle::primary(*k, states.index_of(state)?),
            ParticleJson::Secondary { k, upper, lower } => {
                Particle::secondary(*k, states.index_of(upper)?, states.index_of(lower)?)
            }
        })
    }
}

/// Wire form of a particle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParticleJson {
    Secondary {
        k: i64,
        upper: String,
        lower: String,
    },
    Primary {
        k: i64,
        state: String,
    },
}

/// Fuses a consecutive pair `upper ≻ lower` with gap exactly ε into a secondary.
pub fn make_secondary(e: &MinimalEnergy, upper: Primary, lower: Primary) -> Result<Secondary> {
    if !is_troublesome(e, &upper, &lower) {
        return Err(Error::NotConsecutive(format!(
            "({}, {}) and ({}, {})",
            upper.k,
            e.states().label(upper.state),
            lower.k,
            e.states().label(lower.state)
        )));
    }
    Ok(Secondary::new(lower.k, upper.state, lower.state))
}

/// `p ≻ε p2`: the potential gap is at least ε(c, c2).
pub fn rel_succ(e: &MinimalEnergy, p: &Primary, p2: &Primary) -> bool {
    p.k - p2.k >= e.get(p.state, p2.state)
}

pub fn is_troublesome(e: &MinimalEnergy, p: &Primary, p2: &Primary) -> bool {
    p.k - p2.k == e.get(p.state, p2.state)
}

/// The difference-condition relation `x ≫ε y`.
pub fn rel_gg(e: &MinimalEnergy, x: &Particle, y: &Particle) -> bool {
    use Particle::*;
    match (x, y) {
        (Primary(p), Primary(q)) => p.k - q.k > e.get(p.state, q.state),
        (Primary(p), Secondary(s)) => {
            p.k - s.potential(e) >= e.get(p.state, s.upper) + e.get(s.upper, s.lower)
        }
        (Secondary(s), Primary(p)) => {
            s.potential(e) - p.k > e.get(s.upper, s.lower) + e.get(s.lower, p.state)
        }
        (Secondary(s), Secondary(t)) => rel_succ(e, &s.mu(), &t.gamma(e)),
    }
}

/// The dual relation: strictness of the two mixed cases is swapped.
pub fn rel_gg_dual(e: &MinimalEnergy, x: &Particle, y: &Particle) -> bool {
    use Particle::*;
    match (x, y) {
        (Primary(p), Secondary(s)) => {
            p.k - s.potential(e) > e.get(p.state, s.upper) + e.get(s.upper, s.lower)
        }
        (Secondary(s), Primary(p)) => {
            s.potential(e) - p.k >= e.get(s.upper, s.lower) + e.get(s.lower, p.state)
        }
        _ => rel_gg(e, x, y),
    }
}

pub fn related(e: &MinimalEnergy, relation: Relation, x: &Particle, y: &Particle) -> bool {
    match relation {
        Relation::Standard => rel_gg(e, x, y),
        Relation::Dual => rel_gg_dual(e, x, y),
    }
}

/// Negates potentials and reverses the state order of a secondary, which
/// exchanges the roles of ε and its transpose.
pub fn reflect(e: &MinimalEnergy, x: &Particle) -> Particle {
    match x {
        Particle::Primary(p) => Particle::primary(-p.k, p.state),
        Particle::Secondary(s) => {
            Particle::secondary(-s.k - e.get(s.upper, s.lower), s.lower, s.upper)
        }
    }
}
