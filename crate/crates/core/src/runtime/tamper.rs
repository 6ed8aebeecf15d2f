//! Deliberate deviations injected into an otherwise honest run.
//!
//! A directive reads `party:phase:index[:mutation[:run]]`, e.g.
//! `s1:sm-witness-b:3` or `q:rsm-quasi:0:fake:both`. Parties are `q` or
//! `s1`..`sm`; mutations are `inc` (default) or `fake`; runs are `primary`
//! (default), `complement` or `both`.

use std::fmt;
use std::str::FromStr;

use super::{Role, RunKind};
use crate::error::{Error, Result};

macro_rules! phases {
    ($($variant:ident => $name:literal, $querier:literal, $fake:literal;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum TamperPhase {
            $($variant,)*
        }

        impl TamperPhase {
            pub const ALL: &'static [TamperPhase] = &[$(TamperPhase::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(TamperPhase::$variant => $name,)*
                }
            }

            /// Whether the querier (rather than a server) acts in this phase.
            pub fn by_querier(self) -> bool {
                match self {
                    $(TamperPhase::$variant => $querier,)*
                }
            }

            pub fn allows_fake(self) -> bool {
                match self {
                    $(TamperPhase::$variant => $fake,)*
                }
            }
        }
    };
}

phases! {
    SmSignature => "sm-signature", true, true;
    SmShuffle => "sm-shuffle", false, true;
    SmBlind => "sm-blind", false, false;
    SmDecShare => "sm-dec-share", false, false;
    SmWitnessV => "sm-witness-v", false, false;
    SmWitnessR => "sm-witness-r", false, false;
    SmWitnessB => "sm-witness-b", false, false;
    SmAShare => "sm-a-share", false, false;
    SmZShare => "sm-z-share", false, false;
    RsmQuasi => "rsm-quasi", true, true;
    RsmShuffle => "rsm-shuffle", false, true;
    RsmBlindS => "rsm-blind-s", false, false;
    RsmBlindC => "rsm-blind-c", false, false;
    RsmBlindR => "rsm-blind-r", false, false;
    RsmDecShare => "rsm-dec-share", false, false;
    RsmZ1Share => "rsm-z1-share", false, false;
    RsmDelta0 => "rsm-delta0", false, false;
    RsmDelta1 => "rsm-delta1", false, false;
    RsmAShare => "rsm-a-share", false, false;
    RsmZShare => "rsm-z-share", false, false;
}

impl TamperPhase {
    pub fn is_sm(self) -> bool {
        self.name().starts_with("sm-")
    }
}

impl FromStr for TamperPhase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown tamper phase {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Shift the value by one (scalars) or by the generator g1 (G1 elements).
    Increment,
    /// Substitute the designated fake element.
    Fake,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunSel {
    Primary,
    Complement,
    Both,
}

impl RunSel {
    fn matches(self, run: RunKind) -> bool {
        matches!(
            (self, run),
            (RunSel::Both, _) | (RunSel::Primary, RunKind::Primary) | (RunSel::Complement, RunKind::Complement)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TamperDirective {
    pub party: Role,
    pub phase: TamperPhase,
    pub index: usize,
    pub mutation: Mutation,
    pub run: RunSel,
}

impl TamperDirective {
    pub fn new(party: Role, phase: TamperPhase, index: usize) -> Self {
        Self { party, phase, index, mutation: Mutation::Increment, run: RunSel::Primary }
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn with_run(mut self, run: RunSel) -> Self {
        self.run = run;
        self
    }

    /// Checks the directive against a session of `n` values and `m` servers.
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        let bad = |why: String| Err(Error::Config(format!("tamper {self}: {why}")));
        match (self.party, self.phase.by_querier()) {
            (Role::Querier, true) => {}
            (Role::Server(k), false) if k < m => {}
            (Role::Server(k), false) => return bad(format!("no server {}", k + 1)),
            (_, true) => return bad("phase belongs to the querier".into()),
            (_, false) => return bad("phase belongs to a server".into()),
        }
        if self.index >= n {
            return bad(format!("index {} out of range for n = {n}", self.index));
        }
        if self.mutation == Mutation::Fake && !self.phase.allows_fake() {
            return bad("phase has no fake substitution".into());
        }
        Ok(())
    }
}

impl fmt::Display for TamperDirective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let party = match self.party {
            Role::Server(k) => format!("s{}", k + 1),
            _ => "q".into(),
        };
        let mutation = match self.mutation {
            Mutation::Increment => "inc",
            Mutation::Fake => "fake",
        };
        let run = match self.run {
            RunSel::Primary => "primary",
            RunSel::Complement => "complement",
            RunSel::Both => "both",
        };
        write!(f, "{party}:{}:{}:{mutation}:{run}", self.phase.name(), self.index)
    }
}

impl FromStr for TamperDirective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=5).contains(&parts.len()) {
            return Err(Error::Config(format!("tamper {s:?}: expected party:phase:index[:mutation[:run]]")));
        }
        let party = match parts[0] {
            "q" | "querier" => Role::Querier,
            p => {
                let k: usize = p
                    .strip_prefix('s')
                    .and_then(|k| k.parse().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| Error::Config(format!("tamper {s:?}: bad party {p:?}")))?;
                Role::Server(k - 1)
            }
        };
        let phase = parts[1].parse()?;
        let index = parts[2].parse().map_err(|_| Error::Config(format!("tamper {s:?}: bad index")))?;
        let mutation = match parts.get(3).copied().unwrap_or("inc") {
            "inc" => Mutation::Increment,
            "fake" => Mutation::Fake,
            other => return Err(Error::Config(format!("tamper {s:?}: bad mutation {other:?}"))),
        };
        let run = match parts.get(4).copied().unwrap_or("primary") {
            "primary" => RunSel::Primary,
            "complement" => RunSel::Complement,
            "both" => RunSel::Both,
            other => return Err(Error::Config(format!("tamper {s:?}: bad run {other:?}"))),
        };
        Ok(Self { party, phase, index, mutation, run })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TamperSet(pub Vec<TamperDirective>);

impl TamperSet {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The mutation to apply, if a directive targets this exact spot.
    pub fn hit(&self, party: Role, phase: TamperPhase, index: usize, run: RunKind) -> Option<Mutation> {
        self.0
            .iter()
            .find(|d| d.party == party && d.phase == phase && d.index == index && d.run.matches(run))
            .map(|d| d.mutation)
    }

    /// Whether any directive touches `phase` for `party` in `run`.
    pub fn any(&self, party: Role, phase: TamperPhase, run: RunKind) -> bool {
        self.0.iter().any(|d| d.party == party && d.phase == phase && d.run.matches(run))
    }
}
