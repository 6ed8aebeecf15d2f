//! In-process plumbing shared by the protocols: roles, the message bus,
//! per-role randomness, tamper injection and phase timing.

pub mod bus;
pub mod rng;
pub mod tamper;
pub mod timing;

use std::fmt;

pub use bus::{Bus, BusMessage, PhaseTag};
pub use rng::RngForge;
pub use tamper::{Mutation, RunSel, TamperDirective, TamperPhase, TamperSet};
pub use timing::PhaseTimer;

/// A protocol participant. Servers are numbered from 0 internally and
/// displayed from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Querier,
    Server(usize),
    Dealer,
}

impl Role {
    pub fn code(self) -> u16 {
        match self {
            Role::Querier => 0,
            Role::Server(k) => k as u16 + 1,
            Role::Dealer => u16::MAX,
        }
    }

    pub fn from_code(c: u16) -> Self {
        match c {
            0 => Role::Querier,
            u16::MAX => Role::Dealer,
            k => Role::Server(k as usize - 1),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Querier => write!(f, "querier"),
            Role::Server(k) => write!(f, "server{}", k + 1),
            Role::Dealer => write!(f, "dealer"),
        }
    }
}

/// Which of the two executions inside one query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunKind {
    Primary,
    Complement,
}

impl RunKind {
    pub fn code(self) -> u8 {
        match self {
            RunKind::Primary => 0,
            RunKind::Complement => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(RunKind::Primary),
            1 => Some(RunKind::Complement),
            _ => None,
        }
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunKind::Primary => "primary",
            RunKind::Complement => "complement",
        })
    }
}

/// Everything a protocol run needs besides its cryptographic inputs.
pub struct ProtocolEnv<'a> {
    pub session: [u8; 16],
    pub query: u32,
    pub run: RunKind,
    pub forge: &'a RngForge,
    pub tamper: &'a TamperSet,
    pub timer: &'a mut PhaseTimer,
    /// Keep reconstructed secrets for white-box checks.
    pub white_box: bool,
}

impl ProtocolEnv<'_> {
    /// Randomness for `role` in this run of protocol `label`.
    pub fn rng(&self, label: &str, role: Role) -> rand_chacha::ChaCha20Rng {
        self.forge.rng(&format!("{label}/q{}/{}", self.query, self.run), role)
    }
}
