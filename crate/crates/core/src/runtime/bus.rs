use std::collections::{HashMap, VecDeque};

use super::Role;
use crate::error::{Error, Result};

/// Stable numeric tags for every message kind on the bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum PhaseTag {
    MixShuffle = 0x0101,
    MixDecShare = 0x0102,
    SmPublish = 0x0201,
    SmShuffle = 0x0202,
    SmBlind = 0x0203,
    SmDecShare = 0x0204,
    SmAShare = 0x0205,
    SmZShare = 0x0206,
    RsmPublish = 0x0301,
    RsmShuffle = 0x0302,
    RsmBlind = 0x0303,
    RsmDecShare = 0x0304,
    RsmMultOpen = 0x0305,
    RsmZ1Share = 0x0306,
    RsmAShare = 0x0307,
    RsmZShare = 0x0308,
    Abort = 0x0401,
}

#[derive(Debug, Clone)]
pub struct BusMessage {
    pub session: [u8; 16],
    pub phase: PhaseTag,
    pub sender: Role,
    /// `None` for broadcast.
    pub recipient: Option<Role>,
    pub payload: Vec<u8>,
}

impl BusMessage {
    pub fn visible_to(&self, role: Role) -> bool {
        self.sender == role || self.recipient.map_or(true, |r| r == role)
    }
}

/// Authenticated in-process bus. Every message is logged; each recipient
/// reads a sender's messages of one phase in the order they were sent.
pub struct Bus {
    session: [u8; 16],
    parties: Vec<Role>,
    log: Vec<BusMessage>,
    queues: HashMap<(Role, Role), VecDeque<usize>>,
}

impl Bus {
    pub fn new(session: [u8; 16], parties: &[Role]) -> Self {
        Self { session, parties: parties.to_vec(), log: Vec::new(), queues: HashMap::new() }
    }

    pub fn broadcast(&mut self, phase: PhaseTag, sender: Role, payload: Vec<u8>) {
        let idx = self.push(phase, sender, None, payload);
        for &p in &self.parties {
            if p != sender {
                self.queues.entry((p, sender)).or_default().push_back(idx);
            }
        }
    }

    pub fn send(&mut self, phase: PhaseTag, sender: Role, recipient: Role, payload: Vec<u8>) {
        let idx = self.push(phase, sender, Some(recipient), payload);
        self.queues.entry((recipient, sender)).or_default().push_back(idx);
    }

    /// Oldest unread message from `sender` to `recipient` carrying `phase`.
    /// Messages with other tags stay queued.
    pub fn recv(&mut self, recipient: Role, sender: Role, phase: PhaseTag) -> Result<&[u8]> {
        let log = &self.log;
        let queue = self.queues.get_mut(&(recipient, sender));
        let idx = queue
            .and_then(|q| {
                let pos = q.iter().position(|&i| log[i].phase == phase)?;
                q.remove(pos)
            })
            .ok_or_else(|| Error::Protocol(format!("{recipient}: no {phase:?} message from {sender}")))?;
        Ok(&self.log[idx].payload)
    }

    pub fn log(&self) -> &[BusMessage] {
        &self.log
    }

    pub fn session(&self) -> [u8; 16] {
        self.session
    }

    fn push(&mut self, phase: PhaseTag, sender: Role, recipient: Option<Role>, payload: Vec<u8>) -> usize {
        self.log.push(BusMessage { session: self.session, phase, sender, recipient, payload });
        self.log.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_phase_fifo_and_broadcast_fanout() {
        let parties = [Role::Querier, Role::Server(0), Role::Server(1)];
        let mut bus = Bus::new([0; 16], &parties);
        bus.broadcast(PhaseTag::SmPublish, Role::Querier, vec![1]);
        bus.broadcast(PhaseTag::SmShuffle, Role::Querier, vec![2]);
        bus.broadcast(PhaseTag::SmShuffle, Role::Querier, vec![4]);
        bus.send(PhaseTag::SmZShare, Role::Server(0), Role::Querier, vec![3]);
        for s in [Role::Server(0), Role::Server(1)] {
            assert_eq!(bus.recv(s, Role::Querier, PhaseTag::SmPublish).unwrap(), &[1]);
            assert_eq!(bus.recv(s, Role::Querier, PhaseTag::SmShuffle).unwrap(), &[2]);
            assert_eq!(bus.recv(s, Role::Querier, PhaseTag::SmShuffle).unwrap(), &[4]);
        }
        assert!(bus.recv(Role::Querier, Role::Querier, PhaseTag::SmPublish).is_err());
        assert!(bus.recv(Role::Server(1), Role::Server(0), PhaseTag::SmZShare).is_err());
        assert!(bus.recv(Role::Querier, Role::Server(0), PhaseTag::SmAShare).is_err());
        assert_eq!(bus.recv(Role::Querier, Role::Server(0), PhaseTag::SmZShare).unwrap(), &[3]);
        assert!(!bus.log()[3].visible_to(Role::Server(1)));
        assert!(bus.log()[3].visible_to(Role::Querier));
    }
}
