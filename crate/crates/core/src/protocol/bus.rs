//! Deterministic in-process message bus for a chain of nodes `1 → 2 → ⋯ → m`.
//!
//! Link `j` joins node `j` to node `j+1`. Delivery is FIFO in send order
//! (hence FIFO per link). A tapped link hands the adversary a copy of every
//! ciphertext it carries; copying a quantum state is only possible because
//! this is a classical simulation, and schedules say so.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::PureState;

/// A ciphertext in flight on link `hop`.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub hop: usize,
    pub from: usize,
    pub to: usize,
    pub payload: PureState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeliveryRecord {
    pub seq: usize,
    pub hop: usize,
    pub from: usize,
    pub to: usize,
    pub captured: bool,
}

/// A tapped ciphertext.
#[derive(Clone, Debug, PartialEq)]
pub struct Capture {
    pub seq: usize,
    pub hop: usize,
    pub payload: PureState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeliverySchedule {
    pub deliveries: Vec<DeliveryRecord>,
    pub captures: Vec<Capture>,
    /// Always true: taps copy states, which physical no-cloning forbids.
    pub no_cloning_idealized: bool,
}

#[derive(Debug)]
pub struct Bus {
    parties: usize,
    taps: BTreeSet<usize>,
    queue: VecDeque<Envelope>,
    seq: usize,
    deliveries: Vec<DeliveryRecord>,
    captures: Vec<Capture>,
}

impl Bus {
    pub fn new(parties: usize, taps: impl IntoIterator<Item = usize>) -> Result<Self> {
        if parties < 2 {
            return Err(Error::Topology(format!("a chain needs at least 2 nodes, got {parties}")));
        }
        let taps: BTreeSet<usize> = taps.into_iter().collect();
        if let Some(&bad) = taps.iter().find(|&&t| t == 0 || t >= parties) {
            return Err(Error::Topology(format!("tap on link {bad}, chain has links 1..={}", parties - 1)));
        }
        Ok(Bus { parties, taps, queue: VecDeque::new(), seq: 0, deliveries: Vec::new(), captures: Vec::new() })
    }

    pub fn links(&self) -> usize {
        self.parties - 1
    }

    pub fn send(&mut self, env: Envelope) -> Result<()> {
        if env.hop == 0 || env.hop > self.links() || env.from != env.hop || env.to != env.hop + 1 {
            return Err(Error::Topology(format!(
                "message {} → {} on link {} is not a chain link of {} nodes",
                env.from, env.to, env.hop, self.parties
            )));
        }
        self.queue.push_back(env);
        Ok(())
    }

    /// Pops the oldest message, recording the delivery and any tap.
    pub fn deliver_next(&mut self) -> Option<Envelope> {
        let env = self.queue.pop_front()?;
        let captured = self.taps.contains(&env.hop);
        if captured {
            self.captures.push(Capture { seq: self.seq, hop: env.hop, payload: env.payload.clone() });
        }
        self.deliveries.push(DeliveryRecord { seq: self.seq, hop: env.hop, from: env.from, to: env.to, captured });
        self.seq += 1;
        Some(env)
    }

    pub fn into_schedule(self) -> DeliverySchedule {
        DeliverySchedule { deliveries: self.deliveries, captures: self.captures, no_cloning_idealized: true }
    }
}

/// Delivers a batch of messages on an `m`-node chain with the given taps.
pub fn bus_deliver(
    parties: usize,
    taps: impl IntoIterator<Item = usize>,
    messages: Vec<Envelope>,
) -> Result<DeliverySchedule> {
    let mut bus = Bus::new(parties, taps)?;
    for m in messages {
        bus.send(m)?;
    }
    while bus.deliver_next().is_some() {}
    Ok(bus.into_schedule())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(hop: usize, basis: usize) -> Envelope {
        Envelope { hop, from: hop, to: hop + 1, payload: PureState::basis(1, basis).unwrap() }
    }

    #[test]
    fn chain_delivers_every_link_once() {
        let msgs = (1..5).map(|h| env(h, 0)).collect();
        let sched = bus_deliver(5, [], msgs).unwrap();
        assert_eq!(sched.deliveries.len(), 4);
        assert!(sched.captures.is_empty());
        assert!(sched.deliveries.iter().all(|d| !d.captured));
        assert!(sched.no_cloning_idealized);
    }

    #[test]
    fn single_tap_captures_one_copy() {
        let msgs = vec![env(1, 0), env(2, 1)];
        let sched = bus_deliver(3, [2], msgs).unwrap();
        assert_eq!(sched.captures.len(), 1);
        assert_eq!(sched.captures[0].hop, 2);
        assert_eq!(sched.captures[0].payload, PureState::basis(1, 1).unwrap());
        assert!(sched.deliveries[1].captured && !sched.deliveries[0].captured);
    }

    #[test]
    fn fifo_per_link() {
        let msgs = vec![env(1, 0), env(1, 1), env(2, 0)];
        let sched = bus_deliver(3, [1], msgs).unwrap();
        let link1: Vec<_> = sched.captures.iter().map(|c| c.payload.clone()).collect();
        assert_eq!(link1, vec![PureState::basis(1, 0).unwrap(), PureState::basis(1, 1).unwrap()]);
        assert_eq!(sched.deliveries.iter().map(|d| d.seq).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn malformed_topology_is_rejected() {
        assert!(matches!(bus_deliver(1, [], vec![]), Err(Error::Topology(_))));
        assert!(matches!(bus_deliver(3, [3], vec![]), Err(Error::Topology(_))));
        let backwards = Envelope { hop: 1, from: 2, to: 1, payload: PureState::basis(1, 0).unwrap() };
        assert!(matches!(bus_deliver(3, [], vec![backwards]), Err(Error::Topology(_))));
        assert!(matches!(bus_deliver(3, [], vec![env(3, 0)]), Err(Error::Topology(_))));
    }
}
