/// Circular buffer of the last `τ + 1` values received from one peer.
///
/// A value stamped `t` lives in slot `t mod (τ + 1)`. The buffer starts
/// with every slot holding the peer's initial value at stamp 0, so reads are
/// defined from the first tick.
#[derive(Debug, Clone, PartialEq)]
pub struct StalenessBuffer {
    slots: Vec<(u64, f64)>,
}

impl StalenessBuffer {
    pub fn new(tau: usize, initial: f64) -> Self {
        Self {
            slots: vec![(0, initial); tau + 1],
        }
    }

    pub fn depth(&self) -> usize {
        self.slots.len()
    }

    pub fn write(&mut self, stamp: u64, value: f64) {
        let n = self.slots.len() as u64;
        let slot = &mut self.slots[(stamp % n) as usize];
        if stamp >= slot.0 {
            *slot = (stamp, value);
        }
    }

    /// Value with the largest stamp `≤ k − nominal_age`, or the oldest
    /// retained value if every stamp is newer. Returns `(value, k − stamp)`.
    pub fn read(&self, k: u64, nominal_age: u64) -> (f64, u64) {
        let target = k.saturating_sub(nominal_age);
        let best = self
            .slots
            .iter()
            .filter(|(s, _)| *s <= target)
            .max_by_key(|(s, _)| *s)
            .or_else(|| self.slots.iter().min_by_key(|(s, _)| *s))
            .copied()
            .expect("buffer has at least one slot");
        (best.1, k.saturating_sub(best.0))
    }

    /// Newest stamp held.
    pub fn latest_stamp(&self) -> u64 {
        self.slots.iter().map(|(s, _)| *s).max().unwrap_or(0)
    }
}
