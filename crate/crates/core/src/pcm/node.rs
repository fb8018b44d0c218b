//! Per-node state machine of the distributed solver.
//!
//! A node knows only its sorted closed neighborhood `Ω_i` and keeps one slot
//! per member for the values it hears from it. All neighborhood sums run
//! left to right over those slots, so every node that holds a replica of
//! `x̄_j` performs the identical sequence of floating-point operations.

use super::inner_minimizer_unchecked;
use super::network::Message;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    id: usize,
    /// Sorted closed neighborhood; `omega[self_slot] == id`.
    omega: Vec<usize>,
    self_slot: usize,
    lambda: f64,
    mu: f64,
    z: f64,
    x_hat: f64,
    x: f64,
    repair: f64,
    /// `Σ_{j∈Ω_i} x̄_j` from the last completed round.
    covered: f64,
    /// Latest `λ_j` heard from each member of `Ω_i`.
    lambda_local: Vec<f64>,
    /// Latest `x̂_j` heard from each member of `Ω_i`.
    x_hat_local: Vec<f64>,
    /// Running averages `x̄_j` for each member of `Ω_i`.
    x_bar_local: Vec<f64>,
}

impl NodeState {
    /// Initial state: `λ^(0) = 0`, `z^(-1) = 0`, `x̄^(-1) = 0`.
    pub fn new(id: usize, omega: Vec<usize>) -> Self {
        let self_slot = omega
            .binary_search(&id)
            .expect("closed neighborhood must contain the node itself");
        debug_assert!(omega.windows(2).all(|w| w[0] < w[1]));
        let d = omega.len();
        Self {
            id,
            omega,
            self_slot,
            lambda: 0.0,
            mu: 0.0,
            z: 0.0,
            x_hat: 0.0,
            x: 0.0,
            repair: 0.0,
            covered: 0.0,
            lambda_local: vec![0.0; d],
            x_hat_local: vec![0.0; d],
            x_bar_local: vec![0.0; d],
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn x_hat(&self) -> f64 {
        self.x_hat
    }

    /// Repaired allocation `x_i^(k)`.
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Feasibility repair `e_i^(k) = [1 − Σ_{j∈Ω_i} x̄_j]₊`.
    pub fn repair(&self) -> f64 {
        self.repair
    }

    /// This node's own running average `x̄_i`.
    pub fn x_bar(&self) -> f64 {
        self.x_bar_local[self.self_slot]
    }

    /// The replica of `x̄_j` held here, if `j ∈ Ω_i`.
    pub fn x_bar_of(&self, j: usize) -> Option<f64> {
        self.omega.binary_search(&j).ok().map(|s| self.x_bar_local[s])
    }

    pub fn x_bar_local(&self) -> &[f64] {
        &self.x_bar_local
    }

    /// Value broadcast in the first exchange of round `k`. Round 0 skips it.
    pub fn lambda_broadcast(&self, k: u64) -> Option<f64> {
        (k >= 1).then_some(self.lambda)
    }

    /// Stores received `λ_j`. Returns `false` if any sender lies outside `Ω_i`.
    pub fn receive_lambda(&mut self, inbox: &[Message]) -> bool {
        Self::store(&self.omega, self.self_slot, &mut self.lambda_local, inbox)
    }

    /// Inner minimizer `x̂_i = P_[0,1]((Σ_{j∈Ω_i} λ_j − 1)/δ)`.
    pub fn compute_x_hat(&mut self, delta: f64) -> f64 {
        self.lambda_local[self.self_slot] = self.lambda;
        let lambda_sum: f64 = self.lambda_local.iter().sum();
        self.x_hat = inner_minimizer_unchecked(lambda_sum, delta);
        self.x_hat_local[self.self_slot] = self.x_hat;
        self.x_hat
    }

    pub fn x_hat_broadcast(&self) -> f64 {
        self.x_hat
    }

    pub fn receive_x_hat(&mut self, inbox: &[Message]) -> bool {
        Self::store(&self.omega, self.self_slot, &mut self.x_hat_local, inbox)
    }

    /// Local updates after both exchanges of round `k`.
    pub fn complete_round(&mut self, k: u64, alpha: f64) {
        let kf = k as f64;
        let keep = kf / (kf + 2.0);
        let take = 2.0 / (kf + 2.0);
        let mut hat_sum = 0.0;
        let mut covered = 0.0;
        for (bar, &hat) in self.x_bar_local.iter_mut().zip(&self.x_hat_local) {
            hat_sum += hat;
            *bar = keep * *bar + take * hat;
            covered += *bar;
        }
        let residual = 1.0 - hat_sum;

        self.z += 0.5 * (kf + 1.0) * residual;
        self.mu = (self.lambda + alpha * residual).max(0.0);
        self.lambda = (kf + 1.0) / (kf + 3.0) * self.mu + 2.0 / (kf + 3.0) * alpha * self.z.max(0.0);

        self.covered = covered;
        self.repair = (1.0 - covered).max(0.0);
        self.x = self.x_bar_local[self.self_slot] + self.repair;
    }

    /// Name of the first non-finite scalar in the state, if any.
    pub fn non_finite_field(&self) -> Option<&'static str> {
        let scalars = [
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("z", self.z),
            ("x_hat", self.x_hat),
            ("x", self.x),
        ];
        if let Some((name, _)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return Some(name);
        }
        if !self.covered.is_finite() {
            return Some("x_bar");
        }
        None
    }

    /// Inboxes arrive sorted by sender, so a single merge walk over `Ω_i`
    /// places every message.
    fn store(omega: &[usize], self_slot: usize, slots: &mut [f64], inbox: &[Message]) -> bool {
        if inbox.len() + 1 == omega.len() {
            let (before, after) = inbox.split_at(self_slot);
            let matches = |msgs: &[Message], ids: &[usize]| msgs.iter().zip(ids).all(|(m, &j)| m.from == j);
            if matches(before, &omega[..self_slot]) && matches(after, &omega[self_slot + 1..]) {
                for (slot, msg) in slots[..self_slot].iter_mut().zip(before) {
                    *slot = msg.value;
                }
                for (slot, msg) in slots[self_slot + 1..].iter_mut().zip(after) {
                    *slot = msg.value;
                }
                return true;
            }
        }
        let mut local = true;
        let mut slot = 0;
        for msg in inbox {
            if slot >= omega.len() || omega[slot] > msg.from {
                slot = 0;
            }
            while slot < omega.len() && omega[slot] < msg.from {
                slot += 1;
            }
            if slot < omega.len() && omega[slot] == msg.from {
                slots[slot] = msg.value;
            } else {
                local = false;
            }
        }
        local
    }
}
