//! Dense state-by-action value table with the one-step Q-learning update and
//! epsilon-greedy action selection. Indices are plain `usize`; [`super::QModel`] maps
//! prices and percentages onto them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AgentError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    n_states: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    /// All-zero table.
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        assert!(
            n_states > 0 && n_actions > 0,
            "table needs at least one state and action"
        );
        QTable {
            n_states,
            n_actions,
            values: vec![0.0; n_states * n_actions],
        }
    }

    pub fn from_values(
        n_states: usize,
        n_actions: usize,
        values: Vec<f64>,
    ) -> Result<Self, AgentError> {
        if n_states == 0 || n_actions == 0 || values.len() != n_states * n_actions {
            return Err(AgentError::TableShape {
                expected: n_states * n_actions,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(AgentError::NonFinite(format!("table entry {i}")));
        }
        Ok(QTable {
            n_states,
            n_actions,
            values,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Row-major values, `state * n_actions + action`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.n_actions + action]
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        self.values[state * self.n_actions + action] = value;
    }

    pub fn row(&self, state: usize) -> &[f64] {
        let start = state * self.n_actions;
        &self.values[start..start + self.n_actions]
    }

    pub fn max_value(&self, state: usize) -> f64 {
        self.row(state)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the best action; ties go to the lowest index.
    pub fn greedy(&self, state: usize) -> usize {
        let row = self.row(state);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = i;
            }
        }
        best
    }

    /// With probability `epsilon` a uniformly random action, otherwise [`Self::greedy`].
    pub fn select_action<R: Rng + ?Sized>(&self, state: usize, epsilon: f64, rng: &mut R) -> usize {
        if epsilon > 0.0 && rng.random::<f64>() < epsilon {
            rng.random_range(0..self.n_actions)
        } else {
            self.greedy(state)
        }
    }

    /// `Q(s,a) += theta * (r + gamma * max_a' Q(s',a') - Q(s,a))`; a `None` next state is
    /// terminal and contributes no future value. Returns the stored value.
    pub fn update(
        &mut self,
        state: usize,
        action: usize,
        reward: f64,
        next_state: Option<usize>,
        theta: f64,
        gamma: f64,
    ) -> Result<f64, AgentError> {
        if !reward.is_finite() {
            return Err(AgentError::NonFinite(format!("reward {reward}")));
        }
        let future = next_state.map_or(0.0, |s| self.max_value(s));
        let old = self.get(state, action);
        let new = old + theta * (reward + gamma * future - old);
        if !new.is_finite() {
            return Err(AgentError::NonFinite(format!("updated value {new}")));
        }
        self.set(state, action, new);
        Ok(new)
    }
}
