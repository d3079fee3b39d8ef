use serde::{Deserialize, Serialize};

/// Size caps and search budgets. All enumeration entry points take a config so
/// runaway instances fail with typed errors instead of exhausting memory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Largest admissible ring order (dense tables are quadratic).
    pub max_ring_order: u64,
    /// Largest admissible module/algebra order.
    pub max_module_order: u64,
    /// Largest admissible object count per gamma level.
    pub gamma_budget: u64,
    /// Node budget for isomorphism backtracking searches.
    pub iso_node_budget: u64,
    /// Node budget for structure enumeration (module structures and algebra
    /// structure constants), which explores far more nodes per answer than an
    /// isomorphism search.
    pub enumeration_node_budget: u64,
    /// Largest materialized cell count per nerve dimension.
    pub nerve_cell_budget: u64,
    /// Optional shuffle seed for fuzzing search order; `None` keeps the
    /// deterministic canonical order.
    pub seed: Option<u64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_ring_order: 256,
            max_module_order: 1 << 16,
            gamma_budget: 50_000,
            iso_node_budget: 1_000_000,
            enumeration_node_budget: 200_000_000,
            nerve_cell_budget: 1_000_000,
            seed: None,
        }
    }
}

impl Config {
    pub fn with_module_cap(mut self, cap: u64) -> Self {
        self.max_module_order = cap;
        self
    }
}

/// splitmix64 step, used only for optional fuzz-order shuffling.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic permutation of `0..n` driven by a seed.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut state = seed;
    for i in (1..n).rev() {
        let j = (splitmix64(&mut state) % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    idx
}
