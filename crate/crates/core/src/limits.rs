/// Hard caps on the exponential-cost brute-force routines.
///
/// Exceeding a cap is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest partition class scanned by the expansion search (2^n subsets).
    pub expansion_class: usize,
    /// Largest `2d` handled by the exact independent-set search in `locality`.
    pub locality_vertices: usize,
    /// Largest partition class for routines that scan all (E, O) zero-set pairs.
    pub pair_class: usize,
    /// Largest vertex count accepted by colouring enumeration.
    pub enumeration_vertices: usize,
    /// Largest state space accepted when building a transition matrix.
    pub states: usize,
    /// Largest number of raw candidates the reconstruction procedure may emit.
    pub candidates: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            expansion_class: 20,
            locality_vertices: 40,
            pair_class: 8,
            enumeration_vertices: 32,
            states: 20_000,
            candidates: 1 << 22,
        }
    }
}
