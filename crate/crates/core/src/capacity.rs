//! Dense-simulation size limits.
//!
//! Everything in this crate materialises operators as dense `2^N x 2^N`
//! matrices, so qubit counts are capped. The state-vector/density-matrix cap
//! defaults to 10 qubits and can be overridden with the `ACCREDIA_MAX_QUBITS`
//! environment variable (read once per process). Choi-matrix computations
//! square the dimension, so they are capped at `min(6, state limit)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_STATE_QUBITS: usize = 10;
pub const DEFAULT_MAX_CHOI_QUBITS: usize = 6;

static STATE_LIMIT: OnceLock<usize> = OnceLock::new();

/// Maximum qubit count for dense states and unitaries.
pub fn max_state_qubits() -> usize {
    *STATE_LIMIT.get_or_init(|| {
        std::env::var("ACCREDIA_MAX_QUBITS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or(DEFAULT_MAX_STATE_QUBITS)
    })
}

/// Maximum qubit count for Choi matrices and superoperators.
pub fn max_choi_qubits() -> usize {
    DEFAULT_MAX_CHOI_QUBITS.min(max_state_qubits())
}

/// Guard a dense-state computation on `n` qubits.
pub fn check_state(context: &'static str, n: usize) -> Result<()> {
    let limit = max_state_qubits();
    if n > limit {
        return Err(Error::Capacity {
            context,
            requested: n,
            limit,
        });
    }
    Ok(())
}

/// Guard a Choi/superoperator computation on `n` qubits.
pub fn check_choi(context: &'static str, n: usize) -> Result<()> {
    let limit = max_choi_qubits();
    if n > limit {
        return Err(Error::Capacity {
            context,
            requested: n,
            limit,
        });
    }
    Ok(())
}
