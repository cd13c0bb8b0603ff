//! Square-law attrition with deterministic annihilation of the loser.
//!
//! With `dA/dt = -beta * B` and `dB/dt = -alpha * A` the quantity
//! `alpha * A^2 - beta * B^2` is conserved, so the battle is decided by its sign
//! and the winner's survivors follow in closed form.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BattleWinner {
    A,
    B,
    Draw,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BattleOutcome {
    pub winner: BattleWinner,
    /// Strength left to the winner; 0 for a draw.
    pub survivors: f64,
}

/// `alpha` is force A's attrition coefficient against B, `beta` is B's against A.
pub fn resolve_lanchester(a: f64, b: f64, alpha: f64, beta: f64) -> BattleOutcome {
    debug_assert!(a >= 0.0 && b >= 0.0, "strengths must be non-negative");
    debug_assert!(alpha > 0.0 && beta > 0.0, "coefficients must be positive");
    let invariant = alpha * a * a - beta * b * b;
    if invariant > 0.0 {
        BattleOutcome { winner: BattleWinner::A, survivors: (invariant / alpha).sqrt() }
    } else if invariant < 0.0 {
        BattleOutcome { winner: BattleWinner::B, survivors: (-invariant / beta).sqrt() }
    } else {
        BattleOutcome { winner: BattleWinner::Draw, survivors: 0.0 }
    }
}
