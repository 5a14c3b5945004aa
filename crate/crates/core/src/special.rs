//! Digamma and trigamma, needed by the Dirichlet fit.
//!
//! Upward recurrence into the asymptotic regime, then the standard
//! Bernoulli-number expansions. Accurate to ~1e-12 for x > 0, which is
//! plenty for a fixed-point iteration that stops at 1e-10.

/// First derivative of ln Γ.
pub fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + x.ln()
        - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))))
}

/// Second derivative of ln Γ.
pub fn trigamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv
        * (1.0
            + inv * (0.5
                + inv * (1.0 / 6.0
                    - inv2
                        * (1.0 / 30.0
                            - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0))))))
}

/// Inverse of `digamma`, via Newton steps from Minka's starting point.
pub fn inverse_digamma(y: f64) -> f64 {
    let mut x = if y >= -2.22 {
        y.exp() + 0.5
    } else {
        -1.0 / (y + 0.5772156649015329)
    };
    for _ in 0..8 {
        x -= (digamma(x) - y) / trigamma(x);
        if !(x > 0.0) {
            x = 1e-12;
        }
    }
    x
}
