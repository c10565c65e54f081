/// Nesterov momentum schedule: `θ_0 = 0`, `θ_n = (1 + sqrt(1 + 4 θ_{n-1}²)) / 2`
/// and `t_n = (θ_{n-1} - 1) / θ_n`.
///
/// `t_1 = -1` and `t_2 = 0`; from `n = 3` on, `t_n ∈ (0, 1)` and
/// `t_n ~ (n - 2) / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumState {
    /// `θ_{n-1}`.
    pub theta_prev: f64,
    /// `θ_n`.
    pub theta: f64,
    /// `t_n`.
    pub t: f64,
}

impl MomentumState {
    /// State holding `θ_0 = 0`, before any step.
    pub fn initial() -> Self {
        Self {
            theta_prev: 0.0,
            theta: 0.0,
            t: 0.0,
        }
    }

    #[must_use]
    pub fn next(&self) -> Self {
        let theta = 0.5 * (1.0 + (1.0 + 4.0 * self.theta * self.theta).sqrt());
        Self {
            theta_prev: self.theta,
            theta,
            t: (self.theta - 1.0) / theta,
        }
    }
}

impl Default for MomentumState {
    fn default() -> Self {
        Self::initial()
    }
}
