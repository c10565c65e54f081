/// Weighted reference value for the nonmonotone Armijo test:
/// `Q_n = ϱ Q_{n-1} + 1`, `C_n = (ϱ Q_{n-1} C_{n-1} + E(u_n)) / Q_n`,
/// starting from `Q_0 = 1`, `C_0 = E(u_0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonmonotoneState {
    pub c: f64,
    pub q: f64,
}

impl NonmonotoneState {
    pub fn new(initial_energy: f64) -> Self {
        Self {
            c: initial_energy,
            q: 1.0,
        }
    }

    #[must_use]
    pub fn update(&self, energy: f64, varrho: f64) -> Self {
        let q = varrho * self.q + 1.0;
        Self {
            c: (varrho * self.q * self.c + energy) / q,
            q,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_update() {
        let s = NonmonotoneState::new(5.0).update(3.0, 0.85);
        assert!((s.q - 1.85).abs() < 1e-15);
        assert!((s.c - 7.25 / 1.85).abs() < 1e-15);
    }

    #[test]
    fn monotone_limit_and_fixed_point() {
        let s = NonmonotoneState { c: 4.0, q: 2.5 }.update(1.5, 0.0);
        assert_eq!((s.c, s.q), (1.5, 1.0));
        let mut s = NonmonotoneState::new(2.0);
        for _ in 0..50 {
            s = s.update(2.0, 0.85);
            assert!((s.c - 2.0).abs() < 1e-15);
        }
        assert!(s.q < 1.0 / (1.0 - 0.85));
    }
}
