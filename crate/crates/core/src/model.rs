//! Model parameters, server phase and the supplementary-variable state.

use crate::error::{Error, Result};

/// Arrival rates of the two classes and the common service rate.
///
/// Construction through [`ModelParams::new`] guarantees finite, non-negative
/// arrival rates and a strictly positive service rate. Stability is a
/// separate question, see [`ModelParams::require_stable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu: f64,
}

/// Traffic intensities derived from a parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traffic {
    pub rho1: f64,
    pub rho2: f64,
    pub rho: f64,
    pub stable: bool,
}

impl ModelParams {
    pub fn new(lambda1: f64, lambda2: f64, mu: f64) -> Result<Self> {
        let params = Self {
            lambda1,
            lambda2,
            mu,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks the rate domain and returns the traffic summary.
    ///
    /// `rho = 1` is reported as unstable.
    pub fn validate(&self) -> Result<Traffic> {
        for (name, value) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        if !self.mu.is_finite() || self.mu <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: self.mu,
            });
        }
        let rho1 = self.lambda1 / self.mu;
        let rho2 = self.lambda2 / self.mu;
        let rho = rho1 + rho2;
        Ok(Traffic {
            rho1,
            rho2,
            rho,
            stable: rho < 1.0,
        })
    }

    pub fn require_stable(&self) -> Result<Traffic> {
        let traffic = self.validate()?;
        if traffic.stable {
            Ok(traffic)
        } else {
            Err(Error::Unstable { rho: traffic.rho })
        }
    }

    pub fn rho(&self) -> f64 {
        (self.lambda1 + self.lambda2) / self.mu
    }

    /// Largest total event rate out of any state; the uniformization constant.
    pub fn total_rate(&self) -> f64 {
        self.lambda1 + self.lambda2 + self.mu
    }
}

/// What the server is doing: the supplementary variable that makes the count
/// process Markovian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ServerPhase {
    Free,
    ServingClass1,
    ServingClass2,
}

impl ServerPhase {
    pub const ALL: [ServerPhase; 3] = [Self::Free, Self::ServingClass1, Self::ServingClass2];

    pub fn code(self) -> u8 {
        match self {
            Self::Free => 0,
            Self::ServingClass1 => 1,
            Self::ServingClass2 => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Self::Free),
            1 => Some(Self::ServingClass1),
            2 => Some(Self::ServingClass2),
            _ => None,
        }
    }
}

/// Number of class-1 and class-2 customers present (including the one in
/// service) together with the server phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemState {
    pub n1: usize,
    pub n2: usize,
    pub phase: ServerPhase,
}

impl SystemState {
    pub const EMPTY: SystemState = SystemState {
        n1: 0,
        n2: 0,
        phase: ServerPhase::Free,
    };

    pub fn new(n1: usize, n2: usize, phase: ServerPhase) -> Self {
        Self { n1, n2, phase }
    }

    pub fn is_valid(&self) -> bool {
        match self.phase {
            ServerPhase::Free => self.n1 == 0 && self.n2 == 0,
            ServerPhase::ServingClass1 => self.n1 >= 1,
            ServerPhase::ServingClass2 => self.n2 >= 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn traffic_summary() {
        let t = ModelParams::new(1.0, 1.0, 4.0).unwrap().validate().unwrap();
        assert_eq!(t.rho, 0.5);
        assert!(t.stable);

        let t = ModelParams::new(0.0, 0.0, 1.0).unwrap().validate().unwrap();
        assert_eq!(t.rho, 0.0);
        assert!(t.stable);

        let p = ModelParams::new(3.0, 2.0, 4.0).unwrap();
        let t = p.validate().unwrap();
        assert_eq!(t.rho, 1.25);
        assert!(!t.stable);
        assert_eq!(p.require_stable(), Err(Error::Unstable { rho: 1.25 }));
    }

    #[test]
    fn rho_one_is_unstable() {
        let p = ModelParams::new(1.0, 1.0, 2.0).unwrap();
        assert!(!p.validate().unwrap().stable);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(matches!(
            ModelParams::new(-1.0, 1.0, 4.0),
            Err(Error::InvalidParameter {
                name: "lambda1",
                ..
            })
        ));
        assert!(ModelParams::new(1.0, f64::NAN, 4.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn state_validity() {
        assert!(SystemState::new(0, 0, ServerPhase::Free).is_valid());
        assert!(!SystemState::new(0, 1, ServerPhase::ServingClass1).is_valid());
        assert!(SystemState::new(1, 3, ServerPhase::ServingClass2).is_valid());
        assert!(!SystemState::new(1, 0, ServerPhase::Free).is_valid());
        assert!(!SystemState::new(4, 0, ServerPhase::ServingClass2).is_valid());
    }

    #[test]
    fn phase_codes_round_trip() {
        for phase in ServerPhase::ALL {
            assert_eq!(ServerPhase::from_code(phase.code()), Some(phase));
        }
        assert_eq!(ServerPhase::from_code(3), None);
    }

    proptest! {
        #[test]
        fn validity_matches_phase_constraints(n1 in 0usize..5, n2 in 0usize..5, code in 0u8..3) {
            let phase = ServerPhase::from_code(code).unwrap();
            let expected = match phase {
                ServerPhase::Free => n1 == 0 && n2 == 0,
                ServerPhase::ServingClass1 => n1 > 0,
                ServerPhase::ServingClass2 => n2 > 0,
            };
            prop_assert_eq!(SystemState::new(n1, n2, phase).is_valid(), expected);
        }

        #[test]
        fn validate_is_pure(l1 in 0.0f64..10.0, l2 in 0.0f64..10.0, mu in 0.01f64..10.0) {
            let p = ModelParams { lambda1: l1, lambda2: l2, mu };
            prop_assert_eq!(p.validate(), p.validate());
            let t = p.validate().unwrap();
            prop_assert_eq!(t.rho, t.rho1 + t.rho2);
            prop_assert_eq!(t.stable, t.rho < 1.0);
        }
    }
}
