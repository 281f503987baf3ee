use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RewardDomainError {
    #[error("area must be a finite value >= 0 (got {0})")]
    Area(f64),
    #[error("{name} must lie in [0, 1] (got {value})")]
    Probability { name: &'static str, value: f64 },
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Object reward: detection confidence times grasp confidence times a
/// sigmoid of the covered area (cm²) scaled by `k`.
pub fn reward_of(area_cm2: f64, p_detection: f64, p_grasp: f64, k: f64) -> Result<f64, RewardDomainError> {
    if !(area_cm2 >= 0.0 && area_cm2.is_finite()) {
        return Err(RewardDomainError::Area(area_cm2));
    }
    for (name, value) in [("p_detection", p_detection), ("p_grasp", p_grasp)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(RewardDomainError::Probability { name, value });
        }
    }
    Ok(p_detection * p_grasp * sigmoid(k * area_cm2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_area_gives_half() {
        assert_eq!(reward_of(0.0, 1.0, 1.0, 0.01).unwrap(), 0.5);
    }

    #[test]
    fn zero_factor_gives_zero() {
        assert_eq!(reward_of(250.0, 0.0, 0.7, 0.01).unwrap(), 0.0);
        assert_eq!(reward_of(250.0, 0.7, 0.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn reference_value() {
        let r = reward_of(100.0, 0.9, 0.8, 0.01).unwrap();
        assert!((r - 0.526_362_176_613_603_5).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(reward_of(-1.0, 0.5, 0.5, 0.01), Err(RewardDomainError::Area(_))));
        assert!(matches!(
            reward_of(1.0, 1.2, 0.5, 0.01),
            Err(RewardDomainError::Probability { name: "p_detection", .. })
        ));
        assert!(reward_of(1.0, 0.5, -0.1, 0.01).is_err());
        assert!(reward_of(f64::NAN, 0.5, 0.5, 0.01).is_err());
    }

    proptest! {
        #[test]
        fn rewards_stay_in_unit_interval(
            area in 0.0f64..1e6,
            pd in 0.0f64..=1.0,
            pg in 0.0f64..=1.0,
            k in 0.0f64..10.0,
        ) {
            let r = reward_of(area, pd, pg, k).unwrap();
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }
}
