//! Reference cocycle families runnable out of the box.
//!
//! Both presets share the schedule (3,3,4,4,5,5,6,6) extended by
//! repeat-last. The exponent sequence is `t_k = 1 + 2^(3-k)`: with the
//! default `t_k = 1 + 2^(-k)` the composite power absorbed by the witness
//! time `T_κ` stays bounded (its log tends to 2), so fiber pairs never
//! collapse; the shifted sequence keeps `t_k -> 1` while making `T_3 = 2^15`,
//! large enough to drive pair distances through the proximality thresholds.

use crate::cocycle::{CocycleFamily, TSequence};
use crate::error::{Error, Result};
use crate::odometer::BlockSchedule;

pub const PROXIMAL_C5: &str = "proximal-c5";
pub const ALMOST_PROXIMAL_C6_N3: &str = "almost-proximal-c6-n3";

fn reference_schedule() -> BlockSchedule {
    BlockSchedule::repeat_last(vec![3, 3, 4, 4, 5, 5, 6, 6]).expect("valid reference schedule")
}

fn reference_t() -> TSequence {
    TSequence::OnePlusPow2 { shift: 3 }
}

/// The proximal extension: full-circle power maps on even levels (one arc).
pub fn proximal_c5() -> CocycleFamily {
    CocycleFamily::new(reference_schedule(), reference_t(), 1).expect("valid preset")
}

/// The almost-proximal extension with three invariant arcs; every fiber
/// carries a 3-point almost-periodic configuration.
pub fn almost_proximal_c6_n3() -> CocycleFamily {
    CocycleFamily::new(reference_schedule(), reference_t(), 3).expect("valid preset")
}

pub fn names() -> &'static [&'static str] {
    &[PROXIMAL_C5, ALMOST_PROXIMAL_C6_N3]
}

pub fn by_name(name: &str) -> Result<CocycleFamily> {
    match name {
        PROXIMAL_C5 => Ok(proximal_c5()),
        ALMOST_PROXIMAL_C6_N3 => Ok(almost_proximal_c6_n3()),
        other => Err(Error::InvalidFamily(format!(
            "unknown preset {other:?}; available: {}",
            names().join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::validate_family;

    #[test]
    fn presets_resolve_by_name() {
        assert!(by_name(PROXIMAL_C5).is_ok());
        assert!(by_name(ALMOST_PROXIMAL_C6_N3).is_ok());
        assert!(by_name("nope").is_err());
    }

    #[test]
    fn presets_pass_validation() {
        for name in names() {
            let fam = by_name(name).unwrap();
            let report = validate_family(&fam, 6, 64, 1e-12).unwrap();
            assert!(report.pass(), "{name}: {:?}", report.violation());
        }
    }
}
