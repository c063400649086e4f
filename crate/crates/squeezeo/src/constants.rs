//! Physical constants and boundary-unit conversions.
//!
//! All internal computation is strict SI (seconds, meters, joules, V/m).
//! Human-facing interfaces (configs, CSV columns, CLI output) use the
//! natural units of the experiment instead — femtoseconds, nanojoules,
//! terahertz, micrometers and V/cm — and convert exactly once at the
//! boundary. Note `1 V/cm = 100 V/m`.

/// Fundamental constants (CODATA 2018 values).
///
/// Kept as an explicit parameter struct instead of globals so tests can
/// exercise scaling laws (e.g. the uncertainty-product invariant is linear
/// in ħ) without touching real physics values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    /// Vacuum speed of light [m/s] (exact).
    pub c: f64,
    /// Reduced Planck constant [J·s].
    pub hbar: f64,
    /// Vacuum permittivity [F/m].
    pub eps0: f64,
}

impl PhysConstants {
    /// CODATA 2018 recommended values.
    pub const CODATA2018: PhysConstants = PhysConstants {
        c: 299_792_458.0,
        hbar: 1.054_571_817e-34,
        eps0: 8.854_187_8128e-12,
    };
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::CODATA2018
    }
}

/// Boundary-unit conversion factors and helpers.
pub mod units {
    /// One femtosecond in seconds.
    pub const FS: f64 = 1e-15;
    /// One terahertz in hertz.
    pub const THZ: f64 = 1e12;
    /// One micrometer in meters.
    pub const UM: f64 = 1e-6;
    /// One nanojoule in joules.
    pub const NJ: f64 = 1e-9;
    /// One picometer-per-volt in meters-per-volt (for d_eff).
    pub const PM_PER_V: f64 = 1e-12;

    /// V/m → V/cm (1 V/cm = 100 V/m).
    pub fn to_v_per_cm(v_per_m: f64) -> f64 {
        v_per_m / 100.0
    }

    /// V/cm → V/m (1 V/cm = 100 V/m).
    pub fn to_v_per_m(v_per_cm: f64) -> f64 {
        v_per_cm * 100.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codata_2018_values_are_pinned() {
        let k = PhysConstants::default();
        assert_eq!(k.c, 299_792_458.0, "c is exact by SI definition");
        assert_eq!(k.hbar, 1.054_571_817e-34);
        assert_eq!(k.eps0, 8.854_187_8128e-12);
    }

    #[test]
    fn v_per_cm_round_trips_exactly() {
        // 100 is a power-of-two-free factor but representable; the round
        // trip must still be exact for decimal-friendly field values.
        for v in [0.0, 24.0, 81.0, 86.84, -13.5] {
            assert_eq!(units::to_v_per_cm(units::to_v_per_m(v)), v);
        }
    }
}
