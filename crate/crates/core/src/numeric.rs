/// Relative tolerance under which a quotient is treated as an exact integer.
const SNAP_EPS: f64 = 1e-9;

/// `ceil(x)` that does not round `5.999999999999999` (an f64 artefact of
/// e.g. `40 / (20/3)`) up to 7.
pub(crate) fn snapped_ceil(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= SNAP_EPS * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    }
}

pub(crate) fn check_non_negative(value: f64) -> bool {
    value.is_finite() && value >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snaps_float_noise() {
        assert_eq!(snapped_ceil(40.0 / (20.0 / 3.0)), 6.0);
        assert_eq!(snapped_ceil(200.0 / (20.0 / 3.0)), 30.0);
        assert_eq!(snapped_ceil(6.000_000_000_1), 6.0);
        assert_eq!(snapped_ceil(6.01), 7.0);
        assert_eq!(snapped_ceil(0.0), 0.0);
        assert_eq!(snapped_ceil(0.2), 1.0);
    }
}
