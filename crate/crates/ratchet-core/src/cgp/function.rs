//! The pixel function set.
//!
//! Every function takes the node's two connected values `x` and `y` and its
//! parameter gene `pm`, all in [0, 255], and returns a value in [0, 255].
//! Illegible operators in the original listing are read as `+`, and the
//! `(x|y)` condition of functions 4 and 12 as `x > y`. Alternate readings
//! only need to change this file.

use core::f64::consts::PI;

use crate::Error;

pub const FUNCTION_COUNT: u8 = 13;

/// Whether function `k` reads its second input.
pub fn uses_second_input(k: u8) -> bool {
    matches!(k, 1 | 3 | 4 | 9 | 11 | 12 | 13)
}

/// Whether function `k` reads the parameter gene.
pub fn uses_parameter(k: u8) -> bool {
    matches!(k, 2 | 9 | 10 | 13)
}

fn to_int(v: f64) -> u32 {
    libm::round(v.clamp(0.0, 255.0)) as u32
}

fn finish(v: f64) -> f64 {
    if v.is_finite() {
        v.clamp(0.0, 255.0)
    } else {
        0.0
    }
}

/// Applies function `k` (1..=13).
pub fn apply_function(k: u8, x: f64, y: f64, pm: f64) -> Result<f64, Error> {
    let v = match k {
        1 => f64::from(to_int(x) | to_int(y)),
        2 => f64::from(to_int(pm) & to_int(x)),
        3 => (x + y) % 255.0,
        4 => {
            if x > y {
                x - y
            } else {
                y - x
            }
        }
        5 => 255.0 - x,
        6 => libm::fabs(libm::cos(x) * 255.0),
        7 => libm::fabs(libm::tan(((x % 45.0) * PI) / 180.0) * 255.0),
        8 => libm::fabs(libm::tan(x) * 255.0) % 255.0,
        9 => {
            let (dx, dy) = (x - pm, y - pm);
            f64::min(libm::sqrt(dx * dx + dy * dy), 255.0)
        }
        10 => x % (pm + 1.0) + (255.0 - pm),
        11 => (x + y) / 2.0,
        12 => {
            if x > y {
                255.0 * ((y + 1.0) / (x + 1.0))
            } else {
                255.0 * ((x + 1.0) / (y + 1.0))
            }
        }
        13 => {
            let pm2 = pm * pm;
            libm::fabs(libm::sqrt(libm::fabs((x - pm2) + (y - pm2))) % 255.0)
        }
        _ => return Err(Error::UnknownFunction(k)),
    };
    Ok(finish(v))
}

/// [`apply_function`] for genes already known to be valid.
pub(crate) fn apply_valid(k: u8, x: f64, y: f64, pm: f64) -> f64 {
    apply_function(k, x, y, pm).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_examples() {
        assert_eq!(apply_function(5, 100.0, 0.0, 0.0).unwrap(), 155.0);
        assert_eq!(apply_function(1, 12.0, 10.0, 0.0).unwrap(), 14.0);
        assert_eq!(apply_function(11, 10.0, 20.0, 0.0).unwrap(), 15.0);
        assert_eq!(apply_function(3, 200.0, 100.0, 0.0).unwrap(), 45.0);
    }

    #[test]
    fn conditional_and_division_guards() {
        assert_eq!(apply_function(4, 30.0, 10.0, 0.0).unwrap(), 20.0);
        assert_eq!(apply_function(4, 10.0, 30.0, 0.0).unwrap(), 20.0);
        // zero denominators are guarded by the +1
        assert_eq!(apply_function(12, 0.0, 0.0, 0.0).unwrap(), 255.0);
        assert_eq!(apply_function(12, 254.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(apply_function(10, 200.0, 0.0, 0.0).unwrap(), 255.0);
        assert_eq!(apply_function(10, 7.0, 0.0, 255.0).unwrap(), 7.0);
    }

    #[test]
    fn distance_is_thresholded() {
        assert_eq!(apply_function(9, 255.0, 255.0, 0.0).unwrap(), 255.0);
        assert_eq!(apply_function(9, 3.0, 4.0, 0.0).unwrap(), 5.0);
    }

    #[test]
    fn bitwise_and_with_parameter() {
        assert_eq!(apply_function(2, 0b1010_1010 as f64, 0.0, 0b0000_1111 as f64).unwrap(), 10.0);
    }

    #[test]
    fn unknown_function_is_rejected() {
        assert_eq!(apply_function(0, 1.0, 1.0, 1.0), Err(Error::UnknownFunction(0)));
        assert_eq!(apply_function(14, 1.0, 1.0, 1.0), Err(Error::UnknownFunction(14)));
    }
}
