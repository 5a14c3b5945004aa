//! Seeded samplers for the benchmark manifolds.

use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Torus constants: tube of radius 0.5 around a circle of radius 2.
pub const TORUS_MAJOR: f64 = 2.0;
pub const TORUS_MINOR: f64 = 0.5;

/// Spiral pitch of the swissroll arm.
pub const ROLL_PITCH: f64 = 0.15;

/// Half-extents of the ribbon threaded through the unit circle.
pub const RIBBON_HALF_WIDTH: f64 = 0.3;
pub const RIBBON_HALF_LENGTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Circle,
    Torus,
    Hemisphere,
    SwissrollPlane,
    RibbonCircle,
}

impl Shape {
    pub const NAMES: [&'static str; 5] = [
        "circle",
        "torus",
        "hemisphere",
        "swissroll-plane",
        "ribbon-circle",
    ];

    /// Ambient dimension of the generated points.
    pub fn dim(self) -> usize {
        match self {
            Shape::Circle => 2,
            _ => 3,
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "circle" => Ok(Shape::Circle),
            "torus" => Ok(Shape::Torus),
            "hemisphere" => Ok(Shape::Hemisphere),
            "swissroll_plane" => Ok(Shape::SwissrollPlane),
            "ribbon_circle" => Ok(Shape::RibbonCircle),
            other => Err(Error::Config(format!(
                "unknown shape '{other}'; expected one of {}",
                Shape::NAMES.join(", ")
            ))),
        }
    }
}

/// Draw `n` points on the shape, uniform in parameter space, plus isotropic
/// gaussian noise of the given scale. Same arguments, same matrix.
pub fn generate(shape: Shape, n: usize, noise: f64, seed: u64) -> Result<Array2<f64>> {
    if n == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::Config(format!("noise {noise} must be >= 0")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let tau = 2.0 * std::f64::consts::PI;
    let d = shape.dim();
    let mut out = Array2::zeros((n, d));

    for i in 0..n {
        let p: [f64; 3] = match shape {
            Shape::Circle => {
                let t = rng.gen_range(0.0..tau);
                [t.cos(), t.sin(), 0.0]
            }
            Shape::Torus => {
                let u = rng.gen_range(0.0..tau);
                let v = rng.gen_range(0.0..tau);
                let ring = TORUS_MAJOR + TORUS_MINOR * v.cos();
                [ring * u.cos(), ring * u.sin(), TORUS_MINOR * v.sin()]
            }
            Shape::Hemisphere => {
                let u = rng.gen_range(0.0..tau);
                let v = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
                [v.sin() * u.cos(), v.sin() * u.sin(), v.cos()]
            }
            Shape::SwissrollPlane => {
                // first half spiral arm, second half the plane it pierces
                if i < n / 2 {
                    let t = rng.gen_range(std::f64::consts::PI..2.0 * tau);
                    let y = rng.gen_range(-1.0..1.0);
                    [ROLL_PITCH * t * t.cos(), y, ROLL_PITCH * t * t.sin()]
                } else {
                    let x = rng.gen_range(-2.0..2.0);
                    let y = rng.gen_range(-1.0..1.0);
                    [x, y, 0.0]
                }
            }
            Shape::RibbonCircle => {
                // circle in the y = 0 plane, ribbon threading it along y
                if i < n / 2 {
                    let t = rng.gen_range(0.0..tau);
                    [t.cos(), 0.0, t.sin()]
                } else {
                    let x = rng.gen_range(-RIBBON_HALF_WIDTH..RIBBON_HALF_WIDTH);
                    let y = rng.gen_range(-RIBBON_HALF_LENGTH..RIBBON_HALF_LENGTH);
                    [x, y, 0.0]
                }
            }
        };
        for j in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            out[(i, j)] = p[j] + noise * z;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_names_parse_and_reject() {
        assert_eq!("circle".parse::<Shape>().unwrap(), Shape::Circle);
        assert_eq!(
            "swissroll-plane".parse::<Shape>().unwrap(),
            Shape::SwissrollPlane
        );
        assert!("klein_bottle".parse::<Shape>().is_err());
    }

    #[test]
    fn same_seed_same_points() {
        let a = generate(Shape::Torus, 64, 0.1, 5).unwrap();
        let b = generate(Shape::Torus, 64, 0.1, 5).unwrap();
        assert_eq!(a, b);
        let c = generate(Shape::Torus, 64, 0.1, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noiseless_circle_sits_on_the_unit_circle() {
        let pts = generate(Shape::Circle, 128, 0.0, 1).unwrap();
        for row in pts.outer_iter() {
            let r = row.dot(&row).sqrt();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_torus_satisfies_its_implicit_equation() {
        let pts = generate(Shape::Torus, 128, 0.0, 2).unwrap();
        for row in pts.outer_iter() {
            let ring = (row[0] * row[0] + row[1] * row[1]).sqrt() - TORUS_MAJOR;
            let residual = ring * ring + row[2] * row[2] - TORUS_MINOR * TORUS_MINOR;
            assert!(residual.abs() < 1e-12, "off the torus by {residual}");
        }
    }

    #[test]
    fn noiseless_hemisphere_is_upper_unit_sphere() {
        let pts = generate(Shape::Hemisphere, 128, 0.0, 3).unwrap();
        for row in pts.outer_iter() {
            assert!((row.dot(&row).sqrt() - 1.0).abs() < 1e-12);
            assert!(row[2] >= 0.0);
        }
    }

    #[test]
    fn noiseless_swissroll_plane_members_check_out() {
        let n = 128;
        let pts = generate(Shape::SwissrollPlane, n, 0.0, 4).unwrap();
        for (i, row) in pts.outer_iter().enumerate() {
            if i < n / 2 {
                let r = (row[0] * row[0] + row[2] * row[2]).sqrt();
                let t = r / ROLL_PITCH;
                assert!((row[0] - r * t.cos()).abs() < 1e-12, "row {i} off the roll");
                assert!((row[2] - r * t.sin()).abs() < 1e-12, "row {i} off the roll");
            } else {
                assert_eq!(row[2], 0.0);
                assert!(row[0].abs() <= 2.0 && row[1].abs() <= 1.0);
            }
        }
    }

    #[test]
    fn noiseless_ribbon_circle_members_check_out() {
        let n = 128;
        let pts = generate(Shape::RibbonCircle, n, 0.0, 5).unwrap();
        for (i, row) in pts.outer_iter().enumerate() {
            if i < n / 2 {
                assert_eq!(row[1], 0.0);
                let r = (row[0] * row[0] + row[2] * row[2]).sqrt();
                assert!((r - 1.0).abs() < 1e-12);
            } else {
                assert_eq!(row[2], 0.0);
                assert!(row[0].abs() <= RIBBON_HALF_WIDTH);
                assert!(row[1].abs() <= RIBBON_HALF_LENGTH);
            }
        }
    }

    #[test]
    fn zero_samples_is_a_config_error() {
        assert!(generate(Shape::Circle, 0, 0.0, 0).is_err());
        assert!(generate(Shape::Circle, 1, -0.5, 0).is_err());
    }
}
