//! Angles and small 3D vector helpers shared across the crate.
//!
//! Azimuths are measured in degrees from the global OX axis,
//! counter-clockwise when seen from above, and are normalized to
//! `(-180, 180]` everywhere. Elevation is measured from the horizontal
//! plane, positive upward, in `[-90, 90]`.

/// Wrap an angle in degrees to the `(-180, 180]` interval.
#[inline]
pub fn wrap_deg(angle_deg: f64) -> f64 {
    let mut a = angle_deg % 360.0;
    if a <= -180.0 {
        a += 360.0;
    } else if a > 180.0 {
        a -= 360.0;
    }
    a
}

/// A beam direction: azimuth from the OX axis and elevation from the
/// horizontal plane, both in degrees.
///
/// The azimuth is normalized to `(-180, 180]` on construction; that one
/// convention is used crate-wide.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamOrientation {
    azimuth_deg: f64,
    elevation_deg: f64,
}

impl BeamOrientation {
    /// New orientation with the azimuth wrapped into `(-180, 180]`.
    ///
    /// Panics if `elevation_deg` is outside `[-90, 90]` or either input is
    /// not finite.
    pub fn new(azimuth_deg: f64, elevation_deg: f64) -> Self {
        assert!(
            azimuth_deg.is_finite() && elevation_deg.is_finite(),
            "beam orientation angles must be finite"
        );
        assert!(
            (-90.0..=90.0).contains(&elevation_deg),
            "elevation {elevation_deg} out of [-90, 90]"
        );
        Self {
            azimuth_deg: wrap_deg(azimuth_deg),
            elevation_deg,
        }
    }

    /// Horizontal orientation at the given azimuth.
    pub fn horizontal(azimuth_deg: f64) -> Self {
        Self::new(azimuth_deg, 0.0)
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth_deg
    }

    pub fn elevation_deg(&self) -> f64 {
        self.elevation_deg
    }

    /// Unit direction vector (x east along OX, z up).
    pub fn unit_vector(&self) -> Vec3 {
        let az = self.azimuth_deg.to_radians();
        let el = self.elevation_deg.to_radians();
        Vec3 {
            x: el.cos() * az.cos(),
            y: el.cos() * az.sin(),
            z: el.sin(),
        }
    }
}

/// Minimal 3D vector in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn sub(&self, o: &Vec3) -> Vec3 {
        Vec3 {
            x: self.x - o.x,
            y: self.y - o.y,
            z: self.z - o.z,
        }
    }

    #[inline]
    pub fn add(&self, o: &Vec3) -> Vec3 {
        Vec3 {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }

    #[inline]
    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3 {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    pub fn normalized(&self) -> Vec3 {
        self.scale(1.0 / self.norm())
    }

    /// Azimuth (deg, wrapped) and elevation (deg) of the direction from
    /// `from` to `to`.
    pub fn direction_angles(from: &Vec3, to: &Vec3) -> (f64, f64) {
        let d = to.sub(from);
        let horiz = (d.x * d.x + d.y * d.y).sqrt();
        let az = d.y.atan2(d.x).to_degrees();
        let el = d.z.atan2(horiz).to_degrees();
        (wrap_deg(az), el)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_covers_both_directions() {
        assert_eq!(wrap_deg(270.0), -90.0);
        assert_eq!(wrap_deg(-270.0), 90.0);
        assert_eq!(wrap_deg(180.0), 180.0);
        assert_eq!(wrap_deg(-180.0), 180.0);
        assert_eq!(wrap_deg(540.0), 180.0);
        assert_eq!(wrap_deg(0.0), 0.0);
    }

    #[test]
    fn orientation_normalizes_azimuth() {
        let o = BeamOrientation::horizontal(270.0);
        assert_eq!(o.azimuth_deg(), -90.0);
        let o = BeamOrientation::new(190.0, 5.0);
        assert_eq!(o.azimuth_deg(), -170.0);
        assert_eq!(o.elevation_deg(), 5.0);
    }

    #[test]
    fn direction_angles_match_axes() {
        let a = Vec3::new(0.0, 0.0, 7.0);
        let b = Vec3::new(-100.0, 0.0, 7.0);
        let (az, el) = Vec3::direction_angles(&a, &b);
        assert_eq!(az, 180.0);
        assert_eq!(el, 0.0);
        let (az, el) = Vec3::direction_angles(&b, &a);
        assert_eq!(az, 0.0);
        assert_eq!(el, 0.0);
    }

    #[test]
    fn unit_vector_round_trip() {
        for &(az, el) in &[(0.0, 0.0), (90.0, 10.0), (-120.0, -30.0), (180.0, 45.0)] {
            let v = BeamOrientation::new(az, el).unit_vector();
            let origin = Vec3::default();
            let (az2, el2) = Vec3::direction_angles(&origin, &v);
            assert!((wrap_deg(az2 - az)).abs() < 1e-9, "az {az} -> {az2}");
            assert!((el2 - el).abs() < 1e-9);
        }
    }
}
