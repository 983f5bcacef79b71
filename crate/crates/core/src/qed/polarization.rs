use crate::classical::{Mat3, Vec3};
use crate::error::{Error, Result};

/// Two real unit vectors orthogonal to `q` and to each other.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationPair {
    pub e1: Vec3,
    pub e2: Vec3,
}

impl PolarizationPair {
    pub fn get(&self, lambda: usize) -> Vec3 {
        if lambda == 1 {
            self.e1
        } else {
            self.e2
        }
    }

    /// Rotates the pair by `angle` about its common normal.
    pub fn mixed(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { e1: self.e1 * c + self.e2 * s, e2: self.e2 * c - self.e1 * s }
    }
}

fn nonzero(q: &Vec3) -> Result<()> {
    if q.iter().all(|x| *x == 0.0) || !q.iter().all(|x| x.is_finite()) {
        return Err(Error::Degenerate(format!("polarization needs a nonzero finite wavevector, got {q:?}")));
    }
    Ok(())
}

/// The member of `{q, −q}` whose first nonzero component is positive.
fn representative(q: &Vec3) -> Vec3 {
    match q.iter().find(|x| **x != 0.0) {
        Some(x) if *x < 0.0 => -q,
        _ => *q,
    }
}

/// `e1 = normalize(q̂ × a)` with `a` the coordinate axis least aligned with
/// `q` (first axis on ties), `e2 = q̂ × e1`, both built from the
/// representative of `±q` so that `e(−q) = e(q)`.
pub fn polarization_pair(q: &Vec3) -> Result<PolarizationPair> {
    nonzero(q)?;
    let rep = representative(q);
    let qh = rep.normalize();
    let mut axis = 0;
    for i in 1..3 {
        if rep[i].abs() < rep[axis].abs() {
            axis = i;
        }
    }
    let e1 = qh.cross(&Vec3::ith(axis, 1.0)).normalize();
    let e2 = qh.cross(&e1);
    Ok(PolarizationPair { e1, e2 })
}

/// `Σ_λ e_λ ⊗ e_λ`.
pub fn polarization_sum(q: &Vec3) -> Result<Mat3> {
    let pair = polarization_pair(q)?;
    Ok(pair.e1 * pair.e1.transpose() + pair.e2 * pair.e2.transpose())
}

/// `I − q̂ ⊗ q̂`.
pub fn transverse_projector(q: &Vec3) -> Result<Mat3> {
    nonzero(q)?;
    let qh = q.normalize();
    Ok(Mat3::identity() - qh * qh.transpose())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use proptest::prelude::*;

    use super::*;

    fn max_abs(m: &Mat3) -> f64 {
        m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    #[test]
    fn z_axis_pair_spans_xy_plane() {
        let pair = polarization_pair(&Vec3::new(0.0, 0.0, 2.5)).unwrap();
        assert_eq!(pair.e1.z, 0.0);
        assert_eq!(pair.e2.z, 0.0);
        assert!((pair.e1.dot(&pair.e2)).abs() < 1e-15);
        let sum = polarization_sum(&Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!(max_abs(&(sum - Mat3::from_diagonal(&Vec3::new(1.0, 1.0, 0.0)))) < 1e-15);
    }

    #[test]
    fn frozen_diagonal_pair() {
        // q = (1,1,0): least aligned axis is z.
        let pair = polarization_pair(&Vec3::new(1.0, 1.0, 0.0)).unwrap();
        assert!((pair.e1 - Vec3::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((pair.e2 - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        assert_eq!(polarization_pair(&Vec3::new(-1.0, -1.0, 0.0)).unwrap(), pair);
    }

    #[test]
    fn zero_wavevector_is_degenerate() {
        assert!(matches!(polarization_pair(&Vec3::zeros()), Err(Error::Degenerate(_))));
        assert!(matches!(polarization_sum(&Vec3::zeros()), Err(Error::Degenerate(_))));
        assert!(transverse_projector(&Vec3::zeros()).is_err());
    }

    proptest! {
        #[test]
        fn pair_is_orthonormal_transverse_and_even(x in -20i32..=20, y in -20i32..=20, z in -20i32..=20) {
            prop_assume!((x, y, z) != (0, 0, 0));
            let q = Vec3::new(x as f64, y as f64, z as f64);
            let pair = polarization_pair(&q).unwrap();
            let qh = q.normalize();
            prop_assert!(pair.e1.dot(&qh).abs() <= 1e-14);
            prop_assert!(pair.e2.dot(&qh).abs() <= 1e-14);
            prop_assert!((pair.e1.norm() - 1.0).abs() <= 1e-14);
            prop_assert!((pair.e2.norm() - 1.0).abs() <= 1e-14);
            prop_assert!(pair.e1.dot(&pair.e2).abs() <= 1e-14);
            prop_assert_eq!(polarization_pair(&-q).unwrap(), pair);

            let sum = polarization_sum(&q).unwrap();
            let proj = transverse_projector(&q).unwrap();
            prop_assert!(max_abs(&(sum - proj)) <= 1e-14);
            prop_assert!((sum.trace() - 2.0).abs() <= 1e-14);
            prop_assert!(max_abs(&(proj * proj - proj)) <= 1e-14);
        }
    }
}
