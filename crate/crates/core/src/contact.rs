//! Hertzian ball-raceway point contact for steel (E = 2e5 MPa, nu = 0.3).
//!
//! Units: N, mm. Deflection follows Houpert's fit, valid for osculation
//! ratios between 0.89 and 0.99.

use crate::error::{Error, Result};
use crate::scalar::{pow3_2, Real};

/// Coefficients of the Houpert deflection fit and its stiffness inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactLaw<T> {
    pub deflection_coefficient: T,
    pub stiffness_coefficient: T,
    pub deflection_exponent: T,
    pub stiffness_exponent: T,
    pub osculation_range: (T, T),
}

impl<T: Real> Default for ContactLaw<T> {
    fn default() -> Self {
        Self::steel()
    }
}

impl<T: Real> ContactLaw<T> {
    /// Fixed steel constants. The stiffness coefficient keeps the rounded
    /// published value (88220) rather than the exact inversion (~88207.6).
    pub fn steel() -> Self {
        Self {
            deflection_coefficient: T::lit(5.046e-4),
            stiffness_coefficient: T::lit(88220.0),
            deflection_exponent: T::lit(0.2414),
            stiffness_exponent: T::lit(0.3621),
            osculation_range: (T::lit(0.89), T::lit(0.99)),
        }
    }

    fn check_osculation(&self, s: T) -> Result<()> {
        let (lo, hi) = self.osculation_range;
        // small slack so that values printed at the bounds are accepted
        let eps = T::lit(1e-12);
        if s >= lo - eps && s <= hi + eps {
            Ok(())
        } else {
            Err(Error::OsculationOutOfRange(s.as_f64()))
        }
    }

    /// Contact deflection under load `q` for ball diameter `dw` and osculation `s`.
    pub fn deflection(&self, q: T, dw: T, s: T) -> Result<T> {
        self.check_osculation(s)?;
        if q < T::zero() || !(dw > T::zero()) {
            return Err(Error::Contact(format!("load {q:?} / ball diameter {dw:?}")));
        }
        Ok(self.deflection_coefficient
            * (T::one() - s).powf(self.deflection_exponent)
            * q.cbrt()
            * q.cbrt()
            / dw.cbrt())
    }

    /// Load-deflection constant `K` in `Q = K δ^{3/2}`; zero unless `delta > 0`.
    pub fn stiffness(&self, dw: T, s: T, delta: T) -> Result<T> {
        let k = self.active_stiffness(dw, s)?;
        Ok(if delta > T::zero() { k } else { T::zero() })
    }

    /// `K` of a closed contact.
    pub fn active_stiffness(&self, dw: T, s: T) -> Result<T> {
        self.check_osculation(s)?;
        if !(dw > T::zero()) {
            return Err(Error::Contact(format!("ball diameter {dw:?}")));
        }
        Ok(self.stiffness_coefficient * dw.sqrt() / (T::one() - s).powf(self.stiffness_exponent))
    }
}

/// Convenience wrapper over [`ContactLaw::deflection`] with steel constants.
pub fn hertz_deflection<T: Real>(q: T, dw: T, s: T) -> Result<T> {
    ContactLaw::steel().deflection(q, dw, s)
}

/// Convenience wrapper over [`ContactLaw::stiffness`] with steel constants.
pub fn hertz_stiffness<T: Real>(dw: T, s: T, delta: T) -> Result<T> {
    ContactLaw::steel().stiffness(dw, s, delta)
}

/// Stiffness of two Hertzian contacts in series:
/// `K^{-2/3} = K_a^{-2/3} + K_b^{-2/3}`. Zero if either contact is open.
pub fn series_stiffness<T: Real>(ka: T, kb: T) -> T {
    if ka <= T::zero() || kb <= T::zero() {
        return T::zero();
    }
    let two_thirds = T::lit(2.0 / 3.0);
    let inv = ka.powf(-two_thirds) + kb.powf(-two_thirds);
    inv.powf(-T::lit(1.5))
}

/// Splits a total interference over two series contacts so both carry the
/// same force.
pub fn split_interference<T: Real>(delta_total: T, ka: T, kb: T) -> Result<(T, T)> {
    if !(delta_total > T::zero() && ka > T::zero() && kb > T::zero()) {
        return Err(Error::Contact(format!(
            "split needs positive interference and stiffnesses, got {delta_total:?}, {ka:?}, {kb:?}"
        )));
    }
    let kt = series_stiffness(ka, kb);
    let two_thirds = T::lit(2.0 / 3.0);
    let da = delta_total * (kt / ka).powf(two_thirds);
    // remainder keeps the sum exact
    Ok((da, delta_total - da))
}

/// `Q = K_Tot max(δ_Tot, 0)^{3/2}`.
pub fn contact_force<T: Real>(k_total: T, delta_total: T) -> T {
    if delta_total > T::zero() && k_total > T::zero() {
        k_total * pow3_2(delta_total)
    } else {
        T::zero()
    }
}

/// Contact state of one diagonal (two contacts in series through a ball).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalContactState<T> {
    pub delta_total: T,
    /// Deflection of contact `i` and `i + 2`.
    pub delta: (T, T),
    /// `K` of contact `i` and `i + 2`.
    pub stiffness: (T, T),
    pub k_total: T,
    pub force: T,
    pub active: bool,
}

impl<T: Real> DiagonalContactState<T> {
    /// Evaluates a diagonal from its total interference and the closed-contact
    /// stiffnesses of both contacts.
    pub fn evaluate(delta_total: T, ka: T, kb: T) -> Self {
        if delta_total > T::zero() {
            let k_total = series_stiffness(ka, kb);
            let delta = split_interference(delta_total, ka, kb).unwrap_or((T::zero(), T::zero()));
            Self {
                delta_total,
                delta,
                stiffness: (ka, kb),
                k_total,
                force: contact_force(k_total, delta_total),
                active: true,
            }
        } else {
            Self {
                delta_total,
                delta: (T::zero(), T::zero()),
                stiffness: (T::zero(), T::zero()),
                k_total: T::zero(),
                force: T::zero(),
                active: false,
            }
        }
    }
}
