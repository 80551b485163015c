//! Schwarzian and spherical derivatives, Möbius maps, and pointwise checks of
//! the classical Schwarzian identities.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, FamilyExpr};
use crate::jet::{Jet3, JetConfig, JetError};

/// `|f'|` at or below this is treated as a critical point.
pub const DEFAULT_CRITICAL_FLOOR: f64 = 1e-12;

/// Minimum `|f(z) - w|` for the reciprocal check.
pub const RECIPROCAL_GUARD: f64 = 1e-9;

/// `f# = |f'| / (1 + |f|^2)`.
pub fn spherical_derivative(j: &Jet3) -> f64 {
    j.d1.norm() / (1.0 + j.v.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("critical point: |f'| = {d1_norm:e} is not above {floor:e}")]
pub struct CriticalPointError {
    pub d1_norm: f64,
    pub floor: f64,
}

/// `S_f = f'''/f' - 3/2 (f''/f')^2`.
pub fn schwarzian(j: &Jet3) -> Result<Complex64, CriticalPointError> {
    schwarzian_with_floor(j, DEFAULT_CRITICAL_FLOOR)
}

pub fn schwarzian_with_floor(j: &Jet3, floor: f64) -> Result<Complex64, CriticalPointError> {
    let d1_norm = j.d1.norm();
    if !(d1_norm > floor) {
        return Err(CriticalPointError { d1_norm, floor });
    }
    let q = j.d2 / j.d1;
    let s = j.d3 / j.d1 - 1.5 * q * q;
    if s.is_finite() {
        Ok(s)
    } else {
        Err(CriticalPointError { d1_norm, floor })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MobiusError {
    #[error("degenerate Möbius coefficients: |ad - bc| = {det_norm:e}")]
    Degenerate { det_norm: f64 },
    #[error("Möbius map has its pole at z = {at}")]
    Pole { at: Complex64 },
}

/// Image of a point under a Möbius map, on the extended plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedPoint {
    Finite(Complex64),
    Infinity,
}

/// `z ↦ (az + b) / (cz + d)`, stored with `ad - bc = 1` and the sign fixed so
/// the first nonzero coefficient has argument in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, MobiusError> {
        let det = a * d - b * c;
        let det_norm = det.norm();
        if !(det_norm > 1e-12) || !det.is_finite() {
            return Err(MobiusError::Degenerate { det_norm });
        }
        let s = det.sqrt();
        let (mut a, mut b, mut c, mut d) = (a / s, b / s, c / s, d / s);
        let lead = [a, b, c, d].into_iter().find(|x| *x != Complex64::new(0.0, 0.0));
        if let Some(lead) = lead {
            let arg = lead.im.atan2(lead.re);
            if !(0.0..std::f64::consts::PI).contains(&arg) {
                (a, b, c, d) = (-a, -b, -c, -d);
            }
        }
        Ok(Mobius { a, b, c, d })
    }

    /// Convenience constructor from real coefficients.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MobiusError> {
        let r = |x| Complex64::new(x, 0.0);
        Mobius::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity() -> Self {
        Mobius::real(1.0, 0.0, 0.0, 1.0).expect("identity is nondegenerate")
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, z: Complex64) -> ExtendedPoint {
        let den = self.c * z + self.d;
        if den == Complex64::new(0.0, 0.0) {
            ExtendedPoint::Infinity
        } else {
            ExtendedPoint::Finite((self.a * z + self.b) / den)
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Mobius) -> Mobius {
        let (p, q) = (self, inner);
        Mobius::new(
            p.a * q.a + p.b * q.c,
            p.a * q.b + p.b * q.d,
            p.c * q.a + p.d * q.c,
            p.c * q.b + p.d * q.d,
        )
        .expect("product of unimodular matrices is unimodular")
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d, -self.b, -self.c, self.a).expect("inverse of unimodular matrix")
    }

    /// `τ'(z) = 1 / (cz + d)^2`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64, MobiusError> {
        let den = self.c * z + self.d;
        if den.norm() < JetConfig::default().div_floor {
            return Err(MobiusError::Pole { at: z });
        }
        Ok((den * den).inv())
    }

    /// Jet of `τ ∘ f` from the jet of `f`, by the chain rule with
    /// `τ' = 1/D^2`, `τ'' = -2c/D^3`, `τ''' = 6c^2/D^4` for `D = c f + d`.
    /// Dividing jets directly would cancel terms of size `|c f|^2` against
    /// `ad - bc = 1`.
    pub fn apply_jet(&self, j: &Jet3) -> Result<Jet3, MobiusError> {
        let den = self.c * j.v + self.d;
        if den.norm() < JetConfig::default().div_floor {
            return Err(MobiusError::Pole { at: j.v });
        }
        let r = den.inv();
        let r2 = r * r;
        let value = (self.a * j.v + self.b) * r;
        let out = j.compose([value, r2, -2.0 * self.c * r2 * r, 6.0 * self.c * self.c * r2 * r2]);
        if out.is_finite() {
            Ok(out)
        } else {
            Err(MobiusError::Pole { at: j.v })
        }
    }

    /// Jet of the map itself at `z`.
    pub fn jet(&self, z: Complex64) -> Result<Jet3, MobiusError> {
        self.apply_jet(&Jet3::var(z))
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} z + {}) / ({} z + {})", self.a, self.b, self.c, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    /// Symmetric relative tolerance with a zero absolute floor.
    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn gaps(lhs: Complex64, rhs: Complex64) -> (f64, f64) {
        let abs_gap = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel_gap = if scale > 0.0 { abs_gap / scale } else { 0.0 };
        (abs_gap, rel_gap)
    }

    pub fn accepts(&self, lhs: Complex64, rhs: Complex64) -> bool {
        let (abs_gap, rel_gap) = Tolerance::gaps(lhs, rhs);
        abs_gap <= self.abs || rel_gap <= self.rel
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub pass: bool,
    pub tolerance_used: Tolerance,
}

impl IdentityReport {
    pub fn compare(lhs: Complex64, rhs: Complex64, tol: Tolerance) -> Self {
        let (abs_gap, rel_gap) = Tolerance::gaps(lhs, rhs);
        IdentityReport { lhs, rhs, abs_gap, rel_gap, pass: tol.accepts(lhs, rhs), tolerance_used: tol }
    }
}

/// Which function in a check produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    F,
    G,
    Composite,
    Reciprocal,
    Mobius,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::F => "f",
            Role::G => "g",
            Role::Composite => "composite",
            Role::Reciprocal => "reciprocal",
            Role::Mobius => "mobius",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("evaluating {role}: {source}")]
    Eval { role: Role, source: EvalError },
    #[error("{role} is not locally injective at {at}: {source}")]
    CriticalPoint { role: Role, at: Complex64, source: CriticalPointError },
    #[error("{role}: {source}")]
    Jet { role: Role, source: JetError },
    #[error(transparent)]
    Mobius(#[from] MobiusError),
    #[error("|f(z) - w| = {distance:e} is within the guard {guard:e}")]
    GuardViolation { distance: f64, guard: f64 },
    #[error("conjugacy fails at this point: |φ(f(z)) - g(φ(z))| = {gap:e}")]
    ConjugacyViolated { gap: f64 },
}

impl CheckError {
    pub fn is_critical_point(&self) -> bool {
        matches!(self, CheckError::CriticalPoint { .. })
    }
}

fn eval(f: &FamilyExpr, role: Role, n: f64, z: Complex64) -> Result<Jet3, CheckError> {
    f.eval_jet(n, z).map_err(|source| CheckError::Eval { role, source })
}

fn sd(j: &Jet3, role: Role, at: Complex64) -> Result<Complex64, CheckError> {
    schwarzian(j).map_err(|source| CheckError::CriticalPoint { role, at, source })
}

/// `S_{τ∘f}(z)` against `S_f(z)`.
pub fn check_mobius_invariance(
    f: &FamilyExpr,
    n: f64,
    m: &Mobius,
    z: Complex64,
    tol: Tolerance,
) -> Result<IdentityReport, CheckError> {
    let jf = eval(f, Role::F, n, z)?;
    let rhs = sd(&jf, Role::F, z)?;
    let composed = m.apply_jet(&jf)?;
    let lhs = sd(&composed, Role::Composite, z)?;
    Ok(IdentityReport::compare(lhs, rhs, tol))
}

/// `S_{g∘f}(z)` against `S_g(f(z)) f'(z)^2 + S_f(z)`.
pub fn check_composition_law(
    f: &FamilyExpr,
    g: &FamilyExpr,
    n: f64,
    z: Complex64,
    tol: Tolerance,
) -> Result<IdentityReport, CheckError> {
    let jf = eval(f, Role::F, n, z)?;
    let sf = sd(&jf, Role::F, z)?;
    let jg = eval(g, Role::G, n, jf.v)?;
    let sg = sd(&jg, Role::G, jf.v)?;
    let composed = g
        .eval_with(n, jf, &JetConfig::default())
        .map_err(|source| CheckError::Eval { role: Role::Composite, source })?;
    let lhs = sd(&composed, Role::Composite, z)?;
    let rhs = sg * jf.d1 * jf.d1 + sf;
    Ok(IdentityReport::compare(lhs, rhs, tol))
}

/// `S_{1/(f-w)}(z)` against `S_f(z)` for a value `w` the caller asserts `f`
/// omits. Only the sample point is guarded.
pub fn check_reciprocal(
    f: &FamilyExpr,
    n: f64,
    omitted: Complex64,
    z: Complex64,
    tol: Tolerance,
) -> Result<IdentityReport, CheckError> {
    let jf = eval(f, Role::F, n, z)?;
    let rhs = sd(&jf, Role::F, z)?;
    let distance = (jf.v - omitted).norm();
    if !(distance > RECIPROCAL_GUARD) {
        return Err(CheckError::GuardViolation { distance, guard: RECIPROCAL_GUARD });
    }
    let shifted = jf - Jet3::constant(omitted);
    let recip = shifted.recip().map_err(|source| CheckError::Jet { role: Role::Reciprocal, source })?;
    let lhs = sd(&recip, Role::Reciprocal, z)?;
    Ok(IdentityReport::compare(lhs, rhs, tol))
}

/// Conjugacy relation `S_g(φ(z)) φ'(z)^2 = S_f(z)` for `φ∘f = g∘φ`. The
/// conjugacy itself is verified at `z` first.
pub fn check_conjugation(
    f: &FamilyExpr,
    g: &FamilyExpr,
    phi: &Mobius,
    n: f64,
    z: Complex64,
    tol: Tolerance,
) -> Result<IdentityReport, CheckError> {
    let finite = |p: ExtendedPoint, at: Complex64| match p {
        ExtendedPoint::Finite(w) => Ok(w),
        ExtendedPoint::Infinity => Err(CheckError::Mobius(MobiusError::Pole { at })),
    };
    let jf = eval(f, Role::F, n, z)?;
    let phi_z = finite(phi.apply(z), z)?;
    let phi_f = finite(phi.apply(jf.v), jf.v)?;
    let jg = eval(g, Role::G, n, phi_z)?;
    if !tol.accepts(phi_f, jg.v) {
        return Err(CheckError::ConjugacyViolated { gap: (phi_f - jg.v).norm() });
    }
    let dphi = phi.derivative(z)?;
    let lhs = sd(&jg, Role::G, phi_z)? * dphi * dphi;
    let rhs = sd(&jf, Role::F, z)?;
    Ok(IdentityReport::compare(lhs, rhs, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn spherical_examples() {
        assert_eq!(spherical_derivative(&Jet3::new(r(1.0), r(1.0), r(1.0), r(1.0))), 0.5);
        for n in 1..=8 {
            let nf = n as f64;
            let j = parse("exp(n*z)").unwrap().eval_jet(nf, r(0.0)).unwrap();
            // n e^{nx} / (1 + e^{2nx}) at x = 0
            let direct = nf * (nf * 0.0f64).exp() / (1.0 + (2.0 * nf * 0.0f64).exp());
            assert!((spherical_derivative(&j) - direct).abs() < 1e-15);
        }
        assert_eq!(spherical_derivative(&Jet3::constant(c(3.0, -2.0))), 0.0);
    }

    #[test]
    fn schwarzian_examples() {
        let e1 = parse("exp(n*z)").unwrap();
        for z in [r(0.0), c(0.7, -1.2), c(-2.0, 0.3)] {
            let s = schwarzian(&e1.eval_jet(3.0, z).unwrap()).unwrap();
            assert!(close(s, r(-4.5), 1e-13), "{s}");
        }
        let mob = parse("(2*z+1)/(z+1)").unwrap();
        let s = schwarzian(&mob.eval_jet(0.0, r(0.0)).unwrap()).unwrap();
        assert!(s.norm() < 1e-14);
        let e2 = parse("exp(z/(n*z+1))").unwrap();
        let s = schwarzian(&e2.eval_jet(1.0, r(1.0)).unwrap()).unwrap();
        assert!(close(s, r(-1.0 / 32.0), 1e-13), "{s}");
    }

    #[test]
    fn critical_point() {
        let j = parse("z^2").unwrap().eval_jet(0.0, r(0.0)).unwrap();
        assert!(schwarzian(&j).is_err());
        assert!(schwarzian(&Jet3::new(r(0.0), r(1e-13), r(1.0), r(0.0))).is_err());
        assert!(schwarzian(&Jet3::new(r(0.0), r(1e-11), r(0.0), r(0.0))).is_ok());
    }

    #[test]
    fn mobius_normalization() {
        let m = Mobius::real(2.0, 1.0, 1.0, 1.0).unwrap();
        let [a, b, c_, d] = m.coefficients();
        assert!(close(a * d - b * c_, r(1.0), 1e-15));
        // (-a, -b, -c, -d) names the same map and normalizes identically
        assert_eq!(Mobius::real(-2.0, -1.0, -1.0, -1.0).unwrap(), m);
        assert_eq!(Mobius::real(4.0, 2.0, 2.0, 2.0).unwrap(), m);
        assert!(matches!(Mobius::real(1.0, 2.0, 2.0, 4.0), Err(MobiusError::Degenerate { .. })));
    }

    #[test]
    fn mobius_action() {
        assert_eq!(Mobius::identity().apply(r(5.0)), ExtendedPoint::Finite(r(5.0)));
        let shift = Mobius::real(1.0, 1.0, 0.0, 1.0).unwrap();
        let dbl = Mobius::real(2.0, 0.0, 0.0, 1.0).unwrap();
        let comp = shift.compose(&dbl);
        assert_eq!(comp, Mobius::real(2.0, 1.0, 0.0, 1.0).unwrap());
        match comp.apply(r(3.0)) {
            ExtendedPoint::Finite(w) => assert!(close(w, r(7.0), 1e-15)),
            ExtendedPoint::Infinity => panic!(),
        }
        let inv_z = Mobius::real(0.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(inv_z.apply(r(0.0)), ExtendedPoint::Infinity);
        let m = Mobius::real(3.0, 1.0, 1.0, -2.0).unwrap();
        match m.compose(&m.inverse()).apply(c(0.4, 0.9)) {
            ExtendedPoint::Finite(w) => assert!(close(w, c(0.4, 0.9), 1e-14)),
            ExtendedPoint::Infinity => panic!(),
        }
    }

    #[test]
    fn mobius_jet_of_reciprocal() {
        let inv_z = Mobius::real(0.0, 1.0, 1.0, 0.0).unwrap();
        let j = inv_z.jet(r(2.0)).unwrap();
        let want = [r(0.5), r(-0.25), r(0.25), r(-0.375)];
        for (g, w) in j.components().iter().zip(want) {
            assert!(close(*g, w, 1e-15));
        }
        assert!(matches!(inv_z.jet(r(0.0)), Err(MobiusError::Pole { .. })));
    }

    #[test]
    fn invariance_examples() {
        let f = parse("exp(n*z)").unwrap();
        let m = Mobius::real(3.0, 1.0, 1.0, -2.0).unwrap();
        let rep = check_mobius_invariance(&f, 2.0, &m, r(0.3), Tolerance::default()).unwrap();
        assert!(rep.pass);
        assert!(close(rep.lhs, r(-2.0), 1e-9) && close(rep.rhs, r(-2.0), 1e-12));
        let rep = check_mobius_invariance(&f, 2.0, &Mobius::identity(), r(0.3), Tolerance::default()).unwrap();
        assert_eq!(rep.abs_gap, 0.0);
        let sq = parse("z^2").unwrap();
        let err = check_mobius_invariance(&sq, 1.0, &m, r(0.0), Tolerance::default()).unwrap_err();
        assert!(err.is_critical_point());
    }

    #[test]
    fn composition_examples() {
        let f = parse("z^2").unwrap();
        let g = parse("exp(z)").unwrap();
        let rep = check_composition_law(&f, &g, 1.0, r(1.0), Tolerance::default()).unwrap();
        assert!(rep.pass);
        assert!(close(rep.lhs, r(-3.5), 1e-12) && close(rep.rhs, r(-3.5), 1e-12));

        // Möbius outer map contributes nothing
        let inv = parse("1/z").unwrap();
        let rep = check_composition_law(&g, &inv, 1.0, c(0.2, 0.4), Tolerance::default()).unwrap();
        assert!(rep.pass && close(rep.lhs, r(-0.5), 1e-12));

        // Möbius inner map: S_{g∘τ} = (S_g∘τ) τ'^2
        let tau = parse("(2*z+1)/(z+3)").unwrap();
        let rep = check_composition_law(&tau, &g, 1.0, c(0.1, 0.2), Tolerance::default()).unwrap();
        let dtau = Mobius::real(2.0, 1.0, 1.0, 3.0).unwrap().derivative(c(0.1, 0.2)).unwrap();
        assert!(rep.pass && close(rep.lhs, -0.5 * dtau * dtau, 1e-12));

        // f(z) = e^-5 is nonzero, so g = z^2 is locally injective there
        assert!(check_composition_law(&g, &f, 1.0, r(-5.0), Tolerance::default()).unwrap().pass);
        let err = check_composition_law(&f, &g, 1.0, r(0.0), Tolerance::default()).unwrap_err();
        assert!(matches!(err, CheckError::CriticalPoint { role: Role::F, .. }));
    }

    #[test]
    fn reciprocal_examples() {
        let f = parse("exp(z)").unwrap();
        let rep = check_reciprocal(&f, 1.0, r(0.0), c(1.0, 1.0), Tolerance::relative(1e-9)).unwrap();
        assert!(rep.pass && close(rep.lhs, r(-0.5), 1e-12) && close(rep.rhs, r(-0.5), 1e-12));
        let f5 = parse("exp(z)+5").unwrap();
        let rep = check_reciprocal(&f5, 1.0, r(5.0), c(1.0, 1.0), Tolerance::relative(1e-9)).unwrap();
        assert!(rep.pass && close(rep.lhs, r(-0.5), 1e-12));
        let konst = parse("3").unwrap();
        assert!(check_reciprocal(&konst, 1.0, r(0.0), r(1.0), Tolerance::default()).unwrap_err().is_critical_point());
        let err = check_reciprocal(&parse("z").unwrap(), 1.0, r(2.0), r(2.0), Tolerance::default()).unwrap_err();
        assert!(matches!(err, CheckError::GuardViolation { .. }));
    }

    #[test]
    fn conjugation_examples() {
        let f = parse("exp(n*z)").unwrap();
        let g = parse("n*exp(z)").unwrap();
        let phi = Mobius::real(4.0, 0.0, 0.0, 1.0).unwrap();
        let rep = check_conjugation(&f, &g, &phi, 4.0, r(0.2), Tolerance::default()).unwrap();
        assert!(rep.pass && close(rep.lhs, r(-8.0), 1e-12) && close(rep.rhs, r(-8.0), 1e-12));

        let f7 = parse("exp(z+n)").unwrap();
        let g7 = parse("exp(z)+n").unwrap();
        let phi7 = Mobius::real(1.0, 3.0, 0.0, 1.0).unwrap();
        let rep = check_conjugation(&f7, &g7, &phi7, 3.0, c(0.1, -0.4), Tolerance::default()).unwrap();
        assert!(rep.pass && close(rep.lhs, r(-0.5), 1e-12));

        let rep = check_conjugation(&f, &f, &Mobius::identity(), 2.0, r(0.5), Tolerance::default()).unwrap();
        assert_eq!(rep.abs_gap, 0.0);

        // wrong φ for the pair
        let err = check_conjugation(&f, &g, &Mobius::real(2.0, 0.0, 0.0, 1.0).unwrap(), 4.0, r(0.2), Tolerance::default());
        assert!(matches!(err, Err(CheckError::ConjugacyViolated { .. })));
    }
}
