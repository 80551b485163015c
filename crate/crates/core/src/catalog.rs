//! Named example families and conjugate pairs.

use crate::expr::{parse, FamilyExpr};
use crate::schwarzian::{Mobius, MobiusError};

/// A named family with its source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub description: &'static str,
}

pub const FAMILIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "example1",
        source: "exp(n*z)",
        description: "normal off the imaginary axis; Schwarzian -n^2/2",
    },
    CatalogEntry {
        name: "example2",
        source: "exp(z/(n*z+1))",
        description: "Schwarzian -1/(2(nz+1)^4), normal off the origin",
    },
    CatalogEntry { name: "example3", source: "exp(z)-n", description: "normal everywhere; Schwarzian -1/2" },
    CatalogEntry { name: "example4-f", source: "exp(n*z)", description: "conjugate to example4-g under z -> nz" },
    CatalogEntry { name: "example4-g", source: "n*exp(z)", description: "conjugate to example4-f under z -> nz" },
    CatalogEntry { name: "example7-f", source: "exp(z+n)", description: "conjugate to example7-g under z -> z+n" },
    CatalogEntry { name: "example7-g", source: "exp(z)+n", description: "conjugate to example7-f under z -> z+n" },
];

pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    FAMILIES.iter().find(|e| e.name == name)
}

/// Parses a catalog family by name.
pub fn family(name: &str) -> Option<FamilyExpr> {
    lookup(name).map(|e| parse(e.source).expect("catalog sources parse"))
}

/// A pair `f ~ g` conjugate under an `n`-dependent Möbius map.
#[derive(Debug, Clone, Copy)]
pub struct ConjugatePair {
    pub name: &'static str,
    pub f: &'static str,
    pub g: &'static str,
    /// Real coefficients `(a, b, c, d)` of φ_n.
    pub phi: fn(f64) -> [f64; 4],
}

impl ConjugatePair {
    pub fn f(&self) -> FamilyExpr {
        family(self.f).expect("pair member in catalog")
    }

    pub fn g(&self) -> FamilyExpr {
        family(self.g).expect("pair member in catalog")
    }

    pub fn phi(&self, n: f64) -> Result<Mobius, MobiusError> {
        let [a, b, c, d] = (self.phi)(n);
        Mobius::real(a, b, c, d)
    }
}

pub const PAIRS: &[ConjugatePair] = &[
    ConjugatePair { name: "example4", f: "example4-f", g: "example4-g", phi: |n| [n, 0.0, 0.0, 1.0] },
    ConjugatePair { name: "example7", f: "example7-f", g: "example7-g", phi: |n| [1.0, n, 0.0, 1.0] },
];

pub fn pair(name: &str) -> Option<&'static ConjugatePair> {
    PAIRS.iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schwarzian::ExtendedPoint;
    use num_complex::Complex64;

    #[test]
    fn every_entry_parses() {
        for e in FAMILIES {
            assert!(family(e.name).is_some(), "{}", e.name);
        }
        assert!(family("example5").is_none());
    }

    #[test]
    fn pairs_are_conjugate() {
        for p in PAIRS {
            let (f, g) = (p.f(), p.g());
            for n in 1..=5 {
                let nf = n as f64;
                let phi = p.phi(nf).unwrap();
                let z = Complex64::new(0.3, -0.2);
                let fz = f.eval_jet(nf, z).unwrap().v;
                let (ExtendedPoint::Finite(lhs), ExtendedPoint::Finite(pz)) = (phi.apply(fz), phi.apply(z)) else {
                    panic!("finite points map to finite points");
                };
                let rhs = g.eval_jet(nf, pz).unwrap().v;
                assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "{} n={n}", p.name);
            }
        }
    }
}
