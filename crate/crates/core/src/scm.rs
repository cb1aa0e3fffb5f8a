//! Boolean response-function machinery for cause-effect models.
//!
//! A Boolean mechanism `Z := f(X)` with independent noise is a distribution
//! over the four unary response functions; a mechanism `Z := h(X, Y)` is a
//! distribution over the sixteen binary ones. Observed kernels `P(Z | cause)`
//! pin the unary distribution down to a one-parameter family `a(λ)`.
//!
//! Index conventions are fixed here and used by every constraint matrix:
//!
//! * unary: `f0 ≡ 0`, `f1 ≡ 1`, `f2 = ID`, `f3 = NOT`;
//! * binary: `h_k(x, y)` is bit `2x + y` of `k`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Output tables of the unary functions, indexed `[id][input]`.
const UNARY_TABLE: [[u8; 2]; 4] = [[0, 0], [1, 1], [0, 1], [1, 0]];

/// One of the four functions `{0,1} → {0,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnaryResponse(u8);

impl UnaryResponse {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1);
    pub const ID: Self = Self(2);
    pub const NOT: Self = Self(3);

    pub fn new(id: u8) -> Option<Self> {
        (id < 4).then_some(Self(id))
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub fn eval(self, x: u8) -> u8 {
        UNARY_TABLE[self.0 as usize][(x & 1) as usize]
    }

    /// Inverse of [`eval`](Self::eval) over both inputs.
    pub fn from_table(at0: u8, at1: u8) -> Self {
        match (at0 & 1, at1 & 1) {
            (0, 0) => Self::ZERO,
            (1, 1) => Self::ONE,
            (0, 1) => Self::ID,
            _ => Self::NOT,
        }
    }
}

impl fmt::Display for UnaryResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = ["ZERO", "ONE", "ID", "NOT"][self.0 as usize];
        write!(f, "f{}({name})", self.0)
    }
}

/// One of the sixteen functions `{0,1}² → {0,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryResponse(u8);

impl BinaryResponse {
    pub fn new(id: u8) -> Option<Self> {
        (id < 16).then_some(Self(id))
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub fn eval(self, x: u8, y: u8) -> u8 {
        (self.0 >> (2 * (x & 1) + (y & 1))) & 1
    }
}

impl fmt::Display for BinaryResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.0)
    }
}

pub fn enumerate_unary() -> Vec<UnaryResponse> {
    (0..4).map(UnaryResponse).collect()
}

pub fn enumerate_binary() -> Vec<BinaryResponse> {
    (0..16).map(BinaryResponse).collect()
}

/// Observed kernel `P(Z=0 | cause)` of one dataset plus its cause marginal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarginalObservation {
    /// `P(Z=0 | cause=0)`
    pub p0_given0: Rational,
    /// `P(Z=0 | cause=1)`
    pub p0_given1: Rational,
    /// `P(cause=1)`
    pub cause1: Rational,
}

impl MarginalObservation {
    /// Validates that all entries are probabilities and the cause is not
    /// constant. `cause` names the cause variable in error messages.
    pub fn new(
        p0_given0: Rational,
        p0_given1: Rational,
        cause1: Rational,
        cause: &'static str,
    ) -> Result<Self> {
        for (name, v) in [
            (format!("P(Z=0|{cause}=0)"), &p0_given0),
            (format!("P(Z=0|{cause}=1)"), &p0_given1),
            (format!("P({cause}=1)"), &cause1),
        ] {
            if !rational::is_probability(v) {
                return Err(Error::InvalidProbability { name, value: v.to_string() });
            }
        }
        if cause1.is_zero() || cause1.is_one() {
            return Err(Error::DegenerateCause { cause, value: cause1.to_string() });
        }
        Ok(Self { p0_given0, p0_given1, cause1 })
    }

    pub fn cause0(&self) -> Rational {
        Rational::one() - &self.cause1
    }

    /// `P(Z=0)` implied by this dataset.
    pub fn p_z0(&self) -> Rational {
        &self.p0_given0 * self.cause0() + &self.p0_given1 * &self.cause1
    }

    /// Same data with the cause values 0 and 1 swapped.
    pub fn relabeled(&self) -> Self {
        Self {
            p0_given0: self.p0_given1.clone(),
            p0_given1: self.p0_given0.clone(),
            cause1: self.cause0(),
        }
    }
}

/// A probability vector over the four unary response functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResponseVector4 {
    entries: [Rational; 4],
}

impl ResponseVector4 {
    pub fn new(entries: [Rational; 4]) -> Result<Self> {
        for (k, v) in entries.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::InvalidProbability { name: format!("a{k}"), value: v.to_string() });
            }
        }
        let total: Rational = entries.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidProbability {
                name: "sum of response weights".into(),
                value: total.to_string(),
            });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Rational; 4] {
        &self.entries
    }

    pub fn get(&self, f: UnaryResponse) -> &Rational {
        &self.entries[f.id()]
    }
}

/// A probability vector `c ∈ Δ¹⁵` over the sixteen binary response functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointResponseDistribution {
    entries: Vec<Rational>,
}

impl JointResponseDistribution {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != 16 {
            return Err(Error::DimensionMismatch { expected: 16, got: entries.len() });
        }
        for (k, v) in entries.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::InvalidProbability { name: format!("c{k}"), value: v.to_string() });
            }
        }
        let total: Rational = entries.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidProbability {
                name: "sum of joint response weights".into(),
                value: total.to_string(),
            });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, h: BinaryResponse) -> &Rational {
        &self.entries[h.id()]
    }
}

/// The one-parameter family `a(λ) = base + λ·(1, 1, −1, −1)` of unary
/// response distributions that reproduce one observed kernel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarginalFamily {
    pub base: [Rational; 4],
    pub lambda_min: Rational,
    pub lambda_max: Rational,
}

impl MarginalFamily {
    pub const DIRECTION: [i64; 4] = [1, 1, -1, -1];

    pub fn direction() -> [Rational; 4] {
        Self::DIRECTION.map(rational::int)
    }

    pub fn p0_given0(&self) -> &Rational {
        &self.base[2]
    }

    pub fn p0_given1(&self) -> &Rational {
        &self.base[3]
    }

    pub fn contains(&self, lambda: &Rational) -> bool {
        *lambda >= self.lambda_min && *lambda <= self.lambda_max
    }

    fn check(&self, lambda: &Rational) -> Result<()> {
        if self.contains(lambda) {
            Ok(())
        } else {
            Err(Error::LambdaOutOfRange {
                lambda: lambda.to_string(),
                min: self.lambda_min.to_string(),
                max: self.lambda_max.to_string(),
            })
        }
    }

    /// `a(λ)`; a point of the 3-simplex for every admissible `λ`.
    pub fn response_vector(&self, lambda: &Rational) -> Result<ResponseVector4> {
        self.check(lambda)?;
        let entries = [
            &self.base[0] + lambda,
            &self.base[1] + lambda,
            &self.base[2] - lambda,
            &self.base[3] - lambda,
        ];
        ResponseVector4::new(entries)
    }

    /// Probability that the effect would flip had the cause flipped:
    /// `γ = a2 + a3 = p00 + p01 − 2λ`.
    pub fn counterfactual_influence(&self, lambda: &Rational) -> Result<Rational> {
        self.check(lambda)?;
        Ok(&self.base[2] + &self.base[3] - rational::int(2) * lambda)
    }

    pub fn width(&self) -> Rational {
        &self.lambda_max - &self.lambda_min
    }
}

pub fn family_from_observation(obs: &MarginalObservation) -> Result<MarginalFamily> {
    if obs.cause1.is_zero() || obs.cause1.is_one() {
        return Err(Error::DegenerateCause { cause: "cause", value: obs.cause1.to_string() });
    }
    let p00 = &obs.p0_given0;
    let p01 = &obs.p0_given1;
    let base = [
        Rational::zero(),
        Rational::one() - p00 - p01,
        p00.clone(),
        p01.clone(),
    ];
    let lambda_min = rational::max(&Rational::zero(), &(p00 + p01 - Rational::one()));
    let lambda_max = rational::min(p00, p01);
    Ok(MarginalFamily { base, lambda_min, lambda_max })
}

pub fn response_vector(family: &MarginalFamily, lambda: &Rational) -> Result<ResponseVector4> {
    family.response_vector(lambda)
}

pub fn counterfactual_influence(family: &MarginalFamily, lambda: &Rational) -> Result<Rational> {
    family.counterfactual_influence(lambda)
}

/// `(P(Z=0|cause=0), P(Z=0|cause=1)) = (v0 + v2, v0 + v3)`.
pub fn markov_kernel(v: &ResponseVector4) -> (Rational, Rational) {
    let e = v.entries();
    (&e[0] + &e[2], &e[0] + &e[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    fn obs(p00: Rational, p01: Rational) -> MarginalObservation {
        MarginalObservation::new(p00, p01, q(1, 2), "X").unwrap()
    }

    #[test]
    fn unary_functions_in_prose_order() {
        let f = enumerate_unary();
        assert_eq!(f.len(), 4);
        assert_eq!((f[0].eval(0), f[0].eval(1)), (0, 0));
        assert_eq!((f[1].eval(0), f[1].eval(1)), (1, 1));
        assert_eq!(f[2].eval(1), 1);
        assert_eq!(f[2].eval(0), 0);
        assert_eq!(f[3].eval(1), 0);
        assert_eq!(f[3].eval(0), 1);
        for a in &f {
            assert_eq!(UnaryResponse::from_table(a.eval(0), a.eval(1)), *a);
        }
    }

    #[test]
    fn named_binary_functions() {
        let h = enumerate_binary();
        assert_eq!(h.len(), 16);
        // h7 = NAND
        assert_eq!(h[7].eval(1, 1), 0);
        assert_eq!(h[7].eval(0, 1), 1);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(h[0].eval(x, y), 0);
                assert_eq!(h[15].eval(x, y), 1);
                assert_eq!(h[7].eval(x, y), 1 - (x & y));
            }
        }
    }

    #[test]
    fn uniform_kernel_family() {
        let fam = family_from_observation(&obs(q(1, 2), q(1, 2))).unwrap();
        assert_eq!(fam.base, [int(0), int(0), q(1, 2), q(1, 2)]);
        assert_eq!(fam.lambda_min, int(0));
        assert_eq!(fam.lambda_max, q(1, 2));

        let xor = fam.response_vector(&int(0)).unwrap();
        assert_eq!(xor.entries(), &[int(0), int(0), q(1, 2), q(1, 2)]);
        let indep = fam.response_vector(&q(1, 2)).unwrap();
        assert_eq!(indep.entries(), &[q(1, 2), q(1, 2), int(0), int(0)]);

        assert_eq!(fam.counterfactual_influence(&int(0)).unwrap(), int(1));
        assert_eq!(fam.counterfactual_influence(&q(1, 2)).unwrap(), int(0));
        assert_eq!(markov_kernel(&xor), (q(1, 2), q(1, 2)));
    }

    #[test]
    fn deterministic_identity_kernel() {
        let fam = family_from_observation(&obs(int(1), int(0))).unwrap();
        assert_eq!(fam.lambda_min, int(0));
        assert_eq!(fam.lambda_max, int(0));
        let a = fam.response_vector(&int(0)).unwrap();
        assert_eq!(a.entries(), &[int(0), int(0), int(1), int(0)]);
        assert_eq!(fam.counterfactual_influence(&int(0)).unwrap(), int(1));
    }

    #[test]
    fn medication_family() {
        let fam = family_from_observation(&obs(q(1, 2), q(2, 5))).unwrap();
        assert_eq!(fam.base, [int(0), q(1, 10), q(1, 2), q(2, 5)]);
        assert_eq!((fam.lambda_min.clone(), fam.lambda_max.clone()), (int(0), q(2, 5)));
        let a = fam.response_vector(&q(2, 5)).unwrap();
        assert_eq!(a.entries(), &[q(2, 5), q(1, 2), q(1, 10), int(0)]);
        assert_eq!(markov_kernel(&a), (q(1, 2), q(2, 5)));
    }

    #[test]
    fn lambda_out_of_range_and_degenerate_cause() {
        let fam = family_from_observation(&obs(q(1, 2), q(1, 2))).unwrap();
        assert!(matches!(fam.response_vector(&q(3, 5)), Err(Error::LambdaOutOfRange { .. })));
        assert!(matches!(fam.counterfactual_influence(&q(-1, 5)), Err(Error::LambdaOutOfRange { .. })));
        assert!(matches!(
            MarginalObservation::new(q(1, 2), q(1, 2), int(1), "X"),
            Err(Error::DegenerateCause { .. })
        ));
        assert!(matches!(
            MarginalObservation::new(q(3, 2), q(1, 2), q(1, 2), "X"),
            Err(Error::InvalidProbability { .. })
        ));
        let raw = MarginalObservation { p0_given0: q(1, 2), p0_given1: q(1, 2), cause1: int(0) };
        assert!(matches!(family_from_observation(&raw), Err(Error::DegenerateCause { .. })));
    }
}
