use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraicError;

use super::poly::{sturm_count, IntPoly, RatPoly};
use super::real::AlgebraicReal;

/// Evaluation context for polynomial representatives of elements of
/// `Q(root)`. The modulus may be reducible (e.g. a characteristic
/// polynomial); representatives are compared through their value at the
/// distinguished root, never coefficientwise.
#[derive(Debug)]
pub struct FieldCtx {
    modulus: IntPoly,
    root: Mutex<AlgebraicReal>,
}

impl FieldCtx {
    pub fn new(modulus: IntPoly, root: AlgebraicReal) -> Arc<Self> {
        Arc::new(FieldCtx {
            modulus,
            root: Mutex::new(root),
        })
    }

    pub fn modulus(&self) -> &IntPoly {
        &self.modulus
    }

    /// Snapshot of the current isolating interval of the root.
    pub fn root(&self) -> AlgebraicReal {
        self.root.lock().unwrap().clone()
    }

    fn refine_root(&self) -> AlgebraicReal {
        let mut guard = self.root.lock().unwrap();
        let target = guard.width() / BigRational::from(BigInt::from(16));
        guard.refine_below(&target);
        guard.clone()
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(self),
            repr: RatPoly::zero(),
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(self),
            repr: RatPoly::one(),
        }
    }

    /// The distinguished root as a field element (the class of `x`).
    pub fn generator(self: &Arc<Self>) -> FieldElement {
        self.element(RatPoly::new(vec![BigRational::zero(), BigRational::one()]))
    }

    pub fn from_integer(self: &Arc<Self>, n: i64) -> FieldElement {
        self.element(RatPoly::new(vec![BigRational::from(BigInt::from(n))]))
    }

    pub fn element(self: &Arc<Self>, repr: RatPoly) -> FieldElement {
        let repr = repr.rem(&RatPoly::from(self.modulus.clone()));
        FieldElement {
            ctx: Arc::clone(self),
            repr,
        }
    }
}

/// An element of `Q(root)` represented by a rational polynomial reduced
/// modulo the context modulus.
#[derive(Debug, Clone)]
pub struct FieldElement {
    ctx: Arc<FieldCtx>,
    repr: RatPoly,
}

impl FieldElement {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn repr(&self) -> &RatPoly {
        &self.repr
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        debug_assert!(Arc::ptr_eq(&self.ctx, &other.ctx));
        FieldElement {
            ctx: Arc::clone(&self.ctx),
            repr: self.repr.add(&other.repr),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        debug_assert!(Arc::ptr_eq(&self.ctx, &other.ctx));
        FieldElement {
            ctx: Arc::clone(&self.ctx),
            repr: self.repr.sub(&other.repr),
        }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(&self.ctx),
            repr: self.repr.scale(&-BigRational::one()),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        debug_assert!(Arc::ptr_eq(&self.ctx, &other.ctx));
        self.ctx.element(self.repr.mul(&other.repr))
    }

    pub fn scale_int(&self, k: i64) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(&self.ctx),
            repr: self.repr.scale(&BigRational::from(BigInt::from(k))),
        }
    }

    pub fn scale(&self, k: &BigRational) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(&self.ctx),
            repr: self.repr.scale(k),
        }
    }

    /// Exact zero test: clears denominators and asks whether the integer
    /// representative shares a root with the modulus inside the isolating
    /// interval of the distinguished root.
    pub fn is_zero(&self) -> bool {
        if self.repr.is_zero() {
            return true;
        }
        let q = RatPoly::from(self.repr.clone()).clear_denominators();
        if q.is_zero() {
            return true;
        }
        let g = q.gcd(&self.ctx.modulus);
        if g.degree().map_or(true, |d| d == 0) {
            return false;
        }
        // Interval endpoints are never roots of the modulus, hence never
        // roots of its divisor g.
        let root = self.ctx.root();
        sturm_count(&g, root.lo(), root.hi()).map_or(false, |n| n > 0)
    }

    /// Exact sign of the value at the distinguished root: -1, 0, or +1.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let q = RatPoly::from(self.repr.clone()).clear_denominators();
        let mut root = self.ctx.root();
        loop {
            let (lo, hi) = q.eval_interval(root.lo(), root.hi());
            if lo.is_positive() {
                // clear_denominators may flip the sign of the representative;
                // recover it from the discarded scalar.
                return self.orientation_of(&q);
            }
            if hi.is_negative() {
                return -self.orientation_of(&q);
            }
            root = self.ctx.refine_root();
        }
    }

    /// Sign relationship between the stored rational representative and its
    /// primitive integer counterpart `q` (+1 same orientation, -1 flipped).
    fn orientation_of(&self, q: &IntPoly) -> i32 {
        let lead_repr = self
            .repr
            .coeffs()
            .last()
            .expect("nonzero representative")
            .clone();
        let lead_q = q.leading().expect("nonzero integer representative");
        if lead_repr.is_positive() == lead_q.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Approximate value at the distinguished root; the isolating interval is
    /// refined until the enclosure is tighter than `eps`.
    pub fn to_f64(&self, eps: f64) -> f64 {
        if self.repr.is_zero() {
            return 0.0;
        }
        let eps_rat = BigRational::new(BigInt::one(), BigInt::from((1.0 / eps).max(2.0) as i128));
        let q = RatPoly::from(self.repr.clone()).clear_denominators();
        if q.is_zero() {
            return 0.0;
        }
        let mut root = self.ctx.root();
        loop {
            let (lo, hi) = q.eval_interval(root.lo(), root.hi());
            if &hi - &lo < eps_rat {
                let mid = (&lo + &hi) / BigRational::from(BigInt::from(2));
                let scale = self.scalar_ratio(&q);
                return (mid * scale).to_f64().unwrap_or(f64::NAN);
            }
            root = self.ctx.refine_root();
        }
    }

    /// Rational factor `r` with `repr = r * q`.
    fn scalar_ratio(&self, q: &IntPoly) -> BigRational {
        let k = self.repr.coeffs().len() - 1;
        let lead_repr = self.repr.coeffs().last().unwrap();
        lead_repr / BigRational::from(q.coeff(k))
    }

    pub fn equals(&self, other: &FieldElement) -> bool {
        self.sub(other).is_zero()
    }

    /// Canonical coefficient vector modulo the given minimal polynomial of
    /// the root. Two elements are equal iff their canonical vectors agree.
    pub fn canonical_key(&self, min_poly: &IntPoly) -> Vec<BigRational> {
        let reduced = self.repr.rem(&RatPoly::from(min_poly.clone()));
        reduced.coeffs().to_vec()
    }

    /// Multiplicative inverse, valid at the distinguished root. Requires the
    /// minimal polynomial of the root; the result representative `u`
    /// satisfies `u(root) * self(root) = 1`.
    pub fn inverse_with_min_poly(&self, min_poly: &IntPoly) -> Result<FieldElement, AlgebraicError> {
        let m = RatPoly::from(min_poly.clone());
        let q = self.repr.rem(&m);
        if q.is_zero() {
            return Err(AlgebraicError::NoRealRoot);
        }
        // Extended Euclid over Q[x]: u*q + v*m = g with g constant because the
        // minimal polynomial is irreducible and q is not a multiple of it.
        let (g, u) = extended_gcd_first(&q, &m);
        let d = g.degree().expect("gcd of nonzero polynomials");
        if d != 0 {
            return Err(AlgebraicError::NoRealRoot);
        }
        let c = g.coeff(0);
        Ok(self.ctx.element(u.scale(&(BigRational::one() / c))))
    }
}

/// Returns `(g, u)` with `u*a + v*b = g = gcd(a, b)` for some `v`.
fn extended_gcd_first(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0 = RatPoly::one();
    let mut s1 = RatPoly::zero();
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s = s0.sub(&q.mul(&s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    (r0, s0)
}

/// Sign of an integer linear combination of field elements.
pub fn combo_sign(counts: &[i64], values: &[FieldElement]) -> i32 {
    debug_assert_eq!(counts.len(), values.len());
    if counts.iter().all(|&c| c == 0) {
        return 0;
    }
    let ctx = values[0].ctx();
    let mut acc = ctx.zero();
    for (&c, v) in counts.iter().zip(values) {
        if c != 0 {
            acc = acc.add(&v.scale_int(c));
        }
    }
    acc.sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_ctx() -> Arc<FieldCtx> {
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let root = AlgebraicReal::largest_real_root(&p).unwrap();
        FieldCtx::new(p, root)
    }

    #[test]
    fn generator_satisfies_modulus() {
        let ctx = golden_ctx();
        let phi = ctx.generator();
        // phi^2 - phi - 1 = 0
        let v = phi.mul(&phi).sub(&phi).sub(&ctx.one());
        assert!(v.is_zero());
        assert_eq!(v.sign(), 0);
    }

    #[test]
    fn sign_of_simple_combinations() {
        let ctx = golden_ctx();
        let phi = ctx.generator();
        let one = ctx.one();
        // 2 - phi > 0, 1 - phi < 0.
        assert_eq!(ctx.from_integer(2).sub(&phi).sign(), 1);
        assert_eq!(one.sub(&phi).sign(), -1);
        assert_eq!(phi.sign(), 1);
    }

    #[test]
    fn zero_test_catches_disguised_zero() {
        let ctx = golden_ctx();
        let phi = ctx.generator();
        // phi^3 = 2 phi + 1 in the golden field.
        let lhs = phi.mul(&phi).mul(&phi);
        let rhs = phi.scale_int(2).add(&ctx.one());
        assert!(lhs.equals(&rhs));
        assert!(!lhs.equals(&phi));
    }

    #[test]
    fn inverse_via_min_poly() {
        let ctx = golden_ctx();
        let phi = ctx.generator();
        let min_poly = IntPoly::from_i64(&[-1, -1, 1]);
        let inv = phi.inverse_with_min_poly(&min_poly).unwrap();
        assert!(phi.mul(&inv).sub(&ctx.one()).is_zero());
        // 1/phi = phi - 1.
        assert!(inv.equals(&phi.sub(&ctx.one())));
    }

    #[test]
    fn to_f64_refines_to_requested_accuracy() {
        let ctx = golden_ctx();
        let phi = ctx.generator();
        let v = phi.add(&phi.mul(&phi)).to_f64(1e-12);
        // phi + phi^2 = phi + phi + 1 = 2 phi + 1.
        assert!((v - (2.0 * 1.618033988749895 + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn combo_sign_mixed_terms() {
        let ctx = golden_ctx();
        let phi = ctx.generator();
        let one = ctx.one();
        let values = vec![phi.clone(), one.clone()];
        assert_eq!(combo_sign(&[1, -1], &values), 1);
        assert_eq!(combo_sign(&[-1, 2], &values), 1);
        assert_eq!(combo_sign(&[-2, 3], &values), -1);
        assert_eq!(combo_sign(&[0, 0], &values), 0);
    }

    #[test]
    fn reducible_modulus_zero_test() {
        // Modulus (x^2 - x - 1)(x - 3); root = golden ratio.
        let p = IntPoly::from_i64(&[-1, -1, 1]).mul(&IntPoly::from_i64(&[-3, 1]));
        let phi_interval = AlgebraicReal::largest_real_root(&IntPoly::from_i64(&[-1, -1, 1])).unwrap();
        let root = AlgebraicReal::from_interval(&p, phi_interval.lo().clone(), phi_interval.hi().clone()).unwrap();
        let ctx = FieldCtx::new(p, root);
        let x = ctx.generator();
        // x^2 - x - 1 vanishes at the golden root even though it is not a
        // multiple of the modulus.
        let e = x.mul(&x).sub(&x).sub(&ctx.one());
        assert!(e.is_zero());
        // x - 3 does not vanish at the golden root.
        let f = x.sub(&ctx.from_integer(3));
        assert!(!f.is_zero());
        assert_eq!(f.sign(), -1);
    }
}
