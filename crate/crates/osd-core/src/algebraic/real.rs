use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraicError;

use super::poly::{sturm_chain, sturm_count_with_chain, IntPoly, RatPoly};

/// A real algebraic number represented by a squarefree integer polynomial
/// together with an isolating interval `(lo, hi)` containing exactly one root.
/// Neither endpoint is a root of the polynomial.
#[derive(Debug, Clone)]
pub struct AlgebraicReal {
    poly: IntPoly,
    lo: BigRational,
    hi: BigRational,
}

fn pow2_inv(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

/// Picks an interior cut point that is not a root of `p`. Candidate cuts are
/// taken at distinct fractions of the interval, so at most `deg p` of them can
/// be rejected.
fn choose_cut(p: &IntPoly, lo: &BigRational, hi: &BigRational) -> BigRational {
    let span = hi - lo;
    let mut denom = BigInt::from(2);
    loop {
        let cut = lo + &span / BigRational::from(denom.clone());
        if !p.eval_rational(&cut).is_zero() {
            return cut;
        }
        denom += BigInt::one();
    }
}

impl AlgebraicReal {
    /// Isolates the largest real root of `p`, then refines the interval to
    /// width at most `2^-64`.
    pub fn largest_real_root(p: &IntPoly) -> Result<Self, AlgebraicError> {
        let sf = p.squarefree_part();
        if sf.degree().is_none() || sf.degree() == Some(0) {
            return Err(AlgebraicError::NoRealRoot);
        }
        let bound = sf.root_bound();
        let mut lo = -bound.clone() - BigRational::one();
        let mut hi = bound + BigRational::one();
        let chain = sturm_chain(&sf);
        let total = sturm_count_with_chain(&chain, &lo, &hi)?;
        if total == 0 {
            return Err(AlgebraicError::NoRealRoot);
        }
        // Shrink towards the rightmost root, keeping at least one root on the
        // right side of every cut.
        let mut count = total;
        while count > 1 || &hi - &lo > pow2_inv(64) {
            let mid = choose_cut(&sf, &lo, &hi);
            let right = sturm_count_with_chain(&chain, &mid, &hi)?;
            if right >= 1 {
                lo = mid;
                count = right;
            } else {
                hi = mid;
                count = sturm_count_with_chain(&chain, &lo, &hi)?;
            }
        }
        Ok(AlgebraicReal { poly: sf, lo, hi })
    }

    /// The unique real root of `p` inside `(lo, hi)`; the interval must
    /// isolate exactly one root and avoid roots at its endpoints.
    pub fn from_interval(
        p: &IntPoly,
        lo: BigRational,
        hi: BigRational,
    ) -> Result<Self, AlgebraicError> {
        let sf = p.squarefree_part();
        match sturm_count(&sf, &lo, &hi)? {
            1 => Ok(AlgebraicReal { poly: sf, lo, hi }),
            _ => Err(AlgebraicError::NoRealRoot),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        AlgebraicReal {
            poly: IntPoly::from_i64(&[-n, 1]),
            lo: BigRational::from(BigInt::from(n)) - BigRational::new(BigInt::one(), BigInt::from(2)),
            hi: BigRational::from(BigInt::from(n)) + BigRational::new(BigInt::one(), BigInt::from(2)),
        }
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from(BigInt::from(2))
    }

    /// Narrows the isolating interval to width at most `eps` by bisection.
    pub fn refine_below(&mut self, eps: &BigRational) {
        while self.width() > *eps {
            let mid = choose_cut(&self.poly, &self.lo, &self.hi);
            let v = self.poly.eval_rational(&mid);
            let lo_sign = self.poly.eval_rational(&self.lo).is_positive();
            if v.is_positive() == lo_sign {
                self.lo = mid;
            } else {
                self.hi = mid;
            }
        }
    }

    /// Narrows the interval to width at most `2^-bits`.
    pub fn refine_bits(&mut self, bits: u32) {
        self.refine_below(&pow2_inv(bits));
    }

    pub fn to_f64(&self) -> f64 {
        let mut copy = self.clone();
        copy.refine_bits(80);
        copy.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    /// Natural logarithm, accurate to standard floating-point precision.
    pub fn ln(&self) -> f64 {
        self.to_f64().ln()
    }

    /// Exact equality test: the two numbers are equal iff their defining
    /// polynomials share a root inside the intersection of the intervals.
    pub fn equals(&self, other: &AlgebraicReal) -> bool {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        if lo >= hi {
            // Disjoint interiors can still both contain the number only if
            // they overlap; with half-open logic a shared value needs overlap.
            return false;
        }
        let g = self.poly.gcd(&other.poly);
        if g.degree().map_or(true, |d| d == 0) {
            return false;
        }
        let mut a = self.clone();
        let mut b = other.clone();
        // Shrink so that the interval endpoints cannot be roots of g.
        loop {
            let lo = if a.lo >= b.lo { a.lo.clone() } else { b.lo.clone() };
            let hi = if a.hi <= b.hi { a.hi.clone() } else { b.hi.clone() };
            if lo >= hi {
                return false;
            }
            match sturm_count(&g, &lo, &hi) {
                Ok(n) => return n > 0,
                Err(AlgebraicError::EndpointIsRoot) => {
                    a.refine_below(&(a.width() / BigRational::from(BigInt::from(4))));
                    b.refine_below(&(b.width() / BigRational::from(BigInt::from(4))));
                }
                Err(_) => return false,
            }
        }
    }

    /// Exact ordering of two algebraic reals.
    pub fn cmp_exact(&self, other: &AlgebraicReal) -> std::cmp::Ordering {
        if self.equals(other) {
            return std::cmp::Ordering::Equal;
        }
        let mut a = self.clone();
        let mut b = other.clone();
        loop {
            if a.hi <= b.lo {
                return std::cmp::Ordering::Less;
            }
            if b.hi <= a.lo {
                return std::cmp::Ordering::Greater;
            }
            let target = (a.width().min(b.width())) / BigRational::from(BigInt::from(4));
            a.refine_below(&target);
            b.refine_below(&target);
        }
    }

    /// Exact comparison against a rational value.
    pub fn cmp_rational(&self, q: &BigRational) -> std::cmp::Ordering {
        if self.poly.eval_rational(q).is_zero() && &self.lo < q && q < &self.hi {
            return std::cmp::Ordering::Equal;
        }
        let mut a = self.clone();
        loop {
            if &a.hi <= q {
                return std::cmp::Ordering::Less;
            }
            if q <= &a.lo {
                return std::cmp::Ordering::Greater;
            }
            a.refine_below(&(a.width() / BigRational::from(BigInt::from(4))));
        }
    }
}

fn sturm_count(
    p: &IntPoly,
    lo: &BigRational,
    hi: &BigRational,
) -> Result<usize, AlgebraicError> {
    super::poly::sturm_count(p, lo, hi)
}

/// Convenience: all distinct real roots of `p` in ascending order.
pub fn real_roots(p: &IntPoly) -> Result<Vec<AlgebraicReal>, AlgebraicError> {
    let sf = p.squarefree_part();
    if sf.degree().map_or(true, |d| d == 0) {
        return Ok(Vec::new());
    }
    let bound = sf.root_bound();
    let lo = -bound.clone() - BigRational::one();
    let hi = bound + BigRational::one();
    let chain = sturm_chain(&sf);
    let mut out = Vec::new();
    isolate_all(&sf, &chain, lo, hi, &mut out)?;
    Ok(out)
}

fn isolate_all(
    sf: &IntPoly,
    chain: &[RatPoly],
    lo: BigRational,
    hi: BigRational,
    out: &mut Vec<AlgebraicReal>,
) -> Result<(), AlgebraicError> {
    let count = sturm_count_with_chain(chain, &lo, &hi)?;
    match count {
        0 => Ok(()),
        1 => {
            let mut root = AlgebraicReal {
                poly: sf.clone(),
                lo,
                hi,
            };
            root.refine_bits(64);
            out.push(root);
            Ok(())
        }
        _ => {
            let mid = choose_cut(sf, &lo, &hi);
            isolate_all(sf, chain, lo, mid.clone(), out)?;
            isolate_all(sf, chain, mid, hi, out)
        }
    }
}
