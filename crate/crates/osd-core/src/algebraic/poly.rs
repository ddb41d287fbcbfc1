use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Integer polynomial with coefficients stored in ascending degree order.
/// The zero polynomial is the empty coefficient vector; otherwise the
/// leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::new(vec![BigInt::one()])
    }

    pub fn x() -> Self {
        IntPoly::new(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }

    /// Encloses the image of the interval `[lo, hi]` under the polynomial.
    pub fn eval_interval(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        debug_assert!(lo <= hi);
        let (mut alo, mut ahi) = (BigRational::zero(), BigRational::zero());
        for c in self.coeffs.iter().rev() {
            // [alo, ahi] * [lo, hi] via min/max over the corner products.
            let products = [&alo * lo, &alo * hi, &ahi * lo, &ahi * hi];
            let mut min = products[0].clone();
            let mut max = products[0].clone();
            for p in &products[1..] {
                if *p < min {
                    min = p.clone();
                }
                if *p > max {
                    max = p.clone();
                }
            }
            let c = BigRational::from(c.clone());
            alo = min + &c;
            ahi = max + c;
        }
        (alo, ahi)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Substitutes `x^k` for `x`.
    pub fn inflate_variable(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        IntPoly::new(out)
    }

    /// Positive gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact division check over the rationals: does `divisor` divide `self`?
    pub fn divisible_by(&self, divisor: &IntPoly) -> bool {
        if divisor.is_zero() {
            return self.is_zero();
        }
        let (_, rem) = RatPoly::from(self.clone()).div_rem(&RatPoly::from(divisor.clone()));
        rem.is_zero()
    }

    /// Exact quotient over the rationals when the remainder vanishes and the
    /// quotient has integer coefficients.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        if divisor.is_zero() {
            return None;
        }
        let (q, rem) = RatPoly::from(self.clone()).div_rem(&RatPoly::from(divisor.clone()));
        if !rem.is_zero() {
            return None;
        }
        let mut out = Vec::with_capacity(q.coeffs.len());
        for c in &q.coeffs {
            if !c.is_integer() {
                return None;
            }
            out.push(c.to_integer());
        }
        Some(IntPoly::new(out))
    }

    /// Primitive gcd with positive leading coefficient, computed by a
    /// primitive polynomial remainder sequence (every pseudo-remainder is
    /// reduced to its primitive part, so all divisions are exact).
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                return b.primitive();
            }
            if r.degree() == Some(0) {
                return IntPoly::one();
            }
            a = b;
            b = r.primitive();
        }
    }

    /// Pseudo-remainder of `self` by `other`: `lc(other)^(d+1) * self mod other`.
    fn pseudo_rem(&self, other: &IntPoly) -> IntPoly {
        let d_other = other.degree().expect("pseudo_rem by zero");
        let lc = other.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut steps = match rem.degree() {
            Some(d) if d >= d_other => d - d_other + 1,
            _ => 0,
        };
        while let Some(d) = rem.degree() {
            if d < d_other {
                break;
            }
            let shift = d - d_other;
            let coef = rem.leading().unwrap().clone();
            rem = rem.scale(&lc);
            let mut sub = vec![BigInt::zero(); shift];
            sub.extend(other.coeffs.iter().map(|c| c * &coef));
            rem = rem.sub(&IntPoly::new(sub));
            steps = steps.saturating_sub(1);
        }
        // Top up so the multiplier is exactly lc^(deg difference + 1).
        for _ in 0..steps {
            rem = rem.scale(&lc);
        }
        rem
    }

    /// Product of `(x - r)` over the distinct roots, up to a constant.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        if self.degree() == Some(0) {
            return IntPoly::one();
        }
        let g = self.gcd(&self.derivative());
        self.div_over_rationals(&g).primitive()
    }

    /// Quotient over the rationals, discarding the remainder.
    fn div_over_rationals(&self, divisor: &IntPoly) -> IntPoly {
        let (q, _) = RatPoly::from(self.clone()).div_rem(&RatPoly::from(divisor.clone()));
        q.clear_denominators()
    }

    /// Cauchy bound: every real root has absolute value below the bound.
    pub fn root_bound(&self) -> BigRational {
        let lead = self
            .leading()
            .expect("root bound of the zero polynomial")
            .abs();
        let mut max = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let ratio = BigRational::new(c.abs(), lead.clone());
            if ratio > max {
                max = ratio;
            }
        }
        max + BigRational::one()
    }

    /// Reverses the coefficients: `x^n p(1/x)` for degree-`n` `p`.
    pub fn reciprocal(&self) -> IntPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        IntPoly::new(coeffs)
    }
}

impl fmt::Display for IntPoly {
    /// Descending-power form, e.g. `x^3 - 3x^2 - x + 4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Rational polynomial used for remainder sequences and modular reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly::new(vec![BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, k: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        let d_div = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.coeffs.last().unwrap();
        let mut rem = self.clone();
        let mut quot: Vec<BigRational> = Vec::new();
        while let Some(d) = rem.degree() {
            if d < d_div {
                break;
            }
            let shift = d - d_div;
            let factor = rem.coeffs.last().unwrap() / lc;
            if quot.len() < shift + 1 {
                quot.resize(shift + 1, BigRational::zero());
            }
            quot[shift] = factor.clone();
            let mut sub = vec![BigRational::zero(); shift];
            sub.extend(divisor.coeffs.iter().map(|c| c * &factor));
            rem = rem.sub(&RatPoly::new(sub));
        }
        (RatPoly::new(quot), rem)
    }

    pub fn rem(&self, divisor: &RatPoly) -> RatPoly {
        self.div_rem(divisor).1
    }

    /// Scales to an integer polynomial with positive leading coefficient.
    pub fn clear_denominators(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut denom = BigInt::one();
        for c in &self.coeffs {
            denom = denom.lcm(c.denom());
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .map(|c| (c * BigRational::from(denom.clone())).to_integer())
                .collect(),
        )
        .primitive()
    }
}

impl From<IntPoly> for RatPoly {
    fn from(p: IntPoly) -> Self {
        RatPoly::new(
            p.coeffs
                .into_iter()
                .map(BigRational::from)
                .collect(),
        )
    }
}

/// Sturm chain of a polynomial (works for non-squarefree input, in which case
/// sign variations count distinct roots).
pub fn sturm_chain(p: &IntPoly) -> Vec<RatPoly> {
    let mut chain = Vec::new();
    let p0 = RatPoly::from(p.clone());
    if p0.is_zero() {
        return chain;
    }
    chain.push(p0.clone());
    let p1 = p0.derivative();
    if p1.is_zero() {
        return chain;
    }
    chain.push(p1);
    loop {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.scale(&-BigRational::one()));
    }
    chain
}

fn sign_variations(chain: &[RatPoly], x: &BigRational) -> usize {
    let mut variations = 0;
    let mut last: Option<bool> = None;
    for p in chain {
        let v = p.eval(x);
        if v.is_zero() {
            continue;
        }
        let positive = v > BigRational::zero();
        if let Some(prev) = last {
            if prev != positive {
                variations += 1;
            }
        }
        last = Some(positive);
    }
    variations
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`,
/// given a precomputed Sturm chain for `p`.
pub fn sturm_count_with_chain(
    chain: &[RatPoly],
    lo: &BigRational,
    hi: &BigRational,
) -> Result<usize, crate::error::AlgebraicError> {
    if chain.is_empty() {
        return Ok(0);
    }
    if chain[0].eval(lo).is_zero() || chain[0].eval(hi).is_zero() {
        return Err(crate::error::AlgebraicError::EndpointIsRoot);
    }
    if lo >= hi {
        return Ok(0);
    }
    Ok(sign_variations(chain, lo) - sign_variations(chain, hi))
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`.
pub fn sturm_count(
    p: &IntPoly,
    lo: &BigRational,
    hi: &BigRational,
) -> Result<usize, crate::error::AlgebraicError> {
    sturm_count_with_chain(&sturm_chain(p), lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn display_descending_powers() {
        let p = IntPoly::from_i64(&[4, -1, -3, 1]);
        assert_eq!(p.to_string(), "x^3 - 3x^2 - x + 4");
        assert_eq!(IntPoly::from_i64(&[-1, -2, 0, 0, 1]).to_string(), "x^4 - 2x - 1");
        assert_eq!(IntPoly::zero().to_string(), "0");
        assert_eq!(IntPoly::from_i64(&[-7]).to_string(), "-7");
        assert_eq!(IntPoly::from_i64(&[0, 1]).to_string(), "x");
    }

    #[test]
    fn mul_and_div_round_trip() {
        let a = IntPoly::from_i64(&[-1, -1, 1]);
        let b = IntPoly::from_i64(&[2, 0, 5, 1]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert!(prod.divisible_by(&a));
        assert!(!prod.add(&IntPoly::one()).divisible_by(&a));
    }

    #[test]
    fn gcd_of_shared_factor() {
        let shared = IntPoly::from_i64(&[-1, -1, 1]);
        let a = shared.mul(&IntPoly::from_i64(&[3, 1]));
        let b = shared.mul(&IntPoly::from_i64(&[-2, 0, 1]));
        assert_eq!(a.gcd(&b), shared);
        let coprime = IntPoly::from_i64(&[1, 1]).gcd(&IntPoly::from_i64(&[-1, 1]));
        assert_eq!(coprime, IntPoly::one());
    }

    #[test]
    fn gcd_handles_scaled_inputs() {
        let shared = IntPoly::from_i64(&[-1, 0, 2]);
        let a = shared.mul(&IntPoly::from_i64(&[0, 6]));
        let b = shared.mul(&IntPoly::from_i64(&[4]));
        assert_eq!(a.gcd(&b), shared.primitive());
    }

    #[test]
    fn squarefree_part_drops_multiplicity() {
        let p = IntPoly::from_i64(&[-1, 1]);
        let q = IntPoly::from_i64(&[2, 1]);
        let cube = p.mul(&p).mul(&p).mul(&q);
        assert_eq!(cube.squarefree_part(), p.mul(&q));
    }

    #[test]
    fn sturm_counts_roots() {
        // (x^2 - 2)(x - 3) has roots -sqrt(2), sqrt(2), 3.
        let p = IntPoly::from_i64(&[-2, 0, 1]).mul(&IntPoly::from_i64(&[-3, 1]));
        let count = |a: i64, b: i64| sturm_count(&p, &rat(a, 1), &rat(b, 1)).unwrap();
        assert_eq!(count(-10, 10), 3);
        assert_eq!(count(0, 10), 2);
        assert_eq!(count(2, 10), 1);
        assert_eq!(count(4, 10), 0);
        assert_eq!(
            sturm_count(&p, &rat(3, 1), &rat(10, 1)),
            Err(crate::error::AlgebraicError::EndpointIsRoot)
        );
    }

    #[test]
    fn sturm_counts_distinct_roots_of_nonsquarefree_input() {
        let p = IntPoly::from_i64(&[-1, 1]);
        let sq = p.mul(&p).mul(&IntPoly::from_i64(&[-4, 0, 1]));
        assert_eq!(sturm_count(&sq, &rat(0, 1), &rat(3, 1)).unwrap(), 2);
    }

    #[test]
    fn interval_evaluation_encloses_range() {
        let p = IntPoly::from_i64(&[1, -3, 0, 2]);
        let (lo, hi) = p.eval_interval(&rat(-1, 2), &rat(3, 4));
        for k in -8..=12i64 {
            let v = p.eval_rational(&rat(k, 16));
            assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn root_bound_dominates_roots() {
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let b = p.root_bound();
        assert!(b > rat(161, 100));
    }

    #[test]
    fn inflate_variable_substitutes_power() {
        let p = IntPoly::from_i64(&[1, 2, 3]);
        assert_eq!(p.inflate_variable(2), IntPoly::from_i64(&[1, 0, 2, 0, 3]));
    }
}
