use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraicError;

use super::poly::IntPoly;
use super::real::AlgebraicReal;

/// Complex number with exact rational parts, rounded after every operation to
/// keep coefficient sizes proportional to the working precision.
#[derive(Debug, Clone)]
struct ComplexRat {
    re: BigRational,
    im: BigRational,
}

fn round_to_bits(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from(scale.clone());
    let rounded = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor();
    BigRational::new(rounded.to_integer(), scale)
}

impl ComplexRat {
    fn new(re: BigRational, im: BigRational) -> Self {
        ComplexRat { re, im }
    }

    fn from_f64(re: f64, im: f64) -> Self {
        ComplexRat {
            re: BigRational::from_float(re).unwrap_or_else(BigRational::zero),
            im: BigRational::from_float(im).unwrap_or_else(BigRational::zero),
        }
    }

    fn round(&self, bits: u32) -> Self {
        ComplexRat {
            re: round_to_bits(&self.re, bits),
            im: round_to_bits(&self.im, bits),
        }
    }

    fn add(&self, other: &Self) -> Self {
        ComplexRat::new(&self.re + &other.re, &self.im + &other.im)
    }

    fn sub(&self, other: &Self) -> Self {
        ComplexRat::new(&self.re - &other.re, &self.im - &other.im)
    }

    fn mul(&self, other: &Self) -> Self {
        ComplexRat::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    fn div(&self, other: &Self) -> Self {
        let denom = &other.re * &other.re + &other.im * &other.im;
        ComplexRat::new(
            (&self.re * &other.re + &self.im * &other.im) / &denom,
            (&self.im * &other.re - &self.re * &other.im) / &denom,
        )
    }

    fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

fn eval_poly_complex(p: &IntPoly, z: &ComplexRat, bits: u32) -> ComplexRat {
    let mut acc = ComplexRat::new(BigRational::zero(), BigRational::zero());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(z).round(bits);
        acc.re += BigRational::from(c.clone());
    }
    acc
}

/// Durand-Kerner in double precision to seed the exact Newton refinement.
fn approx_roots_f64(p: &IntPoly) -> Vec<(f64, f64)> {
    let n = p.degree().expect("nonconstant polynomial");
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |re: f64, im: f64| -> (f64, f64) {
        let (mut ar, mut ai) = (0.0, 0.0);
        for c in monic.iter().rev() {
            let nr = ar * re - ai * im + c;
            let ni = ar * im + ai * re;
            ar = nr;
            ai = ni;
        }
        (ar, ai)
    };
    let radius = p.root_bound().to_f64().unwrap_or(2.0);
    let mut roots: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            (0.7 * radius * angle.cos(), 0.7 * radius * angle.sin())
        })
        .collect();
    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (zr, zi) = roots[i];
            let (pr, pi) = eval(zr, zi);
            let (mut dr, mut di) = (1.0f64, 0.0f64);
            for (j, &(wr, wi)) in roots.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (er, ei) = (zr - wr, zi - wi);
                let nr = dr * er - di * ei;
                let ni = dr * ei + di * er;
                dr = nr;
                di = ni;
            }
            let denom = dr * dr + di * di;
            if denom < 1e-300 {
                continue;
            }
            let sr = (pr * dr + pi * di) / denom;
            let si = (pi * dr - pr * di) / denom;
            roots[i] = (zr - sr, zi - si);
            max_step = max_step.max(sr.hypot(si));
        }
        if max_step < 1e-13 {
            break;
        }
    }
    roots
}

/// Newton refinement of an approximate root in exact rounded arithmetic.
/// Returns the refined root at the requested precision.
fn polish_root(p: &IntPoly, seed: &ComplexRat, bits: u32) -> ComplexRat {
    let dp = p.derivative();
    let mut z = seed.clone();
    let mut prec = 64u32;
    loop {
        prec = (prec * 2).min(bits + 32);
        // A couple of Newton steps at each precision level; quadratic
        // convergence doubles the correct digits per step.
        for _ in 0..2 {
            let pv = eval_poly_complex(p, &z, prec + 64);
            let dv = eval_poly_complex(&dp, &z, prec + 64);
            if dv.norm_sq().is_zero() {
                return z;
            }
            z = z.sub(&pv.div(&dv)).round(prec + 64);
        }
        if prec >= bits + 32 {
            return z;
        }
    }
}

/// Upper bound on `sqrt(x)` for nonnegative rational `x`, via one AM-GM step
/// from a floating-point estimate.
fn sqrt_upper(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let guess = x.to_f64().map(|v| v.sqrt()).unwrap_or(1.0);
    let g = BigRational::from_float(guess.max(1e-300) * (1.0 + 1e-12))
        .unwrap_or_else(BigRational::one);
    let g = if g.is_positive() { g } else { BigRational::one() };
    // sqrt(x) <= (x/g + g) / 2 for any g > 0.
    (x / &g + &g) / BigRational::from(BigInt::from(2))
}

/// Lower bound on `sqrt(x)`: `x / sqrt_upper(x)`.
fn sqrt_lower(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    x / sqrt_upper(x)
}

struct CertifiedRoot {
    z: ComplexRat,
    /// Rational upper bound on the inclusion radius around `z`.
    radius: BigRational,
    /// Certified enclosure of `|z|`.
    modulus_lo: BigRational,
    modulus_hi: BigRational,
}

/// Polishes all roots of squarefree `p` and certifies one root per disk
/// `D(z_i, n |p(z_i)/p'(z_i)|)`, requiring the disks to be pairwise disjoint.
fn certified_roots(p: &IntPoly, bits: u32) -> Result<Vec<CertifiedRoot>, AlgebraicError> {
    let n = p.degree().expect("nonconstant polynomial");
    let seeds = approx_roots_f64(p);
    let dp = p.derivative();
    let mut out = Vec::with_capacity(n);
    for (re, im) in seeds {
        let z = polish_root(p, &ComplexRat::from_f64(re, im), bits);
        let pv = eval_poly_complex(p, &z, bits + 96);
        let dv = eval_poly_complex(&dp, &z, bits + 96);
        if dv.norm_sq().is_zero() {
            return Err(AlgebraicError::PrecisionExhausted);
        }
        // radius^2 = n^2 |p(z)|^2 / |p'(z)|^2, then a rational sqrt bound.
        let r_sq = pv.norm_sq() / dv.norm_sq() * BigRational::from(BigInt::from((n * n) as i64));
        let radius = sqrt_upper(&r_sq);
        let m_sq = z.norm_sq();
        let m_hi = sqrt_upper(&m_sq);
        let m_lo = sqrt_lower(&m_sq);
        let modulus_lo = if &m_lo - &radius > BigRational::zero() {
            &m_lo - &radius
        } else {
            BigRational::zero()
        };
        let modulus_hi = &m_hi + &radius;
        out.push(CertifiedRoot {
            z,
            radius,
            modulus_lo,
            modulus_hi,
        });
    }
    // Pairwise disjoint disks certify exactly one root per disk:
    // |z_i - z_j| > r_i + r_j, checked via |z_i-z_j|^2 >= 2 (r_i^2 + r_j^2)
    // which implies the triangle bound.
    for i in 0..out.len() {
        for j in (i + 1)..out.len() {
            let diff = out[i].z.sub(&out[j].z).norm_sq();
            let rr = (&out[i].radius * &out[i].radius + &out[j].radius * &out[j].radius)
                * BigRational::from(BigInt::from(2));
            if diff < rr {
                return Err(AlgebraicError::PrecisionExhausted);
            }
        }
    }
    Ok(out)
}

/// Minimal polynomial of an algebraic real, found by certifying the complex
/// roots of its defining polynomial and testing products of conjugate subsets
/// in ascending size, verified by exact division.
pub fn min_poly_of(a: &AlgebraicReal, precision_bits: u32) -> Result<IntPoly, AlgebraicError> {
    let p = a.poly().squarefree_part();
    let n = match p.degree() {
        None | Some(0) => return Err(AlgebraicError::NoRealRoot),
        Some(n) => n,
    };
    if n > 24 {
        return Err(AlgebraicError::PrecisionExhausted);
    }
    if n == 1 {
        return Ok(p.primitive());
    }
    let mut target = a.clone();
    target.refine_bits(70);
    let mid = target.midpoint();
    let mut bits = precision_bits.max(64);
    while bits <= 4096 {
        if let Ok(roots) = certified_roots(&p, bits) {
            // The target root: certified disk containing the real point `mid`
            // (distance from disk center to mid below the inclusion radius is
            // not guaranteed; pick the closest center among near-real roots).
            let mut target_idx = None;
            let mut best = BigRational::zero();
            for (i, r) in roots.iter().enumerate() {
                let dist_sq = (&r.z.re - &mid) * (&r.z.re - &mid) + &r.z.im * &r.z.im;
                if target_idx.is_none() || dist_sq < best {
                    target_idx = Some(i);
                    best = dist_sq;
                }
            }
            let target_idx = target_idx.expect("at least one root");
            if let Some(found) = search_factor(&p, &roots, target_idx, n, bits)? {
                // The factor must vanish at `a` itself.
                let lo = target.lo().clone();
                let hi = target.hi().clone();
                if super::poly::sturm_count(&found, &lo, &hi).map_or(false, |c| c > 0) {
                    return Ok(found);
                }
            }
        }
        bits *= 2;
    }
    Err(AlgebraicError::PrecisionExhausted)
}

/// Searches subsets of the certified roots (always containing the target) for
/// an integer factor of `p`, smallest cardinality first.
fn search_factor(
    p: &IntPoly,
    roots: &[CertifiedRoot],
    target_idx: usize,
    n: usize,
    bits: u32,
) -> Result<Option<IntPoly>, AlgebraicError> {
    let others: Vec<usize> = (0..n).filter(|&i| i != target_idx).collect();
    let lead = BigRational::from(p.leading().unwrap().clone());
    // Rounding tolerance for coefficient recognition.
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (bits / 2).max(24));
    for k in 0..=others.len() {
        let mut combo = CombinationIter::new(others.len(), k);
        while let Some(subset) = combo.next() {
            let mut indices = vec![target_idx];
            indices.extend(subset.iter().map(|&i| others[i]));
            if let Some(candidate) = recognize_product(p, roots, &indices, &lead, &tol, bits) {
                if p.divisible_by(&candidate) {
                    return Ok(Some(candidate));
                }
            }
        }
    }
    Ok(None)
}

/// Builds `lead * prod (x - z_i)` and recognizes near-integer coefficients.
fn recognize_product(
    _p: &IntPoly,
    roots: &[CertifiedRoot],
    indices: &[usize],
    lead: &BigRational,
    tol: &BigRational,
    bits: u32,
) -> Option<IntPoly> {
    let mut coeffs = vec![ComplexRat::new(lead.clone(), BigRational::zero())];
    for &i in indices {
        let z = &roots[i].z;
        let mut next = vec![ComplexRat::new(BigRational::zero(), BigRational::zero()); coeffs.len() + 1];
        // Multiply by (x - z): next = shift(coeffs) - z * coeffs.
        for (d, c) in coeffs.iter().enumerate() {
            next[d + 1] = next[d + 1].add(c).round(bits + 64);
            next[d] = next[d].sub(&c.mul(z)).round(bits + 64);
        }
        coeffs = next;
    }
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs.iter() {
        if c.im.abs() > *tol {
            return None;
        }
        let nearest = (&c.re + BigRational::new(BigInt::one(), BigInt::from(2))).floor();
        if (&c.re - &nearest).abs() > *tol {
            return None;
        }
        out.push(nearest.to_integer());
    }
    // Highest coefficient is lead by construction; candidate kept primitive.
    let poly = IntPoly::new(out);
    if poly.is_zero() {
        return None;
    }
    Some(poly.primitive())
}

/// Iterates over k-subsets of {0, .., n-1} in lexicographic order.
struct CombinationIter {
    n: usize,
    k: usize,
    state: Option<Vec<usize>>,
}

impl CombinationIter {
    fn new(n: usize, k: usize) -> Self {
        let state = if k <= n {
            Some((0..k).collect())
        } else {
            None
        };
        CombinationIter { n, k, state }
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.clone()?;
        // Advance to the next combination.
        let mut next = current.clone();
        let mut i = self.k;
        loop {
            if i == 0 {
                self.state = None;
                break;
            }
            i -= 1;
            if next[i] + 1 <= self.n - (self.k - i) {
                next[i] += 1;
                for j in (i + 1)..self.k {
                    next[j] = next[j - 1] + 1;
                }
                self.state = Some(next);
                break;
            }
        }
        Some(current)
    }
}

/// Outcome of the Pisot-Vijayaraghavan and unit certification.
#[derive(Debug, Clone)]
pub struct PisotCheck {
    pub is_pisot: bool,
    pub is_unit: bool,
    /// Certified moduli of the non-dominant conjugates, descending.
    pub conjugate_moduli: Vec<f64>,
}

/// Certifies whether the (irreducible) minimal polynomial has a single root
/// of modulus above 1 with all other roots strictly inside the unit circle,
/// and whether the root is an algebraic unit. Conjugate moduli are certified
/// to within `1e-9`.
pub fn pisot_unit_check(min_poly: &IntPoly, precision_bits: u32) -> Result<PisotCheck, AlgebraicError> {
    let n = match min_poly.degree() {
        None | Some(0) => return Err(AlgebraicError::NoRealRoot),
        Some(n) => n,
    };
    let is_unit = min_poly.coeff(0).abs().is_one();
    if n == 1 {
        // Rational root: no conjugates; Pisot iff the value exceeds 1.
        let root = BigRational::new(-min_poly.coeff(0), min_poly.leading().unwrap().clone());
        let is_pisot = root > BigRational::one();
        return Ok(PisotCheck {
            is_pisot,
            is_unit,
            conjugate_moduli: Vec::new(),
        });
    }
    let one = BigRational::one();
    let tol = BigRational::new(BigInt::one(), BigInt::from(1_000_000_000i64));
    let mut bits = precision_bits.max(128);
    while bits <= 4096 {
        match certified_roots(min_poly, bits) {
            Ok(roots) => {
                let widths_ok = roots
                    .iter()
                    .all(|r| &r.modulus_hi - &r.modulus_lo < tol);
                if !widths_ok {
                    bits *= 2;
                    continue;
                }
                // Dominant root: the one with the largest certified modulus.
                let mut dom = 0;
                for (i, r) in roots.iter().enumerate() {
                    if r.modulus_lo > roots[dom].modulus_lo {
                        dom = i;
                    }
                }
                let mut boundary = false;
                let mut outside = 0usize;
                let mut moduli = Vec::new();
                for (i, r) in roots.iter().enumerate() {
                    if r.modulus_lo <= one && one <= r.modulus_hi {
                        boundary = true;
                    }
                    if r.modulus_lo > one {
                        outside += 1;
                    }
                    if i != dom {
                        let mid = (&r.modulus_lo + &r.modulus_hi)
                            / BigRational::from(BigInt::from(2));
                        moduli.push(mid.to_f64().unwrap_or(f64::NAN));
                    }
                }
                if boundary {
                    // A modulus cannot be separated from 1 at this precision;
                    // try harder before giving up.
                    bits *= 2;
                    if bits > 4096 {
                        return Err(AlgebraicError::BoundaryCase);
                    }
                    continue;
                }
                moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let dominant_above = roots[dom].modulus_lo > one;
                let is_pisot = dominant_above && outside == 1;
                return Ok(PisotCheck {
                    is_pisot,
                    is_unit,
                    conjugate_moduli: moduli,
                });
            }
            Err(AlgebraicError::PrecisionExhausted) => {
                bits *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(AlgebraicError::BoundaryCase)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_poly_of_quadratic_root() {
        let p = IntPoly::from_i64(&[-1, -1, 1]);
        let phi = AlgebraicReal::largest_real_root(&p).unwrap();
        assert_eq!(min_poly_of(&phi, 128).unwrap(), p);
    }

    #[test]
    fn min_poly_extracts_factor_of_reducible_polynomial() {
        // (x^2 - x - 1)(x^2 - 2): largest root is phi ~ 1.618 > sqrt(2).
        let p = IntPoly::from_i64(&[-1, -1, 1]).mul(&IntPoly::from_i64(&[-2, 0, 1]));
        let r = AlgebraicReal::largest_real_root(&p).unwrap();
        assert_eq!(min_poly_of(&r, 128).unwrap(), IntPoly::from_i64(&[-1, -1, 1]));
    }

    #[test]
    fn min_poly_of_rational_root() {
        let p = IntPoly::from_i64(&[-6, 11, -6, 1]); // (x-1)(x-2)(x-3)
        let r = AlgebraicReal::largest_real_root(&p).unwrap();
        assert_eq!(min_poly_of(&r, 128).unwrap(), IntPoly::from_i64(&[-3, 1]));
    }

    #[test]
    fn min_poly_keeps_irreducible_quartic() {
        // x^4 - 2x - 1 is irreducible? It factors as (x^2+x+1)... check:
        // actually x^4 - 2x - 1 = (x^2 - x - 1)(x^2 + x + 1)? Expand:
        // (x^2-x-1)(x^2+x+1) = x^4 - x^2 - 2x - 1. Not equal, so test the
        // quartic directly through verification.
        let p = IntPoly::from_i64(&[-1, -2, 0, 0, 1]);
        let r = AlgebraicReal::largest_real_root(&p).unwrap();
        let m = min_poly_of(&r, 128).unwrap();
        assert!(p.divisible_by(&m));
        assert!(m.degree().unwrap() <= 4);
        // Verification: m vanishes at r.
        assert!(super::super::poly::sturm_count(&m, r.lo(), r.hi()).unwrap() >= 1);
    }

    #[test]
    fn golden_ratio_is_pisot_unit() {
        let check = pisot_unit_check(&IntPoly::from_i64(&[-1, -1, 1]), 128).unwrap();
        assert!(check.is_pisot);
        assert!(check.is_unit);
        assert_eq!(check.conjugate_moduli.len(), 1);
        assert!((check.conjugate_moduli[0] - 0.6180339887498949).abs() < 1e-9);
    }

    #[test]
    fn plastic_number_is_pisot_unit() {
        let check = pisot_unit_check(&IntPoly::from_i64(&[-1, -1, 0, 1]), 128).unwrap();
        assert!(check.is_pisot);
        assert!(check.is_unit);
        assert_eq!(check.conjugate_moduli.len(), 2);
        // Complex pair of modulus lambda^(-1/2) ~ 0.868836.
        assert!((check.conjugate_moduli[0] - 0.8688369837716784).abs() < 1e-7);
        assert!((check.conjugate_moduli[1] - 0.8688369837716784).abs() < 1e-7);
    }

    #[test]
    fn non_pisot_is_detected() {
        // x^2 - 3x + 1: roots (3±sqrt(5))/2, smaller one ~0.382 -> Pisot.
        let ok = pisot_unit_check(&IntPoly::from_i64(&[1, -3, 1]), 128).unwrap();
        assert!(ok.is_pisot);
        // x^2 - 4x + 2: roots 2±sqrt(2); 0.586 < 1 -> Pisot but not unit.
        let non_unit = pisot_unit_check(&IntPoly::from_i64(&[2, -4, 1]), 128).unwrap();
        assert!(non_unit.is_pisot);
        assert!(!non_unit.is_unit);
        // x^2 - 3: roots ±sqrt(3), the conjugate has modulus > 1.
        let not = pisot_unit_check(&IntPoly::from_i64(&[-3, 0, 1]), 128).unwrap();
        assert!(!not.is_pisot);
    }

    #[test]
    fn degree_one_cases() {
        let four = pisot_unit_check(&IntPoly::from_i64(&[-4, 1]), 128).unwrap();
        assert!(four.is_pisot);
        assert!(!four.is_unit);
        assert!(four.conjugate_moduli.is_empty());
        let one = pisot_unit_check(&IntPoly::from_i64(&[-1, 1]), 128).unwrap();
        assert!(!one.is_pisot);
        assert!(one.is_unit);
    }
}
