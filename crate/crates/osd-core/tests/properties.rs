//! Randomized property suites for the exact-arithmetic kernel: root
//! isolation against constructed roots, field arithmetic against interval
//! evaluation, minimal-polynomial division, and the length eigenvector
//! identity on random primitive rules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use osd_core::algebraic::{real_roots, AlgebraicReal, FieldCtx, FieldElement, IntPoly, RatPoly};
use osd_core::error::AlgebraicError;
use osd_core::rule::{inflation_matrix, is_primitive, pf_data, Alphabet, SubstitutionRule};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A polynomial with a fully known real-root set: a product of rational
/// linear factors (optionally one squared) and negative-discriminant
/// quadratics, with a scaled leading coefficient.
#[derive(Debug, Clone)]
struct ConstructedPoly {
    poly: IntPoly,
    roots: Vec<BigRational>,
}

fn constructed_poly() -> impl Strategy<Value = ConstructedPoly> {
    let linear_roots = proptest::collection::btree_set((-20i64..=20, 1i64..=8), 0..=4);
    let quadratics = proptest::collection::vec((-6i64..=6, 0i64..=4), 0..=2);
    (linear_roots, quadratics, 1i64..=3, any::<bool>(), any::<bool>())
        .prop_filter_map(
            "needs at least one factor",
            |(pairs, quads, scale, negate, square_first)| {
                if pairs.is_empty() && quads.is_empty() {
                    return None;
                }
                let mut roots: Vec<BigRational> =
                    pairs.iter().map(|&(p, q)| rat(p, q)).collect();
                roots.sort();
                roots.dedup();
                let mut poly = IntPoly::from_i64(&[if negate { -scale } else { scale }]);
                for (i, root) in roots.iter().enumerate() {
                    let (p, q) = (root.numer().clone(), root.denom().clone());
                    let factor = IntPoly::new(vec![-p, q]);
                    poly = poly.mul(&factor);
                    if i == 0 && square_first {
                        poly = poly.mul(&factor);
                    }
                }
                for &(b, extra) in &quads {
                    // c > b^2/4 makes the discriminant negative.
                    let c = (b * b) / 4 + 1 + extra;
                    poly = poly.mul(&IntPoly::from_i64(&[c, b, 1]));
                }
                Some(ConstructedPoly { poly, roots })
            },
        )
}

/// Scales a rational polynomial to integer coefficients without touching
/// its sign, unlike the canonicalizing `clear_denominators`.
fn scale_to_int(p: &RatPoly) -> IntPoly {
    let mut lcm = BigInt::one();
    for c in p.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    IntPoly::new(
        p.coeffs()
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect(),
    )
}

/// Sign of a field element by direct interval evaluation at the refined
/// generator, independent of the field's own sign logic.
fn interval_sign(e: &FieldElement) -> i32 {
    let p = scale_to_int(e.repr());
    if p.is_zero() {
        return 0;
    }
    let mut root = e.ctx().root();
    let mut bits = 32;
    loop {
        root.refine_bits(bits);
        let (lo, hi) = p.eval_interval(root.lo(), root.hi());
        if lo.is_positive() {
            return 1;
        }
        if hi.is_negative() {
            return -1;
        }
        if bits >= 512 {
            return 0;
        }
        bits *= 2;
    }
}

fn field_for(coeffs: &[i64]) -> std::sync::Arc<FieldCtx> {
    let modulus = IntPoly::from_i64(coeffs);
    let root = AlgebraicReal::largest_real_root(&modulus).unwrap();
    FieldCtx::new(modulus, root)
}

fn moduli() -> Vec<Vec<i64>> {
    // Golden mean, plastic, and ternary inflation fields.
    vec![vec![-1, -1, 1], vec![-1, -1, 0, 1], vec![1, -1, -2, 1]]
}

fn element_of(ctx: &std::sync::Arc<FieldCtx>, coeffs: &[i64]) -> FieldElement {
    let repr = RatPoly::new(coeffs.iter().map(|&c| rat(c, 1)).collect());
    ctx.element(repr)
}

fn arb_rule() -> impl Strategy<Value = SubstitutionRule> {
    (2usize..=3)
        .prop_flat_map(|k| {
            proptest::collection::vec(proptest::collection::vec(0..k, 1..=3), k)
                .prop_map(move |images| {
                    let names = (0..k)
                        .map(|i| {
                            char::from(b'a' + u8::try_from(i).unwrap()).to_string()
                        })
                        .collect();
                    SubstitutionRule::new(Alphabet::new(names), images)
                })
        })
        .prop_filter("primitive and expanding", |rule| {
            let total: usize = (0..rule.letter_count())
                .map(|i| rule.image(i).len())
                .sum();
            total > rule.letter_count() && is_primitive(&inflation_matrix(rule))
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        .. ProptestConfig::default()
    })]

    #[test]
    fn root_isolation_finds_exactly_the_constructed_roots(c in constructed_poly()) {
        let found = match real_roots(&c.poly) {
            Ok(found) => found,
            Err(AlgebraicError::NoRealRoot) => Vec::new(),
            Err(e) => return Err(TestCaseError::fail(format!("isolation failed: {e}"))),
        };
        prop_assert_eq!(found.len(), c.roots.len());
        for (got, expected) in found.iter().zip(&c.roots) {
            prop_assert_eq!(got.cmp_rational(expected), std::cmp::Ordering::Equal);
        }
    }

    #[test]
    fn field_products_reduce_congruently_and_match_interval_signs(
        which in 0usize..3,
        a in proptest::collection::vec(-9i64..=9, 3),
        b in proptest::collection::vec(-9i64..=9, 3),
    ) {
        let ctx = field_for(&moduli()[which]);
        let deg = ctx.modulus().degree().unwrap();
        let e1 = element_of(&ctx, &a[..deg]);
        let e2 = element_of(&ctx, &b[..deg]);
        let product = e1.mul(&e2);
        // The reduced representative must be congruent to the plain
        // polynomial product modulo the field polynomial.
        let direct = e1.repr().mul(e2.repr());
        let difference = direct.sub(product.repr()).clear_denominators();
        prop_assert!(difference.is_zero() || difference.divisible_by(ctx.modulus()));
        // Sign and zero tests must agree with interval evaluation.
        let sign = interval_sign(&product);
        prop_assert_eq!(product.sign(), sign);
        prop_assert_eq!(product.is_zero(), sign == 0);
    }

    #[test]
    fn minimal_polynomial_divides_the_characteristic_polynomial(rule in arb_rule()) {
        let data = match pf_data(&rule, 64) {
            Ok(data) => data,
            Err(e) => return Err(TestCaseError::fail(format!("pf_data failed: {e}"))),
        };
        prop_assert!(data.char_poly.divisible_by(&data.min_poly_lambda));
        let quotient = data.char_poly.div_exact(&data.min_poly_lambda).unwrap();
        prop_assert_eq!(quotient.mul(&data.min_poly_lambda), data.char_poly);
    }

    #[test]
    fn natural_lengths_satisfy_the_eigenvector_identity(rule in arb_rule()) {
        let data = match pf_data(&rule, 64) {
            Ok(data) => data,
            Err(e) => return Err(TestCaseError::fail(format!("pf_data failed: {e}"))),
        };
        let m = inflation_matrix(&rule);
        let lambda = data.field.generator();
        for j in 0..rule.letter_count() {
            let mut lhs = data.field.zero();
            for i in 0..rule.letter_count() {
                let count = i64::try_from(&m[i][j]).unwrap();
                lhs = lhs.add(&data.lengths[i].scale_int(count));
            }
            let rhs = data.lengths[j].mul(&lambda);
            prop_assert!(lhs.sub(&rhs).is_zero());
        }
    }
}
