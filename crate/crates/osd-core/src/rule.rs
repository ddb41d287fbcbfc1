use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebraic::{
    min_poly_of, pisot_unit_check, AlgebraicReal, FieldCtx, FieldElement, IntPoly,
};
use crate::error::RuleError;
use crate::spectral::char_poly;

/// Letter indices into an alphabet.
pub type Word = Vec<usize>;

pub type Matrix = Vec<Vec<BigInt>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
}

impl Alphabet {
    pub fn new(letters: Vec<String>) -> Self {
        debug_assert!(!letters.is_empty());
        let mut seen = BTreeSet::new();
        for l in &letters {
            assert!(seen.insert(l.clone()), "duplicate letter {l}");
        }
        Alphabet { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.letters[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == name)
    }

    /// True when every letter is a single character, so words render as
    /// contiguous strings.
    pub fn single_char(&self) -> bool {
        self.letters.iter().all(|l| l.chars().count() == 1)
    }

    pub fn word_to_string(&self, w: &[usize]) -> String {
        if self.single_char() {
            w.iter().map(|&i| self.letters[i].as_str()).collect()
        } else {
            w.iter()
                .map(|&i| self.letters[i].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionRule {
    pub alphabet: Alphabet,
    images: Vec<Word>,
}

impl SubstitutionRule {
    pub fn new(alphabet: Alphabet, images: Vec<Word>) -> Self {
        assert_eq!(alphabet.len(), images.len());
        for img in &images {
            assert!(!img.is_empty(), "empty image");
            assert!(img.iter().all(|&i| i < alphabet.len()));
        }
        SubstitutionRule { alphabet, images }
    }

    /// Convenience constructor for single-character alphabets.
    pub fn from_strs(letters: &[&str], images: &[&str]) -> Self {
        let alphabet = Alphabet::new(letters.iter().map(|s| s.to_string()).collect());
        let images = images
            .iter()
            .map(|img| {
                img.chars()
                    .map(|c| alphabet.index(&c.to_string()).expect("image letter"))
                    .collect()
            })
            .collect();
        SubstitutionRule::new(alphabet, images)
    }

    pub fn image(&self, letter: usize) -> &Word {
        &self.images[letter]
    }

    pub fn substitute(&self, w: &[usize]) -> Word {
        let mut out = Vec::new();
        for &l in w {
            out.extend_from_slice(&self.images[l]);
        }
        out
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.len()
    }
}

/// `M[i][j]` = occurrences of letter `i` in the image of letter `j`.
pub fn inflation_matrix(rule: &SubstitutionRule) -> Matrix {
    let n = rule.letter_count();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for j in 0..n {
        for &i in rule.image(j) {
            m[i][j] += BigInt::one();
        }
    }
    m
}

/// Primitivity by boolean matrix powering: some power `k <= (n-1)n + 1` of
/// the adjacency pattern must be entrywise positive.
pub fn is_primitive(m: &Matrix) -> bool {
    let n = m.len();
    if n == 0 {
        return false;
    }
    let pattern: Vec<Vec<bool>> = m
        .iter()
        .map(|row| row.iter().map(|e| e > &BigInt::zero()).collect())
        .collect();
    let mut power = pattern.clone();
    let bound = (n - 1) * n + 1;
    for _ in 0..bound {
        if power.iter().all(|row| row.iter().all(|&e| e)) {
            return true;
        }
        power = bool_mat_mul(&power, &pattern);
    }
    power.iter().all(|row| row.iter().all(|&e| e))
}

fn bool_mat_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    if b[k][j] {
                        out[i][j] = true;
                    }
                }
            }
        }
    }
    out
}

/// Exact Perron-Frobenius data of a primitive rule.
#[derive(Debug, Clone)]
pub struct InflationData {
    pub matrix: Matrix,
    pub char_poly: IntPoly,
    pub lambda: AlgebraicReal,
    pub min_poly_lambda: IntPoly,
    pub field: Arc<FieldCtx>,
    /// Natural tile lengths, normalized so the first letter has length 1.
    pub lengths: Vec<FieldElement>,
    pub primitive: bool,
    pub pisot: bool,
    pub unit: bool,
    /// Certified moduli of the non-dominant conjugates of lambda.
    pub conjugate_moduli: Vec<f64>,
}

pub fn pf_data(rule: &SubstitutionRule, precision_bits: u32) -> Result<InflationData, RuleError> {
    let matrix = inflation_matrix(rule);
    if !is_primitive(&matrix) {
        return Err(RuleError::NotPrimitive);
    }
    let cp = char_poly(&matrix);
    let lambda = AlgebraicReal::largest_real_root(&cp)?;
    let min_poly_lambda = min_poly_of(&lambda, precision_bits)?;
    let field = FieldCtx::new(cp.clone(), lambda.clone());
    let lengths = solve_left_eigenvector(&matrix, &field, &min_poly_lambda)?;
    // Self-check: L · M = λ L exactly, i.e. the image of every letter has
    // total length λ times the letter length.
    let gen = field.generator();
    for j in 0..matrix.len() {
        let mut total = field.zero();
        for &i in rule.image(j) {
            total = total.add(&lengths[i]);
        }
        let expected = gen.mul(&lengths[j]);
        if !total.sub(&expected).is_zero() {
            return Err(RuleError::DegeneratePivot);
        }
    }
    let check = pisot_unit_check(&min_poly_lambda, precision_bits)?;
    Ok(InflationData {
        matrix,
        char_poly: cp,
        lambda,
        min_poly_lambda,
        field,
        lengths,
        primitive: true,
        pisot: check.is_pisot,
        unit: check.is_unit,
        conjugate_moduli: check.conjugate_moduli,
    })
}

/// Solves `(M^T - λ I) x = 0` by Gauss-Jordan elimination over the quotient
/// ring, deciding pivots with exact zero tests at λ and inverting pivots
/// through the minimal polynomial. Expects a one-dimensional kernel.
fn solve_left_eigenvector(
    m: &Matrix,
    field: &Arc<FieldCtx>,
    min_poly: &IntPoly,
) -> Result<Vec<FieldElement>, RuleError> {
    let n = m.len();
    let gen = field.generator();
    let mut a: Vec<Vec<FieldElement>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    // Transposed entry, minus λ on the diagonal.
                    let v = field.from_integer(
                        i64::try_from(&m[c][r]).expect("matrix entry fits i64"),
                    );
                    if r == c {
                        v.sub(&gen)
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut rank = 0usize;
    for col in 0..n {
        // Find a pivot row not yet used.
        let pivot_row = (rank..n).find(|&r| !a[r][col].is_zero());
        let Some(pr) = pivot_row else {
            continue;
        };
        a.swap(rank, pr);
        let inv = a[rank][col]
            .inverse_with_min_poly(min_poly)
            .map_err(|_| RuleError::DegeneratePivot)?;
        for c in 0..n {
            a[rank][c] = a[rank][c].mul(&inv);
        }
        for r in 0..n {
            if r != rank && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..n {
                    let delta = a[rank][c].mul(&factor);
                    a[r][c] = a[r][c].sub(&delta);
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    let free: Vec<usize> = (0..n).filter(|&c| pivot_of_col[c].is_none()).collect();
    if free.len() != 1 {
        return Err(RuleError::DegeneratePivot);
    }
    let f = free[0];
    let mut x: Vec<FieldElement> = (0..n).map(|_| field.zero()).collect();
    x[f] = field.one();
    for c in 0..n {
        if let Some(r) = pivot_of_col[c] {
            x[c] = a[r][f].neg();
        }
    }
    // Normalize so the first letter has length 1, then verify positivity.
    if x[0].is_zero() {
        return Err(RuleError::DegeneratePivot);
    }
    let inv0 = x[0]
        .inverse_with_min_poly(min_poly)
        .map_err(|_| RuleError::DegeneratePivot)?;
    let x: Vec<FieldElement> = x.iter().map(|v| v.mul(&inv0)).collect();
    if x.iter().any(|v| v.sign() != 1) {
        return Err(RuleError::DegeneratePivot);
    }
    Ok(x)
}

/// All factors of length at most `maxlen` of the substitution language,
/// obtained by substituting every known factor and harvesting subwords until
/// the set stabilizes.
pub fn language_factors(rule: &SubstitutionRule, maxlen: usize) -> BTreeSet<Word> {
    let mut seen: BTreeSet<Word> = (0..rule.letter_count()).map(|i| vec![i]).collect();
    loop {
        let mut next = seen.clone();
        for w in &seen {
            let img = rule.substitute(w);
            for start in 0..img.len() {
                for len in 1..=maxlen.min(img.len() - start) {
                    next.insert(img[start..start + len].to_vec());
                }
            }
        }
        if next == seen {
            return seen;
        }
        seen = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fibonacci() -> SubstitutionRule {
        SubstitutionRule::from_strs(&["a", "b"], &["ab", "a"])
    }

    #[test]
    fn fibonacci_inflation_matrix() {
        let m = inflation_matrix(&fibonacci());
        let want: Matrix = vec![
            vec![BigInt::from(1), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        assert_eq!(m, want);
    }

    #[test]
    fn primitivity_checks() {
        assert!(is_primitive(&inflation_matrix(&fibonacci())));
        let identity: Matrix = vec![
            vec![BigInt::one(), BigInt::zero()],
            vec![BigInt::zero(), BigInt::one()],
        ];
        assert!(!is_primitive(&identity));
        let swap: Matrix = vec![
            vec![BigInt::zero(), BigInt::one()],
            vec![BigInt::one(), BigInt::zero()],
        ];
        assert!(!is_primitive(&swap));
        let reducible = SubstitutionRule::from_strs(&["a", "b"], &["a", "ab"]);
        assert!(!is_primitive(&inflation_matrix(&reducible)));
    }

    #[test]
    fn fibonacci_pf_data() {
        let data = pf_data(&fibonacci(), 128).unwrap();
        assert_eq!(data.char_poly, IntPoly::from_i64(&[-1, -1, 1]));
        assert_eq!(data.min_poly_lambda, IntPoly::from_i64(&[-1, -1, 1]));
        assert!((data.lambda.to_f64() - 1.618033988749895).abs() < 1e-12);
        assert!(data.primitive && data.pisot && data.unit);
        // lengths (1, φ-1)
        assert!(data.lengths[0].sub(&data.field.one()).is_zero());
        let phi = data.field.generator();
        let want = phi.sub(&data.field.one());
        assert!(data.lengths[1].sub(&want).is_zero());
    }

    #[test]
    fn constant_length_pf_data() {
        let rule = SubstitutionRule::from_strs(&["a", "b", "c"], &["abab", "caab", "bcab"]);
        let data = pf_data(&rule, 128).unwrap();
        assert_eq!(data.min_poly_lambda, IntPoly::from_i64(&[-4, 1]));
        assert!(data.pisot);
        assert!(!data.unit);
        for l in &data.lengths {
            assert!(l.sub(&data.field.one()).is_zero());
        }
    }

    #[test]
    fn plastic_pf_data() {
        let rule = SubstitutionRule::from_strs(&["a", "b", "c"], &["bc", "a", "b"]);
        let data = pf_data(&rule, 128).unwrap();
        assert_eq!(data.min_poly_lambda, IntPoly::from_i64(&[-1, -1, 0, 1]));
        assert!((data.lambda.to_f64() - 1.3247179572447458).abs() < 1e-10);
        assert!(data.pisot && data.unit);
    }

    #[test]
    fn non_primitive_is_rejected() {
        let rule = SubstitutionRule::from_strs(&["a", "b"], &["a", "ab"]);
        assert!(matches!(pf_data(&rule, 128), Err(RuleError::NotPrimitive)));
    }

    #[test]
    fn fibonacci_factors() {
        let rule = fibonacci();
        let factors = language_factors(&rule, 2);
        let strs: BTreeSet<String> = factors
            .iter()
            .map(|w| rule.alphabet.word_to_string(w))
            .collect();
        let want: BTreeSet<String> = ["a", "b", "aa", "ab", "ba"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(strs, want);
    }

    #[test]
    fn tribonacci_factors_contain_expected_pairs() {
        let rule = SubstitutionRule::from_strs(&["a", "b", "c"], &["ab", "ac", "a"]);
        let factors = language_factors(&rule, 2);
        for f in ["ab", "ba", "ac", "ca", "aa"] {
            let word: Word = f
                .chars()
                .map(|c| rule.alphabet.index(&c.to_string()).unwrap())
                .collect();
            assert!(factors.contains(&word), "missing factor {f}");
        }
    }

    #[test]
    fn factor_sets_are_nested() {
        let rule = SubstitutionRule::from_strs(&["a", "b", "c"], &["cab", "ba", "a"]);
        let small = language_factors(&rule, 2);
        let large = language_factors(&rule, 3);
        for w in &small {
            assert!(large.contains(w));
        }
        for w in &large {
            if w.len() <= 2 {
                assert!(small.contains(w));
            }
        }
    }
}
