//! Polynomials over GF(p): multivariate evaluation for the Map functions and
//! univariate interpolation, the decode primitive behind Lagrange coding.

use crate::field::PrimeField;
use crate::{Error, Result};
use rand::Rng;

/// A multivariate polynomial in canonical form: terms sorted by exponent
/// vector, duplicates merged, zero coefficients dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    arity: usize,
    terms: Vec<(u64, Vec<u32>)>,
    degree: u32,
}

impl MultiPoly {
    /// Build from `(coefficient, exponents)` pairs; every exponent vector
    /// must have length `arity`.
    pub fn new(field: &PrimeField, arity: usize, terms: Vec<(u64, Vec<u32>)>) -> Result<Self> {
        let mut canon: Vec<(Vec<u32>, u64)> = Vec::with_capacity(terms.len());
        for (coeff, exps) in terms {
            if exps.len() != arity {
                return Err(Error::Shape(format!(
                    "term arity {} does not match polynomial arity {arity}",
                    exps.len()
                )));
            }
            canon.push((exps, field.elem(coeff)));
        }
        canon.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(u64, Vec<u32>)> = Vec::with_capacity(canon.len());
        for (exps, coeff) in canon {
            match merged.last_mut() {
                Some((c, e)) if *e == exps => *c = field.add(*c, coeff),
                _ => merged.push((coeff, exps)),
            }
        }
        merged.retain(|(c, _)| *c != 0);
        let degree = merged
            .iter()
            .map(|(_, e)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0);
        Ok(MultiPoly {
            arity,
            terms: merged,
            degree,
        })
    }

    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: Vec::new(),
            degree: 0,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Maximum total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[(u64, Vec<u32>)] {
        &self.terms
    }

    /// Exact evaluation of Σ coeff · Π x_i^{e_i} mod p.
    pub fn eval(&self, field: &PrimeField, point: &[u64]) -> Result<u64> {
        if point.len() != self.arity {
            return Err(Error::Shape(format!(
                "point arity {} does not match polynomial arity {}",
                point.len(),
                self.arity
            )));
        }
        let mut acc = 0u64;
        for (coeff, exps) in &self.terms {
            let mut term = *coeff;
            for (x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    term = field.mul(term, field.pow(*x, e as u64));
                }
            }
            acc = field.add(acc, term);
        }
        Ok(acc)
    }

    /// Random polynomial of exact total degree `degree` (degree 0 gives a
    /// nonzero constant), for tests and the simulation driver.
    pub fn random<R: Rng>(field: &PrimeField, arity: usize, degree: u32, rng: &mut R) -> Self {
        assert!(arity >= 1);
        let p = field.modulus();
        let n_terms = rng.gen_range(1..=(2 + degree as usize * arity));
        let mut terms = Vec::with_capacity(n_terms + 1);
        for _ in 0..n_terms {
            let total = rng.gen_range(0..=degree);
            terms.push((rng.gen_range(0..p), random_exponents(arity, total, rng)));
        }
        // guarantee a term of exact total degree
        terms.push((
            rng.gen_range(1..p),
            random_exponents(arity, degree, rng),
        ));
        MultiPoly::new(field, arity, terms).expect("arity is consistent by construction")
    }
}

fn random_exponents<R: Rng>(arity: usize, total: u32, rng: &mut R) -> Vec<u32> {
    let mut exps = vec![0u32; arity];
    for _ in 0..total {
        exps[rng.gen_range(0..arity)] += 1;
    }
    exps
}

/// Univariate polynomial, coefficients low-to-high, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn new(field: &PrimeField, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| field.elem(c)).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, field: &PrimeField, z: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = field.add(field.mul(acc, z), c);
        }
        acc
    }
}

/// Unique polynomial of degree < n through n points, by Newton's divided
/// differences. Nodes must be distinct.
pub fn interpolate(field: &PrimeField, points: &[(u64, u64)]) -> Result<UniPoly> {
    if points.is_empty() {
        return Err(Error::DegenerateNodes("no interpolation points".into()));
    }
    let n = points.len();
    let xs: Vec<u64> = points.iter().map(|&(x, _)| field.elem(x)).collect();
    {
        let mut seen = xs.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateNodes(
                "duplicate interpolation nodes".into(),
            ));
        }
    }

    // divided-difference table, in place
    let mut dd: Vec<u64> = points.iter().map(|&(_, y)| field.elem(y)).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = field.sub(dd[i], dd[i - 1]);
            let den = field.sub(xs[i], xs[i - level]);
            dd[i] = field.mul(num, field.inv(den)?);
        }
    }

    // expand Newton form c_0 + c_1(z-x_0) + c_2(z-x_0)(z-x_1) + ...
    let mut coeffs = vec![0u64; n];
    let mut basis = vec![0u64; n + 1]; // product Π (z - x_i), low-to-high
    basis[0] = 1;
    let mut basis_len = 1;
    for (level, &c) in dd.iter().enumerate() {
        for i in 0..basis_len {
            coeffs[i] = field.add(coeffs[i], field.mul(c, basis[i]));
        }
        if level + 1 < n {
            // basis *= (z - x_level)
            let neg_x = field.neg(xs[level]);
            basis_len += 1;
            for i in (0..basis_len).rev() {
                let shifted = if i > 0 { basis[i - 1] } else { 0 };
                basis[i] = field.add(field.mul(basis[i], neg_x), shifted);
            }
        }
    }
    Ok(UniPoly::new(field, coeffs))
}

/// Barycentric weights w_i = 1 / Π_{j≠i} (x_i − x_j) for a node set.
pub fn barycentric_weights(field: &PrimeField, nodes: &[u64]) -> Result<Vec<u64>> {
    let n = nodes.len();
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut prod = 1u64;
        for j in 0..n {
            if i != j {
                let diff = field.sub(nodes[i], nodes[j]);
                if diff == 0 {
                    return Err(Error::DegenerateNodes(
                        "duplicate nodes in weight computation".into(),
                    ));
                }
                prod = field.mul(prod, diff);
            }
        }
        weights.push(field.inv(prod)?);
    }
    Ok(weights)
}

/// Row of Lagrange basis values (ℓ_0(z), …, ℓ_{n−1}(z)) using precomputed
/// barycentric weights.
pub fn lagrange_basis_row(
    field: &PrimeField,
    nodes: &[u64],
    weights: &[u64],
    z: u64,
) -> Result<Vec<u64>> {
    let z = field.elem(z);
    if let Some(hit) = nodes.iter().position(|&x| x == z) {
        let mut row = vec![0u64; nodes.len()];
        row[hit] = 1;
        return Ok(row);
    }
    // L(z) = Π (z - x_j); ℓ_i(z) = w_i · L(z) / (z - x_i)
    let mut l_full = 1u64;
    for &x in nodes {
        l_full = field.mul(l_full, field.sub(z, x));
    }
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| {
            let denom = field.inv(field.sub(z, x))?;
            Ok(field.mul(field.mul(w, l_full), denom))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{ToPrimitive, Zero};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng as _, SeedableRng};

    fn gf101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn eval_square() {
        let f = gf101();
        // f(x) = x^2
        let p = MultiPoly::new(&f, 1, vec![(1, vec![2])]).unwrap();
        assert_eq!(p.eval(&f, &[4]).unwrap(), 16);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn eval_zero_poly() {
        let f = gf101();
        let p = MultiPoly::zero(3);
        assert_eq!(p.eval(&f, &[7, 8, 9]).unwrap(), 0);
    }

    #[test]
    fn eval_bivariate() {
        let f = gf101();
        // f(x, y) = x*y + y^2 at (2, 3) -> 6 + 9 = 15
        let p = MultiPoly::new(&f, 2, vec![(1, vec![1, 1]), (1, vec![0, 2])]).unwrap();
        assert_eq!(p.eval(&f, &[2, 3]).unwrap(), 15);
    }

    #[test]
    fn eval_arity_mismatch() {
        let f = gf101();
        let p = MultiPoly::new(&f, 2, vec![(1, vec![1, 1])]).unwrap();
        assert!(matches!(p.eval(&f, &[2]), Err(Error::Shape(_))));
        assert!(MultiPoly::new(&f, 2, vec![(1, vec![1])]).is_err());
    }

    #[test]
    fn terms_merge_and_cancel() {
        let f = gf101();
        let p = MultiPoly::new(&f, 1, vec![(50, vec![1]), (51, vec![1]), (3, vec![0])]).unwrap();
        // 50x + 51x = 101x ≡ 0, leaving the constant
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.degree(), 0);
        assert_eq!(p.eval(&f, &[10]).unwrap(), 3);
    }

    #[test]
    fn interpolate_line() {
        let f = gf101();
        let g = interpolate(&f, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(g.coeffs(), &[1, 1]); // u(z) = z + 1
    }

    #[test]
    fn interpolate_single_point() {
        let f = gf101();
        let g = interpolate(&f, &[(5, 7)]).unwrap();
        assert_eq!(g.coeffs(), &[7]);
    }

    #[test]
    fn interpolate_square_shifted() {
        let f = gf101();
        let pts = [(3, 16), (4, 25), (5, 36), (6, 49), (7, 64)];
        let g = interpolate(&f, &pts).unwrap();
        assert_eq!(g.coeffs(), &[1, 2, 1]); // (z + 1)^2
    }

    #[test]
    fn interpolate_duplicate_nodes() {
        let f = gf101();
        assert!(matches!(
            interpolate(&f, &[(1, 2), (1, 3)]),
            Err(Error::DegenerateNodes(_))
        ));
    }

    #[test]
    fn horner_examples() {
        let f = gf101();
        let g = UniPoly::new(&f, vec![1, 2, 1]);
        assert_eq!(g.eval(&f, 0), 1);
        assert_eq!(g.eval(&f, 2), 9);
        let h = UniPoly::new(&f, vec![1, 1]);
        assert_eq!(h.eval(&f, 8), 9);
    }

    #[test]
    fn basis_row_partition_of_unity() {
        let f = gf101();
        let nodes = [0u64, 1, 2, 3];
        let w = barycentric_weights(&f, &nodes).unwrap();
        for z in 0..20u64 {
            let row = lagrange_basis_row(&f, &nodes, &w, z).unwrap();
            let sum = row.iter().fold(0u64, |a, &b| f.add(a, b));
            assert_eq!(sum, 1, "Σ ℓ_i({z}) must be 1");
        }
    }

    proptest! {
        // interpolate ∘ eval is the identity on polynomials of matching degree
        #[test]
        fn interpolate_roundtrip(seed in 0u64..500, deg in 0usize..6) {
            let f = gf101();
            let mut rng = StdRng::seed_from_u64(seed);
            let mut coeffs: Vec<u64> = (0..=deg).map(|_| rng.gen_range(0..101)).collect();
            if *coeffs.last().unwrap() == 0 {
                *coeffs.last_mut().unwrap() = 1;
            }
            let g = UniPoly::new(&f, coeffs);
            let pts: Vec<(u64, u64)> = (0..=deg as u64).map(|x| (x, g.eval(&f, x))).collect();
            prop_assert_eq!(interpolate(&f, &pts).unwrap(), g);
        }

        // exact evaluation agrees with naive big-integer arithmetic mod p
        #[test]
        fn eval_matches_bigint_oracle(seed in 0u64..300) {
            let f = gf101();
            let mut rng = StdRng::seed_from_u64(seed);
            let arity = rng.gen_range(1..4usize);
            let poly = MultiPoly::random(&f, arity, rng.gen_range(0..4u32), &mut rng);
            let point: Vec<u64> = (0..arity).map(|_| rng.gen_range(0..101)).collect();

            let mut oracle = BigInt::zero();
            for (coeff, exps) in poly.terms() {
                let mut term = BigInt::from(*coeff);
                for (x, &e) in point.iter().zip(exps) {
                    term *= BigInt::from(*x).pow(e);
                }
                oracle += term;
            }
            let expect = (oracle % BigInt::from(101)).to_u64().unwrap();
            prop_assert_eq!(poly.eval(&f, &point).unwrap(), expect);
        }

        // the basis row reproduces interpolation: Σ ℓ_i(z) y_i = g(z)
        #[test]
        fn basis_row_evaluates_interpolant(seed in 0u64..200) {
            let f = gf101();
            let mut rng = StdRng::seed_from_u64(seed);
            let n = rng.gen_range(1..7usize);
            let nodes: Vec<u64> = (0..n as u64).collect();
            let ys: Vec<u64> = (0..n).map(|_| rng.gen_range(0..101)).collect();
            let pts: Vec<(u64, u64)> = nodes.iter().copied().zip(ys.iter().copied()).collect();
            let g = interpolate(&f, &pts).unwrap();
            let w = barycentric_weights(&f, &nodes).unwrap();
            for z in 0..15u64 {
                let row = lagrange_basis_row(&f, &nodes, &w, z).unwrap();
                let combo = row
                    .iter()
                    .zip(&ys)
                    .fold(0u64, |acc, (&l, &y)| f.add(acc, f.mul(l, y)));
                prop_assert_eq!(combo, g.eval(&f, z));
            }
        }
    }
}
