//! Lagrange encoding of the dataset, recovery thresholds, and decoding of
//! polynomial outputs from any sufficient subset of intermediate values.
//!
//! An `(m', m)` Lagrange code evaluates the degree-(m−1) interpolant through
//! the data rows at `m'` fresh nodes. Composing with a degree-`d` Map
//! function gives evaluations of a degree-(m−1)d polynomial, so any
//! `m* = (m−1)d + 1` intermediate values recover all `m` outputs. With no
//! coding (`r1 = 1`) the threshold degenerates to `m* = m` and decode is
//! plain collection.

use crate::field::PrimeField;
use crate::poly::{self, interpolate};
use crate::rational::{binomial, Ratio};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

/// Recovery threshold `m* = (m−1)d' + 1` with `d' = 1` when `r1 = 1`
/// (uncoded) and `d' = d` otherwise.
pub fn recovery_threshold(m: u64, d: u32, r1: &Ratio) -> u64 {
    let d_prime = if r1.is_one() { 1 } else { d as u64 };
    (m - 1) * d_prime + 1
}

/// Parameters of one Lagrange code instance: node sets and derived
/// recovery threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeParams {
    m: u64,
    m_prime: u64,
    d: u32,
    d_prime: u32,
    m_star: u64,
    data_nodes: Vec<u64>,
    code_nodes: Vec<u64>,
    uncoded: bool,
}

impl CodeParams {
    /// Standard node layout: data nodes 0..m, code nodes m..m+m'. With
    /// `m_prime == m` the code is the identity (no Lagrange coding).
    pub fn new(field: &PrimeField, m: u64, m_prime: u64, d: u32) -> Result<Self> {
        if m == 0 || m_prime < m {
            return Err(Error::InvalidConfig(format!(
                "need m' >= m >= 1, got m={m}, m'={m_prime}"
            )));
        }
        if m_prime == m {
            let data_nodes: Vec<u64> = (0..m).collect();
            return Self::with_nodes(field, d, data_nodes.clone(), data_nodes);
        }
        let data_nodes: Vec<u64> = (0..m).collect();
        let code_nodes: Vec<u64> = (m..m + m_prime).collect();
        Self::with_nodes(field, d, data_nodes, code_nodes)
    }

    /// Concatenated-code accounting: `m' = b·C(K, r2)` coded rows.
    pub fn concrete(field: &PrimeField, k: u32, r2: u32, b: u64, m: u64, d: u32) -> Result<Self> {
        let m_prime = binomial(k as u64, r2 as i64) * BigInt::from(b);
        let m_prime = m_prime.to_u64().ok_or_else(|| {
            Error::InvalidConfig("coded dataset size overflows u64".to_string())
        })?;
        Self::new(field, m, m_prime, d)
    }

    /// Explicit node sets; the code is the identity iff the two sets are
    /// equal. Coded instances require pairwise-distinct nodes across the
    /// union and enough rows to meet the recovery threshold.
    pub fn with_nodes(
        field: &PrimeField,
        d: u32,
        data_nodes: Vec<u64>,
        code_nodes: Vec<u64>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidConfig("degree d must be positive".into()));
        }
        let m = data_nodes.len() as u64;
        let m_prime = code_nodes.len() as u64;
        if m == 0 || m_prime == 0 {
            return Err(Error::InvalidConfig("empty node set".into()));
        }
        let uncoded = data_nodes == code_nodes;
        let required = if uncoded { m } else { m + m_prime };
        if required >= field.modulus() {
            return Err(Error::FieldTooSmall {
                p: field.modulus(),
                required,
            });
        }
        let reduced: Vec<u64> = data_nodes.iter().map(|&x| field.elem(x)).collect();
        let reduced_code: Vec<u64> = code_nodes.iter().map(|&x| field.elem(x)).collect();
        check_distinct(&reduced)?;
        check_distinct(&reduced_code)?;
        if !uncoded {
            let mut all = reduced.clone();
            all.extend_from_slice(&reduced_code);
            check_distinct(&all)?;
        }
        let (d_prime, m_star) = if uncoded {
            (1, m)
        } else {
            (d, (m - 1) * d as u64 + 1)
        };
        if !uncoded && m_prime < m_star {
            return Err(Error::InfeasibleConfig(format!(
                "m' = {m_prime} coded rows cannot meet the recovery threshold m* = {m_star}"
            )));
        }
        Ok(CodeParams {
            m,
            m_prime,
            d,
            d_prime,
            m_star,
            data_nodes: reduced,
            code_nodes: reduced_code,
            uncoded,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn m_prime(&self) -> u64 {
        self.m_prime
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn d_prime(&self) -> u32 {
        self.d_prime
    }

    pub fn m_star(&self) -> u64 {
        self.m_star
    }

    pub fn data_nodes(&self) -> &[u64] {
        &self.data_nodes
    }

    pub fn code_nodes(&self) -> &[u64] {
        &self.code_nodes
    }

    pub fn is_uncoded(&self) -> bool {
        self.uncoded
    }

    /// Lagrange redundancy m'/m.
    pub fn r1(&self) -> Ratio {
        Ratio::new(BigInt::from(self.m_prime), BigInt::from(self.m))
    }
}

fn check_distinct(nodes: &[u64]) -> Result<()> {
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateNodes(
            "evaluation nodes collide".to_string(),
        ));
    }
    Ok(())
}

/// One Map evaluation `f_{function_id}(c_j)` identified by the code node of
/// its row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntermediateValue {
    pub function_id: usize,
    pub code_node: u64,
    pub value: u64,
}

/// The encoded dataset: `m'` rows of the same width as the input.
#[derive(Clone, Debug)]
pub struct CodedDataset {
    pub rows: Vec<Vec<u64>>,
    pub params: CodeParams,
}

/// Encoding matrix G with G[j][i] = ℓ_i(θ_j); the identity when uncoded.
pub fn generator_matrix(field: &PrimeField, params: &CodeParams) -> Result<Vec<Vec<u64>>> {
    let m = params.m as usize;
    if params.uncoded {
        let mut g = vec![vec![0u64; m]; m];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 1;
        }
        return Ok(g);
    }
    let weights = poly::barycentric_weights(field, &params.data_nodes)?;
    params
        .code_nodes
        .iter()
        .map(|&theta| poly::lagrange_basis_row(field, &params.data_nodes, &weights, theta))
        .collect()
}

/// Encode the dataset: row j of the output is u(θ_j) coordinate-wise, where
/// u interpolates the data rows at the data nodes (C = G·A).
pub fn encode(field: &PrimeField, data: &[Vec<u64>], params: &CodeParams) -> Result<CodedDataset> {
    if data.len() as u64 != params.m {
        return Err(Error::Shape(format!(
            "dataset has {} rows, code expects {}",
            data.len(),
            params.m
        )));
    }
    let width = data.first().map(|r| r.len()).unwrap_or(0);
    if data.iter().any(|r| r.len() != width) {
        return Err(Error::Shape("ragged dataset rows".to_string()));
    }
    if params.uncoded {
        let rows = data
            .iter()
            .map(|r| r.iter().map(|&x| field.elem(x)).collect())
            .collect();
        return Ok(CodedDataset {
            rows,
            params: params.clone(),
        });
    }
    let g = generator_matrix(field, params)?;
    let rows = g
        .iter()
        .map(|grow| {
            (0..width)
                .map(|c| {
                    grow.iter()
                        .zip(data)
                        .fold(0u64, |acc, (&gij, arow)| {
                            field.add(acc, field.mul(gij, field.elem(arow[c])))
                        })
                })
                .collect()
        })
        .collect();
    Ok(CodedDataset {
        rows,
        params: params.clone(),
    })
}

/// Recover the `m` outputs of one function from its intermediate values.
///
/// Coded path: interpolate g(z) = f(u(z)) from the first `m*` IVs in
/// node-ascending order and evaluate at the data nodes. Uncoded path: the
/// IVs at the data nodes are the outputs, and all must be present.
pub fn decode_outputs(
    field: &PrimeField,
    ivs: &[IntermediateValue],
    params: &CodeParams,
) -> Result<Vec<u64>> {
    if let Some(first) = ivs.first() {
        if ivs.iter().any(|iv| iv.function_id != first.function_id) {
            return Err(Error::Shape(
                "intermediate values from different functions".to_string(),
            ));
        }
    }
    let mut sorted: Vec<(u64, u64)> = ivs.iter().map(|iv| (iv.code_node, iv.value)).collect();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::DegenerateNodes(
            "duplicate code nodes among intermediate values".to_string(),
        ));
    }

    if params.uncoded {
        let mut out = Vec::with_capacity(params.m as usize);
        for &node in &params.data_nodes {
            match sorted.binary_search_by_key(&node, |&(n, _)| n) {
                Ok(idx) => out.push(sorted[idx].1),
                Err(_) => {
                    return Err(Error::InsufficientIvs {
                        have: sorted.len(),
                        need: params.m as usize,
                    })
                }
            }
        }
        return Ok(out);
    }

    let m_star = params.m_star as usize;
    if sorted.len() < m_star {
        return Err(Error::InsufficientIvs {
            have: sorted.len(),
            need: m_star,
        });
    }
    sorted.truncate(m_star);
    let g = interpolate(field, &sorted)?;
    Ok(params
        .data_nodes
        .iter()
        .map(|&beta| g.eval(field, beta))
        .collect())
}
