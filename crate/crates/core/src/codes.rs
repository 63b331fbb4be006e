//! Ternary codes attached to the orthogonal groups.
//!
//! For a group `G` listed as `w_1..w_N` in canonical order, `C(G)` is the
//! kernel of `u -> sum_i u_i tr(w_i)` on `F_3^N` and its dual `C(G)^perp`
//! consists of the words `c(a) = (Tr(a tr(w_1)), .., Tr(a tr(w_N)))`.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::charsums::kloosterman;
use crate::error::{Error, Result};
use crate::gf3r::{FieldContext, FieldElement};
use crate::limits::WorkLimits;
use crate::moments::{binomial, trinomial};
use crate::ogroups::{enumerate_group, GroupId, TraceHistogram};

/// A group code together with the traces of its defining elements.
#[derive(Clone, Debug)]
pub struct CodeSpec<'a> {
    pub ctx: &'a FieldContext,
    pub group: GroupId,
    pub traces: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualCodeword {
    pub a: u32,
    pub word: Vec<u8>,
}

impl DualCodeword {
    pub fn weight(&self) -> u128 {
        self.word.iter().filter(|&&c| c != 0).count() as u128
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// Count nonzero coordinates of `c(a)`.
    Direct,
    /// Evaluate the closed form in `K(lambda; a^2)`.
    Formula,
}

impl<'a> CodeSpec<'a> {
    /// Enumerates `group` (subject to `limits`) and records its traces.
    pub fn new(ctx: &'a FieldContext, group: GroupId, limits: &WorkLimits) -> Result<Self> {
        let e = enumerate_group(ctx, group, limits)?;
        Ok(CodeSpec { ctx, group, traces: e.traces(ctx) })
    }

    pub fn length(&self) -> usize {
        self.traces.len()
    }

    pub fn histogram(&self) -> TraceHistogram {
        TraceHistogram::from_traces(self.ctx.q(), self.traces.iter().copied())
    }

    pub fn dual_codeword(&self, a: FieldElement) -> DualCodeword {
        let word = self
            .traces
            .iter()
            .map(|&t| self.ctx.trace(self.ctx.mul(a, t)))
            .collect();
        DualCodeword { a: a.0, word }
    }

    pub fn codeword_weight(&self, a: FieldElement, mode: WeightMode) -> Result<u128> {
        match mode {
            WeightMode::Direct => Ok(self.dual_codeword(a).weight()),
            WeightMode::Formula => weight_formula(self.ctx, self.group, a),
        }
    }

    /// Whether `u` lies in `C(G)`.
    pub fn contains(&self, u: &[u8]) -> bool {
        u.len() == self.length() && {
            let mut s = FieldElement::ZERO;
            for (&c, &t) in u.iter().zip(&self.traces) {
                s = self.ctx.add(s, self.ctx.scale(c, t));
            }
            s.is_zero()
        }
    }
}

/// Weight of `c(a)` for `a != 0` from the Kloosterman sum:
/// `(2/3)(q + 1 + K(a^2))` for `so2` and `o2`,
/// `(2/3) q^2 (K(a^2)^2 + q^4 + q^3 - q - 1)` for `so4`.
pub fn weight_formula(ctx: &FieldContext, group: GroupId, a: FieldElement) -> Result<u128> {
    if a.is_zero() {
        return Err(Error::Domain("the weight formula needs a != 0".into()));
    }
    let k = kloosterman(ctx, ctx.mul(a, a))? as i128;
    let q = ctx.q() as i128;
    let numer = match group {
        GroupId::So2 | GroupId::O2 => 2 * (q + 1 + k),
        GroupId::So4 => 2 * q * q * (k * k + q.pow(4) + q.pow(3) - q - 1),
    };
    if numer % 3 != 0 || numer < 0 {
        return Err(Error::Consistency(format!("weight of c({a}) in C({group})^perp is {numer}/3")));
    }
    Ok((numer / 3) as u128)
}

/// Whether the dual codewords `c(a)` are pairwise distinct.
pub fn dual_codewords_distinct(code: &CodeSpec) -> bool {
    let mut words: Vec<Vec<u8>> = code.ctx.elements().map(|a| code.dual_codeword(a).word).collect();
    words.sort();
    words.windows(2).all(|w| w[0] != w[1])
}

/// `C_0..C_jmax`: the number of codewords of each weight up to `j_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPrefix {
    pub counts: Vec<BigUint>,
}

impl WeightPrefix {
    pub fn j_max(&self) -> u32 {
        self.counts.len() as u32 - 1
    }

    pub fn get(&self, j: u32) -> &BigUint {
        &self.counts[j as usize]
    }
}

/// `C_0..C_jmax` of `C(G)` from the trace histogram alone.
///
/// Coordinates sharing a trace `beta` are interchangeable, so a group of `n`
/// of them contributes `trinomial(n; nu, mu)` ways to place `nu` ones and
/// `mu` twos, shifting `sum u_i tr(w_i)` by `(nu - mu) beta`. The state is
/// that running sum together with the weight so far.
pub fn weight_prefix_dp(ctx: &FieldContext, hist: &TraceHistogram, j_max: u32) -> WeightPrefix {
    let q = ctx.q() as usize;
    let jm = j_max as usize;
    let mut state = vec![vec![BigUint::zero(); jm + 1]; q];
    state[0][0] = BigUint::from(1u32);
    for (beta, n) in hist.iter() {
        if n == 0 {
            continue;
        }
        // poly[d][k]: ways to use d nonzero coordinates with nu - mu = k mod 3
        let top = (n as usize).min(jm);
        let mut poly = vec![[BigUint::zero(), BigUint::zero(), BigUint::zero()]; top + 1];
        for (d, row) in poly.iter_mut().enumerate() {
            for nu in 0..=d {
                let mu = d - nu;
                let k = (nu + 2 * mu) % 3;
                row[k] += trinomial(n, nu as u128, mu as u128);
            }
        }
        let shifts = [FieldElement::ZERO, beta, ctx.scale(2, beta)];
        let mut next = vec![vec![BigUint::zero(); jm + 1]; q];
        for (s, row) in state.iter().enumerate() {
            let s_el = FieldElement(s as u32);
            for (deg, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (d, p) in poly.iter().enumerate().take(jm - deg + 1) {
                    for k in 0..3 {
                        if p[k].is_zero() {
                            continue;
                        }
                        let t = ctx.add(s_el, shifts[k]);
                        next[t.index()][deg + d] += c * &p[k];
                    }
                }
            }
        }
        state = next;
    }
    WeightPrefix { counts: state.swap_remove(0) }
}

/// `sum_{j <= j_max} C(N, j) 2^j`, the number of words a brute-force search
/// visits.
pub fn bruteforce_cost(n: usize, j_max: u32) -> u128 {
    let mut total = BigUint::zero();
    for j in 0..=(j_max as usize).min(n) {
        total += binomial(n as u128, j as u128) << j;
    }
    u128::try_from(total).unwrap_or(u128::MAX)
}

/// `C_0..C_jmax` of `C(G)` by walking every word of weight at most `j_max`.
pub fn weight_prefix_bruteforce(code: &CodeSpec, j_max: u32, limits: &WorkLimits) -> Result<WeightPrefix> {
    limits.check(
        &format!("brute-force weights of C({}) up to j={j_max}", code.group),
        bruteforce_cost(code.length(), j_max),
        "lower --max-j or use the histogram method",
    )?;
    let ctx = code.ctx;
    let mut counts = vec![0u128; j_max as usize + 1];
    // supports are visited as increasing position lists
    fn visit(
        ctx: &FieldContext,
        traces: &[FieldElement],
        start: usize,
        weight: usize,
        sum: FieldElement,
        counts: &mut [u128],
    ) {
        if sum.is_zero() {
            counts[weight] += 1;
        }
        if weight + 1 >= counts.len() {
            return;
        }
        for p in start..traces.len() {
            for v in [1u8, 2] {
                let s = ctx.add(sum, ctx.scale(v, traces[p]));
                visit(ctx, traces, p + 1, weight + 1, s, counts);
            }
        }
    }
    visit(ctx, &code.traces, 0, 0, FieldElement::ZERO, &mut counts);
    Ok(WeightPrefix { counts: counts.into_iter().map(BigUint::from).collect() })
}
