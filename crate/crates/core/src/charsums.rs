//! Additive character sums over GF(3^r).
//!
//! The canonical additive character is `lambda(x) = w^tr(x)` with `w` a
//! primitive cube root of unity, so every character sum is an element of
//! Z[w]. Sums are accumulated as counts per trace value and reduced with
//! `w^2 = -1 - w`; the ones we care about are real, hence rational integers.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf3r::{FieldContext, FieldElement};
use crate::limits::WorkLimits;

/// `n0 + n1 w + n2 w^2` with nonnegative counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OmegaSum {
    pub n: [u64; 3],
}

impl OmegaSum {
    pub fn new(n0: u64, n1: u64, n2: u64) -> Self {
        OmegaSum { n: [n0, n1, n2] }
    }

    /// Adds one summand `w^t`.
    #[inline]
    pub fn push(&mut self, t: u8) {
        self.n[t as usize] += 1;
    }

    pub fn merge(mut self, other: OmegaSum) -> OmegaSum {
        for i in 0..3 {
            self.n[i] += other.n[i];
        }
        self
    }

    /// Canonical form `(A, B)` meaning `A + B w`.
    pub fn reduce(&self) -> (i64, i64) {
        let [n0, n1, n2] = self.n.map(|c| c as i64);
        (n0 - n2, n1 - n2)
    }

    pub fn is_real(&self) -> bool {
        self.n[1] == self.n[2]
    }

    /// The integer value; fails when the sum is not real.
    pub fn to_integer(&self) -> Result<i64> {
        match self.reduce() {
            (a, 0) => Ok(a),
            (a, b) => Err(Error::Consistency(format!(
                "character sum {a} + {b}w is not real"
            ))),
        }
    }
}

/// `c0 + c1 w + c2 w^2` with arbitrary integer weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EisensteinSum {
    pub c: [BigInt; 3],
}

impl EisensteinSum {
    pub fn add_weighted(&mut self, t: u8, weight: &BigInt) {
        self.c[t as usize] += weight;
    }

    pub fn reduce(&self) -> (BigInt, BigInt) {
        (&self.c[0] - &self.c[2], &self.c[1] - &self.c[2])
    }

    pub fn to_integer(&self) -> Result<BigInt> {
        let (a, b) = self.reduce();
        if b.is_zero() {
            Ok(a)
        } else {
            Err(Error::Consistency(format!(
                "character sum {a} + {b}w is not real"
            )))
        }
    }
}

/// `sum_beta weight(beta) * lambda(a * beta)` over the given pairs.
pub fn weighted_character_sum<'w, I>(ctx: &FieldContext, a: FieldElement, weights: I) -> EisensteinSum
where
    I: IntoIterator<Item = (FieldElement, &'w BigInt)>,
{
    let mut acc = EisensteinSum::default();
    for (beta, w) in weights {
        acc.add_weighted(ctx.trace(ctx.mul(a, beta)), w);
    }
    acc
}

/// The raw accumulator of `K(lambda; a) = sum_{x != 0} lambda(x + a/x)`.
pub fn kloosterman_accumulator(ctx: &FieldContext, a: FieldElement) -> Result<OmegaSum> {
    if a.is_zero() {
        return Err(Error::Domain("Kloosterman sum needs a nonzero argument".into()));
    }
    let mut acc = OmegaSum::default();
    for x in ctx.nonzero() {
        let s = ctx.add(x, ctx.mul(a, ctx.inv(x)?));
        acc.push(ctx.trace(s));
    }
    Ok(acc)
}

/// `K(lambda; a)` as an exact integer.
pub fn kloosterman(ctx: &FieldContext, a: FieldElement) -> Result<i64> {
    kloosterman_accumulator(ctx, a)?.to_integer()
}

/// Kloosterman sums for every nonzero argument.
#[derive(Clone, Debug)]
pub struct KloostermanTable {
    q: u32,
    values: Vec<i64>,
}

impl KloostermanTable {
    /// Evaluates all `q - 1` sums. Cost `q^2 r` is checked against `limits`.
    pub fn compute(ctx: &FieldContext, limits: &WorkLimits) -> Result<Self> {
        let q = ctx.q() as u128;
        limits.check(
            "Kloosterman table",
            q * q * ctx.r() as u128,
            "lower r or raise --limit-ops",
        )?;
        let order = ctx.q() - 1;
        // x = g^i, a/x = g^(log a - i)
        let powers: Vec<FieldElement> = (0..order).map(|i| ctx.pow(ctx.generator(), i as u64)).collect();
        let accs: Vec<OmegaSum> = (1..ctx.q())
            .into_par_iter()
            .map(|a| {
                let la = ctx.log(FieldElement(a)).expect("nonzero");
                let mut acc = OmegaSum::default();
                for i in 0..order {
                    let j = (la + order - i) % order;
                    let s = ctx.add(powers[i as usize], powers[j as usize]);
                    acc.push(ctx.trace(s));
                }
                acc
            })
            .collect();
        let mut values = vec![0i64; ctx.q() as usize];
        for (i, acc) in accs.iter().enumerate() {
            values[i + 1] = acc.to_integer()?;
        }
        Ok(KloostermanTable { q: ctx.q(), values })
    }

    pub fn get(&self, a: FieldElement) -> Result<i64> {
        if a.is_zero() || a.0 >= self.q {
            return Err(Error::Domain(format!("no Kloosterman sum at index {a}")));
        }
        Ok(self.values[a.index()])
    }

    /// `SK^h`, summing `K(a)^h` over the nonzero squares `a`.
    pub fn sk_moment(&self, ctx: &FieldContext, h: u32) -> BigInt {
        ctx.squares()
            .iter()
            .map(|&a| BigInt::from(self.values[a.index()]).pow(h))
            .sum()
    }

    /// `SK^0, .., SK^h_max`.
    pub fn sk_moments(&self, ctx: &FieldContext, h_max: u32) -> Vec<BigInt> {
        (0..=h_max).map(|h| self.sk_moment(ctx, h)).collect()
    }
}

/// `SK^h` by direct summation, within the default work limit.
pub fn sk_moment(ctx: &FieldContext, h: u32) -> Result<BigInt> {
    Ok(KloostermanTable::compute(ctx, &WorkLimits::default())?.sk_moment(ctx, h))
}

/// `SK^0, .., SK^h_max` by direct summation.
pub fn sk_moments(ctx: &FieldContext, h_max: u32, limits: &WorkLimits) -> Result<Vec<BigInt>> {
    Ok(KloostermanTable::compute(ctx, limits)?.sk_moments(ctx, h_max))
}

/// The counts `delta(m, q; beta)` for every `beta`, indexed by field index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaTable {
    pub m: u32,
    pub values: Vec<u128>,
}

impl DeltaTable {
    pub fn get(&self, beta: FieldElement) -> u128 {
        self.values[beta.index()]
    }

    pub fn total(&self) -> u128 {
        self.values.iter().sum()
    }
}

/// `delta(1, q; beta)` by counting roots of `x^2 - beta x + 1`: every root is
/// nonzero and determines `beta = x + 1/x`.
pub fn delta_one_by_roots(ctx: &FieldContext) -> DeltaTable {
    let mut values = vec![0u128; ctx.q() as usize];
    for x in ctx.nonzero() {
        let beta = ctx.add(x, ctx.inv(x).expect("nonzero"));
        values[beta.index()] += 1;
    }
    DeltaTable { m: 1, values }
}

/// `delta(1, q; beta)` from the quadratic character of `beta^2 - 1`.
pub fn delta_one_by_cases(ctx: &FieldContext) -> DeltaTable {
    let values = ctx
        .elements()
        .map(|beta| {
            let disc = ctx.sub(ctx.mul(beta, beta), FieldElement::ONE);
            if disc.is_zero() {
                1
            } else if ctx.is_square(disc) {
                2
            } else {
                0
            }
        })
        .collect();
    DeltaTable { m: 1, values }
}

/// `delta(m, q; .)`: a point mass at 0 for `m = 0`, otherwise the `m`-fold
/// additive convolution of the `m = 1` table.
pub fn delta_count(ctx: &FieldContext, m: u32) -> Result<DeltaTable> {
    let q = ctx.q() as usize;
    if m == 0 {
        let mut values = vec![0u128; q];
        values[0] = 1;
        return Ok(DeltaTable { m: 0, values });
    }
    let one = delta_one_by_roots(ctx);
    if one != delta_one_by_cases(ctx) {
        return Err(Error::Consistency(
            "root count and quadratic-character count of delta(1) disagree".into(),
        ));
    }
    let mut cur = one.clone();
    for step in 2..=m {
        let mut next = vec![0u128; q];
        for (g, &cg) in cur.values.iter().enumerate() {
            if cg == 0 {
                continue;
            }
            for (d, &cd) in one.values.iter().enumerate() {
                if cd != 0 {
                    let beta = ctx.add(FieldElement(g as u32), FieldElement(d as u32));
                    next[beta.index()] += cg * cd;
                }
            }
        }
        cur = DeltaTable { m: step, values: next };
    }
    Ok(cur)
}

/// `|x|^2 <= 4q`, i.e. `|K| <= 2 sqrt(q)` without floating point.
pub fn within_weil_bound(k: i64, q: u32) -> bool {
    let k = BigInt::from(k);
    (&k * &k) <= BigInt::from(4u64 * q as u64)
}

/// `floor(2 sqrt(q))`.
pub fn weil_bound_floor(q: u32) -> i64 {
    let four_q = 4 * q as u64;
    let mut s = (four_q as f64).sqrt() as u64;
    while s * s > four_q {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= four_q {
        s += 1;
    }
    s as i64
}
