//! The Pless power-moment identity and the moment recursions it yields.
//!
//! For a ternary code `C` of length `N` whose dual `C^perp` has `q = 3^r`
//! codewords, the Pless identity ties `sum_j j^h B_j` (weights of the dual)
//! to the low-weight counts `C_0..C_h`. The dual weights are affine in
//! `K(lambda; a^2)` (or its square for `SO-(4,q)`), which turns the identity
//! into a recursion for `SK^h` (respectively `SK^2h`).
//!
//! All sums are accumulated as exact rationals in the order they are written
//! and the final value is required to be an integer.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::charsums::KloostermanTable;
use crate::codes::{weight_prefix_dp, CodeSpec, WeightMode, WeightPrefix};
use crate::error::{Error, Result};
use crate::gf3r::FieldContext;
use crate::limits::WorkLimits;
use crate::ogroups::{histogram_closed_form, GroupId};

/// An exact rational used for intermediate terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactScalar(pub BigRational);

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Self {
        ExactScalar(BigRational::from_integer(v.into()))
    }

    /// `base^exp` for any integer exponent.
    pub fn pow(base: i64, exp: i64) -> Self {
        let b = BigRational::from_integer(BigInt::from(base));
        ExactScalar(b.pow(exp as i32))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The value as an integer; a non-unit denominator is a consistency error.
    pub fn into_integer(self, what: &str) -> Result<BigInt> {
        if self.0.is_integer() {
            Ok(self.0.to_integer())
        } else {
            Err(Error::Consistency(format!("{what} = {} is not an integer", self.0)))
        }
    }
}

impl std::ops::Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: Self) -> Self {
        ExactScalar(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl std::ops::Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: Self) -> Self {
        ExactScalar(self.0 * rhs.0)
    }
}

impl std::ops::Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> Self {
        ExactScalar(-self.0)
    }
}

/// Stirling numbers of the second kind `S(h, t)`, 0 outside `0 <= t <= h`.
pub fn stirling2(h: u32, t: u32) -> BigUint {
    if t > h {
        return BigUint::zero();
    }
    stirling2_row(h).swap_remove(t as usize)
}

/// `S(h, 0..=h)` by the triangle `S(n,k) = k S(n-1,k) + S(n-1,k-1)`.
pub fn stirling2_row(h: u32) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for n in 1..=h as usize {
        let mut next = vec![BigUint::zero(); n + 1];
        for k in 1..=n {
            let mut v = if k < n { &row[k] * BigUint::from(k) } else { BigUint::zero() };
            v += &row[k - 1];
            next[k] = v;
        }
        row = next;
    }
    row
}

/// `C(n, k)` for possibly huge `n` and small `k` (either side).
pub fn binomial(n: u128, k: u128) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// `c! / (a! b! (c-a-b)!)` when `a + b <= c`, and 0 when `a + b > c`.
pub fn trinomial(c: u128, a: u128, b: u128) -> BigUint {
    match a.checked_add(b) {
        Some(s) if s <= c => binomial(c, s) * binomial(s, a),
        _ => BigUint::zero(),
    }
}

fn factorial(n: u32) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// `C(n-j, n-t)`, zero when `t > n`.
fn tail_binomial(n: u128, j: u32, t: u32) -> BigUint {
    if t as u128 > n {
        BigUint::zero()
    } else {
        binomial(n - j as u128, n - t as u128)
    }
}

/// Right-hand side of the Pless identity over an alphabet of size
/// `alphabet`. `dim` is the dimension of the code whose weights appear on
/// the left and `dual_prefix` holds the low-weight counts of its dual.
pub fn pless_rhs(
    length: u128,
    dim: u32,
    alphabet: u32,
    h: u32,
    dual_prefix: &WeightPrefix,
) -> Result<ExactScalar> {
    let top = (length.min(h as u128)) as u32;
    if dual_prefix.j_max() < top {
        return Err(Error::Domain(format!(
            "weight prefix reaches j={} but the identity needs j={top}",
            dual_prefix.j_max()
        )));
    }
    let stirling = stirling2_row(h);
    let mut total = ExactScalar::zero();
    for j in 0..=top {
        let mut inner = ExactScalar::zero();
        for t in j..=h {
            inner += ExactScalar::from_int(BigInt::from(factorial(t) * &stirling[t as usize]))
                * ExactScalar::pow(alphabet as i64, dim as i64 - t as i64)
                * ExactScalar::pow(alphabet as i64 - 1, (t - j) as i64)
                * ExactScalar::from_int(BigInt::from(tail_binomial(length, j, t)));
        }
        let cj = ExactScalar::from_int(BigInt::from(dual_prefix.get(j).clone()));
        let term = cj * inner;
        total += if j % 2 == 0 { term } else { -term };
    }
    Ok(total)
}

/// Both sides of the Pless identity for `B = C(G)^perp`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlessCheck {
    pub code: GroupId,
    pub h: u32,
    #[serde(serialize_with = "ser_display")]
    pub lhs: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub rhs: BigInt,
    pub holds: bool,
}

/// Evaluates the Pless identity on `C(G)^perp`.
///
/// The left side sums `w(c(a))^h` over every `a` in `F_q` (so the zero word
/// contributes `0^0 = 1` at `h = 0`), with each weight counted directly on
/// the codeword and checked against its closed form. The right side uses the
/// dynamic-programming weight prefix of `C(G)`.
pub fn pless_check(ctx: &FieldContext, id: GroupId, h: u32, limits: &WorkLimits) -> Result<PlessCheck> {
    let code = CodeSpec::new(ctx, id, limits)?;
    let mut lhs = BigInt::zero();
    for a in ctx.elements() {
        let direct = code.codeword_weight(a, WeightMode::Direct)?;
        if !a.is_zero() {
            let formula = code.codeword_weight(a, WeightMode::Formula)?;
            if formula != direct {
                return Err(Error::Consistency(format!(
                    "weight of c({a}) in C({id})^perp: counted {direct}, formula {formula}"
                )));
            }
        }
        lhs += BigInt::from(direct).pow(h);
    }
    let n = code.length() as u128;
    let prefix = weight_prefix_dp(ctx, &code.histogram(), n.min(h as u128) as u32);
    let rhs = pless_rhs(n, ctx.r(), 3, h, &prefix)?.into_integer("Pless right-hand side")?;
    Ok(PlessCheck { code: id, h, holds: lhs == rhs, lhs, rhs })
}

/// The sum `sum_j (-1)^j C_j sum_t t! S(h,t) 3^(h-t) 2^(t-h-j-1) C(N-j, N-t)`
/// shared by all three recursions.
fn weighted_prefix_sum(length: u128, h: u32, prefix: &WeightPrefix) -> Result<ExactScalar> {
    let top = (length.min(h as u128)) as u32;
    if prefix.j_max() < top {
        return Err(Error::Domain(format!(
            "weight prefix reaches j={} but the recursion needs j={top}",
            prefix.j_max()
        )));
    }
    let stirling = stirling2_row(h);
    let mut total = ExactScalar::zero();
    for j in 0..=top {
        let mut inner = ExactScalar::zero();
        for t in j..=h {
            inner += ExactScalar::from_int(BigInt::from(factorial(t) * &stirling[t as usize]))
                * ExactScalar::pow(3, h as i64 - t as i64)
                * ExactScalar::pow(2, t as i64 - h as i64 - j as i64 - 1)
                * ExactScalar::from_int(BigInt::from(tail_binomial(length, j, t)));
        }
        let term = ExactScalar::from_int(BigInt::from(prefix.get(j).clone())) * inner;
        total += if j % 2 == 0 { term } else { -term };
    }
    Ok(total)
}

/// `SK^h` from `SK^0..SK^(h-1)` and the weight prefix of `C(SO-(2,q))` or
/// `C(O-(2,q))`.
pub fn sk_recursive(
    ctx: &FieldContext,
    id: GroupId,
    h: u32,
    prefix: &WeightPrefix,
    lower: &[BigInt],
) -> Result<BigInt> {
    if id == GroupId::So4 {
        return Err(Error::Domain("SO-(4,q) yields even moments; use sk2_recursive".into()));
    }
    if h == 0 {
        return Err(Error::Domain("the recursion starts at h = 1".into()));
    }
    if lower.len() < h as usize {
        return Err(Error::Domain(format!("need SK^0..SK^{}, got {} values", h - 1, lower.len())));
    }
    let q = BigInt::from(ctx.q());
    let q_plus_one: BigInt = &q + 1u32;
    let mut acc = ExactScalar::zero();
    for (j, sk) in lower.iter().take(h as usize).enumerate() {
        let c = BigInt::from(binomial(h as u128, j as u128)) * q_plus_one.pow(h - j as u32) * sk;
        acc += -ExactScalar::from_int(c);
    }
    acc += ExactScalar::from_int(q) * weighted_prefix_sum(id.order(ctx.q()), h, prefix)?;
    acc.into_integer(&format!("SK^{h} via C({id})"))
}

/// `SK^2h` from `SK^0, SK^2, .., SK^(2h-2)` (passed as `lower_even[j] =
/// SK^2j`) and the weight prefix of `C(SO-(4,q))`.
pub fn sk2_recursive(
    ctx: &FieldContext,
    h: u32,
    prefix: &WeightPrefix,
    lower_even: &[BigInt],
) -> Result<BigInt> {
    if h == 0 {
        return Err(Error::Domain("the recursion starts at h = 1".into()));
    }
    if lower_even.len() < h as usize {
        return Err(Error::Domain(format!(
            "need SK^0, SK^2, .., SK^{}, got {} values",
            2 * (h - 1),
            lower_even.len()
        )));
    }
    let q = BigInt::from(ctx.q());
    let d: BigInt = q.pow(4) + q.pow(3) - &q - 1u32;
    let mut acc = ExactScalar::zero();
    for (j, sk) in lower_even.iter().take(h as usize).enumerate() {
        let c = BigInt::from(binomial(h as u128, j as u128)) * d.pow(h - j as u32) * sk;
        acc += -ExactScalar::from_int(c);
    }
    acc += ExactScalar::pow(ctx.q() as i64, 1 - 2 * h as i64)
        * weighted_prefix_sum(GroupId::So4.order(ctx.q()), h, prefix)?;
    acc.into_integer(&format!("SK^{} via C(so4)", 2 * h))
}

/// `SK^0 = (q - 1) / 2`, the number of nonzero squares.
pub fn sk_zero(ctx: &FieldContext) -> BigInt {
    BigInt::from((ctx.q() - 1) / 2)
}

/// Runs a recursion from `SK^0` alone up to `h_max`, feeding each output
/// back in. For `SO-(4,q)` entry `h` is `SK^2h`.
pub fn recursion_chain(ctx: &FieldContext, id: GroupId, h_max: u32) -> Result<Vec<BigInt>> {
    let hist = histogram_closed_form(ctx, id)?;
    let n = id.order(ctx.q());
    let prefix = weight_prefix_dp(ctx, &hist, n.min(h_max as u128) as u32);
    let mut values = vec![sk_zero(ctx)];
    for h in 1..=h_max {
        let next = match id {
            GroupId::So4 => sk2_recursive(ctx, h, &prefix, &values)?,
            _ => sk_recursive(ctx, id, h, &prefix, &values)?,
        };
        values.push(next);
    }
    Ok(values)
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentRow {
    pub h: u32,
    pub direct: String,
    pub recursive: String,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Direct against recursive moments for one code. For `so4`, row `h`
/// compares `SK^2h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentReport {
    pub q: u32,
    pub r: u32,
    pub code: GroupId,
    pub rows: Vec<MomentRow>,
    pub elapsed_ms: u64,
}

impl MomentReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn first_mismatch(&self) -> Option<&MomentRow> {
        self.rows.iter().find(|r| !r.matches)
    }
}

/// Checks all three recursions against direct moments: `h = 1..=h_max` for
/// the 2x2 codes and `h = 1..=h_max/2` for `SO-(4,q)`.
pub fn verify_report(ctx: &FieldContext, h_max: u32, limits: &WorkLimits) -> Result<Vec<MomentReport>> {
    let start = Instant::now();
    let table = KloostermanTable::compute(ctx, limits)?;
    let direct = table.sk_moments(ctx, h_max);
    let direct_ms = start.elapsed().as_millis() as u64;
    GroupId::ALL
        .iter()
        .map(|&id| {
            let t0 = Instant::now();
            let (steps, stride) = match id {
                GroupId::So4 => (h_max / 2, 2),
                _ => (h_max, 1),
            };
            let chain = recursion_chain(ctx, id, steps)?;
            let rows = (1..=steps)
                .map(|h| {
                    let d = &direct[(h * stride) as usize];
                    let rec = &chain[h as usize];
                    MomentRow { h, direct: d.to_string(), recursive: rec.to_string(), matches: d == rec }
                })
                .collect();
            Ok(MomentReport {
                q: ctx.q(),
                r: ctx.r(),
                code: id,
                rows,
                elapsed_ms: direct_ms + t0.elapsed().as_millis() as u64,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::weight_prefix_dp;

    fn field(r: u32) -> FieldContext {
        FieldContext::with_default(r).unwrap()
    }

    /// `S(h,t) = (1/t!) sum_j (-1)^(t-j) C(t,j) j^h`.
    fn stirling_by_sum(h: u32, t: u32) -> BigInt {
        let mut acc = BigInt::zero();
        for j in 0..=t {
            let term = BigInt::from(binomial(t as u128, j as u128)) * BigInt::from(j).pow(h);
            if (t - j).is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc / BigInt::from(factorial(t))
    }

    fn factorial_big(n: u128) -> BigUint {
        (1..=n).map(BigUint::from).product()
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(1, 1), BigUint::from(1u32));
        assert_eq!(stirling2(3, 2), BigUint::from(3u32));
        assert_eq!(stirling2(4, 2), BigUint::from(7u32));
        assert_eq!(stirling2(0, 0), BigUint::from(1u32));
        assert_eq!(stirling2(3, 0), BigUint::zero());
        assert_eq!(stirling2(2, 3), BigUint::zero());
    }

    #[test]
    fn stirling_matches_explicit_sum() {
        for h in 0..=30 {
            for t in 0..=h {
                assert_eq!(BigInt::from(stirling2(h, t)), stirling_by_sum(h, t), "S({h},{t})");
            }
        }
    }

    #[test]
    fn trinomial_values_and_convention() {
        assert_eq!(trinomial(3, 1, 1), BigUint::from(6u32));
        assert_eq!(trinomial(2, 1, 0), BigUint::from(2u32));
        assert_eq!(trinomial(1, 1, 1), BigUint::zero());
        for c in 0..=30u128 {
            for a in 0..=30u128 {
                for b in 0..=30u128 {
                    let want = if a + b <= c {
                        factorial_big(c) / (factorial_big(a) * factorial_big(b) * factorial_big(c - a - b))
                    } else {
                        BigUint::zero()
                    };
                    assert_eq!(trinomial(c, a, b), want);
                }
            }
        }
    }

    #[test]
    fn binomial_huge_top() {
        let n = GroupId::So4.order(27);
        assert_eq!(binomial(n, n - 1), BigUint::from(n));
        assert_eq!(binomial(n, 2), BigUint::from(n) * BigUint::from(n - 1) / BigUint::from(2u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn exact_scalar_integrality() {
        let half = ExactScalar::pow(2, -1);
        assert!(!half.is_integer());
        assert!(half.clone().into_integer("half").is_err());
        let one = half.clone() + half;
        assert_eq!(one.into_integer("one").unwrap(), BigInt::from(1));
    }

    #[test]
    fn hand_evaluated_recursions_over_f3() {
        let f = field(1);
        let so2 = weight_prefix_dp(&f, &histogram_closed_form(&f, GroupId::So2).unwrap(), 4);
        let lower = vec![BigInt::from(1)];
        assert_eq!(sk_recursive(&f, GroupId::So2, 1, &so2, &lower).unwrap(), BigInt::from(-1));
        let lower = vec![BigInt::from(1), BigInt::from(-1)];
        assert_eq!(sk_recursive(&f, GroupId::So2, 2, &so2, &lower).unwrap(), BigInt::from(1));

        let o2 = weight_prefix_dp(&f, &histogram_closed_form(&f, GroupId::O2).unwrap(), 1);
        assert_eq!(sk_recursive(&f, GroupId::O2, 1, &o2, &[BigInt::from(1)]).unwrap(), BigInt::from(-1));

        let so4 = weight_prefix_dp(&f, &histogram_closed_form(&f, GroupId::So4).unwrap(), 2);
        assert_eq!(sk2_recursive(&f, 1, &so4, &[BigInt::from(1)]).unwrap(), BigInt::from(1));
        assert_eq!(
            sk2_recursive(&f, 2, &so4, &[BigInt::from(1), BigInt::from(1)]).unwrap(),
            BigInt::from(1)
        );
    }

    #[test]
    fn recursion_preconditions() {
        let f = field(1);
        let p = weight_prefix_dp(&f, &histogram_closed_form(&f, GroupId::So2).unwrap(), 0);
        assert!(sk_recursive(&f, GroupId::So2, 1, &p, &[]).is_err());
        assert!(sk_recursive(&f, GroupId::So2, 2, &p, &[BigInt::from(1), BigInt::from(-1)]).is_err());
        assert!(sk_recursive(&f, GroupId::So4, 1, &p, &[BigInt::from(1)]).is_err());
        assert!(sk2_recursive(&f, 0, &p, &[]).is_err());
    }

    #[test]
    fn pless_small_cases() {
        let f = field(1);
        let l = WorkLimits::default();
        let c = pless_check(&f, GroupId::So2, 1, &l).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (BigInt::from(4), BigInt::from(4)));
        let c = pless_check(&f, GroupId::So2, 0, &l).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (BigInt::from(3), BigInt::from(3)));
        let c = pless_check(&f, GroupId::So4, 1, &l).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (BigInt::from(1260), BigInt::from(1260)));
    }

    #[test]
    fn chains_over_f3_alternate() {
        let f = field(1);
        for id in [GroupId::So2, GroupId::O2] {
            let chain = recursion_chain(&f, id, 10).unwrap();
            for (h, v) in chain.iter().enumerate() {
                assert_eq!(*v, BigInt::from(if h % 2 == 0 { 1 } else { -1 }), "{id} h={h}");
            }
        }
        let chain = recursion_chain(&f, GroupId::So4, 5).unwrap();
        assert!(chain.iter().all(|v| *v == BigInt::from(1)));
    }

    #[test]
    fn report_over_f9() {
        let f = field(2);
        let reports = verify_report(&f, 6, &WorkLimits::default()).unwrap();
        assert_eq!(reports.len(), 3);
        assert_eq!(reports[0].rows.len(), 6);
        assert_eq!(reports[2].rows.len(), 3);
        assert!(reports.iter().all(|r| r.all_match()));
        let json = serde_json::to_value(&reports[0]).unwrap();
        assert_eq!(json["code"], "so2");
        assert!(json["rows"][0]["match"].as_bool().unwrap());
    }
}
