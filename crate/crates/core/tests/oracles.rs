//! Brute-force oracles for the character-sum and Gauss-sum closed forms.

use kmoments::charsums::{delta_count, kloosterman, KloostermanTable};
use kmoments::gauss::{
    b_r_closed, gauss_sum_closed, gauss_sum_enumerated, kloosterman_gl, kloosterman_gl_enumerated, GaussSumRequest,
    Variant,
};
use kmoments::ogroups::{delta_one, enumerate_group, histogram_closed_form};
use kmoments::{FieldContext, FieldElement, GroupId, WorkLimits};
use num_bigint::BigInt;

fn field(r: u32) -> FieldContext {
    FieldContext::with_default(r).unwrap()
}

/// `sum c_i omega^t_i`, which must be rational; returns it as an integer.
fn real_part(buckets: [BigInt; 3]) -> BigInt {
    let [c0, c1, c2] = buckets;
    assert_eq!(c1, c2, "character sum is not real");
    c0 - c1
}

/// `sum_x w(x) lambda(scale * x)` over `(x, w)` pairs.
fn char_sum<I: IntoIterator<Item = (FieldElement, BigInt)>>(ctx: &FieldContext, scale: FieldElement, terms: I) -> BigInt {
    let mut b = [BigInt::from(0), BigInt::from(0), BigInt::from(0)];
    for (x, w) in terms {
        b[ctx.trace(ctx.mul(scale, x)) as usize] += w;
    }
    real_part(b)
}

/// `sum_B sum_h lambda(a Tr(delta_eps h^t B h))` with `B` running over the
/// nonsingular symmetric r x r matrices and `h` over r x 2 matrices.
fn b_r_bruteforce(ctx: &FieldContext, r: usize, a: FieldElement) -> BigInt {
    let q = ctx.q() as usize;
    let minus_eps = ctx.neg(ctx.epsilon());
    let sym_cells = r * (r + 1) / 2;
    let mut total = [BigInt::from(0), BigInt::from(0), BigInt::from(0)];
    for bi in 0..q.pow(sym_cells as u32) {
        let mut b = vec![FieldElement::ZERO; r * r];
        let mut k = bi;
        for i in 0..r {
            for j in i..r {
                let v = FieldElement((k % q) as u32);
                k /= q;
                b[i * r + j] = v;
                b[j * r + i] = v;
            }
        }
        if det(ctx, &b, r).is_zero() {
            continue;
        }
        for hi in 0..q.pow(2 * r as u32) {
            let mut h = vec![FieldElement::ZERO; r * 2];
            let mut k = hi;
            for cell in h.iter_mut() {
                *cell = FieldElement((k % q) as u32);
                k /= q;
            }
            // Tr(delta_eps M) = M_00 - eps M_11 where M = h^t B h
            let mut m00 = FieldElement::ZERO;
            let mut m11 = FieldElement::ZERO;
            for i in 0..r {
                for j in 0..r {
                    let bij = b[i * r + j];
                    m00 = ctx.add(m00, ctx.mul(ctx.mul(h[i * 2], bij), h[j * 2]));
                    m11 = ctx.add(m11, ctx.mul(ctx.mul(h[i * 2 + 1], bij), h[j * 2 + 1]));
                }
            }
            let tr = ctx.add(m00, ctx.mul(minus_eps, m11));
            total[ctx.trace(ctx.mul(a, tr)) as usize] += 1;
        }
    }
    real_part(total)
}

/// Cofactor expansion, fine for r <= 2.
fn det(ctx: &FieldContext, m: &[FieldElement], r: usize) -> FieldElement {
    match r {
        0 => FieldElement::ONE,
        1 => m[0],
        2 => ctx.sub(ctx.mul(m[0], m[3]), ctx.mul(m[1], m[2])),
        _ => unreachable!(),
    }
}

#[test]
fn b_r_closed_form_matches_double_sum() {
    for r in 1..=2 {
        let f = field(1);
        for a in f.nonzero() {
            assert_eq!(b_r_bruteforce(&f, r, a), b_r_closed(r as u32, 3), "r={r} a={a}");
        }
    }
    assert_eq!(b_r_closed(1, 3), BigInt::from(-6));
    assert_eq!(b_r_closed(2, 3), BigInt::from(162));
}

#[test]
fn b_r_closed_form_over_f9() {
    let f = field(2);
    for a in [FieldElement(1), FieldElement(5)] {
        assert_eq!(b_r_bruteforce(&f, 1, a), b_r_closed(1, 9), "a={a}");
    }
    assert_eq!(b_r_bruteforce(&f, 2, FieldElement(1)), b_r_closed(2, 9));
}

#[test]
fn gl_recursion_matches_listing() {
    let l = WorkLimits::default();
    for r in 1..=2 {
        let f = field(r);
        for a in f.nonzero() {
            assert_eq!(
                kloosterman_gl(&f, 1, a).unwrap(),
                BigInt::from(kloosterman(&f, a).unwrap())
            );
            assert_eq!(
                kloosterman_gl(&f, 2, a).unwrap(),
                kloosterman_gl_enumerated(&f, 2, a, &l).unwrap(),
                "q={} a={a}",
                f.q()
            );
        }
    }
    assert_eq!(kloosterman_gl(&field(1), 2, FieldElement::ONE).unwrap(), BigInt::from(21));
}

#[test]
fn delta_one_transform_is_kloosterman() {
    for r in 1..=4 {
        let f = field(r);
        let d1 = delta_count(&f, 1).unwrap();
        for a in f.nonzero() {
            let lhs = char_sum(&f, a, f.elements().map(|b| (b, BigInt::from(d1.get(b)))));
            let k = kloosterman(&f, f.mul(a, a)).unwrap();
            assert_eq!(lhs, BigInt::from(k), "r={r} a={a}");
        }
    }
}

#[test]
fn kloosterman_power_transform() {
    for r in 1..=3 {
        let f = field(r);
        let table = KloostermanTable::compute(&f, &WorkLimits::default()).unwrap();
        let q = BigInt::from(f.q());
        for m in 0..=4u32 {
            let delta = delta_count(&f, m).unwrap();
            for beta in f.elements() {
                let scale = f.neg(beta);
                let lhs = char_sum(
                    &f,
                    scale,
                    f.nonzero().map(|a| (a, BigInt::from(table.get(f.mul(a, a)).unwrap()).pow(m))),
                );
                let rhs = &q * BigInt::from(delta.get(beta)) - (&q - 1u32).pow(m);
                assert_eq!(lhs, rhs, "r={r} m={m} beta={beta}");
            }
        }
    }
}

#[test]
fn coset_sum_is_q_plus_one() {
    for r in 1..=4 {
        let f = field(r);
        let d1 = delta_one(&f);
        let elems = enumerate_group(&f, GroupId::So2, &WorkLimits::default()).unwrap().elements;
        for a in f.nonzero() {
            let s = char_sum(&f, a, elems.iter().map(|w| (d1.mul(&f, w).trace(&f), BigInt::from(1))));
            assert_eq!(s, BigInt::from(f.q() + 1));
        }
    }
}

#[test]
fn group_gauss_sums_by_enumeration() {
    let l = WorkLimits::default();
    for r in 1..=4 {
        let f = field(r);
        for (id, v) in [(GroupId::So2, Variant::So), (GroupId::O2, Variant::O)] {
            for a in f.nonzero() {
                let closed = gauss_sum_closed(&f, &GaussSumRequest { n: 1, variant: v, a }).unwrap();
                assert_eq!(closed, gauss_sum_enumerated(&f, id, a, &l).unwrap(), "{id} r={r} a={a}");
            }
        }
    }
    let f = field(1);
    for a in f.nonzero() {
        let closed = gauss_sum_closed(&f, &GaussSumRequest { n: 2, variant: Variant::So, a }).unwrap();
        assert_eq!(closed, BigInt::from(-225));
        assert_eq!(closed, gauss_sum_enumerated(&f, GroupId::So4, a, &l).unwrap());
    }
}

#[test]
fn histograms_by_enumeration() {
    let l = WorkLimits::default();
    for r in 1..=4 {
        let f = field(r);
        for id in [GroupId::So2, GroupId::O2] {
            let e = enumerate_group(&f, id, &l).unwrap();
            assert_eq!(e.elements.len() as u128, id.order(f.q()));
            assert_eq!(e.histogram, histogram_closed_form(&f, id).unwrap(), "{id} r={r}");
        }
    }
}
