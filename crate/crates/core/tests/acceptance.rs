//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use kmoments::charsums::{delta_count, kloosterman, kloosterman_accumulator, sk_moments, KloostermanTable};
use kmoments::codes::{weight_prefix_bruteforce, weight_prefix_dp, CodeSpec};
use kmoments::gauss::{gauss_sum_closed, gauss_sum_enumerated, GaussSumRequest};
use kmoments::moments::{pless_check, recursion_chain};
use kmoments::ogroups::{enumerate_group, histogram_closed_form, orthogonal_order, scan_so4_exhaustive};
use kmoments::{FieldContext, FieldElement, GroupId, Poly3, WorkLimits};
use num_bigint::BigInt;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn field(r: u32) -> FieldContext {
    FieldContext::with_default(r).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group_orders() -> Check {
    let l = WorkLimits::default();
    let want = [
        (1, GroupId::So2, 4u128),
        (1, GroupId::O2, 8),
        (1, GroupId::So4, 720),
        (2, GroupId::So2, 10),
        (2, GroupId::O2, 20),
    ];
    for (r, id, n) in want {
        let f = field(r);
        let got = enumerate_group(&f, id, &l).map_err(|e| e.to_string())?.elements.len() as u128;
        ensure(got == n && id.order(f.q()) == n, || format!("|{id}| over GF({}) = {got}, want {n}", f.q()))?;
    }
    let f = field(1);
    let t = Instant::now();
    let scan = scan_so4_exhaustive(&f, &l).map_err(|e| e.to_string())?;
    let took = t.elapsed();
    ensure(scan.orthogonal == orthogonal_order(2, 3), || format!("full scan found {} isometries", scan.orthogonal))?;
    ensure(scan.histogram.total() == 720, || format!("full scan found {} with det 1", scan.histogram.total()))?;
    let closed = histogram_closed_form(&f, GroupId::So4).map_err(|e| e.to_string())?;
    ensure(scan.histogram == closed, || format!("full scan histogram {:?}", scan.histogram.counts))?;
    ensure(scan.scanned == 3u128.pow(16), || format!("full scan covered {} matrices", scan.scanned))?;
    ensure(took < Duration::from_secs(300), || format!("full scan took {took:?}"))?;
    Ok(format!("4, 8, 720, 10, 20; 3^16 scan finds 1440 isometries, 720 with det 1, in {:.1}s", took.as_secs_f64()))
}

fn histograms() -> Check {
    let l = WorkLimits::default();
    for r in 1..=4 {
        let f = field(r);
        for id in [GroupId::So2, GroupId::O2] {
            let e = enumerate_group(&f, id, &l).map_err(|e| e.to_string())?;
            let c = histogram_closed_form(&f, id).map_err(|e| e.to_string())?;
            ensure(e.histogram == c, || format!("{id} r={r}: enumerated != closed form"))?;
        }
    }
    let f = field(1);
    let e = enumerate_group(&f, GroupId::So4, &l).map_err(|e| e.to_string())?;
    let c = histogram_closed_form(&f, GroupId::So4).map_err(|e| e.to_string())?;
    ensure(e.histogram == c && c.counts == [90, 315, 315], || format!("so4 q=3: {:?} vs {:?}", e.histogram.counts, c.counts))?;
    Ok("so2/o2 for r=1..4, so4 at q=3 {0:90, 1:315, 2:315}".into())
}

fn gauss_identities() -> Check {
    let l = WorkLimits::default();
    let mut count = 0;
    for r in 1..=4 {
        let f = field(r);
        for id in [GroupId::So2, GroupId::O2] {
            for a in f.nonzero() {
                let closed = gauss_sum_closed(&f, &GaussSumRequest::for_group(id, a)).map_err(|e| e.to_string())?;
                let en = gauss_sum_enumerated(&f, id, a, &l).map_err(|e| e.to_string())?;
                ensure(closed == en, || format!("{id} r={r} a={a}: {closed} vs {en}"))?;
                count += 1;
            }
        }
    }
    let f = field(1);
    for a in f.nonzero() {
        let closed = gauss_sum_closed(&f, &GaussSumRequest::for_group(GroupId::So4, a)).map_err(|e| e.to_string())?;
        let en = gauss_sum_enumerated(&f, GroupId::So4, a, &l).map_err(|e| e.to_string())?;
        ensure(closed == en, || format!("so4 a={a}: {closed} vs {en}"))?;
        ensure(a != FieldElement::ONE || closed == BigInt::from(-225), || format!("so4 a=1 gives {closed}"))?;
        count += 1;
    }
    Ok(format!("{count} sums agree, so4 at a=1 is -225"))
}

fn recursions() -> Check {
    let t = Instant::now();
    for r in 1..=3 {
        let f = field(r);
        let direct = sk_moments(&f, 10, &WorkLimits::default()).map_err(|e| e.to_string())?;
        for id in [GroupId::So2, GroupId::O2] {
            let chain = recursion_chain(&f, id, 10).map_err(|e| e.to_string())?;
            ensure(chain == direct, || format!("{id} r={r}: {chain:?} vs {direct:?}"))?;
        }
        let chain = recursion_chain(&f, GroupId::So4, 5).map_err(|e| e.to_string())?;
        for h in 1..=5usize {
            ensure(chain[h] == direct[2 * h], || format!("so4 r={r} h={h}: {} vs {}", chain[h], direct[2 * h]))?;
        }
        if r == 1 {
            for (h, v) in direct.iter().enumerate() {
                let want = BigInt::from(if h % 2 == 0 { 1 } else { -1 });
                ensure(*v == want, || format!("SK^{h} over F_3 is {v}"))?;
            }
        }
    }
    let took = t.elapsed();
    ensure(took < Duration::from_secs(120), || format!("took {took:?}"))?;
    Ok(format!("r=1..3, h<=10 and SK^2h for h<=5, in {:.2}s", took.as_secs_f64()))
}

fn pless() -> Check {
    let l = WorkLimits::default();
    let mut cases = vec![];
    for id in GroupId::ALL {
        cases.push((1, id));
    }
    cases.push((2, GroupId::So2));
    cases.push((2, GroupId::O2));
    for (r, id) in cases {
        let f = field(r);
        for h in 0..=6 {
            let c = pless_check(&f, id, h, &l).map_err(|e| e.to_string())?;
            ensure(c.holds, || format!("{id} q={} h={h}: {} vs {}", f.q(), c.lhs, c.rhs))?;
        }
    }
    Ok("h=0..6 on all codes at q=3 and so2/o2 at q=9".into())
}

fn dp_oracle() -> Check {
    let l = WorkLimits::default();
    for (r, id, jm) in [(1, GroupId::So2, 4), (1, GroupId::O2, 8), (2, GroupId::So2, 10), (1, GroupId::So4, 2)] {
        let f = field(r);
        let code = CodeSpec::new(&f, id, &l).map_err(|e| e.to_string())?;
        let dp = weight_prefix_dp(&f, &histogram_closed_form(&f, id).map_err(|e| e.to_string())?, jm);
        let bf = weight_prefix_bruteforce(&code, jm, &l).map_err(|e| e.to_string())?;
        ensure(dp == bf, || format!("{id} q={}: dp {:?} vs scan {:?}", f.q(), dp.counts, bf.counts))?;
        if id == GroupId::So4 {
            ensure(dp.counts[1] == 180u32.into(), || format!("C_1 of so4 is {}", dp.counts[1]))?;
        }
    }
    Ok("so2 q=3, o2 q=3, so2 q=9 in full; so4 q=3 to j=2 with C_1 = 180".into())
}

fn character_sums() -> Check {
    for r in 1..=5 {
        let f = field(r);
        let q = f.q() as i64;
        for a in f.nonzero() {
            let acc = kloosterman_accumulator(&f, a).map_err(|e| e.to_string())?;
            ensure(acc.n[1] == acc.n[2], || format!("K({a}) over GF({q}) is not real: {:?}", acc.n))?;
            let k = acc.n[0] as i64 - acc.n[1] as i64;
            ensure(k * k <= 4 * q, || format!("K({a}) = {k} over GF({q}) breaks the Weil bound"))?;
        }
    }
    for r in 1..=3 {
        let f = field(r);
        let table = KloostermanTable::compute(&f, &WorkLimits::default()).map_err(|e| e.to_string())?;
        let d1 = delta_count(&f, 1).map_err(|e| e.to_string())?;
        // sum_beta delta(1,q;beta) lambda(a beta) = K(a^2)
        for a in f.nonzero() {
            let mut b = [0i128; 3];
            for beta in f.elements() {
                b[f.trace(f.mul(a, beta)) as usize] += d1.get(beta) as i128;
            }
            let k = kloosterman(&f, f.mul(a, a)).map_err(|e| e.to_string())? as i128;
            ensure(b[1] == b[2] && b[0] - b[1] == k, || format!("r={r} a={a}: {b:?} vs K = {k}"))?;
        }
        // sum_a lambda(-a beta) K(a^2)^m = q delta(m,q;beta) - (q-1)^m
        let q = BigInt::from(f.q());
        for m in 0..=4u32 {
            let dm = delta_count(&f, m).map_err(|e| e.to_string())?;
            for beta in f.elements() {
                let mut b = [BigInt::from(0), BigInt::from(0), BigInt::from(0)];
                for a in f.nonzero() {
                    let k = BigInt::from(table.get(f.mul(a, a)).map_err(|e| e.to_string())?);
                    b[f.trace(f.neg(f.mul(a, beta))) as usize] += k.pow(m);
                }
                let rhs = &q * BigInt::from(dm.get(beta)) - (&q - 1u32).pow(m);
                ensure(b[1] == b[2] && &b[0] - &b[1] == rhs, || format!("r={r} m={m} beta={beta}"))?;
            }
        }
    }
    Ok("Weil and realness for r<=5, delta transforms for r<=3".into())
}

fn modulus_independence() -> Check {
    let l = WorkLimits::default();
    let base = sk_moments(&field(2), 6, &l).map_err(|e| e.to_string())?;
    let mut seen = vec![field(2).modulus().to_string()];
    for m in ["x^2+1", "x^2+x+2"] {
        let f = FieldContext::new(2, Some(m.parse::<Poly3>().map_err(|e| e.to_string())?)).map_err(|e| e.to_string())?;
        let other = sk_moments(&f, 6, &l).map_err(|e| e.to_string())?;
        ensure(other == base, || format!("{m}: {other:?} vs {base:?}"))?;
        seen.push(f.modulus().to_string());
    }
    Ok(format!("SK^0..SK^6 equal under {}", seen.join(", ")))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("group orders", group_orders),
        ("trace histograms", histograms),
        ("Gauss sums", gauss_identities),
        ("moment recursions", recursions),
        ("Pless identity", pless),
        ("weight prefix oracle", dp_oracle),
        ("character sums", character_sums),
        ("modulus independence", modulus_independence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
