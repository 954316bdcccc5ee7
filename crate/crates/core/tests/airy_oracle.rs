//! Arbitrary-precision Airy oracle: Maclaurin series in 80-digit fixed point,
//! with Ai(0) and Ai'(0) derived from Γ(1/3) through the AGM identity
//! Γ(1/3) = 2^{7/9} 3^{−1/12} π^{2/3} / AGM(2, √(2+√3))^{1/3}.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use resolab::specfun::{airy_eval, AI0, AIP0, BI0, BIP0};

const DIGITS: u32 = 80;

fn scale() -> BigInt {
    BigInt::from(10).pow(DIGITS)
}

fn fx(n: i64) -> BigInt {
    BigInt::from(n) * scale()
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    a * b / scale()
}

fn div(a: &BigInt, b: &BigInt) -> BigInt {
    a * scale() / b
}

fn sqrt(a: &BigInt) -> BigInt {
    (a * scale()).sqrt()
}

fn cbrt(a: &BigInt) -> BigInt {
    (a * scale() * scale()).cbrt()
}

fn to_f64(a: &BigInt) -> f64 {
    // keep 30 digits, enough for a correctly rounded double
    let shift = BigInt::from(10).pow(DIGITS - 30);
    (a / shift).to_f64().unwrap() / 1e30
}

fn atan_inv(n: i64) -> BigInt {
    // atan(1/n) = Σ (−1)^k / ((2k+1) n^{2k+1})
    let mut power = scale() / n;
    let n2 = BigInt::from(n * n);
    let mut sum = BigInt::zero();
    let mut k = 0i64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

fn pi() -> BigInt {
    atan_inv(5) * 16 - atan_inv(239) * 4
}

fn agm(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.clone(), b.clone());
    for _ in 0..200 {
        if (&a - &b).abs() <= BigInt::one() {
            break;
        }
        let next = (&a + &b) / 2;
        b = sqrt(&(&a * &b / scale()));
        a = next;
    }
    a
}

/// (Ai(0), −Ai'(0)) in fixed point.
fn origin_constants() -> (BigInt, BigInt) {
    let p = pi();
    let s3 = sqrt(&fx(3));
    let m = agm(&fx(2), &sqrt(&(fx(2) + &s3)));
    let two_79 = cbrt(&cbrt(&fx(128)));
    let three_112 = sqrt(&sqrt(&cbrt(&fx(3))));
    let pi_23 = cbrt(&mul(&p, &p));
    let gamma13 = div(&div(&mul(&two_79, &pi_23), &three_112), &cbrt(&m));
    let c3_13 = cbrt(&fx(3));
    let c3_23 = mul(&c3_13, &c3_13);
    // Ai(0) = √3 Γ(1/3) / (2π 3^{2/3}),  −Ai'(0) = 1 / (3^{1/3} Γ(1/3))
    let c1 = div(&mul(&s3, &gamma13), &(mul(&p, &c3_23) * 2));
    let c2 = div(&scale(), &mul(&c3_13, &gamma13));
    (c1, c2)
}

struct Oracle {
    ai: f64,
    aip: f64,
    bi: f64,
    bip: f64,
}

/// Series at `x = num / den`.
fn series(num: i64, den: i64, c: &(BigInt, BigInt)) -> Oracle {
    let x3n = BigInt::from(num).pow(3);
    let x3d = BigInt::from(den).pow(3);
    let x = BigInt::from(num) * scale() / den;
    // f = Σ a_k x^{3k}, g = Σ b_k x^{3k+1}; fk, gk hold the full terms
    let mut fk = scale();
    let mut gk = x.clone();
    let (mut f, mut fp, mut g, mut gp) = (BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero());
    let mut k = 0i64;
    loop {
        f += &fk;
        g += &gk;
        // f' = Σ 3k a_k x^{3k−1}, g' = Σ (3k+1) b_k x^{3k}
        if k > 0 {
            fp += div(&(&fk * (3 * k)), &x);
        }
        if x.is_zero() {
            if k == 0 {
                gp += scale();
            }
        } else {
            gp += div(&(&gk * (3 * k + 1)), &x);
        }
        fk = &fk * &x3n / (&x3d * ((3 * k + 2) * (3 * k + 3)));
        gk = &gk * &x3n / (&x3d * ((3 * k + 3) * (3 * k + 4)));
        k += 1;
        if fk.is_zero() && gk.is_zero() {
            break;
        }
    }
    let (c1, c2) = c;
    let s3 = sqrt(&fx(3));
    let ai = mul(c1, &f) - mul(c2, &g);
    let aip = mul(c1, &fp) - mul(c2, &gp);
    let bi = mul(&s3, &(mul(c1, &f) + mul(c2, &g)));
    let bip = mul(&s3, &(mul(c1, &fp) + mul(c2, &gp)));
    Oracle {
        ai: to_f64(&ai),
        aip: to_f64(&aip),
        bi: to_f64(&bi),
        bip: to_f64(&bip),
    }
}

fn close(got: f64, want: f64) -> bool {
    if want.abs() < 1e-2 {
        (got - want).abs() < 1e-14
    } else {
        ((got - want) / want).abs() < 1e-12
    }
}

#[test]
fn origin_constants_match_literature_digits() {
    let (c1, c2) = origin_constants();
    // leading 40 digits of Ai(0) and −Ai'(0)
    let ai0: BigInt = "3550280538878172392600631860041831763979".parse().unwrap();
    let aip0: BigInt = "2588194037928067984051835601892039634790".parse().unwrap();
    let shift = BigInt::from(10).pow(DIGITS - 40);
    assert!((&c1 / &shift - ai0).abs() <= BigInt::one());
    assert!((&c2 / &shift - aip0).abs() <= BigInt::one());
}

#[test]
fn library_origin_values() {
    let c = origin_constants();
    let o = series(0, 1, &c);
    let v = airy_eval(0.0).unwrap();
    for (got, want) in [(v.ai, o.ai), (v.aip, o.aip), (v.bi, o.bi), (v.bip, o.bip)] {
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }
    for (constant, want) in [(AI0, o.ai), (AIP0, o.aip), (BI0, o.bi), (BIP0, o.bip)] {
        assert!((constant - want).abs() <= f64::EPSILON * want.abs(), "{constant} vs {want}");
    }
}

#[test]
fn library_matches_series_on_grid() {
    let c = origin_constants();
    // x in tenths
    for n in [-80, -73, -55, -42, -30, -17, -10, -3, 1, 5, 10, 25, 33, 40] {
        let x = n as f64 / 10.0;
        let o = series(n, 10, &c);
        let v = airy_eval(x).unwrap();
        assert!(close(v.ai, o.ai), "Ai({x}): {} vs {}", v.ai, o.ai);
        assert!(close(v.aip, o.aip), "Ai'({x}): {} vs {}", v.aip, o.aip);
        assert!(close(v.bi, o.bi), "Bi({x}): {} vs {}", v.bi, o.bi);
        assert!(close(v.bip, o.bip), "Bi'({x}): {} vs {}", v.bip, o.bip);
    }
}
