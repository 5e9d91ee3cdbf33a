use degjc_core::specialfn::laguerre;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `L_N(x) = Σ_k C(N,k) (−x)^k / k!` in exact arithmetic.
fn laguerre_exact(n: u32, x: &BigRational) -> BigRational {
    let mut sum = BigRational::zero();
    let mut binom = BigInt::one();
    let mut fact = BigInt::one();
    let mut power = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigInt::from(n - k + 1) / BigInt::from(k);
            fact *= BigInt::from(k);
            power *= -x.clone();
        }
        sum += BigRational::from_integer(binom.clone()) * &power
            / BigRational::from_integer(fact.clone());
    }
    sum
}

fn rel_err(n: u32, x: BigRational) -> f64 {
    let exact = laguerre_exact(n, &x);
    let approx = laguerre(n, x.to_f64().unwrap()).unwrap();
    let diff = (BigRational::from_float(approx).unwrap() - &exact).abs();
    if exact.is_zero() {
        return diff.to_f64().unwrap();
    }
    (diff / exact.abs()).to_f64().unwrap()
}

#[test]
fn recurrence_matches_exact_rationals_on_integer_grid() {
    let mut worst = (0.0, 0, 0);
    for n in 0..=50 {
        for x in 0..=100 {
            let e = rel_err(n, BigRational::from_integer(BigInt::from(x)));
            if e > worst.0 {
                worst = (e, n, x);
            }
        }
    }
    assert!(
        worst.0 <= 1e-10,
        "worst relative error {:e} at N={}, x={}",
        worst.0,
        worst.1,
        worst.2
    );
}

#[test]
fn recurrence_matches_exact_rationals_on_fine_grid() {
    // 50 points on [0, 49/4] for N ≤ 20.
    for n in 0..=20 {
        for i in 0..50 {
            let x = BigRational::new(BigInt::from(i), BigInt::from(4));
            let e = rel_err(n, x);
            assert!(e <= 1e-10, "N={n}, x={i}/4: {e:e}");
        }
    }
}
