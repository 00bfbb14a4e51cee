//! Real roots of rational univariate quadratics, kept exact when they are rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Root {
    Rational(BigRational),
    /// `(p + sign·√disc) / q`, with the floating value for reporting.
    Surd { p: BigRational, disc: BigRational, q: BigRational, sign: i8, approx: f64 },
}

impl Root {
    pub fn approx(&self) -> f64 {
        match self {
            Root::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Root::Surd { approx, .. } => *approx,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Root::Rational(r) => r.to_string(),
            Root::Surd { p, disc, q, sign, .. } => {
                format!("({p} {} sqrt({disc}))/{q}", if *sign > 0 { "+" } else { "-" })
            }
        }
    }
}

pub(crate) enum QuadraticRoots {
    /// The polynomial vanishes identically.
    All,
    Roots(Vec<Root>),
}

/// Exact square root of a nonnegative rational, when it is rational.
pub(crate) fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt(r.numer())?;
    let d = int_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

fn int_sqrt(n: &BigInt) -> Option<BigInt> {
    let s = num_integer::Roots::sqrt(n);
    (&s * &s == *n).then_some(s)
}

/// Real roots of `a·λ² + b·λ + c`.
pub(crate) fn solve_quadratic(a: &BigRational, b: &BigRational, c: &BigRational) -> QuadraticRoots {
    if a.is_zero() {
        if b.is_zero() {
            return if c.is_zero() { QuadraticRoots::All } else { QuadraticRoots::Roots(vec![]) };
        }
        return QuadraticRoots::Roots(vec![Root::Rational(-c / b)]);
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    let disc = b * b - &four * a * c;
    if disc.is_negative() {
        return QuadraticRoots::Roots(vec![]);
    }
    let q = &two * a;
    if disc.is_zero() {
        return QuadraticRoots::Roots(vec![Root::Rational(-b / &q)]);
    }
    if let Some(sq) = rational_sqrt(&disc) {
        let r1 = (-b + &sq) / &q;
        let r2 = (-b - &sq) / &q;
        return QuadraticRoots::Roots(vec![Root::Rational(r1), Root::Rational(r2)]);
    }
    let (bf, df, qf) = (b.to_f64().unwrap_or(0.0), disc.to_f64().unwrap_or(0.0), q.to_f64().unwrap_or(1.0));
    let roots = [1i8, -1]
        .into_iter()
        .map(|sign| Root::Surd {
            p: -b.clone(),
            disc: disc.clone(),
            q: q.clone(),
            sign,
            approx: (-bf + sign as f64 * df.sqrt()) / qf,
        })
        .collect();
    QuadraticRoots::Roots(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_and_surd_roots() {
        match solve_quadratic(&r(1, 1), &r(0, 1), &r(-1, 4)) {
            QuadraticRoots::Roots(v) => assert_eq!(v, vec![Root::Rational(r(1, 2)), Root::Rational(r(-1, 2))]),
            QuadraticRoots::All => panic!(),
        }
        match solve_quadratic(&r(1, 1), &r(0, 1), &r(-2, 1)) {
            QuadraticRoots::Roots(v) => {
                assert_eq!(v.len(), 2);
                assert!((v[0].approx() - 2f64.sqrt()).abs() < 1e-12);
            }
            QuadraticRoots::All => panic!(),
        }
        assert!(matches!(solve_quadratic(&r(0, 1), &r(0, 1), &r(0, 1)), QuadraticRoots::All));
        assert!(matches!(solve_quadratic(&r(1, 1), &r(0, 1), &r(1, 1)), QuadraticRoots::Roots(v) if v.is_empty()));
        assert_eq!(rational_sqrt(&r(9, 4)), Some(r(3, 2)));
        assert_eq!(rational_sqrt(&r(2, 1)), None);
    }
}
