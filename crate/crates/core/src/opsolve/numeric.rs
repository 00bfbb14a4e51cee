//! Seeded multi-start search for directions in cells the exact split left open.
//! Heuristic only: results are either re-verified exactly after rounding to small
//! rationals or reported as numeric.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CMat, CVec, Scalar};

use super::rank1::quad_value;
use super::{GroupSystem, SolverConfig};

type Forms = Vec<Vec<Vec<Complex64>>>;

fn to_c64(s: &Scalar) -> Complex64 {
    let (r, i) = s.to_f64_pair();
    Complex64::new(r, i)
}

fn objective(forms: &Forms, y: &[Complex64]) -> f64 {
    let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    if norm < 1e-300 {
        return f64::INFINITY;
    }
    let mut total = 0.0;
    for r in forms {
        let mut q = Complex64::new(0.0, 0.0);
        for (k, yk) in y.iter().enumerate() {
            for (l, yl) in y.iter().enumerate() {
                q += yk * yl.conj() * r[k][l];
            }
        }
        total += q.norm_sqr();
    }
    total / (norm * norm)
}

fn gradient(forms: &Forms, y: &[Complex64]) -> Vec<Complex64> {
    let h = 1e-7;
    let f0 = objective(forms, y);
    let mut g = vec![Complex64::new(0.0, 0.0); y.len()];
    let mut probe = y.to_vec();
    for k in 0..y.len() {
        probe[k] = y[k] + h;
        let fr = objective(forms, &probe);
        probe[k] = y[k] + Complex64::new(0.0, h);
        let fi = objective(forms, &probe);
        probe[k] = y[k];
        g[k] = Complex64::new((fr - f0) / h, (fi - f0) / h);
    }
    g
}

fn rationalize(x: f64) -> Option<BigRational> {
    for den in 1i64..=16 {
        let num = (x * den as f64).round();
        if (num / den as f64 - x).abs() < 1e-6 {
            return Some(BigRational::new((num as i64).into(), den.into()));
        }
    }
    None
}

/// Returns exact coordinates (in the support basis) for candidates that survive
/// rounding, approximate coordinates otherwise.
pub(crate) fn numeric_search(
    sys: &GroupSystem,
    cell: &CMat,
    seed: u64,
    config: &SolverConfig,
) -> Vec<Result<CVec, Vec<(f64, f64)>>> {
    let k = cell.cols();
    let restricted: Vec<CMat> = sys
        .forms
        .iter()
        .map(|d| cell.transpose().mul(d).and_then(|x| x.mul(&cell.conj())).expect("shape"))
        .collect();
    let forms: Forms =
        restricted.iter().map(|r| (0..k).map(|a| (0..k).map(|b| to_c64(r.get(a, b))).collect()).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Result<CVec, Vec<(f64, f64)>>> = Vec::new();
    for _ in 0..config.starts {
        let mut y: Vec<Complex64> =
            (0..k).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut f = objective(&forms, &y);
        let mut step = 0.5;
        for _ in 0..400 {
            if f < config.tolerance * config.tolerance {
                break;
            }
            let g = gradient(&forms, &y);
            loop {
                let cand: Vec<Complex64> = y.iter().zip(&g).map(|(a, b)| a - b * step).collect();
                let fc = objective(&forms, &cand);
                if fc < f {
                    y = cand;
                    f = fc;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
            if step < 1e-14 {
                break;
            }
            let n: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            y.iter_mut().for_each(|z| *z /= n);
        }
        if f > config.tolerance {
            continue;
        }
        // scale so the largest coordinate is 1
        let lead = *y.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("k >= 1");
        let y: Vec<Complex64> = y.iter().map(|z| z / lead).collect();
        let x_approx: Vec<Complex64> = (0..cell.rows())
            .map(|i| (0..k).map(|j| to_c64(cell.get(i, j)) * y[j]).sum())
            .collect();
        let exact = y
            .iter()
            .map(|z| Some(Scalar::new(rationalize(z.re)?, rationalize(z.im)?)))
            .collect::<Option<Vec<_>>>()
            .map(|e| CVec::new(e).expect("non-empty"))
            .filter(|yv| !yv.is_zero() && restricted.iter().all(|r| quad_value(r, yv).is_zero()));
        let item: Result<CVec, Vec<(f64, f64)>> = match exact {
            Some(yv) => Ok(cell.mul_vec(&yv).expect("shape")),
            None => Err(x_approx.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>()),
        };
        let duplicate = out.iter().any(|o| match (o, &item) {
            (Ok(a), Ok(b)) => a.is_parallel(b),
            (Err(a), Err(b)) => parallel_approx(a, b),
            _ => false,
        });
        if !duplicate {
            out.push(item);
        }
    }
    out
}

fn parallel_approx(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    let ca: Vec<Complex64> = a.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
    let cb: Vec<Complex64> = b.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
    let inner: Complex64 = ca.iter().zip(&cb).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = ca.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = cb.iter().map(|z| z.norm_sqr()).sum();
    (inner.norm_sqr() - na * nb).abs() < 1e-6 * na * nb
}
