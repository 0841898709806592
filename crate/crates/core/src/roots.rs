//! Real roots of low-degree polynomials.
//!
//! The fixed-point systems of 2-dimensional evolution operators reduce to a
//! cubic (E7 family) or a quartic (E6 family) in one variable. The cubic is
//! solved in closed form (trigonometric for three real roots, Cardano
//! otherwise); general polynomials go through companion-matrix eigenvalues.

use nalgebra::DMatrix;

/// Sign-preserving real cube root.
pub fn real_cbrt(x: f64) -> f64 {
    x.cbrt()
}

/// Real roots of `a x² + b x + c`, ascending. Degenerate leading
/// coefficients fall through to the linear case.
pub fn quadratic_real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    // Numerically stable pairing: avoid cancellation in the small root.
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Real roots of `a x³ + b x² + c x + d`, ascending, polished by Newton
/// steps on the original polynomial.
pub fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a == 0.0 {
        return quadratic_real_roots(b, c, d);
    }
    // Depress: x = t - b/(3a), t³ + p t + q = 0.
    let shift = b / (3.0 * a);
    let p = c / a - shift * shift * 3.0;
    let q = 2.0 * shift * shift * shift - shift * c / a + d / a;

    let mut roots = if p == 0.0 && q == 0.0 {
        vec![0.0]
    } else {
        let disc = -4.0 * p * p * p - 27.0 * q * q;
        if disc > 0.0 {
            // Three distinct real roots.
            let m = 2.0 * (-p / 3.0).sqrt();
            let theta = (3.0 * q / (p * m)).acos() / 3.0;
            (0..3)
                .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
                .collect()
        } else if disc == 0.0 {
            // Repeated roots.
            if p == 0.0 {
                vec![real_cbrt(-q)]
            } else {
                vec![3.0 * q / p, -3.0 * q / (2.0 * p)]
            }
        } else {
            // One real root (Cardano).
            let half_q = q / 2.0;
            let s = (half_q * half_q + p * p * p / 27.0).sqrt();
            vec![real_cbrt(-half_q + s) + real_cbrt(-half_q - s)]
        }
    };

    for t in roots.iter_mut() {
        let mut x = *t - shift;
        for _ in 0..3 {
            let f = ((a * x + b) * x + c) * x + d;
            let df = (3.0 * a * x + 2.0 * b) * x + c;
            if df != 0.0 {
                x -= f / df;
            }
        }
        *t = x;
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    dedupe_sorted(&mut roots, 1e-9);
    roots
}

/// Real roots of `Σ coeffs[i] x^i` (coeffs[n] is the leading coefficient)
/// via eigenvalues of the companion matrix, Newton-polished. Returns an
/// ascending list without multiplicities.
pub fn companion_real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().copied() == Some(0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![-c[0] / c[1]];
    }
    let lead = c[deg];
    let mut m = DMatrix::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    let eigs = m.complex_eigenvalues();
    let mut roots: Vec<f64> = eigs
        .iter()
        .filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    for x in roots.iter_mut() {
        for _ in 0..5 {
            let (f, df) = horner(&c, *x);
            if df != 0.0 {
                let step = f / df;
                if step.is_finite() {
                    *x -= step;
                }
            }
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    dedupe_sorted(&mut roots, 1e-9);
    roots
}

fn horner(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut f = 0.0;
    let mut df = 0.0;
    for &c in coeffs.iter().rev() {
        df = df * x + f;
        f = f * x + c;
    }
    (f, df)
}

fn dedupe_sorted(roots: &mut Vec<f64>, eps: f64) {
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for &r in roots.iter() {
        if out
            .last()
            .map_or(true, |&p| (r - p).abs() > eps * (1.0 + r.abs()))
        {
            out.push(r);
        }
    }
    *roots = out;
}
