//! Numeric complex roots of integer polynomials (Aberth-Ehrlich iteration).

use num_complex::Complex64;

use super::poly::IntPolynomial;

/// All complex roots with multiplicity, sorted by real part then imaginary part,
/// both descending. Accuracy degrades near repeated roots; callers that need
/// clean roots pass square-free input.
pub fn complex_roots(p: &IntPolynomial) -> Vec<Complex64> {
    let Some(deg) = p.degree() else { return Vec::new() };
    if deg == 0 {
        return Vec::new();
    }
    let c = p.coeffs_f64();
    let lead = c[deg];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();

    // zero roots are exact
    let zeros = p.coeffs().iter().take_while(|x| num_traits::Zero::is_zero(*x)).count();
    let reduced = &monic[zeros..];
    let n = deg - zeros;

    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n > 0 {
        roots.extend(aberth(reduced, n));
    }
    sort_roots(&mut roots);
    roots
}

pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

fn eval_with_derivative(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth(c: &[f64], n: usize) -> Vec<Complex64> {
    // Cauchy bound for the initial circle
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();

    for _ in 0..2000 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval_with_derivative(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    // Newton polish
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(c, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *r - p / dp;
            if next.is_finite() && eval_with_derivative(c, next).0.norm() <= p.norm() {
                *r = next;
            } else {
                break;
            }
        }
    }

    // conjugate-symmetric cleanup of nearly real roots
    for r in z.iter_mut() {
        if r.im.abs() < 1e-12 * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean() {
        let r = complex_roots(&IntPolynomial::from_i64(&[-1, -1, 1]));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r[0].re - phi).abs() < 1e-13 && r[0].im == 0.0);
        assert!((r[1].re - (1.0 - phi)).abs() < 1e-13);
    }

    #[test]
    fn unit_circle_and_zero_roots() {
        // t^2 (t^2 + 1)
        let r = complex_roots(&IntPolynomial::from_i64(&[0, 0, 1, 0, 1]));
        assert_eq!(r.len(), 4);
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        assert!(r.iter().any(|z| (z - Complex64::new(0.0, 1.0)).norm() < 1e-12));
        assert!(r.iter().any(|z| (z - Complex64::new(0.0, -1.0)).norm() < 1e-12));
    }

    #[test]
    fn residuals_small_for_degree_eight() {
        let p = IntPolynomial::from_i64(&[3, -1, 4, 1, -5, 9, -2, 6, 1]);
        for z in complex_roots(&p) {
            assert!(p.eval_complex(z).norm() < 1e-8 * (1.0 + z.norm()).powi(8));
        }
    }
}
