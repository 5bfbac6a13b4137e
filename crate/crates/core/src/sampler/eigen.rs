//! Eigenvalues of a general complex matrix: balancing, Householder reduction
//! to upper Hessenberg form, then single-shift QR with Wilkinson shifts and
//! deflation on small subdiagonals.

use num_complex::Complex64;

const ITERATIONS_PER_EIGENVALUE: usize = 40;

struct Dense {
    n: usize,
    a: Vec<Complex64>,
}

impl Dense {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }
    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity by powers of two so row and column norms match.
fn balance(m: &mut Dense) {
    let n = m.n;
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(m.at(j, i));
                    r += l1(m.at(i, j));
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r / f) < 0.95 * s * f {
                done = false;
                for j in 0..n {
                    *m.at_mut(i, j) /= f;
                    *m.at_mut(j, i) *= f;
                }
            }
        }
    }
}

/// Unitary similarity to upper Hessenberg form.
fn hessenberg(m: &mut Dense) {
    let n = m.n;
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| m.at(i, k).norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = m.at(k + 1, k);
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = m.at(i, k);
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let scale = 2.0 / vnorm2;
        // A <- (I - scale v v*) A
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in k + 1..n {
                dot += v[i].conj() * m.at(i, j);
            }
            dot *= scale;
            for i in k + 1..n {
                *m.at_mut(i, j) -= v[i] * dot;
            }
        }
        // A <- A (I - scale v v*)
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for j in k + 1..n {
                dot += m.at(i, j) * v[j];
            }
            dot *= scale;
            for j in k + 1..n {
                *m.at_mut(i, j) -= dot * v[j].conj();
            }
        }
        for i in k + 2..n {
            *m.at_mut(i, k) = Complex64::new(0.0, 0.0);
        }
    }
}

/// Wilkinson shift: the eigenvalue of the trailing 2×2 block nearer `d`.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    // (a + d)/2 ± disc
    let e1 = d + half + disc;
    let e2 = d + half - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Eigenvalues of the row-major `dim × dim` matrix, or `None` if the QR
/// iteration exhausts its budget.
pub fn eigenvalues(dim: usize, entries: &[Complex64]) -> Option<Vec<Complex64>> {
    assert_eq!(entries.len(), dim * dim);
    if dim == 0 {
        return Some(Vec::new());
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    let mut m = Dense {
        n: dim,
        a: entries.to_vec(),
    };
    balance(&mut m);
    hessenberg(&mut m);

    let norm = m.a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    let mut hi = dim - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = ITERATIONS_PER_EIGENVALUE * dim;
    let mut cs = Vec::with_capacity(dim);

    loop {
        if hi == 0 {
            out[0] = m.at(0, 0);
            break;
        }
        // Locate the start of the unreduced block ending at `hi`.
        let mut l = hi;
        while l > 0 {
            let s = l1(m.at(l - 1, l - 1)) + l1(m.at(l, l));
            let s = if s == 0.0 { norm } else { s };
            if l1(m.at(l, l - 1)) <= f64::EPSILON * s {
                *m.at_mut(l, l - 1) = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = m.at(hi, hi);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return None;
        }
        let mu = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            let sub = m.at(hi, hi - 1).norm() + if hi >= 2 { m.at(hi - 1, hi - 2).norm() } else { 0.0 };
            m.at(hi, hi) + Complex64::new(0.75 * sub, 0.4 * sub)
        } else {
            wilkinson(m.at(hi - 1, hi - 1), m.at(hi - 1, hi), m.at(hi, hi - 1), m.at(hi, hi))
        };

        for k in l..=hi {
            *m.at_mut(k, k) -= mu;
        }
        cs.clear();
        for k in l..hi {
            let x = m.at(k, k);
            let y = m.at(k + 1, k);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (x / r, y / r)
            };
            cs.push((c, s));
            for j in k..=hi {
                let p = m.at(k, j);
                let q = m.at(k + 1, j);
                *m.at_mut(k, j) = c.conj() * p + s.conj() * q;
                *m.at_mut(k + 1, j) = -s * p + c * q;
            }
        }
        for (idx, &(c, s)) in cs.iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 1).min(hi) {
                let p = m.at(i, k);
                let q = m.at(i, k + 1);
                *m.at_mut(i, k) = p * c + q * s;
                *m.at_mut(i, k + 1) = -p * s.conj() + q * c.conj();
            }
        }
        for k in l..=hi {
            *m.at_mut(k, k) += mu;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_moduli(v: &[Complex64]) -> Vec<f64> {
        let mut m: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        m.sort_by(f64::total_cmp);
        m
    }

    #[test]
    fn diagonal_and_companion() {
        let d = eigenvalues(2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -2.0)]).unwrap();
        assert_eq!(sorted_moduli(&d), vec![1.0, 2.0]);
        let comp = eigenvalues(2, &[c(3.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let m = sorted_moduli(&comp);
        assert!((m[0] - 1.0).abs() < 1e-14 && (m[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_has_unimodular_eigenvalues() {
        // Real rotation by 0.3: eigenvalues e^{±0.3i}.
        let (s, co) = (0.3f64.sin(), 0.3f64.cos());
        let e = eigenvalues(2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]).unwrap();
        for z in e {
            assert!((z.norm() - 1.0).abs() < 1e-14);
            assert!((z.arg().abs() - 0.3).abs() < 1e-14);
        }
    }

    #[test]
    fn triangular_jordan_block() {
        // Defective matrix: single eigenvalue 2 with multiplicity 3.
        let m = [
            c(2.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(2.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(2.0, 0.0),
        ];
        for z in eigenvalues(3, &m).unwrap() {
            assert!((z - 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn cyclic_shift_matrix() {
        // The cyclic permutation matrix defeats unshifted QR; eigenvalues are
        // the 5th roots of unity.
        let n = 5;
        let mut m = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            m[i * n + (i + 1) % n] = c(1.0, 0.0);
        }
        let e = eigenvalues(n, &m).unwrap();
        for z in &e {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(5) - 1.0).norm() < 1e-11);
        }
    }
}
