//! Carrier frequencies kept as unevaluated sums.
//!
//! At dyadic level k the data carriers look like `c_k ± b_l` with `|c_k| = 2^k`
//! and `|b_l| ≤ 2^{k/2}`. Adding those in `f64` would erase `b_l` entirely for
//! k near 100, and the product carrier `(c_k + b_l) + (-c_k + b_l)` would come
//! out as garbage. A [`Carrier`] stores the summands and cancels exact
//! negations, so linear functionals and norms stay accurate at any k.

use num_complex::Complex64;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Exact product `a*b = hi + lo`.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    (hi, lo)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Carrier {
    dim: usize,
    parts: Vec<Vec<f64>>,
}

fn is_negation(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == -*y)
}

impl Carrier {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            parts: Vec::new(),
        }
    }

    pub fn from_vec(v: Vec<f64>) -> Self {
        let dim = v.len();
        if v.iter().all(|x| *x == 0.0) {
            Self::zero(dim)
        } else {
            Self {
                dim,
                parts: vec![v],
            }
        }
    }

    pub fn from_parts(dim: usize, parts: Vec<Vec<f64>>) -> Self {
        let mut c = Self::zero(dim);
        for p in parts {
            assert_eq!(p.len(), dim, "carrier part has wrong dimension");
            c = c.add(&Self::from_vec(p));
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[Vec<f64>] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of two carriers; summands that are exact negatives cancel.
    pub fn add(&self, other: &Carrier) -> Carrier {
        assert_eq!(self.dim, other.dim, "carrier dimension mismatch");
        let mut parts = self.parts.clone();
        for p in &other.parts {
            if let Some(pos) = parts.iter().position(|q| is_negation(q, p)) {
                parts.swap_remove(pos);
            } else {
                parts.push(p.clone());
            }
        }
        parts.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Carrier {
            dim: self.dim,
            parts,
        }
    }

    pub fn neg(&self) -> Carrier {
        Carrier {
            dim: self.dim,
            parts: self
                .parts
                .iter()
                .map(|p| p.iter().map(|x| -x).collect())
                .collect(),
        }
    }

    pub fn scale_parts(&self, s: f64) -> Carrier {
        Carrier {
            dim: self.dim,
            parts: self
                .parts
                .iter()
                .map(|p| p.iter().map(|x| s * x).collect())
                .collect(),
        }
    }

    /// Rounded component values.
    pub fn value(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|d| compensated_sum(self.parts.iter().map(|p| p[d])))
            .collect()
    }

    /// `w · carrier`, accurate even when large summands cancel under `w`.
    pub fn dot(&self, w: &[f64]) -> f64 {
        compensated_sum(self.parts.iter().flat_map(|p| {
            p.iter().zip(w).flat_map(|(x, y)| {
                let (h, l) = two_prod(*x, *y);
                [h, l]
            })
        }))
    }

    pub fn norm_sq(&self) -> f64 {
        let mut terms = Vec::with_capacity(self.parts.len() * self.parts.len() * self.dim * 2);
        for p in &self.parts {
            for q in &self.parts {
                for d in 0..self.dim {
                    let (h, l) = two_prod(p[d], q[d]);
                    terms.push(h);
                    terms.push(l);
                }
            }
        }
        compensated_sum(terms).max(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Fractional offset of each component relative to the nearest integer,
    /// computed per summand so integers of size 2^60 do not swamp it.
    pub fn nearest_integer_split(&self) -> (Vec<f64>, Vec<f64>) {
        let mut ints = vec![0.0; self.dim];
        let mut fracs = vec![0.0; self.dim];
        for d in 0..self.dim {
            let mut int = 0.0f64;
            let mut frac = 0.0f64;
            for p in &self.parts {
                let r = p[d].round();
                int += r;
                frac += p[d] - r;
            }
            let r = frac.round();
            ints[d] = int + r;
            fracs[d] = frac - r;
        }
        (ints, fracs)
    }

    /// `e^{i y·carrier}` with the phase evaluated from exact products.
    pub fn cis_dot(&self, y: &[f64]) -> Complex64 {
        cis_dot_parts(&self.parts, y)
    }

    /// Same-valued check used when merging atoms.
    pub fn same_as(&self, other: &Carrier) -> bool {
        if self.parts == other.parts {
            return true;
        }
        self.value() == other.value() && self.norm_sq() == other.norm_sq()
    }
}

/// `exp(i Σ_parts y·p)`; large phases are reduced term by term.
pub fn cis_dot_parts(parts: &[Vec<f64>], y: &[f64]) -> Complex64 {
    let mut big = Complex64::new(1.0, 0.0);
    let mut small = Vec::with_capacity(parts.len() * y.len() * 2);
    for p in parts {
        for (x, yy) in p.iter().zip(y) {
            let (h, l) = two_prod(*x, *yy);
            if h.abs() < 1.0e6 {
                small.push(h);
            } else {
                let (s, c) = h.sin_cos();
                big *= Complex64::new(c, s);
            }
            small.push(l);
        }
    }
    let theta = compensated_sum(small);
    let (s, c) = theta.sin_cos();
    big * Complex64::new(c, s)
}

/// `exp(i y·v)` for a plain vector `v`, exact-product phase.
pub fn cis_dot(v: &[f64], y: &[f64]) -> Complex64 {
    cis_dot_parts(std::slice::from_ref(&v.to_vec()), y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_keeps_small_part() {
        let c = vec![2f64.powi(96); 3];
        let b = vec![3.5, 7.0, 1.25];
        let plus = Carrier::from_parts(3, vec![c.clone(), b.clone()]);
        let minus = Carrier::from_parts(3, vec![c.iter().map(|x| -x).collect(), b.clone()]);
        let sum = plus.add(&minus);
        assert_eq!(sum.value(), vec![7.0, 14.0, 2.5]);
        assert_eq!(sum.parts().len(), 2);
    }

    #[test]
    fn dot_sees_through_equal_components() {
        let c = vec![2f64.powi(80) / 3f64.sqrt(); 3];
        let b = vec![0.01, 0.02, 4.0];
        let carrier = Carrier::from_parts(3, vec![c, b]);
        let d = carrier.dot(&[1.0, -1.0, 0.0]);
        assert!((d - (-0.01)).abs() < 1e-15);
    }

    #[test]
    fn norm_of_zero_carrier() {
        assert_eq!(Carrier::zero(2).norm_sq(), 0.0);
        assert!(Carrier::from_vec(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn cis_dot_small_matches_direct() {
        let c = Carrier::from_vec(vec![1.5, -2.0]);
        let z = c.cis_dot(&[0.3, 0.7]);
        let th: f64 = 1.5 * 0.3 - 2.0 * 0.7;
        assert!((z - Complex64::new(th.cos(), th.sin())).norm() < 1e-15);
    }

    #[test]
    fn integer_split_of_huge_carrier() {
        let c = Carrier::from_parts(2, vec![vec![2f64.powi(70), 0.0], vec![0.25, 1.75]]);
        let (_, f) = c.nearest_integer_split();
        assert_eq!(f, vec![0.25, -0.25]);
    }
}
