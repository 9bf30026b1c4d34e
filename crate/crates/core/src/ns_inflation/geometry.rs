use super::params::{ConstructionParams, Mode};
use super::InflationError;

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryTable {
    pub n: usize,
    pub k: i32,
    pub c_k: Vec<f64>,
    /// The shell index set `ℕ_k`.
    pub shells: Vec<i32>,
    /// `a_l` per shell, same order as `shells`.
    pub a: Vec<Vec<f64>>,
    /// `b_l = a_l/2`.
    pub b: Vec<Vec<f64>>,
}

/// `ℕ_k`: multiples of 4 in `[k/4, k/2]`, or every integer there in oracle mode.
pub fn shell_set(k: i32, mode: Mode) -> Vec<i32> {
    let lo = (k as f64 / 4.0).ceil() as i32;
    let hi = (k as f64 / 2.0).floor() as i32;
    (lo..=hi)
        .filter(|l| mode == Mode::Oracle || l % 4 == 0)
        .collect()
}

fn unit_a(n: usize, eps: f64) -> Vec<f64> {
    if n == 2 {
        vec![eps, (1.0 - eps * eps).sqrt()]
    } else {
        let mut v = vec![eps, 2.0 * eps, (1.0 - 5.0 * eps * eps).sqrt()];
        v.resize(n, 0.0);
        v
    }
}

impl GeometryTable {
    pub fn build(params: &ConstructionParams) -> Result<Self, InflationError> {
        Self::build_snapped(params, None)
    }

    /// With `snap = Some(h)` every carrier component is rounded to `hℤ`,
    /// which the periodic oracle needs; `a_l = 2 b_l` is kept exactly.
    pub fn build_snapped(
        params: &ConstructionParams,
        snap: Option<f64>,
    ) -> Result<Self, InflationError> {
        params.validate()?;
        let n = params.n;
        let round = |x: f64| match snap {
            Some(h) => (x / h).round() * h,
            None => x,
        };
        let ck = 2f64.powi(params.k) / (n as f64).sqrt();
        let c_k: Vec<f64> = vec![round(ck); n];
        let shells = shell_set(params.k, params.mode);
        let dir = unit_a(n, params.eps);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for &l in &shells {
            let bl: Vec<f64> = dir.iter().map(|x| round(x * 2f64.powi(l - 1))).collect();
            a.push(bl.iter().map(|x| 2.0 * x).collect());
            b.push(bl);
        }
        Ok(Self {
            n,
            k: params.k,
            c_k,
            shells,
            a,
            b,
        })
    }

    pub fn a_of(&self, l: i32) -> Option<&[f64]> {
        self.shells
            .iter()
            .position(|x| *x == l)
            .map(|i| self.a[i].as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_counts() {
        assert_eq!(shell_set(32, Mode::Theorem), vec![8, 12, 16]);
        assert_eq!(shell_set(96, Mode::Theorem).len(), 7);
        assert_eq!(shell_set(6, Mode::Oracle), vec![2, 3]);
        for k in [16, 32, 48, 64, 80, 96] {
            assert_eq!(shell_set(k, Mode::Theorem).len() as i32, k / 16 + 1);
        }
    }

    #[test]
    fn lengths_are_dyadic() {
        for n in [2, 3] {
            let g = GeometryTable::build(&ConstructionParams::theorem(n, 48, 0.02, 1.0)).unwrap();
            let ck: f64 = g.c_k.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((ck / 2f64.powi(48) - 1.0).abs() < 1e-15);
            for (l, a) in g.shells.iter().zip(&g.a) {
                let r: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((r / 2f64.powi(*l) - 1.0).abs() < 1e-15);
            }
        }
    }
}
