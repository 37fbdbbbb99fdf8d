//! Exact arithmetic in the cyclotomic integers `Z[ζ_N] = Z[x]/Φ_N(x)`.
//!
//! Every `2cos(π/m)` with `2m | N` lives here as `ζ^{N/2m} + ζ^{-N/2m}`.
//! Elements are reduced modulo the (monic) cyclotomic polynomial, so two
//! elements are equal exactly when their coefficient vectors are. Overflow is
//! reported as `None` rather than wrapping.

use std::sync::Arc;

#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicRing {
    order: usize,
    // Φ_N, lowest degree first, monic.
    modulus: Vec<i128>,
}

/// Coefficients of a reduced element, lowest degree first, length `φ(N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement(pub Vec<i128>);

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = *den.last().unwrap();
    let mut q = vec![0i128; num.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd] / lead;
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

fn cyclotomic_polynomial(n: usize) -> Vec<i128> {
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut p = vec![0i128; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            p = poly_div_exact(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

impl CyclotomicRing {
    pub fn new(order: usize) -> Arc<Self> {
        assert!(order >= 1);
        Arc::new(Self { order, modulus: cyclotomic_polynomial(order) })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn zero(&self) -> RingElement {
        RingElement(vec![0; self.degree()])
    }

    pub fn from_int(&self, k: i128) -> RingElement {
        let mut v = vec![0; self.degree()];
        v[0] = k;
        RingElement(v)
    }

    /// Reduces an arbitrary coefficient vector modulo `Φ_N`.
    fn reduce(&self, mut coeffs: Vec<i128>) -> Option<RingElement> {
        let d = self.degree();
        for i in (d..coeffs.len()).rev() {
            let c = coeffs[i];
            if c == 0 {
                continue;
            }
            for (j, &m) in self.modulus.iter().enumerate() {
                let t = c.checked_mul(m)?;
                coeffs[i - d + j] = coeffs[i - d + j].checked_sub(t)?;
            }
        }
        coeffs.resize(d, 0);
        Some(RingElement(coeffs))
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(&self, k: i64) -> RingElement {
        let n = self.order as i64;
        let e = k.rem_euclid(n) as usize;
        let mut v = vec![0i128; e.max(self.degree()) + 1];
        v[e] = 1;
        self.reduce(v).expect("monomial reduction does not overflow")
    }

    /// `2cos(π/m) = ζ^{N/2m} + ζ^{-N/2m}`; requires `2m | N`.
    pub fn two_cos_pi_over(&self, m: u32) -> RingElement {
        let m = m as usize;
        assert!(self.order % (2 * m) == 0, "2m must divide the ring order");
        let k = (self.order / (2 * m)) as i64;
        self.add(&self.zeta_pow(k), &self.zeta_pow(-k)).unwrap()
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> Option<RingElement> {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.checked_add(*y))
            .collect::<Option<Vec<_>>>()
            .map(RingElement)
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> Option<RingElement> {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.checked_sub(*y))
            .collect::<Option<Vec<_>>>()
            .map(RingElement)
    }

    pub fn scale(&self, a: &RingElement, k: i128) -> Option<RingElement> {
        a.0.iter().map(|x| x.checked_mul(k)).collect::<Option<Vec<_>>>().map(RingElement)
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Option<RingElement> {
        if a.is_zero() || b.is_zero() {
            return Some(self.zero());
        }
        let d = self.degree();
        let mut prod = vec![0i128; 2 * d];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                prod[i + j] = prod[i + j].checked_add(x.checked_mul(y)?)?;
            }
        }
        self.reduce(prod)
    }

    /// Numerical value via `ζ = e^{2πi/N}` (real part), for display only.
    pub fn approx(&self, a: &RingElement) -> f64 {
        let n = self.order as f64;
        a.0.iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * (2.0 * std::f64::consts::PI * k as f64 / n).cos())
            .sum()
    }
}

impl RingElement {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// True when every coefficient is divisible by `k`.
    pub fn divisible_by(&self, k: i128) -> bool {
        self.0.iter().all(|&c| c % k == 0)
    }

    pub fn div_exact(&self, k: i128) -> RingElement {
        RingElement(self.0.iter().map(|&c| c / k).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(120).len() - 1, 32);
    }

    #[test]
    fn two_cos_values() {
        let r = CyclotomicRing::new(120);
        // 2cos(π/3) = 1
        assert_eq!(r.two_cos_pi_over(3), r.from_int(1));
        // (2cos(π/4))² = 2
        let c4 = r.two_cos_pi_over(4);
        assert_eq!(r.mul(&c4, &c4).unwrap(), r.from_int(2));
        // φ = 2cos(π/5) satisfies φ² = φ + 1
        let c5 = r.two_cos_pi_over(5);
        assert_eq!(r.mul(&c5, &c5).unwrap(), r.add(&c5, &r.from_int(1)).unwrap());
        assert!((r.approx(&c5) - 1.618_033_988_75).abs() < 1e-9);
        // 2cos(π/2) = 0 and 2cos(π/6)² = 3
        assert!(r.two_cos_pi_over(2).is_zero());
        let c6 = r.two_cos_pi_over(6);
        assert_eq!(r.mul(&c6, &c6).unwrap(), r.from_int(3));
    }

    #[test]
    fn overflow_is_reported() {
        let r = CyclotomicRing::new(6);
        let big = r.from_int(i128::MAX / 2);
        assert!(r.mul(&big, &big).is_none());
    }
}
