//! Truncated Taylor arithmetic ("jets") for exact low-order derivatives.
//!
//! A [`Jet`] stores the normalized Taylor coefficients `f^(k)(x0) / k!` for
//! `k = 0..=ORDER`. Arithmetic propagates them exactly (up to rounding), which
//! gives derivatives of the bath form factors without finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const ORDER: usize = 4;
const LEN: usize = ORDER + 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Self { c }
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = x;
        c[1] = 1.0;
        Self { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * factorial(k)
    }

    pub fn derivatives(&self) -> [f64; LEN] {
        let mut d = [0.0; LEN];
        for (k, x) in d.iter_mut().enumerate() {
            *x = self.derivative(k);
        }
        d
    }

    pub fn scale(self, s: f64) -> Self {
        Self { c: self.c.map(|x| x * s) }
    }

    pub fn recip(self) -> Self {
        let a = &self.c;
        let mut b = [0.0; LEN];
        b[0] = 1.0 / a[0];
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s / a[0];
        }
        Self { c: b }
    }

    pub fn exp(self) -> Self {
        let a = &self.c;
        let mut e = [0.0; LEN];
        e[0] = a[0].exp();
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Self { c: e }
    }

    /// exp(x) - 1, accurate for small x.
    pub fn exp_m1(self) -> Self {
        let mut e = self.exp();
        e.c[0] = self.c[0].exp_m1();
        e
    }

    /// x^r for a positive expansion point.
    pub fn powf(self, r: f64) -> Self {
        let a = &self.c;
        debug_assert!(a[0] > 0.0, "powf jet needs a positive base");
        let mut b = [0.0; LEN];
        b[0] = a[0].powf(r);
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|j| ((r + 1.0) * j as f64 - k as f64) * a[j] * b[k - j]).sum();
            b[k] = s / (k as f64 * a[0]);
        }
        Self { c: b }
    }

    pub fn sqrt(self) -> Self {
        self.powf(0.5)
    }

    /// Evaluate the polynomial sum_k coeffs[k] x^k at this jet (Horner).
    pub fn poly(self, coeffs: &[f64]) -> Self {
        let mut acc = Jet::constant(0.0);
        for &ck in coeffs.iter().rev() {
            acc = acc * self + Jet::constant(ck);
        }
        acc
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(o.c) {
            *x += y;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.c[j] * o.c[k - j]).sum();
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.c[0] += o;
        self
    }
}
