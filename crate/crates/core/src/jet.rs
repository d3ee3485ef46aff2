//! First-order jets on phase space: a value together with its exact gradient
//! with respect to `(r, θ, φ, p_r, p_θ, p_φ)`.
//!
//! Every observable is written once as ordinary arithmetic on [`Jet`]s; the
//! chain rule carried by each operation produces the closed-form gradient
//! alongside the value, exact to rounding.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Number of phase-space coordinates.
pub const DIM: usize = 6;

pub type Gradient = [f64; DIM];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Gradient,
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Jet { value, grad: [0.0; DIM] }
    }

    /// The coordinate function with index `index`, evaluated at `value`.
    pub fn variable(index: usize, value: f64) -> Self {
        let mut grad = [0.0; DIM];
        grad[index] = 1.0;
        Jet { value, grad }
    }

    /// `f(self)` given `f(self.value)` and `f'(self.value)`.
    #[inline]
    pub fn chain(self, f: f64, df: f64) -> Jet {
        let mut grad = self.grad;
        for g in grad.iter_mut() {
            *g *= df;
        }
        Jet { value: f, grad }
    }

    pub fn sin(self) -> Jet {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Jet {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn sqrt(self) -> Jet {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }

    pub fn square(self) -> Jet {
        self.chain(self.value * self.value, 2.0 * self.value)
    }

    pub fn recip(self) -> Jet {
        let inv = 1.0 / self.value;
        self.chain(inv, -inv * inv)
    }

    pub fn scale(self, c: f64) -> Jet {
        self.chain(self.value * c, c)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Jet {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, rhs: Jet) -> Jet {
        self.value += rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad) {
            *a += b;
        }
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(mut self, rhs: Jet) -> Jet {
        self.value -= rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad) {
            *a -= b;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, rhs: Jet) -> Jet {
        let mut grad = [0.0; DIM];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        Jet { value: self.value * rhs.value, grad }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, rhs: Jet) -> Jet {
        let q = self.value / rhs.value;
        let mut grad = [0.0; DIM];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = (self.grad[i] - q * rhs.grad[i]) / rhs.value;
        }
        Jet { value: q, grad }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip().scale(self)
    }
}

impl std::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::constant(0.0), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Jet::variable(0, 2.0);
        let y = Jet::variable(4, 3.0);
        let f = x * y / (x + 1.0);
        // f = xy/(x+1); df/dx = y/(x+1)^2, df/dy = x/(x+1)
        assert!((f.value - 2.0).abs() < 1e-15);
        assert!((f.grad[0] - 3.0 / 9.0).abs() < 1e-15);
        assert!((f.grad[4] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn elementary_functions() {
        let x = Jet::variable(2, 0.4);
        assert!((x.sin().grad[2] - 0.4f64.cos()).abs() < 1e-15);
        assert!((x.cos().grad[2] + 0.4f64.sin()).abs() < 1e-15);
        assert!((x.sqrt().grad[2] - 0.5 / 0.4f64.sqrt()).abs() < 1e-15);
        assert!((x.square().grad[2] - 0.8).abs() < 1e-15);
        assert!(((2.0 / x).grad[2] + 2.0 / 0.16).abs() < 1e-12);
    }
}
