//! Minimal double-double arithmetic, used only to evaluate solver residuals
//! and polish roots past the f64 rounding floor. Products use `mul_add` for
//! the exact error term.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float; // float methods in no_std builds

#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd { hi: p, lo: a.mul_add(b, -p) }
    }

    pub fn add(self, other: Dd) -> Dd {
        let s = Self::two_sum(self.hi, other.hi);
        Self::quick_two_sum(s.hi, s.lo + self.lo + other.lo)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    pub fn mul(self, other: Dd) -> Dd {
        let p = Self::two_prod(self.hi, other.hi);
        Self::quick_two_sum(p.hi, p.lo + self.hi * other.lo + self.lo * other.hi)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub fn from_c64(z: Complex64) -> Self {
        DdComplex { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    pub fn zero() -> Self {
        DdComplex { re: Dd::new(0.0), im: Dd::new(0.0) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn add(self, other: Self) -> Self {
        DdComplex { re: self.re.add(other.re), im: self.im.add(other.im) }
    }

    pub fn sub(self, other: Self) -> Self {
        DdComplex { re: self.re.sub(other.re), im: self.im.sub(other.im) }
    }

    pub fn mul(self, other: Self) -> Self {
        DdComplex {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    pub fn norm(self) -> f64 {
        self.to_c64().norm()
    }
}
