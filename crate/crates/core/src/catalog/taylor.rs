//! Bivariate Taylor polynomials truncated at total degree 3. Catalog entries
//! build their analytic jets from these instead of hand-expanding third
//! derivatives.

use std::ops::{Add, Mul, Neg, Sub};

use crate::invariants::{Jet3, V3};

/// Coefficients of `x^a y^b`, `a + b <= 3`, in the order
/// `1, x, y, x^2, xy, y^2, x^3, x^2y, xy^2, y^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct T3(pub [f64; 10]);

const EXP: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

fn slot(a: usize, b: usize) -> Option<usize> {
    EXP.iter().position(|&e| e == (a, b))
}

impl T3 {
    pub fn constant(c: f64) -> Self {
        let mut v = [0.0; 10];
        v[0] = c;
        T3(v)
    }

    /// The coordinate functions `(x, y)` expanded about `(x0, y0)`.
    pub fn vars(x0: f64, y0: f64) -> (Self, Self) {
        let mut x = Self::constant(x0);
        x.0[1] = 1.0;
        let mut y = Self::constant(y0);
        y.0[2] = 1.0;
        (x, y)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn scale(&self, s: f64) -> Self {
        T3(self.0.map(|c| c * s))
    }

    /// `g(self)` given `g` and its first three derivatives at the constant term.
    pub fn compose(&self, g: [f64; 4]) -> Self {
        let mut e = *self;
        e.0[0] = 0.0;
        let e2 = e * e;
        let e3 = e2 * e;
        Self::constant(g[0]) + e.scale(g[1]) + e2.scale(g[2] / 2.0) + e3.scale(g[3] / 6.0)
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        self.compose([1.0 / a, -1.0 / (a * a), 2.0 / a.powi(3), -6.0 / a.powi(4)])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    /// Partial derivatives `[f, fx, fy, fxx, fxy, fyy, fxxx, fxxy, fxyy, fyyy]`.
    pub fn derivatives(&self) -> [f64; 10] {
        let c = &self.0;
        [
            c[0],
            c[1],
            c[2],
            2.0 * c[3],
            c[4],
            2.0 * c[5],
            6.0 * c[6],
            2.0 * c[7],
            2.0 * c[8],
            6.0 * c[9],
        ]
    }
}

impl Add for T3 {
    type Output = T3;
    fn add(self, o: T3) -> T3 {
        let mut v = self.0;
        for (a, b) in v.iter_mut().zip(o.0) {
            *a += b;
        }
        T3(v)
    }
}

impl Sub for T3 {
    type Output = T3;
    fn sub(self, o: T3) -> T3 {
        self + (-o)
    }
}

impl Neg for T3 {
    type Output = T3;
    fn neg(self) -> T3 {
        self.scale(-1.0)
    }
}

impl Mul for T3 {
    type Output = T3;
    fn mul(self, o: T3) -> T3 {
        let mut v = [0.0; 10];
        for (p, &(a1, b1)) in EXP.iter().enumerate() {
            if self.0[p] == 0.0 {
                continue;
            }
            for (q, &(a2, b2)) in EXP.iter().enumerate() {
                if let Some(r) = slot(a1 + a2, b1 + b2) {
                    v[r] += self.0[p] * o.0[q];
                }
            }
        }
        T3(v)
    }
}

impl Add<f64> for T3 {
    type Output = T3;
    fn add(self, c: f64) -> T3 {
        self + T3::constant(c)
    }
}

impl Mul<f64> for T3 {
    type Output = T3;
    fn mul(self, c: f64) -> T3 {
        self.scale(c)
    }
}

/// Assembles a jet from three component expansions.
pub(crate) fn jet_of(comp: [T3; 3]) -> Jet3 {
    let d = comp.map(|c| c.derivatives());
    let v = |k: usize| V3::new(d[0][k], d[1][k], d[2][k]);
    Jet3 {
        f: v(0),
        fx: v(1),
        fy: v(2),
        fxx: v(3),
        fxy: v(4),
        fyy: v(5),
        fxxx: v(6),
        fxxy: v(7),
        fxyy: v(8),
        fyyy: v(9),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_reciprocal_match_hand_expansion() {
        let (x, y) = T3::vars(0.3, -0.2);
        let u = x * x + y * y + 1.0;
        let g = u.recip();
        let d = g.derivatives();
        let (x0, y0) = (0.3f64, -0.2f64);
        let u0 = 1.0 + x0 * x0 + y0 * y0;
        assert!((d[0] - 1.0 / u0).abs() < 1e-15);
        assert!((d[1] + 2.0 * x0 / (u0 * u0)).abs() < 1e-15);
        // d^2/dx dy of 1/u = 8xy/u^3
        assert!((d[4] - 8.0 * x0 * y0 / u0.powi(3)).abs() < 1e-14);
        // third x-derivative against a central difference
        let f = |x: f64| 1.0 / (1.0 + x * x + y0 * y0);
        let d3 = |h: f64| (f(x0 + 2.0 * h) - 2.0 * f(x0 + h) + 2.0 * f(x0 - h) - f(x0 - 2.0 * h)) / (2.0 * h.powi(3));
        // Richardson step removes the h^2 term
        let fd = (4.0 * d3(5e-3) - d3(1e-2)) / 3.0;
        assert!((d[6] - fd).abs() < 1e-5, "{} {fd}", d[6]);
    }

    #[test]
    fn trig_identity_holds_to_third_order() {
        let (x, y) = T3::vars(0.7, 1.1);
        let a = x * y;
        let one = a.sin() * a.sin() + a.cos() * a.cos();
        for (k, c) in one.0.iter().enumerate() {
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-14, "coefficient {k}: {c}");
        }
    }
}
