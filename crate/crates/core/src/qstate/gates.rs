use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A 2x2 or 4x4 complex matrix stored row-major.
///
/// Two-qubit matrices act on the local index `2 * b(first) + b(second)`,
/// i.e. `kron(A_first, B_second)` ordering. Controlled gates use the first
/// wire as control.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: [C64; 16],
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

impl GateMatrix {
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if !(dim == 2 || dim == 4) || entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "gate needs dim 2 or 4 with dim^2 entries, got dim {dim} and {} entries",
                entries.len()
            )));
        }
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, entries[r * dim + c]);
            }
        }
        Ok(m)
    }

    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: [ZERO; 16],
        }
    }

    fn new2(a: C64, b: C64, c: C64, d: C64) -> Self {
        let mut m = Self::zeros(2);
        m.entries[0] = a;
        m.entries[1] = b;
        m.entries[4] = c;
        m.entries[5] = d;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row stride is always 4 so kernels can index without branching.
    pub(crate) fn entries(&self) -> &[C64; 16] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * 4 + col]
    }

    fn set(&mut self, row: usize, col: usize, v: C64) {
        self.entries[row * 4 + col] = v;
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(k, k, ONE);
        }
        m
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &GateMatrix) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape("cannot compose gates of different dimension".into()));
        }
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let v = (0..self.dim).map(|k| self.get(r, k) * other.get(k, c)).sum();
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.set(r, c, self.get(c, r).conj());
            }
        }
        m
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let Ok(p) = self.adjoint().compose(self) else {
            return false;
        };
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| {
                let expect = if r == c { ONE } else { ZERO };
                (p.get(r, c) - expect).norm() <= tol
            })
        })
    }

    pub fn x() -> Self {
        Self::new2(ZERO, ONE, ONE, ZERO)
    }

    pub fn h() -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new2(s, s, s, -s)
    }

    pub fn sdg() -> Self {
        Self::new2(ONE, ZERO, ZERO, -I)
    }

    /// Square root of X.
    pub fn sx() -> Self {
        let a = C64::new(0.5, 0.5);
        let b = C64::new(0.5, -0.5);
        Self::new2(a, b, b, a)
    }

    /// Principal square root of the Hadamard: `P+ + i P-` with `P± = (I ± H)/2`.
    pub fn sqrt_h() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = C64::new(0.5, 0.5);
        let minus = C64::new(0.5, -0.5);
        // (1+i)/2 I + (1-i)/2 H
        Self::new2(
            plus + minus * h,
            minus * h,
            minus * h,
            plus - minus * h,
        )
    }

    pub fn rx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::new2(C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0))
    }

    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::new2(C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0))
    }

    pub fn rz(theta: f64) -> Self {
        Self::new2(C64::from_polar(1.0, -theta / 2.0), ZERO, ZERO, C64::from_polar(1.0, theta / 2.0))
    }

    pub fn u3(theta: f64, phi: f64, lambda: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::new2(
            C64::new(c, 0.0),
            -C64::from_polar(s, lambda),
            C64::from_polar(s, phi),
            C64::from_polar(c, phi + lambda),
        )
    }

    /// Controlled-U3 with the first wire as control.
    pub fn cu3(theta: f64, phi: f64, lambda: f64) -> Self {
        Self::controlled(&Self::u3(theta, phi, lambda))
    }

    pub fn controlled(target: &GateMatrix) -> Self {
        let mut m = Self::identity(4);
        m.set(2, 2, target.get(0, 0));
        m.set(2, 3, target.get(0, 1));
        m.set(3, 2, target.get(1, 0));
        m.set(3, 3, target.get(1, 1));
        m
    }

    pub fn cnot() -> Self {
        Self::controlled(&Self::x())
    }

    pub fn cz() -> Self {
        let mut m = Self::identity(4);
        m.set(3, 3, -ONE);
        m
    }

    /// `exp(-i theta/2 Z⊗Z)`.
    pub fn zz(theta: f64) -> Self {
        let mut m = Self::zeros(4);
        let a = C64::from_polar(1.0, -theta / 2.0);
        let b = C64::from_polar(1.0, theta / 2.0);
        m.set(0, 0, a);
        m.set(1, 1, b);
        m.set(2, 2, b);
        m.set(3, 3, a);
        m
    }

    /// `exp(-i theta/2 X⊗X)`.
    pub fn xx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let c = C64::new(c, 0.0);
        let s = C64::new(0.0, -s);
        let mut m = Self::zeros(4);
        for k in 0..4 {
            m.set(k, k, c);
            m.set(k, 3 - k, s);
        }
        m
    }

    /// `exp(-i theta/2 Z⊗X)`, Z on the first wire.
    pub fn zx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let c = C64::new(c, 0.0);
        let s = C64::new(0.0, -s);
        let mut m = Self::zeros(4);
        // first wire |0>: exp(-i theta/2 X); first wire |1>: exp(+i theta/2 X)
        m.set(0, 0, c);
        m.set(1, 1, c);
        m.set(0, 1, s);
        m.set(1, 0, s);
        m.set(2, 2, c);
        m.set(3, 3, c);
        m.set(2, 3, -s);
        m.set(3, 2, -s);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &GateMatrix, b: &GateMatrix, tol: f64) -> bool {
        a.dim == b.dim
            && (0..a.dim).all(|r| (0..a.dim).all(|c| (a.get(r, c) - b.get(r, c)).norm() < tol))
    }

    fn kron(a: &GateMatrix, b: &GateMatrix) -> GateMatrix {
        let mut m = GateMatrix::zeros(4);
        for r in 0..4 {
            for c in 0..4 {
                m.set(r, c, a.get(r / 2, c / 2) * b.get(r % 2, c % 2));
            }
        }
        m
    }

    /// exp(-i theta/2 G) for an involutory G, computed as cos I - i sin G.
    fn involutory_exp(g: &GateMatrix, theta: f64) -> GateMatrix {
        let (s, c) = (theta / 2.0).sin_cos();
        let mut m = GateMatrix::zeros(g.dim);
        for r in 0..g.dim {
            for col in 0..g.dim {
                let id = if r == col { c } else { 0.0 };
                m.set(r, col, C64::new(id, 0.0) - I * s * g.get(r, col));
            }
        }
        m
    }

    fn pauli_z() -> GateMatrix {
        GateMatrix::new2(ONE, ZERO, ZERO, -ONE)
    }

    #[test]
    fn all_named_gates_are_unitary() {
        let t = 0.731;
        for g in [
            GateMatrix::x(),
            GateMatrix::h(),
            GateMatrix::sx(),
            GateMatrix::sqrt_h(),
            GateMatrix::rx(t),
            GateMatrix::ry(t),
            GateMatrix::rz(t),
            GateMatrix::u3(t, 0.2, -1.3),
            GateMatrix::cu3(t, 0.2, -1.3),
            GateMatrix::cnot(),
            GateMatrix::cz(),
            GateMatrix::zz(t),
            GateMatrix::xx(t),
            GateMatrix::zx(t),
        ] {
            assert!(g.is_unitary(1e-12), "{g:?}");
        }
    }

    #[test]
    fn square_roots_square_correctly() {
        let sh = GateMatrix::sqrt_h();
        assert!(close(&sh.compose(&sh).unwrap(), &GateMatrix::h(), 1e-12));
        let sx = GateMatrix::sx();
        assert!(close(&sx.compose(&sx).unwrap(), &GateMatrix::x(), 1e-12));
    }

    #[test]
    fn two_qubit_rotations_match_exponentials() {
        let t = 1.234;
        let z = pauli_z();
        let x = GateMatrix::x();
        assert!(close(&GateMatrix::zz(t), &involutory_exp(&kron(&z, &z), t), 1e-12));
        assert!(close(&GateMatrix::xx(t), &involutory_exp(&kron(&x, &x), t), 1e-12));
        assert!(close(&GateMatrix::zx(t), &involutory_exp(&kron(&z, &x), t), 1e-12));
        assert!(close(&GateMatrix::rx(t), &involutory_exp(&x, t), 1e-12));
        assert!(close(&GateMatrix::rz(t), &involutory_exp(&z, t), 1e-12));
    }

    #[test]
    fn u3_special_cases() {
        // U3(theta, 0, 0) = RY(theta); U3(0,0,lambda) = phase(lambda).
        assert!(close(&GateMatrix::u3(0.9, 0.0, 0.0), &GateMatrix::ry(0.9), 1e-12));
        let p = GateMatrix::u3(0.0, 0.0, PI);
        assert!(close(&p, &pauli_z(), 1e-12));
        assert!(close(&GateMatrix::cu3(0.0, 0.0, 0.0), &GateMatrix::identity(4), 1e-12));
    }
}
