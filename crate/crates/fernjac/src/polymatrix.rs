//! Square matrices over the polynomial ring: products, powers, exact
//! determinants, principal minors, and characteristic polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::polyring::{Polynomial, Var, VarSet};

/// Square matrix of polynomials sharing one variable registry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    size: usize,
    nvars: usize,
    entries: Vec<Polynomial>, // row-major
}

impl PolyMatrix {
    pub fn from_fn(size: usize, nvars: usize, mut f: impl FnMut(usize, usize) -> Polynomial) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                let p = f(i, j);
                assert_eq!(p.nvars(), nvars, "entry ({i},{j}) from a different ring");
                entries.push(p);
            }
        }
        PolyMatrix { size, nvars, entries }
    }

    pub fn identity(size: usize, nvars: usize) -> Self {
        PolyMatrix::from_fn(size, nvars, |i, j| {
            if i == j {
                Polynomial::one(nvars)
            } else {
                Polynomial::zero(nvars)
            }
        })
    }

    /// The generic matrix A with entries a[i,j].
    pub fn generic_a(vars: &VarSet) -> Self {
        let nv = vars.nvars();
        PolyMatrix::from_fn(vars.n(), nv, |i, j| Polynomial::var(vars.a(i + 1, j + 1), nv))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.size + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.size, other.size, "size mismatch");
        PolyMatrix::from_fn(self.size, self.nvars, |i, j| self.get(i, j).add(other.get(i, j)))
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.size, other.size, "size mismatch");
        PolyMatrix::from_fn(self.size, self.nvars, |i, j| self.get(i, j).sub(other.get(i, j)))
    }

    /// Entrywise multiplication by one polynomial.
    pub fn scale(&self, c: &Polynomial) -> PolyMatrix {
        PolyMatrix::from_fn(self.size, self.nvars, |i, j| self.get(i, j).mul(c))
    }

    pub fn mat_mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.size, other.size, "size mismatch");
        PolyMatrix::from_fn(self.size, self.nvars, |i, j| {
            let mut acc = Polynomial::zero(self.nvars);
            for k in 0..self.size {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn mat_pow(&self, k: u32) -> PolyMatrix {
        let mut out = PolyMatrix::identity(self.size, self.nvars);
        for _ in 0..k {
            out = out.mat_mul(self);
        }
        out
    }

    /// True when every entry is a rational constant.
    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero() || p.total_degree() == 0)
    }

    /// Exact determinant: fraction-free Bareiss elimination on constant
    /// matrices, column-subset cofactor expansion on symbolic ones.
    pub fn determinant(&self) -> Polynomial {
        if self.size == 0 {
            return Polynomial::one(self.nvars);
        }
        if self.is_constant() {
            return Polynomial::constant(self.bareiss_constant(), self.nvars);
        }
        self.det_cofactor()
    }

    /// Laplace expansion organized as dynamic programming over column
    /// subsets: minor(r, S) is the determinant of the first r rows on the
    /// column set S, built up by expanding along row r-1.
    fn det_cofactor(&self) -> Polynomial {
        let n = self.size;
        assert!(n <= 20, "cofactor expansion limited to n <= 20");
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut minor: Vec<Option<Polynomial>> = vec![None; 1 << n];
        minor[0] = Some(Polynomial::one(self.nvars));
        let mut masks: Vec<u32> = (0..=full).collect();
        masks.sort_by_key(|m| m.count_ones());
        for mask in masks {
            if mask == 0 {
                continue;
            }
            let r = mask.count_ones() as usize; // rows 0..r against columns in mask
            let mut acc = Polynomial::zero(self.nvars);
            let mut idx = 0usize;
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let sub = minor[(mask ^ (1 << j)) as usize].as_ref().unwrap();
                let term = self.get(r - 1, j).mul(sub);
                if (r - 1 + idx).is_multiple_of(2) {
                    acc = acc.add(&term);
                } else {
                    acc = acc.sub(&term);
                }
                idx += 1;
            }
            minor[mask as usize] = Some(acc);
        }
        minor[full as usize].take().unwrap()
    }

    /// Bareiss determinant for constant matrices: clear denominators, run
    /// the fraction-free elimination in integers, divide back.
    fn bareiss_constant(&self) -> BigRational {
        let n = self.size;
        // common denominator per matrix keeps the scaling bookkeeping trivial
        let mut den = BigInt::one();
        for p in &self.entries {
            let c = p.constant_term();
            den = num_integer::lcm(den, c.denom().clone());
        }
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = self.get(i, j).constant_term();
                        c.numer() * (&den / c.denom())
                    })
                    .collect()
            })
            .collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigRational::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                    debug_assert!((&num % &prev).is_zero(), "Bareiss exact division");
                    m[i][j] = num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let det_scaled = m[n - 1][n - 1].clone() * BigInt::from(sign);
        BigRational::new(det_scaled, den.pow(n as u32))
    }

    /// Determinant of the submatrix on the given rows and the same columns;
    /// indices 0-based, strictly increasing.
    pub fn principal_minor(&self, rows: &[usize]) -> Polynomial {
        assert!(
            rows.windows(2).all(|w| w[0] < w[1]) && rows.iter().all(|&r| r < self.size),
            "principal minor rows must be strictly increasing and in range"
        );
        PolyMatrix::from_fn(rows.len(), self.nvars, |i, j| self.get(rows[i], rows[j]).clone())
            .determinant()
    }
}

/// Characteristic polynomial det(tI - M) stored as coefficients c_0..c_n of
/// ascending powers of t, each t-free; c_n = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    pub coeffs: Vec<Polynomial>,
}

impl PolyMatrix {
    /// Characteristic polynomial, via determinant in the t-extended ring.
    /// Entries must not involve t.
    pub fn char_poly(&self, tvar: Var) -> CharPoly {
        let n = self.size;
        let nv = self.nvars;
        for p in &self.entries {
            assert_eq!(p.degree_in(&[tvar]), 0, "matrix entries must be t-free");
        }
        let t = Polynomial::var(tvar, nv);
        let shifted = PolyMatrix::from_fn(n, nv, |i, j| {
            if i == j {
                t.sub(self.get(i, j))
            } else {
                self.get(i, j).neg()
            }
        });
        let det = shifted.determinant();
        let coeffs: Vec<Polynomial> =
            (0..=n).map(|k| det.coeff_of_var_power(tvar, k as u16)).collect();
        assert!(
            coeffs[n] == Polynomial::one(nv),
            "characteristic polynomial must be monic of degree n"
        );
        CharPoly { coeffs }
    }

    /// Coefficients J_0..J_n of det(I - tM) by ascending powers of t.
    /// J_i equals c_{n-i} of det(tI - M); the relation is asserted.
    pub fn char_coeffs_reversed(&self, tvar: Var) -> Vec<Polynomial> {
        let n = self.size;
        let nv = self.nvars;
        let t = Polynomial::var(tvar, nv);
        let shifted = PolyMatrix::from_fn(n, nv, |i, j| {
            let tm = t.mul(self.get(i, j)).neg();
            if i == j {
                Polynomial::one(nv).add(&tm)
            } else {
                tm
            }
        });
        let det = shifted.determinant();
        let js: Vec<Polynomial> =
            (0..=n).map(|k| det.coeff_of_var_power(tvar, k as u16)).collect();
        let cp = self.char_poly(tvar);
        for (i, j) in js.iter().enumerate() {
            assert_eq!(j, &cp.coeffs[n - i], "J_i must equal c_(n-i)");
        }
        js
    }

    /// Evaluate a characteristic polynomial at the matrix itself:
    /// sum of c_k M^k. Zero for the matrix's own characteristic polynomial.
    pub fn eval_poly_at_self(&self, cp: &CharPoly) -> PolyMatrix {
        let mut acc = PolyMatrix::from_fn(self.size, self.nvars, |_, _| Polynomial::zero(self.nvars));
        let mut power = PolyMatrix::identity(self.size, self.nvars);
        for (k, c) in cp.coeffs.iter().enumerate() {
            acc = acc.add(&power.scale(c));
            if k + 1 < cp.coeffs.len() {
                power = power.mat_mul(self);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;
    use num_traits::ToPrimitive;

    fn consts(vals: &[&[i64]], nvars: usize) -> PolyMatrix {
        PolyMatrix::from_fn(vals.len(), nvars, |i, j| Polynomial::from_int(vals[i][j], nvars))
    }

    #[test]
    fn generic_2x2_determinant() {
        let vs = VarSet::new(2);
        let a = PolyMatrix::generic_a(&vs);
        let det = a.determinant();
        let expect = parse_polynomial("a[1,1]*a[2,2] - a[1,2]*a[2,1]", &vs).unwrap();
        assert_eq!(det, expect);
        assert_eq!(PolyMatrix::identity(3, vs.nvars()).determinant(), Polynomial::one(vs.nvars()));
    }

    #[test]
    fn numeric_determinant_bareiss_and_cofactor_agree() {
        let vs = VarSet::new(3);
        let nv = vs.nvars();
        let m = consts(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]], nv);
        let det = m.determinant();
        assert_eq!(det.constant_term().to_integer().to_i64(), Some(-3));
        assert_eq!(m.det_cofactor(), det);
        // singular matrix
        let s = consts(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]], nv);
        assert!(s.determinant().is_zero());
    }

    #[test]
    fn det_is_multiplicative_on_numeric_matrices() {
        let vs = VarSet::new(3);
        let nv = vs.nvars();
        let m = consts(&[&[2, 0, 1], &[1, 3, -1], &[0, 5, 4]], nv);
        let k = consts(&[&[1, -2, 0], &[3, 1, 1], &[2, 2, -3]], nv);
        let lhs = m.mat_mul(&k).determinant();
        let rhs = m.determinant().mul(&k.determinant());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mat_pow_entries() {
        let vs = VarSet::new(2);
        let a = PolyMatrix::generic_a(&vs);
        assert_eq!(a.mat_pow(0), PolyMatrix::identity(2, vs.nvars()));
        let sq = a.mat_pow(2);
        let expect = parse_polynomial("a[1,1]*a[1,2] + a[1,2]*a[2,2]", &vs).unwrap();
        assert_eq!(sq.get(0, 1), &expect);
    }

    #[test]
    fn principal_minors() {
        let vs = VarSet::new(3);
        let a = PolyMatrix::generic_a(&vs);
        assert_eq!(a.principal_minor(&[1]), parse_polynomial("a[2,2]", &vs).unwrap());
        assert_eq!(
            a.principal_minor(&[0, 2]),
            parse_polynomial("a[1,1]*a[3,3] - a[1,3]*a[3,1]", &vs).unwrap()
        );
        assert_eq!(a.principal_minor(&[0, 1, 2]), a.determinant());
    }

    #[test]
    fn char_poly_2x2() {
        let vs = VarSet::new(2);
        let a = PolyMatrix::generic_a(&vs);
        let cp = a.char_poly(vs.t());
        assert_eq!(cp.coeffs.len(), 3);
        assert_eq!(cp.coeffs[2], Polynomial::one(vs.nvars()));
        assert_eq!(cp.coeffs[1], parse_polynomial("-a[1,1] - a[2,2]", &vs).unwrap());
        assert_eq!(
            cp.coeffs[0],
            parse_polynomial("a[1,1]*a[2,2] - a[1,2]*a[2,1]", &vs).unwrap()
        );
    }

    #[test]
    fn char_poly_at_zero_is_signed_determinant() {
        for n in 1..=3 {
            let vs = VarSet::new(n);
            let a = PolyMatrix::generic_a(&vs);
            let c0 = a.char_poly(vs.t()).coeffs[0].clone();
            let det = a.determinant();
            let expect = if n % 2 == 0 { det } else { det.neg() };
            assert_eq!(c0, expect);
        }
    }

    #[test]
    fn char_coeffs_reversed_match_minor_sums() {
        // J_i = (-1)^i * (sum of i-row principal minors), checked for n=3
        let vs = VarSet::new(3);
        let a = PolyMatrix::generic_a(&vs);
        let js = a.char_coeffs_reversed(vs.t());
        assert_eq!(js[0], Polynomial::one(vs.nvars()));
        assert_eq!(js[1], parse_polynomial("-a[1,1] - a[2,2] - a[3,3]", &vs).unwrap());
        let mut minors2 = Polynomial::zero(vs.nvars());
        for rows in [[0, 1], [0, 2], [1, 2]] {
            minors2 = minors2.add(&a.principal_minor(&rows));
        }
        assert_eq!(js[2], minors2);
        assert_eq!(js[3], a.determinant().neg());
    }

    #[test]
    fn cayley_hamilton_generic() {
        for n in 1..=3 {
            let vs = VarSet::new(n);
            let a = PolyMatrix::generic_a(&vs);
            let cp = a.char_poly(vs.t());
            assert!(a.eval_poly_at_self(&cp).is_zero(), "p_A(A) != 0 for n={n}");
        }
    }
}
