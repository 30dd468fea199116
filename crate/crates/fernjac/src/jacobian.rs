//! Degree d-linear maps, their differentials and Jacobian determinants, the
//! ideal generators extracted from them, the closed form for the
//! x_l^{k(d-1)} coefficients, the B matrix, and the exact membership
//! identity connecting fern z-values to characteristic coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use std::time::Instant;

use crate::polymatrix::PolyMatrix;
use crate::polyring::{Monomial, Polynomial, VarSet};
use crate::trees::{build_fern, fern_mu, z_fern};
use crate::{Error, Result};

/// The map with components f_i = x_i - (a[i,1] x_1 + ... + a[i,n] x_n)^d.
#[derive(Debug, Clone)]
pub struct DLinearMap {
    pub n: usize,
    pub d: usize,
    pub components: Vec<Polynomial>,
}

pub fn build_map(n: usize, d: usize, vars: &VarSet) -> DLinearMap {
    assert!(n >= 1 && d >= 1);
    assert_eq!(vars.n(), n);
    let nv = vars.nvars();
    let components = (1..=n)
        .map(|i| {
            let mut lin = Polynomial::zero(nv);
            for j in 1..=n {
                lin = lin.add(&Polynomial::var(vars.a(i, j), nv).mul(&Polynomial::var(vars.x(j), nv)));
            }
            Polynomial::var(vars.x(i), nv).sub(&lin.pow(d as u32))
        })
        .collect();
    DLinearMap { n, d, components }
}

/// Matrix of partial derivatives D(f)[i][j] = df_i/dx_j.
pub fn differential(map: &DLinearMap, vars: &VarSet) -> PolyMatrix {
    PolyMatrix::from_fn(map.n, vars.nvars(), |i, j| {
        map.components[i].derivative(vars.x(j + 1))
    })
}

/// A named generator list in the a-variable ring.
#[derive(Debug, Clone)]
pub struct IdealSpec {
    pub name: String,
    pub generators: Vec<Polynomial>,
}

impl IdealSpec {
    /// Concatenate generator lists (ideal sum).
    pub fn union(&self, other: &IdealSpec) -> IdealSpec {
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        IdealSpec { name: format!("{}+{}", self.name, other.name), generators }
    }
}

/// The ideal generated by the nonconstant coefficients of det(D(f)):
/// for d >= 2, coefficients by x-multidegree (the constant term is 1 and
/// is asserted); for d = 1, det(I - A) is x-free and the generators are
/// its nonconstant homogeneous components by total degree. Generators are
/// ordered by x-multidegree in graded lexicographic order (degree for d=1).
pub fn jacobian_ideal(n: usize, d: usize, vars: &VarSet) -> IdealSpec {
    let map = build_map(n, d, vars);
    let det = differential(&map, vars).determinant();
    let nv = vars.nvars();
    let name = format!("J({d},{n})");
    if d >= 2 {
        let groups = det.coefficients_by(&vars.x_vars());
        let mut keyed: Vec<(Vec<u16>, Polynomial)> = Vec::new();
        for (key, coeff) in groups {
            if key.iter().all(|&e| e == 0) {
                assert!(
                    coeff == Polynomial::one(nv),
                    "the x-free part of the Jacobian determinant must be 1"
                );
            } else {
                keyed.push((key, coeff));
            }
        }
        keyed.sort_by(|(a, _), (b, _)| {
            let (da, db) = (a.iter().map(|&e| e as u32).sum::<u32>(), b.iter().map(|&e| e as u32).sum::<u32>());
            da.cmp(&db).then_with(|| a.cmp(b))
        });
        IdealSpec { name, generators: keyed.into_iter().map(|(_, p)| p).collect() }
    } else {
        assert_eq!(det.degree_in(&vars.x_vars()), 0, "d=1 determinant must be x-free");
        let mut by_degree: Vec<Polynomial> = vec![Polynomial::zero(nv); n + 1];
        for (m, c) in det.terms() {
            let deg = m.total_degree() as usize;
            by_degree[deg] =
                by_degree[deg].add(&Polynomial::monomial(m.clone(), c.clone(), nv));
        }
        assert!(by_degree[0] == Polynomial::one(nv), "constant component must be 1");
        IdealSpec {
            name,
            generators: by_degree.into_iter().skip(1).filter(|p| !p.is_zero()).collect(),
        }
    }
}

/// Generators (A^2)_{i,j} for all i,j.
pub fn nil2_ideal(vars: &VarSet) -> IdealSpec {
    let a = PolyMatrix::generic_a(vars);
    let sq = a.mat_mul(&a);
    let n = vars.n();
    let mut generators = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            generators.push(sq.get(i, j).clone());
        }
    }
    IdealSpec { name: "nil2".into(), generators }
}

/// Nonconstant (in a) coefficients of the characteristic polynomial of A,
/// i.e. c_0..c_{n-1} of det(tI - A).
pub fn char_ideal(vars: &VarSet) -> IdealSpec {
    let a = PolyMatrix::generic_a(vars);
    let cp = a.char_poly(vars.t());
    let n = vars.n();
    IdealSpec { name: "char".into(), generators: cp.coeffs[..n].to_vec() }
}

/// (-d)^k * sum over increasing k-subsets {i_1<..<i_k} of rows of
/// (principal minor on those rows) * prod_r a[i_r,l]^(d-1).
/// k may be 0 (empty sum convention: 1) through n.
pub fn j_alpha_closed_form(
    n: usize,
    d: usize,
    k: usize,
    l: usize,
    vars: &VarSet,
) -> Result<Polynomial> {
    if k > n {
        return Err(Error::InvalidInput(format!("k={k} out of range [0,{n}]")));
    }
    if !(1..=n).contains(&l) {
        return Err(Error::InvalidInput(format!("l={l} out of range [1,{n}]")));
    }
    let nv = vars.nvars();
    let a = PolyMatrix::generic_a(vars);
    let mut sum = Polynomial::zero(nv);
    let mut subset: Vec<usize> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        start: usize,
        k: usize,
        n: usize,
        subset: &mut Vec<usize>,
        a: &PolyMatrix,
        d: usize,
        l: usize,
        vars: &VarSet,
        sum: &mut Polynomial,
    ) {
        if subset.len() == k {
            let minor = a.principal_minor(subset);
            let mut m = Monomial::one(vars.nvars());
            for &row in subset.iter() {
                m.0[vars.a(row + 1, l)] += (d - 1) as u16;
            }
            *sum = sum.add(&minor.mul_monomial(&m, &BigRational::one()));
            return;
        }
        for i in start..n {
            subset.push(i);
            rec(i + 1, k, n, subset, a, d, l, vars, sum);
            subset.pop();
        }
    }
    rec(0, k, n, &mut subset, &a, d, l, vars, &mut sum);
    let scale = BigRational::from_integer(BigInt::from(-(d as i64))).pow(k as i32);
    Ok(sum.scale(&scale))
}

/// The matrix with entries B_{i,j} = a[i,j] * a[i,l]^(d-1).
pub fn build_b(d: usize, l: usize, vars: &VarSet) -> PolyMatrix {
    let n = vars.n();
    assert!((1..=n).contains(&l), "l out of range");
    let nv = vars.nvars();
    PolyMatrix::from_fn(n, nv, |i, j| {
        let mut m = Monomial::var(vars.a(i + 1, j + 1), nv);
        m.0[vars.a(i + 1, l)] += (d - 1) as u16;
        Polynomial::monomial(m, BigRational::one(), nv)
    })
}

/// Exact verification of the membership identity for one triple (i,j,l):
/// (a) each characteristic coefficient c_k of B equals
///     d^-(n-k) times the closed-form x_l^{(n-k)(d-1)} coefficient, and
/// (b) z(fern_{d,n}, mu(i,j,l)) = -sum_{k=0}^{n-1} (B^k)_{i,j} c_k.
/// The same sum with A^k in place of B^k is evaluated as a diagnostic; it
/// is expected to coincide only when d = 1 (where B = A).
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub n: usize,
    pub d: usize,
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub equal: bool,
    pub c_k_match: Vec<bool>,
    pub a_variant_equal: bool,
    pub elapsed_ms: u64,
}

impl MembershipReport {
    pub fn all_ok(&self) -> bool {
        self.equal && self.c_k_match.iter().all(|&b| b)
    }
}

pub fn theorem_membership_check(
    n: usize,
    d: usize,
    i: usize,
    j: usize,
    l: usize,
    vars: &VarSet,
) -> Result<MembershipReport> {
    for (name, v) in [("i", i), ("j", j), ("l", l)] {
        if !(1..=n).contains(&v) {
            return Err(Error::InvalidInput(format!("{name}={v} out of range [1,{n}]")));
        }
    }
    let start = Instant::now();
    let nv = vars.nvars();
    let fern = build_fern(d, n);
    let z = z_fern(&fern, &fern_mu(&fern, i, j, l), n, vars);
    let b = build_b(d, l, vars);
    let cp = b.char_poly(vars.t());
    let dq = BigRational::from_integer(BigInt::from(d as i64));
    let mut c_k_match = Vec::with_capacity(n);
    for k in 0..n {
        let ja = j_alpha_closed_form(n, d, n - k, l, vars)?;
        let scaled = ja.scale(&dq.pow((n - k) as i32).recip());
        c_k_match.push(cp.coeffs[k] == scaled);
    }
    let mut rhs_b = Polynomial::zero(nv);
    let mut rhs_a = Polynomial::zero(nv);
    let a = PolyMatrix::generic_a(vars);
    let mut b_pow = PolyMatrix::identity(n, nv);
    let mut a_pow = PolyMatrix::identity(n, nv);
    for k in 0..n {
        rhs_b = rhs_b.add(&b_pow.get(i - 1, j - 1).mul(&cp.coeffs[k]));
        rhs_a = rhs_a.add(&a_pow.get(i - 1, j - 1).mul(&cp.coeffs[k]));
        if k + 1 < n {
            b_pow = b_pow.mat_mul(&b);
            a_pow = a_pow.mat_mul(&a);
        }
    }
    Ok(MembershipReport {
        n,
        d,
        i,
        j,
        l,
        equal: z == rhs_b.neg(),
        c_k_match,
        a_variant_equal: z == rhs_a.neg(),
        elapsed_ms: start.elapsed().as_millis().try_into().unwrap_or(u64::MAX),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;

    #[test]
    fn map_components() {
        let vs = VarSet::new(1);
        let map = build_map(1, 2, &vs);
        assert_eq!(
            map.components[0],
            parse_polynomial("x[1] - a[1,1]^2*x[1]^2", &vs).unwrap()
        );
        let vs2 = VarSet::new(2);
        let lin = build_map(2, 1, &vs2);
        assert_eq!(
            lin.components[0],
            parse_polynomial("x[1] - a[1,1]*x[1] - a[1,2]*x[2]", &vs2).unwrap()
        );
        let quad = build_map(2, 2, &vs2);
        assert_eq!(
            quad.components[0],
            parse_polynomial("x[1] - (a[1,1]*x[1] + a[1,2]*x[2])^2", &vs2).unwrap()
        );
    }

    #[test]
    fn differential_matches_examples() {
        let vs = VarSet::new(1);
        let d1 = differential(&build_map(1, 2, &vs), &vs);
        assert_eq!(d1.get(0, 0), &parse_polynomial("1 - 2*a[1,1]^2*x[1]", &vs).unwrap());

        let vs2 = VarSet::new(2);
        let dlin = differential(&build_map(2, 1, &vs2), &vs2);
        assert_eq!(dlin.get(0, 0), &parse_polynomial("1 - a[1,1]", &vs2).unwrap());
        assert_eq!(dlin.get(0, 1), &parse_polynomial("-a[1,2]", &vs2).unwrap());

        let dquad = differential(&build_map(2, 2, &vs2), &vs2);
        assert_eq!(
            dquad.get(0, 1),
            &parse_polynomial("-2*a[1,2]*(a[1,1]*x[1] + a[1,2]*x[2])", &vs2).unwrap()
        );
    }

    #[test]
    fn jacobian_ideal_small_cases() {
        let vs = VarSet::new(1);
        let j = jacobian_ideal(1, 2, &vs);
        assert_eq!(j.generators.len(), 1);
        assert_eq!(j.generators[0], parse_polynomial("-2*a[1,1]^2", &vs).unwrap());

        let vs2 = VarSet::new(2);
        let j1 = jacobian_ideal(2, 1, &vs2);
        assert_eq!(j1.generators.len(), 2);
        assert_eq!(j1.generators[0], parse_polynomial("-a[1,1] - a[2,2]", &vs2).unwrap());
        assert_eq!(
            j1.generators[1],
            parse_polynomial("a[1,1]*a[2,2] - a[1,2]*a[2,1]", &vs2).unwrap()
        );
    }

    #[test]
    fn jacobian_ideal_n2_d2_multidegrees() {
        // det(D(f)) = 1 - 2 a11 L1 - 2 a22 L2 + 4 det(A) L1 L2 with L_i
        // linear, so the x-multidegrees are (1,0),(0,1),(2,0),(1,1),(0,2)
        let vs = VarSet::new(2);
        let map = build_map(2, 2, &vs);
        let det = differential(&map, &vs).determinant();
        let groups = det.coefficients_by(&vs.x_vars());
        let keys: Vec<Vec<u16>> = groups.keys().cloned().collect();
        let mut expect = vec![
            vec![0u16, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ];
        expect.sort();
        assert_eq!(keys, expect);
        assert_eq!(jacobian_ideal(2, 2, &vs).generators.len(), 5);
    }

    #[test]
    fn j_alpha_examples() {
        let vs = VarSet::new(2);
        let k1 = j_alpha_closed_form(2, 2, 1, 1, &vs).unwrap();
        assert_eq!(k1, parse_polynomial("-2*(a[1,1]^2 + a[2,1]*a[2,2])", &vs).unwrap());
        let k2 = j_alpha_closed_form(2, 2, 2, 1, &vs).unwrap();
        assert_eq!(
            k2,
            parse_polynomial("4*(a[1,1]*a[2,2] - a[1,2]*a[2,1])*a[1,1]*a[2,1]", &vs).unwrap()
        );
        assert!(j_alpha_closed_form(2, 2, 3, 1, &vs).is_err());
        assert!(j_alpha_closed_form(2, 2, 1, 3, &vs).is_err());
    }

    #[test]
    fn j_alpha_matches_extracted_coefficient() {
        // the x_l^{k(d-1)} coefficient of det(D(f)) equals the closed form
        for (n, d) in [(2usize, 2usize), (2, 3), (3, 2)] {
            let vs = VarSet::new(n);
            let det = differential(&build_map(n, d, &vs), &vs).determinant();
            for l in 1..=n {
                for k in 1..=n {
                    let mut key = vec![0u16; n];
                    key[l - 1] = (k * (d - 1)) as u16;
                    let groups = det.coefficients_by(&vs.x_vars());
                    let extracted =
                        groups.get(&key).cloned().unwrap_or_else(|| Polynomial::zero(vs.nvars()));
                    let closed = j_alpha_closed_form(n, d, k, l, &vs).unwrap();
                    assert_eq!(extracted, closed, "n={n} d={d} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn j_alpha_degree_one_equals_homogeneous_component() {
        // at d=1 the closed form is exactly the degree-k homogeneous
        // component of det(I - A)
        for n in 2..=3usize {
            let vs = VarSet::new(n);
            let j = jacobian_ideal(n, 1, &vs);
            for k in 1..=n {
                let closed = j_alpha_closed_form(n, 1, k, 1, &vs).unwrap();
                assert_eq!(closed, j.generators[k - 1], "n={n} k={k}");
            }
        }
    }

    #[test]
    fn b_matrix_forms() {
        let vs = VarSet::new(2);
        let b = build_b(2, 1, &vs);
        assert_eq!(b.get(0, 0), &parse_polynomial("a[1,1]^2", &vs).unwrap());
        assert_eq!(b.get(0, 1), &parse_polynomial("a[1,2]*a[1,1]", &vs).unwrap());
        assert_eq!(b.get(1, 0), &parse_polynomial("a[2,1]^2", &vs).unwrap());
        assert_eq!(b.get(1, 1), &parse_polynomial("a[2,2]*a[2,1]", &vs).unwrap());
        // d=1 gives back A
        assert_eq!(build_b(1, 1, &vs), PolyMatrix::generic_a(&vs));
        let vs1 = VarSet::new(1);
        let b1 = build_b(3, 1, &vs1);
        assert_eq!(b1.get(0, 0), &parse_polynomial("a[1,1]^3", &vs1).unwrap());
    }

    #[test]
    fn membership_identity_trivial_case() {
        let vs = VarSet::new(1);
        let rep = theorem_membership_check(1, 1, 1, 1, 1, &vs).unwrap();
        assert!(rep.equal && rep.c_k_match.iter().all(|&b| b));
        assert!(rep.a_variant_equal, "B = A at d = 1");
    }

    #[test]
    fn membership_identity_n2_d2() {
        let vs = VarSet::new(2);
        let rep = theorem_membership_check(2, 2, 1, 1, 1, &vs).unwrap();
        assert!(rep.equal);
        assert!(rep.c_k_match.iter().all(|&b| b));
        // c_1 of char(B) for l=1
        let b = build_b(2, 1, &vs);
        let cp = b.char_poly(vs.t());
        assert_eq!(
            cp.coeffs[1],
            parse_polynomial("-(a[1,1]^2 + a[2,1]*a[2,2])", &vs).unwrap()
        );
    }

    #[test]
    fn a_variant_diagnostic_fails_at_d2() {
        let vs = VarSet::new(2);
        let mut any_fail = false;
        for i in 1..=2 {
            for j in 1..=2 {
                for l in 1..=2 {
                    let rep = theorem_membership_check(2, 2, i, j, l, &vs).unwrap();
                    assert!(rep.equal, "main identity must hold");
                    any_fail |= !rep.a_variant_equal;
                }
            }
        }
        assert!(any_fail, "the A-power variant must fail for at least one triple");
    }
}
