//! Multivariate polynomial ring with exact rational coefficients.
//!
//! Variables live in a fixed registry ([`VarSet`]) sized by the dimension n:
//! the n^2 matrix symbols a[i,j] (row-major), then x[1]..x[n], then the
//! auxiliary symbols t (characteristic-polynomial variable) and y
//! (radical-membership variable). Monomials are dense exponent vectors over
//! the full registry; polynomials are sorted term maps with no explicit zero
//! coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::{Error, Result};

/// Index of a variable inside a [`VarSet`].
pub type Var = usize;

/// Variable registry for dimension n: ids 0..n^2 are a[i,j] row-major,
/// ids n^2..n^2+n are x[1]..x[n], then t, then y. Smaller id = higher
/// priority in every monomial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarSet {
    n: usize,
}

impl VarSet {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        VarSet { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.n * self.n + self.n + 2
    }

    /// Matrix symbol a[i,j], 1-based indices.
    pub fn a(&self, i: usize, j: usize) -> Var {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "a[{i},{j}] out of range for n={}",
            self.n
        );
        (i - 1) * self.n + (j - 1)
    }

    /// Coordinate x[i], 1-based.
    pub fn x(&self, i: usize) -> Var {
        assert!((1..=self.n).contains(&i), "x[{i}] out of range for n={}", self.n);
        self.n * self.n + (i - 1)
    }

    pub fn t(&self) -> Var {
        self.n * self.n + self.n
    }

    pub fn y(&self) -> Var {
        self.n * self.n + self.n + 1
    }

    /// All x-variable ids, ascending.
    pub fn x_vars(&self) -> Vec<Var> {
        (1..=self.n).map(|i| self.x(i)).collect()
    }

    /// All a-variable ids, ascending (row-major).
    pub fn a_vars(&self) -> Vec<Var> {
        (0..self.n * self.n).collect()
    }

    pub fn name(&self, v: Var) -> String {
        let n = self.n;
        if v < n * n {
            format!("a[{},{}]", v / n + 1, v % n + 1)
        } else if v < n * n + n {
            format!("x[{}]", v - n * n + 1)
        } else if v == self.t() {
            "t".to_string()
        } else if v == self.y() {
            "y".to_string()
        } else {
            panic!("variable id {v} out of range for n={n}");
        }
    }
}

/// Dense exponent vector. Ordering derives from the underlying Vec, which is
/// plain lexicographic with variable 0 most significant; graded orders go
/// through [`MonomialOrder`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(v: Var, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        Monomial(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Total degree restricted to the given variables.
    pub fn degree_in(&self, vars: &[Var]) -> u32 {
        vars.iter().map(|&v| self.0[v] as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.checked_add(b).expect("monomial exponent overflow"))
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a <= b)
    }

    /// other / self; caller guarantees divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| a.max(b)).collect())
    }

    /// True when the supports are disjoint (gcd is 1).
    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a == 0 || b == 0)
    }

    pub fn pow_var(v: Var, e: u16, nvars: usize) -> Monomial {
        let mut m = vec![0; nvars];
        m[v] = e;
        Monomial(m)
    }
}

/// Term order on monomials of equal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Pure lexicographic, variable 0 most significant.
    Lex,
    /// Graded reverse lexicographic: total degree first, ties broken by the
    /// smaller exponent on the last variable where they differ.
    DegRevLex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::DegRevLex => {
                let (da, db) = (a.total_degree(), b.total_degree());
                if da != db {
                    return da.cmp(&db);
                }
                for (ea, eb) in a.0.iter().zip(&b.0).rev() {
                    if ea != eb {
                        // smaller trailing exponent wins
                        return eb.cmp(ea);
                    }
                }
                Ordering::Equal
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lex" => Ok(MonomialOrder::Lex),
            "degrevlex" => Ok(MonomialOrder::DegRevLex),
            other => Err(Error::InvalidInput(format!(
                "unknown monomial order {other:?}; expected \"lex\" or \"degrevlex\""
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            MonomialOrder::Lex => "lex",
            MonomialOrder::DegRevLex => "degrevlex",
        }
    }
}

/// Sparse polynomial: monomial -> nonzero rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(BigRational::one(), nvars)
    }

    pub fn constant(c: BigRational, nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(nvars), c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_int(c: i64, nvars: usize) -> Self {
        Polynomial::constant(BigRational::from_integer(BigInt::from(c)), nvars)
    }

    pub fn var(v: Var, nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v, nvars), BigRational::one());
        Polynomial { nvars, terms }
    }

    pub fn monomial(m: Monomial, c: BigRational, nvars: usize) -> Self {
        debug_assert_eq!(m.0.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Max total degree over all terms; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Max degree in the given variables over all terms.
    pub fn degree_in(&self, vars: &[Var]) -> u32 {
        self.terms.keys().map(|m| m.degree_in(vars)).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "mixed variable registries");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "mixed variable registries");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "mixed variable registries");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Product with every term of degree (in `vars`) above `maxdeg` dropped.
    /// Since degrees add under multiplication, pairs that cannot stay within
    /// the bound are skipped before any coefficient arithmetic; the result
    /// equals `self.mul(other).truncate_degree_in(vars, maxdeg)`.
    pub fn mul_truncated(&self, other: &Polynomial, vars: &[Var], maxdeg: u32) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "mixed variable registries");
        let mut rhs: Vec<(u32, &Monomial, &BigRational)> = other
            .terms
            .iter()
            .map(|(m, c)| (m.degree_in(vars), m, c))
            .filter(|&(d, _, _)| d <= maxdeg)
            .collect();
        rhs.sort_by_key(|&(d, _, _)| d);
        let degs: Vec<u32> = rhs.iter().map(|&(d, _, _)| d).collect();
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            let da = ma.degree_in(vars);
            if da > maxdeg {
                continue;
            }
            let cut = degs.partition_point(|&d| d <= maxdeg - da);
            for &(_, mb, cb) in &rhs[..cut] {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(mm, k)| (mm.mul(m), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Partial derivative with respect to v.
    pub fn derivative(&self, v: Var) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[v] = e - 1;
            out.add_term(m2, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Simultaneous substitution: subs[v] = Some(p) replaces variable v by p,
    /// None keeps it. Ring homomorphism on the registry.
    pub fn substitute(&self, subs: &[Option<&Polynomial>]) -> Polynomial {
        assert_eq!(subs.len(), self.nvars);
        // memoized powers per substituted variable
        let mut powers: Vec<Vec<Polynomial>> = vec![Vec::new(); self.nvars];
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(c.clone(), self.nvars);
            let mut plain = Monomial::one(self.nvars);
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match subs[v] {
                    None => plain.0[v] = e,
                    Some(p) => {
                        let cache = &mut powers[v];
                        if cache.is_empty() {
                            cache.push(Polynomial::one(self.nvars));
                        }
                        while cache.len() <= e as usize {
                            let next = cache.last().unwrap().mul(p);
                            cache.push(next);
                        }
                        acc = acc.mul(&cache[e as usize]);
                    }
                }
            }
            if !plain.is_one() {
                acc = acc.mul_monomial(&plain, &BigRational::one());
            }
            out = out.add(&acc);
        }
        out
    }

    /// Drop every term whose total degree in `vars` exceeds `maxdeg`.
    pub fn truncate_degree_in(&self, vars: &[Var], maxdeg: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(vars) <= maxdeg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Group terms by their exponents on `vars`: returns multidegree (in the
    /// order given by `vars`) -> coefficient polynomial with those variables
    /// cleared. Summing back key-monomial times coefficient reassembles self.
    pub fn coefficients_by(&self, vars: &[Var]) -> BTreeMap<Vec<u16>, Polynomial> {
        let mut out: BTreeMap<Vec<u16>, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u16> = vars.iter().map(|&v| m.0[v]).collect();
            let mut rest = m.clone();
            for &v in vars {
                rest.0[v] = 0;
            }
            out.entry(key)
                .or_insert_with(|| Polynomial::zero(self.nvars))
                .add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Coefficient (a polynomial in the remaining variables) of v^k.
    pub fn coeff_of_var_power(&self, v: Var, k: u16) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[v] == k {
                let mut rest = m.clone();
                rest.0[v] = 0;
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Leading monomial under the given order, None for zero.
    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<&Monomial> {
        self.terms.keys().max_by(|a, b| order.cmp(a, b))
    }

    /// Render with terms ascending by (total degree, lexicographic) so small
    /// corrections print before higher-order ones.
    pub fn display(&self, vars: &VarSet) -> String {
        assert_eq!(vars.nvars(), self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut items: Vec<(&Monomial, &BigRational)> = self.terms.iter().collect();
        items.sort_by(|(ma, _), (mb, _)| {
            ma.total_degree().cmp(&mb.total_degree()).then_with(|| ma.cmp(mb))
        });
        let mut s = String::new();
        for (idx, (m, c)) in items.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let ac = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !ac.is_one() || m.is_one() {
                factors.push(rational_string(&ac));
            }
            for (v, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(vars.name(v));
                } else if e > 1 {
                    factors.push(format!("{}^{}", vars.name(v), e));
                }
            }
            write!(s, "{}", factors.join("*")).unwrap();
        }
        s
    }
}

fn rational_string(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

// ---------------------------------------------------------------------------
// Parsing: expr = term (+|- term)*, term = factor (* factor)*,
// factor = atom (^ uint)?, atom = number | name | ( expr ) | - factor.

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn next_tok(&mut self) -> Result<Tok> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(Tok::End);
        }
        let c = self.src[self.pos];
        self.pos += 1;
        match c {
            b'+' => Ok(Tok::Plus),
            b'-' => Ok(Tok::Minus),
            b'*' => Ok(Tok::Star),
            b'^' => Ok(Tok::Caret),
            b'/' => Ok(Tok::Slash),
            b'(' => Ok(Tok::LParen),
            b')' => Ok(Tok::RParen),
            b'0'..=b'9' => {
                let start = self.pos - 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Tok::Num(text.parse().unwrap()))
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                // identifier, optionally with a [i] or [i,j] suffix
                let start = self.pos - 1;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let mut name =
                    std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if self.pos < self.src.len() && self.src[self.pos] == b'[' {
                    let close = self.src[self.pos..]
                        .iter()
                        .position(|&b| b == b']')
                        .ok_or_else(|| Error::Parse(format!("unclosed '[' after {name}")))?;
                    name.push_str(
                        std::str::from_utf8(&self.src[self.pos..self.pos + close + 1]).unwrap(),
                    );
                    self.pos += close + 1;
                }
                Ok(Tok::Name(name))
            }
            other => Err(Error::Parse(format!(
                "unexpected character {:?} at byte {}",
                other as char,
                self.pos - 1
            ))),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    cur: Tok,
    vars: &'a VarSet,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, vars: &'a VarSet) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let cur = lexer.next_tok()?;
        Ok(Parser { lexer, cur, vars })
    }

    fn bump(&mut self) -> Result<()> {
        self.cur = self.lexer.next_tok()?;
        Ok(())
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = if self.cur == Tok::Minus {
            self.bump()?;
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.cur {
                Tok::Plus => {
                    self.bump()?;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            match self.cur {
                Tok::Star => {
                    self.bump()?;
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Slash => {
                    // only constant divisors: exact rational scaling
                    self.bump()?;
                    let d = self.factor()?;
                    let c = d.constant_term();
                    if d.num_terms() != 1 || c.is_zero() || !d.terms.keys().next().unwrap().is_one()
                    {
                        return Err(Error::Parse(
                            "division is only supported by nonzero constants".into(),
                        ));
                    }
                    acc = acc.scale(&c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial> {
        if self.cur == Tok::Minus {
            self.bump()?;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.cur == Tok::Caret {
            self.bump()?;
            match std::mem::replace(&mut self.cur, Tok::End) {
                Tok::Num(e) => {
                    self.bump()?;
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| Error::Parse("exponent out of range".into()))?;
                    Ok(base.pow(e))
                }
                other => Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match std::mem::replace(&mut self.cur, Tok::End) {
            Tok::Num(k) => {
                self.bump()?;
                Ok(Polynomial::constant(
                    BigRational::from_integer(k),
                    self.vars.nvars(),
                ))
            }
            Tok::Name(name) => {
                self.bump()?;
                let v = parse_var_name(&name, self.vars)?;
                Ok(Polynomial::var(v, self.vars.nvars()))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                if self.cur != Tok::RParen {
                    return Err(Error::Parse("expected ')'".into()));
                }
                self.bump()?;
                Ok(inner)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn parse_var_name(name: &str, vars: &VarSet) -> Result<Var> {
    let bad = || Error::Parse(format!("unknown variable {name:?} for n={}", vars.n()));
    if name == "t" {
        return Ok(vars.t());
    }
    if name == "y" {
        return Ok(vars.y());
    }
    if let Some(rest) = name.strip_prefix("a[").and_then(|r| r.strip_suffix(']')) {
        let (i, j) = rest.split_once(',').ok_or_else(bad)?;
        let i: usize = i.trim().parse().map_err(|_| bad())?;
        let j: usize = j.trim().parse().map_err(|_| bad())?;
        if (1..=vars.n()).contains(&i) && (1..=vars.n()).contains(&j) {
            return Ok(vars.a(i, j));
        }
        return Err(bad());
    }
    if let Some(rest) = name.strip_prefix("x[").and_then(|r| r.strip_suffix(']')) {
        let i: usize = rest.trim().parse().map_err(|_| bad())?;
        if (1..=vars.n()).contains(&i) {
            return Ok(vars.x(i));
        }
        return Err(bad());
    }
    Err(bad())
}

/// Parse a polynomial in the textual syntax produced by [`Polynomial::display`].
pub fn parse_polynomial(src: &str, vars: &VarSet) -> Result<Polynomial> {
    let mut p = Parser::new(src, vars)?;
    let poly = p.expr()?;
    if p.cur != Tok::End {
        return Err(Error::Parse(format!("trailing input: {:?}", p.cur)));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(k))
    }

    #[test]
    fn varset_layout() {
        let vs = VarSet::new(3);
        assert_eq!(vs.nvars(), 14);
        assert_eq!(vs.a(1, 1), 0);
        assert_eq!(vs.a(1, 3), 2);
        assert_eq!(vs.a(2, 1), 3);
        assert_eq!(vs.a(3, 3), 8);
        assert_eq!(vs.x(1), 9);
        assert_eq!(vs.x(3), 11);
        assert_eq!(vs.t(), 12);
        assert_eq!(vs.y(), 13);
        assert_eq!(vs.name(vs.a(2, 3)), "a[2,3]");
        assert_eq!(vs.name(vs.x(2)), "x[2]");
        assert_eq!(vs.name(vs.t()), "t");
    }

    #[test]
    fn ring_arithmetic() {
        let vs = VarSet::new(2);
        let nv = vs.nvars();
        let x1 = Polynomial::var(vs.x(1), nv);
        let x2 = Polynomial::var(vs.x(2), nv);
        // (x1 + x2)^2 = x1^2 + 2 x1 x2 + x2^2
        let sq = x1.add(&x2).pow(2);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.coeff(&Monomial::var(vs.x(1), nv).mul(&Monomial::var(vs.x(2), nv))), q(2));
        // (x1 + x2)(x1 - x2) = x1^2 - x2^2
        let diff = x1.add(&x2).mul(&x1.sub(&x2));
        assert_eq!(diff, x1.pow(2).sub(&x2.pow(2)));
    }

    #[test]
    fn derivative_product_rule() {
        let vs = VarSet::new(2);
        let nv = vs.nvars();
        let v = vs.x(1);
        let p = parse_polynomial("x[1]^2*x[2] + 3*x[1]", &vs).unwrap();
        let q_ = parse_polynomial("x[1] - x[2]^2", &vs).unwrap();
        let lhs = p.mul(&q_).derivative(v);
        let rhs = p.derivative(v).mul(&q_).add(&p.mul(&q_.derivative(v)));
        assert_eq!(lhs, rhs);
        assert_eq!(Polynomial::one(nv).derivative(v), Polynomial::zero(nv));
    }

    #[test]
    fn substitute_is_evaluation() {
        let vs = VarSet::new(2);
        let nv = vs.nvars();
        let p = parse_polynomial("x[1]^2 + x[2]", &vs).unwrap();
        let mut subs: Vec<Option<&Polynomial>> = vec![None; nv];
        let three = Polynomial::from_int(3, nv);
        let five = Polynomial::from_int(5, nv);
        subs[vs.x(1)] = Some(&three);
        subs[vs.x(2)] = Some(&five);
        assert_eq!(p.substitute(&subs), Polynomial::from_int(14, nv));
    }

    #[test]
    fn substitute_composition() {
        // f(x1) = x1^2, substitute x1 -> x1 + x2, expect x1^2 + 2x1x2 + x2^2
        let vs = VarSet::new(2);
        let p = parse_polynomial("x[1]^2", &vs).unwrap();
        let r = parse_polynomial("x[1] + x[2]", &vs).unwrap();
        let mut subs: Vec<Option<&Polynomial>> = vec![None; vs.nvars()];
        subs[vs.x(1)] = Some(&r);
        let expect = parse_polynomial("x[1]^2 + 2*x[1]*x[2] + x[2]^2", &vs).unwrap();
        assert_eq!(p.substitute(&subs), expect);
    }

    #[test]
    fn coefficients_by_reassembles() {
        let vs = VarSet::new(2);
        let nv = vs.nvars();
        let p = parse_polynomial(
            "a[1,1]*x[1]^2 + a[1,2]*x[1]^2 + a[2,1]*x[1]*x[2] + 7*x[2] + a[2,2]",
            &vs,
        )
        .unwrap();
        let groups = p.coefficients_by(&vs.x_vars());
        assert_eq!(groups.len(), 4);
        let mut back = Polynomial::zero(nv);
        for (key, coefpoly) in &groups {
            let mut m = Monomial::one(nv);
            for (slot, &v) in vs.x_vars().iter().enumerate() {
                m.0[v] = key[slot];
            }
            back = back.add(&coefpoly.mul_monomial(&m, &BigRational::one()));
        }
        assert_eq!(back, p);
    }

    #[test]
    fn truncation_drops_high_order() {
        let vs = VarSet::new(1);
        let p = parse_polynomial("1 + x[1] + x[1]^2 + a[1,1]*x[1]^3", &vs).unwrap();
        let t = p.truncate_degree_in(&vs.x_vars(), 2);
        assert_eq!(t, parse_polynomial("1 + x[1] + x[1]^2", &vs).unwrap());
    }

    #[test]
    fn display_matches_expected_form() {
        let vs = VarSet::new(1);
        let p = parse_polynomial("2*a[1,1]^4*x[1]^3 + x[1] + a[1,1]^2*x[1]^2", &vs).unwrap();
        assert_eq!(p.display(&vs), "x[1] + a[1,1]^2*x[1]^2 + 2*a[1,1]^4*x[1]^3");
        let z = Polynomial::zero(vs.nvars());
        assert_eq!(z.display(&vs), "0");
        let c = Polynomial::constant(q(-3) / q(4), vs.nvars());
        assert_eq!(c.display(&vs), "-3/4");
    }

    #[test]
    fn parse_display_round_trip() {
        let vs = VarSet::new(2);
        let cases = [
            "x[1] + a[1,1]^2*x[1]^2 + 2*a[1,1]^4*x[1]^3",
            "-a[1,2]*a[2,1] + a[1,1]*a[2,2]",
            "1/2*t^2 - y + 3",
        ];
        for src in cases {
            let p = parse_polynomial(src, &vs).unwrap();
            let re = parse_polynomial(&p.display(&vs), &vs).unwrap();
            assert_eq!(p, re);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        let vs = VarSet::new(2);
        assert!(parse_polynomial("x[3]", &vs).is_err());
        assert!(parse_polynomial("a[1]", &vs).is_err());
        assert!(parse_polynomial("x[1] +", &vs).is_err());
        assert!(parse_polynomial("(x[1]", &vs).is_err());
        assert!(parse_polynomial("x[1] x[2]", &vs).is_err());
    }

    #[test]
    fn degrevlex_tie_break() {
        // with three leading variables x>y>z: x^2 > xy > y^2 > xz > yz > z^2
        let vs = VarSet::new(1);
        let nv = vs.nvars();
        let m = |e: &[u16]| {
            let mut v = vec![0u16; nv];
            v[..e.len()].copy_from_slice(e);
            Monomial(v)
        };
        let ord = MonomialOrder::DegRevLex;
        let seq = [
            m(&[2, 0, 0]),
            m(&[1, 1, 0]),
            m(&[0, 2, 0]),
            m(&[1, 0, 1]),
            m(&[0, 1, 1]),
            m(&[0, 0, 2]),
        ];
        for w in seq.windows(2) {
            assert_eq!(ord.cmp(&w[0], &w[1]), Ordering::Greater);
        }
        // graded: any degree-3 monomial beats any degree-2 one
        assert_eq!(ord.cmp(&m(&[0, 0, 3]), &m(&[2, 0, 0])), Ordering::Greater);
    }

    #[test]
    fn lex_order() {
        let vs = VarSet::new(1);
        let nv = vs.nvars();
        let ord = MonomialOrder::Lex;
        let x0 = Monomial::var(0, nv);
        let x1cubed = Monomial::pow_var(1, 3, nv);
        assert_eq!(ord.cmp(&x0, &x1cubed), Ordering::Greater);
    }
}
