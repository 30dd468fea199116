//! Buchberger Gröbner-basis engine with normal-form reduction, ideal and
//! radical membership, and the `section5` reproduction battery.
//!
//! The engine works on integer-primitive polynomials (denominators cleared,
//! content divided out) so that all internal arithmetic is over `BigInt`;
//! exact rational results are recovered by tracking the accumulated scale
//! factor of each division. Reduced bases are normalized monic over the
//! rationals, which makes them canonical for a fixed monomial order.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::jacobian::IdealSpec;
use crate::polyring::{Monomial, MonomialOrder, Polynomial, VarSet};
use crate::trees::FernLabeling;
use crate::{Error, Result};

/// Bumped whenever the engine's output format or normalization changes;
/// invalidates disk-cached bases.
pub const ENGINE_VERSION: &str = "1";

/// Resource limits for a single Gröbner computation.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_seconds: u64,
    pub max_basis_size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_seconds: 300, max_basis_size: 20_000 }
    }
}

impl Limits {
    fn deadline(&self) -> Deadline {
        Deadline {
            at: Instant::now() + std::time::Duration::from_secs(self.max_seconds),
            secs: self.max_seconds,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Deadline {
    at: Instant,
    secs: u64,
}

impl Deadline {
    fn check(&self) -> Result<()> {
        if Instant::now() > self.at {
            Err(Error::Timeout(self.secs))
        } else {
            Ok(())
        }
    }
}

/// A Gröbner basis for a fixed monomial order. When `reduced` is set the
/// generators are the unique reduced basis: monic, pairwise top-irreducible,
/// sorted ascending by leading monomial.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub generators: Vec<Polynomial>,
    pub order: MonomialOrder,
    pub reduced: bool,
}

/// Outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Member,
    NonMember,
    Timeout,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Member => "member",
            Verdict::NonMember => "non-member",
            Verdict::Timeout => "timeout",
        }
    }
}

/// Result of an ideal or radical membership query. `witness` is the exact
/// normal form of the target (zero iff member); absent when the computation
/// timed out or, for radical queries, when no normal form is produced.
#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub target: String,
    pub ideal: String,
    pub verdict: Verdict,
    pub witness: Option<Polynomial>,
    pub elapsed_ms: u64,
}

fn elapsed_ms(started: Instant) -> u64 {
    started.elapsed().as_millis().try_into().unwrap_or(u64::MAX)
}

// ---------------------------------------------------------------------------
// Integer-primitive engine representation
// ---------------------------------------------------------------------------

/// Terms sorted strictly descending under the active order, coefficients
/// nonzero integers.
#[derive(Debug, Clone)]
struct IPoly {
    terms: Vec<(Monomial, BigInt)>,
}

impl IPoly {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide by content and normalize the leading coefficient positive.
    fn make_primitive(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let mut g = self.content();
        if self.terms[0].1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in &mut self.terms {
                debug_assert!((&*c % &g).is_zero());
                *c = &*c / &g;
            }
        }
    }

    fn from_rational(p: &Polynomial, order: MonomialOrder) -> IPoly {
        let mut den = BigInt::one();
        for (_, c) in p.terms() {
            den = den.lcm(c.denom());
        }
        let mut terms: Vec<(Monomial, BigInt)> = p
            .terms()
            .map(|(m, c)| (m.clone(), c.numer() * (&den / c.denom())))
            .collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out = IPoly { terms };
        out.make_primitive();
        out
    }

    /// Exact rational polynomial `self / scale`.
    fn to_rational(&self, scale: &BigInt, nvars: usize) -> Polynomial {
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), BigRational::new(c.clone(), scale.clone()));
        }
        out
    }
}

/// The rational `f` with `p = f * IPoly::from_rational(p, order)`: the
/// integer content over the cleared denominator, signed so the primitive
/// part has a positive leading coefficient.
fn primitive_factor(p: &Polynomial, order: MonomialOrder) -> BigRational {
    let mut den = BigInt::one();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
    }
    let mut content = BigInt::zero();
    for (_, c) in p.terms() {
        content = content.gcd(&(c.numer() * (&den / c.denom())));
    }
    let lead = p
        .terms()
        .max_by(|a, b| order.cmp(a.0, b.0))
        .map(|(_, c)| c.clone())
        .expect("nonzero polynomial");
    if (lead.numer() * (&den / lead.denom())).is_negative() {
        content = -content;
    }
    BigRational::new(content, den)
}

/// `alpha * p - beta * (u * g)`, merged in descending order. Requires the
/// term lists of `p` and `g` to be sorted descending under `order`.
fn combine(
    p: &IPoly,
    alpha: &BigInt,
    g: &IPoly,
    beta: &BigInt,
    u: &Monomial,
    order: MonomialOrder,
) -> IPoly {
    let mut out = Vec::with_capacity(p.terms.len() + g.terms.len());
    let mut i = 0;
    let mut j = 0;
    let alpha_is_one = alpha.is_one();
    let scaled = |c: &BigInt| if alpha_is_one { c.clone() } else { alpha * c };
    while i < p.terms.len() && j < g.terms.len() {
        let mg = u.mul(&g.terms[j].0);
        match order.cmp(&p.terms[i].0, &mg) {
            std::cmp::Ordering::Greater => {
                out.push((p.terms[i].0.clone(), scaled(&p.terms[i].1)));
                i += 1;
            }
            std::cmp::Ordering::Less => {
                out.push((mg, -(beta * &g.terms[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = scaled(&p.terms[i].1) - beta * &g.terms[j].1;
                if !c.is_zero() {
                    out.push((p.terms[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    while i < p.terms.len() {
        out.push((p.terms[i].0.clone(), scaled(&p.terms[i].1)));
        i += 1;
    }
    while j < g.terms.len() {
        out.push((u.mul(&g.terms[j].0), -(beta * &g.terms[j].1)));
        j += 1;
    }
    IPoly { terms: out }
}

/// Full multivariate division: returns `(r, scale)` with
/// `r = scale * p - (combination of basis elements)`, `scale > 0`, and no
/// monomial of `r` divisible by any usable basis leading monomial. The exact
/// normal form of `p` is `r / scale`. `skip` excludes one basis index from
/// acting as a reducer (used during interreduction).
fn reduce_full(
    p: &IPoly,
    basis: &[IPoly],
    skip: Option<usize>,
    order: MonomialOrder,
    deadline: Option<Deadline>,
) -> Result<(IPoly, BigInt)> {
    let mut work = p.clone();
    let mut scale = BigInt::one();
    let mut idx = 0;
    let mut steps: u32 = 0;
    while idx < work.terms.len() {
        steps += 1;
        if steps.is_multiple_of(256) {
            if let Some(dl) = deadline {
                dl.check()?;
            }
            // keep coefficients small: strip any common factor jointly
            let g = work.content().gcd(&scale);
            if !g.is_one() && !g.is_zero() {
                for (_, c) in &mut work.terms {
                    *c = &*c / &g;
                }
                scale = &scale / &g;
            }
        }
        let m = &work.terms[idx].0;
        let reducer = basis
            .iter()
            .enumerate()
            .find(|(k, g)| Some(*k) != skip && g.lm().divides(m))
            .map(|(k, _)| k);
        match reducer {
            None => idx += 1,
            Some(gi) => {
                let g = &basis[gi];
                let c = work.terms[idx].1.clone();
                let l = g.lc();
                let d = c.gcd(l);
                // alpha > 0 keeps the scale positive and the result sign stable
                let alpha = (l / &d).abs();
                let beta = if l.is_negative() { -(&c / &d) } else { &c / &d };
                let u = g.lm().div_into(m);
                work = combine(&work, &alpha, g, &beta, &u, order);
                if !alpha.is_one() {
                    scale *= &alpha;
                }
            }
        }
    }
    Ok((work, scale))
}

/// S-polynomial of `f` and `g`: the leading terms cancel exactly.
fn s_poly(f: &IPoly, g: &IPoly, order: MonomialOrder) -> IPoly {
    let l = f.lm().lcm(g.lm());
    let uf = f.lm().div_into(&l);
    let ug = g.lm().div_into(&l);
    let c = f.lc().lcm(g.lc());
    let cf = &c / f.lc();
    let cg = &c / g.lc();
    let left = IPoly {
        terms: f.terms.iter().map(|(m, co)| (uf.mul(m), &cf * co)).collect(),
    };
    combine(&left, &BigInt::one(), g, &cg, &ug, order)
}

// ---------------------------------------------------------------------------
// Buchberger with Gebauer-Möller pair elimination
// ---------------------------------------------------------------------------

type PairKey = (u32, Vec<u16>, usize, usize);

/// Gebauer-Möller update: prune the pending pair set against the new element
/// `t` (chain criterion on old pairs), then add the surviving new pairs
/// `(i, t)` after lcm-domination filtering and the product criterion.
fn gm_update(pairs: &mut BTreeSet<PairKey>, lms: &[Monomial], t: usize) {
    let lt = &lms[t];
    pairs.retain(|(_, lcm_vec, i, j)| {
        let lij = Monomial(lcm_vec.clone());
        if !lt.divides(&lij) {
            return true;
        }
        lms[*i].lcm(lt) == lij || lms[*j].lcm(lt) == lij
    });
    let lcms: Vec<Monomial> = (0..t).map(|i| lms[i].lcm(lt)).collect();
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..t {
        let coprime = lms[i].coprime(lt);
        let dominated = ((i + 1)..t).any(|j| lcms[j].divides(&lcms[i]))
            || kept.iter().any(|&j| lcms[j].divides(&lcms[i]));
        // coprime pairs stay through this phase so they can dominate others
        if coprime || !dominated {
            kept.push(i);
        }
    }
    for i in kept {
        // product criterion: coprime leading monomials reduce to zero
        if !lms[i].coprime(lt) {
            pairs.insert((lcms[i].total_degree(), lcms[i].0.clone(), i, t));
        }
    }
}

/// Buchberger's algorithm with the normal selection strategy (minimal lcm
/// degree first), Gebauer-Möller pair elimination, and the product
/// criterion. Returns the unique reduced monic basis deterministically; on a
/// limit breach it returns an error, never a partial basis.
pub fn buchberger(
    gens: &[Polynomial],
    order: MonomialOrder,
    limits: &Limits,
) -> Result<GroebnerBasis> {
    if gens.is_empty() {
        return Err(Error::InvalidInput(
            "buchberger requires a nonempty generator list".into(),
        ));
    }
    let nvars = gens[0].nvars();
    let deadline = limits.deadline();
    let mut basis: Vec<IPoly> = Vec::new();
    let mut lms: Vec<Monomial> = Vec::new();
    let mut pairs: BTreeSet<PairKey> = BTreeSet::new();

    fn add(
        p: IPoly,
        basis: &mut Vec<IPoly>,
        lms: &mut Vec<Monomial>,
        pairs: &mut BTreeSet<PairKey>,
    ) {
        lms.push(p.lm().clone());
        basis.push(p);
        gm_update(pairs, lms, basis.len() - 1);
    }

    for g in gens {
        if g.is_zero() {
            continue;
        }
        add(IPoly::from_rational(g, order), &mut basis, &mut lms, &mut pairs);
    }
    if basis.is_empty() {
        // the zero ideal has the empty reduced basis
        return Ok(GroebnerBasis { generators: Vec::new(), order, reduced: true });
    }

    while let Some((_, _, i, j)) = pairs.pop_first() {
        deadline.check()?;
        if basis.len() > limits.max_basis_size {
            return Err(Error::Limit(format!(
                "basis size exceeded {} elements",
                limits.max_basis_size
            )));
        }
        let s = s_poly(&basis[i], &basis[j], order);
        if s.is_zero() {
            continue;
        }
        let (mut r, _) = reduce_full(&s, &basis, None, order, Some(deadline))?;
        if r.is_zero() {
            continue;
        }
        r.make_primitive();
        add(r, &mut basis, &mut lms, &mut pairs);
    }

    // minimal basis: drop elements whose leading monomial is divisible by
    // another kept element's leading monomial
    let mut by_lm: Vec<usize> = (0..basis.len()).collect();
    by_lm.sort_by(|&a, &b| order.cmp(&lms[a], &lms[b]));
    let mut kept: Vec<IPoly> = Vec::new();
    for &i in &by_lm {
        if !kept.iter().any(|k| k.lm().divides(&lms[i])) {
            kept.push(basis[i].clone());
        }
    }

    // tail-reduce each element against the others, then normalize monic
    let mut reduced: Vec<Polynomial> = Vec::new();
    for pos in 0..kept.len() {
        let (r, scale) = reduce_full(&kept[pos], &kept, Some(pos), order, Some(deadline))?;
        debug_assert!(!r.is_zero(), "minimal basis element reduced to zero");
        let mut p = r.to_rational(&scale, nvars);
        let lc = p
            .terms()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(_, c)| c.clone())
            .expect("nonzero basis element");
        p = p.scale(&lc.recip());
        reduced.push(p);
    }
    reduced.sort_by(|a, b| {
        order.cmp(
            a.leading_monomial(order).expect("nonzero"),
            b.leading_monomial(order).expect("nonzero"),
        )
    });
    Ok(GroebnerBasis { generators: reduced, order, reduced: true })
}

/// Remainder of `p` under multivariate division by `gens`: no remainder
/// monomial is divisible by any leading monomial of `gens`, and
/// `p − normal_form(p, gens, order)` lies in the ideal generated by `gens`.
pub fn normal_form(p: &Polynomial, gens: &[Polynomial], order: MonomialOrder) -> Polynomial {
    let basis: Vec<IPoly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| IPoly::from_rational(g, order))
        .collect();
    if p.is_zero() || basis.is_empty() {
        return p.clone();
    }
    let (r, scale) =
        reduce_full(&IPoly::from_rational(p, order), &basis, None, order, None)
            .expect("division without a deadline cannot time out");
    let f = primitive_factor(p, order);
    r.to_rational(&scale, p.nvars()).scale(&f)
}

// ---------------------------------------------------------------------------
// Cached basis lookup
// ---------------------------------------------------------------------------

type CacheMap = HashMap<(String, &'static str, u64), Arc<GroebnerBasis>>;

fn mem_cache() -> &'static Mutex<CacheMap> {
    static CACHE: OnceLock<Mutex<CacheMap>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// FNV-1a over the generator display forms; stable across runs and builds.
fn generators_hash(ideal: &IdealSpec, vars: &VarSet) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |s: &str| {
        for b in s.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100000001b3);
    };
    eat(&vars.nvars().to_string());
    for g in &ideal.generators {
        eat(&g.display(vars));
    }
    h
}

fn cache_file_name(name: &str, order: MonomialOrder, hash: u64) -> String {
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect();
    format!("{}-{}-v{}-{:016x}.basis", safe, order.label(), ENGINE_VERSION, hash)
}

fn load_disk_basis(
    dir: &Path,
    name: &str,
    order: MonomialOrder,
    hash: u64,
    vars: &VarSet,
) -> Option<GroebnerBasis> {
    let path = dir.join(cache_file_name(name, order, hash));
    let text = std::fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != format!("fernjac-basis v{ENGINE_VERSION}") {
        return None;
    }
    if lines.next()? != format!("ideal {name}") {
        return None;
    }
    if lines.next()? != format!("order {}", order.label()) {
        return None;
    }
    if lines.next()? != format!("n {}", vars.n()) {
        return None;
    }
    if lines.next()? != format!("genhash {hash:016x}") {
        return None;
    }
    let size: usize = lines.next()?.strip_prefix("size ")?.parse().ok()?;
    let mut generators = Vec::with_capacity(size);
    for line in lines {
        if line.is_empty() {
            continue;
        }
        generators.push(crate::polyring::parse_polynomial(line, vars).ok()?);
    }
    if generators.len() != size {
        return None;
    }
    Some(GroebnerBasis { generators, order, reduced: true })
}

fn save_disk_basis(
    dir: &Path,
    name: &str,
    order: MonomialOrder,
    hash: u64,
    vars: &VarSet,
    gb: &GroebnerBasis,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut out = String::new();
    out.push_str(&format!("fernjac-basis v{ENGINE_VERSION}\n"));
    out.push_str(&format!("ideal {name}\n"));
    out.push_str(&format!("order {}\n", order.label()));
    out.push_str(&format!("n {}\n", vars.n()));
    out.push_str(&format!("genhash {hash:016x}\n"));
    out.push_str(&format!("size {}\n", gb.generators.len()));
    for g in &gb.generators {
        out.push_str(&g.display(vars));
        out.push('\n');
    }
    std::fs::write(dir.join(cache_file_name(name, order, hash)), out)
}

fn disk_cache_dir() -> Option<PathBuf> {
    std::env::var_os("FERNJAC_CACHE_DIR").map(PathBuf::from)
}

/// The reduced Gröbner basis of `ideal`, computed at most once per
/// (ideal name, order, generator set) and cached in memory and, when
/// `FERNJAC_CACHE_DIR` is set, on disk.
pub fn cached_basis(
    ideal: &IdealSpec,
    order: MonomialOrder,
    limits: &Limits,
    vars: &VarSet,
) -> Result<Arc<GroebnerBasis>> {
    let hash = generators_hash(ideal, vars);
    let key = (ideal.name.clone(), order.label(), hash);
    if let Some(gb) = mem_cache().lock().unwrap().get(&key) {
        return Ok(gb.clone());
    }
    if let Some(dir) = disk_cache_dir() {
        if let Some(gb) = load_disk_basis(&dir, &ideal.name, order, hash, vars) {
            let arc = Arc::new(gb);
            mem_cache().lock().unwrap().insert(key, arc.clone());
            return Ok(arc);
        }
    }
    let gb = buchberger(&ideal.generators, order, limits)?;
    if let Some(dir) = disk_cache_dir() {
        // a failed write only costs the cache, not the computation
        let _ = save_disk_basis(&dir, &ideal.name, order, hash, vars, &gb);
    }
    let arc = Arc::new(gb);
    mem_cache().lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

/// Integer-primitive copy of a basis, reusable across many reductions.
struct EngineBasis {
    elems: Vec<IPoly>,
}

impl EngineBasis {
    fn new(gb: &GroebnerBasis, order: MonomialOrder) -> EngineBasis {
        EngineBasis {
            elems: gb
                .generators
                .iter()
                .filter(|g| !g.is_zero())
                .map(|g| IPoly::from_rational(g, order))
                .collect(),
        }
    }

    /// Remainder of `p` up to a positive rational scalar: zero iff the exact
    /// normal form is zero, with the same number of terms.
    fn reduce(
        &self,
        p: &Polynomial,
        order: MonomialOrder,
        deadline: Option<Deadline>,
    ) -> Result<(IPoly, BigInt)> {
        if p.is_zero() {
            return Ok((IPoly { terms: Vec::new() }, BigInt::one()));
        }
        reduce_full(&IPoly::from_rational(p, order), &self.elems, None, order, deadline)
    }
}

fn describe_target(p: &Polynomial, vars: &VarSet) -> String {
    if p.num_terms() <= 8 {
        p.display(vars)
    } else {
        format!("polynomial with {} terms", p.num_terms())
    }
}

/// Is `p` in the ideal? Member iff the normal form against the cached
/// reduced basis is zero. A Gröbner-computation timeout becomes a `Timeout`
/// verdict rather than an error.
pub fn ideal_membership(
    p: &Polynomial,
    ideal: &IdealSpec,
    order: MonomialOrder,
    limits: &Limits,
    vars: &VarSet,
) -> MembershipVerdict {
    let started = Instant::now();
    let target = describe_target(p, vars);
    let timeout = |started: Instant| MembershipVerdict {
        target: describe_target(p, vars),
        ideal: ideal.name.clone(),
        verdict: Verdict::Timeout,
        witness: None,
        elapsed_ms: elapsed_ms(started),
    };
    let gb = match cached_basis(ideal, order, limits, vars) {
        Ok(gb) => gb,
        Err(_) => return timeout(started),
    };
    let engine = EngineBasis::new(&gb, order);
    match engine.reduce(p, order, Some(limits.deadline())) {
        Ok((r, scale)) => {
            let witness = r.to_rational(&scale, p.nvars());
            let verdict = if witness.is_zero() { Verdict::Member } else { Verdict::NonMember };
            MembershipVerdict {
                target,
                ideal: ideal.name.clone(),
                verdict,
                witness: Some(witness),
                elapsed_ms: elapsed_ms(started),
            }
        }
        Err(_) => timeout(started),
    }
}

/// Is `p` in the radical of the ideal? Member iff 1 lies in
/// ⟨generators, 1 − y·p⟩ (Rabinowitsch trick), detected by the reduced
/// basis being {1} in the ring extended by the auxiliary variable y.
pub fn radical_membership(
    p: &Polynomial,
    ideal: &IdealSpec,
    order: MonomialOrder,
    limits: &Limits,
    vars: &VarSet,
) -> MembershipVerdict {
    let started = Instant::now();
    let nvars = vars.nvars();
    let y = Polynomial::var(vars.y(), nvars);
    let aux = Polynomial::one(nvars).sub(&y.mul(p));
    let mut gens = ideal.generators.clone();
    gens.push(aux);
    let verdict = match buchberger(&gens, order, limits) {
        Ok(gb) => {
            let one_in = gb
                .generators
                .iter()
                .any(|g| g.num_terms() == 1 && g.total_degree() == 0);
            if one_in {
                Verdict::Member
            } else {
                Verdict::NonMember
            }
        }
        Err(_) => Verdict::Timeout,
    };
    MembershipVerdict {
        target: describe_target(p, vars),
        ideal: format!("radical({})", ideal.name),
        verdict,
        witness: None,
        elapsed_ms: elapsed_ms(started),
    }
}

// ---------------------------------------------------------------------------
// The section5 reproduction battery
// ---------------------------------------------------------------------------

/// One evaluated claim. `expected` is absent for rows computed without a
/// published expectation. `witness_terms` counts the nonzero normal-form
/// terms for single-target rows; for aggregate sweep rows it counts the
/// labelings whose z-value failed membership.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ClaimRow {
    pub claim_id: String,
    pub ideal: String,
    pub target: String,
    pub expected: Option<String>,
    pub computed: String,
    pub witness_terms: usize,
    pub elapsed_ms: u64,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Section5Report {
    pub engine_version: String,
    pub order: String,
    pub include_slow: bool,
    pub rows: Vec<ClaimRow>,
    pub notes: Vec<String>,
    pub all_match: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Section5Options {
    pub include_slow: bool,
    pub order: MonomialOrder,
    pub limits: Limits,
}

impl Default for Section5Options {
    fn default() -> Self {
        Section5Options {
            include_slow: false,
            order: MonomialOrder::DegRevLex,
            limits: Limits::default(),
        }
    }
}

fn status_for(expected: Option<Verdict>, computed: Verdict) -> String {
    match (expected, computed) {
        (_, Verdict::Timeout) => "timeout".into(),
        (None, _) => "info".into(),
        (Some(e), c) if e == c => "ok".into(),
        _ => "mismatch".into(),
    }
}

fn single_row(
    claim_id: &str,
    ideal: &IdealSpec,
    target_desc: &str,
    p: &Polynomial,
    expected: Option<Verdict>,
    opts: &Section5Options,
    vars: &VarSet,
) -> ClaimRow {
    let v = ideal_membership(p, ideal, opts.order, &opts.limits, vars);
    let witness_terms = v.witness.as_ref().map_or(0, |w| w.num_terms());
    ClaimRow {
        claim_id: claim_id.to_string(),
        ideal: ideal.name.clone(),
        target: target_desc.to_string(),
        expected: expected.map(|e| e.label().to_string()),
        computed: v.verdict.label().to_string(),
        witness_terms,
        elapsed_ms: v.elapsed_ms,
        status: status_for(expected, v.verdict),
    }
}

/// All root-leaf labelings of fern_{d,n}: root in [1,n], then n−1 tuples of
/// arity d−1 and one final tuple of arity d, in odometer order with the last
/// slot varying fastest.
pub fn all_fern_labelings(n: usize, d: usize) -> Vec<FernLabeling> {
    let arities: Vec<usize> = (0..n).map(|i| if i + 1 == n { d } else { d - 1 }).collect();
    let total_slots: usize = 1 + arities.iter().sum::<usize>();
    let mut out = Vec::new();
    let mut digits = vec![1usize; total_slots];
    loop {
        let root = digits[0];
        let mut tuples = Vec::with_capacity(n);
        let mut pos = 1;
        for &ar in &arities {
            tuples.push(digits[pos..pos + ar].to_vec());
            pos += ar;
        }
        out.push(
            FernLabeling::new(root, tuples, d, n).expect("enumerated labeling is well-formed"),
        );
        let mut k = total_slots;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if digits[k] < n {
                digits[k] += 1;
                break;
            }
            digits[k] = 1;
        }
    }
}

/// The two exceptional labelings for fern_{d,3}:
/// (1, (2..2), (3..3), (1..1)) and (1, (3..3), (2..2), (1..1)).
pub fn exceptional_labelings(d: usize) -> [FernLabeling; 2] {
    let mk = |a: usize, b: usize| {
        FernLabeling::new(1, vec![vec![a; d - 1], vec![b; d - 1], vec![1; d]], d, 3)
            .expect("exceptional labeling is well-formed")
    };
    [mk(2, 3), mk(3, 2)]
}

/// Closure of the exceptional pair under simultaneous relabeling of the
/// index set {1,2,3}: one orbit of six labelings, canonical pair first, the
/// rest sorted by display form.
pub fn exceptional_orbit(d: usize) -> Vec<FernLabeling> {
    let [e1, e2] = exceptional_labelings(d);
    // perms[p] is the image of label p; index 0 unused
    let perms: [[usize; 4]; 6] = [
        [0, 1, 2, 3],
        [0, 1, 3, 2],
        [0, 2, 1, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
        [0, 3, 2, 1],
    ];
    let apply = |lab: &FernLabeling, perm: &[usize; 4]| {
        FernLabeling::new(
            perm[lab.root],
            lab.tuples
                .iter()
                .map(|t| t.iter().map(|&v| perm[v]).collect())
                .collect(),
            d,
            3,
        )
        .expect("relabeled labeling is well-formed")
    };
    let canon = [e1.display(), e2.display()];
    let mut rest: Vec<FernLabeling> = Vec::new();
    for e in [&e1, &e2] {
        for perm in &perms {
            let img = apply(e, perm);
            let s = img.display();
            if !canon.contains(&s) && !rest.iter().any(|r| r.display() == s) {
                rest.push(img);
            }
        }
    }
    rest.sort_by_key(|l| l.display());
    let mut out = vec![e1, e2];
    out.extend(rest);
    out
}

/// Sweep membership of z(fern_{d,n}, μ) over every labeling μ outside
/// `exclude`, as one aggregate row; display strings of failing labelings are
/// appended to `failures_out`.
#[allow(clippy::too_many_arguments)]
fn sweep_row(
    claim_id: &str,
    n: usize,
    d: usize,
    ideal: &IdealSpec,
    exclude: &[String],
    opts: &Section5Options,
    vars: &VarSet,
    failures_out: &mut Vec<String>,
) -> ClaimRow {
    let started = Instant::now();
    let fern = crate::trees::build_fern(d, n);
    let labelings = all_fern_labelings(n, d);
    let swept: Vec<&FernLabeling> = labelings
        .iter()
        .filter(|l| !exclude.contains(&l.display()))
        .collect();
    let target = format!(
        "z(fern({d},{n}), mu) for all {} labelings mu{}",
        swept.len(),
        if exclude.is_empty() { "" } else { " outside the exceptional set" },
    );
    let expected = Some(Verdict::Member);
    let mut row = ClaimRow {
        claim_id: claim_id.to_string(),
        ideal: ideal.name.clone(),
        target,
        expected: expected.map(|e: Verdict| e.label().to_string()),
        computed: Verdict::Timeout.label().to_string(),
        witness_terms: 0,
        elapsed_ms: 0,
        status: "timeout".into(),
    };
    let gb = match cached_basis(ideal, opts.order, &opts.limits, vars) {
        Ok(gb) => gb,
        Err(_) => {
            row.elapsed_ms = elapsed_ms(started);
            return row;
        }
    };
    let engine = EngineBasis::new(&gb, opts.order);
    let mut failures = 0usize;
    let mut timed_out = false;
    for lab in swept {
        let z = crate::trees::z_fern(&fern, lab, n, vars);
        match engine.reduce(&z, opts.order, Some(opts.limits.deadline())) {
            Ok((r, _)) => {
                if !r.is_zero() {
                    failures += 1;
                    failures_out.push(lab.display());
                }
            }
            Err(_) => {
                timed_out = true;
                failures_out.push(format!("{} (timeout)", lab.display()));
                break;
            }
        }
    }
    let computed = if timed_out {
        Verdict::Timeout
    } else if failures == 0 {
        Verdict::Member
    } else {
        Verdict::NonMember
    };
    row.computed = computed.label().to_string();
    row.witness_terms = failures;
    row.elapsed_ms = elapsed_ms(started);
    row.status = status_for(expected, computed);
    row
}

/// Rows for the n=3 block at one degree d: the six exceptional labelings,
/// the sweep over all other labelings, the sum of the two canonical
/// exceptional z-values, both squares, and both unions with the nilpotency
/// and characteristic-coefficient ideals. Union rows carry a published
/// expectation only at d=2.
fn n3_block(
    d: usize,
    opts: &Section5Options,
    vars: &VarSet,
    rows: &mut Vec<ClaimRow>,
    notes: &mut Vec<String>,
) {
    let n = 3;
    let ideal = crate::jacobian::jacobian_ideal(n, d, vars);
    let fern = crate::trees::build_fern(d, n);
    let orbit = exceptional_orbit(d);
    let prefix = format!("n3-d{d}");

    for lab in &orbit {
        let z = crate::trees::z_fern(&fern, lab, n, vars);
        rows.push(single_row(
            &format!("{prefix}/exception/{}", lab.display()),
            &ideal,
            &format!("z(fern({d},{n}), {})", lab.display()),
            &z,
            Some(Verdict::NonMember),
            opts,
            vars,
        ));
    }
    notes.push(format!(
        "{prefix}: the exceptional set is closed under simultaneous relabeling of the \
         indices; the six excluded labelings form one relabeling orbit of the two \
         canonical representatives"
    ));

    let exclude: Vec<String> = orbit.iter().map(|l| l.display()).collect();
    let mut sweep_failures = Vec::new();
    rows.push(sweep_row(
        &format!("{prefix}/sweep-others"),
        n,
        d,
        &ideal,
        &exclude,
        opts,
        vars,
        &mut sweep_failures,
    ));
    if !sweep_failures.is_empty() {
        sweep_failures.truncate(20);
        notes.push(format!(
            "{prefix}/sweep-others: failing labelings: {}",
            sweep_failures.join(", ")
        ));
    }

    let [e1, e2] = exceptional_labelings(d);
    let z1 = crate::trees::z_fern(&fern, &e1, n, vars);
    let z2 = crate::trees::z_fern(&fern, &e2, n, vars);

    rows.push(single_row(
        &format!("{prefix}/sum"),
        &ideal,
        &format!(
            "z(fern({d},{n}), {}) + z(fern({d},{n}), {})",
            e1.display(),
            e2.display()
        ),
        &z1.add(&z2),
        Some(Verdict::Member),
        opts,
        vars,
    ));
    for (lab, z) in [(&e1, &z1), (&e2, &z2)] {
        rows.push(single_row(
            &format!("{prefix}/square/{}", lab.display()),
            &ideal,
            &format!("z(fern({d},{n}), {})^2", lab.display()),
            &z.mul(z),
            Some(Verdict::Member),
            opts,
            vars,
        ));
    }

    let expected_union = if d == 2 { Some(Verdict::Member) } else { None };
    let nil2 = ideal.union(&crate::jacobian::nil2_ideal(vars));
    let chr = ideal.union(&crate::jacobian::char_ideal(vars));
    for (kind, union_ideal) in [("nil2", &nil2), ("char", &chr)] {
        for (lab, z) in [(&e1, &z1), (&e2, &z2)] {
            rows.push(single_row(
                &format!("{prefix}/{kind}/{}", lab.display()),
                union_ideal,
                &format!("z(fern({d},{n}), {})", lab.display()),
                z,
                expected_union,
                opts,
                vars,
            ));
        }
    }
}

/// Evaluate every claim in the published Gröbner-computation battery: the
/// n=2 sweeps at d ∈ {2,3}, the full n=3, d=2 block, and, with
/// `include_slow`, the n=3 blocks at d ∈ {3,4}.
pub fn section5_report(opts: &Section5Options) -> Section5Report {
    let mut rows = Vec::new();
    let mut notes = Vec::new();

    // n = 2: every labeling is a member at d in {2, 3}
    for d in [2usize, 3] {
        let vars = VarSet::new(2);
        let ideal = crate::jacobian::jacobian_ideal(2, d, &vars);
        let mut failures = Vec::new();
        rows.push(sweep_row(
            &format!("n2-d{d}/sweep"),
            2,
            d,
            &ideal,
            &[],
            opts,
            &vars,
            &mut failures,
        ));
        if !failures.is_empty() {
            failures.truncate(20);
            notes.push(format!("n2-d{d}/sweep: failing labelings: {}", failures.join(", ")));
        }
    }

    let vars3 = VarSet::new(3);
    n3_block(2, opts, &vars3, &mut rows, &mut notes);

    if opts.include_slow {
        for d in [3usize, 4] {
            n3_block(d, opts, &vars3, &mut rows, &mut notes);
        }
    }

    let all_match = rows.iter().all(|r| r.status == "ok" || r.status == "info");
    Section5Report {
        engine_version: ENGINE_VERSION.to_string(),
        order: opts.order.label().to_string(),
        include_slow: opts.include_slow,
        rows,
        notes,
        all_match,
    }
}

// ---------------------------------------------------------------------------
