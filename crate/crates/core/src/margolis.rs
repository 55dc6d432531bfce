//! Weight pieces `M1(k)` of `(A//E(Q0,Q1))_*` and their Margolis homology.
//!
//! At `p = 2` the algebra is `F_2[z1^2, z2^2, z3, z4, ...]` with
//! `wt(z_m) = 2^{m-1}` and `M1(k)` the span of monomials of weight `2k`. At an
//! odd prime it is `F_p[z1, z2, ...] (x) E(tau2, tau3, ...)` with
//! `wt(z_m) = wt(tau_m) = p^m` and `M1(k)` the weight `pk` piece.
//!
//! The primitives act as derivations:
//!
//! - `p = 2`: `Q0(z_m) = z_{m-1}^2`, `Q1(z_m) = z_{m-2}^4` for `m >= 3`, and
//!   both kill `z1^2` and `z2^2`.
//! - odd `p`: `Q_i(tau_m) = z_{m-i}^{p^i}`, `Q_i(z_m) = 0`, with a Koszul sign
//!   `(-1)^s` when passing `s` exterior generators.
//!
//! Internal degrees are `|z_m| = 2^m - 1` at `p = 2`, and `|z_m| = 2(p^m - 1)`,
//! `|tau_m| = 2p^m - 1` at odd `p`. `Q_i` lowers degree by `2p^i - 1`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::arith::{self, Prime};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Primitive {
    Q0,
    Q1,
}

impl Primitive {
    pub fn index(self) -> u32 {
        match self {
            Primitive::Q0 => 0,
            Primitive::Q1 => 1,
        }
    }

    /// `2p^i - 1`
    pub fn degree(self, p: Prime) -> u64 {
        2 * p.get().pow(self.index()) - 1
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.index())
    }
}

/// A monomial `z1^{e1} z2^{e2} ... tau_{j1} tau_{j2} ...`.
///
/// `zeta[i]` is the exponent of `z_{i+1}` (trailing zeros trimmed); `tau`
/// holds strictly increasing indices `>= 2` and is empty at `p = 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SteenrodMonomial {
    zeta: Vec<u64>,
    tau: Vec<u32>,
}

impl SteenrodMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(mut zeta: Vec<u64>, mut tau: Vec<u32>) -> Self {
        while zeta.last() == Some(&0) {
            zeta.pop();
        }
        tau.sort_unstable();
        SteenrodMonomial { zeta, tau }
    }

    /// `z_m^e`
    pub fn zeta_power(m: usize, e: u64) -> Self {
        let mut zeta = vec![0; m];
        zeta[m - 1] = e;
        Self::new(zeta, Vec::new())
    }

    pub fn zeta(&self) -> &[u64] {
        &self.zeta
    }

    pub fn tau(&self) -> &[u32] {
        &self.tau
    }

    pub fn zeta_exponent(&self, m: usize) -> u64 {
        self.zeta.get(m - 1).copied().unwrap_or(0)
    }

    /// Whether this monomial lies in `(A//E(Q0,Q1))_*` at `p`.
    pub fn is_valid(&self, p: Prime) -> bool {
        let tau_ok = self.tau.windows(2).all(|w| w[0] < w[1]) && self.tau.iter().all(|&j| j >= 2);
        if p.get() == 2 {
            self.tau.is_empty() && self.zeta_exponent(1).is_multiple_of(2) && self.zeta_exponent(2).is_multiple_of(2)
        } else {
            tau_ok
        }
    }

    pub fn weight(&self, p: Prime) -> u64 {
        let unit = |m: usize| {
            if p.get() == 2 {
                1u64 << (m - 1)
            } else {
                p.get().pow(m as u32)
            }
        };
        let z: u64 = self.zeta.iter().enumerate().map(|(i, &e)| e * unit(i + 1)).sum();
        let t: u64 = self.tau.iter().map(|&j| unit(j as usize)).sum();
        z + t
    }

    pub fn degree(&self, p: Prime) -> u64 {
        let pm = |m: usize| p.get().pow(m as u32);
        if p.get() == 2 {
            self.zeta.iter().enumerate().map(|(i, &e)| e * (pm(i + 1) - 1)).sum()
        } else {
            let z: u64 = self.zeta.iter().enumerate().map(|(i, &e)| e * 2 * (pm(i + 1) - 1)).sum();
            let t: u64 = self.tau.iter().map(|&j| 2 * pm(j as usize) - 1).sum();
            z + t
        }
    }

    fn times_zeta_power(&self, m: usize, e: u64) -> Self {
        let mut zeta = self.zeta.clone();
        if zeta.len() < m {
            zeta.resize(m, 0);
        }
        zeta[m - 1] += e;
        Self::new(zeta, self.tau.clone())
    }
}

impl fmt::Display for SteenrodMonomial {
    /// `z1^4 z3 tau2`, or `1` for the unit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if first {
                first = false;
                Ok(())
            } else {
                f.write_str(" ")
            }
        };
        for (i, &e) in self.zeta.iter().enumerate() {
            match e {
                0 => {}
                1 => {
                    sep(f)?;
                    write!(f, "z{}", i + 1)?;
                }
                _ => {
                    sep(f)?;
                    write!(f, "z{}^{}", i + 1, e)?;
                }
            }
        }
        for &j in &self.tau {
            sep(f)?;
            write!(f, "tau{j}")?;
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl FromStr for SteenrodMonomial {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        let s = s.trim();
        if s == "1" {
            return Ok(Self::one());
        }
        let mut zeta: BTreeMap<usize, u64> = BTreeMap::new();
        let mut tau = Vec::new();
        for tok in s.split_whitespace() {
            let bad = || alloc::format!("bad monomial factor `{tok}`");
            if let Some(idx) = tok.strip_prefix("tau") {
                let j: u32 = idx.parse().map_err(|_| bad())?;
                if tau.contains(&j) {
                    return Err(alloc::format!("tau{j} repeated"));
                }
                tau.push(j);
            } else if let Some(rest) = tok.strip_prefix('z') {
                let (idx, exp) = match rest.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u64>().map_err(|_| bad())?),
                    None => (rest, 1),
                };
                let m: usize = idx.parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(bad());
                }
                *zeta.entry(m).or_insert(0) += exp;
            } else {
                return Err(bad());
            }
        }
        let len = zeta.keys().next_back().copied().unwrap_or(0);
        let mut z = vec![0; len];
        for (m, e) in zeta {
            z[m - 1] = e;
        }
        Ok(Self::new(z, tau))
    }
}

/// An F_p-linear combination: sorted by monomial, nonzero coefficients in
/// `1..p`.
pub type Combination = Vec<(u64, SteenrodMonomial)>;

fn normalize(p: Prime, terms: Vec<(u64, SteenrodMonomial)>) -> Combination {
    let mut acc: BTreeMap<SteenrodMonomial, u64> = BTreeMap::new();
    for (c, m) in terms {
        let slot = acc.entry(m).or_insert(0);
        *slot = (*slot + c) % p.get();
    }
    acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (c, m)).collect()
}

/// `Q_i(m)` as a combination of monomials of the same weight.
pub fn apply_q(p: Prime, q: Primitive, m: &SteenrodMonomial) -> Combination {
    let mut out = Vec::new();
    if p.get() == 2 {
        let shift = q.index() as usize + 1;
        let power = 2u64 << q.index();
        for (i, &e) in m.zeta.iter().enumerate() {
            let index = i + 1;
            // d(z^e) = e z^{e-1} dz, and dz1^2 = dz2^2 = 0.
            if e % 2 == 0 || index <= shift || index <= 2 {
                continue;
            }
            let mut zeta = m.zeta.clone();
            zeta[i] -= 1;
            let base = SteenrodMonomial::new(zeta, Vec::new());
            out.push((1, base.times_zeta_power(index - shift, power)));
        }
    } else {
        let power = p.get().pow(q.index());
        for (s, &j) in m.tau.iter().enumerate() {
            let target = j as usize - q.index() as usize;
            let mut tau = m.tau.clone();
            tau.remove(s);
            let base = SteenrodMonomial::new(m.zeta.clone(), tau);
            let sign = if s % 2 == 0 { 1 } else { p.get() - 1 };
            out.push((sign, base.times_zeta_power(target, power)));
        }
    }
    normalize(p, out)
}

/// Sparse matrix of a primitive on a basis: column `i` lists
/// `(row index, coefficient)` of the image of basis element `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Differential {
    pub primitive: Primitive,
    pub columns: Vec<Vec<(usize, u64)>>,
}

/// The monomial basis of `M1(k)` with both differentials.
#[derive(Clone, Debug)]
pub struct M1Complex {
    prime: Prime,
    k: u64,
    basis: Vec<SteenrodMonomial>,
    degrees: Vec<u64>,
    q0: Differential,
    q1: Differential,
}

/// Weight of the piece `M1(k)`: `2k` at `p = 2`, `pk` otherwise.
pub fn m1_weight(p: Prime, k: u64) -> u64 {
    if p.get() == 2 {
        2 * k
    } else {
        p.get() * k
    }
}

struct Generator {
    zeta: Option<usize>,
    tau: Option<u32>,
    step: u64,
    weight: u64,
    max_uses: u64,
}

fn generators(p: Prime, target: u64) -> Vec<Generator> {
    let mut gens = Vec::new();
    let mut m = 1usize;
    loop {
        let unit = if p.get() == 2 { 1u64 << (m - 1) } else { p.get().pow(m as u32) };
        if unit > target {
            break;
        }
        let step = if p.get() == 2 && m <= 2 { 2 } else { 1 };
        gens.push(Generator {
            zeta: Some(m),
            tau: None,
            step,
            weight: unit * step,
            max_uses: u64::MAX,
        });
        if p.get() != 2 && m >= 2 {
            gens.push(Generator {
                zeta: None,
                tau: Some(m as u32),
                step: 1,
                weight: unit,
                max_uses: 1,
            });
        }
        m += 1;
    }
    gens
}

/// All monomials of `M1(k)`, ordered by internal degree and then by exponent
/// vector, with `Q0` and `Q1` assembled on that basis.
pub fn enumerate_m1(p: Prime, k: u64, budget: u64) -> Result<M1Complex> {
    let target = m1_weight(p, k);
    let gens = generators(p, target);
    let mut found: Vec<SteenrodMonomial> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn walk(
        gens: &[Generator],
        i: usize,
        remaining: u64,
        zeta: &mut Vec<u64>,
        tau: &mut Vec<u32>,
        found: &mut Vec<SteenrodMonomial>,
        budget: u64,
    ) -> Result<()> {
        if remaining == 0 {
            if found.len() as u64 >= budget {
                return Err(Error::Budget {
                    what: "M1(k) monomials",
                    required: found.len() as u128 + 1,
                    limit: budget as u128,
                });
            }
            found.push(SteenrodMonomial::new(zeta.clone(), tau.clone()));
            return Ok(());
        }
        let Some(g) = gens.get(i) else {
            return Ok(());
        };
        let max = (remaining / g.weight).min(g.max_uses);
        for uses in (0..=max).rev() {
            if let Some(m) = g.zeta {
                zeta[m - 1] = uses * g.step;
            }
            if uses == 1 {
                if let Some(j) = g.tau {
                    tau.push(j);
                }
            }
            walk(gens, i + 1, remaining - uses * g.weight, zeta, tau, found, budget)?;
            if uses == 1 && g.tau.is_some() {
                tau.pop();
            }
            if let Some(m) = g.zeta {
                zeta[m - 1] = 0;
            }
        }
        Ok(())
    }

    let zlen = gens.iter().filter_map(|g| g.zeta).max().unwrap_or(0);
    let mut zeta = vec![0; zlen];
    let mut tau = Vec::new();
    walk(&gens, 0, target, &mut zeta, &mut tau, &mut found, budget)?;

    found.sort_by(|a, b| a.degree(p).cmp(&b.degree(p)).then_with(|| a.cmp(b)));
    let degrees = found.iter().map(|m| m.degree(p)).collect();
    let index: BTreeMap<&SteenrodMonomial, usize> =
        found.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let assemble = |q: Primitive| -> Result<Differential> {
        let mut columns = Vec::with_capacity(found.len());
        for m in &found {
            let mut col = Vec::new();
            for (c, image) in apply_q(p, q, m) {
                let row = *index.get(&image).ok_or_else(|| {
                    Error::Inconsistent(alloc::format!("{q}({m}) = {image} left M1({k})"))
                })?;
                col.push((row, c));
            }
            columns.push(col);
        }
        Ok(Differential { primitive: q, columns })
    };
    let q0 = assemble(Primitive::Q0)?;
    let q1 = assemble(Primitive::Q1)?;
    Ok(M1Complex {
        prime: p,
        k,
        basis: found,
        degrees,
        q0,
        q1,
    })
}

impl M1Complex {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn basis(&self) -> &[SteenrodMonomial] {
        &self.basis
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn differential(&self, q: Primitive) -> &Differential {
        match q {
            Primitive::Q0 => &self.q0,
            Primitive::Q1 => &self.q1,
        }
    }

    /// Whether `q` composed with itself vanishes on every basis element.
    pub fn squares_to_zero(&self, q: Primitive) -> bool {
        let d = self.differential(q);
        let p = self.prime.get();
        d.columns.iter().all(|col| {
            let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
            for &(mid, c) in col {
                for &(row, c2) in &d.columns[mid] {
                    let slot = acc.entry(row).or_insert(0);
                    *slot = (*slot + c * c2) % p;
                }
            }
            acc.values().all(|&c| c == 0)
        })
    }

    fn indices_in_degree(&self, d: u64) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| self.degrees[i] == d).collect()
    }
}

/// Row echelon span over F_p, kept reduced so membership is a single pass.
struct Span {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Span {
    fn new(p: u64) -> Self {
        Span { p, rows: Vec::new() }
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + (self.p - c) * r) % self.p;
                }
            }
        }
        v
    }

    /// Adds `v` if independent; returns whether it was.
    fn insert(&mut self, v: &[u64]) -> bool {
        let mut v = self.reduce(v);
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = arith::mod_inverse(v[pivot], self.p).expect("p is prime");
        for x in v.iter_mut() {
            *x = *x * inv % self.p;
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = (*x + (self.p - c) * r) % self.p;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Kernel of `x -> x A` for the rows of `a` (each of length `cols`).
fn left_kernel(p: u64, a: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut rows: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..n).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = arith::mod_inverse(rows[rank][col], p).expect("p is prime");
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let c = row[col];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - c) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rows[rank..].iter().map(|r| r[cols..].to_vec()).collect()
}

/// Homology of one primitive in one internal degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub degree: u64,
    pub dimension: usize,
    /// One representative cycle per basis class. A single monomial is used
    /// whenever one represents a new class (first in basis order); otherwise
    /// the cycle is reduced against the boundaries and made monic.
    pub generators: Vec<Combination>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MargolisHomology {
    pub primitive: Primitive,
    /// Nonzero groups only, by increasing degree.
    pub groups: Vec<HomologyGroup>,
}

impl MargolisHomology {
    pub fn total_dimension(&self) -> usize {
        self.groups.iter().map(|g| g.dimension).sum()
    }

    /// The generator when the homology is one-dimensional.
    pub fn sole_generator(&self) -> Option<&Combination> {
        match self.groups.as_slice() {
            [g] if g.dimension == 1 => g.generators.first(),
            _ => None,
        }
    }
}

pub fn margolis_homology(c: &M1Complex, q: Primitive) -> MargolisHomology {
    let p = c.prime.get();
    let shift = q.degree(c.prime);
    let d = c.differential(q);
    let mut degrees: Vec<u64> = c.degrees.clone();
    degrees.dedup();
    let mut groups = Vec::new();
    for &deg in &degrees {
        let here = c.indices_in_degree(deg);
        let pos: BTreeMap<usize, usize> = here.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let below = deg.checked_sub(shift).map(|b| c.indices_in_degree(b)).unwrap_or_default();
        let below_pos: BTreeMap<usize, usize> =
            below.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let above = c.indices_in_degree(deg + shift);

        let outgoing: Vec<Vec<u64>> = here
            .iter()
            .map(|&i| {
                let mut row = vec![0; below.len()];
                for &(r, coef) in &d.columns[i] {
                    row[below_pos[&r]] = coef;
                }
                row
            })
            .collect();
        let kernel = left_kernel(p, &outgoing, below.len());

        let mut span = Span::new(p);
        for &i in &above {
            let mut v = vec![0; here.len()];
            for &(r, coef) in &d.columns[i] {
                v[pos[&r]] = coef;
            }
            span.insert(&v);
        }
        let boundaries = Span {
            p,
            rows: span.rows.clone(),
        };
        let dimension = kernel.len() - span.dim();
        if dimension == 0 {
            continue;
        }

        let mut reps: Vec<Vec<u64>> = Vec::new();
        for (a, &i) in here.iter().enumerate() {
            if reps.len() == dimension {
                break;
            }
            if !d.columns[i].is_empty() {
                continue;
            }
            let mut e = vec![0; here.len()];
            e[a] = 1;
            if span.insert(&e) {
                reps.push(e);
            }
        }
        for v in &kernel {
            if reps.len() == dimension {
                break;
            }
            if span.insert(v) {
                let mut r = boundaries.reduce(v);
                let lead = r.iter().position(|&x| x != 0).expect("not a boundary");
                let inv = arith::mod_inverse(r[lead], p).expect("p is prime");
                for x in r.iter_mut() {
                    *x = *x * inv % p;
                }
                reps.push(r);
            }
        }
        let generators = reps
            .into_iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(a, &x)| (x, c.basis[here[a]].clone()))
                    .collect()
            })
            .collect();
        groups.push(HomologyGroup {
            degree: deg,
            dimension,
            generators,
        });
    }
    MargolisHomology { primitive: q, groups }
}

/// `(k - alpha_p(k)) / (p - 1)`
pub fn cover_rank(p: Prime, k: u64) -> u64 {
    arith::legendre_valuation_factorial(p, k)
}

/// The `Q0` homology class of `M1(k)`: `z1^{2k}` at `p = 2`, `z1^k` otherwise.
pub fn expected_q0_generator(p: Prime, k: u64) -> SteenrodMonomial {
    if k == 0 {
        return SteenrodMonomial::one();
    }
    let e = if p.get() == 2 { 2 * k } else { k };
    SteenrodMonomial::zeta_power(1, e)
}

/// The `Q1` homology class of `M1(k)`: `prod z_{i+1}^{2 k_i}` over the binary
/// digits at `p = 2`, `prod z_{i+1}^{k_i}` over the base-`p` digits otherwise.
pub fn expected_q1_generator(p: Prime, k: u64) -> SteenrodMonomial {
    let scale = if p.get() == 2 { 2 } else { 1 };
    let zeta = arith::digits(p, k).into_iter().map(|d| d * scale).collect();
    SteenrodMonomial::new(zeta, Vec::new())
}

/// Number of monomials of internal degree `d` in the whole algebra, counted
/// by generator degrees alone (no weights).
pub fn algebra_dimension(p: Prime, d: u64) -> u64 {
    let d = d as usize;
    let mut counts = vec![0u64; d + 1];
    counts[0] = 1;
    let poly_gen = |counts: &mut Vec<u64>, deg: usize| {
        for x in deg..=d {
            counts[x] += counts[x - deg];
        }
    };
    let mut m = 1u32;
    loop {
        let pm = p.get().pow(m) as usize;
        if p.get() == 2 {
            let deg = pm - 1;
            let deg = if m <= 2 { 2 * deg } else { deg };
            if deg > d {
                break;
            }
            poly_gen(&mut counts, deg);
        } else {
            let zdeg = 2 * (pm - 1);
            if zdeg > d {
                break;
            }
            poly_gen(&mut counts, zdeg);
            let tdeg = 2 * pm - 1;
            if m >= 2 && tdeg <= d {
                for x in (tdeg..=d).rev() {
                    counts[x] += counts[x - tdeg];
                }
            }
        }
        m += 1;
    }
    counts[d]
}
