//! Reaction networks, the text grammar, canonical forms and the mass-action
//! vector field.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Q;

/// A complex: nonnegative integer coefficients over the species.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Complex {
    coeffs: Vec<i64>,
}

impl Complex {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.iter().any(|&c| c < 0) {
            return Err(Error::InvalidNetwork("complex with negative coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![0; n] }
    }

    /// Complex `k * X_i` over `n` species.
    pub fn species(n: usize, i: usize, k: i64) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[i] = k;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn molecularity(&self) -> i64 {
        self.coeffs.iter().sum()
    }
}

/// A rate constant, kept exact when it was given as a rational.
#[derive(Debug, Clone, PartialEq)]
pub enum Rate {
    Exact(Q),
    Approx(f64),
}

impl Rate {
    pub fn from_int(k: i64) -> Self {
        Rate::Exact(Q::from_integer(BigInt::from(k)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rate::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Rate::Approx(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Rate::Exact(_))
    }

    /// Exact value; floats convert to their binary rational value.
    pub fn to_exact(&self) -> Option<Q> {
        match self {
            Rate::Exact(q) => Some(q.clone()),
            Rate::Approx(v) => Q::from_float(*v),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Rate::Exact(q) => q.is_positive(),
            Rate::Approx(v) => *v > 0.0,
        }
    }

    pub fn scaled(&self, k: i64) -> Rate {
        match self {
            Rate::Exact(q) => Rate::Exact(q * Q::from_integer(BigInt::from(k))),
            Rate::Approx(v) => Rate::Approx(v * k as f64),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Exact(q) => write!(f, "{}", q),
            Rate::Approx(v) => write!(f, "{:e}", v),
        }
    }
}

/// Reaction network given by its source matrix and stoichiometric matrix.
///
/// Both matrices are stored row-major with one row per species.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReactionNetwork {
    species: Vec<String>,
    n_reactions: usize,
    source: Vec<Vec<i64>>,
    stoich: Vec<Vec<i64>>,
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, source: Vec<Vec<i64>>, stoich: Vec<Vec<i64>>) -> Result<Self> {
        let n = species.len();
        if source.len() != n || stoich.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: source.len().min(stoich.len()),
            });
        }
        let m = source.first().map_or(0, |r| r.len());
        for (s, c) in source.iter().zip(&stoich) {
            if s.len() != m || c.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: s.len().min(c.len()) });
            }
        }
        Self::from_parts(species, m, source, stoich)
    }

    /// Builds a network from explicit (source, target) complexes.
    pub fn from_complexes(species: Vec<String>, reactions: &[(Complex, Complex)]) -> Result<Self> {
        let n = species.len();
        let m = reactions.len();
        let mut source = vec![vec![0; m]; n];
        let mut stoich = vec![vec![0; m]; n];
        for (j, (s, t)) in reactions.iter().enumerate() {
            if s.coeffs.len() != n || t.coeffs.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.coeffs.len() });
            }
            for i in 0..n {
                source[i][j] = s.coeffs[i];
                stoich[i][j] = t.coeffs[i] - s.coeffs[i];
            }
        }
        Self::from_parts(species, m, source, stoich)
    }

    /// Builds a network from integer columns: `reactions[j] = (source_j, target_j)`.
    pub fn from_columns(species: &[&str], reactions: &[(&[i64], &[i64])]) -> Result<Self> {
        let cx: Result<Vec<(Complex, Complex)>> = reactions
            .iter()
            .map(|(s, t)| Ok((Complex::new(s.to_vec())?, Complex::new(t.to_vec())?)))
            .collect();
        Self::from_complexes(species.iter().map(|s| s.to_string()).collect(), &cx?)
    }

    fn from_parts(species: Vec<String>, m: usize, source: Vec<Vec<i64>>, stoich: Vec<Vec<i64>>) -> Result<Self> {
        let n = species.len();
        for i in 0..n {
            if species[..i].contains(&species[i]) {
                return Err(Error::InvalidNetwork(format!("duplicate species {}", species[i])));
            }
        }
        for j in 0..m {
            for i in 0..n {
                if source[i][j] < 0 {
                    return Err(Error::InvalidNetwork(format!("negative source coefficient in reaction {}", j)));
                }
                if source[i][j] + stoich[i][j] < 0 {
                    return Err(Error::NegativeTargetCoefficient { reaction: j, species: species[i].clone() });
                }
            }
            if (0..n).all(|i| stoich[i][j] == 0) {
                return Err(Error::EmptyReaction(j));
            }
        }
        Ok(Self { species, n_reactions: m, source, stoich })
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_reactions(&self) -> usize {
        self.n_reactions
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    /// Source matrix rows (one per species).
    pub fn source_matrix(&self) -> &[Vec<i64>] {
        &self.source
    }

    /// Stoichiometric matrix rows (one per species).
    pub fn stoich_matrix(&self) -> &[Vec<i64>] {
        &self.stoich
    }

    pub fn source_entry(&self, i: usize, j: usize) -> i64 {
        self.source[i][j]
    }

    pub fn stoich_entry(&self, i: usize, j: usize) -> i64 {
        self.stoich[i][j]
    }

    pub fn source(&self, j: usize) -> Complex {
        Complex { coeffs: self.source.iter().map(|r| r[j]).collect() }
    }

    pub fn target(&self, j: usize) -> Complex {
        Complex { coeffs: (0..self.n_species()).map(|i| self.source[i][j] + self.stoich[i][j]).collect() }
    }

    pub fn reaction_vector(&self, j: usize) -> Vec<i64> {
        self.stoich.iter().map(|r| r[j]).collect()
    }

    /// Pairs of reaction indices with identical source and target.
    pub fn duplicate_reactions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.n_reactions {
            for k in j + 1..self.n_reactions {
                if self.source(j) == self.source(k) && self.target(j) == self.target(k) {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Maximal source and target molecularities.
    pub fn molecularity_profile(&self) -> (i64, i64) {
        let mut ms = 0;
        let mut mt = 0;
        for j in 0..self.n_reactions {
            ms = ms.max(self.source(j).molecularity());
            mt = mt.max(self.target(j).molecularity());
        }
        (ms, mt)
    }

    pub fn is_quadratic(&self) -> bool {
        self.molecularity_profile().0 <= 2
    }

    pub fn is_trimolecular(&self) -> bool {
        let (s, t) = self.molecularity_profile();
        s.max(t) <= 3
    }

    /// Species whose row of the stoichiometric matrix vanishes.
    pub fn trivial_species(&self) -> Vec<usize> {
        (0..self.n_species()).filter(|&i| self.stoich[i].iter().all(|&c| c == 0)).collect()
    }

    /// Removes trivial species and any reaction left without a net change.
    pub fn drop_trivial_species(&self) -> ReactionNetwork {
        let trivial = self.trivial_species();
        let keep: Vec<usize> = (0..self.n_species()).filter(|i| !trivial.contains(i)).collect();
        let reactions: Vec<usize> =
            (0..self.n_reactions).filter(|&j| keep.iter().any(|&i| self.stoich[i][j] != 0)).collect();
        ReactionNetwork {
            species: keep.iter().map(|&i| self.species[i].clone()).collect(),
            n_reactions: reactions.len(),
            source: keep.iter().map(|&i| reactions.iter().map(|&j| self.source[i][j]).collect()).collect(),
            stoich: keep.iter().map(|&i| reactions.iter().map(|&j| self.stoich[i][j]).collect()).collect(),
        }
    }

    /// Relabels species: new species `i` is old species `perm[i]`.
    pub fn permute_species(&self, perm: &[usize]) -> ReactionNetwork {
        ReactionNetwork {
            species: perm.iter().map(|&p| self.species[p].clone()).collect(),
            n_reactions: self.n_reactions,
            source: perm.iter().map(|&p| self.source[p].clone()).collect(),
            stoich: perm.iter().map(|&p| self.stoich[p].clone()).collect(),
        }
    }

    /// Reorders reactions: new reaction `j` is old reaction `order[j]`.
    pub fn permute_reactions(&self, order: &[usize]) -> ReactionNetwork {
        ReactionNetwork {
            species: self.species.clone(),
            n_reactions: order.len(),
            source: self.source.iter().map(|r| order.iter().map(|&j| r[j]).collect()).collect(),
            stoich: self.stoich.iter().map(|r| order.iter().map(|&j| r[j]).collect()).collect(),
        }
    }

    pub fn with_species_names(&self, names: Vec<String>) -> Result<ReactionNetwork> {
        Self::from_parts(names, self.n_reactions, self.source.clone(), self.stoich.clone())
    }

    /// Integer key for the network under a species permutation, with the
    /// reaction columns sorted.
    fn encoding_under(&self, perm: &[usize]) -> Vec<i64> {
        let mut cols: Vec<Vec<i64>> = (0..self.n_reactions)
            .map(|j| {
                let mut c = Vec::with_capacity(2 * perm.len());
                c.extend(perm.iter().map(|&p| self.source[p][j]));
                c.extend(perm.iter().map(|&p| self.source[p][j] + self.stoich[p][j]));
                c
            })
            .collect();
        cols.sort();
        let mut key = Vec::with_capacity(2 + cols.len() * 2 * perm.len());
        key.push(perm.len() as i64);
        key.push(self.n_reactions as i64);
        for c in cols {
            key.extend(c);
        }
        key
    }

    /// Lexicographically least encoding over all relabelings of species and reactions.
    pub fn canonical_key(&self) -> Vec<i64> {
        self.canonical_permutation().1
    }

    fn canonical_permutation(&self) -> (Vec<usize>, Vec<i64>) {
        let n = self.n_species();
        let mut best_perm: Vec<usize> = (0..n).collect();
        let mut best = self.encoding_under(&best_perm);
        for_each_permutation(n, |p| {
            let e = self.encoding_under(p);
            if e < best {
                best = e;
                best_perm = p.to_vec();
            }
        });
        (best_perm, best)
    }

    /// Canonical representative: least encoding, standard species names.
    pub fn canonical_form(&self) -> ReactionNetwork {
        let (perm, _) = self.canonical_permutation();
        let p = self.permute_species(&perm);
        let mut cols: Vec<(Vec<i64>, usize)> = (0..p.n_reactions)
            .map(|j| {
                let mut c = p.source(j).coeffs;
                c.extend(p.target(j).coeffs);
                (c, j)
            })
            .collect();
        cols.sort();
        let order: Vec<usize> = cols.into_iter().map(|(_, j)| j).collect();
        let mut out = p.permute_reactions(&order);
        out.species = standard_names(out.n_species());
        out
    }

    /// Renders the network in the text grammar.
    pub fn render(&self) -> String {
        (0..self.n_reactions)
            .map(|j| format!("{} -> {}", self.render_complex(&self.source(j)), self.render_complex(&self.target(j))))
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn render_complex(&self, c: &Complex) -> String {
        let terms: Vec<String> = c
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, &k)| if k == 1 { self.species[i].clone() } else { format!("{}{}", k, self.species[i]) })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

impl fmt::Display for ReactionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Species names used by canonical forms.
pub fn standard_names(n: usize) -> Vec<String> {
    const BASE: [&str; 8] = ["X", "Y", "Z", "W", "V", "U", "T", "S"];
    (0..n).map(|i| if i < BASE.len() { BASE[i].to_string() } else { format!("X{}", i + 1) }).collect()
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut f: F) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&p);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Network together with positive rate constants.
#[derive(Debug, Clone, PartialEq)]
pub struct MassActionSystem {
    network: ReactionNetwork,
    rates: Vec<Rate>,
}

impl MassActionSystem {
    pub fn new(network: ReactionNetwork, rates: Vec<Rate>) -> Result<Self> {
        if rates.len() != network.n_reactions() {
            return Err(Error::DimensionMismatch { expected: network.n_reactions(), got: rates.len() });
        }
        if let Some(j) = rates.iter().position(|r| !r.is_positive()) {
            return Err(Error::NonPositiveRate(j));
        }
        Ok(Self { network, rates })
    }

    pub fn from_f64(network: ReactionNetwork, kappa: &[f64]) -> Result<Self> {
        Self::new(network, kappa.iter().map(|&k| Rate::Approx(k)).collect())
    }

    /// Rates given as integer ratios `(p, q)`.
    pub fn from_ratios(network: ReactionNetwork, kappa: &[(i64, i64)]) -> Result<Self> {
        let rates = kappa
            .iter()
            .map(|&(p, q)| {
                if q == 0 {
                    Err(Error::NonPositiveRate(0))
                } else {
                    Ok(Rate::Exact(Q::new(BigInt::from(p), BigInt::from(q))))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(network, rates)
    }

    /// All rate constants equal to one.
    pub fn unit(network: ReactionNetwork) -> Self {
        let m = network.n_reactions();
        Self { network, rates: vec![Rate::from_int(1); m] }
    }

    pub fn network(&self) -> &ReactionNetwork {
        &self.network
    }

    pub fn rates(&self) -> &[Rate] {
        &self.rates
    }

    pub fn kappa(&self) -> Vec<f64> {
        self.rates.iter().map(Rate::to_f64).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.rates.iter().all(Rate::is_exact)
    }

    pub fn with_rates(&self, rates: Vec<Rate>) -> Result<Self> {
        Self::new(self.network.clone(), rates)
    }

    pub fn with_kappa(&self, kappa: &[f64]) -> Result<Self> {
        Self::from_f64(self.network.clone(), kappa)
    }

    pub fn permute_species(&self, perm: &[usize]) -> Self {
        Self { network: self.network.permute_species(perm), rates: self.rates.clone() }
    }

    /// Reaction rates `κ_j x^{a_j}`.
    pub fn reaction_rates(&self, x: &[f64], out: &mut [f64]) {
        let net = &self.network;
        for (j, o) in out.iter_mut().enumerate().take(net.n_reactions()) {
            let mut v = self.rates[j].to_f64();
            for (i, &xi) in x.iter().enumerate() {
                v *= powi(xi, net.source[i][j]);
            }
            *o = v;
        }
    }

    /// Mass-action right-hand side in floating point.
    pub fn rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.network.n_species() {
            return Err(Error::DimensionMismatch { expected: self.network.n_species(), got: x.len() });
        }
        let mut out = vec![0.0; x.len()];
        let kappa = self.kappa();
        rhs_with(&self.network, &kappa, x, &mut out);
        Ok(out)
    }

    /// Mass-action right-hand side in exact arithmetic.
    pub fn rhs_exact(&self, x: &[Q]) -> Result<Vec<Q>> {
        let net = &self.network;
        if x.len() != net.n_species() {
            return Err(Error::DimensionMismatch { expected: net.n_species(), got: x.len() });
        }
        if !self.is_exact() {
            return Err(Error::InexactRates);
        }
        let mut out = vec![Q::zero(); x.len()];
        for j in 0..net.n_reactions() {
            let mut v = match &self.rates[j] {
                Rate::Exact(q) => q.clone(),
                Rate::Approx(_) => unreachable!(),
            };
            for (i, xi) in x.iter().enumerate() {
                let e = net.source[i][j];
                if e > 0 {
                    v *= num_traits::pow::pow(xi.clone(), e as usize);
                }
            }
            for (i, o) in out.iter_mut().enumerate() {
                let c = net.stoich[i][j];
                if c != 0 {
                    *o += &v * Q::from_integer(BigInt::from(c));
                }
            }
        }
        Ok(out)
    }

    /// Renders reactions with their rate constants.
    pub fn render(&self) -> String {
        let net = &self.network;
        (0..net.n_reactions())
            .map(|j| {
                format!(
                    "{} -> {} @ {}",
                    net.render_complex(&net.source(j)),
                    net.render_complex(&net.target(j)),
                    self.rates[j]
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Evaluates `Γ(κ∘x^{Γ_l^T})` into `out`.
pub fn rhs_with(net: &ReactionNetwork, kappa: &[f64], x: &[f64], out: &mut [f64]) {
    for o in out.iter_mut() {
        *o = 0.0;
    }
    for (j, &k) in kappa.iter().enumerate() {
        let mut v = k;
        for (i, &xi) in x.iter().enumerate() {
            v *= powi(xi, net.source[i][j]);
        }
        for (i, o) in out.iter_mut().enumerate() {
            let c = net.stoich[i][j];
            if c != 0 {
                *o += c as f64 * v;
            }
        }
    }
}

/// Integer power with `0^0 = 1`.
#[inline]
pub fn powi(x: f64, e: i64) -> f64 {
    let mut r = 1.0;
    for _ in 0..e {
        r *= x;
    }
    r
}

// ---------------------------------------------------------------------------
// Text grammar

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    _src: &'a str,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Arrow,
    At,
    Slash,
    Sep,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { chars: src.chars().collect(), pos: 0, line: 1, col: 1, _src: src }
    }

    fn err<T>(&self, line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line, column: col, message: msg.into() })
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>> {
        let mut out = Vec::new();
        loop {
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push((Tok::End, line, col));
                return Ok(out);
            };
            match c {
                '#' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '\n' | ';' => {
                    self.bump();
                    out.push((Tok::Sep, line, col));
                }
                c if c.is_whitespace() => {
                    self.bump();
                }
                '+' => {
                    self.bump();
                    out.push((Tok::Plus, line, col));
                }
                '@' => {
                    self.bump();
                    out.push((Tok::At, line, col));
                }
                '/' => {
                    self.bump();
                    out.push((Tok::Slash, line, col));
                }
                '-' => {
                    self.bump();
                    if self.peek() == Some('>') {
                        self.bump();
                        out.push((Tok::Arrow, line, col));
                    } else {
                        out.push((Tok::Minus, line, col));
                    }
                }
                c if c.is_ascii_digit() || c == '.' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() || c == '.' {
                            s.push(c);
                            self.bump();
                        } else if (c == 'e' || c == 'E') && self.is_exponent() {
                            s.push(c);
                            self.bump();
                            if let Some(sign @ ('+' | '-')) = self.peek() {
                                s.push(sign);
                                self.bump();
                            }
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Number(s), line, col));
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_alphanumeric() || c == '_' || c == '\'' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Ident(s), line, col));
                }
                other => return self.err(line, col, format!("unexpected character '{}'", other)),
            }
        }
    }

    /// True when an `e` at the cursor starts a numeric exponent (not a species name).
    fn is_exponent(&self) -> bool {
        let next = self.chars.get(self.pos + 1).copied();
        let next2 = self.chars.get(self.pos + 2).copied();
        match next {
            Some(d) if d.is_ascii_digit() => {
                // "2e3" is a number, but "2e3X" would be odd either way; accept digits
                true
            }
            Some('+') | Some('-') => matches!(next2, Some(d) if d.is_ascii_digit()),
            _ => false,
        }
    }
}

/// Parses a decimal or scientific literal into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Q> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(k) => (&mant[..k], &mant[k + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let num: BigInt = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Q::from_integer(num * num_traits::pow::pow(ten, scale as usize))
    } else {
        Q::new(num, num_traits::pow::pow(ten, (-scale) as usize))
    })
}

/// Parses a rational literal `p`, `p/q`, or a decimal.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b.trim()),
        None => (false, s.strip_prefix('+').unwrap_or(s).trim()),
    };
    let v = match body.find('/') {
        Some(k) => {
            let p = parse_decimal(body[..k].trim())?;
            let q = parse_decimal(body[k + 1..].trim())?;
            if q.is_zero() {
                return None;
            }
            p / q
        }
        None => parse_decimal(body)?,
    };
    Some(if neg { -v } else { v })
}

struct RawReaction {
    source: Vec<(String, i64)>,
    target: Vec<(String, i64)>,
    rate: Option<Rate>,
    line: usize,
    col: usize,
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Parse { line, column, message: msg.into() })
    }

    fn reactions(&mut self) -> Result<Vec<RawReaction>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Tok::End => return Ok(out),
                Tok::Sep => {
                    self.next();
                }
                _ => {
                    out.push(self.reaction()?);
                    match self.peek() {
                        Tok::Sep | Tok::End => {}
                        t => return self.err(format!("expected ';' or end of line, found {:?}", t)),
                    }
                }
            }
        }
    }

    fn reaction(&mut self) -> Result<RawReaction> {
        let (line, col) = self.here();
        let source = self.complex()?;
        if self.next() != Tok::Arrow {
            self.pos -= 1;
            return self.err("expected '->'");
        }
        let target = self.complex()?;
        let rate = if *self.peek() == Tok::At {
            self.next();
            Some(self.rate()?)
        } else {
            None
        };
        Ok(RawReaction { source, target, rate, line, col })
    }

    fn signed_integer(&mut self) -> Result<Option<i64>> {
        let neg = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Number(s) => {
                let v: i64 = match s.parse() {
                    Ok(v) => v,
                    Err(_) => return self.err(format!("expected integer coefficient, found '{}'", s)),
                };
                self.next();
                Ok(Some(if neg { -v } else { v }))
            }
            _ if neg => Ok(Some(-1)),
            _ => Ok(None),
        }
    }

    fn complex(&mut self) -> Result<Vec<(String, i64)>> {
        let mut terms = Vec::new();
        // a lone "0" denotes the empty complex
        if let Tok::Number(s) = self.peek() {
            if s == "0" && !matches!(self.toks[self.pos + 1].0, Tok::Ident(_)) {
                self.next();
                return Ok(terms);
            }
        }
        loop {
            let coeff = self.signed_integer()?.unwrap_or(1);
            match self.next() {
                Tok::Ident(name) => terms.push((name, coeff)),
                _ => {
                    self.pos -= 1;
                    return self.err("expected species name");
                }
            }
            if *self.peek() == Tok::Plus {
                self.next();
            } else {
                return Ok(terms);
            }
        }
    }

    fn rate(&mut self) -> Result<Rate> {
        let mut text = String::new();
        let (line, column) = self.here();
        loop {
            match self.peek().clone() {
                Tok::Number(s) => text.push_str(&s),
                Tok::Minus => text.push('-'),
                Tok::Plus => text.push('+'),
                Tok::Slash => text.push('/'),
                _ => break,
            }
            self.next();
        }
        match parse_rational(&text) {
            Some(q) => Ok(Rate::Exact(q)),
            None => Err(Error::Parse { line, column, message: format!("invalid rate constant '{}'", text) }),
        }
    }
}

fn parse_raw(text: &str) -> Result<(ReactionNetwork, Vec<Option<Rate>>)> {
    let toks = Lexer::new(text).tokens()?;
    let raw = Parser { toks, pos: 0 }.reactions()?;
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut species: Vec<String> = Vec::new();
    for r in &raw {
        for (name, _) in r.source.iter().chain(&r.target) {
            if !index.contains_key(name) {
                index.insert(name.clone(), species.len());
                species.push(name.clone());
            }
        }
    }
    let n = species.len();
    let mut reactions = Vec::with_capacity(raw.len());
    let mut rates = Vec::with_capacity(raw.len());
    for (j, r) in raw.iter().enumerate() {
        let mut s = vec![0i64; n];
        let mut t = vec![0i64; n];
        for (name, k) in &r.source {
            s[index[name]] += k;
        }
        for (name, k) in &r.target {
            t[index[name]] += k;
        }
        if let Some(i) = (0..n).find(|&i| t[i] < 0) {
            return Err(Error::NegativeTargetCoefficient { reaction: j, species: species[i].clone() });
        }
        if s.iter().any(|&v| v < 0) {
            return Err(Error::Parse {
                line: r.line,
                column: r.col,
                message: "negative source coefficient".into(),
            });
        }
        if s == t {
            return Err(Error::EmptyReaction(j));
        }
        reactions.push((Complex { coeffs: s }, Complex { coeffs: t }));
        rates.push(r.rate.clone());
    }
    Ok((ReactionNetwork::from_complexes(species, &reactions)?, rates))
}

/// Parses the network grammar; rate annotations are ignored.
pub fn parse_network(text: &str) -> Result<ReactionNetwork> {
    Ok(parse_raw(text)?.0)
}

/// Parses the network grammar with rate constants (default 1).
pub fn parse_system(text: &str) -> Result<MassActionSystem> {
    let (net, rates) = parse_raw(text)?;
    let rates = rates.into_iter().map(|r| r.unwrap_or_else(|| Rate::from_int(1))).collect();
    MassActionSystem::new(net, rates)
}

/// Converts an exact rational to the nearest float.
pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Rational from an integer.
pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Rational from a ratio of integers.
pub fn qr(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lotka() -> ReactionNetwork {
        parse_network("X -> 2X; X + Y -> 2Y; Y -> 0").unwrap()
    }

    #[test]
    fn parses_lotka() {
        let net = lotka();
        assert_eq!(net.species(), &["X".to_string(), "Y".to_string()]);
        assert_eq!(net.stoich_matrix(), &[vec![1, -1, 0], vec![0, 1, -1]]);
        assert_eq!(net.source_matrix(), &[vec![1, 1, 0], vec![0, 1, 1]]);
    }

    #[test]
    fn single_reaction() {
        let net = parse_network("2X -> 3X").unwrap();
        assert_eq!((net.n_species(), net.n_reactions()), (1, 1));
        assert_eq!(net.stoich_matrix(), &[vec![1]]);
    }

    #[test]
    fn negative_target_rejected() {
        assert!(matches!(parse_network("X -> -Y"), Err(Error::NegativeTargetCoefficient { .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_network("X -> 2X\nX + -> Y") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 5);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn no_op_reaction_rejected() {
        assert!(matches!(parse_network("X -> X"), Err(Error::EmptyReaction(0))));
    }

    #[test]
    fn duplicates_are_flagged() {
        let net = parse_network("X -> 2X; X -> 2X @ 3").unwrap();
        assert_eq!(net.duplicate_reactions(), vec![(0, 1)]);
    }

    #[test]
    fn rates_are_exact() {
        let sys = parse_system("X -> 2X @ 3/2; X -> 0 @ 0.25\nY -> X @ 1e-2").unwrap();
        assert_eq!(sys.rates()[0], Rate::Exact(qr(3, 2)));
        assert_eq!(sys.rates()[1], Rate::Exact(qr(1, 4)));
        assert_eq!(sys.rates()[2], Rate::Exact(qr(1, 100)));
        assert!(parse_system("X -> 0 @ -1").is_err());
    }

    #[test]
    fn species_names_with_digits() {
        let net = parse_network("2 A1 + B -> 3A1").unwrap();
        assert_eq!(net.species(), &["A1".to_string(), "B".to_string()]);
        assert_eq!(net.source(0).coeffs(), &[2, 1]);
    }

    #[test]
    fn empty_input() {
        let net = parse_network("  \n# nothing\n").unwrap();
        assert_eq!(net.n_reactions(), 0);
        assert_eq!(net.molecularity_profile(), (0, 0));
    }

    #[test]
    fn molecularity() {
        assert_eq!(lotka().molecularity_profile(), (2, 2));
        let tetra = parse_network("2X -> 3X + Y; X + Y -> Y; Y -> 0").unwrap();
        assert_eq!(tetra.molecularity_profile(), (2, 4));
        assert!(tetra.is_quadratic());
        assert!(!tetra.is_trimolecular());
    }

    #[test]
    fn trivial_species_detected() {
        let net = parse_network("X + Z -> 2X + Z; X + Y -> 2Y; Y -> 0").unwrap();
        assert_eq!(net.trivial_species(), vec![1]);
        let red = net.drop_trivial_species();
        assert_eq!(red.canonical_key(), lotka().canonical_key());
        assert!(lotka().trivial_species().is_empty());
        assert!(parse_network("0 -> X; 0 -> Y").unwrap().trivial_species().is_empty());
    }

    #[test]
    fn canonical_form_of_swapped_lotka() {
        let swapped = parse_network("Y -> 2Y; Y + X -> 2X; X -> 0").unwrap();
        assert_eq!(swapped.canonical_form(), lotka().canonical_form());
    }

    #[test]
    fn ivanova_rotation_invariant() {
        let iv = parse_network("X + Z -> 2X; X + Y -> 2Y; Y + Z -> 2Z").unwrap();
        let key = iv.canonical_key();
        for_each_permutation(3, |p| {
            assert_eq!(iv.permute_species(p).canonical_key(), key);
        });
    }

    #[test]
    fn heap_permutations_complete() {
        let mut seen = std::collections::BTreeSet::new();
        for_each_permutation(4, |p| {
            seen.insert(p.to_vec());
        });
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn rhs_lotka_equilibrium() {
        let sys = MassActionSystem::unit(lotka());
        assert_eq!(sys.rhs(&[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        let ex = sys.rhs_exact(&[qi(1), qi(1)]).unwrap();
        assert!(ex.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn rhs_at_origin_vanishes() {
        let sys = MassActionSystem::unit(lotka());
        assert_eq!(sys.rhs(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let src = MassActionSystem::unit(parse_network("0 -> X").unwrap());
        assert_eq!(src.rhs(&[0.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn rhs_dimension_checked() {
        let sys = MassActionSystem::unit(lotka());
        assert!(matches!(sys.rhs(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn render_round_trip() {
        for text in ["X -> 2X; X + Y -> 2Y; Y -> 0", "2X -> 4X + 3Y + Z; X + Y -> 0; Z -> X", "0 -> X"] {
            let net = parse_network(text).unwrap();
            assert_eq!(net.render(), text);
            assert_eq!(parse_network(&net.render()).unwrap(), net);
        }
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_rational("0.98"), Some(qr(49, 50)));
        assert_eq!(parse_rational("-3/6"), Some(qr(-1, 2)));
        assert_eq!(parse_rational("2.5e1"), Some(qi(25)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }
}
