//! Classical Ising-form problems and their sampled cost.
//!
//! The cost of a measured bitstring `z` is
//! `C(z) = Σ s_i z_i + Σ_{i<j} c_ij (z_i XOR z_j)`, with every unordered pair
//! counted once. Lower is better; max-cut edges therefore carry `c_ij = -1`.

mod format;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Exact, Result};

pub use format::{parse_edge_list, parse_instance, write_instance};

/// A term coefficient, kept integral when it was supplied as an integer so
/// cost estimates can be compared exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    Integer(i64),
    Real(f64),
}

impl Coefficient {
    pub fn as_f64(self) -> f64 {
        match self {
            Coefficient::Integer(v) => v as f64,
            Coefficient::Real(v) => v,
        }
    }

    pub fn as_integer(self) -> Option<i64> {
        match self {
            Coefficient::Integer(v) => Some(v),
            Coefficient::Real(_) => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self.as_f64() == 0.0
    }
}

impl From<i64> for Coefficient {
    fn from(v: i64) -> Self {
        Coefficient::Integer(v)
    }
}

impl From<f64> for Coefficient {
    fn from(v: f64) -> Self {
        Coefficient::Real(v)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Integer(v) => write!(f, "{v}"),
            // `{:?}` keeps a trailing `.0` so the value re-parses as real
            Coefficient::Real(v) => write!(f, "{v:?}"),
        }
    }
}

impl FromStr for Coefficient {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(v) = s.parse::<i64>() {
            return Ok(Coefficient::Integer(v));
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Coefficient::Real(v)),
            _ => Err(format!("`{s}` is not a finite number")),
        }
    }
}

/// Unordered qubit pair stored as `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    lo: usize,
    hi: usize,
}

impl Pair {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Ok(Pair { lo: i, hi: j }),
            std::cmp::Ordering::Greater => Ok(Pair { lo: j, hi: i }),
            std::cmp::Ordering::Equal => Err(Error::validation(format!("self-loop on qubit {i}"))),
        }
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn hi(self) -> usize {
        self.hi
    }
}

/// One measurement outcome; character `k` of the textual form is qubit `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BitString(vec![false; n])
    }

    /// Decodes a basis-state index with qubit `k` at bit `k`.
    pub fn from_index(index: usize, n: usize) -> Self {
        BitString((0..n).map(|k| index >> k & 1 == 1).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().enumerate().fold(0, |acc, (k, &b)| acc | (usize::from(b) << k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        BitString(self.0.iter().map(|b| !b).collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::validation(format!("invalid bit `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    n: usize,
    linear: BTreeMap<usize, Coefficient>,
    pairs: BTreeMap<Pair, Coefficient>,
    label: String,
}

impl IsingInstance {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("an instance needs at least one qubit"));
        }
        Ok(IsingInstance { n, linear: BTreeMap::new(), pairs: BTreeMap::new(), label: String::new() })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::validation(format!("qubit {i} out of range for N={}", self.n)));
        }
        Ok(())
    }

    pub fn set_linear(&mut self, i: usize, c: impl Into<Coefficient>) -> Result<()> {
        self.check_index(i)?;
        if let Some(prev) = self.linear.insert(i, c.into()) {
            log::warn!("linear term {i} redefined (was {prev})");
        }
        Ok(())
    }

    /// Inserts `c_ij`; a second insertion of the same unordered pair replaces
    /// the first.
    pub fn set_pair(&mut self, i: usize, j: usize, c: impl Into<Coefficient>) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        let pair = Pair::new(i, j)?;
        if let Some(prev) = self.pairs.insert(pair, c.into()) {
            log::warn!("pair ({}, {}) redefined (was {prev})", pair.lo, pair.hi);
        }
        Ok(())
    }

    pub fn linear(&self, i: usize) -> Option<Coefficient> {
        self.linear.get(&i).copied()
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<Coefficient> {
        Pair::new(i, j).ok().and_then(|p| self.pairs.get(&p).copied())
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (usize, Coefficient)> + '_ {
        self.linear.iter().map(|(&i, &c)| (i, c))
    }

    pub fn pair_terms(&self) -> impl Iterator<Item = (Pair, Coefficient)> + '_ {
        self.pairs.iter().map(|(&p, &c)| (p, c))
    }

    /// `S`: number of nonzero linear terms.
    pub fn linear_count(&self) -> usize {
        self.linear.values().filter(|c| !c.is_zero()).count()
    }

    /// `C`: number of nonzero pair terms.
    pub fn pair_count(&self) -> usize {
        self.pairs.values().filter(|c| !c.is_zero()).count()
    }

    pub fn is_integral(&self) -> bool {
        self.linear.values().chain(self.pairs.values()).all(|c| c.as_integer().is_some())
    }

    fn check_len(&self, z: &BitString) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::Dimension { expected: self.n, actual: z.len() });
        }
        Ok(())
    }

    pub fn cost(&self, z: &BitString) -> Result<f64> {
        self.check_len(z)?;
        Ok(self.cost_unchecked(z))
    }

    pub(crate) fn cost_unchecked(&self, z: &BitString) -> f64 {
        let linear: f64 = self.linear.iter().filter(|(&i, _)| z.get(i)).map(|(_, c)| c.as_f64()).sum();
        let pairs: f64 = self
            .pairs
            .iter()
            .filter(|(p, _)| z.get(p.lo) != z.get(p.hi))
            .map(|(_, c)| c.as_f64())
            .sum();
        linear + pairs
    }

    /// Integer cost, or `None` when some coefficient is real-valued.
    pub fn cost_integer(&self, z: &BitString) -> Result<Option<i128>> {
        self.check_len(z)?;
        let mut total = 0i128;
        for (&i, c) in &self.linear {
            let Some(v) = c.as_integer() else { return Ok(None) };
            if z.get(i) {
                total += i128::from(v);
            }
        }
        for (p, c) in &self.pairs {
            let Some(v) = c.as_integer() else { return Ok(None) };
            if z.get(p.lo) != z.get(p.hi) {
                total += i128::from(v);
            }
        }
        Ok(Some(total))
    }

    /// Mean cost over the trials.
    pub fn sampled_energy(&self, trials: &[BitString]) -> Result<f64> {
        if trials.is_empty() {
            return Err(Error::domain("sampled energy needs at least one trial"));
        }
        let mut sum = 0.0;
        for z in trials {
            sum += self.cost(z)?;
        }
        Ok(sum / trials.len() as f64)
    }

    /// Mean cost as an exact rational; `None` for real-valued instances.
    pub fn sampled_energy_exact(&self, trials: &[BitString]) -> Result<Option<Exact>> {
        if trials.is_empty() {
            return Err(Error::domain("sampled energy needs at least one trial"));
        }
        let mut sum = 0i128;
        for z in trials {
            match self.cost_integer(z)? {
                Some(c) => sum += c,
                None => return Ok(None),
            }
        }
        Ok(Some(Exact::new(sum, trials.len() as i128)))
    }

    /// Max-cut on `n` nodes: every edge gets `c_ij = -1`, no linear terms.
    pub fn maxcut(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut inst = IsingInstance::new(n)?.with_label(format!("maxcut n={n} m={}", edges.len()));
        for &(i, j) in edges {
            inst.set_pair(i, j, -1)?;
        }
        Ok(inst)
    }

    /// Densest-bandwidth case for a connected problem: a path with `N-1`
    /// pair terms and no linear terms.
    pub fn worst_case(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("worst-case instance needs n >= 2, got {n}")));
        }
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Ok(IsingInstance::maxcut(n, &edges)?.with_label(format!("worst-case path n={n}")))
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("a ring needs n >= 3, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Ok(IsingInstance::maxcut(n, &edges)?.with_label(format!("maxcut ring n={n}")))
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Ok(IsingInstance::maxcut(n, &edges)?.with_label(format!("maxcut complete n={n}")))
    }

    /// True when the nonzero pair terms connect every qubit.
    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = self.n;
        for (p, c) in &self.pairs {
            if c.is_zero() {
                continue;
            }
            let (a, b) = (find(&mut parent, p.lo), find(&mut parent, p.hi));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components == 1
    }
}
