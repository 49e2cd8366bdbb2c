//! Fock-space mode algebra.
//!
//! Modes follow `f(t) = Σ_n f̂(n) e^{-int}`. Momentum modes are rescaled,
//! `P_μ(n) = 2π p̂_μ(n)` and `Π^A(n) = 2π π̂^A(n)`, so that
//! `[P_μ(m), q^ν(n)] = δ^ν_μ δ_{m+n,0}` and the graded bracket
//! `[Π^A(m), φ_B(n)} = δ^A_B δ_{m+n,0}`.
//!
//! Annihilators are `q(n<0)`, `φ(n<0)`, `P(n<=0)`, `Π(n<=0)`; everything else
//! creates. States are sparse combinations of creator monomials over `|0⟩`.
//!
//! Operators are sums of `DensityTerm`s: `c Σ_{n_1+..+n_r = k} Π_i (−i n_i)^{d_i}
//! :f_1(n_1) .. f_r(n_r):`, i.e. the Fourier coefficient `e^{ikt}` of a
//! normal-ordered local density, with `d_i` time derivatives on factor `i`.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::GaussianRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Q,
    P,
    Phi,
    Pi,
}

impl Field {
    fn partner(self) -> Field {
        match self {
            Field::Q => Field::P,
            Field::P => Field::Q,
            Field::Phi => Field::Pi,
            Field::Pi => Field::Phi,
        }
    }

    /// Smallest creator frequency.
    pub fn creator_floor(self) -> i64 {
        match self {
            Field::Q | Field::Phi => 0,
            Field::P | Field::Pi => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Field::Q => "q",
            Field::P => "p",
            Field::Phi => "phi",
            Field::Pi => "pi",
        }
    }
}

/// A single mode `field_comp(freq)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeOp {
    pub field: Field,
    pub comp: u32,
    pub freq: i64,
}

impl ModeOp {
    pub fn new(field: Field, comp: usize, freq: i64) -> Self {
        ModeOp { field, comp: comp as u32, freq }
    }

    pub fn is_creator(&self) -> bool {
        self.freq >= self.field.creator_floor()
    }
}

impl fmt::Display for ModeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}({})", self.field.name(), self.comp, self.freq)
    }
}

/// Statistics of the jet sector; the observer sector is always bosonic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// `+1` for bosons, `−1` for fermions; the upper/lower sign of the bilinears.
    pub fn sign(self) -> i64 {
        match self {
            Statistics::Boson => 1,
            Statistics::Fermion => -1,
        }
    }
}

/// Graded commutation rules of one Fock space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fock {
    pub statistics: Statistics,
}

impl Fock {
    pub fn new(statistics: Statistics) -> Self {
        Fock { statistics }
    }

    pub fn is_odd(&self, f: Field) -> bool {
        self.statistics == Statistics::Fermion && matches!(f, Field::Phi | Field::Pi)
    }

    /// The graded bracket `[a, b}` as a multiple of the identity.
    pub fn mode_commutator(&self, a: &ModeOp, b: &ModeOp) -> GaussianRational {
        if a.comp != b.comp || a.freq + b.freq != 0 || a.field.partner() != b.field {
            return GaussianRational::zero();
        }
        let v = match a.field {
            Field::P | Field::Pi => 1,
            Field::Q => -1,
            Field::Phi => {
                if self.is_odd(Field::Phi) {
                    1
                } else {
                    -1
                }
            }
        };
        GaussianRational::from_int(v)
    }
}

/// Canonically ordered creators; bosons may repeat, fermions may not.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub Vec<ModeOp>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    /// Sum of creator frequencies.
    pub fn level(&self) -> i64 {
        self.0.iter().map(|m| m.freq).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "|0>");
        }
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct State {
    terms: HashMap<Monomial, GaussianRational>,
}

impl State {
    pub fn zero() -> Self {
        State::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(Monomial::vacuum())
    }

    pub fn basis(m: Monomial) -> Self {
        let mut s = State::zero();
        s.add_term(m, GaussianRational::one());
        s
    }

    /// `c_1 .. c_r |0⟩` for creators in the given (not necessarily canonical) order.
    pub fn from_creators(fock: &Fock, modes: &[ModeOp]) -> Self {
        let mut s = State::vacuum();
        for m in modes.iter().rev() {
            assert!(m.is_creator(), "{m} is not a creator");
            s = apply_mode(fock, m, &s);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::hash_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &State) -> State {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &State) -> State {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> State {
        if c.is_zero() {
            return State::zero();
        }
        State { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Monomials sorted canonically, for stable output.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &GaussianRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// One monomial per line: modes, then the exact coefficient.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for (m, c) in self.sorted_terms() {
            out.push_str(&format!("{m} : {c}\n"));
        }
        out
    }

    /// If the state is `c · target`, returns `c`.
    pub fn proportionality(&self, target: &State) -> Option<GaussianRational> {
        let (m, c) = target.terms.iter().next()?;
        let ratio = &self.coefficient(m) / c;
        if self.sub(&target.scale(&ratio)).is_zero() {
            Some(ratio)
        } else {
            None
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", self.debug_dump().trim_end())
    }
}

/// One factor of a local density: `d^dt/dt^dt field_comp(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub field: Field,
    pub comp: u32,
    pub dt: u8,
}

impl Factor {
    pub fn new(field: Field, comp: usize) -> Self {
        Factor { field, comp: comp as u32, dt: 0 }
    }

    pub fn dot(field: Field, comp: usize, dt: u8) -> Self {
        Factor { field, comp: comp as u32, dt }
    }
}

/// `coeff · Σ_{Σ n_i = freq} Π (−i n_i)^{dt_i} :Π factor_i(n_i):`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityTerm {
    pub coeff: GaussianRational,
    pub freq: i64,
    pub factors: Vec<Factor>,
}

/// A normal-ordered operator: identity multiple plus density terms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Operator {
    pub constant: GaussianRational,
    pub terms: Vec<DensityTerm>,
}

impl Operator {
    pub fn zero() -> Self {
        Operator::default()
    }

    pub fn identity() -> Self {
        Operator { constant: GaussianRational::one(), terms: Vec::new() }
    }

    /// A single mode viewed as an operator.
    pub fn mode(m: ModeOp) -> Self {
        let mut op = Operator::zero();
        op.push(GaussianRational::one(), m.freq, vec![Factor::new(m.field, m.comp as usize)]);
        op
    }

    pub fn push(&mut self, coeff: GaussianRational, freq: i64, factors: Vec<Factor>) {
        if !coeff.is_zero() {
            self.terms.push(DensityTerm { coeff, freq, factors });
        }
    }

    pub fn add(&self, o: &Operator) -> Operator {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Operator { constant: &self.constant + &o.constant, terms }
    }

    pub fn scale(&self, c: &GaussianRational) -> Operator {
        Operator {
            constant: &self.constant * c,
            terms: self
                .terms
                .iter()
                .filter(|_| !c.is_zero())
                .map(|t| DensityTerm { coeff: &t.coeff * c, ..t.clone() })
                .collect(),
        }
    }

    pub fn sub(&self, o: &Operator) -> Operator {
        self.add(&o.scale(&-GaussianRational::one()))
    }

    /// Merges identical density terms.
    pub fn simplified(&self) -> Operator {
        let mut map: HashMap<(i64, Vec<Factor>), GaussianRational> = HashMap::new();
        let mut order = Vec::new();
        for t in &self.terms {
            let key = (t.freq, t.factors.clone());
            if !map.contains_key(&key) {
                order.push(key.clone());
            }
            *map.entry(key).or_default() += t.coeff.clone();
        }
        let mut out = Operator { constant: self.constant.clone(), terms: Vec::new() };
        for key in order {
            let c = map.remove(&key).unwrap();
            out.push(c, key.0, key.1);
        }
        out
    }

    /// True if any factor uses the given field and component.
    pub fn mentions(&self, field: Field, comp: usize) -> bool {
        self.terms.iter().any(|t| t.factors.iter().any(|f| f.field == field && f.comp as usize == comp))
    }
}

/// Applies one mode operator (creator or annihilator) to a state.
pub fn apply_mode(fock: &Fock, m: &ModeOp, s: &State) -> State {
    let mut out = State::zero();
    for (mono, c) in s.terms() {
        if m.is_creator() {
            if let Some((sign, res)) = insert_creator(fock, &mono.0, m) {
                out.add_term(Monomial(res), c.scale(&crate::scalar::rint(sign)));
            }
        } else if let Some((v, res)) = remove_partner(fock, &mono.0, m) {
            out.add_term(Monomial(res), c * &v);
        }
    }
    out
}

/// `c · M` in canonical order: sign and result, or `None` when zero.
fn insert_creator(fock: &Fock, mono: &[ModeOp], c: &ModeOp) -> Option<(i64, Vec<ModeOp>)> {
    let odd = fock.is_odd(c.field);
    let pos = mono.partition_point(|x| x < c);
    if odd && mono.get(pos) == Some(c) {
        return None;
    }
    let sign = if odd && mono[..pos].iter().filter(|x| fock.is_odd(x.field)).count() % 2 == 1 { -1 } else { 1 };
    let mut v = Vec::with_capacity(mono.len() + 1);
    v.extend_from_slice(&mono[..pos]);
    v.push(*c);
    v.extend_from_slice(&mono[pos..]);
    Some((sign, v))
}

/// `a · M` for an annihilator `a`: coefficient and remaining monomial.
fn remove_partner(fock: &Fock, mono: &[ModeOp], a: &ModeOp) -> Option<(GaussianRational, Vec<ModeOp>)> {
    let target = ModeOp { field: a.field.partner(), comp: a.comp, freq: -a.freq };
    let start = mono.partition_point(|x| x < &target);
    let count = mono[start..].iter().take_while(|x| **x == target).count();
    if count == 0 {
        return None;
    }
    let mut val = fock.mode_commutator(a, &target);
    if fock.is_odd(a.field) {
        if mono[..start].iter().filter(|x| fock.is_odd(x.field)).count() % 2 == 1 {
            val = -val;
        }
    } else {
        val = val.scale(&crate::scalar::rint(count as i64));
    }
    let mut v = Vec::with_capacity(mono.len() - 1);
    v.extend_from_slice(&mono[..start]);
    v.extend_from_slice(&mono[start + 1..]);
    Some((val, v))
}

/// Applies an ordered product `m_1 m_2 .. m_r` (rightmost first).
pub fn apply_product(fock: &Fock, modes: &[ModeOp], s: &State) -> State {
    let mut cur = s.clone();
    for m in modes.iter().rev() {
        cur = apply_mode(fock, m, &cur);
        if cur.is_zero() {
            break;
        }
    }
    cur
}

/// Sign of moving creators left of annihilators (stable partition).
pub fn normal_order_sign(fock: &Fock, modes: &[ModeOp]) -> i64 {
    let mut odd_annihilators = 0usize;
    let mut swaps = 0usize;
    for m in modes {
        if !fock.is_odd(m.field) {
            continue;
        }
        if m.is_creator() {
            swaps += odd_annihilators;
        } else {
            odd_annihilators += 1;
        }
    }
    if swaps % 2 == 1 {
        -1
    } else {
        1
    }
}

/// `(−i n)^d`.
fn derivative_factor(n: i64, d: u8) -> GaussianRational {
    let base = GaussianRational::new(Zero::zero(), crate::scalar::rint(-n));
    base.pow(d as u32)
}

struct TermApplier<'a> {
    fock: &'a Fock,
    term: &'a DensityTerm,
    mono: &'a Monomial,
    coeff: &'a GaussianRational,
    /// Candidate annihilator frequencies per factor.
    cands: Vec<Vec<i64>>,
    freqs: Vec<i64>,
    is_ann: Vec<bool>,
}

impl TermApplier<'_> {
    fn choose(&mut self, i: usize, ann_sum: i64, out: &mut State) {
        if i == self.term.factors.len() {
            let creators: Vec<usize> = (0..i).filter(|&j| !self.is_ann[j]).collect();
            let rest = self.term.freq - ann_sum;
            let floor: i64 = creators.iter().map(|&j| self.term.factors[j].field.creator_floor()).sum();
            if rest < floor {
                return;
            }
            self.compose(&creators, 0, rest, out);
            return;
        }
        self.is_ann[i] = false;
        self.choose(i + 1, ann_sum, out);
        let f = self.term.factors[i];
        for k in 0..self.cands[i].len() {
            let v = self.cands[i][k];
            if v == 0 && f.dt > 0 {
                continue;
            }
            self.is_ann[i] = true;
            self.freqs[i] = v;
            self.choose(i + 1, ann_sum + v, out);
        }
        self.is_ann[i] = false;
    }

    fn compose(&mut self, creators: &[usize], k: usize, rest: i64, out: &mut State) {
        if k == creators.len() {
            if rest == 0 {
                self.emit(out);
            }
            return;
        }
        let j = creators[k];
        let f = self.term.factors[j];
        let lo = f.field.creator_floor();
        let later_floor: i64 = creators[k + 1..].iter().map(|&c| self.term.factors[c].field.creator_floor()).sum();
        let hi = rest - later_floor;
        if k + 1 == creators.len() {
            if rest >= lo && !(rest == 0 && f.dt > 0) {
                self.freqs[j] = rest;
                self.compose(creators, k + 1, 0, out);
            }
            return;
        }
        for v in lo..=hi {
            if v == 0 && f.dt > 0 {
                continue;
            }
            self.freqs[j] = v;
            self.compose(creators, k + 1, rest - v, out);
        }
    }

    fn emit(&self, out: &mut State) {
        let factors = &self.term.factors;
        let modes: Vec<ModeOp> =
            factors.iter().zip(&self.freqs).map(|(f, &n)| ModeOp { field: f.field, comp: f.comp, freq: n }).collect();
        let mut c = &self.term.coeff * self.coeff;
        for (f, &n) in factors.iter().zip(&self.freqs) {
            if f.dt > 0 {
                c = &c * &derivative_factor(n, f.dt);
            }
        }
        if normal_order_sign(self.fock, &modes) < 0 {
            c = -c;
        }
        let mut cur = self.mono.0.clone();
        for m in modes.iter().rev().filter(|m| !m.is_creator()) {
            match remove_partner(self.fock, &cur, m) {
                Some((v, rest)) => {
                    c = &c * &v;
                    cur = rest;
                }
                None => return,
            }
        }
        for m in modes.iter().rev().filter(|m| m.is_creator()) {
            match insert_creator(self.fock, &cur, m) {
                Some((sign, next)) => {
                    if sign < 0 {
                        c = -c;
                    }
                    cur = next;
                }
                None => return,
            }
        }
        out.add_term(Monomial(cur), c);
    }
}

fn apply_term(fock: &Fock, term: &DensityTerm, mono: &Monomial, coeff: &GaussianRational, out: &mut State) {
    let cands: Vec<Vec<i64>> = term
        .factors
        .iter()
        .map(|f| {
            let partner = f.field.partner();
            let mut v: Vec<i64> =
                mono.0.iter().filter(|m| m.field == partner && m.comp == f.comp).map(|m| -m.freq).collect();
            v.dedup();
            v
        })
        .collect();
    let r = term.factors.len();
    let mut ap = TermApplier { fock, term, mono, coeff, cands, freqs: vec![0; r], is_ann: vec![false; r] };
    ap.choose(0, 0, out);
}

/// Exact action of a normal-ordered operator on a state.
pub fn apply(fock: &Fock, op: &Operator, s: &State) -> State {
    let mut out = s.scale(&op.constant);
    for (mono, c) in s.terms() {
        for term in &op.terms {
            apply_term(fock, term, mono, c, &mut out);
        }
    }
    out
}

/// `A(B s) − B(A s)`.
pub fn commutator_apply(fock: &Fock, a: &Operator, b: &Operator, s: &State) -> State {
    apply(fock, a, &apply(fock, b, s)).sub(&apply(fock, b, &apply(fock, a, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gc, gr};
    use proptest::prelude::*;

    fn boson() -> Fock {
        Fock::new(Statistics::Boson)
    }

    fn fermion() -> Fock {
        Fock::new(Statistics::Fermion)
    }

    #[test]
    fn mode_commutator_examples() {
        let f = boson();
        assert_eq!(f.mode_commutator(&ModeOp::new(Field::P, 0, 1), &ModeOp::new(Field::Q, 0, -1)), gr(1, 1));
        assert_eq!(f.mode_commutator(&ModeOp::new(Field::P, 0, 1), &ModeOp::new(Field::Q, 1, -1)), gr(0, 1));
        let ff = fermion();
        assert_eq!(ff.mode_commutator(&ModeOp::new(Field::Pi, 0, 2), &ModeOp::new(Field::Pi, 0, -2)), gr(0, 1));
        assert_eq!(ff.mode_commutator(&ModeOp::new(Field::Phi, 0, 2), &ModeOp::new(Field::Pi, 0, -2)), gr(1, 1));
        assert_eq!(f.mode_commutator(&ModeOp::new(Field::Phi, 0, 2), &ModeOp::new(Field::Pi, 0, -2)), gr(-1, 1));
    }

    #[test]
    fn apply_examples() {
        let f = boson();
        let vac = State::vacuum();
        assert!(apply(&f, &Operator::mode(ModeOp::new(Field::P, 0, 0)), &vac).is_zero());
        let q1 = apply(&f, &Operator::mode(ModeOp::new(Field::Q, 0, 1)), &vac);
        assert_eq!(q1, State::basis(Monomial(vec![ModeOp::new(Field::Q, 0, 1)])));
        // :p(1) q(-1): on q(1)|0> contracts to the vacuum
        let mut op = Operator::zero();
        op.push(gr(1, 1), 0, vec![Factor::new(Field::P, 0), Factor::new(Field::Q, 0)]);
        let single = apply_product(&f, &[ModeOp::new(Field::P, 0, -1), ModeOp::new(Field::Q, 0, 1)], &vac);
        assert_eq!(single.len(), 1);
        let contracted = apply_product(&f, &[ModeOp::new(Field::P, 0, -1)], &q1);
        assert_eq!(contracted, vac);
    }

    #[test]
    fn fermionic_signs() {
        let f = fermion();
        let a = ModeOp::new(Field::Phi, 0, 0);
        let b = ModeOp::new(Field::Phi, 1, 0);
        let ab = State::from_creators(&f, &[a, b]);
        let ba = State::from_creators(&f, &[b, a]);
        assert_eq!(ab, ba.scale(&gr(-1, 1)));
        assert!(State::from_creators(&f, &[a, a]).is_zero());
        let fb = boson();
        assert_eq!(State::from_creators(&fb, &[a, a]).len(), 1);
    }

    /// Truncated brute-force expansion of one density term.
    fn oracle(fock: &Fock, term: &DensityTerm, s: &State, window: i64) -> State {
        let r = term.factors.len();
        let mut out = State::zero();
        let mut idx = vec![-window; r];
        loop {
            if idx.iter().sum::<i64>() == term.freq {
                let mut modes: Vec<ModeOp> = term
                    .factors
                    .iter()
                    .zip(&idx)
                    .map(|(f, &n)| ModeOp { field: f.field, comp: f.comp, freq: n })
                    .collect();
                let mut c = term.coeff.clone();
                for (f, &n) in term.factors.iter().zip(&idx) {
                    c = &c * &derivative_factor(n, f.dt);
                }
                let sign = normal_order_sign(fock, &modes);
                let (cr, an): (Vec<ModeOp>, Vec<ModeOp>) = modes.drain(..).partition(|m| m.is_creator());
                let ordered: Vec<ModeOp> = cr.into_iter().chain(an).collect();
                out = out.add(&apply_product(fock, &ordered, s).scale(&c.scale(&crate::scalar::rint(sign))));
            }
            let mut k = 0;
            loop {
                if k == r {
                    return out;
                }
                idx[k] += 1;
                if idx[k] <= window {
                    break;
                }
                idx[k] = -window;
                k += 1;
            }
        }
    }

    fn arb_factor() -> impl Strategy<Value = Factor> {
        (0usize..4, 0usize..2, 0u8..2).prop_map(|(f, c, d)| {
            let field = [Field::Q, Field::P, Field::Phi, Field::Pi][f];
            Factor::dot(field, c, d)
        })
    }

    fn arb_state(fock: Fock) -> impl Strategy<Value = State> {
        proptest::collection::vec((0usize..4, 0usize..2, 0i64..3), 0..3).prop_map(move |ms| {
            let modes: Vec<ModeOp> = ms
                .into_iter()
                .map(|(f, c, n)| {
                    let field = [Field::Q, Field::P, Field::Phi, Field::Pi][f];
                    ModeOp { field, comp: c as u32, freq: n.max(field.creator_floor()) }
                })
                .collect();
            State::from_creators(&fock, &modes)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]
        #[test]
        fn enumerator_matches_truncated_expansion(
            factors in proptest::collection::vec(arb_factor(), 1..4),
            freq in -2i64..3,
            ferm in any::<bool>(),
            seed_state in arb_state(Fock::new(Statistics::Boson)),
        ) {
            let fock = Fock::new(if ferm { Statistics::Fermion } else { Statistics::Boson });
            // rebuild the state in the chosen statistics
            let mut s = State::zero();
            for (m, c) in seed_state.terms() {
                s = s.add(&State::from_creators(&fock, &m.0).scale(c));
            }
            let term = DensityTerm { coeff: gc(1, 1), freq, factors };
            let mut op = Operator::zero();
            op.terms.push(term.clone());
            let got = apply(&fock, &op, &s);
            // creators are bounded by the state level plus |freq|; 8 is ample
            prop_assert_eq!(got, oracle(&fock, &term, &s, 8));
        }

        #[test]
        fn graded_jacobi_on_modes(
            a in (0usize..4, 0usize..2, -2i64..3),
            b in (0usize..4, 0usize..2, -2i64..3),
            c in (0usize..4, 0usize..2, -2i64..3),
            ferm in any::<bool>(),
            st in arb_state(Fock::new(Statistics::Boson)),
        ) {
            let fock = Fock::new(if ferm { Statistics::Fermion } else { Statistics::Boson });
            let mk = |(f, comp, n): (usize, usize, i64)| ModeOp::new([Field::Q, Field::P, Field::Phi, Field::Pi][f], comp, n);
            let (x, y, z) = (mk(a), mk(b), mk(c));
            let mut s = State::zero();
            for (m, co) in st.terms() {
                s = s.add(&State::from_creators(&fock, &m.0).scale(co));
            }
            // x y z − (−1)^{|x|(|y|+|z|)} y z x = [x,y} z + (−1)^{|x||y|} [x,z} y
            let parity = |m: &ModeOp| fock.is_odd(m.field);
            let sgn = |p: bool| if p { -1 } else { 1 };
            let xy = sgn(parity(&x) && parity(&y));
            let lhs = apply_product(&fock, &[x, y, z], &s)
                .sub(&apply_product(&fock, &[y, z, x], &s).scale(&gr(sgn(parity(&x) && (parity(&y) ^ parity(&z))), 1)));
            let rhs = apply_product(&fock, &[z], &s).scale(&fock.mode_commutator(&x, &y))
                .add(&apply_product(&fock, &[y], &s).scale(&(&fock.mode_commutator(&x, &z) * &gr(xy, 1))));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
