//! Mode-level checks of the distribution identities and free-field current algebras.
//!
//! Units: every distribution `g(s−t) = (1/2π) Σ_k c_k e^{−ik(s−t)}` is recorded by
//! its mode coefficient `c_k`, and products of two such are recorded with the
//! overall `1/4π²` stripped. Double smearing `∫∫ e^{ims} e^{int}` of a kernel
//! `g(s−t)` gives `2π c_m δ_{m+n,0}`.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::fock::{apply_mode, commutator_apply, Factor, Field, Fock, Monomial, ModeOp, Operator, State, Statistics};
use crate::gl_reps::{closed_form_invariants, rho_matrix};
use crate::linalg::Matrix;
use crate::realization::Realization;
use crate::scalar::{gr, rint, GaussianRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaVariant {
    I,
    Ii,
    Iii,
}

impl DeltaVariant {
    pub const ALL: [DeltaVariant; 3] = [DeltaVariant::I, DeltaVariant::Ii, DeltaVariant::Iii];
}

/// Mode-`k` coefficient of the left side by lattice counting.
///
/// `δ^>(t) = (1/2π) Σ_{m>0} e^{−imt}`, `δ^≤(t) = (1/2π) Σ_{n≤0} e^{−int}`; a dot on
/// `δ^≤(−t)` differentiates the function before substitution.
pub fn delta_split_lhs(v: DeltaVariant, k: i64) -> GaussianRational {
    // first product: e^{−i(m−n)t}, m > 0, n <= 0, m − n = k
    // second product: e^{−i(n−m)t}, m > 0, n <= 0, n − m = k
    let weight = |m: i64, n: i64| -> GaussianRational {
        let (dm, dn) = (GaussianRational::new(rint(0), rint(-m)), GaussianRational::new(rint(0), rint(-n)));
        match v {
            DeltaVariant::I => GaussianRational::one(),
            DeltaVariant::Ii => dn,
            DeltaVariant::Iii => &dm * &dn,
        }
    };
    let weight2 = |m: i64, n: i64| -> GaussianRational {
        let (dm, dn) = (GaussianRational::new(rint(0), rint(-m)), GaussianRational::new(rint(0), rint(-n)));
        match v {
            DeltaVariant::I => GaussianRational::one(),
            DeltaVariant::Ii => dm,
            DeltaVariant::Iii => &dm * &dn,
        }
    };
    let mut total = GaussianRational::zero();
    for m in 1..=k.abs().max(1) {
        let n = m - k;
        if n <= 0 {
            total += weight(m, n);
        }
        let n2 = k + m;
        if n2 <= 0 {
            total -= weight2(m, n2);
        }
    }
    total
}

/// Mode-`k` coefficient of the right side from the derivative polynomial.
pub fn delta_split_rhs(v: DeltaVariant, k: i64) -> GaussianRational {
    // δ^{(j)} has mode coefficient (−ik)^j
    let d = |j: u32| GaussianRational::new(rint(0), rint(-k)).pow(j);
    // a prefactor 1/(2π a) becomes 1/a in stripped units
    let i = GaussianRational::i();
    match v {
        // −(1/2πi) δ̇ → i d1
        DeltaVariant::I => &i * &d(1),
        // (1/4πi)(δ̈ + iδ̇) → (1/2i)(d2 + i d1)
        DeltaVariant::Ii => &(&d(2) + &(&i * &d(1))) * &GaussianRational::new(rint(0), crate::scalar::rat(-1, 2)),
        // (1/12πi)(δ⃛ + δ̇) → (1/6i)(d3 + d1)
        DeltaVariant::Iii => &(&d(3) + &d(1)) * &GaussianRational::new(rint(0), crate::scalar::rat(-1, 6)),
    }
}

pub fn delta_split_coefficient(v: DeltaVariant, k: i64) -> (GaussianRational, GaussianRational) {
    (delta_split_lhs(v, k), delta_split_rhs(v, k))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSplitRow {
    pub variant: DeltaVariant,
    pub k: i64,
    pub lhs: GaussianRational,
    pub rhs: GaussianRational,
}

impl DeltaSplitRow {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn delta_split_table(kmax: i64) -> Vec<DeltaSplitRow> {
    DeltaVariant::ALL
        .iter()
        .flat_map(|&variant| {
            (-kmax..=kmax).map(move |k| {
                let (lhs, rhs) = delta_split_coefficient(variant, k);
                DeltaSplitRow { variant, k, lhs, rhs }
            })
        })
        .collect()
}

/// Graded bracket of two modes, read off from their action on a state.
fn bracket_on(fock: &Fock, a: &ModeOp, b: &ModeOp, s: &State) -> State {
    let ab = apply_mode(fock, a, &apply_mode(fock, b, s));
    let ba = apply_mode(fock, b, &apply_mode(fock, a, s));
    let odd = fock.is_odd(a.field) && fock.is_odd(b.field);
    if odd {
        ab.add(&ba)
    } else {
        ab.sub(&ba)
    }
}

/// Split Heisenberg relations for `π_>`, `π_≤` against `φ`, both orders, with
/// brackets measured on a small battery of states. Returns the number of checks.
pub fn heisenberg_mode_checks(stat: Statistics, comps: usize, window: i64) -> Result<usize> {
    let fock = Fock::new(stat);
    let s = stat.sign();
    let states = current_probes(stat, comps, 1);
    let mut checked = 0;
    for a in 0..comps {
        for b in 0..comps {
            for m in -window..=window {
                for n in -window..=window {
                    let pi = ModeOp::new(Field::Pi, a, m);
                    let phi = ModeOp::new(Field::Phi, b, n);
                    let hit = a == b && m + n == 0;
                    let pos = m > 0;
                    for (part_pos, first_pi) in [(true, true), (true, false), (false, true), (false, false)] {
                        let inside = if part_pos { pos } else { !pos };
                        let expect = match (inside && hit, first_pi) {
                            (false, _) => 0,
                            (true, true) => 1,
                            (true, false) => -s,
                        };
                        for st in &states {
                            let got = if !inside {
                                State::zero()
                            } else if first_pi {
                                bracket_on(&fock, &pi, &phi, st)
                            } else {
                                bracket_on(&fock, &phi, &pi, st)
                            };
                            if got != st.scale(&GaussianRational::from_int(expect)) {
                                return Err(EngineError::Consistency(format!(
                                    "split bracket ({}, pi{a}({m}), phi{b}({n}), first_pi={first_pi}) on {st}",
                                    if part_pos { ">" } else { "<=" }
                                )));
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}

/// Creator monomials with total frequency at most `max_level` and at most
/// `max_level` modes, built from `φ_A(n ≥ 0)` and `Π^A(n ≥ 1)`.
pub fn current_probes(stat: Statistics, comps: usize, max_level: i64) -> Vec<State> {
    let fock = Fock::new(stat);
    let mut creators = Vec::new();
    for a in 0..comps {
        for n in 0..=max_level {
            creators.push(ModeOp::new(Field::Phi, a, n));
            if n >= 1 {
                creators.push(ModeOp::new(Field::Pi, a, n));
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..=max_level {
        let mut next = Vec::new();
        for word in &frontier {
            let level: i64 = word.iter().map(|&i| creators[i].freq).sum();
            if seen.insert(word.clone()) {
                let modes: Vec<ModeOp> = word.iter().map(|&i| creators[i]).collect();
                let st = State::from_creators(&fock, &modes);
                if !st.is_zero() {
                    out.push(st);
                }
            }
            let start = word.last().copied().unwrap_or(0);
            for i in start..creators.len() {
                if level + creators[i].freq <= max_level {
                    let mut w = word.clone();
                    w.push(i);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    out
}

/// `F̂(k) = ∫ e^{ikt} F`, `F = ∓ :π^A φ̇_A:`.
pub fn f_mode(stat: Statistics, comps: usize, k: i64) -> Operator {
    let c = GaussianRational::from_int(-stat.sign());
    let mut op = Operator::zero();
    for a in 0..comps {
        op.push(c.clone(), k, vec![Factor::new(Field::Pi, a), Factor::dot(Field::Phi, a, 1)]);
    }
    op
}

/// `Ê^A_B(k) = ∫ e^{ikt} E^A_B`, `E^A_B = ∓ :π^A φ_B:`.
pub fn e_mode(stat: Statistics, a: usize, b: usize, k: i64) -> Operator {
    let mut op = Operator::zero();
    op.push(GaussianRational::from_int(-stat.sign()), k, vec![Factor::new(Field::Pi, a), Factor::new(Field::Phi, b)]);
    op
}

/// `Σ_{AB} X_{AB} Ê^A_B(k)`.
pub fn matrix_mode(stat: Statistics, x: &Matrix, k: i64) -> Operator {
    let mut op = Operator::zero();
    for a in 0..x.rows() {
        for b in 0..x.cols() {
            if !x[(a, b)].is_zero() {
                op = op.add(&e_mode(stat, a, b, k).scale(&x[(a, b)]));
            }
        }
    }
    op
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralRow {
    pub bracket: String,
    pub m: i64,
    pub n: i64,
    pub measured: Option<GaussianRational>,
    pub predicted: GaussianRational,
}

impl CentralRow {
    pub fn passed(&self) -> bool {
        self.measured.as_ref() == Some(&self.predicted)
    }
}

/// Central part of `[A, B] − regular` on every probe; `None` if it is not a
/// common multiple of the identity.
fn central_part(fock: &Fock, a: &Operator, b: &Operator, regular: &Operator, probes: &[State]) -> Option<GaussianRational> {
    let mut value: Option<GaussianRational> = None;
    for s in probes {
        let d = commutator_apply(fock, a, b, s).sub(&crate::fock::apply(fock, regular, s));
        let c = if d.is_zero() { GaussianRational::zero() } else { d.proportionality(s)? };
        match &value {
            None => value = Some(c),
            Some(v) if *v != c => return None,
            _ => {}
        }
    }
    value
}

fn delta(a: usize, b: usize) -> i64 {
    (a == b) as i64
}

/// Mode forms, for `comps` pairs of one statistics (`s = ±1`):
/// `[F̂(m), F̂(n)] = i(n−m) F̂(m+n) + s·comps·(m³−m)/6 δ_{m+n}`,
/// `[F̂(m), Ê^A_B(n)] = i n Ê^A_B(m+n) − s δ^A_B i(m²−m)/2 δ_{m+n}`,
/// `[Ê^A_B(m), Ê^C_D(n)] = (δ^C_B Ê^A_D − δ^A_D Ê^C_B)(m+n) + s m δ^A_D δ^C_B δ_{m+n}`.
pub fn fe_current_checks(stat: Statistics, comps: usize, range: i64) -> Result<Vec<CentralRow>> {
    let fock = Fock::new(stat);
    let s = stat.sign();
    let probes = current_probes(stat, comps, 3);
    let pairs: Vec<(i64, i64)> = (-range..=range).flat_map(|m| (-range..=range).map(move |n| (m, n))).collect();
    let mut rows: Vec<CentralRow> = pairs
        .par_iter()
        .flat_map_iter(|&(m, n)| {
            let on = (m + n == 0) as i64;
            let mut out = Vec::new();
            let reg = f_mode(stat, comps, m + n).scale(&GaussianRational::new(rint(0), rint(n - m)));
            out.push(CentralRow {
                bracket: "FF".into(),
                m,
                n,
                measured: central_part(&fock, &f_mode(stat, comps, m), &f_mode(stat, comps, n), &reg, &probes),
                predicted: gr(s * comps as i64 * on * (m * m * m - m), 6),
            });
            for a in 0..comps {
                for b in 0..comps {
                    let reg = e_mode(stat, a, b, m + n).scale(&GaussianRational::new(rint(0), rint(n)));
                    out.push(CentralRow {
                        bracket: format!("FE[{a}{b}]"),
                        m,
                        n,
                        measured: central_part(&fock, &f_mode(stat, comps, m), &e_mode(stat, a, b, n), &reg, &probes),
                        predicted: GaussianRational::new(rint(0), crate::scalar::rat(-s * delta(a, b) * on * (m * m - m), 2)),
                    });
                    for c in 0..comps {
                        for d in 0..comps {
                            let mut reg = Operator::zero();
                            if c == b {
                                reg = reg.add(&e_mode(stat, a, d, m + n));
                            }
                            if a == d {
                                reg = reg.sub(&e_mode(stat, c, b, m + n));
                            }
                            out.push(CentralRow {
                                bracket: format!("EE[{a}{b},{c}{d}]"),
                                m,
                                n,
                                measured: central_part(&fock, &e_mode(stat, a, b, m), &e_mode(stat, c, d, n), &reg, &probes),
                                predicted: GaussianRational::from_int(s * m * on * delta(a, d) * delta(c, b)),
                            });
                        }
                    }
                }
            }
            out
        })
        .collect();
    rows.sort_by(|x, y| (x.m, x.n, &x.bracket).cmp(&(y.m, y.n, &y.bracket)));
    Ok(rows)
}

/// Zero-jet currents `T^μ_ν` with `ρ` matrices:
/// `[T^μ_ν(m), T^σ_τ(n)] = (δ^σ_ν T^μ_τ − δ^μ_τ T^σ_ν)(m+n) + s m (k1 δ^μ_τ δ^σ_ν + k2 δ^μ_ν δ^σ_τ) δ_{m+n}`,
/// `[L̂'(m), T^μ_ν(n)] = n T^μ_ν(m+n) + s k0 δ^μ_ν ((2λ−1)m² − (2w−1)m)/2 δ_{m+n}`.
pub fn kac_moody_check(r: &Realization, range: i64) -> Result<Vec<CentralRow>> {
    let spec = &r.spec;
    if spec.p != 0 || !spec.include_jets {
        return Err(EngineError::InvalidInput("Kac-Moody currents need a zero-jet".into()));
    }
    let stat = spec.statistics;
    let s = stat.sign();
    let n_dim = spec.n;
    let inv = closed_form_invariants(&spec.rep);
    let probes = current_probes(stat, r.jet_size(), 2);
    let t = |mu: usize, nu: usize, k: i64| matrix_mode(stat, &rho_matrix(&spec.rep, mu, nu), k);
    let lam = GaussianRational::real(spec.lambda.clone());
    let w = GaussianRational::real(spec.w.clone());
    let idx: Vec<(usize, usize)> = (0..n_dim).flat_map(|a| (0..n_dim).map(move |b| (a, b))).collect();
    let mut jobs = Vec::new();
    for m in -range..=range {
        for n in -range..=range {
            for &x in &idx {
                jobs.push((m, n, x));
            }
        }
    }
    let mut rows: Vec<CentralRow> = jobs
        .par_iter()
        .flat_map_iter(|&(m, n, (mu, nu))| {
            let on = GaussianRational::from_int((m + n == 0) as i64);
            let mut out = Vec::new();
            for &(si, ta) in &idx {
                let mut reg = Operator::zero();
                if si == nu {
                    reg = reg.add(&t(mu, ta, m + n));
                }
                if mu == ta {
                    reg = reg.sub(&t(si, nu, m + n));
                }
                let lvl = &inv.k1.scale(&rint(delta(mu, ta) * delta(si, nu)))
                    + &inv.k2.scale(&rint(delta(mu, nu) * delta(si, ta)));
                out.push(CentralRow {
                    bracket: format!("TT[{mu}{nu},{si}{ta}]"),
                    m,
                    n,
                    measured: central_part(&r.fock, &t(mu, nu, m), &t(si, ta, n), &reg, &probes),
                    predicted: &lvl.scale(&rint(s * m)) * &on,
                });
            }
            let reg = t(mu, nu, m + n).scale(&rint(n).into());
            let poly = &(&(&lam.scale(&rint(2)) - &GaussianRational::one()).scale(&rint(m * m))
                - &(&w.scale(&rint(2)) - &GaussianRational::one()).scale(&rint(m)))
                * &gr(s * delta(mu, nu), 2);
            out.push(CentralRow {
                bracket: format!("LT[{mu}{nu}]"),
                m,
                n,
                measured: central_part(&r.fock, &r.l_hat_jets(m), &t(mu, nu, n), &reg, &probes),
                predicted: &(&inv.k0 * &poly) * &on,
            });
            out
        })
        .collect();
    rows.sort_by(|x, y| (x.m, x.n, &x.bracket).cmp(&(y.m, y.n, &y.bracket)));
    Ok(rows)
}

/// All probe monomials, for diagnostics.
pub fn probe_monomials(states: &[State]) -> Vec<Monomial> {
    states.iter().flat_map(|s| s.terms().map(|(m, _)| m.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl_reps::TensorRepSpec;
    use crate::realization::FieldSpec;
    use crate::scalar::rat;

    fn count_pairs(k: i64) -> i64 {
        // independent brute force over a window
        let mut c = 0;
        for m in 1..50 {
            for n in -50..=0 {
                if m - n == k {
                    c += 1;
                }
                if n - m == k {
                    c -= 1;
                }
            }
        }
        c
    }

    #[test]
    fn delta_split_examples() {
        assert_eq!(delta_split_coefficient(DeltaVariant::I, 3), (gr(3, 1), gr(3, 1)));
        assert_eq!(delta_split_coefficient(DeltaVariant::I, 0), (gr(0, 1), gr(0, 1)));
        assert_eq!(delta_split_lhs(DeltaVariant::Iii, 2), gr(1, 1));
        assert_eq!(delta_split_lhs(DeltaVariant::Ii, 2), GaussianRational::new(rint(0), rint(1)));
        for k in -20..=20 {
            assert_eq!(delta_split_lhs(DeltaVariant::I, k), GaussianRational::from_int(count_pairs(k)));
        }
        assert!(delta_split_table(20).iter().all(|r| r.passed()));
    }

    #[test]
    fn heisenberg_split() {
        assert!(heisenberg_mode_checks(Statistics::Boson, 2, 3).unwrap() > 0);
        assert!(heisenberg_mode_checks(Statistics::Fermion, 2, 3).unwrap() > 0);
    }

    #[test]
    fn probes_are_distinct_and_bounded() {
        let p = current_probes(Statistics::Fermion, 1, 3);
        let mons = probe_monomials(&p);
        let uniq: BTreeSet<String> = mons.iter().map(|m| m.to_string()).collect();
        assert_eq!(uniq.len(), mons.len());
        assert!(mons.iter().all(|m| m.level() <= 3));
    }

    #[test]
    fn currents_single_pair() {
        for stat in [Statistics::Boson, Statistics::Fermion] {
            for row in fe_current_checks(stat, 1, 2).unwrap() {
                assert!(row.passed(), "{stat:?} {row:?}");
            }
        }
    }

    #[test]
    fn kac_moody_zero_jets() {
        for rep in [TensorRepSpec::scalar(2, rint(1)), TensorRepSpec::vector(2)] {
            for stat in [Statistics::Boson, Statistics::Fermion] {
                let spec = FieldSpec::new(rep.clone(), 0, stat, rat(1, 3), rint(2));
                let r = Realization::new(&spec).unwrap();
                for row in kac_moody_check(&r, 2).unwrap() {
                    assert!(row.passed(), "{} {row:?}", rep.label());
                }
            }
        }
    }
}
