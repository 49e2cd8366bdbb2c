//! Abelian charges of the diffeomorphism sector: closed forms and exact measurement.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::fields::{vf_commutator, PolyVectorField};
use crate::fock::{Factor, Field, Operator, State};
use crate::gl_reps::rho_matrix;
use crate::multi_index::MultiIndex;
use crate::linalg::SolveError;
use crate::poly::TrigPoly;
use crate::realization::{fit_states, FieldSpec, Realization};
use crate::scalar::{gr, rint, GaussianRational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroCharges {
    pub c1: GaussianRational,
    pub c2: GaussianRational,
    pub c3: GaussianRational,
    pub a3: GaussianRational,
    pub c4: GaussianRational,
    pub h: GaussianRational,
}

/// Closed-form charges of a field content.
pub fn predict_dro(spec: &FieldSpec) -> Result<DroCharges> {
    let obs = if spec.include_observer { 1 } else { 0 };
    let mut c = DroCharges {
        c1: GaussianRational::from_int(obs),
        c2: GaussianRational::zero(),
        c3: GaussianRational::from_int(obs),
        a3: GaussianRational::from_int(obs),
        c4: GaussianRational::from_int(2 * obs * spec.n as i64),
        h: GaussianRational::zero(),
    };
    if !spec.include_jets {
        return Ok(c);
    }
    let inv = spec.invariants()?;
    let s = spec.sign();
    let b0 = spec.binom(0, 0);
    let b1 = spec.binom(0, -1);
    let lam = GaussianRational::real(spec.lambda.clone());
    let w = GaussianRational::real(spec.w.clone());
    let one = GaussianRational::from_int(1);
    let two = GaussianRational::from_int(2);

    c.c1 += &s * &(&(&b0 * &inv.k1) + &(&spec.binom(1, -1) * &inv.dim));
    c.c2 = &s * &(&(&(&b0 * &inv.k2) + &(&spec.binom(0, -2) * &inv.dim)) + &(&two * &(&b1 * &inv.k0)));
    let common = &(&b0 * &inv.k0) + &(&b1 * &inv.dim);
    c.c3 += &(&s * &(&(&two * &lam) - &one)) * &common;
    c.a3 += &(&s * &(&(&two * &w) - &one)) * &common;
    let poly = &(&one - &lam.scale(&rint(6))) + &(&lam * &lam).scale(&rint(6));
    c.c4 += &(&(&s * &two) * &poly) * &(&b0 * &inv.dim);
    let half = gr(1, 2);
    let diff = &(&(&w - &half) * &(&w - &half)) - &(&(&lam - &half) * &(&lam - &half));
    c.h = -&(&(&(&s * &half) * &b0) * &(&inv.dim * &diff));
    Ok(c)
}

/// Outcome of a two-parameter fit. A component is `None` when the bracket
/// does not determine it: its density vanishes on every probe, or the two
/// densities coincide so only the sum is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFit {
    pub first: Option<GaussianRational>,
    pub second: Option<GaussianRational>,
    pub sum: Option<GaussianRational>,
}

impl PairFit {
    /// True if the closed-form pair agrees with every determined quantity.
    pub fn consistent_with(&self, a: &GaussianRational, b: &GaussianRational) -> bool {
        self.first.as_ref().is_none_or(|x| x == a)
            && self.second.as_ref().is_none_or(|x| x == b)
            && self.sum.as_ref().is_none_or(|x| *x == a + b)
    }

    pub fn is_determined(&self) -> bool {
        self.first.is_some() && self.second.is_some()
    }
}

fn all_zero(v: &[State]) -> bool {
    v.iter().all(State::is_zero)
}

/// Solves `target = x b1 + y b2` sample-wise, reporting undetermined parts.
pub fn fit_pair(targets: &[State], b1: Vec<State>, b2: Vec<State>, context: &str) -> Result<PairFit> {
    let z1 = all_zero(&b1);
    let z2 = all_zero(&b2);
    let none = PairFit { first: None, second: None, sum: None };
    if z1 && z2 {
        if let Some(t) = targets.iter().find(|t| !t.is_zero()) {
            return Err(EngineError::Consistency(format!("{context}: defect outside the density span:\n{}", t.debug_dump())));
        }
        return Ok(none);
    }
    if z2 {
        let x = fit_states(targets, &[b1]).map_err(solve_err(context))?;
        return Ok(PairFit { first: Some(x[0].clone()), ..none });
    }
    if z1 {
        let x = fit_states(targets, &[b2]).map_err(solve_err(context))?;
        return Ok(PairFit { second: Some(x[0].clone()), ..none });
    }
    if b1 == b2 {
        let x = fit_states(targets, &[b1]).map_err(solve_err(context))?;
        return Ok(PairFit { sum: Some(x[0].clone()), ..none });
    }
    let x = fit_states(targets, &[b1, b2]).map_err(solve_err(context))?;
    Ok(PairFit { first: Some(x[0].clone()), second: Some(x[1].clone()), sum: Some(&x[0] + &x[1]) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasuredDro {
    /// `(c1, c2)`; undetermined for N = 1, where `S_1(F) = ∫ d/dt G(q) = 0`.
    pub c12: PairFit,
    pub c3: GaussianRational,
    pub a3: GaussianRational,
    pub c4: GaussianRational,
    /// From `[L̂(m), L̂(−m)]|0⟩`.
    pub h: GaussianRational,
    /// Eigenvalue of `H = L̂(0)` on the vacuum.
    pub h_energy: GaussianRational,
}

impl MeasuredDro {
    /// Exact agreement with the closed forms on every identified charge.
    pub fn matches(&self, p: &DroCharges) -> bool {
        self.c12.consistent_with(&p.c1, &p.c2)
            && self.c3 == p.c3 && self.a3 == p.a3 && self.c4 == p.c4 && self.h == p.h && self.h_energy == p.h
    }
}

fn solve_err(context: &str) -> impl Fn(SolveError) -> EngineError + '_ {
    move |kind| EngineError::Solve { context: context.to_string(), kind }
}

/// `∂_ρ∂_νξ^μ ∂_μη^ν` and `∂_ρ∂_μξ^μ ∂_νη^ν` as covector densities.
pub fn c1_c2_densities(xi: &PolyVectorField, eta: &PolyVectorField) -> (Vec<TrigPoly>, Vec<TrigPoly>) {
    let n = xi.dim();
    let div_xi = xi.divergence();
    let div_eta = eta.divergence();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for rho in 0..n {
        let mut s = TrigPoly::zero(n);
        for mu in 0..n {
            for nu in 0..n {
                let d = xi.component(mu).deriv(nu).deriv(rho);
                s = &s + &(&d * &eta.component(nu).deriv(mu));
            }
        }
        a.push(s);
        b.push(&div_xi.deriv(rho) * &div_eta);
    }
    (a, b)
}

/// Default quadratic field pairs for the c1/c2 measurement.
pub fn default_pairs(n: usize) -> Vec<(PolyVectorField, PolyVectorField)> {
    let l = n - 1;
    let mono = |mu: usize, e: &[(usize, u32)]| {
        let mut exps = vec![0u32; n];
        for &(i, k) in e {
            exps[i] += k;
        }
        PolyVectorField::monomial(n, mu, gr(1, 1), 0, &exps)
    };
    vec![
        (mono(0, &[(l, 2)]), mono(l, &[(0, 2)])),
        (mono(0, &[(0, 1), (l, 1)]), mono(l, &[(0, 1), (l, 1)])),
        (mono(0, &[(0, 2)]), mono(l, &[(0, 1), (l, 1)]).add(&mono(0, &[(l, 1)]))),
    ]
}

/// Alternative pairs used to re-measure (charge universality).
pub fn alternative_pairs(n: usize) -> Vec<(PolyVectorField, PolyVectorField)> {
    let l = n - 1;
    let mono = |mu: usize, c: i64, e: &[(usize, u32)]| {
        let mut exps = vec![0u32; n];
        for &(i, k) in e {
            exps[i] += k;
        }
        PolyVectorField::monomial(n, mu, gr(c, 1), 0, &exps)
    };
    vec![
        (mono(0, 3, &[(l, 2)]).add(&mono(l, 1, &[(0, 1)])), mono(l, 1, &[(0, 2)]).add(&mono(0, -2, &[(0, 1)]))),
        (mono(l, 1, &[(0, 1), (l, 1)]).add(&mono(0, 2, &[(0, 2)])), mono(0, 1, &[(0, 1), (l, 1)]).add(&mono(l, 2, &[(l, 2)]))),
    ]
}

/// Field with non-constant divergence used for c3/a3.
pub fn default_div_field(n: usize) -> PolyVectorField {
    let mut exps = vec![0u32; n];
    exps[0] = 2;
    let mut f = PolyVectorField::monomial(n, 0, gr(1, 1), 0, &exps);
    if n > 1 {
        let mut e2 = vec![0u32; n];
        e2[0] = 1;
        e2[n - 1] = 1;
        f = f.add(&PolyVectorField::monomial(n, n - 1, gr(1, 1), 0, &e2));
    }
    f
}

/// Defect `[L_ξ, L_η] − L_[ξ,η]` on one state.
pub fn dro_defect(r: &Realization, lx: &Operator, le: &Operator, lc: &Operator, s: &State) -> State {
    r.commutator(lx, le, s).sub(&r.apply(lc, s))
}

/// Solves `[L_ξ, L_η] − L_[ξ,η] = S_1^ρ(c1 A + c2 B)` over pairs and probes.
pub fn measure_c1_c2(
    r: &Realization,
    pairs: &[(PolyVectorField, PolyVectorField)],
    a3_shift: &GaussianRational,
) -> Result<PairFit> {
    let probes = r.probe_battery();
    let mut targets = Vec::new();
    let mut ba = Vec::new();
    let mut bb = Vec::new();
    for (xi, eta) in pairs {
        let comm = vf_commutator(xi, eta)?;
        let lx = r.l_xi_shifted(xi, a3_shift)?;
        let le = r.l_xi_shifted(eta, a3_shift)?;
        let lc = r.l_xi_shifted(&comm, a3_shift)?;
        let (da, db) = c1_c2_densities(xi, eta);
        let sa = r.s1(0, &da)?;
        let sb = r.s1(0, &db)?;
        let rows: Vec<(State, State, State)> = probes
            .par_iter()
            .map(|s| (dro_defect(r, &lx, &le, &lc, s), r.apply(&sa, s), r.apply(&sb, s)))
            .collect();
        for (t, a, b) in rows {
            targets.push(t);
            ba.push(a);
            bb.push(b);
        }
    }
    fit_pair(&targets, ba, bb, "c1/c2")
}

/// Solves `[L̂(m), L_ξ] = (im/2)(m c3 − a3) S_0(e^{imt} ∂_μξ^μ)` for m = 1, 2.
pub fn measure_c3_a3(r: &Realization, xi: &PolyVectorField, a3_shift: &GaussianRational) -> Result<(GaussianRational, GaussianRational)> {
    let probes = r.probe_battery();
    let lx = r.l_xi_shifted(xi, a3_shift)?;
    let div = xi.divergence();
    let mut targets = Vec::new();
    let mut bc = Vec::new();
    let mut ba = Vec::new();
    for m in 1..=2i64 {
        let lm = r.l_hat(m);
        let s0 = r.s0(m, &div)?;
        let kc = GaussianRational::new(Zero::zero(), crate::scalar::rat(m * m, 2));
        let ka = GaussianRational::new(Zero::zero(), crate::scalar::rat(-m, 2));
        let rows: Vec<(State, State)> =
            probes.par_iter().map(|s| (r.commutator(&lm, &lx, s), r.apply(&s0, s))).collect();
        for (t, b) in rows {
            targets.push(t);
            bc.push(b.scale(&kc));
            ba.push(b.scale(&ka));
        }
    }
    let x = fit_states(&targets, &[bc, ba]).map_err(solve_err("c3/a3"))?;
    Ok((x[0].clone(), x[1].clone()))
}

/// Reads `(c4, h)` from `[L̂(m), L̂(−m)]|0⟩ = (−2mh − c4(m³−m)/12)|0⟩`, m = 1, 2.
pub fn measure_c4_h(r: &Realization) -> Result<(GaussianRational, GaussianRational)> {
    let vac = State::vacuum();
    let mut targets = Vec::new();
    let mut bc = Vec::new();
    let mut bh = Vec::new();
    for m in 1..=2i64 {
        targets.push(r.commutator(&r.l_hat(m), &r.l_hat(-m), &vac));
        bc.push(vac.scale(&gr(-(m * m * m - m), 12)));
        bh.push(vac.scale(&GaussianRational::from_int(-2 * m)));
    }
    let x = fit_states(&targets, &[bc, bh]).map_err(solve_err("c4/h"))?;
    Ok((x[0].clone(), x[1].clone()))
}

/// `H|0⟩ = h|0⟩`.
pub fn vacuum_energy(r: &Realization) -> Result<GaussianRational> {
    let vac = State::vacuum();
    r.apply(&r.hamiltonian(), &vac)
        .proportionality(&vac)
        .ok_or_else(|| EngineError::Consistency("vacuum is not an H eigenstate".into()))
}

/// Checks `[L̂(m), L̂(n)] = (n−m)L̂(m+n) − (c4/12)(m³−m)δ_{m+n}` on probes.
pub fn check_virasoro(r: &Realization, c4: &GaussianRational, range: i64) -> Result<()> {
    let probes = r.probe_battery();
    let ops: Vec<(i64, Operator)> = (-2 * range..=2 * range).map(|m| (m, r.l_hat(m))).collect();
    let op = |m: i64| &ops[(m + 2 * range) as usize].1;
    let pairs: Vec<(i64, i64)> = (-range..=range).flat_map(|m| (-range..=range).map(move |n| (m, n))).collect();
    pairs.par_iter().try_for_each(|&(m, n)| {
        for s in &probes {
            let lhs = r.commutator(op(m), op(n), s);
            let mut rhs = r.apply(op(m + n), s).scale(&GaussianRational::from_int(n - m));
            if m + n == 0 {
                rhs = rhs.sub(&s.scale(&(c4 * &gr(m * m * m - m, 12))));
            }
            if lhs != rhs {
                return Err(EngineError::Consistency(format!(
                    "Virasoro bracket fails for m={m}, n={n} on state\n{}",
                    s.debug_dump()
                )));
            }
        }
        Ok(())
    })
}

/// Measures all diffeomorphism-sector charges with optional a3 shift.
pub fn measure_dro(r: &Realization, a3_shift: &GaussianRational) -> Result<MeasuredDro> {
    let c12 = measure_c1_c2(r, &default_pairs(r.n()), a3_shift)?;
    let (c3, a3) = measure_c3_a3(r, &default_div_field(r.n()), a3_shift)?;
    let (c4, h) = measure_c4_h(r)?;
    let h_energy = vacuum_energy(r)?;
    Ok(MeasuredDro { c12, c3, a3, c4, h, h_energy })
}

/// `∂̌_μ (f(q) φ_{β,k}) = ∂_μ f φ_{β,k} + f φ_{β,k+μ}` on linear forms in the jets.
fn check_derivative(form: &BTreeMap<(MultiIndex, usize), TrigPoly>, mu: usize) -> BTreeMap<(MultiIndex, usize), TrigPoly> {
    let mut out: BTreeMap<(MultiIndex, usize), TrigPoly> = BTreeMap::new();
    let mut put = |key: (MultiIndex, usize), f: TrigPoly| {
        if f.is_zero() {
            return;
        }
        let e = out.entry(key).or_insert_with(|| TrigPoly::zero(f.nvars()));
        *e = &*e + &f;
    };
    for ((k, beta), f) in form {
        put((k.clone(), *beta), f.deriv(mu));
        put((k.plus_unit(mu), *beta), f.clone());
    }
    out.retain(|_, f| !f.is_zero());
    out
}

/// The generator written through the prolongation map:
/// `∫ ξ^μ (p_μ ± π^m φ_{m+μ}) ∓ π^m ∂̌_m(ξ^μ φ_μ + ∂_νξ^μ ρ(T^ν_μ) φ)`.
pub fn l_xi_rewritten(r: &Realization, xi: &PolyVectorField) -> Result<Operator> {
    let n = r.n();
    let rep = &r.spec.rep;
    let vdim = rep.dim();
    let mut mat = r.module.zero_matrix();
    if r.spec.include_jets {
        for alpha in 0..vdim {
            let mut base: BTreeMap<(MultiIndex, usize), TrigPoly> = BTreeMap::new();
            let mut acc = |key: (MultiIndex, usize), f: TrigPoly| {
                if !f.is_zero() {
                    let e = base.entry(key).or_insert_with(|| TrigPoly::zero(n));
                    *e = &*e + &f;
                }
            };
            for mu in 0..n {
                acc((MultiIndex::unit(n, mu), alpha), xi.component(mu).clone());
                for nu in 0..n {
                    let rho = rho_matrix(rep, nu, mu);
                    for beta in 0..vdim {
                        let c = &rho[(alpha, beta)];
                        if !c.is_zero() {
                            acc((MultiIndex::zero(n), beta), xi.component(mu).deriv(nu).scale(c));
                        }
                    }
                }
            }
            for m in r.module.basis() {
                let mut form = base.clone();
                for mu in 0..n {
                    for _ in 0..m.0[mu] {
                        form = check_derivative(&form, mu);
                    }
                }
                let row = r.module.index(m, alpha).expect("row in module");
                let mut entries = form;
                for mu in 0..n {
                    let key = (m.plus_unit(mu), alpha);
                    let e = entries.entry(key).or_insert_with(|| TrigPoly::zero(n));
                    *e = &*e - xi.component(mu);
                }
                for ((k, beta), f) in entries {
                    if f.is_zero() {
                        continue;
                    }
                    let col = r.module.index(&k, beta).ok_or_else(|| {
                        EngineError::Consistency(format!("rewritten generator keeps a jet of order {}", k.order()))
                    })?;
                    let e = mat.entry_mut(row, col);
                    *e = &*e + &f;
                }
            }
        }
    }
    let mut op = Operator::zero();
    if r.spec.include_observer {
        for mu in 0..n {
            op = op.add(&r.density(&GaussianRational::one(), 0, xi.component(mu), &[Factor::new(Field::P, mu)])?);
        }
    }
    Ok(op.add(&r.jet_bilinear(&mat)?).simplified())
}

/// Both constructions of `L_ξ` agree on every probe state.
pub fn check_lxid(r: &Realization, xi: &PolyVectorField) -> Result<()> {
    let a = r.l_xi(xi)?;
    let b = l_xi_rewritten(r, xi)?;
    for s in r.probe_battery() {
        if r.apply(&a, &s) != r.apply(&b, &s) {
            return Err(EngineError::Consistency(format!("rewritten L_xi differs on {s}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Statistics;
    use crate::gl_reps::TensorRepSpec;
    use crate::scalar::rat;

    fn zero() -> GaussianRational {
        GaussianRational::zero()
    }

    #[test]
    fn prediction_anchors() {
        let obs = predict_dro(&FieldSpec::observer_only(2)).unwrap();
        assert_eq!(obs.c4, GaussianRational::from_int(4));
        let b = FieldSpec::new(TensorRepSpec::scalar(1, rint(0)), 0, Statistics::Boson, rint(0), rint(0));
        let pb = predict_dro(&b).unwrap();
        assert_eq!(pb.c4, GaussianRational::from_int(4));
        assert_eq!((pb.c1.clone(), pb.c2.clone(), pb.c3.clone(), pb.a3.clone(), pb.h.clone()), (gr(1, 1), zero(), gr(1, 1), gr(1, 1), zero()));
        let f = FieldSpec::new(TensorRepSpec::scalar(1, rint(0)), 0, Statistics::Fermion, rint(2), rint(0));
        assert_eq!(predict_dro(&f).unwrap().c4, GaussianRational::from_int(2 - 26));
        let v = FieldSpec::new(TensorRepSpec::vector(2), 0, Statistics::Boson, rint(0), rint(0));
        let pv = predict_dro(&v).unwrap();
        assert_eq!((pv.c1, pv.c2, pv.c3), (gr(2, 1), zero(), gr(2, 1)));
        let hb = FieldSpec::new(TensorRepSpec::scalar(1, rint(0)), 0, Statistics::Boson, rint(0), rint(2));
        assert_eq!(predict_dro(&hb).unwrap().h, gr(-1, 1));
        let half = FieldSpec::new(TensorRepSpec::vector(2), 1, Statistics::Fermion, rat(1, 2), rint(1));
        assert_eq!(predict_dro(&half).unwrap().c3, gr(1, 1));
    }

    #[test]
    fn measured_small_cases() {
        for spec in [
            FieldSpec::new(TensorRepSpec::scalar(1, rint(0)), 0, Statistics::Boson, rint(0), rint(0)),
            FieldSpec::new(TensorRepSpec::vector(2), 0, Statistics::Boson, rint(0), rint(1)),
            FieldSpec::new(TensorRepSpec::scalar(2, rint(1)), 1, Statistics::Fermion, rat(1, 2), rint(0)),
        ] {
            let r = Realization::new(&spec).unwrap();
            let m = measure_dro(&r, &zero()).unwrap();
            let p = predict_dro(&spec).unwrap();
            assert!(m.matches(&p), "{}: measured {m:?} predicted {p:?}", spec.label());
        }
    }
    #[test]
    fn rewritten_generator_matches() {
        for rep in [TensorRepSpec::scalar(2, rint(1)), TensorRepSpec::vector(2), TensorRepSpec::covector(2)] {
            for p in 0..=2 {
                let spec = FieldSpec::new(rep.clone(), p, Statistics::Fermion, rint(0), rint(0));
                let r = Realization::new(&spec).unwrap();
                for (xi, eta) in default_pairs(2) {
                    check_lxid(&r, &xi).unwrap();
                    check_lxid(&r, &eta).unwrap();
                }
            }
        }
    }
}
