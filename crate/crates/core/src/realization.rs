//! Fock-space generators of the extended diffeomorphism algebra.
//!
//! Every operator is assembled from `DensityTerm`s. With the momentum rescaling of
//! [`crate::fock`], `∫dt e^{ikt} (..) p(t)` and `∫dt e^{ikt} (..) π(t)` carry
//! coefficient 1, while `(1/2πi) ∫dt e^{ikt} F(q(t))` carries `−i`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::fields::{GaugeMap, LieAlgebraSpec, PolyVectorField};
use crate::fock::{apply, Factor, Field, Fock, ModeOp, Operator, State, Statistics};
use crate::gl_reps::{trace_invariants, TensorRepSpec, TraceInvariants};
use crate::jets::{JetMatrix, JetModule};
use crate::linalg::{solve_exact, SolveError};
use crate::multi_index::binom;
use crate::poly::TrigPoly;
use crate::scalar::{GaussianRational, Rational};

fn yes() -> bool {
    true
}

/// A p-jet field content together with its reparametrization weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub n: usize,
    pub p: u32,
    pub rep: TensorRepSpec,
    pub statistics: Statistics,
    /// Causal weight λ.
    #[serde(with = "crate::serde_util::rational")]
    pub lambda: Rational,
    /// Shift w.
    #[serde(with = "crate::serde_util::rational")]
    pub w: Rational,
    #[serde(default = "yes")]
    pub include_observer: bool,
    #[serde(default = "yes")]
    pub include_jets: bool,
}

impl FieldSpec {
    pub fn new(rep: TensorRepSpec, p: u32, statistics: Statistics, lambda: Rational, w: Rational) -> Self {
        FieldSpec { n: rep.n, p, rep, statistics, lambda, w, include_observer: true, include_jets: true }
    }

    /// N observer pairs and no jets.
    pub fn observer_only(n: usize) -> Self {
        FieldSpec {
            include_jets: false,
            ..Self::new(TensorRepSpec::scalar(n, Rational::zero()), 0, Statistics::Boson, Rational::zero(), Rational::zero())
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rep.n != self.n {
            return Err(EngineError::InvalidInput(format!("rep dimension {} differs from N = {}", self.rep.n, self.n)));
        }
        if self.n == 0 {
            return Err(EngineError::InvalidInput("N must be positive".into()));
        }
        Ok(())
    }

    /// `+1` for bosons, `−1` for fermions.
    pub fn sign(&self) -> GaussianRational {
        GaussianRational::from_int(self.statistics.sign())
    }

    pub fn label(&self) -> String {
        let stat = match self.statistics {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        };
        let mut s = format!(
            "N={} p={} {} {} λ={} w={}",
            self.n,
            self.p,
            self.rep.label(),
            stat,
            GaussianRational::real(self.lambda.clone()),
            GaussianRational::real(self.w.clone())
        );
        if !self.include_jets {
            s.push_str(" (observer only)");
        }
        if !self.include_observer {
            s.push_str(" (no observer)");
        }
        s
    }

    /// `(dim, k0, k1, k2)` of the tensor representation.
    pub fn invariants(&self) -> Result<TraceInvariants> {
        trace_invariants(&self.rep)
    }

    /// `binom(N+p+shift_top, p+shift_bottom)` as a scalar.
    pub fn binom(&self, top: i64, bottom: i64) -> GaussianRational {
        let n = self.n as i64 + self.p as i64 + top;
        GaussianRational::from_int(binom(n, self.p as i64 + bottom) as i64)
    }
}

/// Monomial of `q` modes: coefficient, time frequency and `q` factors.
pub type QTerm = (GaussianRational, i64, Vec<Factor>);

/// Generators of one field content on its Fock space.
#[derive(Clone)]
pub struct Realization {
    pub spec: FieldSpec,
    pub module: JetModule,
    pub fock: Fock,
    /// `q^0 = t` substituted everywhere (gauge-fixed reduction).
    pub gauge_fixed: bool,
}

impl Realization {
    pub fn new(spec: &FieldSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Realization {
            spec: spec.clone(),
            module: JetModule::new(&spec.rep, spec.p),
            fock: Fock::new(spec.statistics),
            gauge_fixed: false,
        })
    }

    pub fn with_gauge(spec: &FieldSpec, g: &LieAlgebraSpec) -> Result<Self> {
        spec.validate()?;
        g.validate()?;
        Ok(Realization {
            spec: spec.clone(),
            module: JetModule::with_gauge(&spec.rep, spec.p, g),
            fock: Fock::new(spec.statistics),
            gauge_fixed: false,
        })
    }

    /// Number of jet components `A = (m, α)`; zero when jets are switched off.
    pub fn jet_size(&self) -> usize {
        if self.spec.include_jets {
            self.module.size()
        } else {
            0
        }
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Expands `f(q(t))` into `q` factors. Under gauge fixing, `x^0` is
    /// replaced by `t`, so `e^{ik x^0}` turns into a time frequency.
    pub fn expand(&self, f: &TrigPoly) -> Result<Vec<QTerm>> {
        let mut out = Vec::with_capacity(f.len());
        for (key, c) in f.terms() {
            let mut factors = Vec::new();
            let mut freq = 0;
            for (mu, &e) in key.exps.0.iter().enumerate() {
                if self.gauge_fixed && mu == 0 {
                    if e > 0 {
                        return Err(EngineError::InvalidInput(
                            "gauge-fixed fields must be periodic in x^0 (no x^0 powers)".into(),
                        ));
                    }
                    continue;
                }
                for _ in 0..e {
                    factors.push(Factor::new(Field::Q, mu));
                }
            }
            if key.freq != 0 {
                if !self.gauge_fixed {
                    return Err(EngineError::InvalidInput(
                        "e^{ik x^0} factors require the gauge-fixed realization".into(),
                    ));
                }
                freq = key.freq;
            }
            out.push((c.clone(), freq, factors));
        }
        Ok(out)
    }

    /// `∫dt e^{i freq t} g(q) · extra`, each term scaled by `coeff`.
    pub fn density(&self, coeff: &GaussianRational, freq: i64, g: &TrigPoly, extra: &[Factor]) -> Result<Operator> {
        let mut op = Operator::zero();
        for (c, k, mut factors) in self.expand(g)? {
            factors.extend_from_slice(extra);
            op.push(&c * coeff, freq + k, factors);
        }
        Ok(op)
    }

    /// `∓ Σ_{A,B} :Π^A mat[A][B](q) φ_B:`.
    pub fn jet_bilinear(&self, mat: &JetMatrix) -> Result<Operator> {
        let mut op = Operator::zero();
        if !self.spec.include_jets {
            return Ok(op);
        }
        let c = -self.spec.sign();
        let size = mat.size();
        for a in 0..size {
            for b in 0..size {
                let e = mat.entry(a, b);
                if e.is_zero() {
                    continue;
                }
                let extra = [Factor::new(Field::Pi, a), Factor::new(Field::Phi, b)];
                op = op.add(&self.density(&c, 0, e, &extra)?);
            }
        }
        Ok(op)
    }

    /// `L_ξ = ∫ :ξ^μ(q) p_μ: + T(ξ(q))`.
    pub fn l_xi(&self, xi: &PolyVectorField) -> Result<Operator> {
        if xi.dim() != self.n() {
            return Err(EngineError::DimensionMismatch { expected: self.n(), got: xi.dim() });
        }
        let mut op = Operator::zero();
        if self.spec.include_observer {
            for mu in 0..self.n() {
                op = op.add(&self.density(&GaussianRational::one(), 0, xi.component(mu), &[Factor::new(Field::P, mu)])?);
            }
        }
        if self.spec.include_jets {
            op = op.add(&self.jet_bilinear(&self.module.jet_matrix_t(xi))?);
        }
        Ok(op.simplified())
    }

    /// The a3-shifted generator `L_ξ + (i a3/4πi) ∫ ∂_μξ^μ(q)`.
    pub fn l_xi_shifted(&self, xi: &PolyVectorField, a3_shift: &GaussianRational) -> Result<Operator> {
        // (i a/4πi)·∫F = (i a/2)·S_0(F)
        let c = GaussianRational::new(Zero::zero(), crate::scalar::rat(1, 2)) * a3_shift;
        Ok(self.l_xi(xi)?.add(&self.s0(0, &xi.divergence())?.scale(&c)))
    }

    /// Jet part `L̂'(m)` including its constant.
    pub fn l_hat_jets(&self, m: i64) -> Operator {
        let mut op = Operator::zero();
        if !self.spec.include_jets {
            return op;
        }
        let s = self.spec.sign();
        let lam = GaussianRational::real(self.spec.lambda.clone());
        let w = GaussianRational::real(self.spec.w.clone());
        let shift = &w - &lam.scale(&crate::scalar::rint(m));
        for a in 0..self.jet_size() {
            op.push(&s * &GaussianRational::i(), m, vec![Factor::new(Field::Pi, a), Factor::dot(Field::Phi, a, 1)]);
            op.push(&s * &shift, m, vec![Factor::new(Field::Pi, a), Factor::new(Field::Phi, a)]);
        }
        if m == 0 {
            op.constant = self.predicted_h();
        }
        op
    }

    /// Observer part `Σ n_1 :q^μ(n_1) P_μ(n_2):`.
    pub fn l_hat_observer(&self, m: i64) -> Operator {
        let mut op = Operator::zero();
        if !self.spec.include_observer {
            return op;
        }
        for mu in 0..self.n() {
            op.push(GaussianRational::i(), m, vec![Factor::dot(Field::Q, mu, 1), Factor::new(Field::P, mu)]);
        }
        op
    }

    /// `L̂(m) = −i ∫ e^{imt} L(t)`.
    pub fn l_hat(&self, m: i64) -> Operator {
        self.l_hat_observer(m).add(&self.l_hat_jets(m))
    }

    pub fn hamiltonian(&self) -> Operator {
        self.l_hat(0)
    }

    /// `S_0(e^{i freq t} g) = (1/2πi) ∫ e^{i freq t} g(q(t))`.
    pub fn s0(&self, freq: i64, g: &TrigPoly) -> Result<Operator> {
        Ok(self.density(&-GaussianRational::i(), freq, g, &[])?.simplified())
    }

    /// `S_1^ρ(e^{i freq t} g_ρ) = (1/2πi) ∫ e^{i freq t} q̇^ρ g_ρ(q(t))`.
    pub fn s1(&self, freq: i64, g: &[TrigPoly]) -> Result<Operator> {
        self.s_n(freq, &[], g)
    }

    /// `(1/2πi) ∫ e^{i freq t} q̇^{ν_1}..q̇^{ν_k} q̇^ρ g_ρ(q)`; with `fixed = [ν_1..]`.
    pub fn s_n(&self, freq: i64, fixed: &[usize], g: &[TrigPoly]) -> Result<Operator> {
        let mut op = Operator::zero();
        let base: Vec<Factor> = fixed.iter().map(|&nu| Factor::dot(Field::Q, nu, 1)).collect();
        for (rho, gr) in g.iter().enumerate() {
            let mut extra = base.clone();
            extra.push(Factor::dot(Field::Q, rho, 1));
            op = op.add(&self.density(&-GaussianRational::i(), freq, gr, &extra)?);
        }
        Ok(op.simplified())
    }

    /// `(1/2πi) ∫ e^{i freq t} q̈^ρ q̇^{ν_1}..q̇^{ν_k} g_ρ(q)`.
    pub fn r_n(&self, freq: i64, fixed: &[usize], g: &[TrigPoly]) -> Result<Operator> {
        let mut op = Operator::zero();
        let base: Vec<Factor> = fixed.iter().map(|&nu| Factor::dot(Field::Q, nu, 1)).collect();
        for (rho, gr) in g.iter().enumerate() {
            let mut extra = base.clone();
            extra.push(Factor::dot(Field::Q, rho, 2));
            op = op.add(&self.density(&-GaussianRational::i(), freq, gr, &extra)?);
        }
        Ok(op.simplified())
    }

    /// `J_X = ∓ Σ :π J(X(q)) φ:`.
    pub fn j_x(&self, x: &GaugeMap) -> Result<Operator> {
        Ok(self.jet_bilinear(&self.module.jet_matrix_j(x))?.simplified())
    }

    /// Lowest energy `∓(1/2) binom(N+p,p) dim ((w−1/2)² − (λ−1/2)²)`.
    pub fn predicted_h(&self) -> GaussianRational {
        if !self.spec.include_jets {
            return GaussianRational::zero();
        }
        let lam = GaussianRational::real(self.spec.lambda.clone());
        let w = GaussianRational::real(self.spec.w.clone());
        let half = crate::scalar::gr(1, 2);
        let diff = &(&(&w - &half) * &(&w - &half)) - &(&(&lam - &half) * &(&lam - &half));
        let dim = GaussianRational::from_int(self.spec.rep.dim() as i64);
        -&(&(&self.spec.sign() * &half) * &(&(&self.spec.binom(0, 0) * &dim) * &diff))
    }

    pub fn apply(&self, op: &Operator, s: &State) -> State {
        apply(&self.fock, op, s)
    }

    pub fn commutator(&self, a: &Operator, b: &Operator, s: &State) -> State {
        crate::fock::commutator_apply(&self.fock, a, b, s)
    }

    pub fn creators(&self, modes: &[ModeOp]) -> State {
        State::from_creators(&self.fock, modes)
    }

    /// Probe states: vacuum, single creators and momentum-carrying pairs.
    pub fn probe_battery(&self) -> Vec<State> {
        let first = self.gauge_fixed as usize;
        let mut singles = Vec::new();
        for mu in first..self.n() {
            singles.push(ModeOp::new(Field::Q, mu, 0));
            singles.push(ModeOp::new(Field::Q, mu, 1));
            singles.push(ModeOp::new(Field::P, mu, 1));
            singles.push(ModeOp::new(Field::P, mu, 2));
        }
        for a in 0..self.jet_size() {
            singles.push(ModeOp::new(Field::Phi, a, 0));
            singles.push(ModeOp::new(Field::Phi, a, 1));
            singles.push(ModeOp::new(Field::Pi, a, 1));
        }
        let mut out = vec![State::vacuum()];
        out.extend(singles.iter().map(|m| self.creators(&[*m])));
        for mu in first..self.n() {
            let p1 = ModeOp::new(Field::P, mu, 1);
            for s in &singles {
                let st = self.creators(&[p1, *s]);
                if !st.is_zero() {
                    out.push(st);
                }
            }
        }
        if self.jet_size() > 0 {
            let pi1 = ModeOp::new(Field::Pi, 0, 1);
            for s in &singles {
                let st = self.creators(&[pi1, *s]);
                if !st.is_zero() {
                    out.push(st);
                }
            }
        }
        out
    }
}

/// Solves `target_i = Σ_j x_j basis[j]_i` exactly over all samples `i`.
pub fn fit_states(targets: &[State], basis: &[Vec<State>]) -> std::result::Result<Vec<GaussianRational>, SolveError> {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (i, t) in targets.iter().enumerate() {
        let mut monos: Vec<&crate::fock::Monomial> = t.terms().map(|(m, _)| m).collect();
        for b in basis {
            monos.extend(b[i].terms().map(|(m, _)| m));
        }
        monos.sort();
        monos.dedup();
        for m in monos {
            rows.push(basis.iter().map(|b| b[i].coefficient(m)).collect());
            rhs.push(t.coefficient(m));
        }
    }
    if rows.is_empty() {
        return if basis.is_empty() { Ok(Vec::new()) } else { Err(SolveError::Underdetermined((0..basis.len()).collect())) };
    }
    solve_exact(&rows, &rhs, basis.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gr, rat, rint};

    fn scalar_spec(stat: Statistics, lambda: Rational, w: Rational) -> FieldSpec {
        FieldSpec::new(TensorRepSpec::scalar(1, rint(0)), 0, stat, lambda, w)
    }

    #[test]
    fn l_hat_mode_relations() {
        let spec = scalar_spec(Statistics::Boson, rat(1, 3), rat(2, 1));
        let r = Realization::new(&spec).unwrap();
        let lam = gr(1, 3);
        let w = gr(2, 1);
        for m in -2i64..=2 {
            for n in 0i64..=2 {
                let got = r.commutator(&r.l_hat(m), &Operator::mode(ModeOp::new(Field::Phi, 0, n)), &State::vacuum());
                let expect_coeff = &(&GaussianRational::from_int(n + m) - &lam.scale(&rint(m))) + &w;
                let expect = r.apply(&Operator::mode(ModeOp::new(Field::Phi, 0, m + n)), &State::vacuum()).scale(&expect_coeff);
                assert_eq!(got, expect, "phi m={m} n={n}");
                let q = ModeOp::new(Field::Q, 0, n);
                let got = r.commutator(&r.l_hat(m), &Operator::mode(q), &State::vacuum());
                let expect = r
                    .apply(&Operator::mode(ModeOp::new(Field::Q, 0, m + n)), &State::vacuum())
                    .scale(&GaussianRational::from_int(m + n));
                assert_eq!(got, expect, "q m={m} n={n}");
            }
        }
    }

    #[test]
    fn constant_translation_kills_vacuum() {
        let spec = FieldSpec::new(TensorRepSpec::vector(2), 1, Statistics::Boson, rint(0), rint(0));
        let r = Realization::new(&spec).unwrap();
        let xi = PolyVectorField::monomial(2, 1, gr(1, 1), 0, &[0, 0]);
        assert!(r.apply(&r.l_xi(&xi).unwrap(), &State::vacuum()).is_zero());
    }

    #[test]
    fn l_xi_moves_q_along_xi() {
        let spec = FieldSpec::new(TensorRepSpec::vector(2), 1, Statistics::Fermion, rint(0), rint(0));
        let r = Realization::new(&spec).unwrap();
        let xi = PolyVectorField::monomial(2, 0, gr(1, 1), 0, &[1, 1]);
        // [L_ξ, q^0(n)] = mode n of q^0 q^1
        let vac = State::vacuum();
        for n in 0..3 {
            let got = r.commutator(&r.l_xi(&xi).unwrap(), &Operator::mode(ModeOp::new(Field::Q, 0, n)), &vac);
            let mut expect = Operator::zero();
            expect.push(gr(1, 1), n, vec![Factor::new(Field::Q, 0), Factor::new(Field::Q, 1)]);
            assert_eq!(got, r.apply(&expect, &vac));
        }
    }

    #[test]
    fn closed_chain_identity() {
        let spec = FieldSpec::new(TensorRepSpec::scalar(2, rint(0)), 0, Statistics::Boson, rint(0), rint(0));
        let r = Realization::new(&spec).unwrap();
        let f = &TrigPoly::monomial(2, gr(2, 1), &[2, 1]) + &TrigPoly::monomial(2, gr(-1, 3), &[0, 3]);
        for k in -2..=2 {
            let dt = r.s0(k, &f.scale(&GaussianRational::new(rint(0), rint(k)))).unwrap();
            let grads: Vec<TrigPoly> = (0..2).map(|mu| f.deriv(mu)).collect();
            let total = dt.add(&r.s1(k, &grads).unwrap());
            for s in r.probe_battery() {
                assert!(r.apply(&total, &s).is_zero(), "k={k}");
            }
        }
    }

    #[test]
    fn s1_constant_kills_vacuum() {
        let r = Realization::new(&scalar_spec(Statistics::Boson, rint(0), rint(0))).unwrap();
        let op = r.s1(0, &[TrigPoly::one(1)]).unwrap();
        assert!(r.apply(&op, &State::vacuum()).is_zero());
    }
}
