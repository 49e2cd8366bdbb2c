//! Energies and cyclic states of the Fock representation.

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::fock::{apply_product, Field, ModeOp, Operator, State, Statistics};
use crate::gl_reps::TensorRepSpec;
use crate::multi_index::binom;
use crate::realization::Realization;
use crate::scalar::{gr, rint, GaussianRational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub label: String,
    /// `None` when the state vanishes or is not an H eigenstate.
    pub measured: Option<GaussianRational>,
    pub predicted: GaussianRational,
    /// `L̂(m)|s⟩ = 0` for every `m` in `lowering`.
    pub cyclic: bool,
    pub lowering: (i64, i64),
    pub state_is_zero: bool,
}

impl EnergyReport {
    pub fn passed(&self) -> bool {
        !self.state_is_zero && self.cyclic && self.measured.as_ref() == Some(&self.predicted)
    }
}

/// H-eigenvalue of a nonzero eigenstate.
pub fn energy_of(r: &Realization, s: &State) -> Option<GaussianRational> {
    if s.is_zero() {
        return None;
    }
    r.apply(&r.hamiltonian(), s).proportionality(s)
}

/// `L̂(m)|s⟩ = 0` for `lo <= m <= hi`.
pub fn annihilated_by_lowering(r: &Realization, s: &State, lo: i64, hi: i64) -> bool {
    (lo..=hi).all(|m| r.apply(&r.l_hat(m), s).is_zero())
}

fn report(r: &Realization, label: String, s: &State, predicted: GaussianRational, range: (i64, i64)) -> EnergyReport {
    EnergyReport {
        label,
        measured: energy_of(r, s),
        predicted,
        cyclic: annihilated_by_lowering(r, s, range.0, range.1),
        lowering: range,
        state_is_zero: s.is_zero(),
    }
}

/// `|n⟩ = φ̂(0)^n |0⟩` with energy `h + n w`, for a bosonic scalar zero-jet.
pub fn scalar_tower(r: &Realization, n_max: u32, range: (i64, i64)) -> Result<Vec<EnergyReport>> {
    let spec = &r.spec;
    if spec.statistics != Statistics::Boson || spec.p != 0 || spec.rep.dim() != 1 || !spec.include_jets {
        return Err(EngineError::InvalidInput("scalar tower needs a bosonic scalar zero-jet".into()));
    }
    let h = r.predicted_h();
    let w = GaussianRational::real(spec.w.clone());
    Ok((0..=n_max)
        .map(|n| {
            let modes = vec![ModeOp::new(Field::Phi, 0, 0); n as usize];
            let s = r.creators(&modes);
            let pred = &h + &w.scale(&rint(n as i64));
            report(r, format!("|{n}>"), &s, pred, range)
        })
        .collect())
}

/// Jet components with `lo <= |m| <= hi`.
fn components_in(r: &Realization, lo: u32, hi: u32) -> Vec<usize> {
    (0..r.jet_size())
        .filter(|&a| {
            let o = r.module.component(a).0.order();
            lo <= o && o <= hi
        })
        .collect()
}

/// `Ξ(k−1) .. Ξ(0)|0⟩` applied literally, rightmost factor first.
fn shell_state(r: &Realization, field: Field, comps: &[usize], freqs: &[i64]) -> State {
    let mut modes = Vec::new();
    for &n in freqs.iter().rev() {
        for &a in comps {
            modes.push(ModeOp::new(field, a, n));
        }
    }
    apply_product(&r.fock, &modes, &State::vacuum())
}

/// Closed-form energy of `|k, ell⟩` (`ell >= 0`) or `|k, −ell'−1⟩` (`ell < 0`).
pub fn predicted_shell_energy(r: &Realization, k: i64, ell: i64) -> GaussianRational {
    let spec = &r.spec;
    let n = spec.n as i64;
    let p = spec.p as i64;
    let dim = GaussianRational::from_int(spec.rep.dim() as i64);
    let w = GaussianRational::real(spec.w.clone());
    let h = r.predicted_h();
    let half = gr(1, 2);
    let two_w = w.scale(&rint(2));
    if ell >= 0 {
        let b = GaussianRational::from_int(binom(n + ell, ell) as i64);
        let q = &GaussianRational::from_int(k * k) + &(&two_w - &GaussianRational::from_int(1)).scale(&rint(k));
        &h + &(&(&half * &b) * &(&dim * &q))
    } else {
        let l = -ell - 1;
        let b = GaussianRational::from_int((binom(n + p, p) - binom(n + l - 1, l - 1)) as i64);
        let q = &GaussianRational::from_int(k * k) - &(&two_w + &GaussianRational::from_int(1)).scale(&rint(k));
        &h + &(&(&half * &b) * &(&dim * &q))
    }
}

/// Fermionic filled shells exactly as stated: `ell >= 0` uses `φ̂` with
/// `|m| <= ell`, `ell < 0` uses `π̂` with `ell' <= |m| <= p`, `ell' = −ell−1`,
/// at frequencies `0..k−1`. The momentum shells contain `π̂(0)`, which
/// annihilates the vacuum, so they vanish for `k >= 1`; the report says so.
pub fn fermionic_shell(r: &Realization, k: i64, ell: i64, range: (i64, i64)) -> Result<EnergyReport> {
    if r.spec.statistics != Statistics::Fermion {
        return Err(EngineError::InvalidInput("shell states need fermionic jets".into()));
    }
    let freqs: Vec<i64> = (0..k).collect();
    let s = if ell >= 0 {
        shell_state(r, Field::Phi, &components_in(r, 0, ell as u32), &freqs)
    } else {
        shell_state(r, Field::Pi, &components_in(r, (-ell - 1) as u32, r.spec.p), &freqs)
    };
    Ok(report(r, format!("|{k},{ell}>"), &s, predicted_shell_energy(r, k, ell), range))
}

/// Supplementary momentum shells at frequencies `1..k`, which avoid `π̂(0)`.
/// Each `π̂(n)` raises the energy by `n − w`, so the energy is
/// `h + (1/2)(binom(N+p,p) − binom(N+ell'−1, ell'−1)) dim (k² + (1−2w)k)`.
pub fn shifted_momentum_shell(r: &Realization, k: i64, ell_prime: u32, range: (i64, i64)) -> Result<EnergyReport> {
    if r.spec.statistics != Statistics::Fermion {
        return Err(EngineError::InvalidInput("shell states need fermionic jets".into()));
    }
    let freqs: Vec<i64> = (1..=k).collect();
    let s = shell_state(r, Field::Pi, &components_in(r, ell_prime, r.spec.p), &freqs);
    let spec = &r.spec;
    let (n, p, l) = (spec.n as i64, spec.p as i64, ell_prime as i64);
    let b = GaussianRational::from_int((binom(n + p, p) - binom(n + l - 1, l - 1)) as i64);
    let dim = GaussianRational::from_int(spec.rep.dim() as i64);
    let w = GaussianRational::real(spec.w.clone());
    let q = &GaussianRational::from_int(k * k + k) - &w.scale(&rint(2 * k));
    let pred = &r.predicted_h() + &(&(&gr(1, 2) * &b) * &(&dim * &q));
    Ok(report(r, format!("|{k},-{}> shifted", ell_prime + 1), &s, pred, range))
}

/// `L̂'(m)|0⟩ = ± Σ_{n=0}^{m−1} Σ_A (n − λm + w) Π^A(m−n) φ_A(n)|0⟩` for `1 <= m <= m_max`.
pub fn vacuum_action_check(r: &Realization, m_max: i64) -> Result<()> {
    let spec = &r.spec;
    let lam = GaussianRational::real(spec.lambda.clone());
    let w = GaussianRational::real(spec.w.clone());
    let s = spec.sign();
    let vac = State::vacuum();
    for m in 0..=m_max {
        let got = r.apply(&r.l_hat_jets(m), &vac);
        let mut expect = if m == 0 { vac.scale(&r.predicted_h()) } else { State::zero() };
        for n in 0..m {
            let c = &s * &(&(&GaussianRational::from_int(n) - &lam.scale(&rint(m))) + &w);
            for a in 0..r.jet_size() {
                let st = r.creators(&[ModeOp::new(Field::Pi, a, m - n), ModeOp::new(Field::Phi, a, n)]);
                expect = expect.add(&st.scale(&c));
            }
        }
        if got != expect {
            return Err(EngineError::Consistency(format!(
                "vacuum action of L'({m}) differs:\n{}\nexpected\n{}",
                got.debug_dump(),
                expect.debug_dump()
            )));
        }
    }
    Ok(())
}

/// Each creator shifts the energy by its frequency plus `w` for φ, `−w` for π.
pub fn grading_check(r: &Realization) -> Result<()> {
    let h = r.predicted_h();
    let w = GaussianRational::real(r.spec.w.clone());
    let h_op = r.hamiltonian();
    for s in r.probe_battery() {
        for (mono, _) in s.terms() {
            let mut e = h.clone();
            for m in &mono.0 {
                e += GaussianRational::from_int(m.freq);
                match m.field {
                    Field::Phi => e += w.clone(),
                    Field::Pi => e -= w.clone(),
                    _ => {}
                }
            }
            let basis = State::basis(mono.clone());
            if r.apply(&h_op, &basis) != basis.scale(&e) {
                return Err(EngineError::Consistency(format!("grading fails on {mono}")));
            }
        }
    }
    Ok(())
}

/// `[L̂(0), φ̂(0)] = w φ̂(0)`.
pub fn zero_mode_weight(r: &Realization) -> Option<GaussianRational> {
    let phi = ModeOp::new(Field::Phi, 0, 0);
    let c = r.commutator(&r.hamiltonian(), &Operator::mode(phi), &State::vacuum());
    c.proportionality(&r.creators(&[phi]))
}

/// Scalar rep helper used by the spectrum suites.
pub fn scalar_rep(n: usize) -> TensorRepSpec {
    TensorRepSpec::scalar(n, rint(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::FieldSpec;
    use crate::scalar::rat;

    #[test]
    fn vacuum_energy_examples() {
        let b = FieldSpec::new(scalar_rep(1), 0, Statistics::Boson, rint(0), rint(2));
        let r = Realization::new(&b).unwrap();
        assert_eq!(energy_of(&r, &State::vacuum()), Some(gr(-1, 1)));
        let f = FieldSpec { statistics: Statistics::Fermion, ..b.clone() };
        assert_eq!(energy_of(&Realization::new(&f).unwrap(), &State::vacuum()), Some(gr(1, 1)));
        let eq = FieldSpec::new(scalar_rep(2), 1, Statistics::Boson, rat(3, 2), rat(3, 2));
        assert_eq!(energy_of(&Realization::new(&eq).unwrap(), &State::vacuum()), Some(gr(0, 1)));
    }

    #[test]
    fn tower_and_zero_mode() {
        let b = FieldSpec::new(scalar_rep(1), 0, Statistics::Boson, rat(1, 2), rint(1));
        let r = Realization::new(&b).unwrap();
        assert_eq!(zero_mode_weight(&r), Some(gr(1, 1)));
        for rep in scalar_tower(&r, 3, (-4, -1)).unwrap() {
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn shells() {
        let f = FieldSpec::new(scalar_rep(2), 1, Statistics::Fermion, rint(0), rint(1));
        let r = Realization::new(&f).unwrap();
        let one = fermionic_shell(&r, 1, 1, (-4, -1)).unwrap();
        assert!(one.passed(), "{one:?}");
        assert_eq!(one.predicted, &r.predicted_h() + &gr(3, 1));
        let mom = fermionic_shell(&r, 1, -1, (-4, -1)).unwrap();
        assert!(mom.state_is_zero && !mom.passed());
        let shifted = shifted_momentum_shell(&r, 2, 0, (-4, -1)).unwrap();
        assert!(shifted.passed(), "{shifted:?}");
        vacuum_action_check(&r, 3).unwrap();
        grading_check(&r).unwrap();
    }
}
