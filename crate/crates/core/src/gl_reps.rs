//! gl(N) tensor-density representations and their trace invariants.
//!
//! Basis convention: `T^μ_ν` with `[T^μ_ν, T^σ_τ] = δ^σ_ν T^μ_τ - δ^μ_τ T^σ_ν`.
//! Tensor components are indexed by tuples `(σ_1..σ_p, τ_1..τ_q)` in
//! lexicographic order, upper indices first.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::linalg::Matrix;
use crate::multi_index::{binom, multi_indices_of_order, MultiIndex};
use crate::scalar::{rint, GaussianRational, Rational};

/// Unconstrained tensor density with `upper` contravariant and `lower`
/// covariant indices and density weight `weight` (κ).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorRepSpec {
    pub n: usize,
    pub upper: u32,
    pub lower: u32,
    #[serde(with = "crate::serde_util::rational")]
    pub weight: Rational,
}

impl TensorRepSpec {
    pub fn scalar(n: usize, weight: Rational) -> Self {
        TensorRepSpec { n, upper: 0, lower: 0, weight }
    }

    pub fn vector(n: usize) -> Self {
        TensorRepSpec { n, upper: 1, lower: 0, weight: Rational::zero() }
    }

    pub fn covector(n: usize) -> Self {
        TensorRepSpec { n, upper: 0, lower: 1, weight: Rational::zero() }
    }

    pub fn dim(&self) -> usize {
        self.n.pow(self.upper + self.lower)
    }

    fn rank(&self) -> usize {
        (self.upper + self.lower) as usize
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let r = self.rank();
        let mut d = vec![0; r];
        for k in (0..r).rev() {
            d[k] = idx % self.n;
            idx /= self.n;
        }
        d
    }

    fn index_of(&self, d: &[usize]) -> usize {
        d.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    pub fn label(&self) -> String {
        format!("T[{},{};κ={}]", self.upper, self.lower, GaussianRational::real(self.weight.clone()))
    }
}

/// Matrix of `ρ(T^μ_ν)`; `(ρφ)_row = Σ_col R[row][col] φ_col`.
///
/// The action is `κ δ^μ_ν φ - Σ_i δ^{σ_i}_ν φ^{..μ..} + Σ_j δ^μ_{τ_j} φ_{..ν..}`,
/// the overall sign for which these matrices represent the bracket above and
/// lower indices transform like the multi-indices of jets.
pub fn rho_matrix(rep: &TensorRepSpec, mu: usize, nu: usize) -> Matrix {
    let dim = rep.dim();
    let p = rep.upper as usize;
    let mut m = Matrix::zeros(dim, dim);
    let kappa = GaussianRational::real(rep.weight.clone());
    for row in 0..dim {
        if mu == nu {
            m[(row, row)] += &kappa;
        }
        let d = rep.digits(row);
        for i in 0..p {
            if d[i] == nu {
                let mut c = d.clone();
                c[i] = mu;
                m[(row, rep.index_of(&c))] -= &GaussianRational::one();
            }
        }
        for j in p..rep.rank() {
            if d[j] == mu {
                let mut c = d.clone();
                c[j] = nu;
                m[(row, rep.index_of(&c))] += &GaussianRational::one();
            }
        }
    }
    m
}

/// Identity matrix `ρ(1)`.
pub fn rho_identity(rep: &TensorRepSpec) -> Matrix {
    Matrix::identity(rep.dim())
}

/// The numbers `(dim, k0, k1, k2)` defined by
/// `tr 1 = dim`, `tr T^μ_ν = k0 δ^μ_ν`, `tr T^μ_ν T^σ_τ = k1 δ^μ_τ δ^σ_ν + k2 δ^μ_ν δ^σ_τ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceInvariants {
    pub dim: GaussianRational,
    pub k0: GaussianRational,
    pub k1: GaussianRational,
    pub k2: GaussianRational,
}

impl TraceInvariants {
    pub fn from_ints(dim: i128, k0: i128, k1: i128, k2: i128) -> Self {
        let g = |x: i128| GaussianRational::from_int(x as i64);
        TraceInvariants { dim: g(dim), k0: g(k0), k1: g(k1), k2: g(k2) }
    }
}

/// Closed forms for unconstrained tensors.
pub fn closed_form_invariants(rep: &TensorRepSpec) -> TraceInvariants {
    let n = rint(rep.n as i64);
    let (p, q) = (rep.upper as i64, rep.lower as i64);
    let pow = |e: i64| -> Rational {
        if e >= 0 {
            num_traits::pow(n.clone(), e as usize)
        } else {
            Rational::one() / num_traits::pow(n.clone(), (-e) as usize)
        }
    };
    let s = rint(p - q) - &rep.weight * &n;
    let g = GaussianRational::real;
    TraceInvariants {
        dim: g(pow(p + q)),
        k0: g(-(&s * pow(p + q - 1))),
        k1: g(rint(p + q) * pow(p + q - 1)),
        k2: g((&s * &s - rint(p + q)) * pow(p + q - 2)),
    }
}

/// Extract `(dim, k0, k1, k2)` from a family of representation matrices by
/// brute-force traces, checking the tensor structure along the way.
///
/// For `N = 1` the two quartic structures coincide, so only `k1 + k2` is
/// determined; `k1_hint` supplies the split in that case.
pub fn brute_force_invariants(
    n: usize,
    gens: &dyn Fn(usize, usize) -> Matrix,
    k1_hint: &GaussianRational,
) -> Result<TraceInvariants> {
    let g00 = gens(0, 0);
    let dim = GaussianRational::from_int(g00.rows() as i64);
    let k0 = g00.trace();
    let mats: Vec<Vec<Matrix>> = (0..n).map(|a| (0..n).map(|b| gens(a, b)).collect()).collect();
    for mu in 0..n {
        for nu in 0..n {
            let expect = if mu == nu { k0.clone() } else { GaussianRational::zero() };
            if mats[mu][nu].trace() != expect {
                return Err(EngineError::Consistency(format!("tr T^{mu}_{nu} is not k0·δ")));
            }
        }
    }
    let (k1, k2) = if n == 1 {
        let s = (&mats[0][0] * &mats[0][0]).trace();
        (k1_hint.clone(), &s - k1_hint)
    } else {
        ((&mats[0][1] * &mats[1][0]).trace(), (&mats[0][0] * &mats[1][1]).trace())
    };
    for mu in 0..n {
        for nu in 0..n {
            for si in 0..n {
                for ta in 0..n {
                    let got = (&mats[mu][nu] * &mats[si][ta]).trace();
                    let mut expect = GaussianRational::zero();
                    if mu == ta && si == nu {
                        expect += &k1;
                    }
                    if mu == nu && si == ta {
                        expect += &k2;
                    }
                    if got != expect {
                        return Err(EngineError::Consistency(format!(
                            "tr T^{mu}_{nu} T^{si}_{ta} = {got}, expected {expect}"
                        )));
                    }
                }
            }
        }
    }
    Ok(TraceInvariants { dim, k0, k1, k2 })
}

/// Trace invariants computed by brute force and checked against the closed forms.
pub fn trace_invariants(rep: &TensorRepSpec) -> Result<TraceInvariants> {
    let closed = closed_form_invariants(rep);
    let brute = brute_force_invariants(rep.n, &|a, b| rho_matrix(rep, a, b), &closed.k1)?;
    if brute != closed {
        return Err(EngineError::Consistency(format!(
            "trace invariants of {}: brute {:?} vs closed {:?}",
            rep.label(),
            brute,
            closed
        )));
    }
    Ok(closed)
}

/// Action matrices `ζ(T^μ_ν)` of gl(N) on multi-indices of order `ell`,
/// as they appear in the top-order block of the jet matrices:
/// `ζ^m_n(T^μ_ν) = n_μ` when `m = n - μ̄ + ν̄`. Rows are `n`, columns `m`.
pub fn sym_matrix(n: usize, ell: u32, mu: usize, nu: usize) -> Matrix {
    let basis = multi_indices_of_order(n, ell);
    let pos = |m: &MultiIndex| basis.iter().position(|x| x == m);
    let mut z = Matrix::zeros(basis.len(), basis.len());
    for (row, idx) in basis.iter().enumerate() {
        if let Some(lowered) = idx.minus_unit(mu) {
            let m = lowered.plus_unit(nu);
            let col = pos(&m).expect("order preserved");
            z[(row, col)] += &GaussianRational::from_int(idx[mu] as i64);
        }
    }
    z
}

fn b(n: i64, k: i64) -> GaussianRational {
    GaussianRational::from_int(binom(n, k) as i64)
}

/// Closed forms for the symmetric representation `S_ℓ`.
pub fn sym_closed_form(n: usize, ell: u32) -> TraceInvariants {
    let (n, l) = (n as i64, ell as i64);
    TraceInvariants { dim: b(n - 1 + l, l), k0: b(n - 1 + l, l - 1), k1: b(n + l, l - 1), k2: b(n - 1 + l, l - 2) }
}

pub fn sym_rep_invariants(n: usize, ell: u32) -> Result<TraceInvariants> {
    let closed = sym_closed_form(n, ell);
    let brute = brute_force_invariants(n, &|a, c| sym_matrix(n, ell, a, c), &closed.k1)?;
    if brute != closed {
        return Err(EngineError::Consistency(format!(
            "S_{ell} invariants for N={n}: brute {brute:?} vs closed {closed:?}"
        )));
    }
    Ok(closed)
}

/// Closed forms for `Σ_{ℓ=0}^p` of the `S_ℓ` invariants.
pub fn summed_sym_closed_form(n: usize, p: u32) -> TraceInvariants {
    let (n, p) = (n as i64, p as i64);
    TraceInvariants { dim: b(n + p, p), k0: b(n + p, p - 1), k1: b(n + p + 1, p - 1), k2: b(n + p, p - 2) }
}

pub fn summed_sym_invariants(n: usize, p: u32) -> Result<TraceInvariants> {
    let mut acc = TraceInvariants::from_ints(0, 0, 0, 0);
    for ell in 0..=p {
        let s = sym_rep_invariants(n, ell)?;
        acc.dim += s.dim;
        acc.k0 += s.k0;
        acc.k1 += s.k1;
        acc.k2 += s.k2;
    }
    let closed = summed_sym_closed_form(n, p);
    if acc != closed {
        return Err(EngineError::Consistency(format!(
            "summed S_ℓ invariants N={n} p={p}: {acc:?} vs {closed:?}"
        )));
    }
    Ok(closed)
}

/// Checks `[ρ(T^μ_ν), ρ(T^σ_τ)] = δ^σ_ν ρ(T^μ_τ) - δ^μ_τ ρ(T^σ_ν)` for all indices.
pub fn check_gl_brackets(n: usize, gens: &dyn Fn(usize, usize) -> Matrix) -> Result<()> {
    for mu in 0..n {
        for nu in 0..n {
            for si in 0..n {
                for ta in 0..n {
                    let lhs = gens(mu, nu).commutator(&gens(si, ta));
                    let mut rhs = Matrix::zeros(lhs.rows(), lhs.cols());
                    if si == nu {
                        rhs = &rhs + &gens(mu, ta);
                    }
                    if mu == ta {
                        rhs = &rhs - &gens(si, nu);
                    }
                    if lhs != rhs {
                        return Err(EngineError::Consistency(format!(
                            "gl(N) bracket fails at ({mu},{nu}),({si},{ta})"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gr, rat};

    #[test]
    fn scalar_rep_matrices() {
        let r = TensorRepSpec::scalar(3, rint(1));
        assert_eq!(rho_matrix(&r, 1, 1), Matrix::from_rows(vec![vec![gr(1, 1)]]));
        assert!(rho_matrix(&r, 0, 1).is_zero());
        assert!(rho_matrix(&TensorRepSpec::scalar(2, rint(0)), 0, 0).is_zero());
    }

    #[test]
    fn vector_rep_substitution() {
        let m = rho_matrix(&TensorRepSpec::vector(2), 0, 1);
        let mut expect = Matrix::zeros(2, 2);
        expect[(1, 0)] = gr(-1, 1);
        assert_eq!(m, expect);
    }

    #[test]
    fn invariant_examples() {
        let s = trace_invariants(&TensorRepSpec::scalar(2, rat(3, 2))).unwrap();
        assert_eq!(s, TraceInvariants { dim: gr(1, 1), k0: gr(3, 2), k1: gr(0, 1), k2: gr(9, 4) });
        let v = trace_invariants(&TensorRepSpec::vector(2)).unwrap();
        assert_eq!(v, TraceInvariants::from_ints(2, -1, 1, 0));
        // κ = (p - q)/N gives an sl(N) representation
        let sl = TensorRepSpec { n: 3, upper: 2, lower: 1, weight: rat(1, 3) };
        assert_eq!(trace_invariants(&sl).unwrap().k0, gr(0, 1));
    }

    #[test]
    fn invariants_over_grid() {
        for n in 1..=3 {
            for (u, l) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
                for k in [rat(0, 1), rat(1, 1), rat(-1, 1), rat(1, 2)] {
                    let rep = TensorRepSpec { n, upper: u, lower: l, weight: k };
                    trace_invariants(&rep).unwrap();
                    check_gl_brackets(n, &|a, b| rho_matrix(&rep, a, b)).unwrap();
                }
            }
        }
    }

    #[test]
    fn symmetric_rep_examples() {
        let s = sym_rep_invariants(2, 1).unwrap();
        assert_eq!((s.dim.clone(), s.k0.clone()), (gr(2, 1), gr(1, 1)));
        assert_eq!(sym_rep_invariants(4, 0).unwrap(), TraceInvariants::from_ints(1, 0, 0, 0));
        let s = sym_rep_invariants(3, 2).unwrap();
        assert_eq!((s.dim, s.k1), (gr(6, 1), gr(5, 1)));
        for n in 1..=3 {
            for ell in 0..=4 {
                sym_rep_invariants(n, ell).unwrap();
                check_gl_brackets(n, &|a, b| sym_matrix(n, ell, a, b)).unwrap();
            }
        }
    }

    #[test]
    fn summed_examples() {
        assert_eq!(summed_sym_invariants(2, 1).unwrap().dim, gr(3, 1));
        assert_eq!(summed_sym_invariants(3, 0).unwrap(), TraceInvariants::from_ints(1, 0, 0, 0));
        let s = summed_sym_invariants(1, 3).unwrap();
        assert_eq!((s.dim, s.k0), (gr(4, 1), gr(6, 1)));
        for n in 1..=3 {
            for p in 0..=4 {
                summed_sym_invariants(n, p).unwrap();
            }
        }
    }
}
