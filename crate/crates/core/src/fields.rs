//! Spacetime vector fields, circle vector fields, gauge maps and Lie algebra data.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::linalg::Matrix;
use crate::multi_index::MultiIndex;
use crate::poly::{PolyKey, TrigPoly};
use crate::scalar::{gr, GaussianRational};

/// `ξ = ξ^μ(x) ∂_μ` with trigonometric-polynomial components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyVectorField {
    n: usize,
    comps: Vec<TrigPoly>,
}

impl PolyVectorField {
    pub fn zero(n: usize) -> Self {
        PolyVectorField { n, comps: vec![TrigPoly::zero(n); n] }
    }

    pub fn from_components(comps: Vec<TrigPoly>) -> Result<Self> {
        let n = comps.len();
        for c in &comps {
            if c.nvars() != n {
                return Err(EngineError::DimensionMismatch { expected: n, got: c.nvars() });
            }
        }
        Ok(PolyVectorField { n, comps })
    }

    /// `c · e^{i freq x^0} x^exps ∂_mu`.
    pub fn monomial(n: usize, mu: usize, c: GaussianRational, freq: i64, exps: &[u32]) -> Self {
        let mut f = Self::zero(n);
        f.comps[mu] = TrigPoly::term(n, c, freq, MultiIndex(exps.to_vec()));
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn component(&self, mu: usize) -> &TrigPoly {
        &self.comps[mu]
    }

    pub fn components(&self) -> &[TrigPoly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn is_polynomial(&self) -> bool {
        self.comps.iter().all(|c| c.is_polynomial())
    }

    pub fn add(&self, o: &Self) -> Self {
        PolyVectorField { n: self.n, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        PolyVectorField { n: self.n, comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }

    /// Componentwise `∂_mu ξ`.
    pub fn deriv(&self, mu: usize) -> Self {
        PolyVectorField { n: self.n, comps: self.comps.iter().map(|a| a.deriv(mu)).collect() }
    }

    /// `ξ^μ ∂_μ f`.
    pub fn act(&self, f: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero(self.n);
        for (mu, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &f.deriv(mu));
            }
        }
        out
    }

    /// `∂_μ ξ^μ`.
    pub fn divergence(&self) -> TrigPoly {
        let mut out = TrigPoly::zero(self.n);
        for (mu, c) in self.comps.iter().enumerate() {
            out = &out + &c.deriv(mu);
        }
        out
    }

    pub fn max_degree(&self) -> u32 {
        self.comps.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn to_records(&self) -> Vec<FieldTermRecord> {
        records_of(&self.comps)
    }

    pub fn from_records(n: usize, recs: &[FieldTermRecord]) -> Result<Self> {
        Ok(PolyVectorField { n, comps: comps_from_records(n, n, recs)? })
    }
}

/// `[ξ, η]^ν = ξ^μ ∂_μ η^ν − η^μ ∂_μ ξ^ν`.
pub fn vf_commutator(xi: &PolyVectorField, eta: &PolyVectorField) -> Result<PolyVectorField> {
    if xi.n != eta.n {
        return Err(EngineError::DimensionMismatch { expected: xi.n, got: eta.n });
    }
    let comps = (0..xi.n).map(|nu| &xi.act(&eta.comps[nu]) - &eta.act(&xi.comps[nu])).collect();
    Ok(PolyVectorField { n: xi.n, comps })
}

/// JSON record for one term of a vector field or gauge map component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldTermRecord {
    pub component: usize,
    pub exponents: Vec<u32>,
    #[serde(default)]
    pub frequency: i64,
    pub coefficient: GaussianRational,
}

fn records_of(comps: &[TrigPoly]) -> Vec<FieldTermRecord> {
    let mut out = Vec::new();
    for (component, c) in comps.iter().enumerate() {
        for (k, v) in c.terms() {
            out.push(FieldTermRecord {
                component,
                exponents: k.exps.0.clone(),
                frequency: k.freq,
                coefficient: v.clone(),
            });
        }
    }
    out
}

fn comps_from_records(n: usize, count: usize, recs: &[FieldTermRecord]) -> Result<Vec<TrigPoly>> {
    let mut comps = vec![TrigPoly::zero(n); count];
    for r in recs {
        if r.component >= count {
            return Err(EngineError::InvalidInput(format!("component {} out of range", r.component)));
        }
        if r.exponents.len() != n {
            return Err(EngineError::DimensionMismatch { expected: n, got: r.exponents.len() });
        }
        comps[r.component]
            .add_term(PolyKey { freq: r.frequency, exps: MultiIndex(r.exponents.clone()) }, r.coefficient.clone());
    }
    Ok(comps)
}

/// `f = Σ_m f_m e^{imt} d/dt` on the circle.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct CircleVectorField {
    pub modes: BTreeMap<i64, GaussianRational>,
}

impl CircleVectorField {
    pub fn basis(m: i64) -> Self {
        let mut modes = BTreeMap::new();
        modes.insert(m, GaussianRational::one());
        CircleVectorField { modes }
    }

    /// `ḟ`, whose modes are `i m f_m`.
    pub fn derivative(&self) -> Self {
        let modes = self
            .modes
            .iter()
            .filter(|(m, _)| **m != 0)
            .map(|(m, c)| (*m, c * &GaussianRational::new(Zero::zero(), crate::scalar::rint(*m))))
            .collect();
        CircleVectorField { modes }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut modes: BTreeMap<i64, GaussianRational> = BTreeMap::new();
        for (a, ca) in &self.modes {
            for (b, cb) in &o.modes {
                *modes.entry(a + b).or_default() += ca * cb;
            }
        }
        modes.retain(|_, v| !v.is_zero());
        CircleVectorField { modes }
    }

    /// `[f, g] = f ġ − g ḟ`.
    pub fn commutator(&self, o: &Self) -> Self {
        let a = self.mul(&o.derivative());
        let b = o.mul(&self.derivative());
        let mut modes = a.modes;
        for (m, c) in b.modes {
            *modes.entry(m).or_default() -= c;
        }
        modes.retain(|_, v| !v.is_zero());
        CircleVectorField { modes }
    }
}

/// A g-valued function `X = X_a(x) J^a`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaugeMap {
    n: usize,
    comps: Vec<TrigPoly>,
}

impl GaugeMap {
    pub fn zero(n: usize, gdim: usize) -> Self {
        GaugeMap { n, comps: vec![TrigPoly::zero(n); gdim] }
    }

    pub fn from_components(n: usize, comps: Vec<TrigPoly>) -> Result<Self> {
        for c in &comps {
            if c.nvars() != n {
                return Err(EngineError::DimensionMismatch { expected: n, got: c.nvars() });
            }
        }
        Ok(GaugeMap { n, comps })
    }

    /// `c · e^{i freq x^0} x^exps J^a`.
    pub fn monomial(n: usize, gdim: usize, a: usize, c: GaussianRational, freq: i64, exps: &[u32]) -> Self {
        let mut x = Self::zero(n, gdim);
        x.comps[a] = TrigPoly::term(n, c, freq, MultiIndex(exps.to_vec()));
        x
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn algebra_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, a: usize) -> &TrigPoly {
        &self.comps[a]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        GaugeMap { n: self.n, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        GaugeMap { n: self.n, comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn deriv(&self, mu: usize) -> Self {
        GaugeMap { n: self.n, comps: self.comps.iter().map(|a| a.deriv(mu)).collect() }
    }

    /// `ξ^μ ∂_μ X`.
    pub fn lie_derivative(&self, xi: &PolyVectorField) -> Self {
        GaugeMap { n: self.n, comps: self.comps.iter().map(|a| xi.act(a)).collect() }
    }

    /// `Σ_a c_a X_a` for a covector `c` on g.
    pub fn contract(&self, c: &[GaussianRational]) -> TrigPoly {
        let mut out = TrigPoly::zero(self.n);
        for (x, ca) in self.comps.iter().zip(c) {
            if !ca.is_zero() {
                out = &out + &x.scale(ca);
            }
        }
        out
    }

    pub fn to_records(&self) -> Vec<FieldTermRecord> {
        records_of(&self.comps)
    }

    pub fn from_records(n: usize, gdim: usize, recs: &[FieldTermRecord]) -> Result<Self> {
        Ok(GaugeMap { n, comps: comps_from_records(n, gdim, recs)? })
    }
}

/// Finite-dimensional Lie algebra with `[J^a, J^b] = i f^{ab}_c J^c`,
/// a module `M` with `[M^a, M^b] = i f^{ab}_c M^c`, and its trace data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieAlgebraSpec {
    pub name: String,
    pub dim: usize,
    /// `structure[a][b][c] = f^{ab}_c`.
    pub structure: Vec<Vec<Vec<GaussianRational>>>,
    /// `δ^{ab}`.
    pub killing: Vec<Vec<GaussianRational>>,
    /// `δ^a`.
    pub trace_vector: Vec<GaussianRational>,
    /// `M^a` as row-major square matrices.
    pub rep_matrices: Vec<Vec<Vec<GaussianRational>>>,
    pub y_m: GaussianRational,
    pub z_m: GaussianRational,
    pub w_m: GaussianRational,
}

impl LieAlgebraSpec {
    pub fn module_dim(&self) -> usize {
        self.rep_matrices.first().map_or(0, |m| m.len())
    }

    pub fn rep_matrix(&self, a: usize) -> Matrix {
        Matrix::from_rows(self.rep_matrices[a].clone())
    }

    pub fn is_semisimple_like(&self) -> bool {
        self.trace_vector.iter().all(|x| x.is_zero())
    }

    /// `[X, Y]_c = i f^{ab}_c X_a Y_b`.
    pub fn bracket(&self, x: &GaugeMap, y: &GaugeMap) -> GaugeMap {
        let n = x.n;
        let mut comps = vec![TrigPoly::zero(n); self.dim];
        let i = GaussianRational::i();
        for a in 0..self.dim {
            if x.comps[a].is_zero() {
                continue;
            }
            for b in 0..self.dim {
                if y.comps[b].is_zero() {
                    continue;
                }
                let prod = &x.comps[a] * &y.comps[b];
                for (c, comp) in comps.iter_mut().enumerate() {
                    let f = &self.structure[a][b][c];
                    if !f.is_zero() {
                        *comp = &*comp + &prod.scale(&(&i * f));
                    }
                }
            }
        }
        GaugeMap { n, comps }
    }

    /// Checks antisymmetry, Jacobi, `f^{ab}_c δ^c = 0`, the module brackets
    /// and the stored `(y_M, z_M, w_M)` against traces of `M`.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        let bad = |msg: String| Err(EngineError::Consistency(format!("{}: {msg}", self.name)));
        if self.structure.len() != d || self.killing.len() != d || self.trace_vector.len() != d || self.rep_matrices.len() != d {
            return bad("table sizes do not match dim".into());
        }
        let f = |a: usize, b: usize, c: usize| &self.structure[a][b][c];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if f(a, b, c) != &-f(b, a, c) {
                        return bad(format!("f^({a}{b})_{c} not antisymmetric"));
                    }
                }
                let s: GaussianRational = (0..d).map(|c| f(a, b, c) * &self.trace_vector[c]).sum();
                if !s.is_zero() {
                    return bad(format!("f^({a}{b})_c δ^c = {s}"));
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let mut s = GaussianRational::zero();
                        for k in 0..d {
                            s += f(a, b, k) * f(k, c, e) + f(b, c, k) * f(k, a, e) + f(c, a, k) * f(k, b, e);
                        }
                        if !s.is_zero() {
                            return bad(format!("Jacobi fails at ({a},{b},{c};{e})"));
                        }
                    }
                }
            }
        }
        let ms: Vec<Matrix> = (0..d).map(|a| self.rep_matrix(a)).collect();
        let i = GaussianRational::i();
        for a in 0..d {
            for b in 0..d {
                let lhs = ms[a].commutator(&ms[b]);
                let mut rhs = Matrix::zeros(lhs.rows(), lhs.cols());
                for (c, mc) in ms.iter().enumerate() {
                    rhs = &rhs + &mc.scale(&(&i * f(a, b, c)));
                }
                if lhs != rhs {
                    return bad(format!("[M^{a}, M^{b}] ≠ i f^(ab)_c M^c"));
                }
                let tr = (&ms[a] * &ms[b]).trace();
                let expect = &self.y_m * &self.killing[a][b] + &self.w_m * &(&self.trace_vector[a] * &self.trace_vector[b]);
                if tr != expect {
                    return bad(format!("tr M^{a}M^{b} = {tr}, expected {expect}"));
                }
            }
            if ms[a].trace() != &self.z_m * &self.trace_vector[a] {
                return bad(format!("tr M^{a} ≠ z_M δ^{a}"));
            }
        }
        Ok(())
    }

    pub fn u1() -> Self {
        let one = GaussianRational::one();
        LieAlgebraSpec {
            name: "u1".into(),
            dim: 1,
            structure: vec![vec![vec![GaussianRational::zero()]]],
            killing: vec![vec![one.clone()]],
            trace_vector: vec![one.clone()],
            rep_matrices: vec![vec![vec![one.clone()]]],
            y_m: one,
            z_m: GaussianRational::one(),
            w_m: GaussianRational::zero(),
        }
    }

    /// Abelian algebra whose invariant form is carried entirely by `δ^a δ^b`.
    pub fn gl1() -> Self {
        let one = GaussianRational::one();
        LieAlgebraSpec {
            name: "gl1".into(),
            dim: 1,
            structure: vec![vec![vec![GaussianRational::zero()]]],
            killing: vec![vec![GaussianRational::zero()]],
            trace_vector: vec![one.clone()],
            rep_matrices: vec![vec![vec![one.clone()]]],
            y_m: GaussianRational::zero(),
            z_m: one.clone(),
            w_m: one,
        }
    }

    /// su(2) basis `J^a = σ_a/2` on the doublet.
    pub fn sl2() -> Self {
        Self::su2_with_center(false)
    }

    /// sl(2) plus a central `J^0` acting as the identity on the doublet.
    pub fn gl2() -> Self {
        Self::su2_with_center(true)
    }

    fn su2_with_center(center: bool) -> Self {
        let off = usize::from(center);
        let d = 3 + off;
        let z = GaussianRational::zero;
        let mut structure = vec![vec![vec![z(); d]; d]; d];
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            structure[a + off][b + off][c + off] = gr(1, 1);
            structure[b + off][a + off][c + off] = gr(-1, 1);
        }
        let half = gr(1, 2);
        let ih = GaussianRational::new(Zero::zero(), crate::scalar::rat(1, 2));
        let sig = vec![
            vec![vec![z(), half.clone()], vec![half.clone(), z()]],
            vec![vec![z(), -&ih], vec![ih.clone(), z()]],
            vec![vec![half.clone(), z()], vec![z(), -&half]],
        ];
        let mut killing = vec![vec![z(); d]; d];
        for a in off..d {
            killing[a][a] = gr(1, 1);
        }
        let mut trace_vector = vec![z(); d];
        let mut rep_matrices = Vec::new();
        if center {
            trace_vector[0] = gr(1, 1);
            rep_matrices.push(vec![vec![gr(1, 1), z()], vec![z(), gr(1, 1)]]);
        }
        rep_matrices.extend(sig);
        LieAlgebraSpec {
            name: if center { "gl2" } else { "sl2" }.into(),
            dim: d,
            structure,
            killing,
            trace_vector,
            rep_matrices,
            y_m: half,
            z_m: if center { gr(2, 1) } else { z() },
            w_m: if center { gr(2, 1) } else { z() },
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "u1" => Ok(Self::u1()),
            "gl1" => Ok(Self::gl1()),
            "sl2" => Ok(Self::sl2()),
            "gl2" => Ok(Self::gl2()),
            other => Err(EngineError::Config(format!("unknown Lie algebra {other:?}"))),
        }
    }

    /// Adjoint module `(M^a)^b_c = −i f^{ab}_c`.
    pub fn adjoint_matrices(&self) -> Vec<Matrix> {
        let mi = -GaussianRational::i();
        (0..self.dim)
            .map(|a| {
                let mut m = Matrix::zeros(self.dim, self.dim);
                for b in 0..self.dim {
                    for c in 0..self.dim {
                        m[(b, c)] = &mi * &self.structure[a][b][c];
                    }
                }
                m
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gc, gr};
    use proptest::prelude::*;

    #[test]
    fn commutator_examples() {
        let x0d0 = PolyVectorField::monomial(2, 0, gr(1, 1), 0, &[1, 0]);
        let d0 = PolyVectorField::monomial(2, 0, gr(1, 1), 0, &[0, 0]);
        assert_eq!(vf_commutator(&x0d0, &d0).unwrap(), d0.scale(&gr(-1, 1)));
        assert!(vf_commutator(&x0d0, &x0d0).unwrap().is_zero());
    }

    #[test]
    fn witt_relation() {
        // [e^{imx}∂, e^{inx}∂] = i(n − m) e^{i(m+n)x}∂
        for m in -3..=3 {
            for n in -3..=3 {
                let a = PolyVectorField::monomial(1, 0, gr(1, 1), m, &[0]);
                let b = PolyVectorField::monomial(1, 0, gr(1, 1), n, &[0]);
                let expect = PolyVectorField::monomial(1, 0, gc(0, n - m), m + n, &[0]);
                assert_eq!(vf_commutator(&a, &b).unwrap(), expect);
            }
        }
    }

    #[test]
    fn circle_commutator_matches_witt() {
        let f = CircleVectorField::basis(2);
        let g = CircleVectorField::basis(-1);
        let c = f.commutator(&g);
        assert_eq!(c.modes.len(), 1);
        assert_eq!(c.modes[&1], gc(0, -3));
    }

    #[test]
    fn shipped_algebras_validate() {
        for g in [LieAlgebraSpec::u1(), LieAlgebraSpec::gl1(), LieAlgebraSpec::sl2(), LieAlgebraSpec::gl2()] {
            g.validate().unwrap();
            let json = serde_json::to_string(&g).unwrap();
            assert_eq!(serde_json::from_str::<LieAlgebraSpec>(&json).unwrap(), g);
        }
    }

    #[test]
    fn adjoint_represents_bracket() {
        let g = LieAlgebraSpec::sl2();
        let ad = g.adjoint_matrices();
        let i = GaussianRational::i();
        for a in 0..3 {
            for b in 0..3 {
                let mut rhs = Matrix::zeros(3, 3);
                for (c, m) in ad.iter().enumerate() {
                    rhs = &rhs + &m.scale(&(&i * &g.structure[a][b][c]));
                }
                assert_eq!(ad[a].commutator(&ad[b]), rhs);
            }
        }
    }

    #[test]
    fn field_json_roundtrip() {
        let xi = PolyVectorField::monomial(2, 1, gc(1, -2), 3, &[0, 2])
            .add(&PolyVectorField::monomial(2, 0, gr(5, 7), 0, &[1, 1]));
        let recs = xi.to_records();
        let s = serde_json::to_string(&recs).unwrap();
        let back: Vec<FieldTermRecord> = serde_json::from_str(&s).unwrap();
        assert_eq!(PolyVectorField::from_records(2, &back).unwrap(), xi);
    }

    fn arb_field() -> impl Strategy<Value = PolyVectorField> {
        proptest::collection::vec((0usize..2, -3i64..4, 0u32..3, 0u32..3), 1..4).prop_map(|terms| {
            let mut f = PolyVectorField::zero(2);
            for (mu, c, e0, e1) in terms {
                f = f.add(&PolyVectorField::monomial(2, mu, gr(c, 1), 0, &[e0, e1]));
            }
            f
        })
    }

    proptest! {
        #[test]
        fn jacobi_identity(a in arb_field(), b in arb_field(), c in arb_field()) {
            let j = |x: &PolyVectorField, y: &PolyVectorField, z: &PolyVectorField| {
                vf_commutator(x, &vf_commutator(y, z).unwrap()).unwrap()
            };
            let s = j(&a, &b, &c).add(&j(&b, &c, &a)).add(&j(&c, &a, &b));
            prop_assert!(s.is_zero());
        }
    }
}
