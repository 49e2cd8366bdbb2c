//! Jet-action matrices `T^m_n(ξ)` and `J^m_n(X)`, their structural relations,
//! the prolongation map, and the trace lemmas.
//!
//! A `JetMatrix` is a square matrix of functions of the base point over the
//! index set `A = (m, α)` with `|m| <= p`; row `A = (n, α)` and column
//! `B = (m, β)` hold `T^m_n(ξ)^α_β`.

use std::fmt;

use num_traits::One;

use crate::error::{EngineError, Result};
use crate::fields::{vf_commutator, GaugeMap, LieAlgebraSpec, PolyVectorField};
use crate::gl_reps::{rho_matrix, trace_invariants, TensorRepSpec, TraceInvariants};
use crate::linalg::Matrix;
use crate::multi_index::{binom, enumerate_multi_indices, multi_binomial_int, MultiIndex};
use crate::poly::TrigPoly;
use crate::scalar::GaussianRational;

/// The space `V ⊗ (jets of order <= p)` on which jet matrices act, with the
/// internal module `V = ρ ⊗ M` (`M` trivial when no gauge algebra is given).
#[derive(Clone)]
pub struct JetModule {
    pub n: usize,
    pub p: u32,
    pub rep: TensorRepSpec,
    basis: Vec<MultiIndex>,
    vdim: usize,
    /// `R(T^μ_ν) = ρ(T^μ_ν) ⊗ 1_M`, indexed `[μ][ν]`.
    gl: Vec<Vec<Matrix>>,
    /// `R(M^a) = 1_ρ ⊗ M^a`.
    gauge: Vec<Matrix>,
}

impl JetModule {
    pub fn new(rep: &TensorRepSpec, p: u32) -> Self {
        Self::build(rep, p, None)
    }

    pub fn with_gauge(rep: &TensorRepSpec, p: u32, g: &LieAlgebraSpec) -> Self {
        Self::build(rep, p, Some(g))
    }

    fn build(rep: &TensorRepSpec, p: u32, g: Option<&LieAlgebraSpec>) -> Self {
        let n = rep.n;
        let mdim = g.map_or(1, |g| g.module_dim());
        let id_m = Matrix::identity(mdim);
        let id_r = Matrix::identity(rep.dim());
        let gl = (0..n).map(|mu| (0..n).map(|nu| rho_matrix(rep, mu, nu).kron(&id_m)).collect()).collect();
        let gauge = g.map_or(Vec::new(), |g| (0..g.dim).map(|a| id_r.kron(&g.rep_matrix(a))).collect());
        JetModule { n, p, rep: rep.clone(), basis: enumerate_multi_indices(n, p), vdim: rep.dim() * mdim, gl, gauge }
    }

    /// Same internal module, different jet order.
    pub fn with_order(&self, p: u32) -> Self {
        JetModule { p, basis: enumerate_multi_indices(self.n, p), ..self.clone() }
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    /// Dimension of the internal module `V`.
    pub fn vdim(&self) -> usize {
        self.vdim
    }

    /// Total number of jet components `(m, α)`.
    pub fn size(&self) -> usize {
        self.basis.len() * self.vdim
    }

    pub fn index(&self, m: &MultiIndex, alpha: usize) -> Option<usize> {
        self.basis.iter().position(|x| x == m).map(|i| i * self.vdim + alpha)
    }

    /// `(m, α)` of a flat index.
    pub fn component(&self, a: usize) -> (&MultiIndex, usize) {
        (&self.basis[a / self.vdim], a % self.vdim)
    }

    pub fn gl_matrix(&self, mu: usize, nu: usize) -> &Matrix {
        &self.gl[mu][nu]
    }

    pub fn gauge_matrix(&self, a: usize) -> &Matrix {
        &self.gauge[a]
    }

    pub fn zero_matrix(&self) -> JetMatrix {
        JetMatrix { n: self.n, size: self.size(), entries: vec![TrigPoly::zero(self.n); self.size() * self.size()] }
    }

    fn add_block(&self, out: &mut JetMatrix, n: usize, m: usize, coeff: &TrigPoly, mat: &Matrix) {
        if coeff.is_zero() {
            return;
        }
        for a in 0..self.vdim {
            for b in 0..self.vdim {
                let c = &mat[(a, b)];
                if !c.is_zero() {
                    let e = out.entry_mut(n * self.vdim + a, m * self.vdim + b);
                    *e = &*e + &coeff.scale(c);
                }
            }
        }
    }

    /// All blocks `T^m_n(ξ)` for `|m|, |n| <= p`.
    pub fn jet_matrix_t(&self, xi: &PolyVectorField) -> JetMatrix {
        let mut out = self.zero_matrix();
        let id = Matrix::identity(self.vdim);
        for (ni, n) in self.basis.iter().enumerate() {
            for (mi, m) in self.basis.iter().enumerate() {
                if let Some(d) = n.checked_sub(m) {
                    let b = GaussianRational::from_int(multi_binomial_int(n, m) as i64);
                    for mu in 0..self.n {
                        for nu in 0..self.n {
                            let f = xi.component(mu).deriv_multi(&d.plus_unit(nu)).scale(&b);
                            self.add_block(&mut out, ni, mi, &f, &self.gl[nu][mu]);
                        }
                    }
                }
                for mu in 0..self.n {
                    let Some(k) = m.minus_unit(mu) else { continue };
                    if &k == n {
                        continue;
                    }
                    let Some(d) = n.checked_sub(&k) else { continue };
                    let b = GaussianRational::from_int(multi_binomial_int(n, &k) as i64);
                    let f = xi.component(mu).deriv_multi(&d).scale(&b);
                    self.add_block(&mut out, ni, mi, &f, &id);
                }
            }
        }
        out
    }

    /// All blocks `J^m_n(X) = binom(n, m) ∂_{n−m} X_a M^a`.
    pub fn jet_matrix_j(&self, x: &GaugeMap) -> JetMatrix {
        assert_eq!(x.algebra_dim(), self.gauge.len(), "gauge map does not match module");
        let mut out = self.zero_matrix();
        for (ni, n) in self.basis.iter().enumerate() {
            for (mi, m) in self.basis.iter().enumerate() {
                let Some(d) = n.checked_sub(m) else { continue };
                let b = GaussianRational::from_int(multi_binomial_int(n, m) as i64);
                for (a, ma) in self.gauge.iter().enumerate() {
                    let f = x.component(a).deriv_multi(&d).scale(&b);
                    self.add_block(&mut out, ni, mi, &f, ma);
                }
            }
        }
        out
    }

    /// `f · 1` on every jet component.
    pub fn scalar_matrix(&self, f: &TrigPoly) -> JetMatrix {
        let mut out = self.zero_matrix();
        for a in 0..self.size() {
            *out.entry_mut(a, a) = f.clone();
        }
        out
    }

    /// Block `(n, m)` as a `vdim × vdim` table.
    pub fn block<'a>(&self, mat: &'a JetMatrix, n: &MultiIndex, m: &MultiIndex) -> Vec<Vec<&'a TrigPoly>> {
        let ni = self.basis.iter().position(|x| x == n).expect("row index in basis");
        let mi = self.basis.iter().position(|x| x == m).expect("column index in basis");
        (0..self.vdim)
            .map(|a| (0..self.vdim).map(|b| mat.entry(ni * self.vdim + a, mi * self.vdim + b)).collect())
            .collect()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct JetMatrix {
    n: usize,
    size: usize,
    entries: Vec<TrigPoly>,
}

impl JetMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, r: usize, c: usize) -> &TrigPoly {
        &self.entries[r * self.size + c]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut TrigPoly {
        &mut self.entries[r * self.size + c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn zip(&self, o: &Self, f: impl Fn(&TrigPoly, &TrigPoly) -> TrigPoly) -> Self {
        JetMatrix { n: self.n, size: self.size, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn deriv(&self, mu: usize) -> Self {
        JetMatrix { n: self.n, size: self.size, entries: self.entries.iter().map(|e| e.deriv(mu)).collect() }
    }

    /// Entrywise product with a function.
    pub fn times(&self, f: &TrigPoly) -> Self {
        JetMatrix { n: self.n, size: self.size, entries: self.entries.iter().map(|e| e * f).collect() }
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let s = self.size;
        let mut out = JetMatrix { n: self.n, size: s, entries: vec![TrigPoly::zero(self.n); s * s] };
        for i in 0..s {
            for k in 0..s {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..s {
                    let b = o.entry(k, j);
                    if !b.is_zero() {
                        let e = out.entry_mut(i, j);
                        *e = &*e + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.matmul(o).sub(&o.matmul(self))
    }

    pub fn trace(&self) -> TrigPoly {
        let mut t = TrigPoly::zero(self.n);
        for i in 0..self.size {
            t = &t + self.entry(i, i);
        }
        t
    }

    /// Entries as numbers at a base point (pure polynomials only).
    pub fn at(&self, point: &[GaussianRational]) -> Result<Matrix> {
        let mut m = Matrix::zeros(self.size, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                m[(i, j)] = self.entry(i, j).eval(point)?;
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for JetMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size {
            for j in 0..self.size {
                let e = self.entry(i, j);
                if !e.is_zero() {
                    writeln!(f, "[{i},{j}] {e}")?;
                }
            }
        }
        Ok(())
    }
}

/// One verified identity: name plus failure detail, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub name: String,
    pub failure: Option<String>,
}

impl RelationCheck {
    fn new(name: &str, failure: Option<String>) -> Self {
        RelationCheck { name: name.into(), failure }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn compare(lhs: &JetMatrix, rhs: &JetMatrix) -> Option<String> {
    if lhs == rhs {
        return None;
    }
    for i in 0..lhs.size {
        for j in 0..lhs.size {
            if lhs.entry(i, j) != rhs.entry(i, j) {
                return Some(format!("entry ({i},{j}): {} vs {}", lhs.entry(i, j), rhs.entry(i, j)));
            }
        }
    }
    Some("size mismatch".into())
}

/// The five structural relations of the `T` matrices, checked as exact
/// identities between function-valued matrices.
pub fn check_t_relations(module: &JetModule, xi: &PolyVectorField, eta: &PolyVectorField) -> Result<Vec<RelationCheck>> {
    let n = module.n;
    let t_xi = module.jet_matrix_t(xi);
    let mut out = Vec::new();

    // recursion in n + ν̄: compare block rows of order < p
    let mut fail = None;
    'rec: for nu in 0..n {
        let t_dxi = module.jet_matrix_t(&xi.deriv(nu));
        for nn in module.basis() {
            if nn.order() >= module.p {
                continue;
            }
            let up = nn.plus_unit(nu);
            for m in module.basis() {
                let lhs = owned_block(module, &t_xi, &up, m);
                let mut rhs = owned_block(module, &t_dxi, nn, m);
                if let Some(k) = m.minus_unit(nu) {
                    let extra = module.block(&t_xi, nn, &k);
                    for (r, e) in rhs.iter_mut().zip(extra) {
                        for (x, y) in r.iter_mut().zip(e) {
                            *x = &*x + y;
                        }
                    }
                }
                for mu in 0..n {
                    if *m == nn.plus_unit(mu) {
                        let d = xi.component(mu).deriv(nu);
                        for (a, r) in rhs.iter_mut().enumerate() {
                            r[a] = &r[a] + &d;
                        }
                    }
                }
                if lhs != rhs {
                    fail = Some(format!("T^{m}_{{{nn}+{nu}}} recursion fails"));
                    break 'rec;
                }
            }
        }
    }
    out.push(RelationCheck::new("T recursion", fail));

    // base case T^m_0 = δ^m_0 ∂_ν ξ^μ ρ(T^ν_μ)
    let zero = MultiIndex::zero(n);
    let mut fail = None;
    for m in module.basis() {
        let got = module.block(&t_xi, &zero, m);
        for a in 0..module.vdim() {
            for b in 0..module.vdim() {
                let mut expect = TrigPoly::zero(n);
                if *m == zero {
                    for mu in 0..n {
                        for nu in 0..n {
                            expect = &expect + &xi.component(mu).deriv(nu).scale(&module.gl_matrix(nu, mu)[(a, b)]);
                        }
                    }
                }
                if *got[a][b] != expect {
                    fail = Some(format!("T^{m}_0 entry ({a},{b})"));
                }
            }
        }
    }
    out.push(RelationCheck::new("T base case", fail));

    let mut fail = None;
    for nu in 0..n {
        if let Some(f) = compare(&t_xi.deriv(nu), &module.jet_matrix_t(&xi.deriv(nu))) {
            fail = Some(format!("∂_{nu}: {f}"));
        }
    }
    out.push(RelationCheck::new("T derivative rule", fail));

    let t_eta = module.jet_matrix_t(eta);
    let lhs = module.jet_matrix_t(&vf_commutator(xi, eta)?);
    let mut rhs = t_xi.commutator(&t_eta);
    for mu in 0..n {
        rhs = rhs.add(&module.jet_matrix_t(&eta.deriv(mu)).times(xi.component(mu)));
        rhs = rhs.sub(&module.jet_matrix_t(&xi.deriv(mu)).times(eta.component(mu)));
    }
    out.push(RelationCheck::new("T composition rule", compare(&lhs, &rhs)));

    out.push(RelationCheck::new("T lower triangular", lower_triangular_failure(module, &t_xi)));
    Ok(out)
}

fn owned_block(module: &JetModule, mat: &JetMatrix, n: &MultiIndex, m: &MultiIndex) -> Vec<Vec<TrigPoly>> {
    module.block(mat, n, m).into_iter().map(|r| r.into_iter().cloned().collect()).collect()
}

fn lower_triangular_failure(module: &JetModule, mat: &JetMatrix) -> Option<String> {
    for nn in module.basis() {
        for m in module.basis() {
            if m.order() > nn.order() && module.block(mat, nn, m).iter().flatten().any(|x| !x.is_zero()) {
                return Some(format!("block ({nn},{m}) nonzero"));
            }
        }
    }
    None
}

/// The relations of the `J` matrices, including the mixed rule with `T`.
pub fn check_j_relations(
    module: &JetModule,
    g: &LieAlgebraSpec,
    x: &GaugeMap,
    y: &GaugeMap,
    xi: &PolyVectorField,
) -> Result<Vec<RelationCheck>> {
    let n = module.n;
    let j_x = module.jet_matrix_j(x);
    let mut out = Vec::new();

    let mut fail = None;
    for mu in 0..n {
        let j_dx = module.jet_matrix_j(&x.deriv(mu));
        for nn in module.basis() {
            if nn.order() >= module.p {
                continue;
            }
            let up = nn.plus_unit(mu);
            for m in module.basis() {
                let lhs = owned_block(module, &j_x, &up, m);
                let mut rhs = owned_block(module, &j_dx, nn, m);
                if let Some(k) = m.minus_unit(mu) {
                    for (r, e) in rhs.iter_mut().zip(module.block(&j_x, nn, &k)) {
                        for (a, b) in r.iter_mut().zip(e) {
                            *a = &*a + b;
                        }
                    }
                }
                if lhs != rhs {
                    fail = Some(format!("J^{m}_{{{nn}+{mu}}} recursion fails"));
                }
            }
        }
    }
    out.push(RelationCheck::new("J recursion", fail));

    let zero = MultiIndex::zero(n);
    let mut fail = None;
    for m in module.basis() {
        let got = module.block(&j_x, &zero, m);
        for a in 0..module.vdim() {
            for b in 0..module.vdim() {
                let mut expect = TrigPoly::zero(n);
                if *m == zero {
                    for c in 0..g.dim {
                        expect = &expect + &x.component(c).scale(&module.gauge_matrix(c)[(a, b)]);
                    }
                }
                if *got[a][b] != expect {
                    fail = Some(format!("J^{m}_0 entry ({a},{b})"));
                }
            }
        }
    }
    out.push(RelationCheck::new("J base case", fail));

    let mut fail = None;
    for mu in 0..n {
        if let Some(f) = compare(&j_x.deriv(mu), &module.jet_matrix_j(&x.deriv(mu))) {
            fail = Some(format!("∂_{mu}: {f}"));
        }
    }
    out.push(RelationCheck::new("J derivative rule", fail));

    let j_y = module.jet_matrix_j(y);
    let lhs = module.jet_matrix_j(&g.bracket(x, y));
    out.push(RelationCheck::new("J composition rule", compare(&lhs, &j_x.commutator(&j_y))));

    let t_xi = module.jet_matrix_t(xi);
    let lhs = module.jet_matrix_j(&x.lie_derivative(xi));
    let mut rhs = t_xi.commutator(&j_x);
    for mu in 0..n {
        rhs = rhs.add(&module.jet_matrix_j(&x.deriv(mu)).times(xi.component(mu)));
    }
    out.push(RelationCheck::new("J mixed rule", compare(&lhs, &rhs)));
    out.push(RelationCheck::new("J lower triangular", lower_triangular_failure(module, &j_x)));
    Ok(out)
}

/// A linear function `Σ_A c_A(q) φ_A` on jets of a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetLinear {
    pub p: u32,
    pub coeffs: Vec<TrigPoly>,
}

/// `∂̌_μ`: raises the jet order by one, acting by Leibniz' rule with
/// `∂̌_μ f(q) = ∂_μ f(q)` and `∂̌_μ φ_{,n} = φ_{,n+μ̄}`.
pub fn prolong(module: &JetModule, f: &JetLinear, mu: usize) -> JetLinear {
    let src = module.with_order(f.p);
    let dst = module.with_order(f.p + 1);
    let mut coeffs = vec![TrigPoly::zero(module.n); dst.size()];
    for (a, c) in f.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (m, alpha) = src.component(a);
        let same = dst.index(m, alpha).expect("order grows");
        coeffs[same] = &coeffs[same] + &c.deriv(mu);
        let up = dst.index(&m.plus_unit(mu), alpha).expect("order grows");
        coeffs[up] = &coeffs[up] + c;
    }
    JetLinear { p: f.p + 1, coeffs }
}

/// Checks `∂̌_μ L_ξ = L_ξ ∂̌_μ + ∂_μ ξ^ν ∂̌_ν` on every jet coordinate
/// `φ_{,n}` with `|n| <= p`, where `L_ξ φ_{,n} = −Σ_m T^m_n(ξ) φ_{,m}`.
pub fn check_prolongation(module: &JetModule, xi: &PolyVectorField) -> Result<RelationCheck> {
    let n = module.n;
    let big = module.with_order(module.p + 1);
    let t_small = module.jet_matrix_t(xi);
    let t_big = big.jet_matrix_t(xi);
    let minus = -GaussianRational::one();
    for row in 0..module.size() {
        let (nn, alpha) = module.component(row);
        let lxi = JetLinear {
            p: module.p,
            coeffs: (0..module.size()).map(|c| t_small.entry(row, c).scale(&minus)).collect(),
        };
        for mu in 0..n {
            let lhs = prolong(module, &lxi, mu);
            let brow = big.index(&nn.plus_unit(mu), alpha).expect("order grows");
            let mut rhs: Vec<TrigPoly> = (0..big.size()).map(|c| t_big.entry(brow, c).scale(&minus)).collect();
            for nu in 0..n {
                let idx = big.index(&nn.plus_unit(nu), alpha).expect("order grows");
                rhs[idx] = &rhs[idx] + &xi.component(nu).deriv(mu);
            }
            if lhs.coeffs != rhs {
                return Ok(RelationCheck::new(
                    "prolongation intertwining",
                    Some(format!("fails at φ_{{{nn},{alpha}}}, μ = {mu}")),
                ));
            }
        }
    }
    Ok(RelationCheck::new("prolongation intertwining", None))
}

fn bin(n: i64, k: i64) -> GaussianRational {
    GaussianRational::from_int(binom(n, k) as i64)
}

/// Left and right sides of one trace identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceIdentity {
    pub name: String,
    pub lhs: TrigPoly,
    pub rhs: TrigPoly,
}

impl TraceIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `Σ_{m,n} tr A^m_n B^n_m = tr(A B)`. For lower-triangular matrices only
/// blocks with `|m| = |n|` contribute.
fn trace_pairing(a: &JetMatrix, b: &JetMatrix) -> TrigPoly {
    a.matmul(b).trace()
}

/// The three trace identities for `T` matrices, with brute-force sums on
/// the left and the closed forms on the right.
pub fn lemma1(module: &JetModule, xi: &PolyVectorField, eta: &PolyVectorField) -> Result<Vec<TraceIdentity>> {
    let inv = trace_invariants(&module.rep)?;
    let (n, p) = (module.n as i64, module.p as i64);
    let b0 = bin(n + p, p);
    let b1 = bin(n + p, p - 1);
    let nn = module.n;

    let lhs_i = GaussianRational::from_int(module.size() as i64);
    let rhs_i = &b0 * &inv.dim;
    let lhs_i = TrigPoly::constant(nn, lhs_i);
    let rhs_i = TrigPoly::constant(nn, rhs_i);

    let t_xi = module.jet_matrix_t(xi);
    let t_eta = module.jet_matrix_t(eta);
    let lhs_ii = t_xi.trace();
    let rhs_ii = xi.divergence().scale(&(&b0 * &inv.k0 + &b1 * &inv.dim));

    let lhs_iii = trace_pairing(&t_xi, &t_eta);
    let mut cross = TrigPoly::zero(nn);
    for mu in 0..nn {
        for nu in 0..nn {
            cross = &cross + &(&xi.component(mu).deriv(nu) * &eta.component(nu).deriv(mu));
        }
    }
    let divs = &xi.divergence() * &eta.divergence();
    let c_cross = &b0 * &inv.k1 + &bin(n + p + 1, p - 1) * &inv.dim;
    let c_div = &b0 * &inv.k2 + &bin(n + p, p - 2) * &inv.dim + &(&b1 * &inv.k0) * &GaussianRational::from_int(2);
    let rhs_iii = &cross.scale(&c_cross) + &divs.scale(&c_div);

    Ok(vec![
        TraceIdentity { name: "lemma1.i".into(), lhs: lhs_i, rhs: rhs_i },
        TraceIdentity { name: "lemma1.ii".into(), lhs: lhs_ii, rhs: rhs_ii },
        TraceIdentity { name: "lemma1.iii".into(), lhs: lhs_iii, rhs: rhs_iii },
    ])
}

/// The three trace identities mixing `J` with `J` and `T`.
pub fn lemma5(
    module: &JetModule,
    g: &LieAlgebraSpec,
    x: &GaugeMap,
    y: &GaugeMap,
    xi: &PolyVectorField,
) -> Result<Vec<TraceIdentity>> {
    let inv: TraceInvariants = trace_invariants(&module.rep)?;
    let (n, p) = (module.n as i64, module.p as i64);
    let b0 = bin(n + p, p);
    let b1 = bin(n + p, p - 1);
    let nn = module.n;
    let j_x = module.jet_matrix_j(x);
    let j_y = module.jet_matrix_j(y);
    let t_xi = module.jet_matrix_t(xi);

    let zx = x.contract(&g.trace_vector);
    let lhs_i = j_x.trace();
    let rhs_i = zx.scale(&(&(&g.z_m * &b0) * &inv.dim));

    let lhs_ii = trace_pairing(&j_x, &j_y);
    let mut form = TrigPoly::zero(nn);
    for a in 0..g.dim {
        for b in 0..g.dim {
            let c = &g.y_m * &g.killing[a][b] + &g.w_m * &(&g.trace_vector[a] * &g.trace_vector[b]);
            if !c.is_zero() {
                form = &form + &(x.component(a) * y.component(b)).scale(&c);
            }
        }
    }
    let rhs_ii = form.scale(&(&b0 * &inv.dim));

    let lhs_iii = trace_pairing(&t_xi, &j_x);
    let rhs_iii = (&xi.divergence() * &zx).scale(&(&g.z_m * &(&b0 * &inv.k0 + &b1 * &inv.dim)));

    Ok(vec![
        TraceIdentity { name: "lemma5.i".into(), lhs: lhs_i, rhs: rhs_i },
        TraceIdentity { name: "lemma5.ii".into(), lhs: lhs_ii, rhs: rhs_ii },
        TraceIdentity { name: "lemma5.iii".into(), lhs: lhs_iii, rhs: rhs_iii },
    ])
}

/// Reject anything but a rep/order pair the engine can size.
pub fn check_module_bounds(rep: &TensorRepSpec, p: u32) -> Result<()> {
    if rep.n == 0 || rep.n > 4 || p > 4 {
        return Err(EngineError::InvalidInput(format!("jet module N={} p={p} outside supported range", rep.n)));
    }
    Ok(())
}
