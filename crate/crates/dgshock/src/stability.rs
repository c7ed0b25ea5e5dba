//! Linearized DG iteration operator around a steady state, its Godunov
//! block reduction, Runge-Kutta amplification and spectral diagnostics.

use num_complex::Complex;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::flux::{Burgers, ConvexFlux, KinkBranch, NumericalFluxKind};
use crate::legendre::{
    coupling_matrices, gauss_rule, legendre_derivs, legendre_values, BasisOrder,
};
use crate::linalg::{eigenvalues_dense, inverse_iteration, shifted_singular_values, DenseMatrix};
use crate::profile::{composite_solution, interface_limit, profile, ShockProfile};
use crate::scalar::{parity, Real};
use crate::scheme::{BoundaryData, DgScheme, Mesh1D, ModalSolution};
use crate::svv;

/// One-sided branch used at non-differentiable flux points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinkPolicy {
    /// The same branch at every face.
    Uniform(KinkBranch),
    /// Faces up to the left face of the given cell are upwinded from the
    /// left, faces from its right face on from the right.
    ShockCell(usize),
}

impl KinkPolicy {
    pub fn branch_at(self, face: usize) -> KinkBranch {
        match self {
            KinkPolicy::Uniform(b) => b,
            KinkPolicy::ShockCell(jc) if face <= jc => KinkBranch::LeftUpwind,
            KinkPolicy::ShockCell(_) => KinkBranch::RightUpwind,
        }
    }
}

/// `L = I + diag(λ_k) ∂R/∂U` stored as three block diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTridiagonalOperator<T> {
    pub n_cells: usize,
    pub p: BasisOrder,
    pub lambda: T,
    /// `sub[j]` couples cell `j` to `j-1`; `sub[0]` is zero.
    pub sub: Vec<DenseMatrix<T>>,
    pub diag: Vec<DenseMatrix<T>>,
    /// `sup[j]` couples cell `j` to `j+1`; the last one is zero.
    pub sup: Vec<DenseMatrix<T>>,
    /// Faces where the numerical flux is not differentiable.
    pub kink_faces: Vec<usize>,
}

impl<T: Real> BlockTridiagonalOperator<T> {
    pub fn block_size(&self) -> usize {
        self.p.n_modes()
    }

    pub fn dim(&self) -> usize {
        self.n_cells * self.block_size()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let m = self.block_size();
        let mut out = DenseMatrix::zeros(self.dim(), self.dim());
        for j in 0..self.n_cells {
            for k in 0..m {
                for l in 0..m {
                    out[(j * m + k, j * m + l)] = self.diag[j][(k, l)];
                    if j > 0 {
                        out[(j * m + k, (j - 1) * m + l)] = self.sub[j][(k, l)];
                    }
                    if j + 1 < self.n_cells {
                        out[(j * m + k, (j + 1) * m + l)] = self.sup[j][(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let m = self.block_size();
        assert_eq!(v.len(), self.dim());
        let mut out = vec![T::zero(); v.len()];
        for j in 0..self.n_cells {
            let mut add = |blk: &DenseMatrix<T>, src: usize| {
                let x = blk.mul_vec(&v[src * m..(src + 1) * m]);
                for (o, xi) in out[j * m..(j + 1) * m].iter_mut().zip(x) {
                    *o += xi;
                }
            };
            add(&self.diag[j], j);
            if j > 0 {
                add(&self.sub[j], j - 1);
            }
            if j + 1 < self.n_cells {
                add(&self.sup[j], j + 1);
            }
        }
        out
    }
}

/// Linearization of one forward Euler step with `Δt = λ h` around `sol`.
/// Active SVV terms are included with `m_j` frozen at the base state.
pub fn assemble<T: Real, F: ConvexFlux<T>>(
    scheme: &DgScheme<T, F>,
    sol: &ModalSolution<T>,
    lambda: T,
    policy: KinkPolicy,
) -> Result<BlockTridiagonalOperator<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    if sol.p != scheme.p || sol.n_cells != scheme.mesh.n_cells {
        return Err(Error::Domain("state does not match the scheme".into()));
    }
    let n = sol.n_cells;
    let m = sol.p.n_modes();
    let h = scheme.mesh.h;

    let mut d_minus = Vec::with_capacity(n + 1);
    let mut d_plus = Vec::with_capacity(n + 1);
    let mut kink_faces = Vec::new();
    for i in 0..=n {
        let (a, b) = scheme.face_states(sol, i);
        let nf = scheme.numerical_flux.with_kink_branch(policy.branch_at(i));
        let parts = nf.partials(&scheme.flux, a, b);
        if parts.kink {
            kink_faces.push(i);
        }
        d_minus.push(parts.d_minus);
        d_plus.push(parts.d_plus);
    }

    let quad = scheme.quadrature();
    let (phi, dphi) = scheme.basis_tables();
    let lam_k: Vec<T> = (0..m).map(|k| T::int(2 * k as i64 + 1) * lambda).collect();

    let mut sub = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n);
    for j in 0..n {
        let cell = sol.cell(j);
        let mut dr = DenseMatrix::zeros(m, m);
        for (q, &w) in quad.weights.iter().enumerate() {
            let u: T = cell.iter().zip(&phi[q]).map(|(&c, &l)| c * l).sum();
            let wf = w * scheme.flux.f_prime(u);
            for k in 0..m {
                for l in 0..m {
                    dr[(k, l)] += wf * phi[q][l] * dphi[q][k];
                }
            }
        }
        for k in 0..m {
            for l in 0..m {
                dr[(k, l)] += parity::<T>(k + l) * d_plus[j] - d_minus[j + 1];
            }
        }
        if let Some(cfg) = &scheme.svv {
            let mj = svv::select_m(sol, j, cfg, &scheme.flux, &scheme.bc, h);
            for l in 0..m {
                let mut e = vec![T::zero(); m];
                e[l] = T::one();
                for (k, v) in svv::svv_term(&e, cfg, mj, h).into_iter().enumerate() {
                    dr[(k, l)] += v;
                }
            }
        }
        let mut dblk = DenseMatrix::identity(m);
        let mut lo = DenseMatrix::zeros(m, m);
        let mut up = DenseMatrix::zeros(m, m);
        for k in 0..m {
            for l in 0..m {
                dblk[(k, l)] += lam_k[k] * dr[(k, l)];
                if j > 0 {
                    lo[(k, l)] = lam_k[k] * parity::<T>(k) * d_minus[j];
                }
                if j + 1 < n {
                    up[(k, l)] = -lam_k[k] * parity::<T>(l) * d_plus[j + 1];
                }
            }
        }
        sub.push(lo);
        diag.push(dblk);
        sup.push(up);
    }
    Ok(BlockTridiagonalOperator {
        n_cells: n,
        p: sol.p,
        lambda,
        sub,
        diag,
        sup,
        kink_faces,
    })
}

/// Runge-Kutta amplification `q_r(L)`: `L`, `L + (L-I)²/2`, or
/// `I + Z + Z²/2 + Z³/6` with `Z = L - I`.
pub fn rk_amplification<T: Real>(l: &DenseMatrix<T>, order: usize) -> Result<DenseMatrix<T>> {
    let n = l.rows;
    let id = DenseMatrix::identity(n);
    let z = l.sub(&id);
    let half = T::lit(0.5);
    match order {
        1 => Ok(l.clone()),
        2 => Ok(l.add(&z.mul(&z).scale(half))),
        3 => {
            let z2 = z.mul(&z);
            let z3 = z2.mul(&z);
            Ok(id
                .add(&z)
                .add(&z2.scale(half))
                .add(&z3.scale(T::one() / T::lit(6.0))))
        }
        _ => Err(Error::Unsupported(format!("Runge-Kutta order {order}"))),
    }
}

/// Scalar stability polynomial matching [`rk_amplification`].
pub fn stability_polynomial<T: Real>(order: usize, mu: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let z = mu - one;
    let half = T::lit(0.5);
    match order {
        1 => mu,
        2 => mu + z * z * half,
        _ => one + z + z * z * half + z * z * z / T::lit(6.0),
    }
}

/// Unit-modulus eigenvalue cluster with its multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectEntry<T> {
    pub eigenvalue: Complex<T>,
    pub algebraic: usize,
    pub geometric: usize,
}

impl<T> DefectEntry<T> {
    pub fn semisimple(&self) -> bool {
        self.algebraic == self.geometric
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    /// Sorted by decreasing modulus.
    pub eigenvalues: Vec<Complex<T>>,
    /// Unit-norm eigenvectors aligned with `eigenvalues`.
    pub eigenvectors: Option<Vec<Vec<Complex<T>>>>,
    pub spectral_radius: T,
    pub stable: bool,
    pub defect_report: Vec<DefectEntry<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions<T> {
    pub vectors: bool,
    /// `||μ| - 1|` below which an eigenvalue counts as unit modulus.
    pub unit_tol: T,
    /// Relative singular-value threshold for the nullity estimate.
    pub rank_tol: T,
    /// Eigenvalues closer than this (relative) form one cluster.
    pub cluster_tol: T,
    /// Entries below this fraction of `max |a_ij|` are ignored when
    /// splitting the matrix into irreducible blocks.
    pub chop_tol: T,
}

impl<T: Real> Default for EigenOptions<T> {
    fn default() -> Self {
        EigenOptions {
            vectors: false,
            unit_tol: T::lit(1e-8),
            rank_tol: T::lit(1e-8),
            cluster_tol: T::lit(1e-6),
            chop_tol: T::lit(1e-14),
        }
    }
}

impl<T: Real> EigenOptions<T> {
    pub fn with_vectors(mut self) -> Self {
        self.vectors = true;
        self
    }
}

/// Strongly connected components of the sparsity graph; the matrix is
/// block triangular over them.
pub fn irreducible_blocks<T: Real>(m: &DenseMatrix<T>, chop_tol: T) -> Vec<Vec<usize>> {
    let n = m.rows;
    let cut = m.max_abs() * chop_tol;
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * 4);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)].abs() > cut {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|ix| ix.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    comps.sort();
    comps
}

/// Eigenvalues by QR on each irreducible block, sorted by decreasing
/// modulus.
pub fn eigenvalues<T: Real>(m: &DenseMatrix<T>, chop_tol: T) -> Result<Vec<Complex<T>>> {
    if !m.is_square() {
        return Err(Error::Domain("matrix is not square".into()));
    }
    let mut ev = Vec::with_capacity(m.rows);
    for comp in irreducible_blocks(m, chop_tol) {
        if comp.len() == 1 {
            ev.push(Complex::new(m[(comp[0], comp[0])], T::zero()));
        } else {
            ev.extend(eigenvalues_dense(&m.submatrix(&comp))?);
        }
    }
    sort_spectrum(&mut ev);
    Ok(ev)
}

fn sort_spectrum<T: Real>(ev: &mut [Complex<T>]) {
    ev.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap()
            .then(b.re.partial_cmp(&a.re).unwrap())
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
}

/// Groups of indices into `ev` whose members chain within `tol`.
pub fn cluster<T: Real>(ev: &[Complex<T>], tol: T) -> Vec<Vec<usize>> {
    let n = ev.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (ev[i] - ev[j]).norm() <= tol * T::one().max(ev[i].norm()) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = std::collections::BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let g = *root_of.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

/// Number of singular values of `A - mu I` below `rank_tol · ‖A‖_F`.
pub fn nullity<T: Real>(m: &DenseMatrix<T>, mu: Complex<T>, rank_tol: T) -> usize {
    let cut = rank_tol * m.frobenius().max(T::one());
    shifted_singular_values(m, mu)
        .into_iter()
        .filter(|&s| s <= cut)
        .count()
}

/// Spectrum, stability verdict and defect structure of a dense operator.
pub fn eigen<T: Real>(m: &DenseMatrix<T>, opts: &EigenOptions<T>) -> Result<Spectrum<T>> {
    let ev = eigenvalues(m, opts.chop_tol)?;
    let spectral_radius = ev.iter().fold(T::zero(), |r, z| r.max(z.norm()));
    let mut defect_report = Vec::new();
    for group in cluster(&ev, opts.cluster_tol) {
        let mean: Complex<T> =
            group.iter().map(|&i| ev[i]).sum::<Complex<T>>() / T::int(group.len() as i64);
        if (mean.norm() - T::one()).abs() < opts.unit_tol.max(opts.cluster_tol) {
            defect_report.push(DefectEntry {
                eigenvalue: mean,
                algebraic: group.len(),
                geometric: nullity(m, mean, opts.rank_tol).min(group.len()),
            });
        }
    }
    let stable =
        spectral_radius <= T::one() + opts.unit_tol && defect_report.iter().all(|d| d.semisimple());
    let eigenvectors = opts
        .vectors
        .then(|| ev.iter().map(|&mu| inverse_iteration(m, mu)).collect());
    Ok(Spectrum {
        eigenvalues: ev,
        eigenvectors,
        spectral_radius,
        stable,
        defect_report,
    })
}

/// Blocks of the Godunov operator around a shock interior to a cell:
/// uniform-left, shock cell and uniform-right.
#[derive(Debug, Clone, PartialEq)]
pub struct GodunovBlocks<T> {
    pub left: DenseMatrix<T>,
    pub shock: DenseMatrix<T>,
    pub right: DenseMatrix<T>,
}

/// `δ + (2k+1)λ_L (N - 1)`, `δ + λ_k ∫ f'(u_h) L_l L_k'`, and
/// `δ + (2k+1)λ_R (N + (-1)^{k+l})`.
pub fn godunov_blocks<T: Real, F: ConvexFlux<T>>(
    flux: &F,
    lambda_l: T,
    lambda_r: T,
    shock_coeffs: &[T],
    lambda: T,
) -> GodunovBlocks<T> {
    let m = shock_coeffs.len();
    let p = m - 1;
    let nm = coupling_matrices(BasisOrder(p));
    let quad = gauss_rule::<T>(2 * p + 2);
    let mut left = DenseMatrix::identity(m);
    let mut shock = DenseMatrix::identity(m);
    let mut right = DenseMatrix::identity(m);
    let mut vol = DenseMatrix::zeros(m, m);
    for (&s, &w) in quad.nodes.iter().zip(&quad.weights) {
        let phi = legendre_values(p, s);
        let dphi = legendre_derivs(p, s);
        let u: T = shock_coeffs.iter().zip(&phi).map(|(&c, &l)| c * l).sum();
        let wf = w * flux.f_prime(u);
        for k in 0..m {
            for l in 0..m {
                vol[(k, l)] += wf * phi[l] * dphi[k];
            }
        }
    }
    for k in 0..m {
        let ck = T::int(2 * k as i64 + 1);
        for l in 0..m {
            let nkl: T = nm.n_at(k, l);
            left[(k, l)] += ck * lambda_l * (nkl - T::one());
            shock[(k, l)] += ck * lambda * vol[(k, l)];
            right[(k, l)] += ck * lambda_r * (nkl + parity::<T>(k + l));
        }
    }
    GodunovBlocks { left, shock, right }
}

/// Eigenvalues of the three Godunov blocks for Burgers, with
/// `λ_L = λ f'(u_L)`, `λ_R = λ f'(u_R)`.
pub fn godunov_block_spectra<T: Real>(
    p: usize,
    lambda_l: T,
    lambda_r: T,
    prof: &ShockProfile<T>,
    lambda: T,
) -> Result<[Vec<Complex<T>>; 3]> {
    if prof.p.p() != p {
        return Err(Error::Domain("profile degree does not match p".into()));
    }
    let b = godunov_blocks(&Burgers, lambda_l, lambda_r, &prof.cell_coeffs(), lambda);
    let tol = EigenOptions::<T>::default().chop_tol;
    Ok([
        eigenvalues(&b.left, tol)?,
        eigenvalues(&b.shock, tol)?,
        eigenvalues(&b.right, tol)?,
    ])
}

/// Constants appearing in the closed-form spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants<T> {
    pub gamma1: T,
    pub gamma2: T,
    pub gamma3: Complex<T>,
    pub gamma4_plus: Complex<T>,
    pub gamma4_minus: Complex<T>,
    pub lambda_l: T,
    pub lambda_r: T,
    pub lambda_bar: T,
}

impl<T: Real> StabilityConstants<T> {
    /// Burgers scalings `λ_L = λu_L`, `λ_R = λu_R`, `λ̄ = u_L λ`.
    pub fn new(lambda: T, u_l: T, u_r: T) -> Self {
        let c = |x: f64| T::lit(x);
        let three = c(3.0);
        let gamma1 = three.powf(c(2.0) / three) - three.cbrt();
        let gamma2 = three.powf(c(7.0) / c(6.0)) + three.powf(c(5.0) / c(6.0));
        let w = Complex::new(c(-2.0), c(6.0).sqrt());
        let gamma3 = w.powf(c(-1.0) / three) * c(10.0).powf(c(2.0) / three) + (w * c(10.0)).cbrt();
        let g34 = (gamma3 - c(4.0)).sqrt();
        let i = Complex::new(T::zero(), T::one());
        let gamma4_plus = i * (gamma3 + c(8.0) + g34.inv() * c(8.0)).sqrt();
        let gamma4_minus = i * (gamma3 + c(8.0) - g34.inv() * c(8.0)).sqrt();
        StabilityConstants {
            gamma1,
            gamma2,
            gamma3,
            gamma4_plus,
            gamma4_minus,
            lambda_l: lambda * u_l,
            lambda_r: lambda * u_r,
            lambda_bar: lambda * u_l,
        }
    }

    /// Eigenvalues `μ_l` of `(2k+1)(N_{k,l} - 1)` for `p = 3`.
    pub fn p3_uniform_mu(&self) -> [Complex<T>; 4] {
        let g34 = (self.gamma3 - T::lit(4.0)).sqrt();
        let four = Complex::new(T::lit(4.0), T::zero());
        [
            -four + g34 + self.gamma4_plus,
            -four + g34 - self.gamma4_plus,
            -four - g34 + self.gamma4_minus,
            -four - g34 - self.gamma4_minus,
        ]
    }
}

/// Closed-form eigenvalues of the Godunov blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry<T> {
    pub left: Vec<Complex<T>>,
    pub shock: Vec<Complex<T>>,
    pub right: Vec<Complex<T>>,
    /// Geometric multiplicity of `μ = 1` in the shock block at the
    /// degenerate positions.
    pub shock_unit_geometric: Option<usize>,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

/// Closed-form spectra of the Godunov blocks for Burgers with
/// `(u_L, u_R) = (a, -a)`, `a > 0`.
pub fn table_oracle<T: Real>(p: usize, s_c: T, lambda: T, u_l: T, u_r: T) -> Result<TableEntry<T>> {
    if !(u_l > T::zero()) || (u_l + u_r).abs() > T::lit(1e-12) * u_l {
        return Err(Error::Unsupported(
            "closed forms need (u_L, u_R) = (a, -a), a > 0".into(),
        ));
    }
    let sf = s_c.as_f64();
    if sf.abs() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("s_c = {sf} outside [-1, 1]")));
    }
    let k = StabilityConstants::new(lambda, u_l, u_r);
    let c = |x: f64| T::lit(x);
    let re = |x: T| Complex::new(x, T::zero());
    let one = T::one();
    let i = Complex::new(T::zero(), one);
    let (ll, lr, lb) = (k.lambda_l, k.lambda_r, k.lambda_bar);

    let (left, right) = match p {
        0 => (vec![re(one - ll)], vec![re(one + lr)]),
        1 => {
            let z = Complex::new(c(2.0), c(2.0).sqrt());
            (
                vec![re(one) - z * ll, re(one) - z.conj() * ll],
                vec![re(one) + z * lr, re(one) + z.conj() * lr],
            )
        }
        2 => {
            let a = c(6.0) - k.gamma1;
            let z = Complex::new(a, k.gamma2);
            (
                vec![
                    re(one - ll * (c(3.0) + k.gamma1)),
                    re(one) - z * (ll / c(2.0)),
                    re(one) - z.conj() * (ll / c(2.0)),
                ],
                vec![
                    re(one + lr * (c(3.0) + k.gamma1)),
                    re(one) + z * (lr / c(2.0)),
                    re(one) + z.conj() * (lr / c(2.0)),
                ],
            )
        }
        3 => {
            let mu = k.p3_uniform_mu();
            (
                mu.iter().map(|&m| re(one) + m * ll).collect(),
                mu.iter().map(|&m| re(one) - m * lr).collect(),
            )
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "closed-form spectra for p = {p}"
            )))
        }
    };

    let ones = |n: usize| vec![re(one); n];
    let (shock, geo) = if near(sf.abs(), 1.0) && p >= 1 {
        (ones(p + 1), Some(1))
    } else {
        match p {
            0 => (ones(1), None),
            1 => {
                let r = c(2.0) * lb * (c(3.0) * (one - s_c * s_c)).sqrt();
                (vec![re(one), re(one - r)], None)
            }
            2 if near(sf.abs(), 2.0 / 3.0) => (ones(3), Some(2)),
            2 if sf.abs() < 2.0 / 3.0 => {
                let r = lb * (c(3.0) * (c(4.0) - c(9.0) * s_c * s_c)).sqrt();
                (vec![re(one), re(one - r), re(one - c(2.0) * r)], None)
            }
            2 => {
                let root5 = (c(5.0) * (one - s_c * s_c)).sqrt();
                let sgn = if sf > 0.0 { one } else { -one };
                let arg = sgn * c(3.0) * s_c * root5 - c(6.0) * (one - s_c * s_c);
                let z = re(arg).sqrt() * i * (c(2.0) * lb);
                (vec![re(one), re(one) + z, re(one) - z], None)
            }
            3 if near(sf.abs(), 1.0 / 6.0) => {
                let mut v = ones(3);
                v.push(re(one - c(10.0) * lb / c(3.0).sqrt()));
                (v, Some(2))
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "closed-form shock-cell spectrum for p = {p}, s_c = {sf}"
                )))
            }
        }
    };
    Ok(TableEntry {
        left,
        shock,
        right,
        shock_unit_geometric: geo,
    })
}

/// Shock-cell profile for `|s_c| < 1` or its interface limit at `±1`.
pub fn shock_profile_or_limit<T: Real>(p: usize, s_c: T) -> Result<ShockProfile<T>> {
    let sf = s_c.as_f64();
    if near(sf.abs(), 1.0) {
        Ok(interface_limit(p, if sf > 0.0 { 1 } else { -1 }))
    } else if p == 0 {
        profile(0, s_c)
    } else {
        profile(p, s_c)
    }
}

/// Composite steady state with the shock in `shock_cell` and the scheme
/// on `[0, 1]` with boundary states `(1, -1)`.
pub fn composite_setup<T: Real>(
    p: usize,
    s_c: T,
    kind: NumericalFluxKind,
    n_cells: usize,
    shock_cell: usize,
) -> Result<(DgScheme<T, Burgers>, ModalSolution<T>)> {
    if shock_cell >= n_cells {
        return Err(Error::Domain(format!(
            "shock cell {shock_cell} outside {n_cells} cells"
        )));
    }
    let prof = shock_profile_or_limit(p, s_c)?;
    let sol = composite_solution(&prof, n_cells, shock_cell);
    let mesh = Mesh1D::unit(n_cells)?;
    let scheme = DgScheme::new(
        Burgers,
        crate::flux::NumericalFlux::new(kind),
        BoundaryData::new(T::one(), -T::one()),
        mesh,
        BasisOrder(p),
    );
    Ok((scheme, sol))
}

/// Operator around the closed-form composite state.
pub fn composite_operator<T: Real>(
    p: usize,
    s_c: T,
    kind: NumericalFluxKind,
    n_cells: usize,
    shock_cell: usize,
    lambda: T,
) -> Result<BlockTridiagonalOperator<T>> {
    let (scheme, sol) = composite_setup(p, s_c, kind, n_cells, shock_cell)?;
    assemble(&scheme, &sol, lambda, KinkPolicy::ShockCell(shock_cell))
}

/// Shock-cell structure of one growing mode.
#[derive(Debug, Clone, PartialEq)]
pub struct UnstableMode<T> {
    pub eigenvalue: Complex<T>,
    /// Real part of the shock-cell components after rotating the phase so
    /// that the last component is real and non-negative.
    pub shock_real: Vec<T>,
    /// `|r_p| / Σ|r_l|` of `shock_real`.
    pub concentration: T,
    pub concentrated: bool,
    /// Share of the eigenvector's squared norm inside the shock cell.
    pub shock_cell_fraction: T,
}

/// Growing modes (`|μ| > 1 + tol`) and their shock-cell structure.
pub fn unstable_mode_structure<T: Real>(
    spec: &Spectrum<T>,
    p: usize,
    shock_cell: usize,
    tol: T,
) -> Result<Vec<UnstableMode<T>>> {
    let vecs = spec
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Domain("spectrum was computed without eigenvectors".into()))?;
    let m = p + 1;
    let mut out = Vec::new();
    for (mu, v) in spec.eigenvalues.iter().zip(vecs) {
        if mu.norm() <= T::one() + tol {
            continue;
        }
        let cell = &v[shock_cell * m..(shock_cell + 1) * m];
        let pivot = cell[p];
        let rot = if pivot.norm() > T::zero() {
            pivot.conj() / pivot.norm()
        } else {
            Complex::new(T::one(), T::zero())
        };
        let shock_real: Vec<T> = cell.iter().map(|z| (z * rot).re).collect();
        let total: T = shock_real.iter().map(|x| x.abs()).sum();
        let concentration = if total > T::zero() {
            shock_real[p].abs() / total
        } else {
            T::zero()
        };
        let all: T = v.iter().map(|z| z.norm_sqr()).sum();
        let inside: T = cell.iter().map(|z| z.norm_sqr()).sum();
        out.push(UnstableMode {
            eigenvalue: *mu,
            concentration,
            concentrated: concentration > T::lit(0.99),
            shock_real,
            shock_cell_fraction: if all > T::zero() {
                inside / all
            } else {
                T::zero()
            },
        });
    }
    Ok(out)
}

/// Upper bound on `λ̄` for forward Euler stability of the `p = 1` shock
/// cell, `(3(1 - s_c²))^{-1/2}`.
pub fn p1_euler_bound<T: Real>(s_c: T) -> T {
    T::one() / (T::lit(3.0) * (T::one() - s_c * s_c)).sqrt()
}

/// Multiset distance: largest gap under a greedy nearest matching, or
/// `None` when sizes differ.
pub fn multiset_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Option<T> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = T::zero();
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::NumericalFlux;
    use crate::scheme::project_initial;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn constants_from_definitions() {
        let k = StabilityConstants::new(0.2, 1.0, -1.0);
        assert_abs_diff_eq!(k.gamma1, 0.6378343, epsilon = 1e-6);
        assert_abs_diff_eq!(k.gamma2, 6.1008604, epsilon = 1e-6);
        assert_abs_diff_eq!(k.gamma3.re, 4.6196730, epsilon = 1e-6);
        assert_abs_diff_eq!(k.gamma3.im, 0.0, epsilon = 1e-12);
        // μ_l are the eigenvalues of (2k+1)(N - 1) for p = 3.
        let b = godunov_blocks(&Burgers, 1.0, 1.0, &[0.0; 4], 1.0);
        let mut shifted = b.left.clone();
        for i in 0..4 {
            shifted[(i, i)] -= 1.0;
        }
        let ev = eigenvalues(&shifted, 1e-14).unwrap();
        let want = k.p3_uniform_mu();
        assert!(multiset_distance(&ev, &want).unwrap() < 1e-10);
    }

    #[test]
    fn uniform_blocks_from_assembly() {
        // Uniform u_L state, Godunov: diagonal blocks δ + λ_k(N - 1), no
        // super-blocks.
        let (scheme, _) = composite_setup::<f64>(2, 0.0, NumericalFluxKind::Godunov, 6, 3).unwrap();
        let sol = ModalSolution::uniform(BasisOrder(2), 6, 1.0);
        let op = assemble(
            &scheme,
            &sol,
            0.2,
            KinkPolicy::Uniform(KinkBranch::LeftUpwind),
        )
        .unwrap();
        let b = godunov_blocks(&Burgers, 0.2, -0.2, &[0.0; 3], 0.2);
        for j in 0..6 {
            assert!(op.diag[j].sub(&b.left).max_abs() < 1e-14);
            assert_eq!(op.sup[j].max_abs(), 0.0);
        }
        let sol = ModalSolution::uniform(BasisOrder(2), 6, -1.0);
        let op = assemble(
            &scheme,
            &sol,
            0.2,
            KinkPolicy::Uniform(KinkBranch::RightUpwind),
        )
        .unwrap();
        for j in 0..6 {
            assert!(op.diag[j].sub(&b.right).max_abs() < 1e-14);
            assert_eq!(op.sub[j].max_abs(), 0.0);
        }
    }

    #[test]
    fn quoted_p2_constants() {
        let t = table_oracle(2, 0.0, 0.2, 1.0, -1.0).unwrap();
        let b = godunov_blocks(&Burgers, 0.2, -0.2, &[0.0; 3], 0.2);
        let ev = eigenvalues(&b.left, 1e-14).unwrap();
        assert!(multiset_distance(&ev, &t.left).unwrap() < 1e-10);
        assert!(ev.iter().any(|z| (z - c(0.2724, 0.0)).norm() < 1e-3));
        assert!(ev.iter().any(|z| (z - c(0.4638, 0.6101)).norm() < 1e-3));
    }

    #[test]
    fn p1_uniform_pair() {
        let t = table_oracle(1, 0.5, 1.0 / 3.0, 1.0, -1.0).unwrap();
        let want = c(1.0 - 2.0 / 3.0, -(2f64.sqrt()) / 3.0);
        assert!(t.left.iter().any(|z| (z - want).norm() < 1e-14));
    }

    #[test]
    fn block_union_equals_full_spectrum() {
        for (p, s) in [(1, 0.3), (2, 0.5), (2, 0.8), (2, -0.75), (3, 0.4)] {
            let lam = 1.0 / (2 * p + 1) as f64;
            let op = composite_operator(p, s, NumericalFluxKind::Godunov, 20, 10, lam).unwrap();
            assert!(op.kink_faces.is_empty());
            let full = eigenvalues(&op.to_dense(), 1e-14).unwrap();
            let prof = profile(p, s).unwrap();
            let [l, sh, r] = godunov_block_spectra(p, lam, -lam, &prof, lam).unwrap();
            let mut union = Vec::new();
            for j in 0..20 {
                union.extend(match j.cmp(&10) {
                    std::cmp::Ordering::Less => l.clone(),
                    std::cmp::Ordering::Equal => sh.clone(),
                    std::cmp::Ordering::Greater => r.clone(),
                });
            }
            let d = multiset_distance(&full, &union).unwrap();
            assert!(d < 1e-8, "p={p} s={s} d={d}");
        }
    }

    #[test]
    fn closed_form_table_match() {
        for p in 0..=2usize {
            let lam = 1.0 / (2 * p + 1) as f64;
            let branches: Vec<(f64, f64)> = match p {
                2 => vec![
                    (-1.0, -2.0 / 3.0),
                    (-2.0 / 3.0, 2.0 / 3.0),
                    (2.0 / 3.0, 1.0),
                ],
                _ => vec![(-1.0, 1.0)],
            };
            for (a, b) in branches {
                for i in 1..=11 {
                    let s = a + (b - a) * i as f64 / 12.0;
                    let op =
                        composite_operator(p, s, NumericalFluxKind::Godunov, 20, 10, lam).unwrap();
                    let full = eigenvalues(&op.to_dense(), 1e-14).unwrap();
                    let t = table_oracle(p, s, lam, 1.0, -1.0).unwrap();
                    let mut want = Vec::new();
                    for j in 0..20 {
                        want.extend(match j.cmp(&10) {
                            std::cmp::Ordering::Less => t.left.clone(),
                            std::cmp::Ordering::Equal => t.shock.clone(),
                            std::cmp::Ordering::Greater => t.right.clone(),
                        });
                    }
                    let d = multiset_distance(&full, &want).unwrap();
                    assert!(d < 1e-8, "p={p} s={s} d={d}");
                }
            }
        }
    }

    #[test]
    fn degenerate_points() {
        let lam = 0.1;
        for p in 1..=3 {
            for side in [1.0, -1.0] {
                let op =
                    composite_operator(p, side, NumericalFluxKind::Godunov, 12, 6, lam).unwrap();
                let spec = eigen(&op.to_dense(), &EigenOptions::default()).unwrap();
                let unit: Vec<_> = spec
                    .defect_report
                    .iter()
                    .filter(|d| (d.eigenvalue - c(1.0, 0.0)).norm() < 1e-6)
                    .collect();
                assert_eq!(unit.len(), 1, "p={p} side={side}");
                assert_eq!(unit[0].algebraic, p + 1);
                assert_eq!(unit[0].geometric, 1);
                assert!(!spec.stable);
            }
        }
        for (p, s, geo) in [
            (2, 2.0 / 3.0, 2),
            (2, -2.0 / 3.0, 2),
            (3, 1.0 / 6.0, 2),
            (3, -1.0 / 6.0, 2),
        ] {
            let t = table_oracle(p, s, lam, 1.0, -1.0).unwrap();
            assert_eq!(t.shock_unit_geometric, Some(geo));
            // Limit of the profile on either side.
            let prof = profile(p, s + if s > 0.0 { -1e-7 } else { 1e-7 }).unwrap();
            let b = godunov_blocks(&Burgers, lam, -lam, &prof.cell_coeffs(), lam);
            let ev = eigenvalues(&b.shock, 1e-14).unwrap();
            assert!(
                multiset_distance(&ev, &t.shock).unwrap() < 1e-3,
                "p={p} s={s}"
            );
        }
    }

    #[test]
    fn p2_outer_branch_unstable_for_all_lambda() {
        for s in [0.7, 0.8, 0.95] {
            for lam in [0.2, 0.02, 0.002] {
                let op = composite_operator(2, s, NumericalFluxKind::Godunov, 20, 10, lam).unwrap();
                let spec = eigen(&op.to_dense(), &EigenOptions::default()).unwrap();
                assert!(spec.spectral_radius > 1.0, "s={s} lam={lam}");
            }
        }
    }

    #[test]
    fn unstable_mode_lives_in_highest_dof() {
        let s = 0.8f64;
        let op = composite_operator(2, s, NumericalFluxKind::Godunov, 20, 10, 0.2).unwrap();
        let spec = eigen(&op.to_dense(), &EigenOptions::default().with_vectors()).unwrap();
        let modes = unstable_mode_structure(&spec, 2, 10, 1e-10).unwrap();
        assert_eq!(modes.len(), 2);
        for m in &modes {
            assert!(m.concentrated);
            assert!(m.shock_real[0].abs() < 1e-6 * m.shock_real[2].abs());
            assert!(m.shock_real[1].abs() < 1e-6 * m.shock_real[2].abs());
            assert!(m.shock_cell_fraction > 1.0 - 1e-10);
        }
        let stable = eigen(
            &DenseMatrix::diag(&[0.5, -0.3]),
            &EigenOptions::default().with_vectors(),
        )
        .unwrap();
        assert!(unstable_mode_structure(&stable, 1, 0, 1e-10)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn p1_euler_bound_brackets() {
        for s in [0.0, 0.3, -0.45] {
            let bound = p1_euler_bound(s);
            let radius = |lam: f64| {
                let op = composite_operator(1, s, NumericalFluxKind::Godunov, 12, 6, lam).unwrap();
                eigen(&op.to_dense(), &EigenOptions::default())
                    .unwrap()
                    .spectral_radius
            };
            assert!(radius(bound * (1.0 - 1e-6)) <= 1.0 + 1e-12, "s={s}");
            assert!(radius(bound * (1.0 + 1e-6)) > 1.0, "s={s}");
        }
    }

    #[test]
    fn rk_transforms() {
        let mu = c(-1.0, 0.0);
        assert_abs_diff_eq!(stability_polynomial(2, mu).re, 1.0);
        assert_abs_diff_eq!(stability_polynomial(2, c(1.0, 0.0)).re, 1.0);
        let l = DenseMatrix::from_rows(&[vec![0.5, 0.1], vec![-0.2, 0.9]]);
        assert_eq!(rk_amplification(&l, 1).unwrap(), l);
        assert!(rk_amplification(&l, 4).is_err());
    }

    #[test]
    fn rk3_matches_frozen_stepping() {
        let l = DenseMatrix::from_rows(&[
            vec![0.7, 0.2, 0.0],
            vec![-0.1, 0.8, 0.3],
            vec![0.05, 0.0, 0.6],
        ]);
        let id = DenseMatrix::identity(3);
        let z = l.sub(&id);
        let x = vec![1.0, -2.0, 0.5];
        // Shu-Osher stages with the linear rate u ↦ Z u.
        let step = |u: &[f64]| -> Vec<f64> {
            let zu = z.mul_vec(u);
            u.iter().zip(zu).map(|(a, b)| a + b).collect()
        };
        let u1 = step(&x);
        let u2: Vec<f64> = x
            .iter()
            .zip(step(&u1))
            .map(|(a, b)| 0.75 * a + 0.25 * b)
            .collect();
        let u3: Vec<f64> = x
            .iter()
            .zip(step(&u2))
            .map(|(a, b)| a / 3.0 + 2.0 / 3.0 * b)
            .collect();
        let got = rk_amplification(&l, 3).unwrap().mul_vec(&x);
        for (a, b) in got.iter().zip(&u3) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn eigen_rejects_nonsquare() {
        assert!(eigen(&DenseMatrix::<f64>::zeros(2, 3), &EigenOptions::default()).is_err());
    }

    #[test]
    fn table_oracle_errors() {
        assert!(table_oracle(3, 0.4, 0.1, 1.0, -1.0).is_err());
        assert!(table_oracle(1, 0.4, 0.1, 1.0, -0.5).is_err());
        assert!(table_oracle(4, 1.0, 0.1, 1.0, -1.0).is_err());
        let t = table_oracle(0, 0.2, 0.5, 1.0, -1.0).unwrap();
        assert_eq!(t.left, vec![c(0.5, 0.0)]);
        assert_eq!(t.shock, vec![c(1.0, 0.0)]);
        assert_eq!(t.right, vec![c(0.5, 0.0)]);
    }

    fn euler_fd_check(
        kind: NumericalFluxKind,
        p: usize,
        base: &ModalSolution<f64>,
        dirs: &[Vec<f64>],
    ) {
        let mesh = Mesh1D::unit(base.n_cells).unwrap();
        let h = mesh.h;
        let scheme = DgScheme::new(
            Burgers,
            NumericalFlux::new(kind),
            BoundaryData::new(1.0, -1.0),
            mesh,
            BasisOrder(p),
        );
        let lam = 0.1;
        let op = assemble(
            &scheme,
            base,
            lam,
            KinkPolicy::Uniform(KinkBranch::LeftUpwind),
        )
        .unwrap();
        // Small step: the local LLF α has a second-order kink at |u⁻| = |u⁺|.
        let eps = 1e-7;
        for v in dirs {
            let mut plus = base.clone();
            let mut minus = base.clone();
            for (i, &d) in v.iter().enumerate() {
                plus.coeffs[i] += eps * d;
                minus.coeffs[i] -= eps * d;
            }
            let ep = scheme.euler_step(&plus, lam * h);
            let em = scheme.euler_step(&minus, lam * h);
            let lv = op.apply(v);
            for i in 0..v.len() {
                let fd = (ep.coeffs[i] - em.coeffs[i]) / (2.0 * eps);
                assert!(
                    (fd - lv[i]).abs() < 1e-6,
                    "{kind} i={i} fd={fd} lv={}",
                    lv[i]
                );
            }
        }
    }

    fn smooth_state(p: usize, n: usize, phase: f64) -> ModalSolution<f64> {
        let mesh = Mesh1D::unit(n).unwrap();
        project_initial(
            |x: f64| 0.6 * (6.0 * x + phase).sin() + 0.2 * (17.0 * x).cos(),
            &[],
            &mesh,
            BasisOrder(p),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn gateaux_consistency(
            p in 1usize..=3,
            kind_ix in 0usize..3,
            phase in 0.0f64..6.0,
            dir in proptest::collection::vec(-1.0f64..1.0, 32),
        ) {
            let n = 8;
            let base = smooth_state(p, n, phase);
            let dim = n * (p + 1);
            let v: Vec<f64> = (0..dim).map(|i| dir[i % dir.len()] * (1.0 + (i as f64 * 0.37).sin())).collect();
            euler_fd_check(NumericalFluxKind::ALL[kind_ix], p, &base, &[v]);
        }

        #[test]
        fn spectral_mapping(order in 1usize..=3, p in 1usize..=2, s in -0.6f64..0.6) {
            let op = composite_operator(p, s, NumericalFluxKind::LocalLaxFriedrichs, 8, 4, 0.15).unwrap();
            let l = op.to_dense();
            let ev = eigenvalues(&l, 1e-14).unwrap();
            let mapped: Vec<_> = ev.iter().map(|&m| stability_polynomial(order, m)).collect();
            let direct = eigenvalues(&rk_amplification(&l, order).unwrap(), 1e-14).unwrap();
            let d = multiset_distance(&direct, &mapped).unwrap();
            prop_assert!(d < 1e-7, "d = {}", d);
        }
    }

    #[test]
    fn gateaux_around_shock_profiles() {
        for (p, s) in [(1, 0.2), (2, -0.4), (3, 0.3)] {
            let (_, sol) = composite_setup::<f64>(p, s, NumericalFluxKind::Godunov, 10, 5).unwrap();
            let dim = 10 * (p + 1);
            let dirs: Vec<Vec<f64>> = (0..5)
                .map(|r| {
                    (0..dim)
                        .map(|i| ((i * 13 + r * 7) as f64 * 0.71).sin())
                        .collect()
                })
                .collect();
            for kind in NumericalFluxKind::ALL {
                euler_fd_check(kind, p, &sol, &dirs);
            }
        }
    }

    #[test]
    fn svv_terms_are_linearized() {
        use crate::svv::SvvConfig;
        let p = 3;
        let base = smooth_state(p, 8, 0.4);
        let mesh = Mesh1D::unit(8).unwrap();
        let h = mesh.h;
        let scheme = DgScheme::new(
            Burgers,
            NumericalFlux::new(NumericalFluxKind::LocalLaxFriedrichs),
            BoundaryData::new(1.0, -1.0),
            mesh,
            BasisOrder(p),
        )
        .with_svv(Some(SvvConfig::default()));
        let op = assemble(
            &scheme,
            &base,
            0.05,
            KinkPolicy::Uniform(KinkBranch::LeftUpwind),
        )
        .unwrap();
        let v: Vec<f64> = (0..32).map(|i| (i as f64 * 1.3).cos()).collect();
        let eps = 1e-6;
        let mut plus = base.clone();
        let mut minus = base.clone();
        for i in 0..32 {
            plus.coeffs[i] += eps * v[i];
            minus.coeffs[i] -= eps * v[i];
        }
        let ep = scheme.euler_step(&plus, 0.05 * h);
        let em = scheme.euler_step(&minus, 0.05 * h);
        let lv = op.apply(&v);
        for i in 0..32 {
            assert!(((ep.coeffs[i] - em.coeffs[i]) / (2.0 * eps) - lv[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn clustering() {
        let ev = vec![c(1.0, 0.0), c(1.0 + 1e-9, 0.0), c(0.5, 0.0)];
        let groups = cluster(&ev, 1e-6);
        assert_eq!(groups.len(), 2);
        assert!(groups.iter().any(|g| g.len() == 2));
    }
}
