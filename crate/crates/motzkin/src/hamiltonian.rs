//! The frustration-free spin chain Hamiltonian at exactly diagonalizable
//! sizes: projector construction, matrix-free application, a Lanczos
//! eigensolver with full reorthogonalization, frustration-freeness and
//! symmetry verification, and the symmetry-breaking field sweep.
//!
//! Basis states are product states indexed in base 2s+1; digit d at a site
//! encodes the spin value d - s. Site indices are 0-based internally.

use crate::walks;
use nalgebra::DMatrix;
use std::collections::HashMap;

/// Dense-vector dimension guard for building an operator.
pub const DIMENSION_GUARD: u64 = 2_000_000;
/// Below this dimension eigensolves go through a dense factorization.
pub const DENSE_FALLBACK_DIM: usize = 1024;
/// Eigenvalues closer than this are treated as one degenerate group.
pub const DEGENERACY_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum HamiltonianError {
    #[error("dimension (2s+1)^n = {0} exceeds the dense-vector guard")]
    DimensionGuard(u64),
    #[error("need n >= 2 and s >= 1")]
    BadGeometry,
    #[error("operation requires s = 1, got s = {0}")]
    ColorlessOnly(u32),
    #[error("eigensolver did not reach residual {RESIDUAL_TOL:.0e}; worst residual {0:.3e}")]
    NotConverged(f64),
    #[error("at most {0} eigenpairs supported, requested {1}")]
    TooManyEigenpairs(usize, usize),
    #[error("enumeration failed: {0}")]
    Walks(#[from] walks::WalksError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectorKind {
    /// The three equal-superposition pair states of one color on one bond.
    BulkPair { bond: usize, color: u32 },
    /// All mismatched up/down color pairs on one bond.
    Cross { bond: usize },
    BoundaryLeft,
    BoundaryRight,
}

/// One projector term of the Hamiltonian, stored as a dense matrix on its
/// local (one- or two-site) space.
#[derive(Clone, Debug)]
pub struct ProjectorTerm {
    pub kind: ProjectorKind,
    /// 0-based site indices the local matrix acts on.
    pub sites: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
    pub rank_one_pieces: usize,
}

impl ProjectorTerm {
    /// Max entry deviation of P^2 - P and P - P^T.
    pub fn projector_defect(&self) -> f64 {
        let d = self.matrix.len();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut sq = 0.0;
                for k in 0..d {
                    sq += self.matrix[i][k] * self.matrix[k][j];
                }
                worst = worst.max((sq - self.matrix[i][j]).abs());
                worst = worst.max((self.matrix[i][j] - self.matrix[j][i]).abs());
            }
        }
        worst
    }
}

/// H = sum of projector terms + field_h * sum_i Sx_i, applied matrix-free.
pub struct SpinChainOperator {
    pub n: usize,
    pub s: u32,
    pub dim: usize,
    pub terms: Vec<ProjectorTerm>,
    pub field_h: f64,
    base: usize,
    /// base^(n-1-site) strides.
    strides: Vec<usize>,
    /// Per term: for each local input column, the nonzero (local row, value).
    sparse: Vec<Vec<Vec<(usize, f64)>>>,
    sx_sparse: Vec<Vec<(usize, f64)>>,
}

fn digit_zero(s: u32) -> usize {
    s as usize
}
fn digit_down(s: u32, k: u32) -> usize {
    (s - k) as usize
}
fn digit_up(s: u32, k: u32) -> usize {
    (s + k) as usize
}

fn rank_one(base: usize, pairs: &[(usize, f64)]) -> Vec<Vec<f64>> {
    let d = base * base;
    let mut m = vec![vec![0.0; d]; d];
    for &(i, a) in pairs {
        for &(j, b) in pairs {
            m[i][j] += a * b;
        }
    }
    m
}

fn sparsify(matrix: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
    let d = matrix.len();
    (0..d)
        .map(|col| {
            (0..d)
                .filter(|&row| matrix[row][col] != 0.0)
                .map(|row| (row, matrix[row][col]))
                .collect()
        })
        .collect()
}

/// Assemble the chain Hamiltonian. Bulk pair terms and (for s >= 2) cross
/// terms sit on every bond; boundary projectors pin the walk endpoints; a
/// nonzero field adds h * sum_i Sx_i.
pub fn build_hamiltonian(
    n: usize,
    s: u32,
    boundary: bool,
    field_h: f64,
) -> Result<SpinChainOperator, HamiltonianError> {
    if n < 2 || s == 0 {
        return Err(HamiltonianError::BadGeometry);
    }
    let base = (2 * s + 1) as usize;
    let dim_u64 = (base as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if dim_u64 > DIMENSION_GUARD {
        return Err(HamiltonianError::DimensionGuard(dim_u64));
    }
    let dim = dim_u64 as usize;
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut terms: Vec<ProjectorTerm> = Vec::new();
    for bond in 0..n - 1 {
        for k in 1..=s {
            let d_state = [
                (digit_zero(s) * base + digit_down(s, k), inv),
                (digit_down(s, k) * base + digit_zero(s), -inv),
            ];
            let u_state = [
                (digit_zero(s) * base + digit_up(s, k), inv),
                (digit_up(s, k) * base + digit_zero(s), -inv),
            ];
            let phi_state = [
                (digit_up(s, k) * base + digit_down(s, k), inv),
                (digit_zero(s) * base + digit_zero(s), -inv),
            ];
            let mut m = rank_one(base, &d_state);
            for (row, add) in rank_one(base, &u_state).into_iter().enumerate() {
                for (c, v) in add.into_iter().enumerate() {
                    m[row][c] += v;
                }
            }
            for (row, add) in rank_one(base, &phi_state).into_iter().enumerate() {
                for (c, v) in add.into_iter().enumerate() {
                    m[row][c] += v;
                }
            }
            terms.push(ProjectorTerm {
                kind: ProjectorKind::BulkPair { bond, color: k },
                sites: vec![bond, bond + 1],
                matrix: m,
                rank_one_pieces: 3,
            });
        }
        if s >= 2 {
            let d = base * base;
            let mut m = vec![vec![0.0; d]; d];
            let mut pieces = 0;
            for k in 1..=s {
                for i in 1..=s {
                    if i == k {
                        continue;
                    }
                    let loc = digit_up(s, k) * base + digit_down(s, i);
                    m[loc][loc] = 1.0;
                    pieces += 1;
                }
            }
            terms.push(ProjectorTerm {
                kind: ProjectorKind::Cross { bond },
                sites: vec![bond, bond + 1],
                matrix: m,
                rank_one_pieces: pieces,
            });
        }
    }
    if boundary {
        let mut left = vec![vec![0.0; base]; base];
        let mut right = vec![vec![0.0; base]; base];
        for k in 1..=s {
            left[digit_down(s, k)][digit_down(s, k)] = 1.0;
            right[digit_up(s, k)][digit_up(s, k)] = 1.0;
        }
        terms.push(ProjectorTerm {
            kind: ProjectorKind::BoundaryLeft,
            sites: vec![0],
            matrix: left,
            rank_one_pieces: s as usize,
        });
        terms.push(ProjectorTerm {
            kind: ProjectorKind::BoundaryRight,
            sites: vec![n - 1],
            matrix: right,
            rank_one_pieces: s as usize,
        });
    }
    let strides: Vec<usize> = (0..n).map(|site| base.pow((n - 1 - site) as u32)).collect();
    let sparse = terms.iter().map(|t| sparsify(&t.matrix)).collect();
    let sx_sparse = sparsify(&sx_matrix(s));
    Ok(SpinChainOperator {
        n,
        s,
        dim,
        terms,
        field_h,
        base,
        strides,
        sparse,
        sx_sparse,
    })
}

fn sx_matrix(s: u32) -> Vec<Vec<f64>> {
    let dim = (2 * s + 1) as usize;
    let sf = s as f64;
    let mut m = vec![vec![0.0; dim]; dim];
    for col in 0..dim - 1 {
        let mv = col as f64 - sf;
        let elem = (sf * (sf + 1.0) - mv * (mv + 1.0)).sqrt() / 2.0;
        m[col + 1][col] = elem;
        m[col][col + 1] = elem;
    }
    m
}

impl SpinChainOperator {
    /// y += (term t) x, matrix-free.
    fn apply_term(&self, t: usize, x: &[f64], y: &mut [f64]) {
        let term = &self.terms[t];
        let table = &self.sparse[t];
        match term.sites.as_slice() {
            [a] => {
                let sa = self.strides[*a];
                for idx in 0..self.dim {
                    let xv = x[idx];
                    if xv == 0.0 {
                        continue;
                    }
                    let da = (idx / sa) % self.base;
                    for &(row, v) in &table[da] {
                        y[idx.wrapping_add((row.wrapping_sub(da)).wrapping_mul(sa))] += v * xv;
                    }
                }
            }
            [a, b] => {
                let (sa, sb) = (self.strides[*a], self.strides[*b]);
                for idx in 0..self.dim {
                    let xv = x[idx];
                    if xv == 0.0 {
                        continue;
                    }
                    let da = (idx / sa) % self.base;
                    let db = (idx / sb) % self.base;
                    let col = da * self.base + db;
                    for &(row, v) in &table[col] {
                        let (ra, rb) = (row / self.base, row % self.base);
                        let out = idx
                            .wrapping_add((ra.wrapping_sub(da)).wrapping_mul(sa))
                            .wrapping_add((rb.wrapping_sub(db)).wrapping_mul(sb));
                        y[out] += v * xv;
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    /// y = sum_i Sx_i x.
    pub fn apply_sx_total(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for site in 0..self.n {
            let st = self.strides[site];
            for idx in 0..self.dim {
                let xv = x[idx];
                if xv == 0.0 {
                    continue;
                }
                let d = (idx / st) % self.base;
                for &(row, v) in &self.sx_sparse[d] {
                    y[idx.wrapping_add((row.wrapping_sub(d)).wrapping_mul(st))] += v * xv;
                }
            }
        }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for t in 0..self.terms.len() {
            self.apply_term(t, x, y);
        }
        if self.field_h != 0.0 {
            let mut f = vec![0.0; self.dim];
            self.apply_sx_total(x, &mut f);
            for (yo, fv) in y.iter_mut().zip(f) {
                *yo += self.field_h * fv;
            }
        }
    }

    /// Sparse column j of H (an apply to a basis vector).
    pub fn column(&self, j: usize) -> HashMap<usize, f64> {
        let mut out: HashMap<usize, f64> = HashMap::new();
        for (t, term) in self.terms.iter().enumerate() {
            let table = &self.sparse[t];
            match term.sites.as_slice() {
                [a] => {
                    let sa = self.strides[*a];
                    let da = (j / sa) % self.base;
                    for &(row, v) in &table[da] {
                        *out
                            .entry(j.wrapping_add((row.wrapping_sub(da)).wrapping_mul(sa)))
                            .or_default() += v;
                    }
                }
                [a, b] => {
                    let (sa, sb) = (self.strides[*a], self.strides[*b]);
                    let da = (j / sa) % self.base;
                    let db = (j / sb) % self.base;
                    for &(row, v) in &table[da * self.base + db] {
                        let (ra, rb) = (row / self.base, row % self.base);
                        let out_idx = j
                            .wrapping_add((ra.wrapping_sub(da)).wrapping_mul(sa))
                            .wrapping_add((rb.wrapping_sub(db)).wrapping_mul(sb));
                        *out.entry(out_idx).or_default() += v;
                    }
                }
                _ => unreachable!(),
            }
        }
        if self.field_h != 0.0 {
            for site in 0..self.n {
                let st = self.strides[site];
                let d = (j / st) % self.base;
                for &(row, v) in &self.sx_sparse[d] {
                    *out
                        .entry(j.wrapping_add((row.wrapping_sub(d)).wrapping_mul(st)))
                        .or_default() += self.field_h * v;
                }
            }
        }
        out
    }

    pub fn basis_index(&self, steps: &[walks::Step]) -> usize {
        steps
            .iter()
            .zip(&self.strides)
            .map(|(&st, &stride)| ((st + self.s as i32) as usize) * stride)
            .sum()
    }
}

/// Normalized uniform superposition over all valid walks, as a dense vector.
pub fn ground_state_vector(op: &SpinChainOperator) -> Result<Vec<f64>, HamiltonianError> {
    let list = walks::enumerate_walks(op.n, op.s)?;
    let amp = 1.0 / (list.len() as f64).sqrt();
    let mut v = vec![0.0; op.dim];
    for w in &list {
        v[op.basis_index(&w.steps)] = amp;
    }
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct EigenSolution {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl EigenSolution {
    /// Sizes of degenerate eigenvalue groups (tolerance DEGENERACY_TOL).
    pub fn degeneracy_groups(&self) -> Vec<usize> {
        let mut groups = Vec::new();
        let mut count = 0usize;
        for (i, &v) in self.eigenvalues.iter().enumerate() {
            if i == 0 || (v - self.eigenvalues[i - 1]).abs() <= DEGENERACY_TOL {
                count += 1;
            } else {
                groups.push(count);
                count = 1;
            }
        }
        if count > 0 {
            groups.push(count);
        }
        groups
    }
}

/// k lowest eigenpairs of the operator: dense factorization below
/// DENSE_FALLBACK_DIM, Lanczos with full reorthogonalization above.
/// `warm_start` seeds the Krylov space (used by the field sweep).
pub fn ground_state_ed(
    op: &SpinChainOperator,
    k: usize,
    warm_start: Option<&[f64]>,
) -> Result<EigenSolution, HamiltonianError> {
    if k == 0 || k > 10 {
        return Err(HamiltonianError::TooManyEigenpairs(10, k));
    }
    let dim = op.dim;
    if dim <= DENSE_FALLBACK_DIM {
        let mut mat = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..dim {
            for (i, v) in op.column(j) {
                mat[(i, j)] += v;
            }
        }
        let eig = mat.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let take = k.min(dim);
        let mut eigenvalues = Vec::with_capacity(take);
        let mut vectors = Vec::with_capacity(take);
        let mut residuals = Vec::with_capacity(take);
        for &idx in order.iter().take(take) {
            let lam = eig.eigenvalues[idx];
            let v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
            let hv = &mat * nalgebra::DVector::from_column_slice(&v);
            let res = (0..dim)
                .map(|i| (hv[i] - lam * v[i]).powi(2))
                .sum::<f64>()
                .sqrt();
            eigenvalues.push(lam);
            vectors.push(v);
            residuals.push(res);
        }
        return Ok(EigenSolution {
            eigenvalues,
            vectors,
            residuals,
            iterations: 0,
        });
    }
    lanczos_lowest(op, k, warm_start)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn lanczos_lowest(
    op: &SpinChainOperator,
    k: usize,
    warm_start: Option<&[f64]>,
) -> Result<EigenSolution, HamiltonianError> {
    let dim = op.dim;
    let max_iter = 420.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v = match warm_start {
        Some(w) if w.len() == dim && norm(w) > 0.0 => w.to_vec(),
        _ => pseudo_random_vector(dim, 0x5eed),
    };
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut w = vec![0.0; dim];
    let mut best: Option<EigenSolution> = None;
    for m in 0..max_iter {
        op.apply(&v, &mut w);
        let alpha = dot(&v, &w);
        alphas.push(alpha);
        basis.push(v.clone());
        // full reorthogonalization, twice for good measure
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = norm(&w);
        if beta < 1e-13 {
            // invariant subspace: restart with a fresh orthogonal direction
            let mut fresh = pseudo_random_vector(dim, 0xabcd + m as u64);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &fresh);
                    fresh.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let nf = norm(&fresh);
            if nf < 1e-13 {
                break;
            }
            fresh.iter_mut().for_each(|x| *x /= nf);
            betas.push(0.0);
            v = fresh;
            continue;
        }
        betas.push(beta);
        v = w.iter().map(|x| x / beta).collect();

        let steps = m + 1;
        if steps >= k + 2 && (steps % 24 == 0 || steps == max_iter) {
            let sol = ritz_pairs(op, &basis, &alphas, &betas, k);
            let worst = sol
                .residuals
                .iter()
                .cloned()
                .fold(0.0f64, f64::max);
            let done = worst <= RESIDUAL_TOL;
            best = Some(sol);
            if done {
                break;
            }
        }
    }
    if best.is_none() {
        best = Some(ritz_pairs(op, &basis, &alphas, &betas, k));
    }
    let sol = best.unwrap();
    let worst = sol.residuals.iter().cloned().fold(0.0f64, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(HamiltonianError::NotConverged(worst));
    }
    Ok(sol)
}

fn ritz_pairs(
    op: &SpinChainOperator,
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    k: usize,
) -> EigenSolution {
    let m = basis.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let take = k.min(m);
    let dim = op.dim;
    let mut eigenvalues = Vec::with_capacity(take);
    let mut vectors = Vec::with_capacity(take);
    let mut residuals = Vec::with_capacity(take);
    let mut hv = vec![0.0; dim];
    for &idx in order.iter().take(take) {
        let lam = eig.eigenvalues[idx];
        let mut vec_full = vec![0.0; dim];
        for (row, b) in basis.iter().enumerate() {
            let c = eig.eigenvectors[(row, idx)];
            vec_full.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
        }
        let nv = norm(&vec_full);
        vec_full.iter_mut().for_each(|x| *x /= nv);
        op.apply(&vec_full, &mut hv);
        let res = vec_full
            .iter()
            .zip(&hv)
            .map(|(v, h)| (h - lam * v).powi(2))
            .sum::<f64>()
            .sqrt();
        eigenvalues.push(lam);
        vectors.push(vec_full);
        residuals.push(res);
    }
    EigenSolution {
        eigenvalues,
        vectors,
        residuals,
        iterations: m,
    }
}

/// Deterministic pseudo-random start vector (splitmix64 stream).
fn pseudo_random_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut state = seed;
    (0..dim)
        .map(|_| {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            (z as f64 / u64::MAX as f64) - 0.5
        })
        .collect()
}

/// Per-term frustration-freeness report.
#[derive(Clone, Debug)]
pub struct FrustrationReport {
    /// (kind, ||P psi||) per term.
    pub residuals: Vec<(ProjectorKind, f64)>,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn verify_frustration_free(n: usize, s: u32) -> Result<FrustrationReport, HamiltonianError> {
    let op = build_hamiltonian(n, s, true, 0.0)?;
    let psi = ground_state_vector(&op)?;
    Ok(frustration_report(&op, &psi))
}

/// Same check against an arbitrary state; the negative control corrupts the
/// walk superposition with an invalid configuration.
pub fn frustration_report(op: &SpinChainOperator, state: &[f64]) -> FrustrationReport {
    let mut residuals = Vec::new();
    let mut max_residual = 0.0f64;
    let mut y = vec![0.0; op.dim];
    for t in 0..op.terms.len() {
        y.fill(0.0);
        op.apply_term(t, state, &mut y);
        let r = norm(&y);
        max_residual = max_residual.max(r);
        residuals.push((op.terms[t].kind.clone(), r));
    }
    FrustrationReport {
        residuals,
        max_residual,
        pass: max_residual <= 1e-12,
    }
}

/// Symmetry verification: charge commutators, reality, reflection-inversion,
/// color permutations, and the semidirect twist of charges under RF, all in
/// operator-on-vector form over every basis vector.
#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub max_charge_commutator: f64,
    pub max_rf_deviation: f64,
    pub max_color_perm_deviation: f64,
    pub max_semidirect_deviation: f64,
    pub reality_ok: bool,
    pub pass: bool,
}

/// Charge eigenvalue of Q^k on basis state idx: (# up-k digits) - (# down-k).
fn charge(op: &SpinChainOperator, k: u32, idx: usize) -> i64 {
    let mut q = 0i64;
    let mut rest = idx;
    for _ in 0..op.n {
        let d = rest % op.base;
        rest /= op.base;
        if d == digit_up(op.s, k) {
            q += 1;
        } else if d == digit_down(op.s, k) {
            q -= 1;
        }
    }
    q
}

/// Reflection-inversion on a basis index: reverse the site order and negate
/// every spin value.
fn rf_index(op: &SpinChainOperator, idx: usize) -> usize {
    let mut digits = vec![0usize; op.n];
    let mut rest = idx;
    for i in (0..op.n).rev() {
        digits[i] = rest % op.base;
        rest /= op.base;
    }
    digits.reverse();
    digits
        .into_iter()
        .fold(0usize, |acc, d| acc * op.base + (op.base - 1 - d))
}

/// Color transposition (1 2) on a basis index (s >= 2).
fn perm12_index(op: &SpinChainOperator, idx: usize) -> usize {
    let swap = |d: usize| -> usize {
        if d == digit_up(op.s, 1) {
            digit_up(op.s, 2)
        } else if d == digit_up(op.s, 2) {
            digit_up(op.s, 1)
        } else if d == digit_down(op.s, 1) {
            digit_down(op.s, 2)
        } else if d == digit_down(op.s, 2) {
            digit_down(op.s, 1)
        } else {
            d
        }
    };
    let mut digits = vec![0usize; op.n];
    let mut rest = idx;
    for i in (0..op.n).rev() {
        digits[i] = rest % op.base;
        rest /= op.base;
    }
    digits.into_iter().fold(0usize, |acc, d| acc * op.base + swap(d))
}

pub fn verify_symmetries(n: usize, s: u32) -> Result<SymmetryReport, HamiltonianError> {
    let op = build_hamiltonian(n, s, true, 0.0)?;
    let mut max_q = 0.0f64;
    let mut max_rf = 0.0f64;
    let mut max_perm = 0.0f64;
    let mut max_semi = 0.0f64;
    let thetas = [0.37, 1.1, 2.9];
    for j in 0..op.dim {
        let col = op.column(j);
        // [H, Q^k] e_j = (q_j - Q) H e_j
        for k in 1..=s {
            let qj = charge(&op, k, j);
            let mut sq = 0.0;
            for (&i, &v) in &col {
                let d = (qj - charge(&op, k, i)) as f64 * v;
                sq += d * d;
            }
            max_q = max_q.max(sq.sqrt());
        }
        // H[rf(i), rf(j)] = H[i, j]
        let col_rf = op.column(rf_index(&op, j));
        max_rf = max_rf.max(column_deviation(&col, &col_rf, |i| rf_index(&op, i)));
        if s >= 2 {
            let col_p = op.column(perm12_index(&op, j));
            max_perm = max_perm.max(column_deviation(&col, &col_p, |i| perm12_index(&op, i)));
        }
        // RF e^{-i theta Q} RF^{-1} = e^{+i theta Q} on basis vectors
        for k in 1..=s {
            let lhs = -(charge(&op, k, rf_index(&op, j)) as f64);
            let rhs = charge(&op, k, j) as f64;
            for &theta in &thetas {
                let d = ((theta * lhs).cos() - (theta * rhs).cos()).abs()
                    + ((theta * lhs).sin() - (theta * rhs).sin()).abs();
                max_semi = max_semi.max(d);
            }
        }
    }
    // reality: every local matrix is real by construction; the Sx field is
    // real symmetric, so K-conjugation invariance is structural
    let reality_ok = true;
    let pass = max_q <= 1e-12 && max_rf <= 1e-12 && max_perm <= 1e-12 && max_semi <= 1e-12;
    Ok(SymmetryReport {
        max_charge_commutator: max_q,
        max_rf_deviation: max_rf,
        max_color_perm_deviation: max_perm,
        max_semidirect_deviation: max_semi,
        reality_ok,
        pass,
    })
}

fn column_deviation(
    col: &HashMap<usize, f64>,
    mapped_col: &HashMap<usize, f64>,
    map: impl Fn(usize) -> usize,
) -> f64 {
    let mut worst = 0.0f64;
    for (&i, &v) in col {
        let other = mapped_col.get(&map(i)).copied().unwrap_or(0.0);
        worst = worst.max((v - other).abs());
    }
    for (&i_m, &v) in mapped_col {
        // entries present only in the mapped column
        let found = col.iter().any(|(&i, &w)| map(i) == i_m && w != 0.0);
        if !found {
            worst = worst.max(v.abs());
        }
    }
    worst
}

/// Default symmetric field grid: +/- log-spaced points in [1e-4, 1e-1] plus 0.
pub fn default_field_grid(points_per_side: usize) -> Vec<f64> {
    let mut grid = vec![0.0];
    for i in 0..points_per_side {
        let t = if points_per_side == 1 {
            0.0
        } else {
            i as f64 / (points_per_side - 1) as f64
        };
        let h = 10f64.powf(-4.0 + 3.0 * t);
        grid.push(h);
        grid.push(-h);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid
}

/// Field sweep for the colorless chain: for each h, diagonalize
/// H + h sum_i Sx_i and record the ground-state magnetization
/// (1/n) sum_i <Sx_i>. Returns (h, magnetization) pairs in grid order.
pub fn ssb_sweep(
    n: usize,
    h_grid: &[f64],
    s: u32,
) -> Result<Vec<(f64, f64)>, HamiltonianError> {
    if s != 1 {
        return Err(HamiltonianError::ColorlessOnly(s));
    }
    let mut sorted: Vec<f64> = h_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut results: HashMap<u64, f64> = HashMap::new();
    let mut warm: Option<Vec<f64>> = None;
    for &h in &sorted {
        let op = build_hamiltonian(n, s, true, h)?;
        let sol = ground_state_ed(&op, 1, warm.as_deref())?;
        let v = &sol.vectors[0];
        let mut sx = vec![0.0; op.dim];
        op.apply_sx_total(v, &mut sx);
        let mag = dot(v, &sx) / n as f64;
        results.insert(h.to_bits(), mag);
        warm = Some(v.clone());
    }
    Ok(h_grid
        .iter()
        .map(|h| (*h, results[&h.to_bits()]))
        .collect())
}
