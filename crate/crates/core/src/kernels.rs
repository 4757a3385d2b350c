//! Dirichlet kernels D_n, modified kernels K_n = 1_D conj(chi_n) D_n, the partial-sum
//! operator S_n and the convolution operator T_n f = K_n * f.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bank::{random_function, test_bank};
use crate::characters::{level_for, CharacterSystem};
use crate::error::{Error, Result};
use crate::field::{u_of, LocalElement, LocalField, Window};
use crate::function::{positive_cells, sphere_constant, SampledFunction};
use crate::transform::{forward_in_place, fourier, inverse_fourier, inverse_in_place};

fn check_index(field: &LocalField, what: &str, n: usize, k: u32, strict: bool) -> Result<()> {
    let size = field.cells(k)?;
    let ok = if strict { n < size } else { n <= size };
    if ok {
        return Ok(());
    }
    let needed = if strict {
        level_for(field.q(), n)
    } else {
        level_for(field.q(), n.saturating_sub(1))
    };
    Err(Error::Resolution {
        what: format!("{what} with n = {n}"),
        needed,
        have: k,
    })
}

/// D_n = sum_{m<n} chi_m on D / P^k; requires n <= q^k.
pub fn dirichlet(field: &LocalField, n: usize, k: u32) -> Result<SampledFunction> {
    check_index(field, "D_n", n, k, false)?;
    let size = field.cells(k)?;
    let mut c = vec![Complex64::default(); size];
    c[..n].fill(Complex64::new(1.0, 0.0));
    inverse_in_place(field, k, &mut c);
    SampledFunction::new(field, k, c)
}

/// D_n by direct character summation through field arithmetic.
pub fn dirichlet_naive(field: &LocalField, n: usize, k: u32) -> Result<SampledFunction> {
    check_index(field, "D_n", n, k, false)?;
    let w = Window::on_d(k);
    let size = field.cells(k)?;
    let values: Result<Vec<Complex64>> = (0..size)
        .into_par_iter()
        .map(|j| {
            let x = LocalElement::from_cell(field, w, j);
            (0..n as u64).map(|m| x.chi_n(m)).sum()
        })
        .collect();
    SampledFunction::new(field, k, values?)
}

/// Character values chi(u(m) pi^{-l} x) on every level-k cell x, for m <= q^k and l <= k.
pub struct RecursionTables {
    field: LocalField,
    k: u32,
    size: usize,
    /// vals[l][x][m]
    vals: Vec<Vec<Vec<Complex64>>>,
    /// prefix[l][x][r] = sum_{m<r} vals[l][x][m]
    prefix: Vec<Vec<Vec<Complex64>>>,
}

impl RecursionTables {
    pub fn new(field: &LocalField, k: u32) -> Result<Self> {
        let size = field.cells(k)?;
        let w = Window::on_d(k);
        let us: Vec<LocalElement> = (0..=size as u64).map(|m| u_of(field, m)).collect();
        let mut vals = Vec::new();
        for l in 0..=k as i32 {
            let scale = LocalElement::prime_power(field, -l);
            let per_cell: Result<Vec<Vec<Complex64>>> = (0..size)
                .into_par_iter()
                .map(|j| {
                    let y = LocalElement::from_cell(field, w, j).mul(&scale)?;
                    us.iter().map(|u| u.mul(&y)?.chi()).collect()
                })
                .collect();
            vals.push(per_cell?);
        }
        let prefix = vals
            .iter()
            .map(|per_cell| {
                per_cell
                    .iter()
                    .map(|row| {
                        let mut acc = Complex64::default();
                        let mut out = vec![acc];
                        for v in row {
                            acc += v;
                            out.push(acc);
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        Ok(RecursionTables {
            field: field.clone(),
            k,
            size,
            vals,
            prefix,
        })
    }

    /// D_n(x) = D_r(pi^{-l} x) D_{q^l}(x) + chi_r(pi^{-l} x) D_t(x), n = r q^l + t.
    pub fn check(&self, n: usize, l: u32) -> Result<bool> {
        if l == 0 {
            return Err(Error::param("the split needs l >= 1"));
        }
        if l > self.k {
            return Err(Error::param(format!("split level l = {l} exceeds k = {}", self.k)));
        }
        check_index(&self.field, "D_n", n, self.k, false)?;
        let ql = (self.field.q() as usize).pow(l);
        let (r, t) = (n / ql, n % ql);
        let (l, p) = (l as usize, &self.prefix);
        #[allow(clippy::needless_range_loop)]
        for x in 0..self.size {
            let lhs = p[0][x][n];
            let rhs = p[l][x][r] * p[0][x][ql] + self.vals[l][x][r] * p[0][x][t];
            if (lhs - rhs).norm() > 1e-10 * (1.0 + lhs.norm()) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Checks the Dirichlet splitting identity for one (n, l) at level k.
pub fn dirichlet_recursion_check(field: &LocalField, n: usize, l: u32, k: u32) -> Result<bool> {
    RecursionTables::new(field, k)?.check(n, l)
}

/// K_n = conj(chi_n) D_n on D / P^k; requires n < q^k so that chi_n is resolved.
pub fn modified_kernel(field: &LocalField, n: usize, k: u32) -> Result<SampledFunction> {
    check_index(field, "K_n", n, k, true)?;
    let d = dirichlet(field, n, k)?;
    let cs = CharacterSystem::new(field, k)?;
    let values = d
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| Ok(v * cs.value(n, j)?.conj()))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(field, k, values)
}

#[derive(Debug, Clone, Copy)]
pub struct KernelBound {
    /// max over cells of |K_n(x)| |x| (the core cell uses sup |x| = q^{-k}).
    pub max_product: f64,
    pub violations: usize,
}

/// Audits |K_n(x)| |x| <= q on every cell.
pub fn kernel_bound(field: &LocalField, n: usize, k: u32) -> Result<KernelBound> {
    let kn = modified_kernel(field, n, k)?;
    let q = field.q() as f64;
    let w = Window::on_d(k);
    let mut out = KernelBound {
        max_product: 0.0,
        violations: 0,
    };
    for (i, v) in kn.values().iter().enumerate() {
        let absx = q.powi(-w.cell_valuation(field.q() as usize, i).unwrap_or(k as i32));
        let prod = v.norm() * absx;
        out.max_product = out.max_product.max(prod);
        if prod > q * (1.0 + 1e-12) {
            out.violations += 1;
        }
    }
    Ok(out)
}

/// Fourier transform of K_n on the cosets u(j) + D, j < q^k (computed numerically).
pub fn kernel_hat(field: &LocalField, n: usize, k: u32) -> Result<Vec<Complex64>> {
    Ok(fourier(&modified_kernel(field, n, k)?)?.coeffs)
}

/// Indicator of the union of D + u(m) - u(n), m < n, on the cosets u(j) + D.
pub fn kernel_hat_expected(field: &LocalField, n: usize, k: u32) -> Result<Vec<f64>> {
    check_index(field, "K_n", n, k, true)?;
    let size = field.cells(k)?;
    let un = u_of(field, n as u64);
    let ums: Vec<LocalElement> = (0..n as u64).map(|m| u_of(field, m)).collect();
    (0..size)
        .map(|j| {
            let s = u_of(field, j as u64).add(&un)?;
            for um in &ums {
                if s.congruent(um, 0)? {
                    return Ok(1.0);
                }
            }
            Ok(0.0)
        })
        .collect()
}

/// Whether K_n(x + y) = K_n(x) whenever |y| < |x|, scanned over all level-k cells.
pub fn kernel_constancy_check(field: &LocalField, n: usize, k: u32) -> Result<bool> {
    Ok(sphere_constant(&modified_kernel(field, n, k)?, 1e-10))
}

/// S_n f = sum_{m<n} f^(m) chi_m.
pub fn apply_sn(n: usize, f: &SampledFunction) -> Result<SampledFunction> {
    let k = f.level();
    check_index(f.field(), "S_n", n, k, false)?;
    let mut c = fourier(f)?;
    c.coeffs[n..].fill(Complex64::default());
    inverse_fourier(&c)
}

/// T_n f = K_n * f by transform, multiply, inverse.
pub fn apply_tn(n: usize, f: &SampledFunction) -> Result<SampledFunction> {
    let k = f.level();
    let kn = modified_kernel(f.field(), n, k)?;
    let mut kh = kn.into_values();
    forward_in_place(f.field(), k, &mut kh);
    let mut c = fourier(f)?;
    for (a, b) in c.coeffs.iter_mut().zip(&kh) {
        *a *= b;
    }
    inverse_fourier(&c)
}

/// T_n f by the direct double sum q^{-k} sum_y K_n(x - y) f(y).
pub fn apply_tn_direct(n: usize, f: &SampledFunction) -> Result<SampledFunction> {
    let field = f.field();
    let k = f.level();
    let kn = modified_kernel(field, n, k)?;
    let w = Window::on_d(k);
    let scale = f.cell_measure();
    let values = (0..f.len())
        .into_par_iter()
        .map(|x| {
            f.values()
                .iter()
                .enumerate()
                .map(|(y, v)| kn.values()[field.cell_sub(w, x, y)] * v)
                .sum::<Complex64>()
                * scale
        })
        .collect();
    SampledFunction::new(field, k, values)
}

/// Sup-norm of S_n f - chi_n T_n(conj(chi_n) f).
pub fn bridge_residual(n: usize, f: &SampledFunction) -> Result<f64> {
    let field = f.field();
    let k = f.level();
    check_index(field, "bridge", n, k, true)?;
    let cs = CharacterSystem::new(field, k)?;
    let chi: Vec<Complex64> = (0..f.len()).map(|j| cs.value(n, j)).collect::<Result<_>>()?;
    let g = f.with_values(f.values().iter().zip(&chi).map(|(v, c)| v * c.conj()).collect())?;
    let t = apply_tn(n, &g)?;
    let s = apply_sn(n, f)?;
    Ok(s
        .values()
        .iter()
        .zip(t.values().iter().zip(&chi))
        .map(|(a, (b, c))| (a - b * c).norm())
        .fold(0.0, f64::max))
}

/// Average of f over x + P^r, cell by cell.
pub fn ball_average(f: &SampledFunction, r: u32) -> Result<SampledFunction> {
    f.coarsen(r)?.lift(f.level())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    PartialSum,
    Convolution,
}

/// Dense matrix of S_n or T_n on level-k cell vectors.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    pub kind: OperatorKind,
    pub n: usize,
    pub level: u32,
    pub field: LocalField,
    pub matrix: DMatrix<Complex64>,
}

/// Largest dimension realized densely.
pub const DENSE_LIMIT: usize = 1024;

impl KernelOperator {
    pub fn new(field: &LocalField, kind: OperatorKind, n: usize, k: u32) -> Result<Self> {
        let size = field.cells(k)?;
        if size > DENSE_LIMIT {
            return Err(Error::Unsupported(format!(
                "dense operators are limited to q^k <= {DENSE_LIMIT}; use apply_sn/apply_tn"
            )));
        }
        let kernel = match kind {
            OperatorKind::PartialSum => dirichlet(field, n, k)?,
            OperatorKind::Convolution => modified_kernel(field, n, k)?,
        };
        let w = Window::on_d(k);
        let scale = (field.q() as f64).powi(-(k as i32));
        let matrix = DMatrix::from_fn(size, size, |x, y| {
            kernel.values()[field.cell_sub(w, x, y)] * scale
        });
        Ok(KernelOperator {
            kind,
            n,
            level: k,
            field: field.clone(),
            matrix,
        })
    }

    pub fn s_n(field: &LocalField, n: usize, k: u32) -> Result<Self> {
        Self::new(field, OperatorKind::PartialSum, n, k)
    }

    pub fn t_n(field: &LocalField, n: usize, k: u32) -> Result<Self> {
        Self::new(field, OperatorKind::Convolution, n, k)
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if f.len() != self.matrix.ncols() || !f.is_on_d() {
            return Err(Error::param("function does not match the operator level"));
        }
        let v = nalgebra::DVector::from_column_slice(f.values());
        let out = &self.matrix * v;
        f.with_values(out.as_slice().to_vec())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OpNorm {
    pub norm: f64,
    /// |A* A v - sigma^2 v| for the top right singular vector v.
    pub residual: f64,
}

fn weight_cells(op: &KernelOperator, w: Option<&SampledFunction>) -> Result<Vec<f64>> {
    match w {
        None => Ok(vec![1.0; op.matrix.nrows()]),
        Some(w) => {
            if w.len() != op.matrix.nrows() || !w.is_on_d() {
                return Err(Error::param("weight does not match the operator level"));
            }
            positive_cells(w)
        }
    }
}

/// Operator norm on L^2(D, w): top singular value of W^{1/2} M W^{-1/2}.
pub fn weighted_opnorm_l2(op: &KernelOperator, w: Option<&SampledFunction>) -> Result<OpNorm> {
    let wc = weight_cells(op, w)?;
    let sq: Vec<f64> = wc.iter().map(|v| v.sqrt()).collect();
    let a = DMatrix::from_fn(op.matrix.nrows(), op.matrix.ncols(), |i, j| {
        op.matrix[(i, j)] * (sq[i] / sq[j])
    });
    // nalgebra's SVD misreports rank-deficient inputs (e.g. the 9x9 averaging
    // matrix gives 1.25), so take the top eigenpair of A*A through its real
    // symmetric embedding [[Re, -Im], [Im, Re]].
    let n = a.nrows();
    let ata = a.adjoint() * &a;
    let real = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = ata[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = real.symmetric_eigen();
    let idx = eig.eigenvalues.imax();
    let col = eig.eigenvectors.column(idx);
    let v = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(col[i], col[n + i]));
    let v = &v / Complex64::new(v.norm(), 0.0);
    let sigma = (&a * &v).norm();
    let ata_v = a.adjoint() * (&a * &v);
    let residual = (ata_v - v * Complex64::new(sigma * sigma, 0.0)).norm();
    Ok(OpNorm {
        norm: sigma,
        residual,
    })
}

/// Lower bound for the norm on L^p(D, w): the best ratio |op f| / |f| among the first
/// `budget` candidates of a fixed sequence (bank members, then nonlinear power iterates).
pub fn opnorm_lower_bound_lp(
    op: &KernelOperator,
    w: Option<&SampledFunction>,
    p: f64,
    budget: usize,
    seed: u64,
) -> Result<f64> {
    if p <= 1.0 || !p.is_finite() {
        return Err(Error::param(format!("p must exceed 1, got {p}")));
    }
    if budget == 0 {
        return Err(Error::param("budget must be at least 1"));
    }
    let wc = weight_cells(op, w)?;
    let size = op.matrix.nrows();
    // g = W^{1/p} f turns the weighted problem into the plain l^p one for B.
    let s: Vec<f64> = wc.iter().map(|v| v.powf(1.0 / p)).collect();
    let b = DMatrix::from_fn(size, size, |i, j| op.matrix[(i, j)] * (s[i] / s[j]));
    let bh = b.adjoint();
    let lp = |v: &nalgebra::DVector<Complex64>| -> f64 {
        v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    };
    let ratio = |g: &nalgebra::DVector<Complex64>| -> f64 {
        let den = lp(g);
        if den == 0.0 {
            0.0
        } else {
            lp(&(&b * g)) / den
        }
    };
    let mut best = 0.0f64;
    let mut used = 0usize;
    let base = op.level.min(3);
    for e in test_bank(&op.field, base, op.level, seed, 4)? {
        if used == budget {
            return Ok(best);
        }
        let g = nalgebra::DVector::from_iterator(
            size,
            e.f.values().iter().zip(&s).map(|(v, si)| v * si),
        );
        best = best.max(ratio(&g));
        used += 1;
    }
    let psi = |v: &nalgebra::DVector<Complex64>, e: f64| {
        v.map(|z| {
            let r = z.norm();
            if r == 0.0 {
                z
            } else {
                z * r.powf(e - 2.0)
            }
        })
    };
    let pp = p / (p - 1.0);
    let mut restart = 0u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    while used < budget {
        let mut g = if restart == 0 {
            nalgebra::DVector::from_column_slice(
                random_function(&op.field, op.level, seed.wrapping_add(1000))?.values(),
            )
        } else {
            nalgebra::DVector::from_fn(size, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })
        };
        for _ in 0..25 {
            if used == budget {
                break;
            }
            best = best.max(ratio(&g));
            used += 1;
            let z = &b * &g;
            let t = &bh * psi(&z, p);
            let next = psi(&t, pp);
            let norm = lp(&next);
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            g = next / Complex64::new(norm, 0.0);
        }
        restart += 1;
    }
    Ok(best)
}

/// Random level-k function for operator tests.
pub fn seeded_function(field: &LocalField, k: u32, seed: u64) -> Result<SampledFunction> {
    random_function(field, k, seed)
}
