//! Linear complementarity on a banded M-matrix with `p` subdiagonals and one
//! superdiagonal: find `u ≥ ψ` with `Au ≥ d` and `(u - ψ)ᵀ(Au - d) = 0`.

use crate::error::{Error, Result};

/// Row `i`: `Σ_{k=1..p} sub[i][k-1] u_{i-k} + diag[i] u_i + sup[i] u_{i+1} = rhs[i]`.
#[derive(Debug, Clone, Default)]
pub struct BandedSystem {
    pub p: usize,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    /// Row-major, `p` entries per row.
    pub sub: Vec<f64>,
}

impl BandedSystem {
    pub fn new(n: usize, p: usize) -> Self {
        BandedSystem { p, diag: vec![0.0; n], sup: vec![0.0; n], sub: vec![0.0; n * p] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `(Au)_i`.
    pub fn apply_row(&self, u: &[f64], i: usize) -> f64 {
        let mut v = self.diag[i] * u[i];
        if i + 1 < u.len() {
            v += self.sup[i] * u[i + 1];
        }
        let row = &self.sub[i * self.p..(i + 1) * self.p];
        for (k, a) in row.iter().enumerate() {
            if *a != 0.0 && i > k {
                v += a * u[i - k - 1];
            }
        }
        v
    }

    /// `max_i |min(u_i - ψ_i, (Au - d)_i)|` plus any negative part of `Au - d`.
    pub fn complementarity_residual(&self, u: &[f64], rhs: &[f64], obstacle: Option<&[f64]>) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..u.len() {
            let r = self.apply_row(u, i) - rhs[i];
            let v = match obstacle {
                Some(psi) => {
                    let gap = u[i] - psi[i];
                    (gap.min(r)).abs().max((-gap).max(0.0)).max((-r).max(0.0))
                }
                None => r.abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LcpStats {
    pub iterations: usize,
}

/// Scratch space reused across time steps.
#[derive(Debug, Default)]
pub struct Workspace {
    diag: Vec<f64>,
    sub: Vec<f64>,
    rhs: Vec<f64>,
}

pub trait LcpSolver: Send + Sync {
    fn name(&self) -> &'static str;
    /// Solves in place; `u` holds the initial guess on entry. `obstacle = None`
    /// solves the plain linear system.
    fn solve(
        &self,
        sys: &BandedSystem,
        rhs: &[f64],
        obstacle: Option<&[f64]>,
        u: &mut [f64],
        work: &mut Workspace,
    ) -> Result<LcpStats>;
}

/// Direct method: eliminate the superdiagonal from the bottom, then substitute
/// from the left projecting onto the obstacle. Exact for obstacles whose
/// contact set is a left interval, which is the put's exercise region.
#[derive(Debug, Clone, Copy, Default)]
pub struct BrennanSchwartz;

impl LcpSolver for BrennanSchwartz {
    fn name(&self) -> &'static str {
        "brennan_schwartz"
    }

    fn solve(
        &self,
        sys: &BandedSystem,
        rhs: &[f64],
        obstacle: Option<&[f64]>,
        u: &mut [f64],
        work: &mut Workspace,
    ) -> Result<LcpStats> {
        let n = sys.len();
        let p = sys.p;
        work.diag.clear();
        work.diag.extend_from_slice(&sys.diag);
        work.sub.clear();
        work.sub.extend_from_slice(&sys.sub);
        work.rhs.clear();
        work.rhs.extend_from_slice(rhs);
        for i in (0..n - 1).rev() {
            let c = sys.sup[i];
            if c == 0.0 {
                continue;
            }
            let f = c / work.diag[i + 1];
            // Row i+1 couples to u_i through its first subdiagonal entry.
            work.diag[i] -= f * work.sub[(i + 1) * p];
            for k in 1..p {
                let a = work.sub[(i + 1) * p + k];
                if a != 0.0 {
                    work.sub[i * p + k - 1] -= f * a;
                }
            }
            work.rhs[i] -= f * work.rhs[i + 1];
        }
        for i in 0..n {
            let mut v = work.rhs[i];
            let row = &work.sub[i * p..(i + 1) * p];
            for (k, a) in row.iter().enumerate() {
                if *a != 0.0 && i > k {
                    v -= a * u[i - k - 1];
                }
            }
            v /= work.diag[i];
            u[i] = match obstacle {
                Some(psi) => v.max(psi[i]),
                None => v,
            };
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite value in banded elimination".into()));
        }
        Ok(LcpStats { iterations: 1 })
    }
}

/// Projected successive over-relaxation.
#[derive(Debug, Clone, Copy)]
pub struct Psor {
    pub omega: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Psor {
    fn default() -> Self {
        Psor { omega: 1.2, tol: 1e-9, max_iter: 10_000 }
    }
}

impl LcpSolver for Psor {
    fn name(&self) -> &'static str {
        "psor"
    }

    fn solve(
        &self,
        sys: &BandedSystem,
        rhs: &[f64],
        obstacle: Option<&[f64]>,
        u: &mut [f64],
        _work: &mut Workspace,
    ) -> Result<LcpStats> {
        let n = sys.len();
        let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for it in 1..=self.max_iter {
            let mut change = 0.0f64;
            for i in 0..n {
                let off = sys.apply_row(u, i) - sys.diag[i] * u[i];
                let gs = (rhs[i] - off) / sys.diag[i];
                let mut v = u[i] + self.omega * (gs - u[i]);
                if let Some(psi) = obstacle {
                    v = v.max(psi[i]);
                }
                change = change.max((v - u[i]).abs());
                u[i] = v;
            }
            if change <= self.tol * scale {
                return Ok(LcpStats { iterations: it });
            }
        }
        Err(Error::Numerical(format!(
            "PSOR did not converge within {} sweeps (tolerance {:.1e} relative)",
            self.max_iter, self.tol
        )))
    }
}

pub struct LcpEntry {
    pub name: &'static str,
    pub build: fn() -> Box<dyn LcpSolver>,
}

pub static LCP_SOLVERS: &[LcpEntry] = &[
    LcpEntry { name: "brennan_schwartz", build: || Box::new(BrennanSchwartz) },
    LcpEntry { name: "psor", build: || Box::new(Psor::default()) },
];

pub fn lcp_solver(name: &str) -> Result<Box<dyn LcpSolver>> {
    LCP_SOLVERS
        .iter()
        .find(|e| e.name == name)
        .map(|e| (e.build)())
        .ok_or_else(|| Error::Config(format!("unknown LCP solver `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(n: usize, p: usize) -> (BandedSystem, Vec<f64>, Vec<f64>) {
        let mut s = BandedSystem::new(n, p);
        for i in 0..n {
            if i == 0 || i == n - 1 {
                s.diag[i] = 1.0;
                continue;
            }
            s.diag[i] = 3.0;
            s.sup[i] = -1.0;
            for k in 0..p {
                s.sub[i * p + k] = if k == 0 { -1.0 } else { -0.5 / (k as f64 + 1.0) };
            }
        }
        let psi: Vec<f64> = (0..n).map(|i| (0.6 - i as f64 / n as f64).max(0.0)).collect();
        let mut rhs: Vec<f64> = (0..n).map(|i| 0.4 * psi[i]).collect();
        rhs[0] = psi[0];
        rhs[n - 1] = 0.0;
        (s, rhs, psi)
    }

    #[test]
    fn direct_and_iterative_agree() {
        for p in [1, 3, 8] {
            let (s, rhs, psi) = system(60, p);
            let mut a = psi.clone();
            let mut b = psi.clone();
            let mut w = Workspace::default();
            BrennanSchwartz.solve(&s, &rhs, Some(&psi), &mut a, &mut w).unwrap();
            Psor { tol: 1e-14, ..Psor::default() }.solve(&s, &rhs, Some(&psi), &mut b, &mut w).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-11, "p={p}: {x} vs {y}");
            }
            assert!(s.complementarity_residual(&a, &rhs, Some(&psi)) < 1e-12);
        }
    }

    #[test]
    fn linear_solve_without_obstacle() {
        let (s, rhs, _) = system(40, 4);
        let mut u = vec![0.0; 40];
        BrennanSchwartz.solve(&s, &rhs, None, &mut u, &mut Workspace::default()).unwrap();
        assert!(s.complementarity_residual(&u, &rhs, None) < 1e-13);
    }
}
