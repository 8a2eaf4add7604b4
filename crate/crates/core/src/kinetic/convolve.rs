//! Circular convolution of grid fields against a discretized kernel.
//!
//! The FFT path is the default; a direct quadratic sum is kept as an
//! independent backend and the two must agree to 1e-10.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{ScalarField, TorusDomain};
use crate::potential::{discretize_kernel, Potential};

/// A fixed kernel on a fixed grid with precomputed FFT plans and spectrum.
pub struct Convolver {
    domain: TorusDomain,
    kernel: ScalarField,
    mass: f64,
    kernel_hat: Vec<Complex<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Convolver {
    /// Discretize `pot` on the grid (cell averages) and prepare plans.
    pub fn new(dom: &TorusDomain, pot: &Potential) -> Result<Self> {
        Self::from_kernel(discretize_kernel(pot, dom)?)
    }

    /// Build from an explicit kernel field (samples per displacement cell).
    pub fn from_kernel(kernel: ScalarField) -> Result<Self> {
        let domain = kernel.domain();
        let n = domain.cells_per_side();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mass = kernel.mass();
        let mut kernel_hat: Vec<Complex<f64>> = kernel
            .values()
            .iter()
            .map(|&v| Complex::new(v * domain.cell_volume(), 0.0))
            .collect();
        fft_all(&fwd, &mut kernel_hat, domain.dim(), n);
        Ok(Self {
            domain,
            kernel,
            mass,
            kernel_hat,
            fwd,
            inv,
        })
    }

    /// Kernel with entries `1 - exp(-k)` applied to this kernel's cell
    /// averages; entrywise `<=` the original, so the decoupled right-hand
    /// side dominates the kinetic one.
    pub fn closure_variant(&self) -> Result<Self> {
        Self::from_kernel(self.kernel.map(|v| -(-v).exp_m1()))
    }

    /// Kernel with entries `(1 - exp(-eps k)) / eps`.
    pub fn scaled_closure_variant(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::EpsilonOutOfRange(eps));
        }
        Self::from_kernel(self.kernel.map(|v| -(-eps * v).exp_m1() / eps))
    }

    pub fn domain(&self) -> TorusDomain {
        self.domain
    }

    pub fn kernel(&self) -> &ScalarField {
        &self.kernel
    }

    /// Discrete kernel mass `<phi>_h`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// FFT-backed circular convolution `(phi * rho)(x_i)`.
    pub fn apply(&self, rho: &ScalarField) -> Result<ScalarField> {
        if rho.domain() != self.domain {
            return Err(Error::DomainMismatch);
        }
        let n = self.domain.cells_per_side();
        let total = self.domain.cell_count();
        let mut buf: Vec<Complex<f64>> =
            rho.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft_all(&self.fwd, &mut buf, self.domain.dim(), n);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        fft_all(&self.inv, &mut buf, self.domain.dim(), n);
        let scale = 1.0 / total as f64;
        ScalarField::new(self.domain, buf.into_iter().map(|c| c.re * scale).collect())
    }

    /// Direct quadratic-sum backend, kept as an oracle for the FFT path.
    pub fn apply_direct(&self, rho: &ScalarField) -> Result<ScalarField> {
        if rho.domain() != self.domain {
            return Err(Error::DomainMismatch);
        }
        let n = self.domain.cells_per_side();
        let v = self.domain.cell_volume();
        let k = self.kernel.values();
        let r = rho.values();
        let values = match self.domain.dim() {
            1 => (0..n)
                .map(|i| (0..n).map(|j| k[(i + n - j) % n] * r[j]).sum::<f64>() * v)
                .collect(),
            _ => {
                let mut out = vec![0.0; n * n];
                for iy in 0..n {
                    for ix in 0..n {
                        let mut acc = 0.0;
                        for jy in 0..n {
                            let ky = (iy + n - jy) % n;
                            for jx in 0..n {
                                let kx = (ix + n - jx) % n;
                                acc += k[kx + n * ky] * r[jx + n * jy];
                            }
                        }
                        out[ix + n * iy] = acc * v;
                    }
                }
                out
            }
        };
        ScalarField::new(self.domain, values)
    }
}

/// Apply a 1-d plan along every axis of the row-major buffer.
fn fft_all(plan: &Arc<dyn Fft<f64>>, buf: &mut [Complex<f64>], dim: usize, n: usize) {
    match dim {
        1 => plan.process(buf),
        _ => {
            for row in buf.chunks_exact_mut(n) {
                plan.process(row);
            }
            transpose(buf, n);
            for row in buf.chunks_exact_mut(n) {
                plan.process(row);
            }
            transpose(buf, n);
        }
    }
}

fn transpose(buf: &mut [Complex<f64>], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn convolver_1d() -> Convolver {
        let dom = TorusDomain::new(1, 10.0, 64).unwrap();
        let pot = Potential::top_hat(1.0, 1.0).unwrap();
        Convolver::new(&dom, &pot).unwrap()
    }

    #[test]
    fn constant_in_constant_out() {
        let conv = convolver_1d();
        let rho = ScalarField::constant(conv.domain(), 3.0);
        let out = conv.apply(&rho).unwrap();
        for &v in out.values() {
            assert_relative_eq!(v, 3.0 * conv.mass(), epsilon = 1e-10);
        }
    }

    #[test]
    fn impulse_reproduces_kernel_samples() {
        let conv = convolver_1d();
        let dom = conv.domain();
        let mut rho = ScalarField::zeros(dom);
        let j0 = 17;
        rho.values_mut()[j0] = 1.0 / dom.cell_volume(); // unit mass
        let out = conv.apply(&rho).unwrap();
        let n = dom.cells_per_side();
        for i in 0..n {
            assert_relative_eq!(
                out.get(i),
                conv.kernel().get((i + n - j0) % n),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn linearity() {
        let conv = convolver_1d();
        let dom = conv.domain();
        let a = ScalarField::from_fn(dom, |x| 1.0 + (x[0] * 0.7).sin().powi(2));
        let b = ScalarField::from_fn(dom, |x| (x[0] - 4.0).abs() * 0.3);
        let sum = a.zip_map(&b, |u, v| u + v).unwrap();
        let lhs = conv.apply(&sum).unwrap();
        let rhs = conv
            .apply(&a)
            .unwrap()
            .zip_map(&conv.apply(&b).unwrap(), |u, v| u + v)
            .unwrap();
        assert!(lhs.sup_distance(&rhs) < 1e-12);
    }

    #[test]
    fn fft_agrees_with_direct_1d() {
        let conv = convolver_1d();
        let rho = ScalarField::from_fn(conv.domain(), |x| (x[0] * 1.3).cos().abs() + 0.5);
        let a = conv.apply(&rho).unwrap();
        let b = conv.apply_direct(&rho).unwrap();
        assert!(a.sup_distance(&b) < 1e-10);
    }

    #[test]
    fn fft_agrees_with_direct_2d() {
        let dom = TorusDomain::new(2, 6.0, 24).unwrap();
        let pot = Potential::gaussian(1.0, 0.8, 2.5).unwrap();
        let conv = Convolver::new(&dom, &pot).unwrap();
        let rho = ScalarField::from_fn(dom, |x| 0.2 + (x[0] + 0.5 * x[1]).sin().powi(2));
        let a = conv.apply(&rho).unwrap();
        let b = conv.apply_direct(&rho).unwrap();
        assert!(a.sup_distance(&b) < 1e-10);
    }

    #[test]
    fn domain_mismatch_rejected() {
        let conv = convolver_1d();
        let other = TorusDomain::new(1, 10.0, 32).unwrap();
        let rho = ScalarField::zeros(other);
        assert!(matches!(conv.apply(&rho), Err(Error::DomainMismatch)));
    }

    #[test]
    fn closure_kernel_dominated_by_base() {
        let conv = convolver_1d();
        let clo = conv.closure_variant().unwrap();
        for (a, b) in clo.kernel().values().iter().zip(conv.kernel().values()) {
            assert!(*a <= *b + 1e-15);
            assert!(*a >= 0.0);
        }
        assert!(clo.mass() <= conv.mass());
    }
}
