//! Shared fixtures for the criterion benches.

use repop_core::{Potential, RateField, ScalarField, TorusDomain};

pub fn domain_1d(cells: usize) -> TorusDomain {
    TorusDomain::new(1, 10.0, cells).unwrap()
}

pub fn domain_2d(cells: usize) -> TorusDomain {
    TorusDomain::new(2, 10.0, cells).unwrap()
}

pub fn unit_tophat() -> Potential {
    Potential::top_hat(1.0, 0.5).unwrap()
}

pub fn gaussian() -> Potential {
    Potential::gaussian(1.0, 0.8, 3.0).unwrap()
}

pub fn unit_rate() -> RateField {
    RateField::constant(1.0).unwrap()
}

/// A smooth strictly positive test field.
pub fn wavy(dom: TorusDomain) -> ScalarField {
    ScalarField::from_fn(dom, |x| 0.5 + 0.3 * (0.7 * x[0]).sin().powi(2) + 0.1 * x[1])
}
