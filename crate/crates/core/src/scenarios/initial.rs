use ndarray::Array2;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::Field;
use crate::model::Problem;

fn bump(problem: &Problem) -> Array2<f64> {
    problem
        .grid()
        .sample(|x, y| (-16.0 * (x * x + y * y)).exp())
        .into_values()
}

/// `exp(-16 (x² + y²))` in every component, pulled back onto the manifold.
pub fn gaussian_initial(problem: &Problem) -> Result<Field> {
    let b = bump(problem);
    let values = vec![b; problem.components()];
    problem.pullback(&Field::from_values(problem.grid(), values)?)
}

/// The Gaussian bump with every nodal value multiplied by an independent
/// uniform sample, then pulled back. Samples are drawn from ChaCha8 seeded with
/// `seed`, component by component, each in row-major order.
pub fn randomized_initial(problem: &Problem, seed: u64) -> Result<Field> {
    let b = bump(problem);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..problem.components())
        .map(|_| b.mapv(|v| v * rng.random::<f64>()))
        .collect();
    problem.pullback(&Field::from_values(problem.grid(), values)?)
}
