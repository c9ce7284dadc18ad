use std::sync::Arc;

use rand::{Rng, RngExt};

use super::function::{BlockFunction, BlockTable};
use super::space::{BlockSpace, LimitPoint};
use crate::field::c;
use crate::{Scalar, ScalarField};

fn draw(rng: &mut impl Rng, field: ScalarField, scale: f64) -> Scalar {
    let re: f64 = rng.random_range(-1.0..1.0);
    let im: f64 = match field {
        ScalarField::Real => 0.0,
        ScalarField::Complex => rng.random_range(-1.0..1.0),
    };
    c(scale * re, scale * im)
}

/// Random function with coefficients of modest size: Fourier coefficients
/// decay like `1/(1+|k|)`, cylinder and sequence values are uniform in the
/// unit box, and identified limit values follow their block values.
pub fn random_function(space: &Arc<BlockSpace>, rng: &mut impl Rng) -> BlockFunction {
    let field = space.field;
    let mut blocks = Vec::with_capacity(space.blocks.len());
    for desc in &space.blocks {
        let shape = &desc.shape;
        let mut t = BlockTable::zeros(shape, shape.cantor_depth);
        let modes = shape.modes();
        for cell in t.coeffs.chunks_mut(modes) {
            for i in 0..modes {
                let k = shape.multi_degree(i);
                let size: i64 = k.iter().map(|x| x.abs()).sum();
                let scale = 1.0 / (1.0 + size as f64);
                match field {
                    ScalarField::Complex => cell[i] = draw(rng, field, scale),
                    ScalarField::Real => {
                        let mirror: Vec<i64> = k.iter().map(|x| -x).collect();
                        let j = shape.flat_degree(&mirror).expect("mirror mode");
                        if j == i {
                            cell[i] = draw(rng, ScalarField::Real, scale);
                        } else if j > i {
                            let z = draw(rng, ScalarField::Complex, scale);
                            cell[i] = z;
                            cell[j] = z.conj();
                        }
                    }
                }
            }
        }
        blocks.push(t);
    }
    let head: Vec<Scalar> = (0..space.sequence_len).map(|_| draw(rng, field, 1.0)).collect();
    let mut limits: Vec<Scalar> = (0..space.limit_count()).map(|_| draw(rng, field, 1.0)).collect();
    for (k, l) in space.limits.iter().enumerate() {
        if let LimitPoint::Identified { block, fiber } = l {
            let shape = &space.blocks[*block].shape;
            limits[k] = blocks[*block].eval(shape, fiber);
            if field == ScalarField::Real {
                limits[k] = c(limits[k].re, 0.0);
            }
        }
    }
    BlockFunction::from_raw(space.clone(), blocks, head, limits)
}
