use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Scalar = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    /// Whether `z` is a legal scalar of this field (exact test).
    pub fn admits(self, z: Scalar) -> bool {
        match self {
            ScalarField::Real => z.im == 0.0,
            ScalarField::Complex => true,
        }
    }
}

pub(crate) fn c(re: f64, im: f64) -> Scalar {
    Complex64::new(re, im)
}

pub(crate) fn re(x: f64) -> Scalar {
    Complex64::new(x, 0.0)
}
