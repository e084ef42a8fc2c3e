//! Geometry of the classical no-click curve: the parametric curve itself,
//! the complete tight-direction families for every parity of the setting
//! count, the Hodge star determinant engine, and the Chebyshev-system
//! positivity check.

mod chebyshev;
mod curve;
mod hodge;
mod tight;

pub use chebyshev::chebyshev_determinant;
pub use curve::CurveSpec;
pub use hodge::hodge_star;
pub use tight::{
    enumerate_configurations, lambda_even_boundary, lambda_even_interior,
    lambda_even_interior_raw, lambda_nw, lambda_odd, lambda_odd_raw, lambda_three, lambda_two,
    BoundaryZeros, LambdaFamily, Tau, TightDirection, ZeroSet, EPS_MERGE,
};
