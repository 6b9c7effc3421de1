//! Numerical building blocks shared by the pricers and the solver.

pub mod black_scholes;
pub mod normal;
pub mod quadrature;
pub mod root;

pub use black_scholes::{bs_call_delta, bs_call_price, bs_combo_price_delta, bs_put_price};
pub use normal::{std_normal_cdf, std_normal_pdf};
pub use quadrature::{gauss_weighted_integral, gauss_weighted_integral_split, GaussHermite, GaussLegendre};
pub use root::bracketed_root;
