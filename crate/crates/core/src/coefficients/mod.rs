//! Exact arithmetic in K = ℚ[u]/(E(u)) and its p-adic approximation layer.

pub mod field;
pub mod padic;
pub mod rational;

pub use field::{poly_derivative, FieldDesc, KElem, RawKElem, Valuation};
pub use padic::{PadicApprox, PadicReport, EXACT};
pub use rational::{fmt_q, parse_q, q, qf, Q};
