//! Closed forms for the commuting case: f, g, h̃, the generating-function
//! identity, its summation lemmas, and the a_k series.

mod conjecture;
mod fg;
mod htable;
mod lemmas;

pub use conjecture::{ak_series, conjecture_residual, conjecture_residual_with, ConjectureReport};
pub use fg::{f_closed, falling, fg_coeffs, g_closed, FgReport, FgTables};
pub use htable::{
    amn_from_h, closedform_series, h_table, product_range, table_row_series, verify_commutative,
    HTable, VerifyReport,
};
pub use lemmas::{lemma_identity_check, LemmaKind, LemmaReport};
