//! Exact structure-constant engine for the Tits construction, the symmetric
//! two-composition-algebra construction and their super extensions.

pub mod analyze;
pub mod check;
pub mod composition;
pub mod construct;
pub mod error;
pub mod field;
pub mod grassmann;
pub mod jordan;
pub mod linalg;
pub mod meataxe;
pub mod rational;
pub mod space;
pub mod table;
pub mod triality;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use linalg::{LinMap, SparseVec};
pub use space::{Parity, SuperSpace};
pub use table::AlgebraTable;
