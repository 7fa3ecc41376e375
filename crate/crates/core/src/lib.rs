//! Exact counting of conjugacy classes of homomorphisms from cyclic p-groups
//! into exotic p-compact groups, via the action of the Weyl group on
//! `(Z/p^k)^l`.
//!
//! The crate is layered bottom-up:
//!
//! * [`modp`]: residues mod `p^M`, Hensel lifting, Teichmüller lifts.
//! * [`snf`]: matrices over `Z/p^M`, Smith valuations, kernel sizes.
//! * [`matgroup`]: closure of finite matrix groups, conjugacy classes, ranks.
//! * [`catalog`]: the reflection groups G12, G24, G29, G31 and G(m,s,n).
//! * [`counting`]: Burnside summation over elements or classes, torsion census.
//! * [`grassmannian`]: fundamental domains for G(m,s,n) on `(Z/p^k)^n`.
//! * [`closed_forms`]: the closed-form polynomial counts.
//! * [`oracle`]: brute-force orbit and fixed-point enumeration.
//! * [`report`]: serializable count reports.

pub mod catalog;
pub mod closed_forms;
pub mod counting;
pub mod error;
pub mod grassmannian;
pub mod matgroup;
pub mod modp;
pub mod oracle;
pub mod report;
pub mod snf;

pub use error::{Error, ErrorKind, Result};
pub use modp::{Modulus, Residue, Valuation};
pub use snf::{SmithValuations, SquareMatrix};
