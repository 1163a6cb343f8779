//! Exact computations with centralizers of semisimple elements in adjoint
//! groups of type `D_l` over finite fields of odd characteristic.

pub mod centralizer;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod matmodel;
pub mod rational;
pub mod roots;
pub mod torus;
pub mod weyl;

pub use error::{Error, Result, Verdict};
pub use exactnum::{Qz, QzVector};
pub use torus::{AdTorusElem, DlGroup, ScTorusElem};
pub use weyl::{ExtElem, SignedPerm};
