//! Random walks on planar isometries: exact laws, characteristic functions,
//! dense polynomial values, p-adic recurrence audits and local limit checks.

pub mod charfn;
pub mod dpv;
pub mod error;
pub mod hp;
pub mod lclt;
pub mod padic;
pub mod ring;
pub mod walk;

pub use error::{Error, Result};
pub use ring::{AngleSpec, EmbeddingContext, Ring, RingPoint};
