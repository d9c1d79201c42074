//! Dense polynomial values: weights, gadgets, pigeonhole search, resultants,
//! net certificates and commutator words.

mod goodq;
mod net;
mod pigeon;
mod poly;
mod resultant;
mod words;

pub use goodq::{good_q, GoodQ};
pub use net::{
    ample_check, certify_dpv, gadget_search, verify_certificate, AmpleReport, Grid, NetCertificate,
    Strategy, Witness, CELL, COLUMNS, VERIFY_INFLATION,
};
pub use pigeon::{
    injectivity_bruteforce, pigeonhole_bruteforce, pigeonhole_search, pigeonhole_search_with,
    PigeonholeResult, DEFAULT_MITM_BUDGET,
};
pub use poly::IntPolynomial;
pub use resultant::{
    bareiss_det, resultant_check, resultant_euclid, resultant_pmin, sylvester, ResultantCheck,
};
pub use words::{word_synthesis, word_synthesis_checked, GeneratorPair, Word};
