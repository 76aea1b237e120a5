//! Exact branch-and-bound for the minimal `Φ_p`-sum exceeding an integer,
//! with optimality certificates, plus the dimension-1 threshold-gap reports
//! built from it.

mod dim1;
mod search;

pub use dim1::{
    curve_complement_index, cy_witness_check, equation_two_solver, glct_max_dim1,
    glct_max_dim1_with_caps, lct_gap_dim1,
    lct_sup_brute_force, mld_gap_dim1, CurveIndexError, Dim1GapReport, Dim1Kind, Dim1Witness,
    Eq2Outcome,
};
pub use search::{
    epsilon2, min_sum_exceeding, CertStatus, Eps2, GapCertificate, SearchCaps,
};
