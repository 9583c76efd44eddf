//! Regulator currents on tori and products of tori: Deligne cochains and the
//! ξ-forms, the two pairings `r_log` and `r_B`, the J operator and the defect
//! checks that compare them.
mod cochain;
mod defects;
mod fixtures;
mod pairing;

pub use cochain::{
    pi_p, xi_form, xi_form_split, xi_from_data, DeligneCochain, PiFactor, PointData, STerm,
};
pub use defects::{ddbar_defect, descent_defect, DdbarDefect, Jet, SplitEta, TrigPoly, TrigTerm};
pub use fixtures::{ddbar_fixtures, j_panel, steinberg_fixture, SteinbergFixture};
pub use pairing::{
    beilinson_normalization, compare_j, j_form, j_operator, log_current_density, r_beilinson,
    r_log, regulator_pairings, summarize_j, CycleWithFunctions, JComparisonEntry, JSummary,
    PairingEntry, PointSample, RegulatorKind, RegulatorValue,
};
