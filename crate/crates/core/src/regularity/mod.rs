//! Hölder regularity from Faber-Schauder coefficients and from pointwise scans.

mod criteria;
mod meagre;
mod scan;

pub use criteria::{
    branch_criterion, classify, decay_trend, exponent_bounds, level_extremes, right_cell_increment, windowed_growth,
    ExponentBounds, LevelExtremes, DEFAULT_WINDOW, RegularityReport, ThreePoint, PROBE_ALPHAS, TREND_ZERO,
};
pub use meagre::{
    an_membership_test, an_membership_test_with, an_offsets, escape_frequency, escape_perturbation, Membership,
    AN_PROBES,
};
pub use scan::{
    derivative_scan, derivative_scan_with, holder_scan, holder_scan_with, ls_slope, DerivativeScan,
    DerivativeScanConfig, DerivativeVerdict, ExponentEstimate, HolderScanResult, ScaleSample, Side, DEFAULT_PROBES,
};
