//! Parameter sweeps in `h`: numeric resonances against the asymptotic
//! predictions, error-exponent fits, and report files.

mod config;
mod emit;
mod fit;
mod identities;
mod sweep;

pub use config::{ContourConfig, HGrid, Mode, SweepConfig, Tolerances};
pub use emit::{emit, from_json, svg_plot, to_csv, to_json, write_wall_clock, Series, CSV_HEADER};
pub use fit::fit_slope;
pub use identities::{identity_checks, Check, IDENTITY_SLOPES};
pub use sweep::{execute, run, Counters, HSummary, Record, SlopeFit, SweepReport, WallClock};
