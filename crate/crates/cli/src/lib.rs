//! IO and estimation layer on top of `exchkit-core`: file formats, the
//! floating-point LP used to triage Monte Carlo samples, and the volume
//! estimator behind the `volume` subcommand.

pub mod floatlp;
pub mod format;
pub mod volume;
