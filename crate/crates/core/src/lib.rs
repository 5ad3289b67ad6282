pub mod detector;
pub mod dsp;
pub mod error;
pub mod features;
pub mod io;
pub mod pipeline;
pub mod pulse;
pub mod stats;
pub mod sync;
pub mod synth;
pub mod types;
