pub mod error;
pub mod quad;
pub mod pulses;
pub mod potentials;
pub mod phase;
pub mod overlap;
pub mod condphase;
pub mod oracle;
