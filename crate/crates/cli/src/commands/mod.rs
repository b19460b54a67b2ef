pub mod analyze;
pub mod compare;
pub mod runin;
pub mod scatter;
pub mod synth;
