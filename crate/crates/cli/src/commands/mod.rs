pub mod bounds;
pub mod estimate_ar;
pub mod fit;
pub mod frobenius;
pub mod mc_run;
pub mod plot;
pub mod simulate;
