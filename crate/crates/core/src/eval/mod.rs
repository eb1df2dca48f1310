//! Numeric evaluation of Fliess operators in continuous and discrete time.

pub mod ct;
pub mod dt;

pub use ct::{
    ct_bilinear_simulate, ct_fliess_eval, ct_fliess_trajectory, ct_tail_bound, iterated_integral, picard_feedback,
    verify_cascade_ct, verify_feedback_ct, CTSignal, CtReport,
};
pub use dt::{
    dt_fliess_eval, dt_state_affine_simulate, dt_tail_bound, iterated_sum, iterated_sum_trajectory, rota_baxter_defect,
    sum_bound, summation_operator, DTSignal, GrowthClass, StateAffineSystem, Transition,
};
