//! Matrix-Lie-algebra engine for extrinsic holonomy of symmetric
//! submanifolds in symmetric spaces.

pub mod holonomy;
pub mod liealg;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod submanifold;
pub mod symspace;
