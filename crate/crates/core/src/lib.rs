pub mod error;
pub mod linalg;
pub mod symplectic;
pub mod souriau;
pub mod path;
pub mod random;
pub mod partition;
pub mod maslov;
pub mod pairs;
pub mod specflow;
pub mod bvp;
pub mod input;
