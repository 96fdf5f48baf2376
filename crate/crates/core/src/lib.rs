pub mod basis;
pub mod harness;
pub mod hdg;
pub mod linalg;
pub mod mesh;
pub mod post;
pub mod problems;
