pub mod classify;
pub mod curve;
pub mod eigen;
pub mod logistic;
pub mod verify;
