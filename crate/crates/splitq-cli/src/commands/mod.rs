pub mod adapt;
pub mod list;
pub mod recover;
pub mod sweep;
pub mod train;
