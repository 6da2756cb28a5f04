pub mod bounds_cmd;
pub mod cover;
pub mod dims_cmd;
pub mod lowerbound;
pub mod pac;
pub mod simulate;
