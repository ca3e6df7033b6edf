//! Library side of `simcli`: scenario files, CSV emitters and the
//! trajectory file format.

pub mod commands;
pub mod output;
pub mod scenario;
pub mod trajfile;
