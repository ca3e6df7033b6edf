pub mod actions;
pub mod harness;
pub mod oracle;
