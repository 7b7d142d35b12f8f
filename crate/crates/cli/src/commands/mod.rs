pub mod diagnose;
pub mod kernel;
pub mod run;

pub use diagnose::{diagnose, DiagnoseReport};
pub use kernel::{check_lemmas, verify_kernel, KernelArgs, LemmaArgs};
pub use run::{run, RunSummary};
