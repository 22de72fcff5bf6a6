use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::Parser;
use otsc_cli::{run, Cli, ExitStatus, Io};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = panic::catch_unwind(|| {
        let stdout = std::io::stdout();
        let stderr = std::io::stderr();
        let (mut out, mut err) = (stdout.lock(), stderr.lock());
        let status = run(
            cli,
            &mut Io {
                out: &mut out,
                err: &mut err,
            },
        );
        let _ = out.flush();
        status
    })
    .unwrap_or(ExitStatus::Internal);
    ExitCode::from(status.code() as u8)
}
