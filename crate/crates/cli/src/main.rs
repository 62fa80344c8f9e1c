use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = pplab_cli::run(std::env::args_os());
    if result.code == 2 {
        let _ = std::io::stderr().write_all(result.report.as_bytes());
    } else {
        let _ = std::io::stdout().write_all(result.report.as_bytes());
    }
    ExitCode::from(result.code as u8)
}
