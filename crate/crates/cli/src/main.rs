use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stdout = io::stdout().lock();
    let code = oam_qcrb_cli::run(std::env::args_os(), &mut stdout, &mut io::stderr().lock());
    let _ = stdout.flush();
    ExitCode::from(code)
}
