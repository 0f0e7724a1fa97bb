use std::io::{self, Write};

use motion_code_cli::{run, Io};

fn main() {
    let stdin = io::stdin();
    let (mut input, mut out, mut err) = (stdin.lock(), io::stdout().lock(), io::stderr().lock());
    let status = run(
        std::env::args_os(),
        &mut Io {
            stdin: &mut input,
            stdout: &mut out,
            stderr: &mut err,
        },
    );
    let _ = out.flush();
    let _ = err.flush();
    std::process::exit(status);
}
