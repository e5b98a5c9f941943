use std::process::ExitCode;

fn main() -> ExitCode {
    let result = locsim_cli::run(std::env::args_os());
    print!("{}", result.stdout);
    for d in &result.diagnostics {
        eprintln!("{d}");
    }
    ExitCode::from(result.exit_code as u8)
}
