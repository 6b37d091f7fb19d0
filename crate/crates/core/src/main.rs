use std::process::ExitCode;

fn main() -> ExitCode {
    mixmean::cli::init_threads();
    let code = mixmean::cli::run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}
