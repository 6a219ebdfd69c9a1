use std::process::ExitCode;

fn main() -> ExitCode {
    morqw::cli::run()
}
