use std::process::ExitCode;

fn main() -> ExitCode {
    rsvp_service::cli::run(std::env::args_os())
}
