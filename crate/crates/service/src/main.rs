fn main() -> std::process::ExitCode {
    survey_service::cli::main_with(std::env::args_os())
}
