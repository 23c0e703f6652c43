fn main() -> std::process::ExitCode {
    tentropy::cli::run()
}
