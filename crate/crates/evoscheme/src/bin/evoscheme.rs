fn main() -> std::process::ExitCode {
    evoscheme::cli::main()
}
