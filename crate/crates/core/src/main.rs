fn main() -> std::process::ExitCode {
    gconv_risk::cli::main()
}
