fn main() -> std::process::ExitCode {
    delay_apt::cli::main_entry()
}
