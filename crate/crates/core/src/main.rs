fn main() -> std::process::ExitCode {
    area_graph::cli::main()
}
