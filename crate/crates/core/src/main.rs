fn main() {
    let env_out = std::env::var_os("MPCR_OUT").map(std::path::PathBuf::from);
    let code = mpcr_core::cli::run(
        std::env::args_os(),
        env_out,
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
