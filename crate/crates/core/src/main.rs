fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = l1subgrad::cli::run_cli(std::env::args().collect(), &mut std::io::stdout());
    std::process::exit(code);
}
