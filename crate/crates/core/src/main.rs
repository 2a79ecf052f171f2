use cloneopt::cli;

fn main() {
    let env_seed = std::env::var(cli::SEED_ENV).ok();
    std::process::exit(cli::main_with(std::env::args_os(), env_seed.as_deref()));
}
