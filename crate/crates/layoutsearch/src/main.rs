use clap::Parser;

fn main() -> anyhow::Result<()> {
    layoutsearch::cli::run(layoutsearch::cli::Cli::parse())
}
