"""Command-line subcommands; each module registers one or more parsers."""
