"""Entry point for running as a module: python -m ddpc_cli."""

from ddpc_cli.cli import cli

if __name__ == "__main__":
    cli()
