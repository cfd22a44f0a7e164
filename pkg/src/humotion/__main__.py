"""Allow running the command line tools as a module."""

from .cli import main

main()
