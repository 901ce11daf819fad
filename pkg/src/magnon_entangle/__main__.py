"""Allow ``python -m magnon_entangle``."""

from magnon_entangle.cli import main

if __name__ == "__main__":
    main()
