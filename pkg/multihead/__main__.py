"""Entry point for running multihead as a module: python -m multihead"""

from multihead.cli import main

if __name__ == "__main__":
    main()
