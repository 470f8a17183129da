#!/usr/bin/env python3
"""Stub trainer: prints a diagnostic to stderr and dies on the first request."""
import sys


def main() -> None:
    sys.stdin.readline()
    print("CUDA out of memory", file=sys.stderr, flush=True)
    sys.exit(3)


if __name__ == "__main__":
    main()
