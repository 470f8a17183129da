#!/usr/bin/env python3
"""Stub trainer: accepts requests and never answers."""
import sys
import time


def main() -> None:
    for _ in sys.stdin:
        time.sleep(3600)


if __name__ == "__main__":
    main()
