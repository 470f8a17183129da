#!/usr/bin/env python3
"""Stub trainer: reports a trainer-side failure for every request."""
import json
import sys


def main() -> None:
    for line in sys.stdin:
        request = json.loads(line)
        print(json.dumps({"id": request["id"], "error": "training diverged"}), flush=True)


if __name__ == "__main__":
    main()
