#!/usr/bin/env python3
"""Stub trainer: garbles the first response, then behaves."""
import json
import sys


def main() -> None:
    first = True
    for line in sys.stdin:
        request = json.loads(line)
        if first:
            first = False
            print("this is not json", flush=True)
        else:
            print(json.dumps({"id": request["id"], "avg_loss": 0.25}), flush=True)


if __name__ == "__main__":
    main()
