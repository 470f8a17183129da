#!/usr/bin/env python3
"""Stub trainer: answers every request with a loss.

Default is a fixed loss of 0.42; pass --loss X for another constant, or
--formula to derive the loss from the plan (deterministic, for replay tests).
"""
import json
import sys


def main() -> None:
    fixed = 0.42
    formula = False
    args = sys.argv[1:]
    while args:
        arg = args.pop(0)
        if arg == "--loss":
            fixed = float(args.pop(0))
        elif arg == "--formula":
            formula = True
    for line in sys.stdin:
        request = json.loads(line)
        if formula:
            plan = request["plan"]
            included = sum(plan["block_layer_counts"])
            loss = (
                abs(included - 57) / 57.0
                + abs(plan["frozen_prefix"] - 2) / 18.0
                + plan["dropout"]
            )
        else:
            loss = fixed
        print(json.dumps({"id": request["id"], "avg_loss": loss}), flush=True)


if __name__ == "__main__":
    main()
