"""Replay the inclusion/exclusion dependency fixture suites and print a
scoreboard: every implication derived, verified and semantically
validated, every non-implication refuted with a concrete relation.

Usage: python scripts/dependency_calculus_report.py [--show-derivations]
"""

import argparse
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from teamlogic.dbdeps import (
    derive, parse_dependency, semantic_implies, verify_derivation,
)

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--show-derivations", action="store_true")
    args = ap.parse_args()

    implications = json.loads(
        (FIXTURES / "casanova-implications.json").read_text())
    rules_used = {}
    for case in implications:
        premises = [parse_dependency(p) for p in case["premises"]]
        goal = parse_dependency(case["goal"])
        found = derive(premises, goal, depth=6)
        status = "derived" if found else "MISSING"
        if found:
            assert verify_derivation(found, premises)
            assert semantic_implies(premises, goal)[0]
            rules_used[found.rule] = rules_used.get(found.rule, 0) + 1
        print("%-9s %s  =>  %s" %
              (status, ", ".join(case["premises"]) or "(nothing)", case["goal"]))
        if found and args.show_derivations:
            for line in found.lines():
                print("          %s" % line)
    print()
    print("top-level rules: %s" %
          ", ".join("%s x%d" % kv for kv in sorted(rules_used.items())))
    print()

    refuted = json.loads(
        (FIXTURES / "casanova-non-implications.json").read_text())
    for case in refuted:
        premises = [parse_dependency(p) for p in case["premises"]]
        goal = parse_dependency(case["goal"])
        holds, counterexample = semantic_implies(premises, goal)
        assert not holds
        print("refuted   %s  =/=>  %s" %
              (", ".join(case["premises"]) or "(nothing)", case["goal"]))
        print("          witness relation over %s: %s" %
              (",".join(counterexample.attributes),
               sorted(counterexample.tuples)))


if __name__ == "__main__":
    main()
