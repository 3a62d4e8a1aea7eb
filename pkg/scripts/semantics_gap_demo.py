"""Walk the lax/strict fixture instances and show where the two
evaluation modes come apart, including the game-side view.

Usage: python scripts/semantics_gap_demo.py [fixtures_dir]
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from teamlogic.games import build_arena, find_uniform_winning, format_strategy
from teamlogic.model import Model, Team
from teamlogic.semantics import Mode, satisfies
from teamlogic.syntax import parse


def show(fixtures, name):
    data = json.loads((fixtures / name).read_text())
    model = Model.from_json_dict(data["model"])
    team = Team.from_json_dict(data["team"])
    phi = parse(data["formula"])
    print("== %s" % name)
    print("   formula: %s" % data["formula"])
    print("   team rows: %s" % [list(r.values_for(team.variables))
                                for r in team.sorted_rows()])
    for mode in (Mode.LAX, Mode.STRICT):
        verdict = satisfies(model, team, phi, mode)
        print("   %-6s -> %s (%d nodes)" %
              (mode.value, verdict.status, verdict.nodes_used))
    if "free_vars" in data:
        narrow = team.restrict(data["free_vars"])
        verdict = satisfies(model, narrow, phi, Mode.STRICT)
        print("   strict after dropping the extra column -> %s" % verdict.status)
        return
    arena = build_arena(model, team, phi)
    tau = find_uniform_winning(arena)
    print("   nondeterministic uniform strategy:")
    for line in format_strategy(arena, tau).splitlines():
        print("     %s" % line)
    det = find_uniform_winning(arena, deterministic=True)
    print("   deterministic uniform strategy: %s" %
          ("found" if det else "none"))
    print()


def main():
    fixtures = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else \
        pathlib.Path(__file__).resolve().parent.parent / "fixtures"
    for name in ("prop-4.2-lax-vs-strict.json",
                 "prop-4.2-lax-vs-strict-exists.json",
                 "prop-4.2-strict-nonlocal-disjunction.json",
                 "prop-4.2-strict-nonlocal-existential.json"):
        show(fixtures, name)


if __name__ == "__main__":
    main()
