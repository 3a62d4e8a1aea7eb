"""Command line front end.

Subcommands: check, game, translate, equiv, derive, dbcheck.  Exit
codes are uniform: 0 for sat/equivalent/derivable/holds, 1 for the
negative verdict, 2 for usage or parse errors, 3 when the node budget
runs out.  --json switches every subcommand to a single JSON object on
stdout; the default output is line oriented and stable across runs.
"""

import argparse
import json
import sys

from . import dbdeps, games, translate
from .model import Model, Team, ModelError, all_teams
from .semantics import Budget, BudgetExceeded, Mode, satisfies, satisfies_sentence
from .syntax import (
    ATOMS, App, DepAtom, EquiAtom, ExclAtom, InclAtom, IndepAtom,
    ParseError, RelAtom, atom_term_tuples, free_names, parse, render,
    subformula_instances,
)

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(ValueError):
    pass


def _emit(args, report, lines):
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _budget(args):
    return Budget(args.budget)


def _mode(args):
    return Mode.STRICT if args.mode == "strict" else Mode.LAX


def _load_model(args):
    if args.model:
        return Model.load(args.model, allow_unit_domain=args.allow_unit_domain)
    if args.domain:
        labels = [d.strip() for d in args.domain.split(",")]
        return Model(labels, allow_unit_domain=args.allow_unit_domain)
    raise UsageError("either --model or --domain is required")


def _load_team(args):
    if args.team is None:
        return None
    return Team.load(args.team)


# ---------------------------------------------------------------------------
# check


def cmd_check(args):
    model = _load_model(args)
    team = _load_team(args)
    phi = parse(args.formula)
    if team is None:
        verdict = satisfies_sentence(model, phi, _mode(args), _budget(args))
    else:
        verdict = satisfies(model, team, phi, _mode(args), _budget(args))
    report = {"verdict": verdict.status, "mode": args.mode,
              "nodes": verdict.nodes_used}
    _emit(args, report, ["%s (%s)" % (verdict.status, args.mode)])
    if verdict.status == "budget_exceeded":
        return EXIT_BUDGET
    return EXIT_SAT if verdict.is_sat else EXIT_UNSAT


# ---------------------------------------------------------------------------
# game


def cmd_game(args):
    model = _load_model(args)
    team = _load_team(args)
    if team is None:
        raise UsageError("game needs a --team file")
    phi = parse(args.formula)
    if args.compile:
        phi = translate.compile(phi, frozenset({"incl", "excl"}))
    try:
        arena = games.build_arena(model, team, phi)
    except games.ArenaError as exc:
        raise UsageError(str(exc))
    try:
        tau = games.find_uniform_winning(arena, deterministic=args.deterministic,
                                         budget=_budget(args))
    except BudgetExceeded:
        _emit(args, {"verdict": "budget_exceeded"}, ["budget_exceeded"])
        return EXIT_BUDGET
    if tau is None:
        _emit(args, {"verdict": "none"}, ["none"])
        return EXIT_UNSAT
    dump = games.format_strategy(arena, tau)
    _emit(args, {"verdict": "strategy", "strategy": dump.splitlines()},
          dump.splitlines() or ["(no choices needed)"])
    return EXIT_SAT


# ---------------------------------------------------------------------------
# translate


def _comma_vars(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def cmd_translate(args):
    rule = args.rule
    if rule == "snf2ie":
        text = args.formula
        if args.from_file:
            with open(args.formula) as handle:
                text = handle.read()
        nf = translate.parse_skolemnf(text)
        if not args.team_vars:
            raise UsageError("snf2ie needs --team-vars")
        out = translate.skolemnf_to_ie(nf, _comma_vars(args.team_vars),
                                       expand_deps=args.expand_deps)
        _emit(args, {"formula": render(out)}, [render(out)])
        return EXIT_SAT
    phi = parse(args.formula)
    if rule == "ie2eso":
        if not args.team_vars:
            raise UsageError("ie2eso needs --team-vars")
        eso = translate.ie_to_eso(phi, _comma_vars(args.team_vars))
        dump = translate.format_eso(eso)
        _emit(args, {"eso": dump.splitlines()}, dump.splitlines())
        return EXIT_SAT
    if rule == "tc":
        for flag in ("avars", "bvars", "xvars", "yvars"):
            if not getattr(args, flag):
                raise UsageError("tc needs --avars/--bvars/--xvars/--yvars")
        out = translate.tc_sentence(phi, _comma_vars(args.avars),
                                    _comma_vars(args.bvars),
                                    _comma_vars(args.xvars),
                                    _comma_vars(args.yvars))
        _emit(args, {"formula": render(out)}, [render(out)])
        return EXIT_SAT
    if rule == "const-nf":
        out = translate.const_normal_form(phi)
    elif rule == "const-collapse":
        out = translate.const_sentence_collapse(phi)
    else:
        out = _translate_atom(rule, phi, args)
    _emit(args, {"formula": render(out)}, [render(out)])
    return EXIT_SAT


def _translate_atom(rule, phi, args):
    table = {
        "dep2indep": (DepAtom, lambda a: translate.dep_to_indep(a.args)),
        "dep2exc": (DepAtom, lambda a: translate.dep_to_exc(a.args)),
        "exc2dep": (ExclAtom, lambda a: translate.exc_to_dep(a.left, a.right)),
        "equi2inc": (EquiAtom, lambda a: translate.equi_to_inc(a.left, a.right)),
        "inc2equi": (InclAtom, lambda a: translate.inc_to_equi(a.left, a.right)),
        "inc2indep": (InclAtom, lambda a: translate.inc_to_indep(a.left, a.right)),
        "indep2ie": (IndepAtom,
                     lambda a: translate.indep_to_ie(
                         a.cond, a.left, a.right,
                         expand_deps=args.expand_deps)),
    }
    if rule not in table:
        raise UsageError("unknown rule %r" % rule)
    kind, apply = table[rule]
    if not isinstance(phi, kind):
        raise UsageError("rule %s applies to a single %s atom"
                         % (rule, kind.__name__))
    return apply(phi)


# ---------------------------------------------------------------------------
# equiv: the brute-force equivalence oracle


def _symbol_arities(phi):
    relations = {}
    functions = {}

    def walk_term(t):
        if isinstance(t, App):
            functions.setdefault(t.func, len(t.args))
            if functions[t.func] != len(t.args):
                raise UsageError("function %s used with mixed arities" % t.func)
            for a in t.args:
                walk_term(a)

    for _path, sub in subformula_instances(phi):
        if isinstance(sub, RelAtom):
            relations.setdefault(sub.name, len(sub.args))
            if relations[sub.name] != len(sub.args):
                raise UsageError("relation %s used with mixed arities" % sub.name)
        if isinstance(sub, ATOMS):
            for tup in atom_term_tuples(sub):
                for t in tup:
                    walk_term(t)
    return relations, functions


def _all_interpretations(domain, relations, functions):
    """Every way to interpret the listed symbols over the domain."""
    import itertools
    rel_items = sorted(relations.items())
    fun_items = sorted(functions.items())
    rel_spaces = []
    for _name, arity in rel_items:
        rows = list(itertools.product(domain, repeat=arity))
        rel_spaces.append([frozenset(s)
                           for size in range(len(rows) + 1)
                           for s in itertools.combinations(rows, size)])
    fun_spaces = []
    for _name, arity in fun_items:
        keys = list(itertools.product(domain, repeat=arity))
        fun_spaces.append([dict(zip(keys, values))
                           for values in itertools.product(domain,
                                                           repeat=len(keys))])
    for rel_choice in itertools.product(*rel_spaces) if rel_spaces else [()]:
        for fun_choice in itertools.product(*fun_spaces) if fun_spaces else [()]:
            yield (dict(zip((n for n, _a in rel_items), rel_choice)),
                   dict(zip((n for n, _a in fun_items), fun_choice)))


def cmd_equiv(args):
    f1 = parse(args.formula)
    f2 = parse(args.formula2)
    lo, _, hi = args.domains.partition("..")
    lo, hi = int(lo), int(hi or lo)
    names = free_names(f1) | free_names(f2)
    rels1, funs1 = _symbol_arities(f1)
    rels2, funs2 = _symbol_arities(f2)
    relations = {**rels1, **rels2}
    functions = {**funs1, **funs2}
    mode = _mode(args)
    budget = _budget(args)

    for size in range(lo, hi + 1):
        domain = [str(i) for i in range(size)]
        constants = {n: n for n in names if n in set(domain)}
        variables = sorted(names - set(constants))
        for rels, funs in _all_interpretations(domain, relations, functions):
            model = Model(domain, constants, funs, rels,
                          allow_unit_domain=args.allow_unit_domain)
            for team in all_teams(variables, domain, max_rows=args.max_rows):
                v1 = satisfies(model, team, f1, mode, budget)
                v2 = satisfies(model, team, f2, mode, budget)
                if "budget_exceeded" in (v1.status, v2.status):
                    _emit(args, {"verdict": "budget_exceeded"},
                          ["budget_exceeded"])
                    return EXIT_BUDGET
                if v1.status != v2.status:
                    report = {
                        "verdict": "counterexample",
                        "model": model.to_json_dict(),
                        "team": team.to_json_dict(),
                        "left": v1.status,
                        "right": v2.status,
                    }
                    _emit(args, report, [
                        "counterexample",
                        "model: %s" % json.dumps(model.to_json_dict(),
                                                 sort_keys=True),
                        "team: %s" % json.dumps(team.to_json_dict()),
                        "left: %s  right: %s" % (v1.status, v2.status),
                    ])
                    return EXIT_UNSAT
    _emit(args, {"verdict": "equivalent"}, ["equivalent"])
    return EXIT_SAT


# ---------------------------------------------------------------------------
# derive / dbcheck


def cmd_derive(args):
    try:
        premises = [dbdeps.parse_dependency(p) for p in args.premise]
        goal = dbdeps.parse_dependency(args.goal)
        found = dbdeps.derive(premises, goal, system=args.system,
                              depth=args.depth)
    except (ParseError, dbdeps.DependencyError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    if found is None:
        _emit(args, {"verdict": "not-derivable", "depth": args.depth},
              ["not derivable within depth %d" % args.depth])
        return EXIT_UNSAT
    if not dbdeps.verify_derivation(found, premises):
        raise RuntimeError("derivation failed re-validation")
    _emit(args, {"verdict": "derivable", "derivation": found.lines()},
          found.lines())
    return EXIT_SAT


def cmd_dbcheck(args):
    relation = dbdeps.DBRelation.from_csv(args.relation)
    universe = _comma_vars(args.universe) if args.universe else None
    texts = list(args.dependency)
    if args.deps_file:
        with open(args.deps_file) as handle:
            texts.extend(line.strip() for line in handle
                         if line.strip() and not line.startswith("#"))
    deps = [dbdeps.parse_dependency(t) for t in texts]
    lines = []
    violations = []
    for dep in deps:
        witness = dbdeps.find_violation(relation, dep, universe)
        if witness is None:
            lines.append("holds: %s" % dep)
        else:
            pretty = " ".join("(%s)" % ",".join(w) for w in witness)
            lines.append("violated: %s  witness: %s" % (dep, pretty))
            violations.append({"dependency": str(dep),
                               "witness": [list(w) for w in witness]})
    _emit(args, {"verdict": "holds" if not violations else "violated",
                 "violations": violations}, lines)
    return EXIT_SAT if not violations else EXIT_UNSAT


# ---------------------------------------------------------------------------
# argument plumbing


def _build_parser():
    top = argparse.ArgumentParser(prog="teamlogic")
    sub = top.add_subparsers(dest="subcommand", required=True)

    def common(p, team=False):
        p.add_argument("--json", action="store_true")
        p.add_argument("--budget", type=int, default=10_000_000)
        p.add_argument("--mode", choices=("lax", "strict"), default="lax")
        if team:
            p.add_argument("--model")
            p.add_argument("--domain",
                           help="comma-separated domain for a bare model")
            p.add_argument("--team")
        p.add_argument("--allow-unit-domain", action="store_true")

    p = sub.add_parser("check", help="evaluate a formula on a team")
    common(p, team=True)
    p.add_argument("formula")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("game", help="search for a uniform winning strategy")
    common(p, team=True)
    p.add_argument("formula")
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--compile", action="store_true",
                   help="rewrite dep/indep/equi atoms into incl/excl first")
    p.set_defaults(run=cmd_game)

    p = sub.add_parser("translate", help="apply one translation rule")
    common(p)
    p.add_argument("--rule", required=True,
                   choices=("dep2exc", "exc2dep", "dep2indep", "inc2indep",
                            "equi2inc", "inc2equi", "indep2ie", "const-nf",
                            "const-collapse", "tc", "ie2eso", "snf2ie"))
    p.add_argument("formula")
    p.add_argument("--expand-deps", action="store_true")
    p.add_argument("--team-vars")
    p.add_argument("--avars")
    p.add_argument("--bvars")
    p.add_argument("--xvars")
    p.add_argument("--yvars")
    p.add_argument("--from-file", action="store_true",
                   help="treat the formula argument as a file path (snf2ie)")
    p.set_defaults(run=cmd_translate)

    p = sub.add_parser("equiv", help="exhaustive equivalence check within bounds")
    common(p)
    p.add_argument("formula")
    p.add_argument("formula2")
    p.add_argument("--domains", default="2..2", help="domain size range a..b")
    p.add_argument("--max-rows", type=int, default=3)
    p.set_defaults(run=cmd_equiv)

    p = sub.add_parser("derive", help="derive a dependency from premises")
    common(p)
    p.add_argument("goal")
    p.add_argument("--premise", "-p", action="append", default=[])
    p.add_argument("--system", choices=("inc-only", "inc-exc"),
                   default="inc-exc")
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(run=cmd_derive)

    p = sub.add_parser("dbcheck", help="check dependencies on a CSV relation")
    common(p)
    p.add_argument("relation", help="CSV file with an attribute header row")
    p.add_argument("dependency", nargs="*")
    p.add_argument("--deps-file")
    p.add_argument("--universe", help="comma-separated universe for tgd/egd")
    p.set_defaults(run=cmd_dbcheck)

    return top


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (ParseError, UsageError, ModelError, translate.TranslateError,
            dbdeps.DependencyError, FileNotFoundError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded:
        print("budget_exceeded", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
