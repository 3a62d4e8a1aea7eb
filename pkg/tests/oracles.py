"""Independent reference implementations used only by the tests.

Everything here is written as a direct transcription of the defining
clauses, with no sharing of code or of algorithmic ideas with the
package: exhaustive enumeration of covers, partitions and witness
functions.  Slow on purpose; the tests keep the inputs tiny.
"""

import itertools

from teamlogic.model import Assignment, Team
from teamlogic.syntax import (
    And, DepAtom, EquiAtom, Equality, ExclAtom, Exists, Forall, InclAtom,
    IndepAtom, Name, Or, RelAtom,
)


def ref_term(model, s, term):
    if isinstance(term, Name):
        v = s.get(term.ident)
        if v is not None:
            return v
        return model.constants[term.ident]
    return model.functions[term.func][
        tuple(ref_term(model, s, a) for a in term.args)]


def ref_tarski(model, s, phi):
    if isinstance(phi, RelAtom):
        held = tuple(ref_term(model, s, t) for t in phi.args) \
            in model.relations.get(phi.name, frozenset())
        return held if phi.positive else not held
    if isinstance(phi, Equality):
        same = ref_term(model, s, phi.left) == ref_term(model, s, phi.right)
        return same if phi.positive else not same
    if isinstance(phi, And):
        return ref_tarski(model, s, phi.left) and ref_tarski(model, s, phi.right)
    if isinstance(phi, Or):
        return ref_tarski(model, s, phi.left) or ref_tarski(model, s, phi.right)
    if isinstance(phi, Exists):
        return any(ref_tarski(model, s.extended(phi.var, m), phi.body)
                   for m in model.domain)
    if isinstance(phi, Forall):
        return all(ref_tarski(model, s.extended(phi.var, m), phi.body)
                   for m in model.domain)
    raise TypeError("not first order: %r" % (phi,))


def _tuple_values(model, s, terms):
    return tuple(ref_term(model, s, t) for t in terms)


def ref_sat(model, team, phi, strict=False):
    """Team satisfaction by literal transcription of the semantic clauses."""
    rows = list(team.rows)
    if isinstance(phi, (RelAtom, Equality)):
        return all(ref_tarski(model, s, phi) for s in rows)
    if isinstance(phi, DepAtom):
        pre, last = phi.args[:-1], phi.args[-1]
        for s1, s2 in itertools.product(rows, repeat=2):
            if _tuple_values(model, s1, pre) == _tuple_values(model, s2, pre) \
                    and ref_term(model, s1, last) != ref_term(model, s2, last):
                return False
        return True
    if isinstance(phi, IndepAtom):
        for s1, s2 in itertools.product(rows, repeat=2):
            if _tuple_values(model, s1, phi.cond) != \
                    _tuple_values(model, s2, phi.cond):
                continue
            if not any(
                    _tuple_values(model, s3, phi.cond) ==
                    _tuple_values(model, s1, phi.cond)
                    and _tuple_values(model, s3, phi.left) ==
                    _tuple_values(model, s1, phi.left)
                    and _tuple_values(model, s3, phi.right) ==
                    _tuple_values(model, s2, phi.right)
                    for s3 in rows):
                return False
        return True
    if isinstance(phi, (InclAtom, ExclAtom, EquiAtom)):
        left = {_tuple_values(model, s, phi.left) for s in rows}
        right = {_tuple_values(model, s, phi.right) for s in rows}
        if isinstance(phi, InclAtom):
            return left <= right
        if isinstance(phi, ExclAtom):
            return not (left & right)
        return left == right
    if isinstance(phi, And):
        return ref_sat(model, team, phi.left, strict) and \
            ref_sat(model, team, phi.right, strict)
    if isinstance(phi, Or):
        n = len(rows)
        for bits in itertools.product((0, 1, 2) if not strict else (0, 1),
                                      repeat=n):
            # 0: left only, 1: right only, 2: both (lax overlap)
            y = [s for s, b in zip(rows, bits) if b in (0, 2)]
            z = [s for s, b in zip(rows, bits) if b in (1, 2)]
            if ref_sat(model, team.with_rows(y), phi.left, strict) and \
                    ref_sat(model, team.with_rows(z), phi.right, strict):
                return True
        return not rows
    if isinstance(phi, Exists):
        variables = team.variables if phi.var in team.variables \
            else team.variables + (phi.var,)
        if not rows:
            return ref_sat(model, Team(variables, []), phi.body, strict)
        if strict:
            spaces = [[(m,) for m in model.domain] for _ in rows]
        else:
            spaces = [[combo
                       for size in range(1, len(model.domain) + 1)
                       for combo in itertools.combinations(model.domain, size)]
                      for _ in rows]
        for choice in itertools.product(*spaces):
            ext = {s.extended(phi.var, m)
                   for s, values in zip(rows, choice) for m in values}
            if ref_sat(model, Team(variables, ext), phi.body, strict):
                return True
        return False
    if isinstance(phi, Forall):
        variables = team.variables if phi.var in team.variables \
            else team.variables + (phi.var,)
        ext = {s.extended(phi.var, m) for s in rows for m in model.domain}
        return ref_sat(model, Team(variables, ext), phi.body, strict)
    raise TypeError("not a formula: %r" % (phi,))


def reachable(nodes, edges, start):
    """Nodes reachable from start by one or more edge steps."""
    out = set()
    frontier = {b for (a, b) in edges if a == start}
    while frontier:
        out |= frontier
        frontier = {b for (a, b) in edges if a in out} - out
    return out


def ref_fd_holds(rows, xi, yi):
    seen = {}
    for row in rows:
        key = tuple(row[i] for i in xi)
        if seen.setdefault(key, row[yi]) != row[yi]:
            return False
    return True
