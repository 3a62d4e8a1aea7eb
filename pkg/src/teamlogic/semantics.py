"""Dual-mode team-semantics evaluator.

Satisfaction is defined over teams.  Disjunction splits a team into a
cover (lax) or a partition (strict); existentials extend each row with a
nonempty value set (lax) or a single value (strict); universals extend
with every value.  Atoms are checked directly over the team.

Naive enumeration of splits and witness functions is exponential, so the
evaluator layers several exact shortcuts on top of a budgeted
backtracking search:

* first order subformulas are flat and get checked row by row;
* formulas over {FO, incl, equi} are closed under unions in lax mode, so
  the greatest satisfying subteam exists and is computable by a greatest
  fixpoint (largest_subteam); lax satisfaction is then a single
  comparison;
* disjuncts are prefiltered per row by their flat conjuncts, and only
  genuinely ambiguous rows are resolved by backtracking;
* existential blocks whose variables are pinned by dependence conjuncts
  are searched class-by-class instead of row-by-row.

Every shortcut is also covered by a test against a rule-by-rule
reference evaluator.
"""

import enum
import itertools
from dataclasses import dataclass

from .model import Team, eval_term
from .syntax import (
    And, Or, Exists, Forall, Name,
    RelAtom, Equality, DepAtom, IndepAtom, InclAtom, ExclAtom, EquiAtom,
    LITERALS, ATOMS, free_names, is_first_order, term_names,
)


class Mode(enum.Enum):
    LAX = "lax"
    STRICT = "strict"


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 10_000_000

    def __post_init__(self):
        if self.max_nodes <= 0:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class Verdict:
    status: str  # "sat" | "unsat" | "budget_exceeded"
    nodes_used: int = 0

    @property
    def is_sat(self):
        return self.status == "sat"


class BudgetExceeded(Exception):
    def __init__(self, nodes):
        super().__init__("search budget exceeded after %d nodes" % nodes)
        self.nodes = nodes


# ---------------------------------------------------------------------------
# Tarski satisfaction for first order formulas


def tarski(model, assignment, phi):
    """Ordinary single-assignment satisfaction for first order formulas."""
    if isinstance(phi, RelAtom):
        values = tuple(eval_term(model, assignment, t) for t in phi.args)
        return (values in model.relation_rows(phi.name)) == phi.positive
    if isinstance(phi, Equality):
        left = eval_term(model, assignment, phi.left)
        right = eval_term(model, assignment, phi.right)
        return (left == right) == phi.positive
    if isinstance(phi, And):
        return tarski(model, assignment, phi.left) and tarski(model, assignment, phi.right)
    if isinstance(phi, Or):
        return tarski(model, assignment, phi.left) or tarski(model, assignment, phi.right)
    if isinstance(phi, Exists):
        return any(tarski(model, assignment.extended(phi.var, m), phi.body)
                   for m in model.domain)
    if isinstance(phi, Forall):
        return all(tarski(model, assignment.extended(phi.var, m), phi.body)
                   for m in model.domain)
    raise ValueError("not a first order formula: %r" % (phi,))


# ---------------------------------------------------------------------------
# Atom checkers


def check_dependence(model, team, terms):
    """The last term is a function of the preceding ones across the team."""
    seen = {}
    for row in team.rows:
        key = tuple(eval_term(model, row, t) for t in terms[:-1])
        value = eval_term(model, row, terms[-1])
        if seen.setdefault(key, value) != value:
            return False
    return True


def check_independence(model, team, t1s, t2s, t3s):
    """For rows agreeing on t1s, their t2s and t3s values combine freely."""
    triples = [(tuple(eval_term(model, row, t) for t in t1s),
                tuple(eval_term(model, row, t) for t in t2s),
                tuple(eval_term(model, row, t) for t in t3s))
               for row in team.rows]
    present = set(triples)
    for c1, a, _ in triples:
        for c2, _, b in triples:
            if c1 == c2 and (c1, a, b) not in present:
                return False
    return True


def check_inclusion(model, team, t1s, t2s):
    return team.relation(model, t1s) <= team.relation(model, t2s)


def check_exclusion(model, team, t1s, t2s):
    return not (team.relation(model, t1s) & team.relation(model, t2s))


def check_equiextension(model, team, t1s, t2s):
    return team.relation(model, t1s) == team.relation(model, t2s)


def check_atom(model, team, phi):
    if isinstance(phi, LITERALS):
        return all(tarski(model, row, phi) for row in team.rows)
    if isinstance(phi, DepAtom):
        return check_dependence(model, team, phi.args)
    if isinstance(phi, IndepAtom):
        return check_independence(model, team, phi.cond, phi.left, phi.right)
    if isinstance(phi, InclAtom):
        return check_inclusion(model, team, phi.left, phi.right)
    if isinstance(phi, ExclAtom):
        return check_exclusion(model, team, phi.left, phi.right)
    if isinstance(phi, EquiAtom):
        return check_equiextension(model, team, phi.left, phi.right)
    raise TypeError("not an atom: %r" % (phi,))


# ---------------------------------------------------------------------------
# Closure classification


def is_union_closed(phi):
    """Syntactic test: atoms drawn from {FO, incl, equi} only."""
    if isinstance(phi, LITERALS + (InclAtom, EquiAtom)):
        return True
    if isinstance(phi, ATOMS):
        return False
    if isinstance(phi, (And, Or)):
        return is_union_closed(phi.left) and is_union_closed(phi.right)
    return is_union_closed(phi.body)


def is_downward_closed(phi):
    """Syntactic test: atoms drawn from {FO, dep, excl} only."""
    if isinstance(phi, LITERALS + (DepAtom, ExclAtom)):
        return True
    if isinstance(phi, ATOMS):
        return False
    if isinstance(phi, (And, Or)):
        return is_downward_closed(phi.left) and is_downward_closed(phi.right)
    return is_downward_closed(phi.body)


def flatten_and(phi):
    if isinstance(phi, And):
        return flatten_and(phi.left) + flatten_and(phi.right)
    return [phi]


def flatten_or(phi):
    if isinstance(phi, Or):
        return flatten_or(phi.left) + flatten_or(phi.right)
    return [phi]


# ---------------------------------------------------------------------------
# Evaluator


class Evaluator:
    def __init__(self, model, mode=Mode.LAX, budget=None):
        self.model = model
        self.mode = mode
        self.budget = budget or Budget()
        self.nodes = 0
        self._memo = {}
        self._maxsub_memo = {}

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceeded(self.nodes)

    # -- entry point --------------------------------------------------------

    def sat(self, phi, team):
        if not team.rows:
            return True
        key = (phi, frozenset(team.variables), team.rows)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        self.tick()
        result = self._sat(phi, team)
        self._memo[key] = result
        return result

    def _sat(self, phi, team):
        if is_first_order(phi):
            return all(tarski(self.model, row, phi) for row in team.rows)
        if isinstance(phi, ATOMS):
            return check_atom(self.model, team, phi)
        if self.mode is Mode.LAX and is_union_closed(phi):
            return len(self.largest_subteam(phi, team)) == len(team.rows)
        if isinstance(phi, And):
            conjuncts = sorted(flatten_and(phi), key=_conjunct_cost)
            return all(self.sat(c, team) for c in conjuncts)
        if isinstance(phi, Or):
            return self._sat_or(phi, team)
        if isinstance(phi, Exists):
            return self._sat_exists(phi, team)
        if isinstance(phi, Forall):
            return self.sat(phi.body, team.extend_universal(phi.var, self.model.domain))
        raise TypeError("not a formula: %r" % (phi,))

    # -- greatest satisfying subteams (lax, union-closed formulas) ----------

    def largest_subteam(self, phi, team):
        """The greatest subteam lax-satisfying a union-closed formula.

        The union of all satisfying subteams satisfies the formula again,
        so the greatest one exists; it is computed structurally, with
        greatest-fixpoint row trimming at incl/equi atoms, universal
        quantifiers and conjunctions.  Returns a set of rows of the team.
        """
        key = (phi, frozenset(team.variables), team.rows)
        cached = self._maxsub_memo.get(key)
        if cached is not None:
            return cached
        self.tick()
        result = self._largest_subteam(phi, team)
        self._maxsub_memo[key] = result
        return result

    def _largest_subteam(self, phi, team):
        model = self.model
        if is_first_order(phi):
            return {row for row in team.rows if tarski(model, row, phi)}
        if isinstance(phi, (InclAtom, EquiAtom)):
            both_ways = isinstance(phi, EquiAtom)
            rows = set(team.rows)
            while True:
                left_vals = {tuple(eval_term(model, r, t) for t in phi.left) for r in rows}
                right_vals = {tuple(eval_term(model, r, t) for t in phi.right) for r in rows}
                keep = set()
                for row in rows:
                    lv = tuple(eval_term(model, row, t) for t in phi.left)
                    rv = tuple(eval_term(model, row, t) for t in phi.right)
                    if lv in right_vals and (not both_ways or rv in left_vals):
                        keep.add(row)
                if keep == rows:
                    return rows
                rows = keep
                self.tick()
        if isinstance(phi, And):
            rows = set(team.rows)
            while True:
                new = rows
                for conjunct in flatten_and(phi):
                    new = self.largest_subteam(conjunct, team.with_rows(new))
                if new == rows:
                    return rows
                rows = new
                self.tick()
        if isinstance(phi, Or):
            out = set()
            for disjunct in flatten_or(phi):
                out |= self.largest_subteam(disjunct, team)
            return out
        if isinstance(phi, Exists):
            extended = team.extend_universal(phi.var, model.domain)
            good = self.largest_subteam(phi.body, extended)
            return {row for row in team.rows
                    if any(row.extended(phi.var, m) in good for m in model.domain)}
        if isinstance(phi, Forall):
            rows = set(team.rows)
            while rows:
                extended = team.with_rows(rows).extend_universal(phi.var, model.domain)
                good = self.largest_subteam(phi.body, extended)
                keep = {row for row in rows
                        if all(row.extended(phi.var, m) in good for m in model.domain)}
                if keep == rows:
                    return rows
                rows = keep
                self.tick()
            return rows
        raise ValueError("not union closed: %r" % (phi,))

    # -- disjunction --------------------------------------------------------

    def _split_side(self, side):
        """Split a disjunct into its flat conjuncts and the rest."""
        flat, rest = [], []
        for conjunct in flatten_and(side):
            (flat if is_first_order(conjunct) else rest).append(conjunct)
        return flat, rest

    def _sat_or(self, phi, team):
        sides = [self._split_side(side) for side in flatten_or(phi)]
        rows = team.sorted_rows()
        eligible = []  # per side: set of rows passing its flat conjuncts
        for flat, _rest in sides:
            eligible.append({row for row in rows
                             if all(tarski(self.model, row, c) for c in flat)})
        if any(all(row not in e for e in eligible) for row in rows):
            return False
        if self.mode is Mode.LAX:
            return self._sat_or_lax(sides, eligible, team, rows)
        return self._sat_or_strict(sides, eligible, team, rows)

    def _sat_or_lax(self, sides, eligible, team, rows):
        covered = set()
        special = []  # (index, rest-formula) for sides needing a search
        for i, (_flat, rest) in enumerate(sides):
            if not rest:
                covered |= eligible[i]
            elif all(is_union_closed(c) for c in rest):
                body = rest[0] if len(rest) == 1 else And(rest[0], _reconjoin(rest[1:]))
                covered |= self.largest_subteam(body, team.with_rows(eligible[i]))
            else:
                special.append((i, _reconjoin(rest)))
        mandatory = [row for row in rows if row not in covered]
        if not special:
            return not mandatory
        if not mandatory:
            return True

        # Each still-uncovered row must go to one special side; special
        # sides may additionally pick up any of their other eligible rows
        # (lax splits can overlap, so sides are independent here).
        options = []
        for row in mandatory:
            opts = [i for i, (idx, _r) in enumerate(special) if row in eligible[idx]]
            if not opts:
                return False
            options.append(opts)
        order = sorted(range(len(mandatory)), key=lambda j: len(options[j]))

        def assign(pos, chosen):
            self.tick()
            if pos == len(order):
                return all(self._side_holds(idx, rest,
                                            frozenset(chosen[k]), eligible[idx], team)
                           for k, (idx, rest) in enumerate(special))
            j = order[pos]
            for i in options[j]:
                chosen[i].add(mandatory[j])
                if assign(pos + 1, chosen):
                    return True
                chosen[i].discard(mandatory[j])
            return False

        return assign(0, [set() for _ in special])

    def _side_holds(self, idx, rest, assigned, elig, team):
        """Can a special side's team include `assigned` and satisfy it?"""
        if not assigned:
            return True
        if is_downward_closed(rest):
            # Any larger satisfying team restricts to `assigned`.
            return self.sat(rest, team.with_rows(assigned))
        optional = sorted(elig - assigned,
                          key=lambda r: r.values_for(team.variables))
        for size in range(len(optional) + 1):
            for extra in itertools.combinations(optional, size):
                self.tick()
                if self.sat(rest, team.with_rows(assigned | set(extra))):
                    return True
        return False

    def _sat_or_strict(self, sides, eligible, team, rows):
        options = []
        for row in rows:
            opts = [i for i in range(len(sides)) if row in eligible[i]]
            options.append(opts)
        order = sorted(range(len(rows)), key=lambda j: len(options[j]))
        downward = [all(is_first_order(c) or isinstance(c, (DepAtom, ExclAtom))
                        for c in rest) for _flat, rest in sides]

        def assign(pos, chosen):
            self.tick()
            if pos == len(order):
                for i, (_flat, rest) in enumerate(sides):
                    if rest and chosen[i]:
                        if not self.sat(_reconjoin(rest), team.with_rows(chosen[i])):
                            return False
                return True
            j = order[pos]
            for i in options[j]:
                chosen[i].add(rows[j])
                _flat, rest = sides[i]
                # Downward-closed sides can be pruned as they grow.
                if not rest or not downward[i] or \
                        self.sat(_reconjoin(rest), team.with_rows(chosen[i])):
                    if assign(pos + 1, chosen):
                        return True
                chosen[i].discard(rows[j])
            return False

        return assign(0, [set() for _ in sides])

    # -- existentials -------------------------------------------------------

    def _sat_exists(self, phi, team):
        block = []
        body = phi
        while isinstance(body, Exists):
            block.append(body.var)
            body = body.body
        if self.mode is Mode.LAX and len(set(block)) == len(block) \
                and not (set(block) & set(team.variables)):
            result = self._sat_exists_pinned(block, body, team)
            if result is not None:
                return result
        # Generic search: peel one variable at a time.
        var = block[0]
        rest = phi.body
        return self._sat_exists_one(var, rest, team)

    def _sat_exists_pinned(self, block, body, team):
        """Class-wise search for blocks pinned by dependence conjuncts.

        Applies when every block variable v has a conjunct dep(ts, v)
        with one shared block-free tuple ts, and every other conjunct
        either avoids the block variables, is flat, or is a disjunction
        whose disjuncts split into flat conjuncts plus block-free ones.
        Returns None when the shape does not apply.

        Any lax witness can be normalized to one value per variable per
        ts-value class (pick the witness values of one row of the class;
        the pinning conjuncts force agreement across rows anyway), so
        searching over per-class values is complete; and since the
        residual disjuncts are block-free, only the per-row side
        eligibility profile of each class's choice matters.
        """
        blockset = set(block)
        conjuncts = flatten_and(body)
        pin_tuple = None
        pinned = set()
        residual = []
        for c in conjuncts:
            if isinstance(c, DepAtom) and isinstance(c.args[-1], Name) \
                    and c.args[-1].ident in blockset \
                    and c.args[-1].ident not in pinned:
                prefix_names = set()
                for a in c.args[:-1]:
                    prefix_names |= term_names(a)
                if not (prefix_names & blockset) \
                        and (pin_tuple is None or c.args[:-1] == pin_tuple):
                    pin_tuple = c.args[:-1]
                    pinned.add(c.args[-1].ident)
                    continue
            residual.append(c)
        if pinned != blockset:
            return None

        plain = []      # conjuncts without block variables
        row_flat = []   # flat conjuncts touching block variables
        or_conj = None
        for c in residual:
            if not (free_names(c) & blockset):
                plain.append(c)
            elif is_first_order(c):
                row_flat.append(c)
            elif isinstance(c, Or) and or_conj is None:
                or_conj = c
            else:
                return None
        sides = []
        if or_conj is not None:
            for side in flatten_or(or_conj):
                flat, rest = self._split_side(side)
                if any(free_names(r) & blockset for r in rest):
                    return None
                sides.append((flat, rest))

        # Residual block-free conjuncts see the same team up to the new
        # columns, which lax satisfaction ignores.
        if any(not self.sat(c, team) for c in plain):
            return False

        model = self.model
        classes = {}
        for row in team.sorted_rows():
            key = tuple(eval_term(model, row, t) for t in pin_tuple)
            classes.setdefault(key, []).append(row)

        # Per class, the usable value choices collapse to their maximal
        # side-eligibility profiles.
        k = len(block)
        profiles = []
        for key, members in classes.items():
            cand = []
            for values in itertools.product(model.domain, repeat=k):
                self.tick()
                ext = [_extend_many(row, block, values) for row in members]
                if any(not tarski(model, e, c) for e in ext for c in row_flat):
                    continue
                if not sides:
                    cand.append(tuple(frozenset() for _ in members))
                    continue
                profile = []
                ok = True
                for e in ext:
                    elig = frozenset(i for i, (flat, _rest) in enumerate(sides)
                                     if all(tarski(model, e, c) for c in flat))
                    if not elig:
                        ok = False
                        break
                    profile.append(elig)
                if ok:
                    cand.append(tuple(profile))
            cand = _maximal_profiles(cand)
            if not cand:
                return False
            profiles.append((members, cand))
        if not sides:
            return True

        def choose(pos, elig_map):
            self.tick()
            if pos == len(profiles):
                return self._resolve_cover(sides, elig_map, team)
            members, cand = profiles[pos]
            for profile in cand:
                for row, elig in zip(members, profile):
                    for i in elig:
                        elig_map[i].add(row)
                if choose(pos + 1, elig_map):
                    return True
                for row, elig in zip(members, profile):
                    for i in elig:
                        elig_map[i].discard(row)
            return False

        return choose(0, [set() for _ in sides])

    def _resolve_cover(self, sides, eligible, team):
        """Lax cover search given per-side eligible row sets."""
        rows = team.sorted_rows()
        if any(all(row not in e for e in eligible) for row in rows):
            return False
        return self._sat_or_lax(sides, eligible, team, rows)

    def _sat_exists_one(self, var, rest, team):
        model = self.model
        inner_block = set()
        probe = rest
        while isinstance(probe, Exists):
            inner_block.add(probe.var)
            probe = probe.body
        filters = [c for c in flatten_and(probe)
                   if is_first_order(c) and not (free_names(c) & inner_block)]
        pruners = [c for c in flatten_and(probe)
                   if isinstance(c, (DepAtom, ExclAtom))
                   and not (free_names(c) & inner_block)]
        # Compound downward-closed conjuncts prune too: satisfaction of the
        # {FO, dep, excl} fragment is downward closed in both modes, so a
        # failure on a partially extended team can never be repaired by
        # adding the remaining rows.
        dc_pruners = [c for c in flatten_and(probe)
                      if not isinstance(c, ATOMS) and not is_first_order(c)
                      and is_downward_closed(c)
                      and not (free_names(c) & inner_block)]

        rows = team.sorted_rows()
        candidates = []
        for row in rows:
            cand = [m for m in model.domain
                    if all(tarski(model, _extend_many(row, (var,), (m,)), c)
                           for c in filters)]
            if not cand:
                return False
            candidates.append(cand)
        order = sorted(range(len(rows)), key=lambda j: len(candidates[j]))
        new_vars = team.variables if var in team.variables else team.variables + (var,)

        if self.mode is Mode.STRICT:
            choices_for = lambda cand: [[m] for m in cand]
        else:
            def choices_for(cand):
                out = []
                for size in range(1, len(cand) + 1):
                    out.extend(list(c) for c in itertools.combinations(cand, size))
                return out

        def assign(pos, extended):
            self.tick()
            if pos == len(order):
                return self.sat(rest, Team(new_vars, extended))
            j = order[pos]
            row = rows[j]
            for values in choices_for(candidates[j]):
                new = [row.extended(var, m) for m in values]
                extended.extend(new)
                partial = Team(new_vars, extended)
                if all(check_atom(model, partial, c) for c in pruners) \
                        and all(self.sat(c, partial) for c in dc_pruners):
                    if assign(pos + 1, extended):
                        return True
                del extended[-len(new):]
            return False

        return assign(0, [])


def _reconjoin(parts):
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _conjunct_cost(phi):
    if isinstance(phi, ATOMS):
        return 0
    if is_first_order(phi):
        return 1
    return 2


def _extend_many(row, variables, values):
    for var, value in zip(variables, values):
        row = row.extended(var, value)
    return row


def _maximal_profiles(cand):
    """Drop profiles componentwise dominated by another candidate."""
    out = []
    for p in cand:
        if any(p != q and all(a <= b for a, b in zip(p, q)) for q in cand):
            continue
        if p not in out:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# Public entry points


def satisfies(model, team, phi, mode=Mode.LAX, budget=None):
    missing = free_names(phi) - set(team.variables) - set(model.constants)
    if missing and team.rows:
        raise ValueError("free variables outside the team domain: %s"
                         % ", ".join(sorted(missing)))
    ev = Evaluator(model, mode, budget)
    try:
        return Verdict("sat" if ev.sat(phi, team) else "unsat", ev.nodes)
    except BudgetExceeded as exc:
        return Verdict("budget_exceeded", exc.nodes)


def satisfies_sentence(model, phi, mode=Mode.LAX, budget=None):
    free = free_names(phi) - set(model.constants)
    if free:
        raise ValueError("sentence has free variables: %s" % ", ".join(sorted(free)))
    return satisfies(model, Team((), [{}]), phi, mode, budget)
