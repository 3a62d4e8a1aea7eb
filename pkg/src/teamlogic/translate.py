"""Formula rewriters between the atom families, plus the ESO bridge.

Each atom translation emits the equivalent formula over another atom
family, with deterministically named fresh variables (_v0, _v1, ...).
Tuple equalities and disequalities expand componentwise: z1...zk = t1...tk
becomes a conjunction of equalities, its negation a disjunction of
disequalities.

The ESO bridge maps formulas over {FO, incl, excl} to existential
second-order sentences with one free relation symbol holding the team,
and Skolem-style second-order normal forms back into the team language.
"""

import itertools
import re
from dataclasses import dataclass, field

from .model import Team, eval_term
from .syntax import (
    And, Or, Exists, Forall, Name, App,
    RelAtom, Equality, DepAtom, IndepAtom, InclAtom, ExclAtom, EquiAtom,
    ATOMS, LITERALS,
    conjoin, disjoin, exists_block, forall_block,
    free_names, term_names, is_first_order, negate_nnf, render, substitute,
    substitute_term, fresh_vars,
)
from .semantics import Budget, BudgetExceeded, tarski


class TranslateError(ValueError):
    pass


def _names_of_terms(terms):
    out = set()
    for t in terms:
        out |= term_names(t)
    return out


def _all_names(phi):
    """Every identifier occurring in a formula, bound or free."""
    if isinstance(phi, ATOMS):
        names = free_names(phi)
        return set(names)
    if isinstance(phi, (And, Or)):
        return _all_names(phi.left) | _all_names(phi.right)
    return _all_names(phi.body) | {phi.var}


def _fresh(count, avoid):
    return fresh_vars(count, avoid)


def tuple_equal(left, right):
    """z1...zk = t1...tk as a conjunction of component equalities."""
    return conjoin([Equality(a, b) for a, b in zip(left, right)])


def tuple_unequal(left, right):
    return disjoin([Equality(a, b, positive=False) for a, b in zip(left, right)])


# ---------------------------------------------------------------------------
# Constancy rewriting


def _is_constancy(phi):
    return isinstance(phi, DepAtom) and len(phi.args) == 1


def _find_constancy(phi, path=()):
    """Pre-order path of the first constancy atom, or None."""
    if _is_constancy(phi):
        return path
    if isinstance(phi, (And, Or)):
        hit = _find_constancy(phi.left, path + (0,))
        if hit is not None:
            return hit
        return _find_constancy(phi.right, path + (1,))
    if isinstance(phi, (Exists, Forall)):
        return _find_constancy(phi.body, path + (0,))
    return None


def _replace_at(phi, path, replacement):
    if not path:
        return replacement
    if isinstance(phi, (And, Or)):
        if path[0] == 0:
            return type(phi)(_replace_at(phi.left, path[1:], replacement), phi.right)
        return type(phi)(phi.left, _replace_at(phi.right, path[1:], replacement))
    return type(phi)(phi.var, _replace_at(phi.body, path[1:], replacement))


def const_pushout(phi):
    """Lift the outermost constancy atom into a quantified constant.

    dep(t) is replaced in place by z = t for a fresh z, and the result
    wrapped as exists z . (dep(z) /\\ ...).
    """
    path = _find_constancy(phi)
    if path is None:
        raise TranslateError("no constancy atom to lift")
    z = _fresh(1, _all_names(phi))[0]
    target = phi
    for step in path:
        target = (target.left, target.right)[step] if isinstance(target, (And, Or)) \
            else target.body
    inner = _replace_at(phi, path, Equality(Name(z), target.args[0]))
    return Exists(z, And(DepAtom((Name(z),)), inner))


def _constancy_paths(phi, path=()):
    if _is_constancy(phi):
        yield path, phi
    elif isinstance(phi, DepAtom):
        raise TranslateError("wide dependence atom outside constancy logic")
    elif isinstance(phi, (IndepAtom, InclAtom, ExclAtom, EquiAtom)):
        raise TranslateError("non-constancy dependency atom")
    elif isinstance(phi, (And, Or)):
        yield from _constancy_paths(phi.left, path + (0,))
        yield from _constancy_paths(phi.right, path + (1,))
    elif isinstance(phi, (Exists, Forall)):
        yield from _constancy_paths(phi.body, path + (0,))


def const_normal_form(phi):
    """exists z1..zn (dep(z1) /\\ ... /\\ dep(zn) /\\ psi) with psi first order."""
    spots = list(_constancy_paths(phi))
    if not spots:
        return phi
    names = _fresh(len(spots), _all_names(phi))
    body = phi
    for (path, atom), z in zip(spots, names):
        body = _replace_at(body, path, Equality(Name(z), atom.args[0]))
    parts = [DepAtom((Name(z),)) for z in names] + [body]
    return exists_block(names, conjoin(parts))


def const_sentence_collapse(phi):
    """Drop the constancy conjuncts of a normal-form sentence."""
    prefix = []
    body = phi
    while isinstance(body, Exists):
        prefix.append(body.var)
        body = body.body
    from .semantics import flatten_and
    conjuncts = flatten_and(body)
    kept = [c for c in conjuncts
            if not (_is_constancy(c) and isinstance(c.args[0], Name)
                    and c.args[0].ident in prefix)]
    if any(not is_first_order(c) for c in kept):
        raise TranslateError("not a constancy normal form sentence")
    if not kept:
        raise TranslateError("nothing but constancy conjuncts")
    return exists_block(prefix, conjoin(kept))


# ---------------------------------------------------------------------------
# Atom-to-atom translations


def dep_to_indep(terms):
    terms = tuple(terms)
    return IndepAtom(terms[:-1], (terms[-1],), (terms[-1],))


def dep_to_exc(terms, avoid=()):
    terms = tuple(terms)
    z = _fresh(1, _names_of_terms(terms) | set(avoid))[0]
    left = terms[:-1] + (Name(z),)
    return Forall(z, Or(Equality(Name(z), terms[-1]),
                        ExclAtom(left, terms)))


def exc_to_dep(t1s, t2s, avoid=()):
    t1s, t2s = tuple(t1s), tuple(t2s)
    width = len(t1s)
    names = _fresh(width + 2, _names_of_terms(t1s + t2s) | set(avoid))
    zs, (u1, u2) = names[:width], names[width:]
    zterms = tuple(Name(z) for z in zs)
    body = conjoin([
        DepAtom(zterms + (Name(u1),)),
        DepAtom(zterms + (Name(u2),)),
        Or(And(Equality(Name(u1), Name(u2)), tuple_unequal(zterms, t1s)),
           And(Equality(Name(u1), Name(u2), positive=False),
               tuple_unequal(zterms, t2s))),
    ])
    return forall_block(zs, exists_block([u1, u2], body))


def equi_to_inc(t1s, t2s):
    t1s, t2s = tuple(t1s), tuple(t2s)
    return And(InclAtom(t1s, t2s), InclAtom(t2s, t1s))


def inc_to_equi(t1s, t2s, avoid=()):
    t1s, t2s = tuple(t1s), tuple(t2s)
    width = len(t1s)
    names = _fresh(2 + width, _names_of_terms(t1s + t2s) | set(avoid))
    (u1, u2), zs = names[:2], names[2:]
    zterms = tuple(Name(z) for z in zs)
    body = And(EquiAtom(t2s, zterms),
               Or(Equality(Name(u1), Name(u2), positive=False),
                  tuple_equal(zterms, t1s)))
    return forall_block([u1, u2], exists_block(zs, body))


def inc_to_indep(t1s, t2s, avoid=()):
    t1s, t2s = tuple(t1s), tuple(t2s)
    width = len(t1s)
    names = _fresh(2 + width, _names_of_terms(t1s + t2s) | set(avoid))
    (v1, v2), zs = names[:2], names[2:]
    zterms = tuple(Name(z) for z in zs)
    first = And(tuple_unequal(zterms, t1s), tuple_unequal(zterms, t2s))
    second = And(Equality(Name(v1), Name(v2), positive=False),
                 tuple_unequal(zterms, t2s))
    third = And(Or(Equality(Name(v1), Name(v2)), tuple_equal(zterms, t2s)),
                IndepAtom((), zterms, (Name(v1), Name(v2))))
    return forall_block([v1, v2] + zs, disjoin([first, second, third]))


def indep_to_ie(t1s, t2s, t3s, expand_deps=False, avoid=()):
    t1s, t2s, t3s = tuple(t1s), tuple(t2s), tuple(t3s)
    w1, w2, w3 = len(t1s), len(t2s), len(t3s)
    taken = _names_of_terms(t1s + t2s + t3s) | set(avoid)
    names = _fresh(w1 + w2 + w3 + 4, taken)
    ps = names[:w1]
    qs = names[w1:w1 + w2]
    rs = names[w1 + w2:w1 + w2 + w3]
    u1, u2, u3, u4 = names[w1 + w2 + w3:]
    pt = tuple(Name(n) for n in ps)
    qt = tuple(Name(n) for n in qs)
    rt = tuple(Name(n) for n in rs)
    deps = [DepAtom(pt + qt + rt + (Name(u),)) for u in (u1, u2, u3, u4)]
    if expand_deps:
        deps = [dep_to_exc(d.args, avoid=taken | set(names)) for d in deps]
    side1 = And(Equality(Name(u1), Name(u2), positive=False),
                ExclAtom(pt + qt, t1s + t2s))
    side2 = conjoin([Equality(Name(u1), Name(u2)),
                     Equality(Name(u3), Name(u4), positive=False),
                     ExclAtom(pt + rt, t1s + t3s)])
    side3 = conjoin([Equality(Name(u1), Name(u2)),
                     Equality(Name(u3), Name(u4)),
                     InclAtom(pt + qt + rt, t1s + t2s + t3s)])
    body = conjoin(deps + [disjoin([side1, side2, side3])])
    return forall_block(list(ps) + list(qs) + list(rs),
                        exists_block([u1, u2, u3, u4], body))


# ---------------------------------------------------------------------------
# Whole-formula compilation


_ATOM_KIND = {DepAtom: "dep", IndepAtom: "indep", InclAtom: "incl",
              ExclAtom: "excl", EquiAtom: "equi"}


def _find_out_of_target(phi, target, path=()):
    kind = _ATOM_KIND.get(type(phi))
    if kind is not None and kind not in target:
        return path, phi
    if isinstance(phi, (And, Or)):
        hit = _find_out_of_target(phi.left, target, path + (0,))
        if hit is not None:
            return hit
        return _find_out_of_target(phi.right, target, path + (1,))
    if isinstance(phi, (Exists, Forall)):
        return _find_out_of_target(phi.body, target, path + (0,))
    return None


def _rewrite_atom(atom, target, avoid):
    if isinstance(atom, DepAtom):
        if "excl" in target:
            return dep_to_exc(atom.args, avoid)
        if "indep" in target:
            return dep_to_indep(atom.args)
    if isinstance(atom, ExclAtom):
        if "dep" in target or "indep" in target:
            return exc_to_dep(atom.left, atom.right, avoid)
    if isinstance(atom, EquiAtom):
        if "incl" in target or "indep" in target:
            return equi_to_inc(atom.left, atom.right)
    if isinstance(atom, InclAtom):
        if "equi" in target:
            return inc_to_equi(atom.left, atom.right, avoid)
        if "indep" in target:
            return inc_to_indep(atom.left, atom.right, avoid)
    if isinstance(atom, IndepAtom):
        if "incl" in target and "excl" in target:
            return indep_to_ie(atom.cond, atom.left, atom.right, avoid=avoid)
    raise TranslateError("no translation path from %s atoms to {%s}"
                         % (_ATOM_KIND[type(atom)], ", ".join(sorted(target))))


def compile(phi, target, max_passes=200):
    """Rewrite all atoms outside the target families, fresh vars globally.

    target is a set drawn from {dep, indep, incl, excl, equi}; first
    order material always passes through.  Inclusion atoms cannot reach
    a downward-closed target ({dep, excl} subsets) and raise.
    """
    target = set(target)
    for _ in range(max_passes):
        hit = _find_out_of_target(phi, target)
        if hit is None:
            return phi
        path, atom = hit
        replacement = _rewrite_atom(atom, target, _all_names(phi))
        phi = _replace_at(phi, path, replacement)
    raise TranslateError("translation did not converge")


# ---------------------------------------------------------------------------
# Transitive closure and the parity sentence


def tc_sentence(psi, avars, bvars, xvars, yvars):
    """Sentence satisfied iff b is NOT reachable from a along psi-edges.

    psi is a first order edge formula with free variables xvars (source)
    and yvars (target); avars/bvars are constant-name tuples.  The output
    quantifies a team column holding a psi-closed set that contains a
    and avoids b.
    """
    if not is_first_order(psi):
        raise TranslateError("edge formula must be first order")
    width = len(xvars)
    avoid = _all_names(psi) | set(xvars) | set(yvars) | set(avars) | set(bvars)
    names = _fresh(2 * width, avoid)
    zs, ws = names[:width], names[width:]
    zterms = tuple(Name(z) for z in zs)
    wterms = tuple(Name(w) for w in ws)
    edge = substitute(psi, {**{x: zt for x, zt in zip(xvars, zterms)},
                            **{y: wt for y, wt in zip(yvars, wterms)}})
    inner = forall_block(ws, Or(negate_nnf(edge), InclAtom(wterms, zterms)))
    body = conjoin([InclAtom(tuple(Name(a) for a in avars), zterms),
                    tuple_unequal(zterms, tuple(Name(b) for b in bvars)),
                    inner])
    return exists_block(zs, body)


def odd_cardinality_sentence():
    """The parity sentence over linear orders with saturating successor.

    Instantiates tc_sentence with the edge y = S(S(x)), start constant 0
    and forbidden endpoint e.
    """
    psi = Equality(Name("y"), App("S", (App("S", (Name("x"),)),)))
    return tc_sentence(psi, ("0",), ("e",), ("x",), ("y",))


# ---------------------------------------------------------------------------
# Existential second-order bridge


@dataclass(frozen=True)
class SOSymbol:
    kind: str  # "relation" | "function"
    name: str
    arity: int


@dataclass
class ESOFormula:
    """An ESO sentence with one free relation symbol holding the team."""

    free_relation: str
    free_arity: int
    prefix: list  # of SOSymbol, quantified left to right
    matrix: object  # FO formula over the extended signature
    # Optional per-symbol search guards: name -> (var tuple, FO formula).
    # Tuples outside a relation's guard extension provably never affect
    # the matrix, so enumeration may be restricted to guard tuples.
    guards: dict = field(default_factory=dict)


class _EsoBuilder:
    def __init__(self, free_relation, vs, avoid):
        self.free_relation = free_relation
        self.prefix = []
        self.guards = {}
        self.constraints = []
        self.rel_counter = 0
        self.used = set(avoid) | set(vs)

    def fresh_rel(self, arity, guard):
        self.rel_counter += 1
        name = "W%d" % self.rel_counter
        self.prefix.append(SOSymbol("relation", name, arity))
        self.guards[name] = guard
        return name

    def fresh_vars(self, count):
        out = fresh_vars(count, self.used)
        self.used.update(out)
        return out

    def require(self, constraint):
        self.constraints.append(constraint)


def _membership_subst(mu, mapping):
    return substitute(mu, mapping)


def ie_to_eso(phi, vs, free_relation="A"):
    """Build Phi(A) with: M sat_X phi (lax)  iff  Phi holds with A := X(vs).

    The construction threads a membership formula mu(v...) describing the
    current team through the syntax tree: disjunctions quantify two
    covering subrelations, existentials a witness relation pairing each
    row with its chosen values, universals rebind the column directly.
    """
    vs = tuple(vs)
    missing = free_names(phi) - set(vs)
    if missing:
        raise TranslateError("free variables outside the team tuple: %s"
                             % ", ".join(sorted(missing)))
    builder = _EsoBuilder(free_relation, vs, _all_names(phi))

    def rel_args(variables):
        return tuple(Name(v) for v in variables)

    def go(sub, mu, variables):
        if isinstance(sub, LITERALS):
            builder.require(forall_block(
                variables, Or(negate_nnf(mu), sub)))
            return
        if isinstance(sub, InclAtom):
            if not sub.left:
                return
            primed = builder.fresh_vars(len(variables))
            ren = {v: Name(p) for v, p in zip(variables, primed)}
            mu2 = _membership_subst(mu, ren)
            t2p = tuple(substitute_term(t, ren) for t in sub.right)
            match = conjoin([Equality(a, b) for a, b in zip(t2p, sub.left)])
            builder.require(forall_block(
                variables,
                Or(negate_nnf(mu), exists_block(primed, And(mu2, match)))))
            return
        if isinstance(sub, ExclAtom):
            primed = builder.fresh_vars(len(variables))
            ren = {v: Name(p) for v, p in zip(variables, primed)}
            mu2 = _membership_subst(mu, ren)
            t2p = tuple(substitute_term(t, ren) for t in sub.right)
            differ = disjoin([Equality(a, b, positive=False)
                              for a, b in zip(sub.left, t2p)])
            builder.require(forall_block(
                list(variables) + primed,
                disjoin([negate_nnf(mu), negate_nnf(mu2), differ])))
            return
        if isinstance(sub, And):
            go(sub.left, mu, variables)
            go(sub.right, mu, variables)
            return
        if isinstance(sub, Or):
            parts = []
            for branch in (sub.left, sub.right):
                name = builder.fresh_rel(len(variables), (variables, mu))
                parts.append((branch, RelAtom(name, rel_args(variables))))
            builder.require(forall_block(
                variables,
                disjoin([negate_nnf(mu)] + [atom for _b, atom in parts])))
            for branch, atom in parts:
                go(branch, And(mu, atom), variables)
            return
        if isinstance(sub, Exists):
            x = sub.var
            if x not in variables:
                wvars = variables + (x,)
                name = builder.fresh_rel(len(wvars), (wvars, mu))
                builder.require(forall_block(
                    variables,
                    Or(negate_nnf(mu),
                       Exists(x, RelAtom(name, rel_args(wvars))))))
                go(sub.body, And(mu, RelAtom(name, rel_args(wvars))),
                   wvars)
                return
            # Overwrite: the witness relation pairs each old row (with
            # its old x value) with the new x values chosen for it.
            old, xn = builder.fresh_vars(2)
            name = builder.fresh_rel(len(variables) + 1,
                                     (variables + (xn,), mu))
            builder.require(forall_block(
                variables,
                Or(negate_nnf(mu),
                   Exists(xn, RelAtom(name, rel_args(variables) + (Name(xn),))))))
            # Membership after the overwrite: some old value of x connects
            # the surviving coordinates to the new one through the witness.
            args_old = tuple(Name(old) if v == x else Name(v) for v in variables)
            mu_old = _membership_subst(mu, {x: Name(old)})
            mu2 = Exists(old, And(mu_old, RelAtom(name, args_old + (Name(x),))))
            go(sub.body, mu2, variables)
            return
        if isinstance(sub, Forall):
            x = sub.var
            if x not in variables:
                go(sub.body, mu, variables + (x,))
                return
            old = builder.fresh_vars(1)[0]
            mu2 = Exists(old, _membership_subst(mu, {x: Name(old)}))
            go(sub.body, mu2, variables)
            return
        raise TranslateError("cannot translate %s to ESO" % render(sub))

    mu0 = RelAtom(free_relation, tuple(Name(v) for v in vs))
    go(phi, mu0, vs)
    matrix = conjoin(builder.constraints) if builder.constraints \
        else Equality(Name(vs[0]) if vs else Name("0"), Name(vs[0]) if vs else Name("0"))
    return ESOFormula(free_relation, len(vs), builder.prefix, matrix,
                      builder.guards)


# ---------------------------------------------------------------------------
# Brute-force ESO evaluation


def _so_symbols_in(phi, names):
    """Which of the given symbol names occur in a formula."""
    found = set()

    def walk_term(t):
        if isinstance(t, App):
            if t.func in names:
                found.add(t.func)
            for a in t.args:
                walk_term(a)

    def walk(sub):
        if isinstance(sub, RelAtom):
            if sub.name in names:
                found.add(sub.name)
            for t in sub.args:
                walk_term(t)
        elif isinstance(sub, Equality):
            walk_term(sub.left)
            walk_term(sub.right)
        elif isinstance(sub, (And, Or)):
            walk(sub.left)
            walk(sub.right)
        elif isinstance(sub, (Exists, Forall)):
            walk(sub.body)
        else:
            raise TranslateError("non-FO material in an ESO matrix")

    walk(phi)
    return found


def eval_eso(model, eso, a, budget=None):
    """Exhaustively search prefix interpretations making the matrix true.

    Relations with a declared guard are enumerated over guard-satisfying
    tuples only; tuples outside the guard never influence the matrix by
    construction of ie_to_eso.  Matrix conjuncts are checked as soon as
    all their symbols are interpreted.
    """
    from .model import Assignment
    from .semantics import flatten_and
    budget = budget or Budget()
    nodes = [0]

    def tick():
        nodes[0] += 1
        if nodes[0] > budget.max_nodes:
            raise BudgetExceeded(nodes[0])

    base = model.with_relation(eso.free_relation, a)
    conjuncts = flatten_and(eso.matrix)
    names = [sym.name for sym in eso.prefix]
    name_pos = {name: i for i, name in enumerate(names)}
    # Check each conjunct right after its last-quantified symbol.
    checkpoint = {i: [] for i in range(len(names))}
    upfront = []
    for c in conjuncts:
        used = _so_symbols_in(c, set(names))
        if used:
            checkpoint[max(name_pos[n] for n in used)].append(c)
        else:
            upfront.append(c)
    empty = Assignment({})
    if any(not tarski(base, empty, c) for c in upfront):
        return False

    def assign(k, current):
        if k == len(eso.prefix):
            return True
        sym = eso.prefix[k]
        checks = checkpoint[k]
        if sym.kind == "relation":
            guard = eso.guards.get(sym.name)
            if guard is not None:
                gvars, gformula = guard
                candidates = [t for t in itertools.product(model.domain,
                                                           repeat=sym.arity)
                              if tarski(current, Assignment(dict(zip(gvars, t))),
                                        gformula)]
            else:
                candidates = list(itertools.product(model.domain,
                                                    repeat=sym.arity))
            for size in range(len(candidates) + 1):
                for rows in itertools.combinations(candidates, size):
                    tick()
                    nxt = current.with_relation(sym.name, rows)
                    if all(tarski(nxt, empty, c) for c in checks) \
                            and assign(k + 1, nxt):
                        return True
            return False
        keys = list(itertools.product(model.domain, repeat=sym.arity))
        for values in itertools.product(model.domain, repeat=len(keys)):
            tick()
            nxt = current.with_function(sym.name, dict(zip(keys, values)))
            if all(tarski(nxt, empty, c) for c in checks) and assign(k + 1, nxt):
                return True
        return False

    return assign(0, base)


def format_eso(eso):
    """Line-oriented text for an ESO sentence, stable across runs."""
    lines = ["free relation %s/%d" % (eso.free_relation, eso.free_arity)]
    for sym in eso.prefix:
        lines.append("exists %s %s/%d" % (sym.kind, sym.name, sym.arity))
    lines.append("matrix: %s" % render(eso.matrix))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Skolem-style second-order normal forms


@dataclass
class SkolemNF:
    """A normal form ∃f1..fn ∀x⃗y⃗ ((A x⃗ ↔ f1(x⃗)=f2(x⃗)) ∧ psi).

    psi is quantifier-free FO over x⃗, y⃗ and the fixed applications
    fi(w⃗i); the first two functions both take exactly x⃗.
    """

    a_arity: int
    xvars: tuple
    yvars: tuple
    functions: list  # of (name, argument-variable tuple)
    psi: object

    def __post_init__(self):
        self.xvars = tuple(self.xvars)
        self.yvars = tuple(self.yvars)
        self.functions = [(name, tuple(ws)) for name, ws in self.functions]
        if len(self.functions) < 2:
            raise TranslateError("normal form needs at least two functions")
        if self.functions[0][1] != self.xvars or self.functions[1][1] != self.xvars:
            raise TranslateError("the first two functions must take the x-tuple")
        if self.a_arity != len(self.xvars):
            raise TranslateError("relation arity must match the x-tuple")
        allowed = set(self.xvars) | set(self.yvars)
        for _name, ws in self.functions:
            if not set(ws) <= allowed:
                raise TranslateError("function arguments outside the quantified tuple")


def _replace_apps(phi, mapping):
    """Replace function applications f(...) by terms, keyed on f's name."""

    def fix_term(t):
        if isinstance(t, App):
            if t.func in mapping:
                return mapping[t.func]
            return App(t.func, tuple(fix_term(a) for a in t.args))
        return t

    if isinstance(phi, RelAtom):
        return RelAtom(phi.name, tuple(fix_term(t) for t in phi.args), phi.positive)
    if isinstance(phi, Equality):
        return Equality(fix_term(phi.left), fix_term(phi.right), phi.positive)
    if isinstance(phi, (And, Or)):
        return type(phi)(_replace_apps(phi.left, mapping),
                         _replace_apps(phi.right, mapping))
    if isinstance(phi, (Exists, Forall)):
        return type(phi)(phi.var, _replace_apps(phi.body, mapping))
    raise TranslateError("psi must be first order")


def skolemnf_to_ie(nf, vs, expand_deps=False):
    """The team-logic equivalent of a normal-form ESO sentence.

    Output: ∀x⃗y⃗ ∃z⃗ (⋀i dep(w⃗i, zi) ∧ ((v⃗ ⊆ x⃗ ∧ z1 = z2) ∨
    (v⃗ | x⃗ ∧ z1 ≠ z2)) ∧ psi[fi(w⃗i) := zi]); the equivalence with the
    source sentence holds over nonempty teams.
    """
    vs = tuple(vs)
    if len(vs) != nf.a_arity:
        raise TranslateError("team tuple width must match the relation arity")
    avoid = set(vs) | set(nf.xvars) | set(nf.yvars) | _all_names(nf.psi)
    quantified = list(nf.xvars) + list(nf.yvars)
    renames = _fresh(len(quantified) + len(nf.functions), avoid)
    fresh_xy = renames[:len(quantified)]
    zs = renames[len(quantified):]
    ren = {old: Name(new) for old, new in zip(quantified, fresh_xy)}
    xterms = tuple(ren[x] for x in nf.xvars)
    psi = substitute(_replace_apps(nf.psi,
                                   {name: Name(z)
                                    for (name, _ws), z in zip(nf.functions, zs)}),
                     ren)
    deps = []
    for (name, ws), z in zip(nf.functions, zs):
        wterms = tuple(ren[w] for w in ws)
        deps.append(DepAtom(wterms + (Name(z),)))
    if expand_deps:
        deps = [dep_to_exc(d.args, avoid=avoid | set(renames)) for d in deps]
    vterms = tuple(Name(v) for v in vs)
    # The inclusion side collects the rows whose x values name team tuples,
    # so the membership test must read "x values among the team values".
    equalizer = Or(And(InclAtom(xterms, vterms),
                       Equality(Name(zs[0]), Name(zs[1]))),
                   And(ExclAtom(xterms, vterms),
                       Equality(Name(zs[0]), Name(zs[1]), positive=False)))
    body = conjoin(deps + [equalizer, psi])
    return forall_block(fresh_xy, exists_block(zs, body))


def skolemnf_to_eso(nf):
    """The source sentence of a normal form, for brute-force cross-checks."""
    xterms = tuple(Name(x) for x in nf.xvars)
    f1, f2 = nf.functions[0][0], nf.functions[1][0]
    eq = Equality(App(f1, xterms), App(f2, xterms))
    a_atom = RelAtom("A", xterms)
    bicond = And(Or(RelAtom("A", xterms, positive=False), eq),
                 Or(a_atom, Equality(App(f1, xterms), App(f2, xterms),
                                     positive=False)))
    matrix = forall_block(list(nf.xvars) + list(nf.yvars), And(bicond, nf.psi))
    prefix = [SOSymbol("function", name, len(ws)) for name, ws in nf.functions]
    return ESOFormula("A", nf.a_arity, prefix, matrix, {})


def parse_skolemnf(text):
    """Parse the block syntax 'A/k ; x: ... ; y: ... ; f: ... ; psi: ...'.

    Example: "A/1 ; x: u ; y: ; f1: u ; f2: u ; psi: f1(u) = f2(u)".
    Function segments list the argument variables after the name.
    """
    from .syntax import parse
    segments = [seg.strip() for seg in text.split(";")]
    if len(segments) < 5:
        raise TranslateError("normal form needs A/k, x, y, functions and psi")
    m = re.fullmatch(r"A/(\d+)", segments[0])
    if not m:
        raise TranslateError("first segment must be A/<arity>")
    a_arity = int(m.group(1))
    xvars = yvars = None
    functions = []
    psi = None
    for seg in segments[1:]:
        key, _, rest = seg.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "x":
            xvars = tuple(rest.split())
        elif key == "y":
            yvars = tuple(rest.split())
        elif key == "psi":
            psi = parse(rest)
        else:
            functions.append((key, tuple(rest.split())))
    if xvars is None or yvars is None or psi is None:
        raise TranslateError("missing x, y or psi segment")
    if not is_first_order(psi):
        raise TranslateError("psi must be first order")
    return SkolemNF(a_arity, xvars, yvars, functions, psi)
