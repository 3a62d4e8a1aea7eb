"""Abstract syntax, parser and renderer for team-logic formulas.

The concrete syntax is plain ASCII:

    formula := disj
    disj    := conj ("\\/" conj)*
    conj    := unit ("/\\" unit)*
    unit    := ("exists" | "forall") IDENT+ "." unit
             | "(" formula ")"
             | atom
    atom    := "~"? IDENT "(" termlist ")"
             | term ("=" | "!=") term
             | "dep" "(" termlist ")"
             | "indep" "(" termlist ";" termlist ";" termlist ")"
             | "incl" "(" termlist ";" termlist ")"
             | "excl" "(" termlist ";" termlist ")"
             | "equi" "(" termlist ";" termlist ")"
    term    := IDENT | IDENT "(" termlist ")"

Identifiers are runs of [A-Za-z0-9_], so "0" is a legal constant name.
Whether a bare identifier in term position denotes a variable or a
constant is resolved against the structure at evaluation time, not at
parse time.  "\\/" binds looser than "/\\"; both associate to the left.
Formulas are kept in negation normal form: "~" is only accepted on
relation atoms, and "!=" is the negation of "=".
"""

from dataclasses import dataclass
import re


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Name:
    """A bare identifier: a variable or a constant, resolved at evaluation."""

    ident: str

    def __str__(self):
        return self.ident


@dataclass(frozen=True)
class App:
    """A function application f(t1, ..., tk)."""

    func: str
    args: tuple

    def __str__(self):
        return "%s(%s)" % (self.func, ", ".join(str(a) for a in self.args))


def term_names(term):
    """All identifiers occurring at leaf position in a term."""
    if isinstance(term, Name):
        return {term.ident}
    out = set()
    for a in term.args:
        out |= term_names(a)
    return out


def substitute_term(term, mapping):
    if isinstance(term, Name):
        return mapping.get(term.ident, term)
    return App(term.func, tuple(substitute_term(a, mapping) for a in term.args))


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class RelAtom:
    name: str
    args: tuple
    positive: bool = True


@dataclass(frozen=True)
class Equality:
    left: object
    right: object
    positive: bool = True


@dataclass(frozen=True)
class DepAtom:
    """dep(t1, ..., tn): the value of tn is a function of t1 ... tn-1."""

    args: tuple


@dataclass(frozen=True)
class IndepAtom:
    """indep(c; a; b): fixing the c-values, a-values and b-values vary freely."""

    cond: tuple
    left: tuple
    right: tuple


@dataclass(frozen=True)
class InclAtom:
    left: tuple
    right: tuple


@dataclass(frozen=True)
class ExclAtom:
    left: tuple
    right: tuple


@dataclass(frozen=True)
class EquiAtom:
    left: tuple
    right: tuple


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


LITERALS = (RelAtom, Equality)
TEAM_ATOMS = (DepAtom, IndepAtom, InclAtom, ExclAtom, EquiAtom)
ATOMS = LITERALS + TEAM_ATOMS


def atom_term_tuples(phi):
    """The tuples of terms appearing in an atomic formula."""
    if isinstance(phi, RelAtom):
        return (phi.args,)
    if isinstance(phi, Equality):
        return ((phi.left,), (phi.right,))
    if isinstance(phi, DepAtom):
        return (phi.args,)
    if isinstance(phi, IndepAtom):
        return (phi.cond, phi.left, phi.right)
    if isinstance(phi, (InclAtom, ExclAtom, EquiAtom)):
        return (phi.left, phi.right)
    raise TypeError("not an atom: %r" % (phi,))


def free_names(phi):
    """Free identifiers of a formula (variables and constants alike)."""
    if isinstance(phi, ATOMS):
        out = set()
        for tup in atom_term_tuples(phi):
            for t in tup:
                out |= term_names(t)
        return out
    if isinstance(phi, (And, Or)):
        return free_names(phi.left) | free_names(phi.right)
    if isinstance(phi, (Exists, Forall)):
        return free_names(phi.body) - {phi.var}
    raise TypeError("not a formula: %r" % (phi,))


def free_variables(phi, constants=()):
    """Free variables: free identifiers minus the given constant names."""
    return free_names(phi) - set(constants)


def fresh_vars(count, avoid):
    """Deterministically named fresh variables _v0, _v1, ... avoiding a set."""
    avoid = set(avoid)
    out = []
    i = 0
    while len(out) < count:
        cand = "_v%d" % i
        if cand not in avoid:
            out.append(cand)
            avoid.add(cand)
        i += 1
    return out


def substitute(phi, mapping):
    """Replace free identifiers by terms.

    The caller must make sure no substituted term gets captured by a
    quantifier; translations only substitute fresh variables, where this
    holds by construction.
    """
    if not mapping:
        return phi
    sub = lambda t: substitute_term(t, mapping)
    subs = lambda ts: tuple(sub(t) for t in ts)
    if isinstance(phi, RelAtom):
        return RelAtom(phi.name, subs(phi.args), phi.positive)
    if isinstance(phi, Equality):
        return Equality(sub(phi.left), sub(phi.right), phi.positive)
    if isinstance(phi, DepAtom):
        return DepAtom(subs(phi.args))
    if isinstance(phi, IndepAtom):
        return IndepAtom(subs(phi.cond), subs(phi.left), subs(phi.right))
    if isinstance(phi, InclAtom):
        return InclAtom(subs(phi.left), subs(phi.right))
    if isinstance(phi, ExclAtom):
        return ExclAtom(subs(phi.left), subs(phi.right))
    if isinstance(phi, EquiAtom):
        return EquiAtom(subs(phi.left), subs(phi.right))
    if isinstance(phi, And):
        return And(substitute(phi.left, mapping), substitute(phi.right, mapping))
    if isinstance(phi, Or):
        return Or(substitute(phi.left, mapping), substitute(phi.right, mapping))
    if isinstance(phi, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        for t in inner.values():
            if phi.var in term_names(t):
                raise ValueError("substitution would capture %r" % phi.var)
        body = substitute(phi.body, inner)
        return type(phi)(phi.var, body)
    raise TypeError("not a formula: %r" % (phi,))


def subformula_instances(phi, path=()):
    """All subformula occurrences, each tagged with its tree path.

    The path is a tuple of child indices from the root, so distinct
    occurrences of a repeated subformula get distinct tags.
    """
    yield path, phi
    if isinstance(phi, (And, Or)):
        yield from subformula_instances(phi.left, path + (0,))
        yield from subformula_instances(phi.right, path + (1,))
    elif isinstance(phi, (Exists, Forall)):
        yield from subformula_instances(phi.body, path + (0,))


def is_first_order(phi):
    if isinstance(phi, LITERALS):
        return True
    if isinstance(phi, TEAM_ATOMS):
        return False
    if isinstance(phi, (And, Or)):
        return is_first_order(phi.left) and is_first_order(phi.right)
    return is_first_order(phi.body)


def negate_nnf(phi):
    """Negation of a first order formula, kept in negation normal form."""
    if isinstance(phi, RelAtom):
        return RelAtom(phi.name, phi.args, not phi.positive)
    if isinstance(phi, Equality):
        return Equality(phi.left, phi.right, not phi.positive)
    if isinstance(phi, And):
        return Or(negate_nnf(phi.left), negate_nnf(phi.right))
    if isinstance(phi, Or):
        return And(negate_nnf(phi.left), negate_nnf(phi.right))
    if isinstance(phi, Exists):
        return Forall(phi.var, negate_nnf(phi.body))
    if isinstance(phi, Forall):
        return Exists(phi.var, negate_nnf(phi.body))
    raise ValueError("cannot negate a non first order formula: %s" % render(phi))


def conjoin(parts):
    """Left-nested conjunction of one or more formulas."""
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjoin(parts):
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def exists_block(variables, body):
    for v in reversed(list(variables)):
        body = Exists(v, body)
    return body


def forall_block(variables, body):
    for v in reversed(list(variables)):
        body = Forall(v, body)
    return body


# ---------------------------------------------------------------------------
# Rendering


def _render_terms(terms):
    return ", ".join(str(t) for t in terms)


def render(phi):
    """Concrete syntax for a formula; parse(render(phi)) == phi."""
    return _render_disj(phi)


def _render_disj(phi):
    if isinstance(phi, Or):
        return "%s \\/ %s" % (_render_disj(phi.left), _render_conj(phi.right))
    return _render_conj(phi)


def _render_conj(phi):
    if isinstance(phi, Or):
        return "(%s)" % _render_disj(phi)
    if isinstance(phi, And):
        return "%s /\\ %s" % (_render_conj(phi.left), _render_unit(phi.right))
    return _render_unit(phi)


def _render_unit(phi):
    if isinstance(phi, (Exists, Forall)):
        word = "exists" if isinstance(phi, Exists) else "forall"
        names = [phi.var]
        body = phi.body
        while isinstance(body, type(phi)):
            names.append(body.var)
            body = body.body
        if isinstance(body, (And, Or)):
            tail = "(%s)" % _render_disj(body)
        else:
            tail = _render_unit(body)
        return "%s %s . %s" % (word, " ".join(names), tail)
    if isinstance(phi, (And, Or)):
        return "(%s)" % _render_disj(phi)
    return _render_atom(phi)


def _render_atom(phi):
    if isinstance(phi, RelAtom):
        sign = "" if phi.positive else "~"
        return "%s%s(%s)" % (sign, phi.name, _render_terms(phi.args))
    if isinstance(phi, Equality):
        op = "=" if phi.positive else "!="
        return "%s %s %s" % (phi.left, op, phi.right)
    if isinstance(phi, DepAtom):
        return "dep(%s)" % _render_terms(phi.args)
    if isinstance(phi, IndepAtom):
        return "indep(%s ; %s ; %s)" % (
            _render_terms(phi.cond),
            _render_terms(phi.left),
            _render_terms(phi.right),
        )
    if isinstance(phi, InclAtom):
        return "incl(%s ; %s)" % (_render_terms(phi.left), _render_terms(phi.right))
    if isinstance(phi, ExclAtom):
        return "excl(%s ; %s)" % (_render_terms(phi.left), _render_terms(phi.right))
    if isinstance(phi, EquiAtom):
        return "equi(%s ; %s)" % (_render_terms(phi.left), _render_terms(phi.right))
    raise TypeError("not a formula: %r" % (phi,))


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(\\/|/\\|!=|=|~|\.|\(|\)|,|;|[A-Za-z0-9_]+)")

_KEYWORDS = {"exists", "forall"}
_ATOM_KEYWORDS = {"dep", "indep", "incl", "excl", "equi"}


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError("unexpected character at: %r" % rest[:20])
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.take()
        if got != tok:
            raise ParseError("expected %r, got %r" % (tok, got))

    def formula(self):
        out = self.conj()
        while self.peek() == "\\/":
            self.take()
            out = Or(out, self.conj())
        return out

    def conj(self):
        out = self.unit()
        while self.peek() == "/\\":
            self.take()
            out = And(out, self.unit())
        return out

    def unit(self):
        tok = self.peek()
        if tok in _KEYWORDS:
            self.take()
            names = []
            while self.peek() not in (".", None) and _is_ident(self.peek()):
                names.append(self.take())
            if not names:
                raise ParseError("quantifier without variables")
            self.expect(".")
            body = self.unit()
            cls = Exists if tok == "exists" else Forall
            for name in reversed(names):
                body = cls(name, body)
            return body
        if tok == "(":
            self.take()
            out = self.formula()
            self.expect(")")
            return out
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            name = self.take()
            if not _is_ident(name):
                raise ParseError("expected a relation name after '~', got %r" % name)
            if name in _ATOM_KEYWORDS:
                raise ParseError("%s atoms cannot be negated" % name)
            self.expect("(")
            args = self.termlist()
            self.expect(")")
            return RelAtom(name, args, positive=False)
        if tok in _ATOM_KEYWORDS:
            self.take()
            self.expect("(")
            if tok == "dep":
                args = self.termlist()
                self.expect(")")
                if not args:
                    raise ParseError("dep needs at least one term")
                return DepAtom(args)
            groups = [self.termlist()]
            while self.peek() == ";":
                self.take()
                groups.append(self.termlist())
            self.expect(")")
            if tok == "indep":
                if len(groups) != 3:
                    raise ParseError("indep needs three term groups")
                return IndepAtom(*groups)
            if len(groups) != 2:
                raise ParseError("%s needs two term groups" % tok)
            left, right = groups
            if len(left) != len(right):
                raise ParseError("%s needs term groups of equal width" % tok)
            cls = {"incl": InclAtom, "excl": ExclAtom, "equi": EquiAtom}[tok]
            return cls(left, right)
        # Either a relation atom or an (in)equality between terms.
        start = self.pos
        if not _is_ident(tok):
            raise ParseError("unexpected token %r" % tok)
        term = self.term()
        nxt = self.peek()
        if nxt in ("=", "!="):
            self.take()
            other = self.term()
            return Equality(term, other, positive=(nxt == "="))
        # A relation atom parses as an App term; reinterpret it.
        if isinstance(term, App):
            return RelAtom(term.func, term.args)
        self.pos = start
        raise ParseError("expected an atom at %r" % tok)

    def termlist(self):
        if self.peek() in (")", ";"):
            return ()
        terms = [self.term()]
        while self.peek() == ",":
            self.take()
            terms.append(self.term())
        return tuple(terms)

    def term(self):
        tok = self.take()
        if not _is_ident(tok) or tok in _KEYWORDS or tok in _ATOM_KEYWORDS:
            raise ParseError("expected a term, got %r" % tok)
        if self.peek() == "(":
            self.take()
            args = self.termlist()
            self.expect(")")
            return App(tok, args)
        return Name(tok)


def _is_ident(tok):
    return tok is not None and re.fullmatch(r"[A-Za-z0-9_]+", tok) is not None


@dataclass(frozen=True)
class Signature:
    """Optional arity declarations checked after parsing.

    functions and relations map names to arities; names not listed are
    accepted without a check, so a signature can be partial.
    """

    functions: tuple = ()
    relations: tuple = ()

    def check(self, phi):
        functions = dict(self.functions)
        relations = dict(self.relations)

        def check_term(term):
            if isinstance(term, App):
                if term.func in functions and functions[term.func] != len(term.args):
                    raise ParseError("function %s expects %d arguments"
                                     % (term.func, functions[term.func]))
                for a in term.args:
                    check_term(a)

        for _path, sub in subformula_instances(phi):
            if isinstance(sub, RelAtom):
                if sub.name in relations and relations[sub.name] != len(sub.args):
                    raise ParseError("relation %s expects %d arguments"
                                     % (sub.name, relations[sub.name]))
            if isinstance(sub, ATOMS):
                for tup in atom_term_tuples(sub):
                    for t in tup:
                        check_term(t)


def parse(text, sig=None):
    parser = _Parser(tokenize(text))
    out = parser.formula()
    if parser.peek() is not None:
        raise ParseError("trailing input at %r" % parser.peek())
    if sig is not None:
        sig.check(out)
    return out


def parse_term(text):
    parser = _Parser(tokenize(text))
    out = parser.term()
    if parser.peek() is not None:
        raise ParseError("trailing input at %r" % parser.peek())
    return out
