"""Finite structures, assignments and teams.

Domain elements are strings throughout, so that JSON round trips are
exact and element names like "0" need no special casing.
"""

import itertools
import json

from .syntax import Name, App


class ModelError(ValueError):
    pass


class Model:
    """A finite structure: domain, constants, functions and relations.

    Functions are given as total maps from argument tuples to elements;
    relations as sets of tuples.  A domain with fewer than two elements
    is rejected unless allow_unit_domain is set, since many of the
    operators collapse trivially there.
    """

    def __init__(self, domain, constants=None, functions=None, relations=None,
                 allow_unit_domain=False):
        self.domain = tuple(sorted(set(domain)))
        self.constants = dict(constants or {})
        self.functions = {name: dict(table) for name, table in (functions or {}).items()}
        self.relations = {name: frozenset(tuple(row) for row in rows)
                          for name, rows in (relations or {}).items()}
        self._validate(allow_unit_domain)

    def _validate(self, allow_unit_domain):
        if not self.domain:
            raise ModelError("empty domain")
        if len(self.domain) < 2 and not allow_unit_domain:
            raise ModelError("domain must have at least two elements")
        dom = set(self.domain)
        for name, value in self.constants.items():
            if value not in dom:
                raise ModelError("constant %s maps outside the domain" % name)
        for name, table in self.functions.items():
            arities = {len(args) for args in table}
            if len(arities) != 1:
                raise ModelError("function %s has mixed arities" % name)
            arity = arities.pop()
            if len(table) != len(self.domain) ** arity:
                raise ModelError("function %s is not total" % name)
            for args, value in table.items():
                if any(a not in dom for a in args) or value not in dom:
                    raise ModelError("function %s maps outside the domain" % name)
        for name, rows in self.relations.items():
            arities = {len(row) for row in rows}
            if len(arities) > 1:
                raise ModelError("relation %s has mixed arities" % name)
            for row in rows:
                if any(a not in dom for a in row):
                    raise ModelError("relation %s contains non-domain elements" % name)

    def function_value(self, name, args):
        try:
            return self.functions[name][tuple(args)]
        except KeyError:
            raise ModelError("no value for %s(%s)" % (name, ", ".join(args)))

    def relation_rows(self, name):
        if name not in self.relations:
            raise ModelError("unknown relation %s" % name)
        return self.relations[name]

    def with_relation(self, name, rows):
        """A copy of the model with one relation added or replaced."""
        relations = dict(self.relations)
        relations[name] = frozenset(tuple(row) for row in rows)
        return Model(self.domain, self.constants, self.functions, relations,
                     allow_unit_domain=True)

    def with_function(self, name, table):
        """A copy of the model with one total function added or replaced."""
        functions = dict(self.functions)
        functions[name] = dict(table)
        return Model(self.domain, self.constants, functions, self.relations,
                     allow_unit_domain=True)

    def to_json_dict(self):
        return {
            "domain": list(self.domain),
            "constants": dict(self.constants),
            "functions": {
                name: {",".join(args): value for args, value in sorted(table.items())}
                for name, table in self.functions.items()
            },
            "relations": {
                name: sorted(list(row) for row in rows)
                for name, rows in self.relations.items()
            },
        }

    @classmethod
    def from_json_dict(cls, data, allow_unit_domain=False):
        functions = {}
        for name, table in (data.get("functions") or {}).items():
            functions[name] = {tuple(key.split(",")) if key else (): value
                               for key, value in table.items()}
        return cls(
            data["domain"],
            data.get("constants"),
            functions,
            data.get("relations"),
            allow_unit_domain=allow_unit_domain,
        )

    @classmethod
    def load(cls, path, allow_unit_domain=False):
        with open(path) as handle:
            return cls.from_json_dict(json.load(handle), allow_unit_domain)


class Assignment:
    """An immutable variable assignment."""

    __slots__ = ("_items", "_hash")

    def __init__(self, mapping):
        if isinstance(mapping, Assignment):
            self._items = mapping._items
        else:
            self._items = tuple(sorted(dict(mapping).items()))
        self._hash = hash(self._items)

    def __getitem__(self, var):
        for key, value in self._items:
            if key == var:
                return value
        raise KeyError(var)

    def __contains__(self, var):
        return any(key == var for key, _ in self._items)

    def get(self, var, default=None):
        for key, value in self._items:
            if key == var:
                return value
        return default

    def variables(self):
        return tuple(key for key, _ in self._items)

    def items(self):
        return self._items

    def as_dict(self):
        return dict(self._items)

    def extended(self, var, value):
        out = dict(self._items)
        out[var] = value
        return Assignment(out)

    def restricted(self, variables):
        keep = set(variables)
        return Assignment({k: v for k, v in self._items if k in keep})

    def values_for(self, variables):
        return tuple(self[v] for v in variables)

    def __eq__(self, other):
        return isinstance(other, Assignment) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Assignment(%s)" % ", ".join("%s=%s" % kv for kv in self._items)


def eval_term(model, assignment, term):
    """The value of a term under an assignment.

    A bare identifier is looked up in the assignment first and in the
    model's constants second, so variables shadow constants of the same
    name.
    """
    if isinstance(term, Name):
        value = assignment.get(term.ident)
        if value is not None:
            return value
        if term.ident in model.constants:
            return model.constants[term.ident]
        raise ModelError("unbound identifier %r" % term.ident)
    if isinstance(term, App):
        args = tuple(eval_term(model, assignment, a) for a in term.args)
        return model.function_value(term.func, args)
    raise TypeError("not a term: %r" % (term,))


class Team:
    """A set of assignments sharing a variable domain."""

    def __init__(self, variables, rows):
        self.variables = tuple(variables)
        frozen = []
        var_set = set(self.variables)
        for row in rows:
            if not isinstance(row, Assignment):
                row = Assignment(row)
            if set(row.variables()) != var_set:
                raise ModelError("row domain %s does not match team domain %s"
                                 % (row.variables(), self.variables))
            frozen.append(row)
        self.rows = frozenset(frozen)

    @classmethod
    def from_tuples(cls, variables, tuples):
        variables = tuple(variables)
        return cls(variables, [dict(zip(variables, values)) for values in tuples])

    def sorted_rows(self):
        return sorted(self.rows, key=lambda s: s.values_for(self.variables))

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.sorted_rows())

    def __eq__(self, other):
        return (isinstance(other, Team)
                and set(self.variables) == set(other.variables)
                and self.rows == other.rows)

    def __hash__(self):
        return hash((frozenset(self.variables), self.rows))

    def __repr__(self):
        rows = [row.values_for(self.variables) for row in self.sorted_rows()]
        return "Team(%s, %s)" % (list(self.variables), rows)

    def with_rows(self, rows):
        return Team(self.variables, rows)

    def restrict(self, variables):
        variables = tuple(variables)
        return Team(variables, {row.restricted(variables) for row in self.rows})

    def extend_universal(self, var, domain):
        """X[M/x]: every row duplicated with every value for x."""
        variables = self.variables if var in self.variables else self.variables + (var,)
        rows = {row.extended(var, value) for row in self.rows for value in domain}
        return Team(variables, rows)

    def extend_function(self, var, choice):
        """X[F/x] for a choice function mapping each row to one value."""
        variables = self.variables if var in self.variables else self.variables + (var,)
        rows = {row.extended(var, choice[row]) for row in self.rows}
        return Team(variables, rows)

    def extend_multifunction(self, var, choice):
        """X[H/x] for a map from rows to nonempty value sets."""
        variables = self.variables if var in self.variables else self.variables + (var,)
        rows = set()
        for row in self.rows:
            values = choice[row]
            if not values:
                raise ModelError("empty value set in team extension")
            for value in values:
                rows.add(row.extended(var, value))
        return Team(variables, rows)

    def relation(self, model, terms):
        """X(t1 ... tk): the set of term-value tuples over the team."""
        return {tuple(eval_term(model, row, t) for t in terms) for row in self.rows}

    def to_json_dict(self):
        return {
            "vars": list(self.variables),
            "rows": [list(row.values_for(self.variables)) for row in self.sorted_rows()],
        }

    @classmethod
    def from_json_dict(cls, data):
        return cls.from_tuples(data["vars"], data["rows"])

    @classmethod
    def load(cls, path):
        with open(path) as handle:
            return cls.from_json_dict(json.load(handle))


def enumerate_teams(model, variables, max_rows=None, min_rows=0):
    """Every team over the model's domain, by increasing row count."""
    return all_teams(variables, model.domain, max_rows, min_rows)


def all_teams(variables, domain, max_rows=None, min_rows=0):
    """Every team over the given variables, by increasing row count."""
    variables = tuple(variables)
    rows = [Assignment(dict(zip(variables, values)))
            for values in itertools.product(domain, repeat=len(variables))]
    top = len(rows) if max_rows is None else min(max_rows, len(rows))
    for size in range(min_rows, top + 1):
        for chosen in itertools.combinations(rows, size):
            yield Team(variables, chosen)
