"""Single-field perturbations of JSON documents."""

import copy
from fractions import Fraction


def _perturb(value):
    if isinstance(value, bool):
        return not value
    if isinstance(value, int):
        return value + 1
    if isinstance(value, float):
        return value * 1.5 + 1
    if isinstance(value, str):
        try:
            return str(Fraction(value) + 1)
        except ValueError:
            return value + " + 1" if any(c.isalpha() for c in value) else value + "1"
    if value is None:
        return 0
    raise TypeError(type(value))


def _leaves(doc, path=()):
    if isinstance(doc, dict):
        for k, v in doc.items():
            yield from _leaves(v, path + (k,))
    elif isinstance(doc, list):
        # lists are also perturbed as a whole: one extra element
        yield path, "append"
        for i, v in enumerate(doc):
            yield from _leaves(v, path + (i,))
    else:
        yield path, "leaf"


def mutations(doc):
    """Yield ``(path, mutated_document)`` for every single-field perturbation."""
    for path, kind in _leaves(doc):
        bad = copy.deepcopy(doc)
        node = bad
        for key in path[:-1]:
            node = node[key]
        if kind == "append":
            target = node[path[-1]] if path else bad
            target.append(copy.deepcopy(target[-1]) if target else "x")
        else:
            node[path[-1]] = _perturb(node[path[-1]])
        yield path, bad
