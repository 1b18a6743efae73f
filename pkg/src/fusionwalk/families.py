"""Standard fusion rings: group rings, free groups, lattices and SU(2).

SU(2) labels are doubled spins (``"1"`` is spin 1/2).  Free-group words use
lowercase letters for generators and uppercase for their inverses, with
``"1"`` for the empty word.  Truncated families carry a *window parameter*
(cutoff, radius or box half-width) that :meth:`FamilySpec.with_window`
rescales.
"""

import json
import math
from dataclasses import dataclass, field
from itertools import product as cartesian

import numpy as np

from .errors import InvalidSpec
from .ring import DimensionFunction, FusionRing

FAMILIES = ("group_table", "free_group", "integer_lattice", "su2_rep", "verlinde_su2", "product")

_WINDOW_PARAM = {"su2_rep": "cutoff", "free_group": "radius", "integer_lattice": "window"}


@dataclass(frozen=True)
class FamilySpec:
    """A family tag plus its parameters."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; choose from {FAMILIES}")

    @property
    def window_param(self):
        return _WINDOW_PARAM.get(self.family)

    @property
    def window(self):
        key = self.window_param
        return None if key is None else self.params.get(key)

    def with_window(self, value):
        key = self.window_param
        if key is None:
            raise InvalidSpec(f"family {self.family} has no window parameter")
        return FamilySpec(self.family, {**self.params, key: int(value)})

    def window_size(self):
        """Number of basis elements the built ring will have."""
        p = self.params
        if self.family == "su2_rep":
            return int(p["cutoff"]) + 1
        if self.family == "verlinde_su2":
            return int(p["level"]) + 1
        if self.family == "free_group":
            rank, radius = int(p["rank"]), int(p["radius"])
            if rank == 1:
                return 2 * radius + 1
            return 1 + 2 * rank * ((2 * rank - 1) ** radius - 1) // (2 * rank - 2)
        if self.family == "integer_lattice":
            return (2 * int(p["window"]) + 1) ** int(p.get("rank", 1))
        if self.family == "group_table":
            return len(_group_table(p))
        left, right = _sub_specs(p)
        return left.window_size() * right.window_size()

    def to_dict(self):
        params = {}
        for k, v in self.params.items():
            params[k] = v.to_dict() if isinstance(v, FamilySpec) else v
        return {"family": self.family, "params": params}

    @classmethod
    def from_dict(cls, data):
        params = dict(data.get("params", {}))
        for k in ("left", "right"):
            if isinstance(params.get(k), dict):
                params[k] = cls.from_dict(params[k])
        return cls(data["family"], params)

    @classmethod
    def parse(cls, text):
        """Parse ``family:key=value,...`` or a JSON object."""
        text = text.strip()
        if text.startswith("{"):
            return cls.from_dict(json.loads(text))
        family, _, rest = text.partition(":")
        return cls(family.strip(), parse_params(rest))

    def __str__(self):
        inner = ",".join(f"{k}={v}" for k, v in self.params.items() if not isinstance(v, FamilySpec))
        return f"{self.family}:{inner}" if inner else self.family


def parse_params(text):
    """``"k=3,rank=2"`` or a JSON object string -> dict."""
    text = (text or "").strip()
    if not text:
        return {}
    if text.startswith("{"):
        data = json.loads(text)
        return {k: FamilySpec.from_dict(v) if isinstance(v, dict) else v for k, v in data.items()}
    out = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidSpec(f"parameter {item!r} is not key=value")
        value = value.strip()
        try:
            out[key.strip()] = int(value)
        except ValueError:
            try:
                out[key.strip()] = float(value)
            except ValueError:
                out[key.strip()] = value
    return out


def _positive(p, key, minimum=1):
    try:
        value = int(p[key])
    except (KeyError, TypeError, ValueError):
        raise InvalidSpec(f"missing or non-integer parameter {key!r}") from None
    if value < minimum:
        raise InvalidSpec(f"{key} must be >= {minimum}, got {value}")
    return value


def _sub_specs(p):
    try:
        left, right = p["left"], p["right"]
    except KeyError:
        raise InvalidSpec("product needs 'left' and 'right' specs") from None
    if isinstance(left, dict):
        left = FamilySpec.from_dict(left)
    if isinstance(right, dict):
        right = FamilySpec.from_dict(right)
    return left, right


def _group_table(p):
    if "cyclic" in p:
        n = _positive(p, "cyclic")
        return [[(i + j) % n for j in range(n)] for i in range(n)]
    table = p.get("table")
    if not table:
        raise InvalidSpec("group_table needs 'table' or 'cyclic'")
    return [[int(x) for x in row] for row in table]


def group_ring(table, name="group"):
    """Group ring of a finite group given by its Cayley table on ``0..n-1``."""
    n = len(table)
    if any(len(row) != n for row in table) or any(not 0 <= x < n for row in table for x in row):
        raise InvalidSpec("Cayley table must be square with entries in 0..n-1")
    units = [e for e in range(n) if all(table[e][x] == x == table[x][e] for x in range(n))]
    if not units:
        raise InvalidSpec("Cayley table has no identity")
    e = units[0]
    inverse = {}
    for g in range(n):
        inv = [h for h in range(n) if table[g][h] == e]
        if len(inv) != 1 or table[inv[0]][g] != e:
            raise InvalidSpec(f"element {g} has no two-sided inverse")
        inverse[g] = inv[0]
    for a, b, c in cartesian(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise InvalidSpec(f"Cayley table is not associative at {(a, b, c)}")
    for row in table:
        if len(set(row)) != n:
            raise InvalidSpec("Cayley table rows must be permutations")
    labels = [str(g) for g in range(n)]
    coeffs = {(str(a), str(b)): {str(table[a][b]): 1} for a in range(n) for b in range(n)}
    return FusionRing(labels, str(e), {str(g): str(inverse[g]) for g in range(n)}, coeffs, name=name)


def _su2_terms(r, s):
    return range(abs(r - s), r + s + 1, 2)


def su2_rep(cutoff):
    """Representation ring of SU(2), truncated at doubled spin ``cutoff``."""
    if cutoff < 1:
        raise InvalidSpec("cutoff must be >= 1")
    labels = [str(n) for n in range(cutoff + 1)]

    def rule(r, s):
        r, s = int(r), int(s)
        row = {str(t): 1 for t in _su2_terms(r, s) if t <= cutoff}
        return row, r + s <= cutoff

    return FusionRing(labels, "0", {b: b for b in labels}, rule=rule,
                      interior=labels[: cutoff // 2 + 1], name=f"su2_rep(cutoff={cutoff})")


def verlinde_su2(level):
    """Level-``k`` Verlinde fusion ring of SU(2), labels ``0..k``."""
    if level < 1:
        raise InvalidSpec("level must be >= 1")
    k = level
    labels = [str(n) for n in range(k + 1)]
    coeffs = {}
    for r, s in cartesian(range(k + 1), repeat=2):
        row = {str(t): 1 for t in _su2_terms(r, s) if t <= 2 * k - r - s}
        if row:
            coeffs[(str(r), str(s))] = row
    return FusionRing(labels, "0", {b: b for b in labels}, coeffs, name=f"verlinde_su2(k={k})")


_FREE_LETTERS = "abcdfghijklmnopqrstuvwxyz"  # skips 'e'


def free_generators(rank):
    gens = _FREE_LETTERS[:rank]
    return list(gens) + [g.upper() for g in gens]


def free_group(rank, radius):
    """Group ring of the free group on ``rank`` letters, restricted to a ball."""
    if rank < 1 or rank > len(_FREE_LETTERS):
        raise InvalidSpec(f"rank must be in 1..{len(_FREE_LETTERS)}")
    if radius < 1:
        raise InvalidSpec("radius must be >= 1")
    letters = free_generators(rank)
    letter_pos = {g: i for i, g in enumerate(letters)}
    # breadth-first enumeration; the children of a word are contiguous
    words, parent, last, first_child = [""], [-1], [-1], {}
    frontier = [0]
    for _ in range(radius):
        nxt = []
        for i in frontier:
            w = words[i]
            first_child[i] = len(words)
            banned = w[-1:].swapcase()
            for g in letters:
                if g != banned:
                    nxt.append(len(words))
                    words.append(w + g)
                    parent.append(i)
                    last.append(letter_pos[g])
        frontier = nxt
    n = len(words)
    labels = [w or "1" for w in words]
    half = radius // 2
    parent = np.asarray(parent)
    last = np.asarray(last)
    child_start = np.full(n, -1)
    child_start[list(first_child)] = list(first_child.values())
    length = np.fromiter((len(w) for w in words), dtype=np.int64, count=n)

    def reduce(x, y):
        x = "" if x == "1" else x
        y = "" if y == "1" else y
        i = 0
        m = min(len(x), len(y))
        while i < m and x[-1 - i] == y[i].swapcase():
            i += 1
        return x[: len(x) - i] + y[i:]

    def rule(x, y):
        w = reduce(x, y)
        if len(w) > radius:
            return {}, False
        return {w or "1": 1}, True

    def gamma_hook(obj):
        if not all(g in letter_pos for g in obj):
            return None
        cols_all = np.arange(n)
        # letter that may not follow each word (none for the empty word)
        banned = np.where(last >= 0, (last + rank) % (2 * rank), 2 * rank)
        rows, cols, vals = [], [], []
        complete = np.ones(n, dtype=bool)
        for g, mult in obj.items():
            gi = letter_pos[g]
            back = last == (gi + rank) % (2 * rank)
            grow = ~back & (length < radius)
            target = np.full(n, -1)
            target[back] = parent[back]
            target[grow] = child_start[grow] + gi - (banned[grow] < gi)
            ok = target >= 0
            complete &= ok
            rows.append(target[ok])
            cols.append(cols_all[ok])
            vals.append(np.full(int(ok.sum()), mult))
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), complete

    def dual(w):
        return "1" if w == "1" else w[::-1].swapcase()

    return FusionRing(labels, "1", {w: dual(w) for w in labels}, rule=rule,
                      interior=[w or "1" for w in words if len(w) <= half],
                      name=f"free_group(rank={rank},radius={radius})", gamma_hook=gamma_hook)


def lattice_label(point):
    return ",".join(str(x) for x in point)


def integer_lattice(rank, window):
    """Group ring of Z^rank restricted to the box ``|x_i| <= window``."""
    if rank < 1 or window < 1:
        raise InvalidSpec("rank and window must be >= 1")
    pts = list(cartesian(range(-window, window + 1), repeat=rank))
    labels = [lattice_label(p) for p in pts]
    half = window // 2

    def parse(label):
        return tuple(int(x) for x in label.split(","))

    def rule(x, y):
        z = tuple(a + b for a, b in zip(parse(x), parse(y)))
        if any(abs(c) > window for c in z):
            return {}, False
        return {lattice_label(z): 1}, True

    return FusionRing(labels, lattice_label((0,) * rank),
                      {lattice_label(p): lattice_label(tuple(-x for x in p)) for p in pts},
                      rule=rule,
                      interior=[lattice_label(p) for p in pts if all(abs(x) <= half for x in p)],
                      name=f"integer_lattice(rank={rank},window={window})")


def product_ring(left, right):
    """Tensor product ring; labels ``"(a,b)"``."""
    pairs = list(cartesian(left.basis, right.basis))
    label = {p: f"({p[0]},{p[1]})" for p in pairs}
    if len(set(label.values())) != len(pairs):
        raise InvalidSpec("product labels collide; rename component labels")
    split = {v: k for k, v in label.items()}

    def rule(x, y):
        (a, b), (c, d) = split[x], split[y]
        lrow, lok = left.partial_product(a, c)
        rrow, rok = right.partial_product(b, d)
        row = {label[(t, u)]: m * n for t, m in lrow.items() for u, n in rrow.items()}
        return row, lok and rok

    interior = None
    if left.truncated or right.truncated:
        interior = [label[(a, b)] for a, b in pairs if left.is_interior(a) and right.is_interior(b)]
    dual = {label[(a, b)]: label[(left.dual(a), right.dual(b))] for a, b in pairs}
    return FusionRing([label[p] for p in pairs], label[(left.unit, right.unit)], dual,
                      rule=rule, interior=interior, name=f"product({left.name},{right.name})")


def build(spec):
    """Construct the ring described by a :class:`FamilySpec`."""
    if isinstance(spec, dict):
        spec = FamilySpec.from_dict(spec)
    p = spec.params
    if spec.family == "group_table":
        ring = group_ring(_group_table(p), name=str(spec))
    elif spec.family == "free_group":
        ring = free_group(_positive(p, "rank"), _positive(p, "radius"))
    elif spec.family == "integer_lattice":
        ring = integer_lattice(_positive(p, "rank") if "rank" in p else 1, _positive(p, "window"))
    elif spec.family == "su2_rep":
        ring = su2_rep(_positive(p, "cutoff"))
    elif spec.family == "verlinde_su2":
        ring = verlinde_su2(_positive(p, "level"))
    else:
        left, right = _sub_specs(p)
        ring = product_ring(build(left), build(right))
    return ring


def cyclic(n):
    return FamilySpec("group_table", {"cyclic": n})


def klein_four():
    return FamilySpec("product", {"left": cyclic(2), "right": cyclic(2)})


def classical_su2_dims(ring):
    """``d(n) = n + 1`` on doubled-spin labels."""
    return DimensionFunction({b: int(b) + 1 for b in ring.basis})


def quantum_su2_dims(ring, q):
    """``d(n) = [n+1]_q`` on doubled-spin labels.

    Values too large for a double become ``inf``; only small windows of a
    quantum-dimension ring are meaningful in floating point.
    """
    if q <= 0:
        raise InvalidSpec("q must be positive")
    q = max(q, 1 / q)
    if q == 1:
        return classical_su2_dims(ring)

    def qint(n):
        # q^{n-1} (1 - q^{-2n}) / (1 - q^{-2}), free of cancellation
        try:
            return math.exp((n - 1) * math.log(q)) * (1 - q ** (-2 * n)) / (1 - q ** -2)
        except OverflowError:
            return math.inf

    return DimensionFunction({b: qint(int(b) + 1) for b in ring.basis})
