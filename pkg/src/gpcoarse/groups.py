"""Concrete vertex groups: finite tables, cyclic, free abelian and free groups.

Each group is an immutable :class:`VertexGroupSpec` together with a finite
symmetric generating set.  Elements are plain hashable values in canonical
form:

* ``finite_table``: index into the element list
* ``cyclic``: residue in ``range(m)``
* ``free_abelian``: tuple of ``rank`` integers
* ``free``: freely reduced string over ``a, b, ...`` (upper case = inverse)
"""

from __future__ import annotations

import random
import re
import string
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Optional, Sequence

from .errors import BudgetExceeded, ConfigError, InvalidElement, ParseError

KINDS = ("finite_table", "cyclic", "free_abelian", "free")

DEFAULT_FREE_MAX_LENGTH = 16

Element = Hashable


@dataclass(frozen=True)
class VertexGroupSpec:
    kind: str
    modulus: int = 0
    rank: int = 0
    labels: tuple = ()
    table: tuple = ()
    generators: tuple = ()
    max_length: int = DEFAULT_FREE_MAX_LENGTH
    _identity_index: int = field(default=0, compare=False, repr=False)

    # ---- constructors -------------------------------------------------

    @classmethod
    def cyclic(cls, m: int, generators: Optional[Iterable[int]] = None) -> "VertexGroupSpec":
        if not isinstance(m, int) or m < 2:
            raise ConfigError(f"cyclic modulus must be an integer >= 2, got {m!r}")
        gens = sorted({g % m for g in generators}) if generators is not None else sorted({1, m - 1})
        spec = cls(kind="cyclic", modulus=m, generators=tuple(gens))
        spec._check_generators()
        return spec

    @classmethod
    def free_abelian(cls, k: int, generators: Optional[Iterable[Sequence[int]]] = None) -> "VertexGroupSpec":
        if not isinstance(k, int) or k < 1:
            raise ConfigError(f"free abelian rank must be >= 1, got {k!r}")
        if generators is None:
            gens = []
            for i in range(k):
                for sign in (1, -1):
                    gens.append(tuple(sign if j == i else 0 for j in range(k)))
        else:
            gens = [tuple(int(c) for c in g) for g in generators]
        spec = cls(kind="free_abelian", rank=k, generators=tuple(sorted(set(gens))))
        spec._check_generators()
        return spec

    @classmethod
    def free(cls, k: int, max_length: int = DEFAULT_FREE_MAX_LENGTH,
             generators: Optional[Iterable[str]] = None) -> "VertexGroupSpec":
        if not isinstance(k, int) or not 1 <= k <= 26:
            raise ConfigError(f"free group rank must be in 1..26, got {k!r}")
        if generators is None:
            letters = string.ascii_lowercase[:k]
            gens = list(letters) + list(letters.upper())
        else:
            gens = list(generators)
        spec = cls(kind="free", rank=k, max_length=max_length, generators=tuple(sorted(set(gens))))
        spec._check_generators()
        return spec

    @classmethod
    def finite_table(cls, labels: Sequence[str], table: Sequence[Sequence[str]],
                     generators: Optional[Iterable[str]] = None, *, seed: int = 0) -> "VertexGroupSpec":
        labels = tuple(str(x) for x in labels)
        n = len(labels)
        if n == 0 or len(set(labels)) != n:
            raise ConfigError("finite table needs distinct, non-empty element labels")
        index = {lab: i for i, lab in enumerate(labels)}
        if len(table) != n or any(len(row) != n for row in table):
            raise ConfigError(f"multiplication table must be {n}x{n}")
        try:
            tab = tuple(tuple(index[str(x)] for x in row) for row in table)
        except KeyError as exc:
            raise ConfigError(f"table entry {exc.args[0]!r} is not a declared label") from None
        ident = _validate_table(tab, seed=seed)
        if generators is None:
            gens = [i for i in range(n) if i != ident]
        else:
            try:
                gens = [index[str(g)] for g in generators]
            except KeyError as exc:
                raise ConfigError(f"generator {exc.args[0]!r} is not a declared label") from None
        spec = cls(kind="finite_table", labels=labels, table=tab,
                   generators=tuple(sorted(set(gens))), _identity_index=ident)
        spec._check_generators()
        return spec

    # ---- basic arithmetic ---------------------------------------------

    @property
    def identity(self) -> Element:
        if self.kind == "finite_table":
            return self._identity_index
        if self.kind == "cyclic":
            return 0
        if self.kind == "free_abelian":
            return (0,) * self.rank
        return ""

    @property
    def order(self) -> Optional[int]:
        if self.kind == "finite_table":
            return len(self.labels)
        if self.kind == "cyclic":
            return self.modulus
        return None

    @property
    def is_finite(self) -> bool:
        return self.kind in ("finite_table", "cyclic")

    @property
    def asdim_bound(self) -> int:
        """Asymptotic dimension of the group (0 for finite groups)."""
        if self.kind == "free_abelian":
            return self.rank
        if self.kind == "free":
            return 1
        return 0

    def validate(self, a: Element) -> Element:
        k = self.kind
        if k == "finite_table":
            ok = isinstance(a, int) and not isinstance(a, bool) and 0 <= a < len(self.labels)
        elif k == "cyclic":
            ok = isinstance(a, int) and not isinstance(a, bool) and 0 <= a < self.modulus
        elif k == "free_abelian":
            ok = (isinstance(a, tuple) and len(a) == self.rank
                  and all(isinstance(c, int) and not isinstance(c, bool) for c in a))
        else:
            ok = isinstance(a, str) and _is_freely_reduced(a, self.rank)
            if ok and len(a) > self.max_length:
                raise BudgetExceeded(
                    f"free group element of length {len(a)} exceeds cap {self.max_length}",
                    self.max_length)
        if not ok:
            raise InvalidElement(f"{a!r} is not a canonical element of {self.describe()}")
        return a

    def multiply(self, a: Element, b: Element) -> Element:
        self.validate(a)
        self.validate(b)
        return self._mul(a, b)

    def _mul(self, a, b):
        k = self.kind
        if k == "finite_table":
            return self.table[a][b]
        if k == "cyclic":
            return (a + b) % self.modulus
        if k == "free_abelian":
            return tuple(x + y for x, y in zip(a, b))
        out = list(a)
        for ch in b:
            if out and out[-1] == ch.swapcase():
                out.pop()
            else:
                out.append(ch)
        if len(out) > self.max_length:
            raise BudgetExceeded(
                f"free group product of length {len(out)} exceeds cap {self.max_length}",
                self.max_length)
        return "".join(out)

    def invert(self, a: Element) -> Element:
        self.validate(a)
        return self._inv(a)

    def _inv(self, a):
        k = self.kind
        if k == "finite_table":
            row = self.table[a]
            return row.index(self._identity_index)
        if k == "cyclic":
            return (-a) % self.modulus
        if k == "free_abelian":
            return tuple(-x for x in a)
        return a[::-1].swapcase()

    def elements(self) -> list:
        if self.kind == "finite_table":
            return list(range(len(self.labels)))
        if self.kind == "cyclic":
            return list(range(self.modulus))
        raise InvalidElement(f"{self.describe()} is infinite")

    # ---- word metric --------------------------------------------------

    def word_length(self, a: Element) -> int:
        """Length of a shortest generator word for ``a`` (breadth-first search)."""
        self.validate(a)
        return _word_length(self, a)

    def norm_weighted(self, a: Element, weight: int) -> int:
        if not isinstance(weight, int) or weight < 1:
            raise ValueError(f"weight must be a positive integer, got {weight!r}")
        return weight * self.word_length(a)

    def enumerate_ball(self, radius, weight: int = 1) -> set:
        """All elements of weighted norm at most ``radius``."""
        if radius < 0:
            raise ValueError("radius must be non-negative")
        if not isinstance(weight, int) or weight < 1:
            raise ValueError(f"weight must be a positive integer, got {weight!r}")
        steps = int(radius // weight)
        return {x for x, _ in _sphere_layers(self, steps)[0]}

    def generators_by_length(self, steps: int) -> dict:
        """Map element -> word length for all elements of length <= steps."""
        return dict(_sphere_layers(self, steps)[0])

    # ---- literals -----------------------------------------------------

    def format_element(self, a: Element) -> str:
        self.validate(a)
        if self.kind == "finite_table":
            return self.labels[a]
        if self.kind == "cyclic":
            return str(a)
        if self.kind == "free_abelian":
            return "(" + ",".join(str(c) for c in a) + ")"
        return a

    def parse_element(self, text: str) -> Element:
        text = text.strip()
        k = self.kind
        if k == "finite_table":
            if text not in self.labels:
                raise ParseError(f"unknown element label {text!r}", text, 0)
            return self.labels.index(text)
        if k == "cyclic":
            if not re.fullmatch(r"[+-]?\d+", text):
                raise ParseError("expected an integer", text, 0)
            return int(text) % self.modulus
        if k == "free_abelian":
            if self.rank == 1 and re.fullmatch(r"[+-]?\d+", text):
                return (int(text),)
            m = re.fullmatch(r"\(\s*([+-]?\d+(?:\s*,\s*[+-]?\d+)*)\s*\)", text)
            if not m:
                raise ParseError("expected a vector literal (a,b,...)", text, 0)
            vec = tuple(int(c) for c in m.group(1).split(","))
            if len(vec) != self.rank:
                raise ParseError(f"vector has {len(vec)} entries, rank is {self.rank}", text, 0)
            return vec
        letters = string.ascii_lowercase[: self.rank]
        for pos, ch in enumerate(text):
            if ch.lower() not in letters:
                raise ParseError(f"letter {ch!r} not in free group of rank {self.rank}", text, pos)
        return self.validate(self._mul("", text))

    def describe(self) -> str:
        if self.kind == "cyclic":
            return f"Z/{self.modulus}"
        if self.kind == "free_abelian":
            return "Z" if self.rank == 1 else f"Z^{self.rank}"
        if self.kind == "free":
            return f"F_{self.rank}"
        return f"finite group of order {len(self.labels)}"

    def to_config(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "cyclic":
            out["modulus"] = self.modulus
        elif self.kind == "free_abelian":
            out["rank"] = self.rank
        elif self.kind == "free":
            out["rank"] = self.rank
            out["max_length"] = self.max_length
        else:
            out["elements"] = list(self.labels)
            out["table"] = [[self.labels[x] for x in row] for row in self.table]
        out["generators"] = [self.format_element(g) for g in self.generators]
        return out

    # ---- internal checks ----------------------------------------------

    def _check_generators(self):
        gens = set(self.generators)
        if not gens:
            raise ConfigError("generating set must be non-empty")
        for g in gens:
            self.validate(g)
        if self.identity in gens:
            raise ConfigError("generating set must not contain the identity")
        for g in gens:
            if self._inv(g) not in gens:
                raise ConfigError(f"generating set is not closed under inverses: {g!r}")
        if self.kind in ("finite_table", "cyclic"):
            reached = {self.identity}
            frontier = [self.identity]
            while frontier:
                nxt = []
                for x in frontier:
                    for s in self.generators:
                        y = self._mul(x, s)
                        if y not in reached:
                            reached.add(y)
                            nxt.append(y)
                frontier = nxt
            if len(reached) != self.order:
                raise ConfigError(
                    f"generators reach {len(reached)} of {self.order} elements")
        elif self.kind == "free_abelian":
            if _lattice_rank_and_index(list(gens), self.rank) != (self.rank, 1):
                raise ConfigError("generators do not generate Z^%d" % self.rank)
        else:
            letters = set(string.ascii_lowercase[: self.rank])
            if not letters <= {g for g in gens if len(g) == 1}:
                raise ConfigError("free group generating sets must contain every basis letter")


def _is_freely_reduced(word: str, rank: int) -> bool:
    letters = string.ascii_lowercase[:rank]
    for i, ch in enumerate(word):
        if ch.lower() not in letters:
            return False
        if i and word[i - 1] == ch.swapcase():
            return False
    return True


def _validate_table(tab, seed=0) -> int:
    n = len(tab)
    idents = [e for e in range(n)
              if all(tab[e][x] == x and tab[x][e] == x for x in range(n))]
    if len(idents) != 1:
        raise ConfigError("multiplication table has no two-sided identity")
    e = idents[0]
    for a in range(n):
        if sorted(tab[a]) != list(range(n)):
            raise ConfigError(f"row {a} of the multiplication table is not a permutation")
        if not any(tab[a][b] == e and tab[b][a] == e for b in range(n)):
            raise ConfigError(f"element {a} has no two-sided inverse")
    if n <= 64:
        triples = ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
    else:
        rng = random.Random(seed)
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(50000))
    for a, b, c in triples:
        if tab[tab[a][b]][c] != tab[a][tab[b][c]]:
            raise ConfigError(f"multiplication table is not associative at {(a, b, c)}")
    return e


def _lattice_rank_and_index(vectors, k):
    """Rank and index of the sublattice of Z^k spanned by ``vectors`` (Hermite reduction)."""
    rows = [list(v) for v in vectors if any(v)]
    pivots = []
    col = 0
    r = 0
    while col < k and r < len(rows):
        nz = [i for i in range(r, len(rows)) if rows[i][col] != 0]
        if not nz:
            col += 1
            continue
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col] != 0]
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                q = rows[i][col] // rows[r][col]
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                if rows[i][col] != 0:
                    done = False
            if done:
                break
        pivots.append(abs(rows[r][col]))
        r += 1
        col += 1
    index = 1
    for p in pivots:
        index *= p
    return len(pivots), index


@lru_cache(maxsize=None)
def _word_length(spec: VertexGroupSpec, a) -> int:
    if a == spec.identity:
        return 0
    if spec.generators == _default_generators(spec):
        if spec.kind == "free_abelian":
            return sum(abs(c) for c in a)
        if spec.kind == "cyclic":
            return min(a, spec.modulus - a)
        if spec.kind == "free":
            return len(a)
    seen = {spec.identity}
    frontier = [spec.identity]
    depth = 0
    cap = 2_000_000
    while frontier:
        depth += 1
        nxt = []
        for x in frontier:
            for s in spec.generators:
                try:
                    y = spec._mul(x, s)
                except BudgetExceeded:
                    continue
                if y == a:
                    return depth
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > cap:
            raise BudgetExceeded(f"word-length search visited more than {cap} elements", cap)
        frontier = nxt
    raise InvalidElement(f"{a!r} is not reachable from the generators")


@lru_cache(maxsize=256)
def _default_generators(spec: VertexGroupSpec) -> tuple:
    if spec.kind == "free_abelian":
        return VertexGroupSpec.free_abelian(spec.rank).generators
    if spec.kind == "cyclic":
        return tuple(sorted({1, spec.modulus - 1}))
    if spec.kind == "free":
        letters = string.ascii_lowercase[: spec.rank]
        return tuple(sorted(set(letters + letters.upper())))
    return ()


def _sphere_layers(spec: VertexGroupSpec, steps: int):
    """Breadth-first layers: returns ({element: length}, ) for lengths <= steps."""
    dist = {spec.identity: 0}
    frontier = deque([spec.identity])
    while frontier:
        x = frontier.popleft()
        d = dist[x]
        if d == steps:
            continue
        for s in spec.generators:
            try:
                y = spec._mul(x, s)
            except BudgetExceeded:
                continue
            if y not in dist:
                dist[y] = d + 1
                frontier.append(y)
        if len(dist) > 5_000_000:
            raise BudgetExceeded("vertex-group ball exceeds 5e6 elements", 5_000_000)
    return (tuple(dist.items()),)


def spec_from_config(cfg: dict) -> VertexGroupSpec:
    """Build a spec from its JSON config dictionary."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ConfigError("group declaration needs a 'kind'")
    kind = cfg["kind"].replace("-", "_")
    gens = cfg.get("generators")
    if kind == "cyclic":
        spec = VertexGroupSpec.cyclic(cfg.get("modulus"))
        if gens is not None:
            spec = VertexGroupSpec.cyclic(spec.modulus, [spec.parse_element(str(g)) for g in gens])
        return spec
    if kind == "free_abelian":
        spec = VertexGroupSpec.free_abelian(cfg.get("rank", 1))
        if gens is not None:
            spec = VertexGroupSpec.free_abelian(spec.rank, [spec.parse_element(str(g)) for g in gens])
        return spec
    if kind == "free":
        return VertexGroupSpec.free(cfg.get("rank", 1), cfg.get("max_length", DEFAULT_FREE_MAX_LENGTH),
                                    gens)
    if kind == "finite_table":
        return VertexGroupSpec.finite_table(cfg.get("elements", []), cfg.get("table", []), gens)
    raise ConfigError(f"unknown group kind {cfg['kind']!r}; expected one of {KINDS}")
