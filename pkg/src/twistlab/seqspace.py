"""Finitely supported sequence vectors with exact rational coefficients.

Two vector flavours are provided: ``FinSeq`` (sparse map index -> rational,
the ambient l1 norm) and ``MixedSeq`` (a block vector whose n-th block is a
dense rational vector of length n, normed by an l_p sum of block l1 norms).
Coefficient arithmetic is exact; the only floating-point quantities anywhere
in this module are p-th roots and the square roots inside the James norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Union

RationalLike = Union[int, str, Fraction]


def as_fraction(value) -> Fraction:
    """Coerce to Fraction, rejecting floats (exactness guard)."""
    if isinstance(value, float):
        raise TypeError("coefficients must be exact rationals, got float %r" % value)
    return Fraction(value)


class FinSeq:
    """Sparse rational sequence; zero coefficients are never stored."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, RationalLike] | Iterable[tuple[int, RationalLike]] | None = None):
        data: dict[int, Fraction] = {}
        if entries:
            items = entries.items() if isinstance(entries, Mapping) else entries
            for idx, val in items:
                idx = int(idx)
                if idx < 1:
                    raise ValueError("indices are positive integers, got %d" % idx)
                val = as_fraction(val)
                if not val:
                    continue
                acc = data.get(idx, 0) + val
                if acc:
                    data[idx] = acc
                else:
                    del data[idx]
        self._entries = data

    @classmethod
    def unit(cls, index: int) -> "FinSeq":
        return cls({index: 1})

    @classmethod
    def _raw(cls, data: dict[int, Fraction]) -> "FinSeq":
        out = object.__new__(cls)
        out._entries = data
        return out

    def items(self):
        return self._entries.items()

    def __getitem__(self, index: int) -> Fraction:
        return self._entries.get(index, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._entries))

    def max_support(self) -> int:
        """Largest support index, 0 for the zero vector."""
        return max(self._entries) if self._entries else 0

    def is_right_of(self, n: int) -> bool:
        """True iff every support index exceeds n (vacuously true for 0)."""
        return all(i > n for i in self._entries)

    def coord_sum(self) -> Fraction:
        return sum(self._entries.values(), Fraction(0))

    def norm(self) -> Fraction:
        return sum((abs(v) for v in self._entries.values()), Fraction(0))

    def __add__(self, other: "FinSeq") -> "FinSeq":
        data = dict(self._entries)
        for i, v in other._entries.items():
            acc = data.get(i, 0) + v
            if acc:
                data[i] = acc
            else:
                del data[i]
        return FinSeq._raw(data)

    def __neg__(self) -> "FinSeq":
        return FinSeq._raw({i: -v for i, v in self._entries.items()})

    def __sub__(self, other: "FinSeq") -> "FinSeq":
        return self + (-other)

    def __mul__(self, scalar) -> "FinSeq":
        s = as_fraction(scalar)
        if not s:
            return FinSeq._raw({})
        return FinSeq._raw({i: v * s for i, v in self._entries.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "FinSeq":
        return self * (1 / as_fraction(scalar))

    def __eq__(self, other) -> bool:
        return isinstance(other, FinSeq) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        inner = ", ".join("%d: %s" % (i, v) for i, v in sorted(self._entries.items()))
        return "FinSeq({%s})" % inner

    def to_json(self) -> dict[str, str]:
        return {str(i): "%d/%d" % (v.numerator, v.denominator) for i, v in sorted(self._entries.items())}

    @classmethod
    def from_json(cls, obj: Mapping[str, str]) -> "FinSeq":
        return cls({int(i): Fraction(v) for i, v in obj.items()})


ZERO = FinSeq()


@dataclass(frozen=True)
class BasisWindow:
    """Closed index window [lo, hi]; hi=None means unbounded to the right."""

    lo: int
    hi: int | None = None

    def __post_init__(self):
        if self.lo < 1:
            raise ValueError("window starts at a positive index")
        if self.hi is not None and self.hi < self.lo:
            raise ValueError("empty window: lo > hi")

    @classmethod
    def initial(cls, n: int) -> "BasisWindow":
        return cls(1, n)

    @classmethod
    def tail_after(cls, n: int) -> "BasisWindow":
        return cls(n + 1, None)

    def contains(self, index: int) -> bool:
        return self.lo <= index and (self.hi is None or index <= self.hi)


def norm_l1(x: FinSeq) -> Fraction:
    """Exact l1 norm: sum of absolute coefficients."""
    return x.norm()


def restrict(x: FinSeq, w: BasisWindow) -> FinSeq:
    """Keep exactly the entries whose index lies in the window."""
    return FinSeq._raw({i: v for i, v in x.items() if w.contains(i)})


def is_right_of(x: FinSeq, n: int) -> bool:
    return x.is_right_of(n)


def in_hyperplane_H(x: FinSeq) -> bool:
    """True iff the coordinate sum vanishes exactly."""
    return x.coord_sum() == 0


def disjoint_supports(x: FinSeq, y: FinSeq) -> bool:
    a, b = x._entries, y._entries
    if len(b) < len(a):
        a, b = b, a
    return not any(i in b for i in a)


JAMES_SUPPORT_CAP = 16


def james_norm(x: FinSeq) -> float:
    """Sup over increasing index tuples drawn from the support plus one index
    past it, of the root of the summed squared successive differences.

    Exhaustive over subsets of the candidate set; capped at support size
    JAMES_SUPPORT_CAP to keep the enumeration at desk scale.
    """
    supp = x.support
    if not supp:
        return 0.0
    if len(supp) > JAMES_SUPPORT_CAP:
        raise ValueError("james_norm enumerates exhaustively; support is capped at %d" % JAMES_SUPPORT_CAP)
    candidates = list(supp) + [supp[-1] + 1]
    vals = [x[i] for i in candidates]
    best = Fraction(0)
    n = len(candidates)
    for size in range(2, n + 1):
        for tup in combinations(range(n), size):
            acc = Fraction(0)
            for a, b in zip(tup, tup[1:]):
                d = vals[a] - vals[b]
                acc += d * d
            if acc > best:
                best = acc
    return math.sqrt(best)


# --- block vectors for the l_p(l1^n) space ---------------------------------


def block_position(n: int, i: int) -> int:
    """Global 1-based coordinate position of entry i of block n (blocks are
    laid out consecutively, block n holding n coordinates)."""
    if not 1 <= i <= n:
        raise ValueError("block %d has coordinates 1..%d" % (n, n))
    return n * (n - 1) // 2 + i


class MixedSeq:
    """Block vector: block n is a dense rational vector of length n.

    All-zero blocks are dropped, so equality and support are canonical.
    """

    __slots__ = ("_blocks",)

    def __init__(self, blocks: Mapping[int, Iterable[RationalLike]] | None = None):
        data: dict[int, tuple[Fraction, ...]] = {}
        if blocks:
            for n, vec in blocks.items():
                n = int(n)
                if n < 1:
                    raise ValueError("block indices are positive")
                tup = tuple(as_fraction(v) for v in vec)
                if len(tup) != n:
                    raise ValueError("block %d must have exactly %d coordinates" % (n, n))
                if any(tup):
                    data[n] = tup
        self._blocks = data

    @classmethod
    def unit(cls, n: int, i: int) -> "MixedSeq":
        vec = [Fraction(0)] * n
        vec[i - 1] = Fraction(1)
        return cls({n: vec})

    @classmethod
    def _raw(cls, data: dict[int, tuple[Fraction, ...]]) -> "MixedSeq":
        out = object.__new__(cls)
        out._blocks = data
        return out

    @property
    def blocks(self) -> dict[int, tuple[Fraction, ...]]:
        return self._blocks

    def __bool__(self) -> bool:
        return bool(self._blocks)

    def block(self, n: int) -> tuple[Fraction, ...]:
        return self._blocks.get(n, tuple([Fraction(0)] * n))

    def block_l1(self, n: int) -> Fraction:
        return sum((abs(v) for v in self._blocks.get(n, ())), Fraction(0))

    def block_l1_sum(self) -> Fraction:
        """Sum of block l1 norms; exact, used as the internal scaling gauge."""
        return sum((abs(v) for vec in self._blocks.values() for v in vec), Fraction(0))

    def support_positions(self) -> tuple[int, ...]:
        out = []
        for n, vec in self._blocks.items():
            base = n * (n - 1) // 2
            out.extend(base + i + 1 for i, v in enumerate(vec) if v)
        return tuple(sorted(out))

    def max_support(self) -> int:
        pos = self.support_positions()
        return pos[-1] if pos else 0

    def is_right_of(self, n: int) -> bool:
        return all(p > n for p in self.support_positions())

    def __add__(self, other: "MixedSeq") -> "MixedSeq":
        data = dict(self._blocks)
        for n, vec in other._blocks.items():
            if n in data:
                merged = tuple(a + b for a, b in zip(data[n], vec))
                if any(merged):
                    data[n] = merged
                else:
                    del data[n]
            else:
                data[n] = vec
        return MixedSeq._raw(data)

    def __neg__(self) -> "MixedSeq":
        return MixedSeq._raw({n: tuple(-v for v in vec) for n, vec in self._blocks.items()})

    def __sub__(self, other: "MixedSeq") -> "MixedSeq":
        return self + (-other)

    def __mul__(self, scalar) -> "MixedSeq":
        s = as_fraction(scalar)
        if not s:
            return MixedSeq._raw({})
        return MixedSeq._raw({n: tuple(v * s for v in vec) for n, vec in self._blocks.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "MixedSeq":
        return self * (1 / as_fraction(scalar))

    def __eq__(self, other) -> bool:
        return isinstance(other, MixedSeq) and self._blocks == other._blocks

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._blocks.items())))

    def __repr__(self) -> str:
        inner = ", ".join("%d: (%s)" % (n, ", ".join(map(str, vec))) for n, vec in sorted(self._blocks.items()))
        return "MixedSeq({%s})" % inner

    def to_json(self) -> dict[str, list[str]]:
        return {
            str(n): ["%d/%d" % (v.numerator, v.denominator) for v in vec]
            for n, vec in sorted(self._blocks.items())
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Iterable[str]]) -> "MixedSeq":
        return cls({int(n): [Fraction(v) for v in vec] for n, vec in obj.items()})


def norm_mixed(x: MixedSeq, p) -> float:
    """(sum_n ||x_n||_1^p)^(1/p); exact when a single block is nonzero."""
    p = as_fraction(p)
    if p <= 1:
        raise ValueError("norm_mixed requires p > 1")
    norms = [x.block_l1(n) for n in x.blocks]
    if not norms:
        return 0.0
    if len(norms) == 1:
        return float(norms[0])
    pf = float(p)
    return math.fsum(float(a) ** pf for a in norms) ** (1.0 / pf)


def vector_from_json(obj):
    """Dispatch FinSeq vs MixedSeq JSON by value shape (strings vs lists)."""
    if not obj:
        return FinSeq()
    sample = next(iter(obj.values()))
    if isinstance(sample, str):
        return FinSeq.from_json(obj)
    return MixedSeq.from_json(obj)


# --- space adapters: the handful of norms/positions the level construction
#     needs, shared between the two vector flavours -------------------------


class SeqSpace:
    """The finitely supported l1 vectors under the exact l1 norm."""

    kind = "seq"

    def norm(self, x: FinSeq) -> Fraction:
        return x.norm()

    def zero(self) -> FinSeq:
        return FinSeq()

    def unit_source(self, j: int) -> FinSeq:
        return FinSeq.unit(j)

    def to_json(self):
        return {"kind": "seq"}


class MixedSpace:
    """Span of the block unit vectors in the l_p sum of l1 blocks."""

    kind = "mixed"

    def __init__(self, p):
        p = as_fraction(p)
        if p <= 1:
            raise ValueError("p must exceed 1")
        self.p = p

    def norm(self, x: MixedSeq) -> float:
        return norm_mixed(x, self.p)

    def zero(self) -> MixedSeq:
        return MixedSeq()

    def unit_source(self, j: int) -> MixedSeq:
        # j-th basis vector in block layout order: block 1, then block 2, ...
        n = 1
        while j > n:
            j -= n
            n += 1
        return MixedSeq.unit(n, j)

    def to_json(self):
        return {"kind": "mixed", "p": "%d/%d" % (self.p.numerator, self.p.denominator)}


def space_from_json(obj):
    if obj["kind"] == "seq":
        return SeqSpace()
    return MixedSpace(Fraction(obj["p"]))
