"""The graded graph of ordered pairs.

A floor-(n+1) vertex is an ordered pair of floor-n vertices; its label is
the concatenation of the two child labels, indexed by group masks: the
lower half (masks in D_n) is the label of the first child, the upper half
the label of the second.  A path prefix is stored canonically as the top
vertex label plus the edge-index sequence alpha; all lower vertices are
recomputed by slicing halves.
"""

from __future__ import annotations

import numpy as np

from .dyadic import ResolutionError, in_group

EXHAUSTIVE_DEPTH = 4


class DepthError(ValueError):
    pass


class Vertex:
    __slots__ = ("floor", "label")

    def __init__(self, floor: int, label):
        label = np.asarray(label, dtype=np.uint8)
        if label.shape != (1 << floor,):
            raise ValueError(f"floor-{floor} label must have length {1 << floor}")
        self.floor = floor
        self.label = label

    def children(self) -> tuple["Vertex", "Vertex"]:
        if self.floor == 0:
            raise DepthError("floor-0 vertex has no children")
        half = 1 << (self.floor - 1)
        return (Vertex(self.floor - 1, self.label[:half]),
                Vertex(self.floor - 1, self.label[half:]))

    def __eq__(self, other):
        return (self.floor == other.floor
                and np.array_equal(self.label, other.label))

    def __hash__(self):
        return hash((self.floor, self.label.tobytes()))

    def __repr__(self):
        return f"Vertex({self.floor}, {''.join(map(str, self.label))})"


def pair(v0: Vertex, v1: Vertex) -> Vertex:
    if v0.floor != v1.floor:
        raise DepthError("pairing needs equal floors")
    return Vertex(v0.floor + 1, np.concatenate([v0.label, v1.label]))


class PathPrefix:
    """A path of the graph known up to a finite floor.

    Canonical data: the top vertex label and the edge ordinals
    alpha = (alpha_1, ..., alpha_N), alpha_{n+1} being the ordinal of the
    edge entering floor n+1.  vertex(j) recomputes floor-j vertices.
    """

    __slots__ = ("depth", "top", "alpha")

    def __init__(self, top: Vertex, alpha):
        alpha = tuple(int(a) for a in alpha)
        if any(a not in (0, 1) for a in alpha):
            raise ValueError("edge ordinals must be bits")
        if len(alpha) != top.floor:
            raise DepthError("alpha length must equal the top floor")
        self.depth = top.floor
        self.top = top
        self.alpha = alpha

    def vertex(self, j: int) -> Vertex:
        if not 0 <= j <= self.depth:
            raise DepthError(f"floor {j} outside path depth {self.depth}")
        v = self.top
        for n in range(self.depth - 1, j - 1, -1):
            half = 1 << n
            base = self.alpha[n] * half
            v = Vertex(n, v.label[base:base + half])
        return v

    def vertices(self) -> list[Vertex]:
        return [self.vertex(j) for j in range(self.depth + 1)]

    def __eq__(self, other):
        return (self.depth == other.depth and self.alpha == other.alpha
                and self.top == other.top)

    def __hash__(self):
        return hash((self.alpha, self.top))

    def __repr__(self):
        return f"PathPrefix(top={self.top!r}, alpha={self.alpha})"


def vertex_count(n: int, exhaustive: bool = False) -> int:
    """Number of vertices on floor n: 2**2**n."""
    if exhaustive:
        if n > EXHAUSTIVE_DEPTH:
            raise DepthError(f"exhaustive mode limited to depth {EXHAUSTIVE_DEPTH}")
        return len(set(v.label.tobytes() for v in iter_vertices(n)))
    return 1 << (1 << n)


def iter_vertices(n: int):
    if n > EXHAUSTIVE_DEPTH:
        raise DepthError(f"exhaustive mode limited to depth {EXHAUSTIVE_DEPTH}")
    size = 1 << n
    for bits in range(1 << size):
        yield Vertex(n, [(bits >> i) & 1 for i in range(size)])


def iter_paths(n: int):
    """All path prefixes of depth n (top label and alpha both free)."""
    for v in iter_vertices(n):
        for a in range(1 << n):
            yield PathPrefix(v, [(a >> i) & 1 for i in range(n)])


def paths_into(v: Vertex, exhaustive: bool = False) -> int:
    """Number of paths from floor 0 into v: 2**floor."""
    if exhaustive:
        if v.floor > EXHAUSTIVE_DEPTH:
            raise DepthError(f"exhaustive mode limited to depth {EXHAUSTIVE_DEPTH}")
        count = 0
        for a in range(1 << v.floor):
            p = PathPrefix(v, [(a >> i) & 1 for i in range(v.floor)])
            p.vertices()
            count += 1
        return count
    return 1 << v.floor


def alpha_value(alpha) -> int:
    return sum(int(a) << i for i, a in enumerate(alpha))


def alpha_digits(value: int, length: int) -> tuple[int, ...]:
    return tuple((value >> i) & 1 for i in range(length))


def adic_successor(x: PathPrefix) -> PathPrefix:
    """Next path in the reverse-lexicographic order on edge sequences.

    The first 0-edge flips to 1 and every edge below it resets to 0; the
    path is unchanged from that floor upward.  Undefined on the all-ones
    edge sequence at this resolution.
    """
    v = alpha_value(x.alpha)
    if v == (1 << x.depth) - 1:
        raise ResolutionError("successor undefined at this resolution (all-ones edges)")
    return PathPrefix(x.top, alpha_digits(v + 1, x.depth))


def reverse_lex_key(x: PathPrefix) -> int:
    return alpha_value(x.alpha)


def kappa(g: int, x: PathPrefix) -> PathPrefix:
    """Action of the group element g: flip the edge ordinals named by its mask."""
    if not in_group(g, x.depth):
        raise ResolutionError(f"element {g} outside D_{x.depth}")
    return PathPrefix(x.top, alpha_digits(alpha_value(x.alpha) ^ g, x.depth))


def serialize(x: PathPrefix) -> dict:
    return {
        "depth": x.depth,
        "label": np.packbits(x.top.label, bitorder="little").tobytes().hex(),
        "alpha": list(x.alpha),
    }


def deserialize(rec: dict) -> PathPrefix:
    n = rec["depth"]
    bits = np.unpackbits(
        np.frombuffer(bytes.fromhex(rec["label"]), dtype=np.uint8),
        bitorder="little")[: 1 << n]
    return PathPrefix(Vertex(n, bits), rec["alpha"])
