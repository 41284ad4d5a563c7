"""Coding isomorphisms between path space and symbolic spaces.

A path prefix corresponds to a coded point (w, alpha): alpha is the edge
ordinal sequence and w(g) is the top label read at g XOR a, where a is the
mask packing alpha.  The group acts diagonally (translate w, XOR the
digits); the adic successor acts as the odometer on alpha and translates
w by the carry.  The fibrewise change of variables lambda_alpha identifies
a segment of integers with a finite subgroup, turning the adic map into
(left shift) x (odometer) on integer-indexed windows.
"""

from __future__ import annotations

import numpy as np

from . import graph
from .dyadic import ResolutionError, check_mask, in_group, tau


class CodedPoint:
    """Truncation of a point of I^D x I^N: w on D_N plus M digits of alpha."""

    __slots__ = ("w", "alpha", "N", "M")

    def __init__(self, w, alpha):
        w = np.asarray(w, dtype=np.uint8)
        if w.ndim != 1 or w.size & (w.size - 1):
            raise ValueError("w must be a bit vector of length 2**N")
        self.w = w
        self.alpha = tuple(int(a) for a in alpha)
        if any(a not in (0, 1) for a in self.alpha):
            raise ValueError("alpha digits must be bits")
        self.N = w.size.bit_length() - 1
        self.M = len(self.alpha)

    @property
    def resolution(self) -> int:
        return min(self.N, self.M)

    def __eq__(self, other):
        return self.alpha == other.alpha and np.array_equal(self.w, other.w)

    def __hash__(self):
        return hash((self.alpha, self.w.tobytes()))

    def __repr__(self):
        return f"CodedPoint(w={''.join(map(str, self.w))}, alpha={self.alpha})"


class ZWindow:
    """A finite window w(lo), ..., w(hi) of a point of I^Z."""

    __slots__ = ("lo", "hi", "bits")

    def __init__(self, lo: int, hi: int, bits):
        bits = np.asarray(bits, dtype=np.uint8)
        if hi < lo or bits.shape != (hi - lo + 1,):
            raise ValueError("window bounds do not match bit count")
        self.lo = lo
        self.hi = hi
        self.bits = bits

    def __getitem__(self, k: int) -> int:
        if not self.lo <= k <= self.hi:
            raise ResolutionError(f"index {k} outside window [{self.lo}, {self.hi}]")
        return int(self.bits[k - self.lo])

    def shift(self) -> "ZWindow":
        """Left shift: the new window reads y(k+1) at k."""
        if self.hi == self.lo:
            raise ResolutionError("window too short to shift")
        return ZWindow(self.lo, self.hi - 1, self.bits[1:])

    def __eq__(self, other):
        return (self.lo == other.lo and self.hi == other.hi
                and np.array_equal(self.bits, other.bits))

    def __repr__(self):
        return f"ZWindow({self.lo}, {self.hi}, {''.join(map(str, self.bits))})"


def alpha_mask(alpha) -> int:
    return sum(int(a) << i for i, a in enumerate(alpha))


def psi(x: graph.PathPrefix) -> CodedPoint:
    """(F, A): A is the edge sequence, F reads the top label through the alpha shift."""
    n = x.depth
    a = alpha_mask(x.alpha)
    idx = np.arange(1 << n) ^ a
    return CodedPoint(x.top.label[idx], x.alpha)


def psi_inv(p: CodedPoint) -> graph.PathPrefix:
    if p.N != p.M:
        raise ResolutionError("psi_inv needs matching resolutions N = M")
    a = alpha_mask(p.alpha)
    idx = np.arange(1 << p.N) ^ a
    return graph.PathPrefix(graph.Vertex(p.N, p.w[idx]), p.alpha)


def diag(g: int, p: CodedPoint) -> CodedPoint:
    """Diagonal action: (w(.), alpha) -> (w(. + g), alpha + tau(g))."""
    if not in_group(g, p.resolution):
        raise ResolutionError(f"element {g} outside D_{p.resolution}")
    idx = np.arange(1 << p.N) ^ g
    return CodedPoint(p.w[idx], [a ^ t for a, t in zip(p.alpha, tau(g, p.M))])


def odometer(alpha) -> tuple[int, ...]:
    """Add one with carry: the lowest 0 flips to 1, all digits below reset."""
    alpha = tuple(int(a) for a in alpha)
    v = alpha_mask(alpha)
    if v == (1 << len(alpha)) - 1:
        raise ResolutionError("odometer undefined at this resolution (all-ones digits)")
    return graph.alpha_digits(v + 1, len(alpha))


def odometer_inv(alpha) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    v = alpha_mask(alpha)
    if v == 0:
        raise ResolutionError("inverse odometer undefined at this resolution (all-zeros digits)")
    return graph.alpha_digits(v - 1, len(alpha))


def adic_on_coded(p: CodedPoint) -> CodedPoint:
    """Coded form of the adic successor: translate w by the carry, advance alpha."""
    nxt = odometer(p.alpha)
    g = alpha_mask(nxt) ^ alpha_mask(p.alpha)
    if not in_group(g, p.N):
        raise ResolutionError("carry exceeds the w resolution")
    idx = np.arange(1 << p.N) ^ g
    return CodedPoint(p.w[idx], nxt)


def lambda_alpha(alpha, k: int) -> int:
    """Group element at integer position k of the alpha-adapted enumeration.

    With a = sum alpha_{i+1} 2^i, the representable integers are exactly
    {-a, ..., -a + 2**M - 1} and the element is (k + a) XOR a.
    """
    a = alpha_mask(alpha)
    u = k + a
    if not 0 <= u < (1 << len(alpha)):
        raise ResolutionError(
            f"integer {k} outside the representable segment [{-a}, {-a + (1 << len(alpha)) - 1}]")
    return check_mask(u ^ a)


def lambda_segment(alpha, n: int) -> range:
    """Integer preimage of D_n: the segment {-a_n, ..., -a_n + 2**n - 1}."""
    if n > len(alpha):
        raise ResolutionError(f"n = {n} exceeds the digit resolution {len(alpha)}")
    a_n = alpha_mask(alpha[:n])
    return range(-a_n, -a_n + (1 << n))


def lambda_window(p: CodedPoint, L: int) -> ZWindow:
    """Read w through lambda_alpha on the integer window [-L, L]."""
    bits = []
    for k in range(-L, L + 1):
        g = lambda_alpha(p.alpha, k)
        if not in_group(g, p.N):
            raise ResolutionError(f"window index {k} escapes the w resolution")
        bits.append(p.w[g])
    return ZWindow(-L, L, bits)
