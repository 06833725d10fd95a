"""Ordered multi-index combinatorics underlying the Hodge-star basis action.

All signs are exact integers so identities can be checked with zero
tolerance.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator


def inversion_sign(seq) -> int:
    """Sign of the permutation sorting ``seq``, by inversion counting."""
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


def bubble_sort_sign(seq) -> int:
    """Independent oracle: count adjacent transpositions of a bubble sort."""
    work = list(seq)
    swaps = 0
    changed = True
    while changed:
        changed = False
        for i in range(len(work) - 1):
            if work[i] > work[i + 1]:
                work[i], work[i + 1] = work[i + 1], work[i]
                swaps += 1
                changed = True
    return -1 if swaps % 2 else 1


@dataclass(frozen=True)
class MultiIndex:
    """Strictly increasing tuple of axis labels in ``1..n``."""

    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ambient dimension must be >= 1, got {self.n}")
        if len(self.entries) > self.n:
            raise ValueError(f"multi-index {self.entries} too long for n={self.n}")
        for a, b in zip(self.entries, self.entries[1:]):
            if a >= b:
                raise ValueError(f"entries must be strictly increasing: {self.entries}")
        if self.entries and (self.entries[0] < 1 or self.entries[-1] > self.n):
            raise ValueError(f"entries out of range 1..{self.n}: {self.entries}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def complement(self) -> "MultiIndex":
        """The complementary multi-index A' with A . A' = {1..n}."""
        present = set(self.entries)
        rest = tuple(k for k in range(1, self.n + 1) if k not in present)
        return MultiIndex(rest, self.n)

    def perm_sign(self) -> int:
        """Sign of the permutation taking (1..n) to the concatenation A.A'."""
        return inversion_sign(self.entries + self.complement().entries)


def epsilon(A: MultiIndex, B: MultiIndex) -> int:
    """The basis sign (-1)^(np + n(n+1)/2) sigma^AA' sigma^BB', as printed."""
    if A.n != B.n:
        raise ValueError(f"dimension mismatch: {A.n} vs {B.n}")
    n, p = A.n, len(A)
    exponent = n * p + n * (n + 1) // 2
    return ((-1) ** exponent) * A.perm_sign() * B.perm_sign()


def all_indices(n: int) -> Iterator[MultiIndex]:
    """All 2^n ordered multi-indices for ambient dimension n."""
    for p in range(n + 1):
        for combo in itertools.combinations(range(1, n + 1), p):
            yield MultiIndex(combo, n)


def merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Sign and sorted tuple for concatenating two ordered index tuples.

    Returns ``(0, ())`` when an index repeats (the wedge vanishes).
    """
    joined = a + b
    if len(set(joined)) != len(joined):
        return 0, ()
    return inversion_sign(joined), tuple(sorted(joined))


def verify_sign_identities(n: int) -> dict:
    """Exhaustively check the three permutation-sign identities at dimension n.

    Checks, for all ordered multi-indices A (|A| = p) and B (|B| = q):

    * sigma^A'A = (-1)^(p(n-p)) sigma^AA'
    * epsilon^BA = (-1)^(n(p+q)) epsilon^AB
    * epsilon^AB epsilon^B'A' = (-1)^(n+p+q)
    """
    if not 1 <= n <= 6:
        raise ValueError("exhaustive check limited to 1 <= n <= 6")
    report = {
        "n": n,
        "sigma_reversal": {"passed": True, "counterexamples": []},
        "epsilon_swap": {"passed": True, "counterexamples": []},
        "epsilon_product": {"passed": True, "counterexamples": []},
    }
    indices = list(all_indices(n))
    for A in indices:
        p = len(A)
        # sign of the reversed concatenation A'.A
        rev = inversion_sign(A.complement().entries + A.entries)
        if rev != (-1) ** (p * (n - p)) * A.perm_sign():
            report["sigma_reversal"]["passed"] = False
            report["sigma_reversal"]["counterexamples"].append(A.entries)
    for A in indices:
        for B in indices:
            p, q = len(A), len(B)
            if epsilon(B, A) != ((-1) ** (n * (p + q))) * epsilon(A, B):
                report["epsilon_swap"]["passed"] = False
                report["epsilon_swap"]["counterexamples"].append((A.entries, B.entries))
            prod = epsilon(A, B) * epsilon(B.complement(), A.complement())
            if prod != (-1) ** (n + p + q):
                report["epsilon_product"]["passed"] = False
                report["epsilon_product"]["counterexamples"].append((A.entries, B.entries))
    report["passed"] = all(
        report[key]["passed"]
        for key in ("sigma_reversal", "epsilon_swap", "epsilon_product")
    )
    return report
