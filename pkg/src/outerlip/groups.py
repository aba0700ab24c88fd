"""Finitely generated abelian vertex groups and loop markers.

Elements are tuples of ints, one coordinate per invariant factor.  A modulus
of 0 is an infinite cyclic coordinate.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping

# Marker placed at a non-free vertex visit whose element is nontrivial but
# unspecified.  Plain ``None`` is the trivial marker.
FLAG = "*"

_SPEC_RE = re.compile(r"^Z(?:/(\d+))?$")


@dataclass(frozen=True)
class AbelianGroup:
    moduli: tuple[int, ...]

    def __post_init__(self):
        if not self.moduli:
            raise ValueError("a vertex group needs at least one invariant factor")
        if any(m < 0 or m == 1 for m in self.moduli):
            raise ValueError(f"bad invariant factors {self.moduli}")

    @classmethod
    def parse(cls, text: str) -> "AbelianGroup":
        moduli = []
        for part in text.replace(" ", "").split("+"):
            m = _SPEC_RE.match(part)
            if m is None:
                raise ValueError(f"bad group spec {text!r}")
            moduli.append(int(m.group(1)) if m.group(1) else 0)
        return cls(tuple(moduli))

    def __str__(self):
        return "+".join("Z" if m == 0 else f"Z/{m}" for m in self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * len(self.moduli)

    @property
    def generator(self) -> tuple[int, ...]:
        return (1,) + (0,) * (len(self.moduli) - 1)

    @property
    def order(self) -> int | None:
        if 0 in self.moduli:
            return None
        out = 1
        for m in self.moduli:
            out *= m
        return out

    def reduce(self, x) -> tuple[int, ...]:
        if len(x) != len(self.moduli):
            raise ValueError(f"element {x} does not match {self}")
        return tuple(v % m if m else v for v, m in zip(x, self.moduli))

    def mul(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % m if m else a + b for a, b, m in zip(x, y, self.moduli))

    def inv(self, x) -> tuple[int, ...]:
        return tuple((-a) % m if m else -a for a, m in zip(x, self.moduli))

    def power(self, x, k: int) -> tuple[int, ...]:
        return tuple((a * k) % m if m else a * k for a, m in zip(x, self.moduli))

    def is_identity(self, x) -> bool:
        return not any(x)

    def nonzero_elements(self) -> list[tuple[int, ...]]:
        """All nontrivial elements of a finite group."""
        if self.order is None:
            raise ValueError(f"{self} is infinite")
        ranges = [range(m) for m in self.moduli]
        return [x for x in itertools.product(*ranges) if any(x)]

    def letter_closure(self, cap: int = 8) -> list[tuple[int, ...]]:
        """Vertex letters used by brute-force enumeration.

        Every nontrivial element for small finite groups, otherwise the basis
        vectors and their inverses.
        """
        order = self.order
        if order is not None and order - 1 <= cap:
            return self.nonzero_elements()
        out = []
        for t in range(self.rank):
            e = tuple(1 if s == t else 0 for s in range(self.rank))
            out.append(e)
            ie = self.inv(e)
            if ie != e:
                out.append(ie)
        return out

    @property
    def is_order_two(self) -> bool:
        return self.moduli == (2,)


class GroupSpec(dict):
    """Mapping factor index (1..r) -> AbelianGroup."""

    @classmethod
    def uniform(cls, r: int, spec: str = "Z/3") -> "GroupSpec":
        g = AbelianGroup.parse(spec)
        return cls({i: g for i in range(1, r + 1)})

    @classmethod
    def from_strings(cls, specs: Mapping[int, str]) -> "GroupSpec":
        return cls({int(i): AbelianGroup.parse(s) for i, s in specs.items()})

    def check(self, r: int) -> None:
        if sorted(self) != list(range(1, r + 1)):
            raise ValueError(f"group specs {sorted(self)} do not cover factors 1..{r}")


def is_trivial(marker) -> bool:
    return marker is None or (marker != FLAG and not any(marker))


def merge_markers(group: AbelianGroup | None, a, b):
    """Product of two markers sitting at the same vertex visit."""
    if is_trivial(a):
        return None if is_trivial(b) else b
    if is_trivial(b):
        return a
    if a == FLAG or b == FLAG:
        raise ValueError("cannot multiply an unspecified (flagged) marker")
    if group is None:
        raise ValueError("nontrivial marker at a free vertex")
    out = group.mul(a, b)
    return None if not any(out) else out


def marker_key(marker) -> tuple:
    if is_trivial(marker):
        return (0,)
    if marker == FLAG:
        return (1,)
    return (2,) + tuple(marker)
