"""Sofic approximations as data, the defect/displacement check, the exact
arithmetic model of BS(1,m), block amplification and affine fixed-point
prediction.

The arithmetic model psi sends g = (e, num, d) to the permutation
x -> m^e * x - num * m^-d  (mod n); in particular psi(a_2) = x - 1 and
psi(a_1) = m^-1 x.  It is a homomorphism by construction, so its
multiplicativity defect is identically zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np

from .bsgroup import BsElement, Word, bs_a1, bs_a2, bs_identity, reduce_word
from .perm import HammingValue, Permutation, hamming

Key = Union[BsElement, Word]


@dataclass
class SoficApprox:
    """A finite partial map from group elements (or words) to permutations
    of one common degree."""

    n: int
    key_kind: str  # "element" | "word"
    table: Dict[Key, Permutation]

    def __post_init__(self) -> None:
        if self.key_kind not in ("element", "word"):
            raise ValueError(f"unknown key kind {self.key_kind!r}")
        for key, perm in self.table.items():
            if perm.n != self.n:
                raise ValueError(f"permutation for {key} has degree {perm.n} != {self.n}")
            if self.key_kind == "element" and not isinstance(key, BsElement):
                raise TypeError(f"element-kind table has non-element key {key!r}")

    @property
    def domain(self):
        return self.table.keys()

    def _sorted_keys(self):
        if self.key_kind == "element":
            return sorted(self.table, key=lambda g: g.sort_key())
        return sorted(self.table)

    def product_key(self, g: Key, h: Key) -> Key:
        if self.key_kind == "element":
            return g * h
        return reduce_word(tuple(g) + tuple(h))

    def is_identity_key(self, g: Key) -> bool:
        if self.key_kind == "element":
            return g.is_identity()
        return len(g) == 0

    def to_json(self) -> str:
        entries = []
        for key in self._sorted_keys():
            entries.append([_key_to_obj(key, self.key_kind), self.table[key].image.tolist()])
        return json.dumps({"n": self.n, "key_kind": self.key_kind, "entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "SoficApprox":
        data = json.loads(text)
        table = {}
        for key_obj, image in data["entries"]:
            table[_key_from_obj(key_obj, data["key_kind"])] = Permutation(image)
        return cls(int(data["n"]), data["key_kind"], table)


def _key_to_obj(key: Key, kind: str):
    if kind == "element":
        return {"m": key.m, "e": key.e, "num": key.num, "d": key.d}
    return [[gen, exp] for gen, exp in key]


def _key_from_obj(obj, kind: str) -> Key:
    if kind == "element":
        return BsElement(int(obj["m"]), int(obj["e"]), int(obj["num"]), int(obj["d"]))
    return tuple((gen, int(exp)) for gen, exp in obj)


# ---------------------------------------------------------------------------
# Definition check

@dataclass(frozen=True)
class SoficReport:
    n: int
    delta: Fraction
    max_defect: Optional[HammingValue]
    defect_witness: Optional[Tuple[Key, Key]]
    min_displacement: Optional[HammingValue]
    displacement_witness: Optional[Key]
    triples_checked: int
    passed: bool

    @property
    def vacuous(self) -> bool:
        return self.triples_checked == 0


def check_sofic(phi: SoficApprox, delta) -> SoficReport:
    """Measure the worst multiplicativity defect over triples (g, h, gh)
    inside the domain and the least displacement over non-identity keys."""
    if not phi.table:
        raise ValueError("empty domain")
    delta = Fraction(delta)
    keys = phi._sorted_keys()
    key_set = set(keys)

    max_defect: Optional[HammingValue] = None
    defect_witness = None
    triples = 0
    for g in keys:
        pg = phi.table[g]
        for h in keys:
            gh = phi.product_key(g, h)
            if gh not in key_set:
                continue
            triples += 1
            d = hamming(pg.compose(phi.table[h]), phi.table[gh])
            if max_defect is None or d > max_defect:
                max_defect, defect_witness = d, (g, h)

    min_disp: Optional[HammingValue] = None
    disp_witness = None
    ident = np.arange(phi.n)
    for g in keys:
        if phi.is_identity_key(g):
            continue
        d = HammingValue(int(np.count_nonzero(phi.table[g].image != ident)), phi.n)
        if min_disp is None or d < min_disp:
            min_disp, disp_witness = d, g

    ok_defect = max_defect is None or max_defect < delta
    ok_disp = min_disp is None or min_disp > 1 - delta
    return SoficReport(phi.n, delta, max_defect, defect_witness,
                       min_disp, disp_witness, triples, ok_defect and ok_disp)


# ---------------------------------------------------------------------------
# Arithmetic model

class ArithmeticModel:
    """Lazy exact homomorphism psi of BS(1,m) into Sym(n), gcd(m, n) = 1.

    Permutations are synthesized on demand from the normal form (e, num, d)
    and memoized; quasi-tiling runs query thousands of Folner elements.
    """

    def __init__(self, n: int, m: int):
        if n < 2:
            raise ValueError("degree must be >= 2")
        if gcd(m, n) != 1:
            raise ValueError(f"gcd({m}, {n}) != 1")
        self.n = n
        self.m = m
        self._cache: Dict[BsElement, Permutation] = {}

    def permutation(self, g: BsElement) -> Permutation:
        if g.m != self.m:
            raise ValueError(f"element base {g.m} != model base {self.m}")
        perm = self._cache.get(g)
        if perm is None:
            a = pow(self.m, g.e, self.n)
            b = g.num * pow(self.m, -g.d, self.n)
            img = (a * np.arange(self.n, dtype=np.int64) - b) % self.n
            perm = Permutation(img, _trusted=True)
            self._cache[g] = perm
        return perm

    def approx_on(self, S: Iterable[BsElement]) -> SoficApprox:
        return SoficApprox(self.n, "element", {g: self.permutation(g) for g in S})


def arithmetic_bs_approx(n: int, m: int, S: Iterable[BsElement]) -> SoficApprox:
    """Concrete table of the arithmetic model on a requested domain."""
    return ArithmeticModel(n, m).approx_on(S)


# ---------------------------------------------------------------------------
# Word evaluation

def _generator_images(phi: SoficApprox) -> Dict[str, Permutation]:
    if phi.key_kind == "word":
        out = {}
        for key, perm in phi.table.items():
            if len(key) == 1 and key[0][1] == 1:
                out[key[0][0]] = perm
        return out
    some = next(iter(phi.table))
    m = some.m
    out = {}
    for name, elem in (("a1", bs_a1(m)), ("a2", bs_a2(m))):
        if elem in phi.table:
            out[name] = phi.table[elem]
    return out


def eval_word(phi: SoficApprox, w: Word) -> Permutation:
    """Left-to-right composition under (g*h)(x) = g(h(x)).  Inverse letters
    use permutation inverses, so w * w^-1 cancels exactly for any phi."""
    gens = _generator_images(phi)
    result = Permutation.identity(phi.n)
    for gen, exp in w:
        if gen not in gens:
            raise KeyError(f"generator {gen!r} has no image in the approximation")
        result = result.compose(gens[gen] ** exp)
    return result


# ---------------------------------------------------------------------------
# Amplification

def amplify(phi: SoficApprox, target_n: int) -> SoficApprox:
    """r = floor(target_n / n) disjoint block copies, identity on the tail.

    Multiplicativity is unchanged on the blocks; displacement degrades by
    the tail fraction (target_n - r n) / target_n.
    """
    if target_n < phi.n:
        raise ValueError(f"target degree {target_n} < {phi.n}")
    r = target_n // phi.n
    rk = r * phi.n
    offsets = np.arange(r, dtype=np.int64)[:, None] * phi.n
    tail = np.arange(rk, target_n, dtype=np.int64)
    table = {}
    for key, perm in phi.table.items():
        img = np.concatenate([(perm.image[None, :] + offsets).reshape(-1), tail])
        table[key] = Permutation(img, _trusted=True)
    return SoficApprox(target_n, phi.key_kind, table)


# ---------------------------------------------------------------------------
# Affine fixed-point prediction

@dataclass(frozen=True)
class AffineFixedReport:
    a: int                 # dilation exponent of psi(w) = x -> m^a x + b
    b_residue: int         # b mod n
    b_exact: Fraction      # b as an m-adic rational
    count: int             # solutions of (m^a - 1) x = -b mod n
    word_is_identity: bool


def affine_fixed_points(w: Word, m: int, n: int) -> AffineFixedReport:
    """Symbolic affine data of psi(w) plus the predicted fixed-point count.

    x is fixed iff (m^a - 1) x = -b mod n: all n points when m^a = 1 and
    b = 0 mod n, otherwise gcd(m^a - 1, n) solutions when that gcd divides
    b, otherwise none.
    """
    if gcd(m, n) != 1:
        raise ValueError(f"gcd({m}, {n}) != 1")
    a = 0
    b = Fraction(0)
    for gen, exp in w:
        # compose on the right: current o psi(gen^exp)
        if gen == "a1":
            a -= exp
        elif gen == "a2":
            b = b  # no dilation
            # current(x') with x' = x - exp: b_new = m^a * (-exp) + b
            b = Fraction(m) ** a * (-exp) + b
        else:
            raise KeyError(f"generator {gen!r} not in the BS(1,m) model")
    # reduce b = num/m^dd mod n through the inverse of m
    num, den = b.numerator, b.denominator
    b_res = num * pow(den, -1, n) % n
    c = (pow(m, a, n) - 1) % n
    if c == 0:
        count = n if b_res == 0 else 0
    else:
        g = gcd(c, n)
        count = g if (-b_res) % g == 0 else 0
    return AffineFixedReport(a, b_res, b, count, a == 0 and b == 0)
