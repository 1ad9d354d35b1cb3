"""Constructive approximate conjugacy of two sofic approximations.

Both approximations are quasi-tiled with the same Folner shapes; tile
families are trimmed to genuinely disjoint cores, center counts are
equalized per level, matched tiles are mapped point-to-point through their
shared generator coordinates, and the remaining points are matched
order-preservingly.  The resulting bijection tau conjugates phi1 into phi2
up to a small Hamming defect, which is measured exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .perm import HammingValue, Permutation, hamming, orbit_order
from .soficcheck import Key, SoficApprox
from .tiling import Tiling, _key_sorter, quasi_tile


class InsufficientSupportError(ValueError):
    """The matched supports cover less than the required (1 - 4 eps / 7) n."""


@dataclass(frozen=True)
class ConjLevel:
    j: int
    pairs: Tuple[Tuple[int, int], ...]          # (c in C'_1j, rho_j(c) in C'_2j)
    trimmed: Tuple[Tuple[Key, ...], ...]        # F_{j,c} per pair, sorted


@dataclass(frozen=True)
class Conjugator:
    tau: Permutation
    lambda1: frozenset
    lambda2: frozenset
    levels: Tuple[ConjLevel, ...]
    eps: Fraction
    tiling1: Tiling
    tiling2: Tiling

    def support_fraction(self) -> Fraction:
        return Fraction(len(self.lambda1), self.tau.n)

    def to_json(self) -> str:
        return json.dumps({
            "n": self.tau.n,
            "eps": [self.eps.numerator, self.eps.denominator],
            "tau": self.tau.image.tolist(),
            "lambda1": sorted(self.lambda1),
            "lambda2": sorted(self.lambda2),
        })


def _witness_cores(t: Tiling) -> Dict[Tuple[int, int], set]:
    """Per tile (j, c): the generators g whose point phi(g)c avoids every
    tile placed earlier, replaying the construction order (level k down to
    1, centers in selection order).  These core point sets are pairwise
    disjoint across the whole family."""
    cores: Dict[Tuple[int, int], set] = {}
    used = np.zeros(t.n, dtype=bool)
    for lvl in reversed(t.levels):
        imgs = {g: t.table[g].image for g in lvl.shape}
        for c in lvl.centers:
            core = {g for g, img in imgs.items() if not used[img[c]]}
            cores[(lvl.j, c)] = core
            for g in lvl.shape:
                used[imgs[g][c]] = True
    return cores


def build_conjugator(phi1: SoficApprox, phi2: SoficApprox, eps,
                     folner_seq: Sequence[Iterable[Key]],
                     *, inner_eps=None, inner_kappa=None,
                     n_threshold: Optional[int] = None,
                     delta_prime=Fraction(1, 4),
                     support_threshold=None,
                     maximal: bool = True,
                     order_key: Optional[Key] = None) -> Conjugator:
    """Quasi-tile both approximations (at eps/7 by default, per the
    analysis behind the defect bound; inner_eps overrides) and assemble tau.

    order_key names a generator whose image's orbit structure sets the
    greedy center priority on each side.  Relabeling one approximation by a
    conjugation then relabels its whole tiling up to cycle phase, so the two
    tilings stay structurally aligned and the matched support stays large.
    By default the tilings run in maximal packing mode for the same reason.

    Raises InsufficientSupportError when the matched supports fall below
    (1 - 4 eps / 7) n (override via support_threshold).
    """
    if phi1.n != phi2.n:
        raise ValueError(f"degrees {phi1.n} != {phi2.n}")
    if phi1.key_kind != phi2.key_kind:
        raise ValueError("key kinds differ")
    eps = Fraction(eps)
    e_t = Fraction(inner_eps) if inner_eps is not None else eps / 7
    k_t = Fraction(inner_kappa) if inner_kappa is not None else e_t
    n = phi1.n

    order1 = order2 = None
    if order_key is not None:
        order1 = orbit_order(phi1.table[order_key])
        order2 = orbit_order(phi2.table[order_key])
    t1 = quasi_tile(phi1, folner_seq, e_t, k_t, n_threshold=n_threshold,
                    delta_prime=delta_prime, maximal=maximal, center_order=order1)
    t2 = quasi_tile(phi2, folner_seq, e_t, k_t, n_threshold=n_threshold,
                    delta_prime=delta_prime, maximal=maximal, center_order=order2)
    cores1 = _witness_cores(t1)
    cores2 = _witness_cores(t2)

    tau_img = np.full(n, -1, dtype=np.int64)
    lambda1: List[int] = []
    lambda2: List[int] = []
    levels: List[ConjLevel] = []
    for lvl1, lvl2 in zip(t1.levels, t2.levels):
        j = lvl1.j
        m_count = min(len(lvl1.centers), len(lvl2.centers))
        # keep the centers with the largest disjoint cores and pair them in
        # that order, so interior tiles match interior tiles
        rank1 = sorted(lvl1.centers, key=lambda c: (-len(cores1[(j, c)]), c))
        rank2 = sorted(lvl2.centers, key=lambda c: (-len(cores2[(j, c)]), c))
        c1s = rank1[:m_count]
        c2s = rank2[:m_count]
        pairs = []
        trimmed = []
        sorter = _key_sorter(phi1.key_kind)
        for c, cp in zip(c1s, c2s):
            shared = sorted(cores1[(j, c)] & cores2[(j, cp)], key=sorter)
            pairs.append((c, cp))
            trimmed.append(tuple(shared))
            for g in shared:
                x = int(phi1.table[g].image[c])
                y = int(phi2.table[g].image[cp])
                tau_img[x] = y
                lambda1.append(x)
                lambda2.append(y)
        levels.append(ConjLevel(j, tuple(pairs), tuple(trimmed)))

    if support_threshold is None:
        support_threshold = (1 - 4 * eps / 7) * n
    if len(lambda1) < support_threshold:
        raise InsufficientSupportError(
            f"matched support {len(lambda1)}/{n} below {float(support_threshold):.1f}")

    # order-preserving extension between the complements
    free1 = np.flatnonzero(tau_img < 0)
    used2 = np.zeros(n, dtype=bool)
    used2[np.array(lambda2, dtype=np.int64)] = True
    free2 = np.flatnonzero(~used2)
    tau_img[free1] = free2
    tau = Permutation(tau_img)

    return Conjugator(tau, frozenset(lambda1), frozenset(lambda2),
                      tuple(levels), eps, t1, t2)


@dataclass(frozen=True)
class DefectReport:
    per_key: Dict[Key, HammingValue]
    max_defect: HammingValue
    eps: Fraction
    passed: bool


def conjugacy_defect(c: Conjugator, phi1: SoficApprox, phi2: SoficApprox,
                     S: Iterable[Key]) -> DefectReport:
    """max over s in S of d_h(tau phi1(s) tau^-1, phi2(s)); pass iff <= eps."""
    S = list(S)
    if not S:
        raise ValueError("empty key set")
    missing = [s for s in S if s not in phi1.table or s not in phi2.table]
    if missing:
        raise KeyError(f"keys missing from an approximation: {missing}")
    tau_inv = c.tau.inverse()
    per: Dict[Key, HammingValue] = {}
    worst: Optional[HammingValue] = None
    for s in S:
        d = hamming(c.tau.compose(phi1.table[s]).compose(tau_inv), phi2.table[s])
        per[s] = d
        if worst is None or d > worst:
            worst = d
    return DefectReport(per, worst, c.eps, worst <= c.eps)
