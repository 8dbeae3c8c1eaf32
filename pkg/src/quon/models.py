"""Quonic 3-D harmonic oscillator and quonic rotor.

Oscillator modes ``+, -, 0`` are indices ``0, 1, 2``; the rotor uses modes
``+`` and ``-`` only.  Closed-form spectra hold in the symmetric subspace;
:func:`oscillator_full_solve` rebuilds the oscillator spectrum from the full
non-orthonormal word basis and is the cross-check for the closed form.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .fock import MixedWord, sandwich, vev_rewrite
from .qnum import check_q, q_bracket
from .symsector import (
    CapExceeded, OccupancyVector, classify_sectors, enumerate_permutation_words,
    gram_matrix, symmetric_matrix_element,
)

PLUS, MINUS, ZERO_MODE = 0, 1, 2
OSCILLATOR_CAP = 6
COND_LIMIT = 1e12
ENERGY_TOL = 1e-9


@dataclass(frozen=True)
class OscillatorConfig:
    q: float = 1.0
    hbar_omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "q", check_q(self.q))
        if not self.hbar_omega > 0:
            raise ValueError("hbar_omega must be positive")


@dataclass(frozen=True)
class RotorConfig:
    q: float = 1.0
    inertia_A: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "q", check_q(self.q))
        if not self.inertia_A > 0:
            raise ValueError("inertia_A must be positive")


@dataclass(frozen=True)
class EnergyLevel:
    quantum_numbers: Mapping[str, int]
    energy: float
    degeneracy: int = 1
    sector: str = "symmetric"


def oscillator_energy(n: int, cfg: OscillatorConfig) -> float:
    """``(hbar w / 2) ([N](1 + q) + 3)`` for the symmetric sector."""
    if n < 0:
        raise ValueError("N must be non-negative")
    return 0.5 * cfg.hbar_omega * (q_bracket(n, cfg.q) * (1.0 + cfg.q) + 3.0)


def oscillator_degeneracy(n: int) -> int:
    if n < 0:
        raise ValueError("N must be non-negative")
    return (n + 1) * (n + 2) // 2


def oscillator_spectrum(n_max: int, cfg: OscillatorConfig) -> list[EnergyLevel]:
    return [EnergyLevel({"N": n}, oscillator_energy(n, cfg), oscillator_degeneracy(n))
            for n in range(n_max + 1)]


def occupancies(n: int, modes: Sequence[int]) -> list[OccupancyVector]:
    """All occupancies of ``modes`` with ``n`` quanta in total."""
    out = []
    for counts in itertools.product(range(n + 1), repeat=len(modes)):
        if sum(counts) == n:
            out.append(OccupancyVector(zip(modes, counts)))
    return out


_NUMBER_TERMS: tuple[MixedWord, ...] = tuple(
    ((m, True), (m, False)) for m in (PLUS, MINUS, ZERO_MODE))


def _family(label: str) -> str:
    return "mixed" if label.startswith("mixed") else label


@dataclass
class OscillatorSolution:
    levels: list[EnergyLevel]
    condition_number: float
    sector_leakage: float = field(default=0.0)

    def sector_levels(self, family: str) -> list[EnergyLevel]:
        return [lv for lv in self.levels if lv.sector == family]


def _group_levels(entries: Iterable[tuple[float, str]], n: int) -> list[EnergyLevel]:
    levels: list[EnergyLevel] = []
    for family in ("symmetric", "antisymmetric", "mixed"):
        energies = sorted(e for e, f in entries if f == family)
        start = 0
        for k in range(1, len(energies) + 1):
            ref = energies[start]
            if k == len(energies) or abs(energies[k] - ref) > ENERGY_TOL * max(1.0, abs(ref)):
                group = energies[start:k]
                levels.append(EnergyLevel({"N": n}, float(np.mean(group)),
                                          len(group), family))
                start = k
    levels.sort(key=lambda lv: (lv.energy, lv.sector))
    return levels


def oscillator_full_solve(n: int, cfg: OscillatorConfig,
                          sector_filter: Optional[str] = None,
                          cap: int = OSCILLATOR_CAP,
                          threads: int = 1) -> OscillatorSolution:
    """Spectrum at ``n`` quanta from the full word basis over three modes.

    For each occupancy the Gram matrix ``S`` and Hamiltonian matrix ``H``
    (entries from :func:`~quon.fock.vev_rewrite`) are built over all distinct
    orderings.  ``S`` is diagonalized sector by sector, null directions are
    dropped, and ``H`` is solved in the orthonormalized surviving basis of
    each symmetry family.
    """
    if n < 1:
        raise ValueError("full solve needs N >= 1")
    if n > cap:
        raise CapExceeded(f"N={n} exceeds the oscillator cap of {cap}")
    q, half = cfg.q, 0.5 * cfg.hbar_omega
    entries: list[tuple[float, str]] = []
    cond, leakage = 1.0, 0.0
    for occ in occupancies(n, (PLUS, MINUS, ZERO_MODE)):
        words = enumerate_permutation_words(occ, cap=cap)
        S = gram_matrix(words, q, threads=threads)
        number = np.array([[sum(vev_rewrite(sandwich(wa, wb, t), q) for t in _NUMBER_TERMS)
                            for wb in words] for wa in words])
        H = half * ((1.0 + q) * number + 3.0 * S)
        spec = classify_sectors(S, words)
        kept = [c for c in spec.clusters if not c.null]
        if not kept:
            continue
        vals = [c.eigenvalue for c in kept]
        cond = max(cond, max(vals) / min(vals))
        if cond > COND_LIMIT:
            raise np.linalg.LinAlgError(
                f"overlap matrix too ill-conditioned (cond={cond:.3g}) at q={q}")
        blocks: dict[str, list[np.ndarray]] = {}
        for c in kept:
            blocks.setdefault(_family(c.label), []).append(c.vectors / math.sqrt(c.eigenvalue))
        full = np.hstack([b for bs in blocks.values() for b in bs])
        Hfull = full.T @ H @ full
        offset = 0
        for family, bs in blocks.items():
            B = np.hstack(bs)
            width = B.shape[1]
            Hb = Hfull[offset:offset + width, offset:offset + width]
            outside = np.delete(Hfull[offset:offset + width], range(offset, offset + width), axis=1)
            if outside.size:
                leakage = max(leakage, float(np.max(np.abs(outside))))
            offset += width
            if sector_filter is not None and family != sector_filter:
                continue
            for e in np.linalg.eigvalsh((Hb + Hb.T) / 2):
                entries.append((float(e), family))
    return OscillatorSolution(_group_levels(entries, n), cond, leakage)


# Rotor: operators are {word: coefficient} maps over modes PLUS and MINUS.

Operator = dict[MixedWord, float]

L_PLUS: Operator = {((PLUS, True), (MINUS, False)): 1.0}
L_MINUS: Operator = {((MINUS, True), (PLUS, False)): 1.0}
L_ZERO: Operator = {((PLUS, True), (PLUS, False)): 0.5,
                    ((MINUS, True), (MINUS, False)): -0.5}


def op_product(*ops: Operator) -> Operator:
    out: Operator = {(): 1.0}
    for op in ops:
        nxt: Operator = {}
        for w1, c1 in out.items():
            for w2, c2 in op.items():
                nxt[w1 + w2] = nxt.get(w1 + w2, 0.0) + c1 * c2
        out = nxt
    return out


def op_sum(*terms: tuple[float, Operator]) -> Operator:
    out: Operator = {}
    for scale, op in terms:
        for w, c in op.items():
            out[w] = out.get(w, 0.0) + scale * c
    return out


def commutator(a: Operator, b: Operator) -> Operator:
    return op_sum((1.0, op_product(a, b)), (-1.0, op_product(b, a)))


L_SQUARED: Operator = op_sum(
    (1.0, op_product(L_ZERO, L_ZERO)),
    (0.5, op_product(L_PLUS, L_MINUS)),
    (0.5, op_product(L_MINUS, L_PLUS)),
)

ROTOR_OPERATORS: dict[str, Operator] = {
    "L+": L_PLUS,
    "L-": L_MINUS,
    "L0": L_ZERO,
    "L2": L_SQUARED,
    "[L+,L-]": commutator(L_PLUS, L_MINUS),
    "[L0,L+]": commutator(L_ZERO, L_PLUS),
    "[L0,L-]": commutator(L_ZERO, L_MINUS),
}


def rotor_occupancy(n_plus: int, n_minus: int) -> OccupancyVector:
    return OccupancyVector({PLUS: n_plus, MINUS: n_minus})


def operator_element(op: Operator, bra, ket, q: float) -> float:
    return sum(c * symmetric_matrix_element(bra, w, ket, q) for w, c in op.items())


def rotor_matrix_elements(bra: tuple[int, int], ket: tuple[int, int],
                          q: float) -> dict[str, float]:
    """Symmetric-subspace elements ``<bra; S| X |ket; S>`` of the rotor operators.

    ``bra`` and ``ket`` are ``(n_plus, n_minus)`` pairs.
    """
    b, k = rotor_occupancy(*bra), rotor_occupancy(*ket)
    return {name: operator_element(op, b, k, q) for name, op in ROTOR_OPERATORS.items()}


def _check_l(l) -> int:
    if isinstance(l, float) and not l.is_integer():
        raise ValueError("half-integer l is not supported; bands use integer l")
    if int(l) != l or l < 0:
        raise ValueError("l must be a non-negative integer")
    return int(l)


def rotor_shape(l: int, q) -> float:
    """``([2l]/2)([2l]/2 + 1)``, the energy per unit inertia constant."""
    half = 0.5 * q_bracket(2 * _check_l(l), q)
    return half * (half + 1.0)


def rotor_energy(l: int, cfg: RotorConfig) -> float:
    return cfg.inertia_A * rotor_shape(l, cfg.q)


def rotor_spectrum(l_values: Iterable[int], cfg: RotorConfig) -> list[EnergyLevel]:
    return [EnergyLevel({"l": l}, rotor_energy(l, cfg), 2 * l + 1) for l in l_values]
