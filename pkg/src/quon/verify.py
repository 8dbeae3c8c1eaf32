"""Cross-module consistency suites behind ``quon verify``.

Each suite counts individual checks and keeps the first few failure
messages.  Sizes grow with ``max_n``; exhaustive enumeration stops at
:data:`EXHAUSTIVE_LIMIT` quanta and random sampling (fixed seed) covers
longer words.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fock import apply, inner_product, sandwich, vev_qpermanent, vev_rewrite
from .models import (
    OscillatorConfig, ROTOR_OPERATORS, occupancies, operator_element,
    oscillator_degeneracy, oscillator_energy, oscillator_full_solve,
    rotor_occupancy,
)
from .qnum import QPoly, q_bracket, q_bracket_poly, q_factorial
from .symsector import (
    DEFAULT_CAP, CapExceeded, OccupancyVector, berkowitz_charpoly,
    charpoly_from_roots, classify_sectors, enumerate_permutation_words,
    gram_matrix, lower_symmetric, symmetric_state, symmetrized_norm_poly,
    symmetrized_word,
)

EXHAUSTIVE_LIMIT = 5
SAMPLED_Q = (-0.9, -0.5, 0.0, 0.5, 0.9, 0.99)
MODES = (1, 2, 3)

DISTINCT3_ROOTS = (
    (QPoly((1, 2, 2, 1)), 1),
    (QPoly((1, -2, 2, -1)), 1),
    (QPoly((1, 1, -1, -1)), 2),
    (QPoly((1, -1, -1, 1)), 2),
)
DISTINCT2_ROOTS = ((QPoly((1, 1)), 1), (QPoly((1, -1)), 1))


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list[str] = field(default_factory=list)

    def check(self, ok: bool, message: str) -> None:
        self.total += 1
        if ok:
            self.passed += 1
        elif len(self.failures) < 5:
            self.failures.append(message)

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def all_occupancies(max_n: int, modes=MODES, min_n: int = 1) -> list[OccupancyVector]:
    out = []
    for n in range(min_n, max_n + 1):
        out.extend(occupancies(n, modes))
    return out


def words_up_to(length: int, modes=MODES):
    return list(itertools.product(modes, repeat=length))


def oracle_suite(max_n: int, samples: int = 200, seed: int = 0) -> SuiteResult:
    """Crossing-weighted permanent against the rewrite engine, exactly."""
    res = SuiteResult("oracle")
    for n in range(min(max_n, EXHAUSTIVE_LIMIT) + 1):
        words = words_up_to(n)
        for bra in words:
            for ket in words:
                a = vev_qpermanent(bra, ket)
                b = vev_rewrite(sandwich(bra, ket))
                res.check(a == b, f"{bra} vs {ket}: {a} != {b}")
    rng = random.Random(seed)
    for n in range(EXHAUSTIVE_LIMIT + 1, max_n + 1):
        for _ in range(samples):
            ket = tuple(rng.choice(MODES) for _ in range(n))
            bra = list(ket)
            rng.shuffle(bra)
            a = vev_qpermanent(bra, ket)
            b = vev_rewrite(sandwich(bra, ket))
            res.check(a == b, f"{tuple(bra)} vs {ket}: {a} != {b}")
    return res


def induction_suite(max_n: int) -> SuiteResult:
    """``a_i S_N(...)|0> = [N] S_{N-1}(... n_i - 1 ...)|0>`` word by word."""
    res = SuiteResult("induction")
    for occ in all_occupancies(max_n):
        sym = symmetrized_word(occ)
        bracket = q_bracket_poly(occ.total)
        for mode in MODES:
            lowered = apply(((mode, False),), sym)
            if occ.get(mode, 0) == 0:
                res.check(len(lowered) == 0, f"a_{mode} on {occ} should vanish")
                continue
            expected = symmetrized_word(occ.shifted(mode, -1)).scale(bracket)
            res.check(lowered == expected, f"a_{mode} S{occ}: {lowered} != {expected}")
    return res


def norm_suite(max_n: int, qs=SAMPLED_Q, tol: float = 1e-10) -> SuiteResult:
    """Unit norm of symmetric states and the lowering coefficient."""
    res = SuiteResult("norm")
    for occ in all_occupancies(max_n):
        exact = inner_product(symmetrized_word(occ), symmetrized_word(occ))
        res.check(exact == symmetrized_norm_poly(occ),
                  f"{occ}: un-normalized norm {exact} != {symmetrized_norm_poly(occ)}")
        for q in qs:
            state = symmetric_state(occ, q)
            norm = inner_product(state, state, q)
            res.check(abs(norm - 1.0) < tol, f"{occ} q={q}: norm {norm}")
            for mode in occ:
                coef, lower_occ = lower_symmetric(occ, mode, q)
                target = symmetric_state(lower_occ, q) if lower_occ.total else None
                lowered = apply(((mode, False),), state, q)
                if target is None:
                    proj = lowered[()]
                else:
                    proj = inner_product(target, lowered, q)
                res.check(abs(proj - coef) < tol,
                          f"{occ} a_{mode} q={q}: projection {proj} vs {coef}")
    return res


def gram_suite(max_n: int, qs=SAMPLED_Q, tol: float = 1e-10) -> SuiteResult:
    """Exact Gram eigenvalue polynomials and sector structure."""
    res = SuiteResult("gram")
    for words, roots in ((enumerate_permutation_words({1: 1, 2: 1}), DISTINCT2_ROOTS),
                         (enumerate_permutation_words({1: 1, 2: 1, 3: 1}), DISTINCT3_ROOTS)):
        if len(words[0]) > max_n:
            continue
        cp = berkowitz_charpoly(gram_matrix(words))
        res.check(cp == charpoly_from_roots(roots),
                  f"characteristic polynomial for {len(words[0])} distinct modes")
    for occ in all_occupancies(max_n):
        words = enumerate_permutation_words(occ)
        for q in qs:
            if not -1 < q < 1:
                continue
            G = gram_matrix(words, q)
            spec = classify_sectors(G, words)
            res.check(sum(spec.multiplicities) == len(words), f"{occ} q={q}: multiplicities")
            res.check(min(spec.eigenvalues) > -tol, f"{occ} q={q}: negative eigenvalue")
            sym = spec.sector("symmetric").eigenvalue
            target = q_factorial(occ.total, q) * math.factorial(occ.total) / occ.count_product() / len(words)
            res.check(abs(sym - target) < 1e-9 * max(1.0, target),
                      f"{occ} q={q}: symmetric eigenvalue {sym} vs {target}")
            V = spec.eigenvectors
            res.check(np.allclose(V.T @ V, np.eye(len(words)), atol=tol),
                      f"{occ} q={q}: eigenvectors not orthonormal")
            res.check(np.allclose(V.T @ G @ V, np.diag(np.diag(V.T @ G @ V)), atol=1e-9),
                      f"{occ} q={q}: sectors mix")
    return res


def oscillator_suite(max_n: int, qs=(0.5, 0.9, 0.99, 1.0)) -> SuiteResult:
    """Closed-form symmetric oscillator energy against the full solve."""
    res = SuiteResult("oscillator")
    for n in range(1, min(max_n, 3) + 1):
        for q in qs:
            cfg = OscillatorConfig(q)
            sol = oscillator_full_solve(n, cfg)
            sym = sol.sector_levels("symmetric")
            expect = oscillator_energy(n, cfg)
            res.check(len(sym) == 1 and abs(sym[0].energy - expect) <= 1e-9 * expect,
                      f"N={n} q={q}: symmetric levels {sym} vs {expect}")
            res.check(len(sym) == 1 and sym[0].degeneracy == oscillator_degeneracy(n),
                      f"N={n} q={q}: symmetric degeneracy")
            if q == 1.0:
                res.check(all(lv.sector == "symmetric" for lv in sol.levels),
                          f"N={n}: non-symmetric sectors survive at q=1")
    return res


def rotor_suite(max_n: int, qs=(0.5, 0.9, 0.99478, 1.0), tol: float = 1e-10) -> SuiteResult:
    """Angular-momentum identities between symmetric two-mode states."""
    res = SuiteResult("rotor")
    for n in range(1, max_n + 1):
        states = [(p, n - p) for p in range(n + 1)]
        for q in qs:
            kappa = q_bracket(n, q) / n
            big = q_bracket(n, q) / 2
            for ket in states:
                for bra in states:
                    b, k = rotor_occupancy(*bra), rotor_occupancy(*ket)
                    el = {name: operator_element(op, b, k, q)
                          for name, op in ROTOR_OPERATORS.items()}
                    diag = bra == ket
                    res.check(abs(el["[L+,L-]"] - 2 * el["L0"]) < tol,
                              f"N={n} q={q} {bra}|{ket}: [L+,L-] != 2L0")
                    res.check(abs(el["[L0,L+]"] - el["L+"]) < tol,
                              f"N={n} q={q} {bra}|{ket}: [L0,L+] != L+")
                    res.check(abs(el["[L0,L-]"] + el["L-"]) < tol,
                              f"N={n} q={q} {bra}|{ket}: [L0,L-] != -L-")
                    l2 = big * (big + 1) if diag else 0.0
                    res.check(abs(el["L2"] - l2) < tol, f"N={n} q={q} {bra}|{ket}: L2")
                    if diag:
                        two_l0 = kappa * (ket[0] - ket[1])
                        res.check(abs(2 * el["L0"] - two_l0) < tol,
                                  f"N={n} q={q} {ket}: 2L0 {2 * el['L0']} vs {two_l0}")
    return res


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    "oracle": oracle_suite,
    "induction": induction_suite,
    "norm": norm_suite,
    "gram": gram_suite,
    "oscillator": oscillator_suite,
    "rotor": rotor_suite,
}


def run_suites(names, max_n: int, cap: int = DEFAULT_CAP) -> list[SuiteResult]:
    if max_n > cap:
        raise CapExceeded(f"max-n {max_n} exceeds the cap of {cap}")
    if max_n < 1:
        raise ValueError("max-n must be at least 1")
    return [SUITES[name](max_n) for name in names]
