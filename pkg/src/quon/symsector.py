"""Permutation-symmetry sectors of many-quon states.

The distinct orderings of a creation word form a non-orthonormal basis.  Its
overlap (Gram) matrix commutes with relabelling of the modes, so the
all-ones vector (symmetric) and, for all-distinct modes, the sign vector
(antisymmetric) are eigenvectors; everything else is mixed symmetry.

The symmetric sector has closed forms: the normalized state built from the
symmetrizer and the lowering rule
``a_i |n; S> = sqrt([N]/N) sqrt(n_i) |n - e_i; S>``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from . import kernels
from .fock import CreationWord, FockVector, MixedWord, normal_order
from .qnum import QPoly, check_q, q_bracket, q_factorial, q_factorial_poly

DEFAULT_CAP = 8
NULL_THRESHOLD = 1e-10
CLUSTER_TOL = 1e-9
LABEL_TOL = 1e-8


class CapExceeded(ValueError):
    """Raised when a request would enumerate more quanta than allowed."""


class OccupancyVector(Mapping[int, int]):
    """Immutable mode -> count map; modes with zero count are dropped."""

    __slots__ = ("_items",)

    def __init__(self, counts: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = counts.items() if isinstance(counts, Mapping) else counts
        acc: dict[int, int] = {}
        for mode, n in items:
            mode, n = int(mode), int(n)
            if mode < 0 or n < 0:
                raise ValueError("modes and counts must be non-negative")
            acc[mode] = acc.get(mode, 0) + n
        self._items = tuple(sorted((m, n) for m, n in acc.items() if n))

    @classmethod
    def parse(cls, specs: Sequence[str]) -> "OccupancyVector":
        """Build from ``["1:2", "2:1"]`` style tokens."""
        pairs = []
        for tok in specs:
            mode, sep, count = tok.partition(":")
            if not sep:
                raise ValueError(f"expected mode:count, got {tok!r}")
            try:
                pairs.append((int(mode), int(count)))
            except ValueError:
                raise ValueError(f"expected mode:count, got {tok!r}") from None
        return cls(pairs)

    def __getitem__(self, mode: int) -> int:
        for m, n in self._items:
            if m == mode:
                return n
        raise KeyError(mode)

    def get(self, mode, default=0):
        try:
            return self[mode]
        except KeyError:
            return default

    def __iter__(self) -> Iterator[int]:
        return (m for m, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return hash(self._items)

    def __eq__(self, other) -> bool:
        if isinstance(other, OccupancyVector):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == OccupancyVector(other)
        return NotImplemented

    @property
    def total(self) -> int:
        return sum(n for _, n in self._items)

    def shifted(self, mode: int, delta: int) -> "OccupancyVector":
        counts = dict(self._items)
        counts[mode] = counts.get(mode, 0) + delta
        if counts[mode] < 0:
            raise ValueError(f"mode {mode} would have negative occupancy")
        return OccupancyVector(counts)

    def word(self) -> CreationWord:
        """Canonical ordering ``(a+_i)^{n_i} (a+_j)^{n_j} ...``."""
        return tuple(m for m, n in self._items for _ in range(n))

    def count_product(self) -> int:
        return math.prod(math.factorial(n) for _, n in self._items)

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{m}:{n}" for m, n in self._items) + "}"


def _as_occ(occ) -> OccupancyVector:
    return occ if isinstance(occ, OccupancyVector) else OccupancyVector(occ)


def _multiset_permutations(items: list[int]) -> Iterator[tuple[int, ...]]:
    """Distinct permutations of a sorted list, in lexicographic order."""
    a = list(items)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1:] = reversed(a[i + 1:])


def enumerate_permutation_words(occ, cap: int = DEFAULT_CAP) -> list[CreationWord]:
    occ = _as_occ(occ)
    if occ.total < 1:
        raise ValueError("need at least one quon")
    if occ.total > cap:
        raise CapExceeded(f"N={occ.total} exceeds the cap of {cap} quanta")
    return list(_multiset_permutations(list(occ.word())))


def _row_chunks(m: int, threads: int) -> list[tuple[int, int]]:
    threads = max(1, min(threads, m))
    bounds = np.linspace(0, m, threads + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _fill(fn, args, m: int, threads: int) -> None:
    chunks = _row_chunks(m, threads)
    if len(chunks) <= 1:
        for a, b in chunks:
            fn(*args, a, b)
        return
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        for fut in [pool.submit(fn, *args, a, b) for a, b in chunks]:
            fut.result()


def gram_matrix(words: Sequence[CreationWord], q: Optional[float] = None,
                threads: int = 1):
    """Overlap matrix ``<words[a] | words[b]>``.

    Returns a float ndarray at a numeric ``q``; with ``q=None`` returns a
    nested tuple of exact :class:`QPoly` entries.  Rows are split across
    ``threads`` workers; the result does not depend on the split.
    """
    arr = np.asarray(words, dtype=np.int32).reshape(len(words), -1)
    m, n = arr.shape
    if q is None:
        deg = n * (n - 1) // 2 + 1
        out = np.zeros((m, m, deg), dtype=np.int64)
        _fill(kernels.fill_gram_coeffs, (arr, out), m, threads)
        return tuple(tuple(QPoly(out[i, j].tolist()) for j in range(m))
                     for i in range(m))
    out = np.zeros((m, m), dtype=np.float64)
    _fill(kernels.fill_gram_float, (arr, float(q), out), m, threads)
    return out


def permutation_sign(word: Sequence[int]) -> int:
    """Sign of the permutation sorting ``word`` (distinct entries)."""
    sign = 1
    w = list(word)
    for i in range(len(w)):
        for j in range(i + 1, len(w)):
            if w[i] > w[j]:
                sign = -sign
    return sign


def sector_directions(words: Sequence[CreationWord]):
    """Unit symmetric vector and, for all-distinct modes, the sign vector."""
    m = len(words)
    sym = np.full(m, 1.0 / math.sqrt(m))
    anti = None
    if m > 1 and all(len(set(w)) == len(w) for w in words):
        anti = np.array([permutation_sign(w) for w in words], float) / math.sqrt(m)
    return sym, anti


@dataclass(frozen=True)
class SectorCluster:
    eigenvalue: float
    multiplicity: int
    label: str
    vectors: np.ndarray = field(repr=False)
    null: bool = False
    exact: Optional[QPoly] = None


@dataclass(frozen=True)
class GramSpectrum:
    """Eigen-clusters of a Gram matrix with permutation-symmetry labels."""

    clusters: tuple[SectorCluster, ...]

    @property
    def eigenvalues(self) -> list[float]:
        return [c.eigenvalue for c in self.clusters]

    @property
    def multiplicities(self) -> list[int]:
        return [c.multiplicity for c in self.clusters]

    @property
    def sector_labels(self) -> list[str]:
        return [c.label for c in self.clusters]

    @property
    def eigenvectors(self) -> np.ndarray:
        return np.hstack([c.vectors for c in self.clusters])

    @property
    def exact_polys(self) -> list[Optional[QPoly]]:
        return [c.exact for c in self.clusters]

    def sector(self, label: str) -> SectorCluster:
        for c in self.clusters:
            if c.label == label:
                return c
        raise KeyError(label)

    def non_null(self) -> list[SectorCluster]:
        return [c for c in self.clusters if not c.null]


def _cluster(vals: np.ndarray, vecs: np.ndarray, tol: float, scale: float):
    """Group descending eigenvalues that agree within ``tol * scale``."""
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    groups = []
    start = 0
    for k in range(1, len(vals) + 1):
        if k == len(vals) or abs(vals[k] - vals[start]) > tol * scale:
            groups.append((float(np.mean(vals[start:k])), vecs[:, start:k]))
            start = k
    return groups


def classify_sectors(gram: np.ndarray, words: Sequence[CreationWord],
                     tol: float = CLUSTER_TOL,
                     null_threshold: float = NULL_THRESHOLD) -> GramSpectrum:
    """Diagonalize ``gram`` sector by sector and label the clusters.

    ``words`` fixes how permutations act on the basis.  The symmetric and
    antisymmetric directions are split off first, so degeneracies between
    sectors (at ``q = 0`` everything is degenerate) cannot blur the labels.
    Clusters below ``null_threshold`` times the largest eigenvalue are
    flagged null.
    """
    gram = np.asarray(gram, dtype=float)
    m = gram.shape[0]
    if gram.shape != (m, m) or len(words) != m:
        raise ValueError("gram must be square and match the word list")
    sym, anti = sector_directions(words)
    fixed = [("symmetric", sym)] + ([("antisymmetric", anti)] if anti is not None else [])
    raw = [(label, float(v @ gram @ v), v[:, None]) for label, v in fixed]
    basis = np.column_stack([v for _, v in fixed])
    comp = null_space(basis.T) if m > basis.shape[1] else np.zeros((m, 0))
    mixed_groups = []
    if comp.shape[1]:
        block = comp.T @ gram @ comp
        vals, vecs = np.linalg.eigh((block + block.T) / 2)
        mixed_groups = vals, comp @ vecs
    scale = max([abs(v) for _, v, _ in raw]
                + ([float(np.max(np.abs(mixed_groups[0])))] if comp.shape[1] else []))
    scale = scale or 1.0
    clusters = [SectorCluster(val, 1, label, vec, abs(val) < null_threshold * scale)
                for label, val, vec in raw]
    if comp.shape[1]:
        for k, (val, vecs) in enumerate(_cluster(*mixed_groups, tol, scale), 1):
            clusters.append(SectorCluster(val, vecs.shape[1], f"mixed({k})", vecs,
                                          abs(val) < null_threshold * scale))
    clusters.sort(key=lambda c: -c.eigenvalue)
    return GramSpectrum(tuple(clusters))


def label_projection(vectors: np.ndarray, direction: np.ndarray) -> float:
    """Squared norm of the projection of a unit ``direction`` onto a span."""
    return float(np.sum((vectors.T @ direction) ** 2))


def berkowitz_charpoly(matrix: Sequence[Sequence[QPoly]]) -> list[QPoly]:
    """Coefficients of ``det(x I - M)`` (highest power first), division free."""
    n = len(matrix)
    if n == 0:
        return [QPoly((1,))]
    A = [[matrix[i][j] for j in range(n)] for i in range(n)]
    vect = [QPoly((1,)), -A[0][0]]
    for k in range(1, n):
        R = A[k][:k]
        C = [A[i][k] for i in range(k)]
        M = [row[:k] for row in A[:k]]
        # first column of the Toeplitz factor: 1, -a_kk, -R C, -R M C, ...
        col = [QPoly((1,)), -A[k][k]]
        cur = C
        for _ in range(k):
            col.append(-sum((R[i] * cur[i] for i in range(k)), QPoly()))
            cur = [sum((M[i][j] * cur[j] for j in range(k)), QPoly()) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = QPoly()
            for j in range(min(i + 1, len(vect))):
                acc = acc + col[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def charpoly_from_roots(roots: Sequence[tuple[QPoly, int]]) -> list[QPoly]:
    """Expand ``prod (x - r)**mult`` with QPoly roots, highest power first."""
    coeffs = [QPoly((1,))]
    for root, mult in roots:
        for _ in range(mult):
            nxt = coeffs + [QPoly()]
            for i in range(1, len(nxt)):
                nxt[i] = nxt[i] - root * coeffs[i - 1]
            coeffs = nxt
    return coeffs


def exact_eigen_polys(words: Sequence[CreationWord]) -> tuple[list[tuple[QPoly, int]], int]:
    """Gram eigenvalues that are polynomials in q, with multiplicities.

    Factors the exact characteristic polynomial over the integers; returns
    the linear-in-x factors and the total degree of any remaining factors
    (eigenvalues with no polynomial closed form).
    """
    import sympy

    coeffs = berkowitz_charpoly(gram_matrix(words))
    x, q = sympy.symbols("x q")
    n = len(coeffs) - 1
    expr = sum(sympy.Poly(list(reversed(c.coeffs)) or [0], q).as_expr() * x ** (n - i)
               for i, c in enumerate(coeffs))
    _, factors = sympy.factor_list(sympy.expand(expr), x, q)
    roots, leftover = [], 0
    for fac, mult in factors:
        poly = sympy.Poly(fac, x)
        if poly.degree() == 1:
            a, b = poly.all_coeffs()
            root = sympy.Poly(sympy.expand(-b / a), q)
            roots.append((QPoly(int(c) for c in reversed(root.all_coeffs())), mult))
        else:
            leftover += poly.degree() * mult
    return roots, leftover


def attach_exact(spectrum: GramSpectrum, words: Sequence[CreationWord],
                 q: float) -> GramSpectrum:
    """Annotate clusters with their exact eigenvalue polynomial where one exists."""
    roots, _ = exact_eigen_polys(words)
    free = list(roots)
    scale = max(abs(c.eigenvalue) for c in spectrum.clusters) or 1.0
    out = []
    for c in spectrum.clusters:
        match = None
        for k, (poly, mult) in enumerate(free):
            if mult >= c.multiplicity and abs(poly(q) - c.eigenvalue) <= 1e-7 * scale:
                match = poly
                free[k] = (poly, mult - c.multiplicity)
                break
        out.append(SectorCluster(c.eigenvalue, c.multiplicity, c.label,
                                 c.vectors, c.null, match))
    return GramSpectrum(tuple(out))


def symmetrized_word(occ) -> FockVector:
    """Un-normalized symmetrizer image: every distinct ordering with weight 1.

    Summing over all ``N!`` position permutations and dividing by the
    product of the occupation factorials leaves each distinct word once.
    """
    occ = _as_occ(occ)
    if occ.total == 0:
        return FockVector.word(())
    return FockVector({w: 1 for w in _multiset_permutations(list(occ.word()))})


def symmetrized_norm_poly(occ) -> QPoly:
    """``N! [N]! / prod n_m!``, the squared norm of :func:`symmetrized_word`."""
    occ = _as_occ(occ)
    n = occ.total
    return q_factorial_poly(n) * (math.factorial(n) // occ.count_product())


def symmetric_normalization(occ, q: float) -> float:
    occ = _as_occ(occ)
    n = occ.total
    return math.sqrt(occ.count_product() / (math.factorial(n) * q_factorial(n, q)))


def symmetric_state(occ, q: float) -> FockVector:
    """Normalized totally symmetric state ``|n_i n_j ...; S>``."""
    occ = _as_occ(occ)
    q = check_q(q)
    if occ.total < 1:
        raise ValueError("need at least one quon")
    if q == -1.0 and occ.total >= 2:
        raise ValueError("symmetric state is null at q = -1 for N >= 2")
    return symmetrized_word(occ).scale(symmetric_normalization(occ, q))


def lower_symmetric(occ, mode: int, q: float) -> tuple[float, OccupancyVector]:
    """Coefficient and occupancy of ``a_mode |occ; S>``."""
    occ = _as_occ(occ)
    n_i = occ.get(mode, 0)
    if n_i == 0:
        return 0.0, occ
    n = occ.total
    return math.sqrt(q_bracket(n, q) / n * n_i), occ.shifted(mode, -1)


def raise_symmetric_matrix_element(occ, mode: int, q: float) -> float:
    """``<occ + e_mode; S| a+_mode |occ; S>``."""
    occ = _as_occ(occ)
    n = occ.total + 1
    return math.sqrt(q_bracket(n, q) / n * (occ.get(mode, 0) + 1))


def symmetric_matrix_element(bra, word: MixedWord, ket, q: float) -> float:
    """``<bra; S| word |ket; S>`` for any operator word.

    The word is normal ordered with the q-mutation rule; each resulting
    ``a+ ... a+ a ... a`` term is evaluated by lowering the ket with the
    annihilators and the bra with the adjoint of the creators.
    """
    bra, ket = _as_occ(bra), _as_occ(ket)
    total = 0.0
    for term, poly in normal_order(tuple(word)).items():
        split = next((k for k, (_, c) in enumerate(term) if not c), len(term))
        creators, annihilators = term[:split], term[split:]
        if bra.total - len(creators) != ket.total - len(annihilators):
            continue
        coef, k_occ = 1.0, ket
        for mode, _ in reversed(annihilators):
            c, k_occ = lower_symmetric(k_occ, mode, q)
            coef *= c
            if c == 0.0:
                break
        if coef == 0.0:
            continue
        b_occ = bra
        for mode, _ in creators:
            c, b_occ = lower_symmetric(b_occ, mode, q)
            coef *= c
            if c == 0.0:
                break
        if coef == 0.0 or b_occ != k_occ:
            continue
        total += poly(q) * coef
    return total
