"""Quon Fock-space kernel.

Operator words are tuples of ``(mode, is_creator)`` pairs read left to right.
Creation words are tuples of mode indices and stand for
``a+_{w[0]} a+_{w[1]} ... |0>``.

Two independent routes give vacuum expectation values:

* :func:`vev_rewrite` applies ``a_i a+_j -> delta_ij + q a+_j a_i`` to
  adjacent pairs until every term dies on the vacuum.  It is slow and serves
  as the reference.
* :func:`vev_qpermanent` sums ``q**crossings`` over mode-matching pairings
  between bra and ket positions, using the kernels in :mod:`quon.kernels`.

Every function that takes ``q`` returns an exact :class:`~quon.qnum.QPoly`
when ``q`` is ``None`` and a float otherwise.
"""
from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import kernels
from .qnum import ONE, ZERO, QPoly

Op = tuple[int, bool]
MixedWord = tuple[Op, ...]
CreationWord = tuple[int, ...]
Scalar = Union[int, float, QPoly]

_TOKEN = re.compile(r"^(ad|a)(\d+)$")


def create(mode: int) -> Op:
    return (mode, True)


def annihilate(mode: int) -> Op:
    return (mode, False)


def parse_word(text: str) -> MixedWord:
    """Parse ``"a2 a1 ad2 ad1"`` into a mixed operator word.

    Tokens are ``a<i>`` (annihilator) or ``ad<i>`` (creator).
    """
    ops = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if m is None:
            raise ValueError(f"malformed operator token {tok!r}")
        ops.append((int(m.group(2)), m.group(1) == "ad"))
    return tuple(ops)


def format_word(word: MixedWord) -> str:
    return " ".join(f"ad{m}" if c else f"a{m}" for m, c in word)


def sandwich(bra: Sequence[int], ket: Sequence[int],
             middle: MixedWord = ()) -> MixedWord:
    """Word for ``<bra| middle |ket>`` with creation-word bra and ket."""
    return (tuple((m, False) for m in reversed(bra)) + tuple(middle)
            + tuple((m, True) for m in ket))


def _first_pair(word: MixedWord) -> int:
    """Index of the first adjacent (annihilator, creator) pair, or -1."""
    for p in range(len(word) - 1):
        if not word[p][1] and word[p + 1][1]:
            return p
    return -1


def _rewrite(word: MixedWord, p: int):
    """Both branches of the q-mutation relation applied at position ``p``."""
    (i, _), (j, _) = word[p], word[p + 1]
    swapped = word[:p] + (word[p + 1], word[p]) + word[p + 2:]
    contracted = word[:p] + word[p + 2:] if i == j else None
    return contracted, swapped


@lru_cache(maxsize=1 << 18)
def _vev_poly(word: MixedWord) -> QPoly:
    if not word:
        return ONE
    if word[0][1] or not word[-1][1]:
        # <0| a+ = 0 and a |0> = 0
        return ZERO
    p = _first_pair(word)
    contracted, swapped = _rewrite(word, p)
    out = _vev_poly(swapped).shift(1)
    if contracted is not None:
        out = out + _vev_poly(contracted)
    return out


@lru_cache(maxsize=1 << 18)
def _normal_order(word: MixedWord) -> tuple[tuple[MixedWord, QPoly], ...]:
    p = _first_pair(word)
    if p < 0:
        return ((word, ONE),)
    contracted, swapped = _rewrite(word, p)
    acc: dict[MixedWord, QPoly] = {}
    for w, c in _normal_order(swapped):
        acc[w] = acc.get(w, ZERO) + c.shift(1)
    if contracted is not None:
        for w, c in _normal_order(contracted):
            acc[w] = acc.get(w, ZERO) + c
    return tuple((w, c) for w, c in acc.items() if c)


def normal_order(word: MixedWord) -> dict[MixedWord, QPoly]:
    """Rewrite ``word`` as a sum of creators-left words with QPoly weights."""
    return dict(_normal_order(tuple(word)))


def _at(value: QPoly, q: Optional[float]) -> Scalar:
    return value if q is None else float(value(q))


def vev_rewrite(word: MixedWord, q: Optional[float] = None) -> Scalar:
    """``<0| word |0>`` by exhaustive application of the q-mutation rule."""
    return _at(_vev_poly(tuple(word)), q)


def vev_qpermanent(bra: Sequence[int], ket: Sequence[int],
                   q: Optional[float] = None) -> Scalar:
    """Overlap of two creation words as a crossing-weighted permanent.

    Equals ``vev_rewrite(sandwich(bra, ket), q)``; pairing ``bra[k]`` with
    ``ket[p]`` contributes one factor of ``q`` per earlier bra position
    matched to a later ket position.
    """
    if len(bra) != len(ket):
        return ZERO if q is None else 0.0
    if q is None:
        return QPoly(kernels.qperm_coeffs(list(bra), list(ket)))
    return float(kernels.qperm_value(list(bra), list(ket), float(q)))


class FockVector:
    """Finite superposition of creation words of one common length.

    Coefficients are all exact (``int`` or :class:`QPoly`) or all floating;
    zero coefficients are dropped.
    """

    __slots__ = ("terms", "length")

    def __init__(self, terms: Union[Mapping[CreationWord, Scalar],
                                    Iterable[tuple[CreationWord, Scalar]]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[CreationWord, Scalar] = {}
        for w, c in items:
            w = tuple(int(m) for m in w)
            acc[w] = acc[w] + c if w in acc else c
        self.terms = {w: c for w, c in acc.items() if c != 0}
        lengths = {len(w) for w in self.terms}
        if len(lengths) > 1:
            raise ValueError("FockVector words must share one quon number")
        self.length = lengths.pop() if lengths else 0

    @classmethod
    def word(cls, modes: Sequence[int], coeff: Scalar = 1) -> "FockVector":
        return cls({tuple(modes): coeff})

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __getitem__(self, word: CreationWord) -> Scalar:
        return self.terms.get(tuple(word), 0)

    def __add__(self, other: "FockVector") -> "FockVector":
        return FockVector(list(self.terms.items()) + list(other.terms.items()))

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-1)

    def scale(self, factor: Scalar) -> "FockVector":
        return FockVector({w: c * factor for w, c in self.terms.items()})

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.terms == other.terms

    def evaluate(self, q: float) -> "FockVector":
        """Floating copy with QPoly coefficients evaluated at ``q``."""
        return FockVector({w: float(c(q)) if isinstance(c, QPoly) else float(c)
                           for w, c in self.terms.items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{''.join(map(str, w)) or '0'}: {c}"
                         for w, c in sorted(self.terms.items()))
        return f"FockVector({{{body}}})"


def _mul(c: Scalar, poly: QPoly, q: Optional[float]) -> Scalar:
    if q is None:
        if isinstance(c, float):
            raise TypeError("exact evaluation needs exact coefficients")
        return poly * c if isinstance(c, int) else c * poly
    if isinstance(c, QPoly):
        c = c(q)
    return c * poly(q)


def apply(word: MixedWord, vector: FockVector,
          q: Optional[float] = None) -> FockVector:
    """Act with an operator word on a state, reducing by the rewrite rule."""
    out: dict[CreationWord, Scalar] = {}
    for ket, c in vector:
        full = tuple(word) + tuple((m, True) for m in ket)
        for w, poly in _normal_order(full):
            if w and not w[-1][1]:
                continue  # annihilator reaches the vacuum
            key = tuple(m for m, _ in w)
            val = _mul(c, poly, q)
            out[key] = out[key] + val if key in out else val
    return FockVector(out)


def inner_product(u: FockVector, v: FockVector,
                  q: Optional[float] = None) -> Scalar:
    """Sesquilinear ``<u|v>`` from pairwise q-permanents (real scalars)."""
    if u.length != v.length and u.terms and v.terms:
        return ZERO if q is None else 0.0
    acc: Scalar = ZERO if q is None else 0.0
    for wu, cu in u:
        for wv, cv in v:
            g = vev_qpermanent(wu, wv, q)
            if q is None:
                acc = acc + g * cu * cv
            else:
                cu_ = cu(q) if isinstance(cu, QPoly) else cu
                cv_ = cv(q) if isinstance(cv, QPoly) else cv
                acc += cu_.conjugate() * cv_ * g
    return acc
