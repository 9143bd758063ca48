"""Benchmark fitness functions and their target-generalized forms.

Five kinds:

* ``onemax`` — number of one-bits
* ``leadingones`` — length of the all-ones prefix
* ``linear`` — weighted sum of one-bits (strictly positive weights, so the
  unique optimum is the all-ones string)
* ``onemax-target`` — number of positions agreeing with a target string z
* ``leadingones-target`` — longest prefix, in a permuted position order,
  agreeing with a target string z

Objectives are immutable after construction and freely shareable across
concurrent runs.  Fitness values are carried as floats everywhere (the
counting kinds are integral, so equality comparisons on them are exact).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from .variation import ParameterError, as_bits

ONEMAX = "onemax"
LEADINGONES = "leadingones"
LINEAR = "linear"
ONEMAX_TARGET = "onemax-target"
LEADINGONES_TARGET = "leadingones-target"


@dataclass(frozen=True)
class Objective:
    """A fitness function over fixed-length bit strings.

    Use the module-level constructors instead of instantiating directly.
    """

    kind: str
    n: int
    optimum_value: float
    weights: np.ndarray | None = None
    target: np.ndarray | None = None
    permutation: np.ndarray | None = None
    # kernel-facing representation
    kind_code: int = field(repr=False, default=0)
    _z: np.ndarray = field(repr=False, default=None)
    _pi: np.ndarray = field(repr=False, default=None)
    _rank: np.ndarray = field(repr=False, default=None)
    _w: np.ndarray = field(repr=False, default=None)

    @property
    def name(self) -> str:
        return self.kind

    def __str__(self) -> str:  # pragma: no cover
        return f"{self.kind}(n={self.n})"


def _build(kind, n, optimum, kind_code, z, pi, w, weights=None, target=None, perm=None):
    rank = np.empty(n, np.int64)
    rank[pi] = np.arange(n)
    return Objective(
        kind=kind,
        n=n,
        optimum_value=float(optimum),
        weights=weights,
        target=target,
        permutation=perm,
        kind_code=kind_code,
        _z=z,
        _pi=pi,
        _rank=rank,
        _w=w,
    )


def _check_n(n: int) -> None:
    if n < 1:
        raise ParameterError(f"dimension must be positive, got {n}")


def onemax(n: int) -> Objective:
    """Number of one-bits; optimum n at the all-ones string."""
    _check_n(n)
    return _build(
        ONEMAX, n, n, _k.KIND_ONEMAX,
        np.ones(n, np.uint8), np.arange(n), np.zeros(n),
    )


def leadingones(n: int) -> Objective:
    """Length of the initial all-ones prefix; optimum n."""
    _check_n(n)
    return _build(
        LEADINGONES, n, n, _k.KIND_LEADING,
        np.ones(n, np.uint8), np.arange(n), np.zeros(n),
    )


def linear(weights) -> Objective:
    """Weighted count of one-bits with strictly positive weights.

    Positivity makes the all-ones string the unique optimum, so first-hitting
    the optimum is well defined and cheap to test.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ParameterError("weights must be a non-empty 1-d sequence")
    if not np.all(w > 0):
        raise ParameterError("linear weights must be strictly positive")
    n = w.size
    z = np.ones(n, np.uint8)
    pi = np.arange(n)
    opt = _k.eval_full(_k.KIND_LINEAR, z, z, pi, w)  # same summation order as evaluate
    return _build(LINEAR, n, opt, _k.KIND_LINEAR, z, pi, w, weights=w)


def onemax_target(z) -> Objective:
    """Number of positions agreeing with the target string z; optimum n at z."""
    zz = as_bits(z)
    n = zz.shape[0]
    _check_n(n)
    return _build(
        ONEMAX_TARGET, n, n, _k.KIND_ONEMAX,
        zz.copy(), np.arange(n), np.zeros(n), target=zz.copy(),
    )


def leadingones_target(z, permutation) -> Objective:
    """Longest z-agreeing prefix in the order given by ``permutation``.

    ``permutation[k]`` is the position inspected k-th; it must visit every
    index exactly once.
    """
    zz = as_bits(z)
    n = zz.shape[0]
    _check_n(n)
    pi = np.asarray(permutation, dtype=np.int64)
    if pi.shape != (n,) or not np.array_equal(np.sort(pi), np.arange(n)):
        raise ParameterError("permutation must visit each index in [0, n) exactly once")
    return _build(
        LEADINGONES_TARGET, n, n, _k.KIND_LEADING,
        zz.copy(), pi.copy(), np.zeros(n), target=zz.copy(), perm=pi.copy(),
    )


def evaluate(obj: Objective, x) -> float:
    """Fitness of ``x`` under ``obj``."""
    a = as_bits(x)
    if a.shape[0] != obj.n:
        raise ParameterError(
            f"dimension mismatch: objective has n={obj.n}, string has {a.shape[0]}"
        )
    return float(_k.eval_full(obj.kind_code, a, obj._z, obj._pi, obj._w))


def level(obj: Objective, x) -> int:
    """Integer profile level of ``x``: the fitness for the counting kinds,
    the number of correctly-set bits for linear objectives."""
    a = as_bits(x)
    if a.shape[0] != obj.n:
        raise ParameterError(
            f"dimension mismatch: objective has n={obj.n}, string has {a.shape[0]}"
        )
    return int(_k.level_full(obj.kind_code, a, obj._z, obj._pi))


def is_optimum(obj: Objective, value: float) -> bool:
    """True iff ``value`` equals the objective's optimum value exactly."""
    return float(value) == obj.optimum_value


def _bits_from_hex(spec: str, n: int) -> np.ndarray:
    try:
        v = int(spec, 16)
    except ValueError:
        raise ParameterError(f"not a hex string: {spec!r}") from None
    if v < 0 or v >= (1 << n):
        raise ParameterError(f"hex target {spec!r} does not fit in {n} bits")
    return np.array([(v >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def _perm_from_spec(spec: str, n: int) -> np.ndarray:
    if spec == "identity":
        return np.arange(n)
    if spec == "reverse":
        return np.arange(n)[::-1].copy()
    try:
        pi = np.array([int(s) for s in spec.split(",")], dtype=np.int64)
    except ValueError:
        raise ParameterError(f"bad permutation spec: {spec!r}") from None
    if pi.shape != (n,) or not np.array_equal(np.sort(pi), np.arange(n)):
        raise ParameterError(f"permutation spec {spec!r} is not a permutation of 0..{n-1}")
    return pi


def parse_objective(spec: str, n: int) -> Objective:
    """Build an objective from its CLI string.

    Accepted forms: ``onemax``, ``leadingones``,
    ``linear:<comma-separated weights>``, ``onemax-z:<hex target>``,
    ``leadingones-z:<hex target>:<permutation spec>`` where the permutation
    spec is ``identity``, ``reverse``, or a comma-separated 0-based list.
    The hex target encodes the n-bit string most-significant-bit first.
    """
    _check_n(n)
    if spec == "onemax":
        return onemax(n)
    if spec == "leadingones":
        return leadingones(n)
    if spec.startswith("linear:"):
        body = spec[len("linear:"):]
        try:
            w = [float(s) for s in body.split(",") if s]
        except ValueError:
            raise ParameterError(f"bad weight list: {body!r}") from None
        if len(w) != n:
            raise ParameterError(f"linear needs {n} weights, got {len(w)}")
        return linear(w)
    if spec.startswith("onemax-z:"):
        return onemax_target(_bits_from_hex(spec[len("onemax-z:"):], n))
    if spec.startswith("leadingones-z:"):
        body = spec[len("leadingones-z:"):]
        parts = body.split(":", 1)
        if len(parts) != 2:
            raise ParameterError("leadingones-z needs <hex target>:<permutation spec>")
        return leadingones_target(_bits_from_hex(parts[0], n), _perm_from_spec(parts[1], n))
    raise ParameterError(f"unknown objective: {spec!r}")
