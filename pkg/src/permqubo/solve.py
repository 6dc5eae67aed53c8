"""Exact minimisation for small polynomials and a seeded simulated-annealing sampler."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np
from scipy import stats as _stats

from . import _backend
from .encodings import DecodeError, Encoding
from .poly import QuadPoly
from .verify import minimize_exhaustive, uniformity_check

_MASK64 = (1 << 64) - 1


def exhaustive_min(p: QuadPoly, variables: Iterable[int] | None = None) -> tuple[int, list[dict[int, int]]]:
    """Global minimum and every minimiser, by enumeration (subject to the variable cap)."""
    return minimize_exhaustive(p, variables)


@dataclass(frozen=True)
class AnnealParams:
    sweeps: int = 1000
    reads: int = 10
    beta_start: float = 0.1
    beta_end: float = 10.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sweeps < 1 or self.reads < 1:
            raise ValueError("sweeps and reads must be at least 1")
        if not 0 < self.beta_start <= self.beta_end:
            raise ValueError("need 0 < beta_start <= beta_end")

    def betas(self) -> np.ndarray:
        return np.geomspace(self.beta_start, self.beta_end, self.sweeps).astype(np.float64)


def sa_sample(
    p: QuadPoly,
    params: AnnealParams,
    variables: Sequence[int] | None = None,
    backend: str | None = None,
) -> list[tuple[dict[int, int], int]]:
    """``params.reads`` single-flip Metropolis chains; read ``r`` is seeded with ``seed ^ r``.

    ``variables`` defaults to the polynomial's; pass an encoding's full
    variable range so decoding sees every bit.
    """
    cp = _backend.compile_poly(p, variables)
    k = _backend.get_kernels(backend)
    states, energies = k.anneal(
        cp.lin, cp.indptr, cp.indices, cp.data, params.betas(), params.seed & _MASK64, params.reads
    )
    out = []
    for row, energy in zip(states, energies):
        asg = {v: int(b) for v, b in zip(cp.variables, row)}
        out.append((asg, int(energy) + cp.offset))
    return out


def sample_encoding(e: Encoding, params: AnnealParams, backend: str | None = None):
    return sa_sample(e.poly, params, range(len(e.registry)), backend)


def exhaustive_samples(e: Encoding) -> list[tuple[dict[int, int], int]]:
    """Every zero assignment of the encoding once, as if sampled exactly uniformly."""
    return [(asg, 0) for asg in uniformity_check(e, collect=True).assignments]


@dataclass
class SampleStats:
    histogram: dict[Any, int]
    samples: int
    zero_samples: int
    invalid: int
    chi_square: float | None = None
    p_value: float | None = None
    support: int = 0

    def to_json(self) -> dict:
        from .verify import _jsonable

        return {
            "histogram": [[_jsonable(k), v] for k, v in sorted(self.histogram.items(), key=lambda kv: repr(kv[0]))],
            "samples": self.samples,
            "zero_samples": self.zero_samples,
            "invalid": self.invalid,
            "support": self.support,
            "chi_square": self.chi_square,
            "p_value": self.p_value,
        }


def sample_stats(
    samples: Sequence[tuple[dict[int, int], int]],
    e: Encoding,
    support: Iterable | None = None,
) -> SampleStats:
    """Histogram of decoded value-0 samples and a chi-square statistic against uniform.

    ``support`` lists the solutions expected with equal weight; default: the
    solutions that were observed.  The statistic is reported, not asserted.
    """
    counts: Counter = Counter()
    invalid = 0
    zero = 0
    for asg, value in samples:
        if value != 0:
            continue
        zero += 1
        try:
            counts[e.solution(asg)] += 1
        except DecodeError:
            invalid += 1
    keys = set(counts) if support is None else set(support)
    hist = {key: counts.get(key, 0) for key in keys}
    result = SampleStats(hist, len(samples), zero, invalid, support=len(keys))
    observed = [hist[key] for key in sorted(hist, key=repr)]
    if len(observed) >= 2 and sum(observed) > 0:
        chi, pv = _stats.chisquare(observed)
        result.chi_square, result.p_value = float(chi), float(pv)
    elif len(observed) == 1:
        result.chi_square, result.p_value = 0.0, 1.0
    return result
