"""Kernel selection and polynomial compilation.

The compiled extension is used when it imports; ``PERMQUBO_BACKEND=python``
forces the reference implementation.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _pykernels
from .poly import QuadPoly

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if os.environ.get("PERMQUBO_BACKEND", "").lower() == "python" or _compiled is None:
    kernels = _pykernels
    BACKEND = "python"
else:
    kernels = _compiled
    BACKEND = "compiled"

HAVE_COMPILED = _compiled is not None


def get_kernels(name: str | None = None):
    if name is None:
        return kernels
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


@dataclass(frozen=True)
class CompiledPoly:
    variables: tuple[int, ...]
    offset: int
    lin: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @property
    def nvars(self) -> int:
        return len(self.variables)


def compile_poly(poly: QuadPoly, variables: Sequence[int] | None = None) -> CompiledPoly:
    """Dense re-indexing of ``poly`` into symmetric CSR arrays."""
    if variables is None:
        variables = poly.variables()
    variables = tuple(variables)
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    lin = np.zeros(n, dtype=np.int64)
    for v, c in poly.linear.items():
        lin[index[v]] = c
    rows: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (a, b), c in poly.quadratic.items():
        i, j = index[a], index[b]
        rows[i].append((j, c))
        rows[j].append((i, c))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices, data = [], []
    for i, row in enumerate(rows):
        row.sort()
        indices.extend(j for j, _ in row)
        data.extend(c for _, c in row)
        indptr[i + 1] = len(indices)
    return CompiledPoly(
        variables,
        int(poly.offset),
        lin,
        indptr,
        np.array(indices, dtype=np.int64),
        np.array(data, dtype=np.int64),
    )
