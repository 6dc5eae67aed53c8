"""Size and sparsity statistics, with the closed-form counts they should match."""
from __future__ import annotations

from dataclasses import dataclass, field

from .encodings import Encoding, perm_encoding
from .poly import QuadPoly


@dataclass
class StatsReport:
    variables: int
    inputs: int
    controls: int
    auxiliary: int
    edges: int
    max_degree: int
    mean_degree: float
    density: float
    expected: dict[str, int] = field(default_factory=dict)

    @property
    def deltas(self) -> dict[str, int]:
        actual = {
            "variables": self.variables,
            "auxiliary": self.auxiliary,
            "max_degree": self.max_degree,
        }
        return {key: actual[key] - want for key, want in self.expected.items()}

    def to_json(self) -> dict:
        return {
            "variables": self.variables,
            "inputs": self.inputs,
            "controls": self.controls,
            "auxiliary": self.auxiliary,
            "edges": self.edges,
            "max_degree": self.max_degree,
            "mean_degree": round(self.mean_degree, 6),
            "density": round(self.density, 6),
            "expected": dict(sorted(self.expected.items())),
            "deltas": dict(sorted(self.deltas.items())),
        }


def degrees(p: QuadPoly, nvars: int) -> list[int]:
    nb = p.neighbors()
    return [len(nb.get(v, ())) for v in range(nvars)]


def expected_counts(e: Encoding) -> dict[str, int]:
    """Closed forms for unconstrained encodings; empty when none applies."""
    if e.recipe.constraints or e.recipe.fixed:
        return {}
    n, k = e.n, e.k
    if e.construction == "matrix":
        return {"variables": n * n, "max_degree": 2 * (n - 1) if n > 1 else 0}
    if e.construction == "perm":
        m = e.topology.m
        return {"variables": m * (7 * k + 2), "auxiliary": m * (7 * k + 1) - n * k}
    return {}


def stats_report(e: Encoding, poly: QuadPoly | None = None) -> StatsReport:
    poly = e.poly if poly is None else poly
    nvars = len(e.registry)
    deg = degrees(poly, nvars)
    edges = len(poly.quadratic)
    pairs = nvars * (nvars - 1) // 2
    return StatsReport(
        variables=nvars,
        inputs=len(e.registry.ids("input")),
        controls=len(e.registry.ids("control")),
        auxiliary=len(e.registry.ids("auxiliary")) + len(e.registry.ids("output")),
        edges=edges,
        max_degree=max(deg, default=0),
        mean_degree=sum(deg) / nvars if nvars else 0.0,
        density=edges / pairs if pairs else 0.0,
        expected=expected_counts(e),
    )


def degree_fit(topology: str = "batcher", n: int = 4, ks: tuple[int, int] = (3, 4)) -> tuple[int, int]:
    """Slope and intercept of max degree against bus width ``k``, from two widths at fixed ``n``."""
    (k1, k2) = ks
    d1 = stats_report(perm_encoding(n, topology, k=k1)).max_degree
    d2 = stats_report(perm_encoding(n, topology, k=k2)).max_degree
    a = (d2 - d1) // (k2 - k1)
    if a * (k2 - k1) != d2 - d1:
        raise ValueError("max degree is not affine in k at these widths")
    return a, d1 - a * k1
