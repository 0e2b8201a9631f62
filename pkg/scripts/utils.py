"""
Instance generators for the benchmark families and randomized test corpora.

All generators are deterministic given their seed.
"""

from typing import Dict, List, Optional

import numpy as np

from schemas.instance import (
    CoverageObjective,
    CutEdge,
    CutObjective,
    GraphicMatroidSpec,
    InstanceSpec,
    ModularObjective,
    PartitionMatroidSpec,
    UniformMatroidSpec,
)

FAMILIES = ("coverage-uniform", "cut-partition")
OBJECTIVE_KINDS = ("coverage", "cut", "modular")
MATROID_KINDS = ("uniform", "partition", "graphic")


def element_names(n: int) -> List[str]:
    return [f"e{i}" for i in range(n)]


def random_coverage(rng: np.random.Generator, names: List[str], items: int, per_element: int = 3) -> CoverageObjective:
    item_names = [f"i{j}" for j in range(items)]
    covers: Dict[str, List[str]] = {}
    for name in names:
        k = min(per_element, items)
        picked = sorted(int(j) for j in rng.choice(items, size=k, replace=False))
        covers[name] = [item_names[j] for j in picked]
    weights = {item: int(rng.integers(1, 4)) for item in item_names}
    return CoverageObjective(covers=covers, item_weights=weights)


def random_cut(rng: np.random.Generator, names: List[str], density: float = 0.4) -> CutObjective:
    edges: List[CutEdge] = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            if rng.random() < density:
                edges.append(CutEdge(u=names[i], v=names[j], weight=int(rng.integers(1, 4))))
    return CutObjective(edges=edges)


def random_modular(rng: np.random.Generator, names: List[str]) -> ModularObjective:
    return ModularObjective(weights={name: int(rng.integers(0, 6)) for name in names})


def blocks_of(names: List[str], size: int) -> List[List[str]]:
    return [names[i:i + size] for i in range(0, len(names), size)]


def random_partition(rng: np.random.Generator, names: List[str]) -> PartitionMatroidSpec:
    parts = blocks_of(names, int(rng.integers(2, 4)))
    capacities = [int(rng.integers(0, len(part) + 1)) for part in parts]
    return PartitionMatroidSpec(parts=parts, capacities=capacities)


def random_graphic(rng: np.random.Generator, names: List[str]) -> GraphicMatroidSpec:
    vertices = max(2, len(names) // 2 + 1)
    edges: Dict[str, List[str]] = {}
    for name in names:
        u, v = (int(w) for w in rng.integers(0, vertices, size=2))
        edges[name] = [f"v{u}", f"v{v}"]
    return GraphicMatroidSpec(edges=edges)


def random_instance(
    seed: int,
    n: int,
    objective: Optional[str] = None,
    matroid: Optional[str] = None,
) -> InstanceSpec:
    """Small random instance; unspecified kinds are drawn from the seed as well."""
    rng = np.random.default_rng(seed)
    names = element_names(n)
    objective = objective or OBJECTIVE_KINDS[int(rng.integers(len(OBJECTIVE_KINDS)))]
    matroid = matroid or MATROID_KINDS[int(rng.integers(len(MATROID_KINDS)))]

    if objective == "coverage":
        obj = random_coverage(rng, names, items=max(2, n))
    elif objective == "cut":
        obj = random_cut(rng, names)
    elif objective == "modular":
        obj = random_modular(rng, names)
    else:
        raise ValueError(f"unknown objective kind {objective!r}")

    if matroid == "uniform":
        mat = UniformMatroidSpec(k=int(rng.integers(0, n + 1)))
    elif matroid == "partition":
        mat = random_partition(rng, names)
    elif matroid == "graphic":
        mat = random_graphic(rng, names)
    else:
        raise ValueError(f"unknown matroid kind {matroid!r}")

    return InstanceSpec(name=f"random-{objective}-{matroid}-{seed}", elements=names, objective=obj, matroid=mat)


def coverage_uniform_instance(n: int, seed: int = 0) -> InstanceSpec:
    """Weighted coverage over n items, uniform matroid of rank n/4."""
    rng = np.random.default_rng(seed)
    names = element_names(n)
    return InstanceSpec(
        name=f"coverage-uniform-{n}",
        elements=names,
        objective=random_coverage(rng, names, items=n),
        matroid=UniformMatroidSpec(k=max(1, n // 4)),
    )


def cut_partition_instance(n: int, seed: int = 0) -> InstanceSpec:
    """Sparse weighted graph cut, n/4 blocks of four with capacity one each."""
    rng = np.random.default_rng(seed)
    names = element_names(n)
    parts = blocks_of(names, 4)
    return InstanceSpec(
        name=f"cut-partition-{n}",
        elements=names,
        objective=random_cut(rng, names, density=min(1.0, 4.0 / max(1, n))),
        matroid=PartitionMatroidSpec(parts=parts, capacities=[1] * len(parts)),
    )


def family_instance(family: str, n: int, seed: int = 0) -> InstanceSpec:
    if family == "coverage-uniform":
        return coverage_uniform_instance(n, seed)
    if family == "cut-partition":
        return cut_partition_instance(n, seed)
    raise ValueError(f"unknown family {family!r}")
