"""
Instance schemas.

An instance is a JSON document naming a ground set of elements, a
submodular objective over it and a matroid constraint.
"""

from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.common import NonNegativeRational


class CoverageObjective(BaseModel):
    """f(S) = total weight of the items covered by S."""

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    type: Literal["coverage"] = "coverage"
    covers: Dict[str, List[str]]
    item_weights: Dict[str, NonNegativeRational] = Field(default_factory=dict)


class CutEdge(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    u: str
    v: str
    weight: NonNegativeRational = 1

    @model_validator(mode="before")
    @classmethod
    def from_list(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            if len(data) not in (2, 3):
                raise ValueError("an edge is [u, v] or [u, v, weight]")
            out = {"u": data[0], "v": data[1]}
            if len(data) == 3:
                out["weight"] = data[2]
            return out
        return data


class CutObjective(BaseModel):
    """f(S) = weight of the undirected edges with exactly one endpoint in S."""

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    type: Literal["cut"] = "cut"
    edges: List[CutEdge]


class ModularObjective(BaseModel):
    """f(S) = sum of the weights of S; unlisted elements weigh 0."""

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    type: Literal["modular"] = "modular"
    weights: Dict[str, NonNegativeRational]


ObjectiveSpec = Annotated[
    Union[CoverageObjective, CutObjective, ModularObjective],
    Field(discriminator="type"),
]


class UniformMatroidSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["uniform"] = "uniform"
    k: int = Field(ge=0)


class PartitionMatroidSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["partition"] = "partition"
    parts: List[List[str]]
    capacities: List[int]

    @model_validator(mode="after")
    def check_shape(self) -> "PartitionMatroidSpec":
        if len(self.parts) != len(self.capacities):
            raise ValueError("parts and capacities must have the same length")
        if any(c < 0 for c in self.capacities):
            raise ValueError("capacities must be non-negative")
        return self


class GraphicMatroidSpec(BaseModel):
    """Each element is an edge of an undirected multigraph."""

    model_config = ConfigDict(extra="forbid")

    type: Literal["graphic"] = "graphic"
    edges: Dict[str, List[str]]

    @model_validator(mode="after")
    def check_endpoints(self) -> "GraphicMatroidSpec":
        for name, ends in self.edges.items():
            if len(ends) != 2:
                raise ValueError(f"edge {name!r} needs exactly two endpoints")
        return self


MatroidSpec = Annotated[
    Union[UniformMatroidSpec, PartitionMatroidSpec, GraphicMatroidSpec],
    Field(discriminator="type"),
]


class InstanceSpec(BaseModel):
    """A complete problem instance."""

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    name: Optional[str] = None
    elements: List[str]
    objective: ObjectiveSpec
    matroid: MatroidSpec

    @model_validator(mode="after")
    def check_references(self) -> "InstanceSpec":
        known = set(self.elements)
        if len(known) != len(self.elements):
            raise ValueError("elements: duplicate element names")

        obj = self.objective
        if isinstance(obj, CoverageObjective):
            for name in obj.covers:
                if name not in known:
                    raise ValueError(f"objective.covers: unknown element {name!r}")
        elif isinstance(obj, CutObjective):
            for i, edge in enumerate(obj.edges):
                for end in (edge.u, edge.v):
                    if end not in known:
                        raise ValueError(f"objective.edges.{i}: unknown element {end!r}")
        elif isinstance(obj, ModularObjective):
            for name in obj.weights:
                if name not in known:
                    raise ValueError(f"objective.weights: unknown element {name!r}")

        mat = self.matroid
        if isinstance(mat, PartitionMatroidSpec):
            seen: Dict[str, int] = {}
            for i, part in enumerate(mat.parts):
                for name in part:
                    if name not in known:
                        raise ValueError(f"matroid.parts.{i}: unknown element {name!r}")
                    if name in seen:
                        raise ValueError(f"matroid.parts.{i}: element {name!r} already in part {seen[name]}")
                    seen[name] = i
            missing = [e for e in self.elements if e not in seen]
            if missing:
                raise ValueError(f"matroid.parts: elements not covered by any part: {missing}")
        elif isinstance(mat, GraphicMatroidSpec):
            extra = [name for name in mat.edges if name not in known]
            if extra:
                raise ValueError(f"matroid.edges: unknown elements {extra}")
            missing = [e for e in self.elements if e not in mat.edges]
            if missing:
                raise ValueError(f"matroid.edges: elements without endpoints: {missing}")
        return self

    @property
    def n(self) -> int:
        return len(self.elements)
