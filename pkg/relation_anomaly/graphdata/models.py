"""Scene-graph data model."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Slot = Literal["subject", "predicate", "object"]
SLOTS: tuple[Slot, ...] = ("subject", "predicate", "object")

TripletKey = tuple[str, str, str]


class Descriptor(BaseModel):
    """One valid phrasing of a ground-truth anomalous relationship."""

    model_config = ConfigDict(frozen=True)

    subject: str = Field(min_length=1)
    predicate: str = Field(min_length=1)
    object: str = Field(min_length=1)

    @property
    def key(self) -> TripletKey:
        return (self.subject, self.predicate, self.object)


class Triplet(BaseModel):
    """One directed edge ``subject -predicate-> object`` of a scene graph."""

    model_config = ConfigDict(frozen=True)

    subject: str = Field(min_length=1)
    predicate: str = Field(min_length=1)
    object: str = Field(min_length=1)
    confidence: float = Field(ge=0, le=1, description="Generator confidence")
    anomaly_label: bool | None = None
    injected: bool = Field(default=False, description="Added from the ground truth, not produced by the generator")

    @property
    def key(self) -> TripletKey:
        return (self.subject, self.predicate, self.object)

    def matches(self, descriptor: Descriptor) -> bool:
        return self.key == descriptor.key

    def __str__(self) -> str:
        return f"{self.subject}-{self.predicate}-{self.object}"


class SceneGraph(BaseModel):
    model_config = ConfigDict(frozen=True)

    image_id: str = Field(min_length=1)
    scene_tag: str = ""
    triplets: tuple[Triplet, ...] = ()
    image_label: Literal["normal", "anomalous"]
    ground_truth: tuple[Descriptor, ...] = ()

    @model_validator(mode="after")
    def _check_ground_truth(self) -> "SceneGraph":
        if self.image_label == "anomalous" and not self.ground_truth:
            raise ValueError("anomalous image carries no ground-truth descriptor")
        if self.image_label == "normal" and self.ground_truth:
            raise ValueError("normal image carries ground-truth descriptors")
        return self

    @property
    def is_anomalous(self) -> bool:
        return self.image_label == "anomalous"

    def instance_id(self, index: int) -> str:
        """Identifier of the ``index``-th triplet instance of this graph."""
        return f"{self.image_id}#{index}"

    def instance_ids(self) -> list[str]:
        return [self.instance_id(i) for i in range(len(self.triplets))]


class Dataset(BaseModel):
    """Scene graphs of one scene plus the train/test assignment of normal images."""

    model_config = ConfigDict(frozen=True)

    scene: str
    graphs: tuple[SceneGraph, ...] = ()
    split: dict[str, Literal["train", "test"]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_split(self) -> "Dataset":
        ids = [g.image_id for g in self.graphs]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate image ids")
        by_id = {g.image_id: g for g in self.graphs}
        for image_id, side in self.split.items():
            graph = by_id.get(image_id)
            if graph is None:
                raise ValueError(f"split references unknown image '{image_id}'")
            if side == "train" and graph.is_anomalous:
                raise ValueError(f"anomalous image '{image_id}' assigned to train")
        return self

    def graph(self, image_id: str) -> SceneGraph:
        for g in self.graphs:
            if g.image_id == image_id:
                return g
        raise KeyError(image_id)

    @property
    def normal_graphs(self) -> list[SceneGraph]:
        return [g for g in self.graphs if not g.is_anomalous]

    @property
    def anomalous_graphs(self) -> list[SceneGraph]:
        return [g for g in self.graphs if g.is_anomalous]

    @property
    def train_graphs(self) -> list[SceneGraph]:
        return [g for g in self.graphs if self.split.get(g.image_id) == "train"]

    @property
    def test_graphs(self) -> list[SceneGraph]:
        """Test-side normal images and every anomalous image, in file order."""
        return [g for g in self.graphs if g.is_anomalous or self.split.get(g.image_id) == "test"]

    @property
    def test_normal_graphs(self) -> list[SceneGraph]:
        return [g for g in self.normal_graphs if self.split.get(g.image_id) == "test"]

    def with_graphs(self, graphs: list[SceneGraph]) -> "Dataset":
        return Dataset(scene=self.scene, graphs=tuple(graphs), split=dict(self.split))


class Subgroup(BaseModel):
    """One anomalous image together with its normal companions."""

    model_config = ConfigDict(frozen=True)

    anomalous_id: str
    normal_ids: tuple[str, ...]

    @property
    def size(self) -> int:
        return 1 + len(self.normal_ids)

    @property
    def member_ids(self) -> list[str]:
        return [self.anomalous_id, *self.normal_ids]


class SynonymMap(BaseModel):
    """Token -> replacement; no token maps to itself."""

    model_config = ConfigDict(frozen=True)

    mapping: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _no_identity(self) -> "SynonymMap":
        for token, replacement in self.mapping.items():
            if token == replacement:
                raise ValueError(f"synonym map sends '{token}' to itself")
            if not token or not replacement:
                raise ValueError("synonym entries must be non-empty")
        return self

    def __contains__(self, token: str) -> bool:
        return token in self.mapping

    def __getitem__(self, token: str) -> str:
        return self.mapping[token]

    def __len__(self) -> int:
        return len(self.mapping)
