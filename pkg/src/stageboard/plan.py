"""Lifecycle-block plan graph.

A plan is a DAG of stage blocks on an unbounded canvas. All operations are
value-semantic: they return a new graph (plus ids where relevant) and never
mutate their input, so rejected operations trivially leave the graph intact.
"""
from __future__ import annotations

import heapq
import math
import re
import uuid
from collections import defaultdict
from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    CycleCreated,
    DuplicateLink,
    NonFinitePosition,
    SelfLink,
    UnknownBlock,
)


class StageKind(str, Enum):
    """The eight lifecycle stages, in canonical order."""

    PROBLEM_FORMULATION = "ProblemFormulation"
    TASK_DEFINITION = "TaskDefinition"
    DATASET_CONSTRUCTION = "DatasetConstruction"
    MODEL_DEFINITION = "ModelDefinition"
    TRAINING = "Training"
    TESTING = "Testing"
    DEPLOYMENT = "Deployment"
    FEEDBACK = "Feedback"

    @property
    def display_name(self) -> str:
        """Human-readable form, e.g. "Problem Formulation"."""
        return re.sub(r"(?<=[a-z])(?=[A-Z])", " ", self.value)


STAGE_ORDER: tuple[StageKind, ...] = tuple(StageKind)


def _check_position(position) -> tuple[float, float]:
    try:
        x, y = float(position[0]), float(position[1])
    except (TypeError, ValueError, IndexError):
        raise NonFinitePosition(f"position must be a coordinate pair, got {position!r}")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise NonFinitePosition(f"position coordinates must be finite, got ({x}, {y})")
    return (x, y)


@dataclass(frozen=True)
class StageBlock:
    block_id: str
    stage: StageKind
    position: tuple[float, float]
    seq: int
    description: str = ""

    def to_dict(self) -> dict:
        return {
            "block_id": self.block_id,
            "stage": self.stage.value,
            "position": list(self.position),
            "seq": self.seq,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StageBlock":
        return cls(
            block_id=d["block_id"],
            stage=StageKind(d["stage"]),
            position=(float(d["position"][0]), float(d["position"][1])),
            seq=int(d["seq"]),
            description=d.get("description", ""),
        )


@dataclass(frozen=True)
class PlanLink:
    from_block: str
    to_block: str

    def to_dict(self) -> dict:
        return {"from_block": self.from_block, "to_block": self.to_block}

    @classmethod
    def from_dict(cls, d: dict) -> "PlanLink":
        return cls(from_block=d["from_block"], to_block=d["to_block"])


@dataclass(frozen=True)
class ValidationReport:
    """Handoff completeness report; ok iff every list is empty."""

    missing_stages: tuple[StageKind, ...]
    empty_descriptions: tuple[str, ...]
    isolated_blocks: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not (self.missing_stages or self.empty_descriptions or self.isolated_blocks)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "missing_stages": [s.value for s in self.missing_stages],
            "empty_descriptions": list(self.empty_descriptions),
            "isolated_blocks": list(self.isolated_blocks),
        }


@dataclass(frozen=True)
class PlanGraph:
    blocks: tuple[StageBlock, ...] = ()
    links: tuple[PlanLink, ...] = ()
    next_seq: int = 1  # never reused, even across deletions

    # -- lookups ---------------------------------------------------------

    def block(self, block_id: str) -> StageBlock:
        for b in self.blocks:
            if b.block_id == block_id:
                return b
        raise UnknownBlock(f"no block with id {block_id!r}")

    def has_block(self, block_id: str) -> bool:
        return any(b.block_id == block_id for b in self.blocks)

    def _successors(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = defaultdict(list)
        for link in self.links:
            out[link.from_block].append(link.to_block)
        return out

    def _reaches(self, start: str, goal: str) -> bool:
        succ = self._successors()
        seen = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            if node == goal:
                return True
            for nxt in succ[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return False

    # -- operations ------------------------------------------------------

    def add_block(
        self, stage: StageKind, position, block_id: str | None = None
    ) -> tuple["PlanGraph", str]:
        pos = _check_position(position)
        new_id = block_id or uuid.uuid4().hex
        block = StageBlock(block_id=new_id, stage=StageKind(stage), position=pos, seq=self.next_seq)
        graph = replace(self, blocks=self.blocks + (block,), next_seq=self.next_seq + 1)
        return graph, new_id

    def link_blocks(self, from_block: str, to_block: str) -> "PlanGraph":
        self.block(from_block)
        self.block(to_block)
        if from_block == to_block:
            raise SelfLink(f"cannot link block {from_block!r} to itself")
        if any(l.from_block == from_block and l.to_block == to_block for l in self.links):
            raise DuplicateLink(f"link {from_block!r} -> {to_block!r} already exists")
        if self._reaches(to_block, from_block):
            raise CycleCreated(f"link {from_block!r} -> {to_block!r} would create a cycle")
        return replace(self, links=self.links + (PlanLink(from_block, to_block),))

    def move_block(self, block_id: str, position) -> "PlanGraph":
        target = self.block(block_id)
        pos = _check_position(position)
        blocks = tuple(replace(b, position=pos) if b is target else b for b in self.blocks)
        return replace(self, blocks=blocks)

    def set_description(self, block_id: str, text: str) -> "PlanGraph":
        target = self.block(block_id)
        blocks = tuple(replace(b, description=text) if b is target else b for b in self.blocks)
        return replace(self, blocks=blocks)

    def delete_block(self, block_id: str) -> "PlanGraph":
        """Remove a block and all incident links."""
        self.block(block_id)
        blocks = tuple(b for b in self.blocks if b.block_id != block_id)
        links = tuple(l for l in self.links if block_id not in (l.from_block, l.to_block))
        return replace(self, blocks=blocks, links=links)

    # -- queries ---------------------------------------------------------

    def validate_for_handoff(self) -> ValidationReport:
        present = {b.stage for b in self.blocks}
        missing = tuple(s for s in STAGE_ORDER if s not in present)
        by_seq = sorted(self.blocks, key=lambda b: b.seq)
        empty = tuple(b.block_id for b in by_seq if not b.description)
        isolated: tuple[str, ...] = ()
        if len(self.blocks) >= 2:
            linked = {l.from_block for l in self.links} | {l.to_block for l in self.links}
            isolated = tuple(b.block_id for b in by_seq if b.block_id not in linked)
        return ValidationReport(missing, empty, isolated)

    def serialize_stages(self) -> list[tuple[str, str]]:
        """Deterministic stage-ordered flattening of the plan.

        Topological order over links, ties broken by ascending creation seq
        (Kahn's algorithm with a min-seq heap). The result pairs each block's
        human-readable stage name with its description.
        """
        by_id = {b.block_id: b for b in self.blocks}
        indegree = {b.block_id: 0 for b in self.blocks}
        succ = self._successors()
        for link in self.links:
            indegree[link.to_block] += 1
        heap = [(b.seq, b.block_id) for b in self.blocks if indegree[b.block_id] == 0]
        heapq.heapify(heap)
        out: list[tuple[str, str]] = []
        while heap:
            _, block_id = heapq.heappop(heap)
            block = by_id[block_id]
            out.append((block.stage.display_name, block.description))
            for nxt in succ[block_id]:
                indegree[nxt] -= 1
                if indegree[nxt] == 0:
                    heapq.heappush(heap, (by_id[nxt].seq, nxt))
        return out

    def is_acyclic(self) -> bool:
        return len(self.serialize_stages()) == len(self.blocks)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "next_seq": self.next_seq,
            "blocks": [b.to_dict() for b in self.blocks],
            "links": [l.to_dict() for l in self.links],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlanGraph":
        return cls(
            blocks=tuple(StageBlock.from_dict(b) for b in d.get("blocks", [])),
            links=tuple(PlanLink.from_dict(l) for l in d.get("links", [])),
            next_seq=int(d.get("next_seq", 1)),
        )
