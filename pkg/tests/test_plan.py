import pytest

from stageboard.errors import (
    CycleCreated,
    DuplicateLink,
    NonFinitePosition,
    SelfLink,
    UnknownBlock,
)
from stageboard.plan import STAGE_ORDER, PlanGraph, StageKind


def chain(kinds):
    """Build a graph from a list of stage kinds linked head to tail."""
    graph = PlanGraph()
    ids = []
    for i, kind in enumerate(kinds):
        graph, block_id = graph.add_block(kind, (float(i), 0.0))
        ids.append(block_id)
    for a, b in zip(ids, ids[1:]):
        graph = graph.link_blocks(a, b)
    return graph, ids


def test_stage_order_has_eight_kinds():
    assert len(STAGE_ORDER) == 8
    assert STAGE_ORDER[0] is StageKind.PROBLEM_FORMULATION
    assert STAGE_ORDER[-1] is StageKind.FEEDBACK


def test_display_names_split_camel_case():
    assert StageKind.PROBLEM_FORMULATION.display_name == "Problem Formulation"
    assert StageKind.TRAINING.display_name == "Training"
    assert StageKind.DATASET_CONSTRUCTION.display_name == "Dataset Construction"


def test_add_block_assigns_monotonic_seq():
    graph = PlanGraph()
    graph, a = graph.add_block(StageKind.TRAINING, (0, 0))
    graph, b = graph.add_block(StageKind.TESTING, (1, 1))
    assert graph.block(a).seq == 1
    assert graph.block(b).seq == 2
    assert graph.next_seq == 3


def test_seq_is_not_reused_after_delete():
    graph = PlanGraph()
    graph, a = graph.add_block(StageKind.TRAINING, (0, 0))
    graph = graph.delete_block(a)
    graph, b = graph.add_block(StageKind.TESTING, (0, 0))
    assert graph.block(b).seq == 2


def test_operations_do_not_mutate_the_input_graph():
    graph = PlanGraph()
    graph, a = graph.add_block(StageKind.TRAINING, (0, 0))
    before = graph
    graph.add_block(StageKind.TESTING, (1, 1))
    graph.set_description(a, "text")
    assert before.blocks == graph.blocks
    assert before.block(a).description == ""


@pytest.mark.parametrize("position", [(float("nan"), 0), (0, float("inf")), ("x", 1), (3,)])
def test_bad_positions_rejected(position):
    with pytest.raises(NonFinitePosition):
        PlanGraph().add_block(StageKind.TRAINING, position)


def test_move_block_changes_position_only():
    graph = PlanGraph()
    graph, a = graph.add_block(StageKind.TRAINING, (0, 0))
    moved = graph.move_block(a, (5.5, -2.0))
    assert moved.block(a).position == (5.5, -2.0)
    assert moved.block(a).seq == graph.block(a).seq


def test_move_unknown_block():
    with pytest.raises(UnknownBlock):
        PlanGraph().move_block("ghost", (0, 0))


def test_link_rejects_unknown_then_self_then_duplicate_then_cycle():
    graph, ids = chain([StageKind.TRAINING, StageKind.TESTING])
    with pytest.raises(UnknownBlock):
        graph.link_blocks(ids[0], "ghost")
    with pytest.raises(SelfLink):
        graph.link_blocks(ids[0], ids[0])
    with pytest.raises(DuplicateLink):
        graph.link_blocks(ids[0], ids[1])
    with pytest.raises(CycleCreated):
        graph.link_blocks(ids[1], ids[0])


def test_reverse_edge_between_unconnected_blocks_is_fine():
    graph = PlanGraph()
    graph, a = graph.add_block(StageKind.TRAINING, (0, 0))
    graph, b = graph.add_block(StageKind.TESTING, (1, 0))
    graph = graph.link_blocks(b, a)
    assert [name for name, _ in graph.serialize_stages()] == ["Testing", "Training"]


def test_longer_cycle_detected():
    graph, ids = chain([StageKind.TRAINING, StageKind.TESTING, StageKind.DEPLOYMENT])
    with pytest.raises(CycleCreated):
        graph.link_blocks(ids[2], ids[0])


def test_rejected_link_leaves_graph_unchanged():
    graph, ids = chain([StageKind.TRAINING, StageKind.TESTING])
    try:
        graph.link_blocks(ids[1], ids[0])
    except CycleCreated:
        pass
    assert len(graph.links) == 1
    assert graph.is_acyclic()


def test_delete_block_cascades_incident_links():
    graph, ids = chain([StageKind.TRAINING, StageKind.TESTING, StageKind.DEPLOYMENT])
    graph = graph.delete_block(ids[1])
    assert not graph.has_block(ids[1])
    assert graph.links == ()


def test_serialize_chain_follows_links():
    graph, ids = chain([StageKind.FEEDBACK, StageKind.TRAINING])
    assert [name for name, _ in graph.serialize_stages()] == ["Feedback", "Training"]


def test_serialize_breaks_ties_by_creation_seq():
    # Two independent roots: the earlier-created block must come first even
    # though it was added second alphabetically.
    graph = PlanGraph()
    graph, b = graph.add_block(StageKind.TESTING, (0, 0))
    graph, a = graph.add_block(StageKind.TRAINING, (1, 0))
    assert [name for name, _ in graph.serialize_stages()] == ["Testing", "Training"]


def test_serialize_diamond_interleaves_by_seq():
    graph = PlanGraph()
    graph, top = graph.add_block(StageKind.TASK_DEFINITION, (0, 0))
    graph, left = graph.add_block(StageKind.DATASET_CONSTRUCTION, (0, 1))
    graph, right = graph.add_block(StageKind.MODEL_DEFINITION, (1, 1))
    graph, bottom = graph.add_block(StageKind.TRAINING, (0, 2))
    for frm, to in [(top, left), (top, right), (left, bottom), (right, bottom)]:
        graph = graph.link_blocks(frm, to)
    names = [name for name, _ in graph.serialize_stages()]
    assert names == ["Task Definition", "Dataset Construction", "Model Definition", "Training"]


def test_serialize_includes_descriptions():
    graph = PlanGraph()
    graph, a = graph.add_block(StageKind.TRAINING, (0, 0))
    graph = graph.set_description(a, "Fit the model nightly.")
    assert graph.serialize_stages() == [("Training", "Fit the model nightly.")]


def test_validation_reports_missing_stages():
    graph = PlanGraph()
    graph, _ = graph.add_block(StageKind.TRAINING, (0, 0))
    report = graph.validate_for_handoff()
    assert not report.ok
    assert StageKind.PROBLEM_FORMULATION in report.missing_stages
    assert StageKind.TRAINING not in report.missing_stages


def test_validation_reports_empty_descriptions_and_isolated_blocks():
    graph = PlanGraph()
    ids = []
    for i, kind in enumerate(STAGE_ORDER):
        graph, block_id = graph.add_block(kind, (float(i), 0.0))
        ids.append(block_id)
    for a, b in zip(ids, ids[1:-1]):
        graph = graph.link_blocks(a, b)
    report = graph.validate_for_handoff()
    assert report.missing_stages == ()
    assert set(report.empty_descriptions) == set(ids)
    assert report.isolated_blocks == (ids[-1],)


def test_validation_passes_for_complete_plan():
    graph = PlanGraph()
    ids = []
    for i, kind in enumerate(STAGE_ORDER):
        graph, block_id = graph.add_block(kind, (float(i), 0.0))
        graph = graph.set_description(block_id, f"step {i}")
        ids.append(block_id)
    for a, b in zip(ids, ids[1:]):
        graph = graph.link_blocks(a, b)
    report = graph.validate_for_handoff()
    assert report.ok
    assert report.to_dict()["ok"] is True


def test_single_block_is_not_isolated():
    graph = PlanGraph()
    graph, a = graph.add_block(StageKind.TRAINING, (0, 0))
    assert graph.validate_for_handoff().isolated_blocks == ()


def test_round_trip_preserves_graph():
    graph, ids = chain([StageKind.TRAINING, StageKind.TESTING])
    graph = graph.set_description(ids[0], "first")
    restored = PlanGraph.from_dict(graph.to_dict())
    assert restored == graph
    assert restored.next_seq == graph.next_seq
