"""
Tests for the pattern annotators, the consistent pass and merging.
"""

import itertools
import os
import sys

import networkx as nx

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from causal_process_view.causal import CausalGraph
from causal_process_view.discovery import ProcessModel
from causal_process_view.overlay import (
    Edit,
    EdgeTag,
    InvalidEditError,
    LabelConflictError,
    NodeSetMismatchError,
    annotate,
    annotate_collider,
    annotate_confounder,
    annotate_consistent,
    annotate_mediator,
    merge,
)


def make_model(activities, edges):
    graph = nx.DiGraph()
    graph.add_nodes_from(activities)
    graph.add_edges_from(edges)
    closure = nx.transitive_closure(graph, reflexive=False)
    return ProcessModel(
        activities=tuple(sorted(activities)),
        df_edges={edge: 100 for edge in sorted(edges)},
        relations={},
        ef_closure=frozenset((a, b) for a, b in closure.edges if a != b),
        provenance='test',
    )


def make_graph(activities, edges):
    return CausalGraph(tuple(sorted(activities)), tuple((a, b, 1.0) for a, b in sorted(edges)))


def summary(annotated):
    labels = {f'{a}->{b}': label.tag.value for (a, b), label in annotated.labels.items()}
    injected = sorted(f'{a}->{b}' for a, b in annotated.injected)
    return labels, injected


CONFOUNDER_NODES = ('Accept', 'Email', 'Archive')
COLLIDER_NODES = ('Email', 'Archive', 'CloseApplication')
MEDIATOR_NODES = ('Archive', 'CloseApplication', 'PaperDisposal')


def test_confounder_view():
    """Chain Accept -> Email -> Archive against a confounder on Accept."""
    print("Testing confounder annotation...")

    pdm = make_model(CONFOUNDER_NODES, [('Accept', 'Email'), ('Email', 'Archive')])
    cbp = make_graph(CONFOUNDER_NODES, [('Accept', 'Email'), ('Accept', 'Archive')])

    edits = annotate_confounder(pdm, cbp)
    assert edits == [
        Edit.label(('Accept', 'Email'), EdgeTag.CAUSAL, 'confounder'),
        Edit.inject(('Accept', 'Archive'), 'confounder', 1.0),
        Edit.label(('Email', 'Archive'), EdgeTag.NOT_CAUSAL, 'confounder'),
    ]
    assert annotate_collider(pdm, cbp) == []
    assert annotate_mediator(pdm, cbp) == []

    labels, injected = summary(annotate(pdm, cbp))
    assert labels == {'Accept->Email': 'C', 'Email->Archive': 'not C'}
    assert injected == ['Accept->Archive']
    print("  ✓ Confounder view matches\n")


def test_confounder_injects_missing_first_edge():
    """a ↠ b through an intermediate activity: a => b is injected, not labeled."""
    nodes = ('A', 'X', 'B', 'C')
    pdm = make_model(nodes, [('A', 'X'), ('X', 'B'), ('B', 'C')])
    cbp = make_graph(nodes, [('A', 'B'), ('A', 'C')])

    edits = [e for e in annotate_confounder(pdm, cbp) if e.edge[0] == 'A']
    assert Edit.inject(('A', 'B'), 'confounder', 1.0) in edits
    assert Edit.inject(('A', 'C'), 'confounder', 1.0) in edits
    assert not any(e.kind == 'label' and e.edge == ('A', 'B') for e in edits)


def test_confounder_keeps_causal_second_edge():
    """When the causal graph also has b -> c, b -> c gets no not-C label."""
    pdm = make_model(CONFOUNDER_NODES, [('Accept', 'Email'), ('Email', 'Archive')])
    cbp = make_graph(CONFOUNDER_NODES, [('Accept', 'Email'), ('Accept', 'Archive'), ('Email', 'Archive')])
    edits = annotate_confounder(pdm, cbp)
    assert not any(e.tag is EdgeTag.NOT_CAUSAL for e in edits)


def test_collider_view():
    """Chain Email -> Archive -> CloseApplication against a collider on CloseApplication."""
    print("Testing collider annotation...")

    pdm = make_model(COLLIDER_NODES, [('Email', 'Archive'), ('Archive', 'CloseApplication')])
    cbp = make_graph(COLLIDER_NODES, [('Email', 'CloseApplication'), ('Archive', 'CloseApplication')])

    edits = annotate_collider(pdm, cbp)
    assert edits == [
        Edit.label(('Archive', 'CloseApplication'), EdgeTag.CAUSAL, 'collider'),
        Edit.inject(('Email', 'CloseApplication'), 'collider', 1.0),
        Edit.label(('Email', 'Archive'), EdgeTag.NOT_CAUSAL, 'collider'),
    ]
    assert annotate_confounder(pdm, cbp) == []

    labels, injected = summary(annotate(pdm, cbp))
    assert labels == {'Archive->CloseApplication': 'C', 'Email->Archive': 'not C'}
    assert injected == ['Email->CloseApplication']

    # a -> b also causal: no not-C label
    cbp_full = make_graph(COLLIDER_NODES, [
        ('Email', 'CloseApplication'), ('Archive', 'CloseApplication'), ('Email', 'Archive')
    ])
    assert not any(e.tag is EdgeTag.NOT_CAUSAL for e in annotate_collider(pdm, cbp_full))

    # every a -> c already modeled: nothing to do
    closed = make_model(COLLIDER_NODES, [
        ('Email', 'Archive'), ('Archive', 'CloseApplication'), ('Email', 'CloseApplication')
    ])
    assert annotate_collider(closed, cbp) == []
    print("  ✓ Collider view matches\n")


def test_mediator_view():
    print("Testing mediator annotation...")

    chain = [('Archive', 'CloseApplication'), ('CloseApplication', 'PaperDisposal')]
    pdm = make_model(MEDIATOR_NODES, chain)
    cbp = make_graph(MEDIATOR_NODES, chain + [('Archive', 'PaperDisposal')])

    assert annotate_mediator(pdm, cbp) == [
        Edit.label(('Archive', 'CloseApplication'), EdgeTag.CAUSAL, 'mediator'),
        Edit.label(('CloseApplication', 'PaperDisposal'), EdgeTag.CAUSAL, 'mediator'),
        Edit.inject(('Archive', 'PaperDisposal'), 'mediator', 1.0),
    ]

    annotated = annotate(pdm, cbp)
    labels, injected = summary(annotated)
    assert labels == {'Archive->CloseApplication': 'C', 'CloseApplication->PaperDisposal': 'C'}
    assert injected == ['Archive->PaperDisposal']
    # the same injection from three annotators is applied once
    assert sum(1 for e in annotated.edits if e.kind == 'inject') == 1

    # no direct causal edge: triple skipped
    assert annotate_mediator(pdm, make_graph(MEDIATOR_NODES, chain)) == []
    # direct edge already modeled: triple skipped
    closed = make_model(MEDIATOR_NODES, chain + [('Archive', 'PaperDisposal')])
    assert annotate_mediator(closed, cbp) == []
    print("  ✓ Mediator view matches\n")


def test_consistent_pass():
    print("Testing consistent pass...")

    pdm = make_model(('A', 'B', 'C'), [('A', 'B'), ('B', 'C')])
    cbp = make_graph(('A', 'B', 'C'), [('A', 'B')])

    edits = annotate_consistent(pdm, cbp)
    assert edits == [Edit.label(('A', 'B'), EdgeTag.CAUSAL, 'consistent')]

    annotated = merge(pdm, [edits])
    assert annotated.label_of('B', 'C').tag is EdgeTag.UNLABELED
    assert annotated.edges_tagged(EdgeTag.UNLABELED) == [('B', 'C')]

    prior = [Edit.label(('A', 'B'), EdgeTag.CAUSAL, 'confounder')]
    assert annotate_consistent(pdm, cbp, prior) == []
    print("  ✓ Consistent pass works\n")


def test_merge_conflict_and_dedup():
    print("Testing merge...")

    pdm = make_model(('A', 'B', 'C'), [('A', 'B'), ('B', 'C')])
    causal = Edit.label(('A', 'B'), EdgeTag.CAUSAL, 'confounder')
    not_causal = Edit.label(('A', 'B'), EdgeTag.NOT_CAUSAL, 'collider')

    try:
        merge(pdm, [[causal], [not_causal]])
        assert False, "Conflicting labels should be rejected"
    except LabelConflictError as e:
        assert e.edge == ('A', 'B')
        assert e.first.source == 'confounder' and e.second.source == 'collider'
        assert 'confounder' in str(e) and 'collider' in str(e)

    inject = Edit.inject(('A', 'C'), 'confounder', 1.0)
    merged = merge(pdm, [[causal, inject], [causal, Edit.inject(('A', 'C'), 'mediator', 1.0)]])
    assert len(merged.edits) == 2
    assert list(merged.injected) == [('A', 'C')]

    disjoint = merge(pdm, [[causal], [Edit.label(('B', 'C'), EdgeTag.CAUSAL, 'mediator')]])
    assert len(disjoint.labels) == 2

    try:
        merge(pdm, [[Edit.label(('A', 'C'), EdgeTag.CAUSAL, 'x')]])
        assert False, "Labels on non-model edges should be rejected"
    except InvalidEditError:
        pass
    try:
        merge(pdm, [[Edit.inject(('A', 'B'), 'x', 1.0)]])
        assert False, "Injections onto model edges should be rejected"
    except InvalidEditError:
        pass
    print("  ✓ Merge works\n")


def test_node_set_mismatch():
    pdm = make_model(('A', 'B', 'C'), [('A', 'B'), ('B', 'C')])
    cbp = make_graph(('A', 'B'), [('A', 'B')])
    for annotator in (annotate_confounder, annotate_collider, annotate_mediator):
        try:
            annotator(pdm, cbp)
            assert False, "Missing causal nodes should be rejected"
        except NodeSetMismatchError as e:
            assert 'C' in str(e)


def edge_sets(nodes):
    """Every orientation choice (none, forward, backward) of every node pair."""
    pairs = list(itertools.combinations(nodes, 2))
    for choice in itertools.product((None, 0, 1), repeat=len(pairs)):
        edges = []
        for (a, b), pick in zip(pairs, choice):
            if pick == 0:
                edges.append((a, b))
            elif pick == 1:
                edges.append((b, a))
        yield edges


def test_properties_on_three_node_combinations():
    """R2 soundness, base preservation, idempotence and agreement on all 3-node inputs."""
    print("Testing overlay properties on all 3-node combinations...")

    nodes = ('A', 'B', 'C')
    checked = 0
    for pdm_edges in edge_sets(nodes):
        pdm = make_model(nodes, pdm_edges)
        for cbp_edges in edge_sets(nodes):
            if not nx.is_directed_acyclic_graph(nx.DiGraph(cbp_edges)):
                continue
            cbp = make_graph(nodes, cbp_edges)
            annotated = annotate(pdm, cbp)

            # base preserved
            assert annotated.base.activities == pdm.activities
            assert annotated.base.df_edges == pdm.df_edges

            for edge in pdm.edges:
                tag = annotated.label_of(*edge).tag
                if cbp.has_edge(*edge):
                    assert tag is EdgeTag.CAUSAL
                else:
                    assert tag is not EdgeTag.CAUSAL
            for edge in annotated.injected:
                assert cbp.has_edge(*edge) and not pdm.has_edge(*edge)
            assert set(annotated.labels) <= set(pdm.df_edges)

            again = annotate(pdm, cbp, start=annotated)
            assert again.edits == annotated.edits
            assert again.labels == annotated.labels
            assert again.injected == annotated.injected

            if set(pdm_edges) == set(cbp_edges):
                assert annotate_confounder(pdm, cbp) == []
                assert annotate_collider(pdm, cbp) == []
                assert annotate_mediator(pdm, cbp) == []
                assert annotated.edges_tagged(EdgeTag.CAUSAL) == pdm.edges
            checked += 1
    print(f"  Checked {checked} combinations")
    print("  ✓ Properties hold\n")


def test_r1_soundness_on_chain_patterns():
    """A chain edge whose target is caused elsewhere ends not C with the true cause injected."""
    nodes = ('A', 'B', 'C')
    for a, b, c in itertools.permutations(nodes):
        pdm = make_model(nodes, [(a, b), (b, c)])
        # confounder: c is caused by a, not by b
        annotated = annotate(pdm, make_graph(nodes, [(a, b), (a, c)]))
        assert annotated.label_of(b, c).tag is EdgeTag.NOT_CAUSAL
        assert (a, c) in annotated.injected
        # collider: b is not caused by a, c is caused by a
        annotated = annotate(pdm, make_graph(nodes, [(a, c), (b, c)]))
        assert annotated.label_of(a, b).tag is EdgeTag.NOT_CAUSAL
        assert (a, c) in annotated.injected


def main():
    """Run all tests."""
    test_confounder_view()
    test_confounder_injects_missing_first_edge()
    test_confounder_keeps_causal_second_edge()
    test_collider_view()
    test_mediator_view()
    test_consistent_pass()
    test_merge_conflict_and_dedup()
    test_node_set_mismatch()
    test_properties_on_three_node_combinations()
    test_r1_soundness_on_chain_patterns()
    print("All overlay tests passed! ✓")
    return 0


if __name__ == '__main__':
    exit(main())
