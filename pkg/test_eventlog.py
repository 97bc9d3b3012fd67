"""
Tests for the event log model: tabular form, variants, selection and anchoring.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from causal_process_view.eventlog import (
    AnchorModality,
    CaseTable,
    Event,
    EventLog,
    EventLogError,
    NegativeExecutionTimeError,
    PairExtractionError,
    Variant,
    anchor,
    extract_pair,
    extract_variants,
    flatten,
    select_cases,
    to_tabular,
    top_variants,
    variant_from_string,
)
from causal_process_view.synth import get_scenario, generate


def make_log(rows):
    """Build a log from (case_id, activity, timestamp) tuples."""
    return EventLog(tuple(Event(case_id, activity, float(ts)) for case_id, activity, ts in rows))


def sequences_log():
    return make_log([
        ('c1', 'A', 0), ('c1', 'B', 1), ('c1', 'C', 2),
        ('c2', 'A', 0), ('c2', 'B', 1), ('c2', 'C', 2),
        ('c3', 'A', 0), ('c3', 'C', 1), ('c3', 'B', 2),
    ])


def test_to_tabular():
    """One row per case, events sorted by timestamp."""
    print("Testing to_tabular...")

    table = to_tabular(make_log([('c1', 'B', 5), ('c1', 'A', 0), ('c2', 'A', 1)]))

    assert table.case_ids == ['c1', 'c2']
    assert table.rows[0].activities == ('A', 'B')
    assert [e.timestamp for e in table.rows[0].sequence] == [0.0, 5.0]
    assert table.rows[1].activities == ('A',)
    assert len(to_tabular(EventLog())) == 0
    print("  ✓ to_tabular works\n")


def test_to_tabular_tie_keeps_input_order():
    """Equal timestamps keep their input order."""
    print("Testing timestamp ties...")

    table = to_tabular(make_log([('c1', 'X', 3), ('c1', 'Y', 3), ('c1', 'W', 1)]))
    assert table.rows[0].activities == ('W', 'X', 'Y')

    table = to_tabular(make_log([('c1', 'Y', 3), ('c1', 'X', 3)]))
    assert table.rows[0].activities == ('Y', 'X')
    print("  ✓ Ties follow input order\n")


def test_flatten_round_trip():
    """to_tabular(flatten(T)) == T on a well-formed table."""
    print("Testing flatten round trip...")

    table = to_tabular(sequences_log())
    again = to_tabular(flatten(table))
    assert again == table
    print("  ✓ Round trip preserves the table\n")


def test_event_validation():
    """Events reject empty names, negative timestamps and late starts."""
    print("Testing event validation...")

    for kwargs in (
        dict(case_id='c1', activity='', timestamp=1.0),
        dict(case_id='c1', activity='A', timestamp=-1.0),
        dict(case_id='c1', activity='A', timestamp=float('nan')),
        dict(case_id='c1', activity='A', timestamp=1.0, start_timestamp=2.0),
    ):
        try:
            Event(**kwargs)
            assert False, f"Should reject {kwargs}"
        except EventLogError:
            pass

    try:
        CaseTable((to_tabular(sequences_log()).rows[0],) * 2)
        assert False, "Duplicate case ids should be rejected"
    except EventLogError:
        pass
    print("  ✓ Invalid events are rejected\n")


def test_extract_variants():
    """Variants are counted and sorted by frequency."""
    print("Testing variant extraction...")

    table = to_tabular(sequences_log())
    variants = extract_variants(table)

    assert variants == [Variant(('A', 'B', 'C'), 2), Variant(('A', 'C', 'B'), 1)]
    assert sum(v.frequency for v in variants) == len(table)

    single = extract_variants(to_tabular(make_log([('c9', 'A', 0)])))
    assert single == [Variant(('A',), 1)]
    print("  ✓ Variant extraction works\n")


def test_variant_helpers():
    """top_variants and variant_from_string."""
    print("Testing variant helpers...")

    variants = [Variant(('A', 'B'), 90), Variant(('B', 'A'), 8), Variant(('A',), 2)]
    assert top_variants(variants, coverage=0.9) == variants[:1]
    assert top_variants(variants, coverage=0.95) == variants[:2]
    assert top_variants(variants, coverage=1.0) == variants
    assert top_variants(variants, k=2) == variants[:2]

    variant = variant_from_string('Accept, Email,Archive')
    assert variant.sequence == ('Accept', 'Email', 'Archive')
    assert variant.label == 'Accept,Email,Archive'
    assert 'Email' in variant

    try:
        Variant((), 1)
        assert False, "Empty variant should be rejected"
    except EventLogError:
        pass
    for kwargs in ({'k': 0}, {'coverage': 0}, {'coverage': 1.2}):
        try:
            top_variants(variants, **kwargs)
            assert False, f"Should be rejected: {kwargs}"
        except EventLogError:
            pass
    print("  ✓ Variant helpers work\n")


def test_select_cases():
    """Selection keeps rows whose sequence equals a selected variant."""
    print("Testing case selection...")

    table = to_tabular(sequences_log())
    abc = Variant(('A', 'B', 'C'), 2)
    acb = Variant(('A', 'C', 'B'), 1)

    assert select_cases(table, [abc]).case_ids == ['c1', 'c2']
    assert select_cases(table, [abc, acb]) == table
    assert select_cases(table, extract_variants(table)) == table
    assert len(select_cases(table, [Variant(('A', 'B'))])) == 0
    print("  ✓ Case selection works\n")


def test_extract_pair():
    """First occurrences of both activities, one sample per row."""
    print("Testing pair extraction...")

    table = to_tabular(make_log([('c1', 'Accept', 2), ('c1', 'Email', 9), ('c1', 'Archive', 13)]))
    series = extract_pair(table, 'Email', 'Archive')
    assert series.samples.tolist() == [[9.0, 13.0]]
    assert series.modality is None

    repeated = to_tabular(make_log([('c1', 'A', 1), ('c1', 'B', 2), ('c1', 'A', 3)]))
    assert extract_pair(repeated, 'A', 'B').samples.tolist() == [[1.0, 2.0]]

    try:
        extract_pair(table, 'Accept', 'Accept')
        assert False, "Equal activities should be rejected"
    except PairExtractionError:
        pass

    try:
        extract_pair(table, 'Accept', 'Close')
        assert False, "Missing activity should be rejected"
    except PairExtractionError as e:
        assert 'c1' in str(e)

    assert not series.first.flags.writeable
    print("  ✓ Pair extraction works\n")


def test_anchor():
    """Absolute anchoring subtracts t_0, relative the preceding completion."""
    print("Testing anchoring...")

    table = to_tabular(make_log([('c1', 'X', 100), ('c1', 'A', 109), ('c1', 'B', 113)]))
    absolute = anchor(extract_pair(table, 'A', 'B'), table, 'absolute')
    assert absolute.samples.tolist() == [[9.0, 13.0]]
    assert absolute.modality is AnchorModality.ABSOLUTE

    table = to_tabular(make_log([('c1', 'Accept', 2), ('c1', 'Email', 9), ('c1', 'Archive', 13)]))
    relative = anchor(extract_pair(table, 'Email', 'Archive'), table, AnchorModality.RELATIVE)
    assert relative.samples.tolist() == [[7.0, 11.0]]

    # e_i opening the case falls back to t_0
    first = anchor(extract_pair(table, 'Accept', 'Email'), table, 'relative')
    assert first.samples.tolist() == [[0.0, 7.0]]

    try:
        AnchorModality.parse('sideways')
        assert False, "Unknown modality should be rejected"
    except ValueError:
        pass
    print("  ✓ Anchoring works\n")


def test_relative_anchor_rejects_negative_times():
    """A second activity completing before the first one's predecessor is rejected."""
    print("Testing negative relative execution times...")

    table = to_tabular(make_log([
        ('c1', 'A', 1), ('c1', 'B', 2), ('c1', 'C', 3), ('c1', 'D', 4),
        ('c2', 'A', 1), ('c2', 'D', 2), ('c2', 'B', 3), ('c2', 'C', 4),
    ]))
    # absolute anchoring is never negative
    assert anchor(extract_pair(table, 'C', 'D'), table, 'absolute').samples.tolist() == [[2.0, 3.0], [3.0, 1.0]]

    try:
        anchor(extract_pair(table, 'C', 'D'), table, 'relative')
        assert False, "Negative execution times should be rejected"
    except NegativeExecutionTimeError as e:
        assert e.case_id == 'c2'
        assert e.activity == 'D'
        assert e.value == -1.0
        assert isinstance(e, PairExtractionError)
    print("  ✓ Negative execution times rejected\n")


def test_anchor_uses_start_timestamps():
    """t_0 is the earliest start timestamp of the case."""
    print("Testing anchoring with start timestamps...")

    log = EventLog((
        Event('c1', 'Accept', 103.0, start_timestamp=100.0),
        Event('c1', 'Email', 111.0, start_timestamp=103.0),
    ))
    table = to_tabular(log)
    series = anchor(extract_pair(table, 'Accept', 'Email'), table, 'absolute')
    assert series.samples.tolist() == [[3.0, 11.0]]
    print("  ✓ Start timestamps define t_0\n")


def test_confounder_anchored_supports():
    """Absolute Accept times lie in [2,4] and Email times in [9,13]."""
    print("Testing anchored confounder supports...")

    log = generate(get_scenario('confounder-uniform', n_cases=2000, seed=7))
    table = to_tabular(log)
    series = anchor(extract_pair(table, 'Accept', 'Email'), table, 'absolute')

    assert len(series) == 2000
    assert np.all((series.first >= 2) & (series.first <= 4))
    assert np.all((series.second >= 9) & (series.second <= 13))
    assert np.all(series.samples >= 0)
    print(f"  Accept range: [{series.first.min():.3f}, {series.first.max():.3f}]")
    print("  ✓ Anchored times match the duration supports\n")


def main():
    """Run all tests."""
    test_to_tabular()
    test_to_tabular_tie_keeps_input_order()
    test_flatten_round_trip()
    test_event_validation()
    test_extract_variants()
    test_variant_helpers()
    test_select_cases()
    test_extract_pair()
    test_anchor()
    test_relative_anchor_rejects_negative_times()
    test_anchor_uses_start_timestamps()
    test_confounder_anchored_supports()
    print("All event log tests passed! ✓")
    return 0


if __name__ == '__main__':
    exit(main())
