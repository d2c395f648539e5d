"""Block-by-block protocol runs: traces, decode records and payload replay."""

import json

import pytest

from omnirelay.errors import PreconditionError
from omnirelay.protocol_sim import (
    interference_accounting,
    payload_demo,
    run_distance_regulated,
    run_schedule,
)
from omnirelay.rate_analysis import allcast_rate_bound
from omnirelay.topology import (
    power_law,
    regular_line,
    ring,
    schedule_from_sets,
)


def adjacency(n):
    return [frozenset(x for x in (i - 1, i + 1) if 0 <= x < n) for i in range(n)]


def line(n, power=10.0, spacing=1.0):
    return regular_line(n, spacing, power_law(2.0), power, 1.0)


# ---------------------------------------------------------------------------
# completion anchors
# ---------------------------------------------------------------------------


def test_two_node_exchange_completes_immediately():
    t = line(2)
    rate = 0.999 * allcast_rate_bound(t)
    trace = run_distance_regulated(t, adjacency(2), rate, 4)
    assert trace.all_success()
    assert trace.completion_block == (1, 1)
    assert trace.first_failure() is None


def test_three_node_line_near_the_ceiling():
    t = line(3)
    bound = allcast_rate_bound(t)
    trace = run_distance_regulated(t, adjacency(3), 0.999 * bound, 6)
    assert trace.all_success()
    assert trace.completion_block == (2, 1, 2)


def test_three_node_line_past_the_ceiling():
    t = line(3)
    bound = allcast_rate_bound(t)
    trace = run_distance_regulated(t, adjacency(3), 1.001 * bound, 6)
    assert not trace.all_success()
    failure = trace.first_failure()
    # An endpoint's two-message joint decode is the first to break, and the
    # plain sum-rate diagnostic already flags it.
    assert (failure.node, failure.block) == (0, 2)
    assert not failure.sum_rate_ok
    assert failure.missing == ((1, 2), (2, 1))
    # The middle node only needs lag-1 messages and still finishes.
    assert trace.completion_block == (None, 1, None)


def test_ring_finishes_in_two_blocks():
    t = ring(5, 1.0, power_law(2.0), 10.0, 1.0)
    one_hop = [frozenset({(i - 1) % 5, (i + 1) % 5}) for i in range(5)]
    rate = 0.999 * allcast_rate_bound(t)
    trace = run_distance_regulated(t, one_hop, rate, 6)
    assert trace.all_success()
    assert trace.completion_block == (2, 2, 2, 2, 2)


def test_zero_rate_completion_equals_the_hop_horizon():
    trace = run_distance_regulated(line(5, power=1.0), adjacency(5), 0.0, 8)
    assert trace.all_success()
    assert trace.completion_block == (4, 3, 2, 3, 4)


def test_completion_requires_enough_blocks():
    trace = run_distance_regulated(line(5, power=1.0), adjacency(5), 0.0, 2)
    assert trace.completion_block == (None, None, 2, None, None)


# ---------------------------------------------------------------------------
# trace structure
# ---------------------------------------------------------------------------


def run_small():
    t = line(4)
    rate = 0.8 * allcast_rate_bound(t)
    return run_distance_regulated(t, adjacency(4), rate, 6)


def test_knowledge_grows_monotonically():
    trace = run_small()
    for b in range(trace.blocks):
        for i in range(4):
            assert trace.knowledge[b][i] <= trace.knowledge[b + 1][i]


def test_nothing_known_from_the_future():
    trace = run_small()
    for b in range(trace.blocks + 1):
        for i in range(4):
            assert all(beta <= b for _, beta in trace.knowledge[b][i])
    for row in trace.transmissions:
        for tx in row:
            assert all(beta <= tx.block for _, beta in tx.bundle)


def test_bundles_carry_fresh_plus_known_repeats():
    trace = run_small()
    sched = trace.schedule
    for row in trace.transmissions:
        for tx in row:
            i, b = tx.sender, tx.block
            assert (i, b) in tx.bundle
            expected = {(i, b)}
            know = trace.knowledge[b - 1][i]
            for k in range(1, sched.horizon + 1):
                # Lag-k decodes finish at block beta + k - 1, so the block
                # b repeat of that set covers beta = b - k.
                for j in sched.encode_set(i, k):
                    beta = b - k
                    if beta >= 1 and (j, beta) in know:
                        expected.add((j, beta))
            assert tx.bundle == frozenset(expected)
            assert not tx.skipped  # every repeat was decoded in time here


def test_skipped_repeats_are_reported():
    t = line(3)
    bound = allcast_rate_bound(t)
    trace = run_distance_regulated(t, adjacency(3), 1.001 * bound, 4)
    # Node 0 never decodes (2, 1), so its lag-2 repeat of source 2 is dropped.
    skipped = [tx.skipped for row in trace.transmissions for tx in row if tx.sender == 0]
    assert any((2, 1) in s for s in skipped)


def test_decode_targets_follow_the_lag_table():
    trace = run_small()
    for row in trace.decodes:
        for rec in row:
            lag = trace.schedule.decode_lag(rec.node)
            expected = sorted(
                (j, rec.block - k + 1) for j, k in lag.items() if rec.block - k + 1 >= 1
            )
            assert sorted(rec.targets) == expected


def test_success_commits_targets_only():
    # At a generous rate an endpoint decodes the far message a block early;
    # the record shows the extra while the knowledge state waits for the lag.
    t = line(3)
    trace = run_distance_regulated(t, adjacency(3), 0.3, 3)
    first = trace.decodes[0][0]
    assert first.targets == ((1, 1),)
    assert (2, 1) in first.decoded
    assert trace.knowledge[1][0] == frozenset({(1, 1)})
    second = trace.decodes[1][0]
    assert (2, 1) in second.targets
    assert trace.knowledge[2][0] >= {(1, 1), (1, 2), (2, 1)}


def test_failed_decode_leaves_knowledge_unchanged():
    t = line(3)
    bound = allcast_rate_bound(t)
    trace = run_distance_regulated(t, adjacency(3), 1.001 * bound, 4)
    for row in trace.decodes:
        for rec in row:
            if not rec.success:
                assert trace.knowledge[rec.block][rec.node] == trace.knowledge[rec.block - 1][rec.node]
                assert set(rec.missing) <= set(rec.targets)
                assert set(rec.decoded).isdisjoint(rec.missing)


def test_records_cover_every_node_and_block():
    trace = run_small()
    assert len(trace.transmissions) == trace.blocks
    assert len(trace.decodes) == trace.blocks
    assert len(trace.knowledge) == trace.blocks + 1
    for b, (txs, recs) in enumerate(zip(trace.transmissions, trace.decodes), start=1):
        assert [tx.sender for tx in txs] == list(range(4))
        assert [tx.block for tx in txs] == [b] * 4
        assert [rec.node for rec in recs] == list(range(4))


def test_trace_dict_is_json_stable():
    a = json.dumps(run_small().to_dict(), sort_keys=True)
    b = json.dumps(run_small().to_dict(), sort_keys=True)
    assert a == b
    payload = json.loads(a)
    assert payload["all_success"] is True
    assert payload["nodes"] == 4


# ---------------------------------------------------------------------------
# interference accounting
# ---------------------------------------------------------------------------


def test_full_schedules_leave_no_interference():
    trace = run_small()
    for report in interference_accounting(trace):
        assert report.undecoded == ()
        assert report.power == 0.0


def test_truncated_decode_sets_show_up_as_interference():
    t = line(4)
    rows = [[{1}], [{0, 2}], [{1, 3}], [{2}]]
    schedule = schedule_from_sets(rows, rows)
    trace = run_schedule(t, schedule, 0.05, 4)
    reports = interference_accounting(trace)
    assert reports[0].undecoded == (2, 3)
    assert reports[0].power == pytest.approx(2.5 + 10.0 / 9.0)
    assert reports[1].undecoded == (3,)
    assert reports[2].undecoded == (0,)


def test_unreached_nodes_produce_warnings():
    t = line(4)
    split = [frozenset({1}), frozenset({0}), frozenset({3}), frozenset({2})]
    trace = run_distance_regulated(t, split, 0.1, 3)
    assert any("never reaches" in w for w in trace.warnings)
    assert trace.completion_block == (None,) * 4


# ---------------------------------------------------------------------------
# payload replay
# ---------------------------------------------------------------------------


def test_payload_replay_recovers_everything_on_success():
    t = line(3)
    rate = 0.999 * allcast_rate_bound(t)
    trace = run_distance_regulated(t, adjacency(3), rate, 6)
    for report in payload_demo(trace, (4, 4, 4), seed=5):
        assert report.complete
        assert report.recovered == report.known
        assert report.mismatches == ()


def test_payload_counts_track_the_trace():
    trace = run_distance_regulated(line(2), adjacency(2), 0.5, 3)
    reports = payload_demo(trace, (2, 2), seed=1)
    # Each node learns the peer's message in all three blocks.
    assert [r.known for r in reports] == [3, 3]
    assert all(r.complete for r in reports)


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_payload_replay_seed_stability(seed):
    trace = run_distance_regulated(line(3), adjacency(3), 0.2, 4)
    assert payload_demo(trace, (3, 4, 5), seed=seed) == payload_demo(
        trace, (3, 4, 5), seed=seed
    )


def test_payload_demo_empty_and_invalid():
    trace = run_distance_regulated(line(3), adjacency(3), 0.1, 0)
    assert payload_demo(trace, (2, 2, 2)) == ()
    live = run_distance_regulated(line(3), adjacency(3), 0.1, 2)
    with pytest.raises(PreconditionError):
        payload_demo(live, (2, 2))
    with pytest.raises(PreconditionError):
        payload_demo(live, (2, 0, 2))


# ---------------------------------------------------------------------------
# input validation
# ---------------------------------------------------------------------------


def test_run_schedule_rejects_bad_inputs():
    t = line(3)
    rows = [[{1}], [{0, 2}], [{1}]]
    schedule = schedule_from_sets(rows, rows)
    with pytest.raises(ValueError):
        run_schedule(t, schedule, -0.1, 3)
    with pytest.raises(ValueError):
        run_schedule(t, schedule, 0.1, -1)
    with pytest.raises(PreconditionError):
        run_schedule(line(4), schedule, 0.1, 3)


def test_run_schedule_rejects_rule_violations():
    t = line(2)
    bad = schedule_from_sets([[{0, 1}], [{0}]], [[set()], [set()]])
    with pytest.raises(PreconditionError, match="rule"):
        run_schedule(t, bad, 0.1, 2)


def test_one_hop_sets_must_match_the_topology():
    with pytest.raises(PreconditionError):
        run_distance_regulated(line(3), adjacency(4), 0.1, 2)
