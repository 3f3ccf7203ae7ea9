import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vanetcert.adversary_list import AdversaryList, AdversaryListEntry
from vanetcert.errors import NotFound


def entry(adv, ts=0, issuer=1, reason=1):
    return AdversaryListEntry(issuer, adv, ts, reason, ts + 31_536_000)


def filled(*ids_newest_first):
    al = AdversaryList()
    for adv in reversed(ids_newest_first):
        al.record(entry(adv))
    return al


def naive_replay(ops, capacity=10):
    """Unbounded list; dedupe and truncate after every op."""
    state = []
    history = []
    for op, arg in ops:
        if op == "record":
            state.insert(0, arg)
            seen, deduped = set(), []
            for e in state:
                if e.adversary_id not in seen:
                    seen.add(e.adversary_id)
                    deduped.append(e)
            state = deduped
        elif op == "touch":
            vid, now = arg
            for i, e in enumerate(state):
                if e.adversary_id == vid:
                    state.pop(i)
                    state.insert(0, AdversaryListEntry(e.warning_issuer_id, vid, now, e.reason_code, e.review_date))
                    break
        else:
            state = [e for e in state if e.adversary_id not in arg]
        state = state[:capacity]
        history.append(tuple(state))
    return history


class TestRecord:
    def test_eviction_of_tenth(self):
        al = filled(*range(1, 11))
        assert len(al) == 10
        al.record(entry(11))
        assert al.ids() == [11, 1, 2, 3, 4, 5, 6, 7, 8, 9]
        assert 10 not in al

    def test_rerecord_moves_to_top_and_refreshes(self):
        al = filled(5, 3)
        al.record(entry(3, ts=99, reason=2))
        assert al.ids() == [3, 5]
        assert al.get(3).timestamp == 99
        assert al.get(3).reason_code == 2
        ops = [("record", entry(3)), ("record", entry(5)), ("record", entry(3, ts=99, reason=2))]
        assert naive_replay(ops)[-1] == al.entries

    def test_empty(self):
        al = AdversaryList()
        al.record(entry(7))
        assert al.ids() == [7]

    def test_custom_capacity(self):
        al = AdversaryList(capacity=3)
        for adv in range(5):
            al.record(entry(adv))
        assert al.ids() == [4, 3, 2]

    def test_rerecord_when_full_evicts_nothing(self):
        al = filled(*range(1, 11))
        al.record(entry(10, ts=5))
        assert al.ids() == [10, 1, 2, 3, 4, 5, 6, 7, 8, 9]


class TestContains:
    def test_present(self):
        assert filled(5, 3).contains(3)
        assert 3 in filled(5, 3)

    def test_absent(self):
        assert not filled(5, 3).contains(4)

    def test_after_eleven_distinct(self):
        ops = [("record", entry(i)) for i in range(100, 111)]
        al = AdversaryList()
        for _, e in ops:
            al.record(e)
        oracle_ids = {e.adversary_id for e in naive_replay(ops)[-1]}
        assert not al.contains(100)
        assert 100 not in oracle_ids
        assert set(al.ids()) == oracle_ids


class TestTouch:
    def test_move_to_top(self):
        al = filled(5, 3, 9)
        al.touch(9, now=50)
        assert al.ids() == [9, 5, 3]
        assert al.get(9).timestamp == 50

    def test_singleton(self):
        al = filled(5)
        al.touch(5, now=1)
        assert al.ids() == [5]

    def test_absent(self):
        with pytest.raises(NotFound):
            filled(5, 3).touch(4, now=1)


class TestPurge:
    def test_departed(self):
        al = filled(5, 3, 9)
        al.purge_departed({3})
        assert al.ids() == [5, 9]

    def test_noop(self):
        al = filled(5, 3)
        al.purge_departed(set())
        assert al.ids() == [5, 3]

    def test_all_gone(self):
        al = filled(5)
        al.purge_departed({5, 6})
        assert al.ids() == []


def test_dump():
    al = AdversaryList()
    al.record(AdversaryListEntry(4, 9, 20, 1, 31_536_020))
    al.record(AdversaryListEntry(2, 7, 30, 3, 31_536_030))
    assert al.dump().splitlines() == ["0 2 7 30 3 31536030", "1 4 9 20 1 31536020"]


def test_position():
    al = filled(5, 3, 9)
    assert [al.position(v) for v in (5, 3, 9)] == [0, 1, 2]
    with pytest.raises(NotFound):
        al.position(1)


ids = st.integers(1, 15)
op_strategy = st.one_of(
    st.builds(lambda adv, ts, r: ("record", entry(adv, ts=ts, reason=r)), ids, st.integers(0, 10**6), st.integers(1, 4)),
    st.builds(lambda adv, ts: ("touch", (adv, ts)), ids, st.integers(0, 10**6)),
    st.builds(lambda s: ("purge", frozenset(s)), st.sets(ids, max_size=3)),
)


@settings(max_examples=200, deadline=None)
@given(ops=st.lists(op_strategy, max_size=60))
def test_property_matches_replay_oracle(ops):
    al = AdversaryList()
    for (op, arg), want in zip(ops, naive_replay(ops)):
        if op == "record":
            al.record(arg)
        elif op == "touch":
            if arg[0] in al:
                al.touch(*arg)
        else:
            al.purge_departed(arg)
        assert al.entries == want
        assert len(al) <= 10
        assert len(set(al.ids())) == len(al)
