import itertools
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vanetcert import certs
from vanetcert.adversary_list import AdversaryListEntry
from vanetcert.certs import CertType
from vanetcert.messages import (
    Accusation,
    CrlAdd,
    CrlRequest,
    CrlResponse,
    DataMessage,
    ForwardedAccusation,
    SealedKind,
    WarningMessage,
    category_lookup,
    decode_wire,
    encode_wire,
    seal,
    unseal,
)
from vanetcert.protocol import (
    Decision,
    ProtocolConfig,
    RejectCause,
    SuspicionTracker,
    serve_crl,
)
from vanetcert.world import World

NOW = 100


def _msg(sender, claim, category=1, ts=0):
    return DataMessage(sender, category_lookup(category), claim, ts, identity_cert=None, status_cert=None)


# --- receive ----------------------------------------------------------------

def oracle(in_al, ac, sig_ok, fresh):
    """Receive outcome, decided in this order: AL, status cert kind, signature, pseudonym expiry."""
    if in_al:
        return Decision.IGNORE_KNOWN_ADVERSARY, None
    if ac:
        return Decision.NEW_ADVERSARY_DETECTED, None
    if not sig_ok:
        return Decision.REJECT, RejectCause.BAD_SIGNATURE
    if not fresh:
        return Decision.REJECT, RejectCause.EXPIRED_IDENTITY
    return Decision.ACCEPT, None


@pytest.mark.parametrize("in_al,ac,sig_ok,fresh", list(itertools.product((False, True), repeat=4)))
def test_receive_truth_table(in_al, ac, sig_ok, fresh):
    world = World(horizon=0)
    receiver, sender = world.add_vehicle(1), world.add_vehicle(2)
    if ac:
        sender.status_cert = world.ca.issue(CertType.AC, 2, 0, reason=1)
    now = 100 if fresh else 650
    message = sender.compose(1, 100, now, identity=sender.identities[0])
    if not sig_ok:
        sig = bytearray(message.signature)
        sig[0] ^= 0x80
        message = replace(message, signature=bytes(sig))
    if in_al:
        receiver.al.record(AdversaryListEntry(5, 2, 0, 1, 0))
    before = receiver.decrypt_count
    decision = receiver.receive(message, now)
    assert (decision.kind, decision.cause) == oracle(in_al, ac, sig_ok, fresh)
    if in_al:
        assert receiver.decrypt_count == before
        assert receiver.al.get(2).timestamp == now
    else:
        assert receiver.decrypt_count == before + 1
    if decision.kind is Decision.NEW_ADVERSARY_DETECTED:
        assert receiver.al.ids() == [2]
        assert decision.warning.adversary_id == 2
        assert decision.warning.warning_issuer_id == 1


def test_identity_of_another_vehicle_is_mismatch(world):
    a, b = world.vehicles[1], world.vehicles[2]
    stolen = a.compose(1, 5, NOW, identity=b.current_identity(NOW))
    decision = world.vehicles[3].receive(stolen, NOW)
    # b's pseudonym points at b's key, so a's signature does not verify against it
    assert decision.kind is Decision.REJECT


def test_status_cert_for_other_group_is_malformed(world):
    other = World(horizon=3600)
    stranger = other.add_vehicle(50)
    other.trust.group = other.provider.generate_keypair(12345)
    decision = world.vehicles[1].receive(stranger.compose(1, 5, NOW), NOW)
    assert decision.cause is RejectCause.MALFORMED_CERT


def test_forged_ac_rejected(world):
    sender = world.vehicles[2]
    forged = certs.issue("AC", 2, world.provider.generate_keypair(77), 0, reason=1)
    sender.status_cert = forged
    decision = world.vehicles[1].receive(sender.compose(1, 5, NOW), NOW)
    assert decision.cause is RejectCause.BAD_SIGNATURE
    assert 2 not in world.vehicles[1].al


# --- warnings ---------------------------------------------------------------

class TestWarnings:
    def _warning(self, world, issuer=1, adversary=9, ts=NOW):
        v = world.vehicles[issuer]
        return WarningMessage(issuer, adversary, ts, 1, ts + certs.ONE_YEAR, v.vc).sign_with(v.keypair.private_key)

    def test_valid_warning_recorded(self, world):
        assert world.vehicles[2].process_warning(self._warning(world), NOW)
        assert world.vehicles[2].al.get(9).warning_issuer_id == 1

    def test_stale_warning_dropped(self, world):
        assert not world.vehicles[2].process_warning(self._warning(world, ts=NOW - 6), NOW)
        assert world.vehicles[2].process_warning(self._warning(world, ts=NOW - 5), NOW)

    def test_issuer_with_ac_ignored(self, world):
        w = self._warning(world)
        ac = world.ca.issue("AC", 1, 0, reason=1)
        assert not world.vehicles[2].process_warning(replace(w, issuer_vc=ac), NOW)
        assert len(world.vehicles[2].al) == 0

    def test_tampered_warning(self, world):
        w = replace(self._warning(world), adversary_id=8)
        assert not world.vehicles[2].process_warning(w, NOW)

    def test_warning_about_self_ignored(self, world):
        assert not world.vehicles[9].process_warning(self._warning(world), NOW)


# --- suspicion tracker ------------------------------------------------------

class TestTracker:
    def batch(self, liar=10):
        return [_msg(s, 55 if s == liar else 100) for s in range(1, 11)]

    def test_two_contradictions_accuse(self):
        tracker = SuspicionTracker(limit=2)
        first = tracker.observe(self.batch())
        assert first.contradictors == (10,) and first.accused == ()
        second = tracker.observe(self.batch())
        assert second.accused == (10,)

    def test_single_contradiction_only(self):
        tracker = SuspicionTracker(limit=2)
        assert tracker.observe(self.batch()).accused == ()
        assert tracker.observe([_msg(s, 100) for s in range(1, 11)]).accused == ()

    def test_unanimous(self):
        tracker = SuspicionTracker(limit=2)
        for _ in range(5):
            assert tracker.observe([_msg(s, 100) for s in range(1, 11)]).contradictors == ()

    def test_tie_has_no_majority(self):
        tracker = SuspicionTracker(limit=1)
        assert tracker.observe([_msg(1, 5), _msg(2, 6)]).contradictors == ()

    def test_categories_are_separate(self):
        tracker = SuspicionTracker(limit=1)
        batch = [_msg(s, 100, category=1) for s in range(1, 4)] + [_msg(4, 55, category=2)]
        assert tracker.observe(batch).accused == ()

    def test_vehicle_accusation_rr_is_bogus_information(self, world):
        accuser = world.vehicles[1]
        for _ in range(2):
            for sender in range(2, 11):
                accuser.tracker.note(_msg(sender, 55 if sender == 9 else 100))
            verdict, sealed = accuser.close_window(NOW, world.rsu.keypair.public_key)
        assert verdict.accused == (9,)
        body = unseal(sealed[0], world.rsu.keypair.private_key)
        assert (body.reason_code, body.accused_id, body.accuser_vc) == (1, 9, accuser.vc)


# --- RSU threshold ----------------------------------------------------------

def _road(n):
    world = World(horizon=3600)
    for vid in range(1, n + 2):
        world.add_vehicle(vid)
        if vid <= n:
            world.rsu.observe_presence(vid, NOW)
    return world


def _accusations(world, accusers, accused):
    return [world.vehicles[a].accuse(accused, NOW, world.rsu.keypair.public_key) for a in accusers]


class TestRsuCollect:
    def test_six_of_ten_forwards(self):
        world = _road(10)
        results = [world.rsu.collect(s, NOW) for s in _accusations(world, range(1, 7), 10)]
        assert results[:5] == [None] * 5
        forward = unseal(results[5], world.ca.keypair.private_key)
        assert isinstance(forward, ForwardedAccusation)
        assert (forward.accused_id, forward.reason_code) == (10, 1)

    def test_five_of_ten_holds(self):
        world = _road(10)
        assert all(world.rsu.collect(s, NOW) is None for s in _accusations(world, range(1, 6), 10))

    def test_repeated_accuser_counts_once(self):
        world = _road(10)
        repeats = _accusations(world, [1] * 7, 10)
        assert all(world.rsu.collect(s, NOW) is None for s in repeats)
        assert len(set([1] * 7)) == len(world.rsu.accusation_box[10])

    def test_accuser_with_ac_ignored(self):
        world = _road(10)
        for vid in range(1, 7):
            world.vehicles[vid].status_cert = world.ca.issue("AC", vid, 0, reason=1)
        sealed = []
        for vid in range(1, 7):
            v = world.vehicles[vid]
            body = Accusation(1, v.status_cert, bytes(40), NOW, 10).sign_with(v.keypair.private_key)
            sealed.append(seal(body, world.rsu.keypair.public_key))
        assert all(world.rsu.collect(s, NOW) is None for s in sealed)
        assert world.rsu.dropped["accuser-not-valid"] == 6

    def test_empty_road_never_forwards(self):
        world = _road(0)
        world.add_vehicle(1)
        assert world.rsu.collect(_accusations(world, [1], 2)[0], NOW) is None

    def test_forwards_once(self):
        world = _road(4)
        results = [world.rsu.collect(s, NOW) for s in _accusations(world, [1, 2, 3, 4], 5)]
        assert sum(r is not None for r in results) == 1

    def test_stale_accusation(self):
        world = _road(2)
        sealed = world.vehicles[1].accuse(3, NOW - 6, world.rsu.keypair.public_key)
        assert world.rsu.collect(sealed, NOW) is None
        assert world.rsu.dropped["stale"] == 1

    def test_presence_window(self):
        world = _road(4)
        assert world.rsu.present_count(NOW + 30) == 4
        assert world.rsu.present_count(NOW + 31) == 0


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 12), accusers=st.lists(st.integers(1, 12), max_size=20))
def test_property_threshold(n, accusers):
    """Forwarded exactly when the set of distinct present accusers exceeds half the road."""
    world = _road(n)
    accusers = [a for a in accusers if a <= n]
    forwarded_at = None
    for i, sealed in enumerate(_accusations(world, accusers, n + 1)):
        if world.rsu.collect(sealed, NOW) is not None:
            forwarded_at = i
    distinct_after = [len(set(accusers[: i + 1])) for i in range(len(accusers))]
    expected = next((i for i, d in enumerate(distinct_after) if d > n // 2), None)
    assert forwarded_at == expected


# --- CA and RSU orders -----------------------------------------------------

def _forwarded(world, accused=9, ts=NOW):
    body = ForwardedAccusation(1, bytes(40), ts, accused).sign_with(world.rsu.keypair.private_key)
    return seal(body, world.ca.keypair.public_key)


class TestCa:
    def test_issues_ac_and_extends_crl(self, world):
        order = world.ca.process_accusation(_forwarded(world), NOW)
        body = unseal(order, world.rsu.keypair.private_key)
        assert body.symbols() == ("RR", "Sig", "TS", "AV", "AC")
        assert len(body.adversary_cert.to_bytes()) == 100
        assert body.adversary_cert.cert_type is CertType.AC
        assert body.adversary_cert.review_date == NOW + certs.ONE_YEAR
        assert world.ca.crl == [CrlAdd(9, NOW, 1)]

    def test_duplicate(self, world):
        world.ca.process_accusation(_forwarded(world), NOW)
        assert world.ca.process_accusation(_forwarded(world), NOW + 1) is None
        assert len(world.ca.crl) == 1

    def test_tampered(self, world):
        sealed = _forwarded(world)
        raw = bytearray(sealed.ciphertext.payload)
        raw[3] ^= 1
        tampered = replace(sealed, ciphertext=replace(sealed.ciphertext, payload=bytes(raw)))
        assert world.ca.process_accusation(tampered, NOW) is None
        assert world.ca.crl == []

    def test_unknown_rsu(self, world):
        rogue = world.provider.generate_keypair(31337)
        body = ForwardedAccusation(1, bytes(40), NOW, 9).sign_with(rogue.private_key)
        assert world.ca.process_accusation(seal(body, world.ca.keypair.public_key), NOW) is None


class TestRsuExecute:
    def _orders(self, world):
        return world.rsu.execute(world.ca.process_accusation(_forwarded(world), NOW), NOW)

    def test_three_orders(self, world):
        orders = self._orders(world)
        kinds = [s.kind for s in orders]
        assert kinds == [SealedKind.ERASE_TO_VEHICLE, SealedKind.INSERT_AC, SealedKind.ADD_BROADCAST]
        target = world.vehicles[9].keypair.private_key
        erase, insert = unseal(orders.erase, target), unseal(orders.insert, target)
        add = unseal(orders.broadcast, world.trust.group.private_key)
        assert erase.symbols() == ("RR", "Sig", "TS", "AV")
        assert insert.symbols() == ("AC", "TS", "Sig")
        assert add.symbols() == ("AV", "TS", "Sig", "RR", "RD")
        assert (add.accused_id, add.reason_code, add.review_date) == (9, 1, NOW + certs.ONE_YEAR)
        assert world.rsu.crl == [orders.crl_entry]

    def test_erase_and_insert_compliant(self, world):
        orders = self._orders(world)
        adversary = world.vehicles[9]
        assert adversary.apply_order(orders.erase, NOW)
        assert adversary.apply_order(orders.insert, NOW)
        assert adversary.vc is None and not adversary.can_sign
        message = decode_wire(encode_wire(adversary.compose(2, 0, NOW + 1)))
        assert message.identity_cert.cert_type is CertType.AC
        decision = world.vehicles[1].receive(message, NOW + 1)
        assert decision.kind is Decision.NEW_ADVERSARY_DETECTED
        assert adversary.accuse(1, NOW, world.rsu.keypair.public_key) is None

    def test_non_compliant_keeps_credentials(self):
        world = World(horizon=3600)
        for vid in range(1, 9):
            world.add_vehicle(vid)
        adversary = world.add_vehicle(9, compliant=False)
        orders = world.rsu.execute(world.ca.process_accusation(_forwarded(world), NOW), NOW)
        assert not adversary.apply_order(orders.erase, NOW)
        assert adversary.vc is not None
        # neighbours that took the broadcast still ignore it
        assert world.vehicles[1].process_add_broadcast(orders.broadcast, NOW)
        decision = world.vehicles[1].receive(adversary.compose(2, 0, NOW + 1), NOW + 1)
        assert decision.kind is Decision.IGNORE_KNOWN_ADVERSARY

    def test_replay_dropped(self, world):
        orders = self._orders(world)
        adversary = world.vehicles[9]
        adversary.compliant = False
        assert not adversary.apply_order(orders.erase, NOW)
        adversary.compliant = True
        assert not adversary.apply_order(orders.erase, NOW)
        assert adversary.vc is not None

    def test_order_for_other_vehicle_unreadable(self, world):
        orders = self._orders(world)
        assert not world.vehicles[1].apply_order(orders.erase, NOW)
        assert world.vehicles[1].vc is not None

    def test_departed_vehicle_gets_nothing(self, world):
        # orders are addressed by key; once gone, nobody on the road can open them
        orders = self._orders(world)
        assert all(not world.vehicles[v].apply_order(orders.erase, NOW) for v in range(1, 9))

    def test_broadcast_populates_al(self, world):
        orders = self._orders(world)
        for vid in range(1, 9):
            assert world.vehicles[vid].process_add_broadcast(orders.broadcast, NOW)
            assert world.vehicles[vid].al.ids() == [9]
        assert not world.vehicles[9].process_add_broadcast(orders.broadcast, NOW)


class TestServeCrl:
    def test_empty(self, world):
        assert serve_crl(world.ca, CrlRequest(1)) == CrlResponse(())

    def test_one(self, world):
        world.ca.process_accusation(_forwarded(world), NOW)
        assert serve_crl(world.ca, CrlRequest(1)).entries == (CrlAdd(9, NOW, 1),)

    def test_order_preserved(self, world):
        for vid in (7, 3, 9):
            world.ca.process_accusation(_forwarded(world, vid), NOW)
        assert [e.accused_id for e in serve_crl(world.ca, CrlRequest(1)).entries] == [7, 3, 9]
        assert [e.accused_id for e in serve_crl(world.rsu, CrlRequest(1)).entries] == []


def test_config_defaults():
    c = ProtocolConfig()
    assert (c.presence_window, c.freshness_window, c.observation_window, c.al_capacity) == (30, 5, 10, 10)
