"""In-process confidence checks: the receive truth table and the adversary-list replay oracle."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace

from .adversary_list import AdversaryList, AdversaryListEntry
from .certs import CertType
from .messages import DataMessage
from .protocol import Decision, RejectCause, Vehicle
from .world import World

RECEIVER_ID = 1
SENDER_ID = 2


def build_receive_case(
    in_al: bool, adversary_cert: bool, signature_ok: bool, identity_fresh: bool,
) -> tuple[Vehicle, DataMessage, int]:
    """Receiver, message and receive time for one cell of the truth table."""
    world = World(horizon=0)  # one pseudonym per vehicle, valid for [0, 600)
    receiver = world.add_vehicle(RECEIVER_ID)
    sender = world.add_vehicle(SENDER_ID)
    if adversary_cert:
        sender.status_cert = world.ca.issue(CertType.AC, SENDER_ID, 0, reason=1)
    now = 100 if identity_fresh else 601
    message = sender.compose(1, 100, now, identity=sender.identities[0])
    if not signature_ok:
        sig = bytearray(message.signature)
        sig[-1] ^= 0x01
        message = replace(message, signature=bytes(sig))
    if in_al:
        receiver.al.record(AdversaryListEntry(99, SENDER_ID, 0, 1, 0))
    return receiver, message, now


def expected_decision(in_al: bool, adversary_cert: bool, signature_ok: bool, identity_fresh: bool):
    if in_al:
        return Decision.IGNORE_KNOWN_ADVERSARY, None
    if adversary_cert:
        return Decision.NEW_ADVERSARY_DETECTED, None
    if not signature_ok:
        return Decision.REJECT, RejectCause.BAD_SIGNATURE
    if not identity_fresh:
        return Decision.REJECT, RejectCause.EXPIRED_IDENTITY
    return Decision.ACCEPT, None


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


def check_truth_table() -> list[Check]:
    checks = []
    for combo in itertools.product((False, True), repeat=4):
        receiver, message, now = build_receive_case(*combo)
        decrypts = receiver.decrypt_count
        decision = receiver.receive(message, now)
        want = expected_decision(*combo)
        ok = (decision.kind, decision.cause) == want
        if combo[0]:
            ok = ok and receiver.decrypt_count == decrypts
        label = "in_al={} ac={} sig_ok={} fresh={}".format(*(int(c) for c in combo))
        checks.append(Check(f"receive[{label}]", ok, decision.label))
    return checks


def replay_oracle(ops, capacity: int = 10) -> list[list[tuple]]:
    """Unbounded list, dedupe and truncate after every op; returns the state after each op."""
    entries: list[tuple] = []
    states = []
    for op in ops:
        if op[0] == "record":
            entry = op[1]
            entries = [entry] + [e for e in entries if e[1] != entry[1]]
        elif op[0] == "touch":
            _, vid, now = op
            hit = [e for e in entries if e[1] == vid]
            if hit:
                e = hit[0]
                entries = [(e[0], e[1], now, e[3], e[4])] + [x for x in entries if x[1] != vid]
        else:
            entries = [e for e in entries if e[1] not in op[1]]
        entries = entries[:capacity]
        states.append(list(entries))
    return states


def random_ops(n: int, seed: int, id_space: int = 15):
    rng = random.Random(seed)
    ops = []
    for t in range(n):
        roll = rng.random()
        if roll < 0.6:
            vid = rng.randint(1, id_space)
            ops.append(("record", (rng.randint(1, 50), vid, t, rng.randint(1, 4), t + 31_536_000)))
        elif roll < 0.9:
            ops.append(("touch", rng.randint(1, id_space), t))
        else:
            ops.append(("purge", frozenset(rng.sample(range(1, id_space + 1), rng.randint(0, 3)))))
    return ops


def apply_ops(al: AdversaryList, ops) -> list[list[tuple]]:
    states = []
    for op in ops:
        if op[0] == "record":
            al.record(AdversaryListEntry(*op[1]))
        elif op[0] == "touch":
            if op[1] in al:
                al.touch(op[1], op[2])
        else:
            al.purge_departed(op[1])
        states.append([
            (e.warning_issuer_id, e.adversary_id, e.timestamp, e.reason_code, e.review_date) for e in al.entries
        ])
    return states


def check_adversary_list(n_ops: int = 10_000, seed: int = 0) -> Check:
    ops = random_ops(n_ops, seed)
    got = apply_ops(AdversaryList(), ops)
    want = replay_oracle(ops)
    mismatch = next((i for i, (a, b) in enumerate(zip(got, want)) if a != b), None)
    if mismatch is None:
        return Check("adversary-list replay", True, f"{n_ops} ops")
    return Check("adversary-list replay", False, f"diverged at op {mismatch}")


def run_selftest() -> list[Check]:
    return check_truth_table() + [check_adversary_list()]
