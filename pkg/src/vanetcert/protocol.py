"""Vehicle, roadside unit and certification authority roles.

Each agent is a single-threaded state machine. Agents never share mutable
state; the only shared object is the read-only :class:`TrustAnchors` bundle
handed out at provisioning time.

Times passed to agents are integer seconds since the simulation epoch.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import certs
from .adversary_list import DEFAULT_CAPACITY, AdversaryList, AdversaryListEntry
from .certs import CertType, Certificate, Validation
from .crypto import CryptoProvider, KeyPair, default_provider
from .errors import Malformed, WrongRecipient
from .messages import (
    Accusation,
    AddBroadcast,
    CaEraseOrder,
    CrlAdd,
    CrlRequest,
    CrlResponse,
    DataMessage,
    ForwardedAccusation,
    InsertOrder,
    MessageCategory,
    Sealed,
    SealedKind,
    VehicleEraseOrder,
    WarningMessage,
    category_lookup,
    seal,
    unseal,
)

log = logging.getLogger(__name__)

BOGUS_TRAFFIC_INFORMATION = 1


@dataclass(frozen=True)
class ProtocolConfig:
    presence_window: int = 30
    freshness_window: int = 5
    observation_window: int = 10
    contradiction_limit: int = 2
    al_capacity: int = DEFAULT_CAPACITY


class KeyDirectory:
    """Maps key fingerprints to public keys for every enrolled principal."""

    def __init__(self, keys: Iterable[bytes] = (), provider: CryptoProvider | None = None):
        self._provider = provider or default_provider()
        self._keys: dict[bytes, bytes] = {}
        for key in keys:
            self.register(key)

    def register(self, public_key: bytes) -> bytes:
        fp = self._provider.fingerprint(public_key)
        self._keys[fp] = public_key
        return fp

    def lookup(self, key_fingerprint: bytes) -> bytes | None:
        return self._keys.get(key_fingerprint)


@dataclass
class TrustAnchors:
    """What every agent is provisioned with: CA key, RSU keys, road group key, key directory."""

    ca_public_key: bytes
    group: KeyPair
    directory: KeyDirectory
    rsu_keys: dict[int, bytes] = field(default_factory=dict)

    def rsu_signer(self, record, provider: CryptoProvider) -> int | None:
        """Id of the RSU whose key verifies ``record``, if any."""
        for rsu_id, key in self.rsu_keys.items():
            if record.verify_with(key, provider):
                return rsu_id
        return None


def _fresh(ts: int, now: int, window: int) -> bool:
    return abs(now - ts) <= window


# --- receive pipeline -------------------------------------------------------

class Decision(enum.Enum):
    ACCEPT = "Accept"
    IGNORE_KNOWN_ADVERSARY = "IgnoreKnownAdversary"
    NEW_ADVERSARY_DETECTED = "NewAdversaryDetected"
    REJECT = "Reject"
    # CRL-baseline receivers only
    IGNORE_REVOKED = "IgnoreRevoked"


class RejectCause(enum.Enum):
    MALFORMED_CERT = "MalformedCert"
    BAD_SIGNATURE = "BadSignature"
    EXPIRED_IDENTITY = "ExpiredIdentity"
    IDENTITY_MISMATCH = "IdentityMismatch"


@dataclass(frozen=True)
class ReceiveDecision:
    kind: Decision
    cause: RejectCause | None = None
    warning: WarningMessage | None = None

    @property
    def label(self) -> str:
        return f"{self.kind.value}({self.cause.value})" if self.cause else self.kind.value


ACCEPT = ReceiveDecision(Decision.ACCEPT)
IGNORE = ReceiveDecision(Decision.IGNORE_KNOWN_ADVERSARY)
IGNORE_REVOKED = ReceiveDecision(Decision.IGNORE_REVOKED)


def _reject(cause: RejectCause) -> ReceiveDecision:
    return ReceiveDecision(Decision.REJECT, cause)


@dataclass(frozen=True)
class WindowVerdict:
    contradictors: tuple[int, ...] = ()
    accused: tuple[int, ...] = ()


class SuspicionTracker:
    """Counts, per (sender, category), how often a sender contradicted the majority.

    Claims are collected for the current observation window; closing the
    window compares every sender's latest claim with the majority claim of
    its category. A sender reaching ``limit`` contradictions is reported and
    its counter starts over.
    """

    def __init__(self, limit: int = 2):
        self.limit = limit
        self.contradiction_count: dict[tuple[int, int], int] = {}
        self.window_claims: dict[int, dict[int, int]] = {}

    def note(self, message: DataMessage) -> None:
        self.window_claims.setdefault(message.category.code, {})[message.sender_id] = message.claim

    def observe(self, batch: Iterable[DataMessage]) -> WindowVerdict:
        """Note a whole batch and close the window."""
        for message in batch:
            self.note(message)
        return self.close_window()

    def close_window(self) -> WindowVerdict:
        contradictors, accused = [], []
        for category in sorted(self.window_claims):
            claims = self.window_claims[category]
            tally = Counter(claims.values()).most_common()
            if len(tally) < 2 or tally[0][1] == tally[1][1]:
                continue  # unanimous, or no strict majority to measure against
            majority = tally[0][0]
            for sender in sorted(claims):
                if claims[sender] == majority:
                    continue
                key = (sender, category)
                self.contradiction_count[key] = self.contradiction_count.get(key, 0) + 1
                contradictors.append(sender)
                if self.contradiction_count[key] >= self.limit:
                    self.contradiction_count[key] = 0
                    accused.append(sender)
        self.window_claims = {}
        return WindowVerdict(tuple(contradictors), tuple(accused))


class Vehicle:
    """On-board unit: credentials, adversary list, receive pipeline, accusations.

    ``compliant`` models the tamper-proof device honouring erase/insert
    orders. ``use_adversary_list=False`` turns the vehicle into a CRL-baseline
    receiver that checks senders against ``crl_view`` after full validation.
    """

    def __init__(
        self,
        vehicle_id: int,
        keypair: KeyPair,
        trust: TrustAnchors,
        *,
        vc: Certificate | None = None,
        identities: Iterable[Certificate] = (),
        compliant: bool = True,
        config: ProtocolConfig = ProtocolConfig(),
        provider: CryptoProvider | None = None,
        use_adversary_list: bool = True,
    ):
        self.id = vehicle_id
        self.keypair = keypair
        self.trust = trust
        self.status_cert = vc
        self.identities = sorted(identities, key=lambda c: c.issued_at)
        self.compliant = compliant
        self.config = config
        self.provider = provider or default_provider()
        self.use_adversary_list = use_adversary_list
        self.al = AdversaryList(config.al_capacity)
        self.tracker = SuspicionTracker(config.contradiction_limit)
        self.crl_view: set[int] = set()
        self.can_sign = True
        self.decrypt_count = 0
        self.al_lookup_count = 0
        self._last_order_ts: dict[SealedKind, int] = {}

    @property
    def vc(self) -> Certificate | None:
        cert = self.status_cert
        return cert if cert is not None and cert.cert_type is CertType.VC else None

    def current_identity(self, now: int) -> Certificate | None:
        current = None
        for cert in self.identities:
            if cert.issued_at <= now:
                current = cert
        return current

    # sending

    def compose(
        self,
        category: MessageCategory | int,
        claim: int,
        now: int,
        *,
        identity: Certificate | None = None,
    ) -> DataMessage:
        """Build a signed data message carrying the encrypted status certificate.

        A vehicle whose credentials were erased sends with its AC in both
        certificate slots and an all-zero signature.
        """
        if not isinstance(category, MessageCategory):
            category = category_lookup(category)
        if self.status_cert is None:
            raise RuntimeError(f"vehicle {self.id} holds no status certificate")
        status = self.provider.encrypt_for(self.trust.group.public_key, self.status_cert.to_bytes())
        if identity is None:
            identity = self.current_identity(now) if self.can_sign else None
        if identity is None:
            identity = self.status_cert
        message = DataMessage(self.id, category, claim, now, identity, status)
        if self.can_sign:
            message = message.sign_with(self.keypair.private_key, self.provider)
        return message

    # receiving

    def receive(self, message: DataMessage, now: int) -> ReceiveDecision:
        if self.use_adversary_list:
            self.al_lookup_count += 1
            if message.sender_id in self.al:
                self.al.touch(message.sender_id, now)
                return IGNORE

        self.decrypt_count += 1
        try:
            status = Certificate.from_bytes(
                self.provider.decrypt(self.trust.group.private_key, message.status_cert)
            )
        except (Malformed, WrongRecipient):
            return _reject(RejectCause.MALFORMED_CERT)

        if status.cert_type is CertType.AC:
            return self._on_adversary_cert(message, status, now)
        if status.cert_type is not CertType.VC:
            return _reject(RejectCause.MALFORMED_CERT)

        decision = self._check_valid_sender(message, status, now)
        if decision is not ACCEPT:
            return decision
        if not self.use_adversary_list and message.sender_id in self.crl_view:
            return IGNORE_REVOKED
        if self.use_adversary_list:
            self.tracker.note(message)
        return ACCEPT

    def _check_valid_sender(self, message: DataMessage, vc: Certificate, now: int) -> ReceiveDecision:
        ca = self.trust.ca_public_key
        identity = message.identity_cert
        vc_check = certs.validate(vc, ca, now, self.provider)
        if vc_check is Validation.BAD_SIGNATURE:
            return _reject(RejectCause.BAD_SIGNATURE)
        if vc_check is not Validation.VALID or identity.cert_type is not CertType.IDENTITY:
            return _reject(RejectCause.MALFORMED_CERT)

        id_check = certs.validate(identity, ca, now, self.provider)
        sender_key = self.trust.directory.lookup(identity.key_fingerprint)
        if (
            id_check is Validation.BAD_SIGNATURE
            or sender_key is None
            or not message.verify_with(sender_key, self.provider)
        ):
            return _reject(RejectCause.BAD_SIGNATURE)
        if id_check is Validation.EXPIRED:
            return _reject(RejectCause.EXPIRED_IDENTITY)
        if id_check is not Validation.VALID:
            return _reject(RejectCause.MALFORMED_CERT)

        if not (
            identity.vehicle_id == message.sender_id
            and vc.vehicle_id == message.sender_id
            and vc.key_fingerprint == identity.key_fingerprint
        ):
            return _reject(RejectCause.IDENTITY_MISMATCH)
        return ACCEPT

    def _on_adversary_cert(self, message: DataMessage, ac: Certificate, now: int) -> ReceiveDecision:
        check = certs.validate(ac, self.trust.ca_public_key, now, self.provider)
        if check is Validation.BAD_SIGNATURE:
            return _reject(RejectCause.BAD_SIGNATURE)
        if check is not Validation.VALID:
            return _reject(RejectCause.MALFORMED_CERT)
        if ac.vehicle_id != message.sender_id:
            return _reject(RejectCause.IDENTITY_MISMATCH)
        if not self.use_adversary_list:
            return IGNORE_REVOKED
        self.al.record(AdversaryListEntry(self.id, ac.vehicle_id, now, ac.reason_code, ac.review_date))
        return ReceiveDecision(Decision.NEW_ADVERSARY_DETECTED, warning=self._make_warning(ac, now))

    def _make_warning(self, ac: Certificate, now: int) -> WarningMessage | None:
        if self.vc is None or not self.can_sign:
            return None
        warning = WarningMessage(self.id, ac.vehicle_id, now, ac.reason_code, ac.review_date, self.vc)
        return warning.sign_with(self.keypair.private_key, self.provider)

    def process_warning(self, warning: WarningMessage, now: int) -> bool:
        """Record a neighbour's adversary warning; returns False if it was dropped."""
        if not self.use_adversary_list or warning.adversary_id == self.id:
            return False
        issuer_vc = warning.issuer_vc
        if issuer_vc.cert_type is not CertType.VC or issuer_vc.vehicle_id != warning.warning_issuer_id:
            return False
        if certs.validate(issuer_vc, self.trust.ca_public_key, now, self.provider) is not Validation.VALID:
            return False
        key = self.trust.directory.lookup(issuer_vc.key_fingerprint)
        if key is None or not warning.verify_with(key, self.provider):
            return False
        if not _fresh(warning.timestamp, now, self.config.freshness_window):
            return False
        self.al.record(AdversaryListEntry(
            warning.warning_issuer_id, warning.adversary_id, warning.timestamp,
            warning.reason_code, warning.review_date,
        ))
        return True

    def process_add_broadcast(self, sealed: Sealed, now: int) -> bool:
        """Apply the RSU's road-wide adversary announcement."""
        if not self.use_adversary_list or sealed.kind is not SealedKind.ADD_BROADCAST:
            return False
        self.decrypt_count += 1
        try:
            body = unseal(sealed, self.trust.group.private_key, self.provider)
        except (Malformed, WrongRecipient):
            return False
        rsu_id = self.trust.rsu_signer(body, self.provider)
        if rsu_id is None or not _fresh(body.timestamp, now, self.config.freshness_window):
            return False
        if body.accused_id == self.id:
            return False
        self.al.record(AdversaryListEntry(rsu_id, body.accused_id, body.timestamp, body.reason_code, body.review_date))
        return True

    def purge_departed(self, departed_ids: Iterable[int]) -> None:
        self.al.purge_departed(departed_ids)

    # suspicion and accusation

    def close_window(self, now: int, rsu_public_key: bytes) -> tuple[WindowVerdict, list[Sealed]]:
        """Close the observation window; return the verdict and any sealed accusations."""
        verdict = self.tracker.close_window()
        accusations = [
            acc for acc in (self.accuse(av, now, rsu_public_key) for av in verdict.accused) if acc is not None
        ]
        return verdict, accusations

    def accuse(self, accused_id: int, now: int, rsu_public_key: bytes,
               reason_code: int = BOGUS_TRAFFIC_INFORMATION) -> Sealed | None:
        if self.vc is None or not self.can_sign:
            return None
        body = Accusation(reason_code, self.vc, bytes(40), now, accused_id)
        body = body.sign_with(self.keypair.private_key, self.provider)
        return seal(body, rsu_public_key, self.provider)

    # revocation orders

    def apply_order(self, sealed: Sealed, now: int) -> bool:
        """Apply an erase or insert order addressed to this vehicle.

        Returns True when the order was authentic, fresh and acted upon.
        Non-compliant vehicles verify but ignore the order.
        """
        if sealed.kind not in (SealedKind.ERASE_TO_VEHICLE, SealedKind.INSERT_AC):
            return False
        try:
            body = unseal(sealed, self.keypair.private_key, self.provider)
        except (Malformed, WrongRecipient):
            return False
        if self.trust.rsu_signer(body, self.provider) is None:
            return False
        if not _fresh(body.timestamp, now, self.config.freshness_window):
            return False
        last = self._last_order_ts.get(sealed.kind)
        if last is not None and body.timestamp <= last:
            return False
        if isinstance(body, VehicleEraseOrder):
            if body.accused_id != self.id:
                return False
        else:
            ac = body.adversary_cert
            if ac.vehicle_id != self.id or ac.cert_type is not CertType.AC:
                return False
            if certs.validate(ac, self.trust.ca_public_key, now, self.provider) is not Validation.VALID:
                return False
        self._last_order_ts[sealed.kind] = body.timestamp
        if not self.compliant:
            return False
        if isinstance(body, VehicleEraseOrder):
            self.status_cert = None
            self.identities = []
            self.can_sign = False
        else:
            self.status_cert = body.adversary_cert
        return True


# --- roadside unit ----------------------------------------------------------

@dataclass(frozen=True)
class RsuOrders:
    """The three outbound messages produced from one CA erase order."""

    accused_id: int
    erase: Sealed
    insert: Sealed
    broadcast: Sealed
    crl_entry: CrlAdd

    def __iter__(self):
        return iter((self.erase, self.insert, self.broadcast))


class RoadsideUnit:
    """Tracks road presence, tallies accusations, relays CA orders."""

    def __init__(
        self,
        rsu_id: int,
        keypair: KeyPair,
        trust: TrustAnchors,
        *,
        config: ProtocolConfig = ProtocolConfig(),
        provider: CryptoProvider | None = None,
    ):
        self.id = rsu_id
        self.keypair = keypair
        self.trust = trust
        self.config = config
        self.provider = provider or default_provider()
        self.present_vehicles: dict[int, int] = {}
        self.accusation_box: dict[int, dict[int, int]] = {}
        self.forwarded: set[int] = set()
        self.crl: list[CrlAdd] = []
        self.dropped = Counter()

    def observe_presence(self, vehicle_id: int, now: int) -> None:
        self.present_vehicles[vehicle_id] = now

    def present_count(self, now: int) -> int:
        horizon = now - self.config.presence_window
        return sum(1 for seen in self.present_vehicles.values() if seen >= horizon)

    def threshold(self, now: int) -> int:
        """Accusers needed: strictly more than half the vehicles present."""
        return self.present_count(now) // 2 + 1

    def _drop(self, why: str) -> None:
        self.dropped[why] += 1
        log.debug("rsu %s dropped accusation: %s", self.id, why)

    def collect(self, sealed: Sealed, now: int) -> Sealed | None:
        """Take one sealed accusation; return the CA-bound accusation once the threshold is passed."""
        if sealed.kind is not SealedKind.ACCUSATION:
            self._drop("wrong-kind")
            return None
        try:
            body = unseal(sealed, self.keypair.private_key, self.provider)
        except WrongRecipient:
            self._drop("not-for-rsu")
            return None
        except Malformed:
            self._drop("malformed")
            return None
        vc = body.accuser_vc
        if vc.cert_type is not CertType.VC:
            self._drop("accuser-not-valid")
            return None
        if certs.validate(vc, self.trust.ca_public_key, now, self.provider) is not Validation.VALID:
            self._drop("bad-accuser-cert")
            return None
        key = self.trust.directory.lookup(vc.key_fingerprint)
        if key is None or not body.verify_with(key, self.provider):
            self._drop("bad-signature")
            return None
        if not _fresh(body.timestamp, now, self.config.freshness_window):
            self._drop("stale")
            return None
        if vc.vehicle_id == body.accused_id:
            self._drop("self-accusation")
            return None
        if body.accused_id in self.forwarded:
            return None
        accusers = self.accusation_box.setdefault(body.accused_id, {})
        accusers[vc.vehicle_id] = body.reason_code
        present = self.present_count(now)
        if present == 0 or len(accusers) <= present // 2:
            return None
        reason = min(Counter(accusers.values()).most_common(), key=lambda kv: (-kv[1], kv[0]))[0]
        self.forwarded.add(body.accused_id)
        forward = ForwardedAccusation(reason, bytes(40), now, body.accused_id)
        forward = forward.sign_with(self.keypair.private_key, self.provider)
        return seal(forward, self.trust.ca_public_key, self.provider)

    def execute(self, sealed: Sealed, now: int) -> RsuOrders | None:
        """Turn a CA erase order into erase + insert for the adversary and a road-wide add."""
        if sealed.kind is not SealedKind.ERASE_FROM_CA:
            return None
        try:
            order = unseal(sealed, self.keypair.private_key, self.provider)
        except (Malformed, WrongRecipient):
            return None
        if not order.verify_with(self.trust.ca_public_key, self.provider):
            return None
        if not _fresh(order.timestamp, now, self.config.freshness_window):
            return None
        ac = order.adversary_cert
        target_key = self.trust.directory.lookup(ac.key_fingerprint)
        if target_key is None or ac.vehicle_id != order.accused_id:
            return None
        sk = self.keypair.private_key
        erase = VehicleEraseOrder(order.reason_code, bytes(40), now, order.accused_id).sign_with(sk, self.provider)
        insert = InsertOrder(ac, now, bytes(40)).sign_with(sk, self.provider)
        add = AddBroadcast(order.accused_id, now, bytes(40), order.reason_code, ac.review_date).sign_with(sk, self.provider)
        entry = CrlAdd(order.accused_id, order.timestamp, order.reason_code)
        if all(e.accused_id != entry.accused_id for e in self.crl):
            self.crl.append(entry)
        return RsuOrders(
            order.accused_id,
            seal(erase, target_key, self.provider),
            seal(insert, target_key, self.provider),
            seal(add, self.trust.group.public_key, self.provider),
            entry,
        )

    def serve_crl(self, request: CrlRequest) -> CrlResponse:
        return CrlResponse(tuple(self.crl))


# --- certification authority ------------------------------------------------

class CertificateAuthority:
    """Issues credentials, turns forwarded accusations into adversary certificates, keeps the CRL."""

    def __init__(
        self,
        ca_id: int,
        keypair: KeyPair,
        directory: KeyDirectory,
        *,
        rsu_keys: Mapping[int, bytes] | None = None,
        provider: CryptoProvider | None = None,
    ):
        self.id = ca_id
        self.keypair = keypair
        self.directory = directory
        self.rsu_keys: dict[int, bytes] = dict(rsu_keys or {})
        self.provider = provider or default_provider()
        self.crl: list[CrlAdd] = []
        self.issued_certs: dict[int, list[Certificate]] = {}
        self.vehicle_keys: dict[int, bytes] = {}

    def register_rsu(self, rsu_id: int, public_key: bytes) -> None:
        self.rsu_keys[rsu_id] = public_key
        self.directory.register(public_key)

    def issue(self, cert_type, vehicle_id: int, now: int, reason: int | None = None) -> Certificate:
        cert = certs.issue(
            cert_type, vehicle_id, self.keypair, now, reason,
            issuer_id=self.id, subject_key=self.vehicle_keys.get(vehicle_id), provider=self.provider,
        )
        self.issued_certs.setdefault(vehicle_id, []).append(cert)
        return cert

    def enroll(self, vehicle_id: int, public_key: bytes, now: int, horizon: int) -> tuple[Certificate, list[Certificate]]:
        """Register a vehicle key and issue its VC plus pseudonyms covering ``[now, horizon]``."""
        self.vehicle_keys[vehicle_id] = public_key
        self.directory.register(public_key)
        vc = self.issue(CertType.VC, vehicle_id, now)
        identities = []
        t = now
        while True:
            identities.append(self.issue(CertType.IDENTITY, vehicle_id, t))
            if t + certs.IDENTITY_LIFETIME > horizon:
                break
            t += certs.IDENTITY_LIFETIME
        return vc, identities

    def is_revoked(self, vehicle_id: int) -> bool:
        return any(e.accused_id == vehicle_id for e in self.crl)

    def process_accusation(self, sealed: Sealed, now: int) -> Sealed | None:
        """Revoke on a verified RSU accusation: issue an AC, extend the CRL, order the erase."""
        if sealed.kind is not SealedKind.FORWARDED_ACCUSATION:
            return None
        try:
            body = unseal(sealed, self.keypair.private_key, self.provider)
        except (Malformed, WrongRecipient):
            return None
        rsu_key = next((k for k in self.rsu_keys.values() if body.verify_with(k, self.provider)), None)
        if rsu_key is None or self.is_revoked(body.accused_id):
            return None
        ac = self.issue(CertType.AC, body.accused_id, now, body.reason_code)
        self.crl.append(CrlAdd(body.accused_id, now, body.reason_code))
        order = CaEraseOrder(body.reason_code, bytes(40), now, body.accused_id, ac)
        order = order.sign_with(self.keypair.private_key, self.provider)
        return seal(order, rsu_key, self.provider)

    def serve_crl(self, request: CrlRequest) -> CrlResponse:
        return CrlResponse(tuple(self.crl))


def serve_crl(authority: CertificateAuthority | RoadsideUnit, request: CrlRequest) -> CrlResponse:
    return authority.serve_crl(request)
