"""Protocol messages and their binary wire format.

Every wire message is ``version(1) | tag(1) | body``. Bodies are big-endian
fixed-width fields; the only variable-size items are ciphertexts
(``fingerprint | u32 length | payload``) and CRL entry lists
(``u32 count | 17-byte entries``).

Encrypted protocol steps travel as :class:`Sealed`: a one-byte kind plus a
ciphertext whose plaintext is the kind byte followed by the body fields.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, fields, replace
from typing import Any, ClassVar, Union

from .certs import CERT_SIZE, Certificate
from .crypto import SIGNATURE_SIZE, Ciphertext, CryptoProvider, default_provider
from .errors import InvalidInput, Malformed, UnknownCategory

WIRE_VERSION = 0x01
CRL_ENTRY_SIZE = 17


class Priority(enum.Enum):
    SAFETY_OF_LIFE = "Safety of Life"
    SAFETY = "Safety"
    NON_SAFETY = "Non-Safety"


@dataclass(frozen=True)
class MessageCategory:
    code: int
    priority: Priority
    application: str

    @property
    def label(self) -> str:
        return f"{self.code:03d}"


CATEGORIES = {
    c.code: c
    for c in (
        MessageCategory(1, Priority.SAFETY_OF_LIFE, "Intersection Collision Warning /Avoidance"),
        MessageCategory(2, Priority.SAFETY_OF_LIFE, "Cooperative Collision Warning"),
        MessageCategory(3, Priority.SAFETY, "Work Zone Warning"),
        MessageCategory(4, Priority.SAFETY, "Transit Vehicle Signal Priority"),
        MessageCategory(5, Priority.NON_SAFETY, "Toll Collection"),
        MessageCategory(6, Priority.NON_SAFETY, "Service Announcement"),
        MessageCategory(7, Priority.NON_SAFETY, "Movie Download(2 hours of MPEG 1)"),
    )
}


def category_lookup(code: int | str) -> MessageCategory:
    """Accepts ``1`` or ``"001"``."""
    try:
        return CATEGORIES[int(code)]
    except (KeyError, ValueError, TypeError):
        raise UnknownCategory(f"unknown message category {code!r}") from None


# --- field codecs -----------------------------------------------------------

class _Reader:
    def __init__(self, data: bytes, offset: int = 0):
        self.data = data
        self.pos = offset

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise Malformed(f"truncated: need {n} bytes at offset {self.pos}", offset=len(self.data))
        chunk = bytes(self.data[self.pos:self.pos + n])
        self.pos += n
        return chunk

    def unpack(self, fmt: str) -> Any:
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size))[0]

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise Malformed(f"{len(self.data) - self.pos} trailing bytes", offset=self.pos)


def _pack_value(kind: str, value: Any) -> bytes:
    try:
        if kind == "u8":
            return struct.pack(">B", value)
        if kind == "u64":
            return struct.pack(">Q", value)
        if kind == "i64":
            return struct.pack(">q", value)
    except struct.error as exc:
        raise InvalidInput(f"field out of range: {exc}") from None
    if kind == "cat":
        return struct.pack(">B", value.code)
    if kind == "cert":
        return value.to_bytes()
    if kind == "sig":
        if len(value) != SIGNATURE_SIZE:
            raise InvalidInput("signature must be 40 bytes")
        return bytes(value)
    if kind == "ct":
        return value.to_bytes()
    raise AssertionError(kind)


def _read_value(kind: str, r: _Reader) -> Any:
    if kind == "u8":
        return r.unpack(">B")
    if kind == "u64":
        return r.unpack(">Q")
    if kind == "i64":
        return r.unpack(">q")
    if kind == "cat":
        start = r.pos
        code = r.unpack(">B")
        try:
            return category_lookup(code)
        except UnknownCategory:
            raise Malformed(f"unknown category code {code}", offset=start) from None
    if kind == "cert":
        start = r.pos
        try:
            return Certificate.from_bytes(r.take(CERT_SIZE))
        except Malformed as exc:
            raise Malformed(f"bad certificate: {exc}", offset=start + (exc.offset or 0)) from None
    if kind == "sig":
        return r.take(SIGNATURE_SIZE)
    if kind == "ct":
        ct, r.pos = Ciphertext.read(r.data, r.pos)
        return ct
    raise AssertionError(kind)


class _Record:
    """Mixin for dataclasses described by a ``FIELDS`` table.

    ``FIELDS`` rows are ``(attribute, codec, protocol symbol or None)``.
    """

    FIELDS: ClassVar[tuple[tuple[str, str, str | None], ...]] = ()

    def _pack(self, *, unsigned: bool = False) -> bytes:
        return b"".join(
            _pack_value(kind, getattr(self, name))
            for name, kind, _ in self.FIELDS
            if not (unsigned and kind == "sig")
        )

    def body_bytes(self) -> bytes:
        return self._pack()

    def signed_bytes(self) -> bytes:
        """Bytes covered by the signature: class name plus every non-signature field."""
        # records are frozen, so the encoding can be memoized on the instance
        cached = self.__dict__.get("_signed")
        if cached is None:
            cached = type(self).__name__.encode() + b"\x00" + self._pack(unsigned=True)
            self.__dict__["_signed"] = cached
        return cached

    @classmethod
    def read_body(cls, r: _Reader):
        return cls(**{name: _read_value(kind, r) for name, kind, _ in cls.FIELDS})

    @classmethod
    def symbols(cls) -> tuple[str, ...]:
        return tuple(sym for _, _, sym in cls.FIELDS if sym)

    def sign_with(self, private_key: bytes, provider: CryptoProvider | None = None):
        provider = provider or default_provider()
        return replace(self, signature=provider.sign(private_key, self.signed_bytes()).bytes)

    def verify_with(self, public_key: bytes, provider: CryptoProvider | None = None) -> bool:
        provider = provider or default_provider()
        return provider.verify(public_key, self.signed_bytes(), self.signature)


_NO_SIG = bytes(SIGNATURE_SIZE)


@dataclass(frozen=True)
class DataMessage(_Record):
    """Application message with its identity certificate and encrypted status certificate."""

    sender_id: int
    category: MessageCategory
    claim: int
    timestamp: int
    identity_cert: Certificate
    status_cert: Ciphertext
    signature: bytes = _NO_SIG

    FIELDS = (
        ("sender_id", "u64", None),
        ("category", "cat", None),
        ("claim", "i64", None),
        ("timestamp", "u64", "TS"),
        ("identity_cert", "cert", None),
        ("status_cert", "ct", None),
        ("signature", "sig", "Sig"),
    )


@dataclass(frozen=True)
class WarningMessage(_Record):
    warning_issuer_id: int
    adversary_id: int
    timestamp: int
    reason_code: int
    review_date: int
    issuer_vc: Certificate
    signature: bytes = _NO_SIG

    FIELDS = (
        ("warning_issuer_id", "u64", None),
        ("adversary_id", "u64", "AV"),
        ("timestamp", "u64", "TS"),
        ("reason_code", "u8", "RR"),
        ("review_date", "u64", "RD"),
        ("issuer_vc", "cert", "VC"),
        ("signature", "sig", "Sig"),
    )


@dataclass(frozen=True)
class Accusation(_Record):
    """Vehicle to RSU accusation, sealed to the RSU key."""

    reason_code: int
    accuser_vc: Certificate
    signature: bytes
    timestamp: int
    accused_id: int

    FIELDS = (
        ("reason_code", "u8", "RR"),
        ("accuser_vc", "cert", "VC"),
        ("signature", "sig", "Sig"),
        ("timestamp", "u64", "TS"),
        ("accused_id", "u64", "AV"),
    )


@dataclass(frozen=True)
class ForwardedAccusation(_Record):
    """RSU to CA accusation, sealed to the CA key; signed by the RSU."""

    reason_code: int
    signature: bytes
    timestamp: int
    accused_id: int

    FIELDS = (
        ("reason_code", "u8", "RR"),
        ("signature", "sig", "Sig"),
        ("timestamp", "u64", "TS"),
        ("accused_id", "u64", "AV"),
    )


@dataclass(frozen=True)
class CaEraseOrder(_Record):
    """CA to RSU: erase the accused vehicle's credentials and install this AC."""

    reason_code: int
    signature: bytes
    timestamp: int
    accused_id: int
    adversary_cert: Certificate

    FIELDS = (
        ("reason_code", "u8", "RR"),
        ("signature", "sig", "Sig"),
        ("timestamp", "u64", "TS"),
        ("accused_id", "u64", "AV"),
        ("adversary_cert", "cert", "AC"),
    )


@dataclass(frozen=True)
class VehicleEraseOrder(_Record):
    reason_code: int
    signature: bytes
    timestamp: int
    accused_id: int

    FIELDS = (
        ("reason_code", "u8", "RR"),
        ("signature", "sig", "Sig"),
        ("timestamp", "u64", "TS"),
        ("accused_id", "u64", "AV"),
    )


@dataclass(frozen=True)
class InsertOrder(_Record):
    adversary_cert: Certificate
    timestamp: int
    signature: bytes

    FIELDS = (
        ("adversary_cert", "cert", "AC"),
        ("timestamp", "u64", "TS"),
        ("signature", "sig", "Sig"),
    )


@dataclass(frozen=True)
class AddBroadcast(_Record):
    """RSU to every vehicle on the road: put ``accused_id`` at the top of your list."""

    accused_id: int
    timestamp: int
    signature: bytes
    reason_code: int
    review_date: int

    FIELDS = (
        ("accused_id", "u64", "AV"),
        ("timestamp", "u64", "TS"),
        ("signature", "sig", "Sig"),
        ("reason_code", "u8", "RR"),
        ("review_date", "u64", "RD"),
    )


@dataclass(frozen=True)
class CrlAdd(_Record):
    """One CRL record; 17 bytes on the wire."""

    accused_id: int
    timestamp: int
    reason_code: int

    FIELDS = (
        ("accused_id", "u64", "AV"),
        ("timestamp", "u64", "TS"),
        ("reason_code", "u8", "RR"),
    )


@dataclass(frozen=True)
class CrlRequest(_Record):
    requester_id: int

    FIELDS = (("requester_id", "u64", None),)


@dataclass(frozen=True)
class CrlResponse:
    entries: tuple[CrlAdd, ...] = ()

    def body_bytes(self) -> bytes:
        return struct.pack(">I", len(self.entries)) + b"".join(e.body_bytes() for e in self.entries)

    @classmethod
    def read_body(cls, r: _Reader) -> "CrlResponse":
        count = r.unpack(">I")
        if count * CRL_ENTRY_SIZE > len(r.data) - r.pos:
            raise Malformed(f"CRL claims {count} entries but payload is short", offset=r.pos)
        return cls(tuple(CrlAdd.read_body(r) for _ in range(count)))


class SealedKind(enum.IntEnum):
    ACCUSATION = 1
    FORWARDED_ACCUSATION = 2
    ERASE_FROM_CA = 3
    ERASE_TO_VEHICLE = 4
    INSERT_AC = 5
    ADD_BROADCAST = 6


SEALED_BODIES: dict[SealedKind, type[_Record]] = {
    SealedKind.ACCUSATION: Accusation,
    SealedKind.FORWARDED_ACCUSATION: ForwardedAccusation,
    SealedKind.ERASE_FROM_CA: CaEraseOrder,
    SealedKind.ERASE_TO_VEHICLE: VehicleEraseOrder,
    SealedKind.INSERT_AC: InsertOrder,
    SealedKind.ADD_BROADCAST: AddBroadcast,
}
_KIND_OF_BODY = {cls: kind for kind, cls in SEALED_BODIES.items()}

SealedBody = Union[Accusation, ForwardedAccusation, CaEraseOrder, VehicleEraseOrder, InsertOrder, AddBroadcast]


@dataclass(frozen=True)
class Sealed:
    """An encrypted accusation or control order."""

    kind: SealedKind
    ciphertext: Ciphertext

    def body_bytes(self) -> bytes:
        return struct.pack(">B", int(self.kind)) + self.ciphertext.to_bytes()

    @classmethod
    def read_body(cls, r: _Reader) -> "Sealed":
        start = r.pos
        raw = r.unpack(">B")
        try:
            kind = SealedKind(raw)
        except ValueError:
            raise Malformed(f"unknown sealed kind {raw}", offset=start) from None
        return cls(kind, _read_value("ct", r))


def seal(body: SealedBody, recipient_public_key: bytes, provider: CryptoProvider | None = None) -> Sealed:
    provider = provider or default_provider()
    kind = _KIND_OF_BODY[type(body)]
    plaintext = struct.pack(">B", int(kind)) + body.body_bytes()
    return Sealed(kind, provider.encrypt_for(recipient_public_key, plaintext))


def unseal(sealed: Sealed, private_key: bytes, provider: CryptoProvider | None = None) -> SealedBody:
    """Decrypt and decode a sealed body.

    Raises WrongRecipient for a foreign key and Malformed for anything that
    does not decode to the advertised kind.
    """
    provider = provider or default_provider()
    plaintext = provider.decrypt(private_key, sealed.ciphertext)
    r = _Reader(plaintext)
    inner = r.unpack(">B") if plaintext else None
    if inner != int(sealed.kind):
        raise Malformed("sealed body kind does not match envelope", offset=0)
    body = SEALED_BODIES[sealed.kind].read_body(r)
    r.finish()
    return body


WireMessage = Union[DataMessage, WarningMessage, Sealed, CrlAdd, CrlRequest, CrlResponse]

_TAGS: dict[type, int] = {
    DataMessage: 0x01,
    WarningMessage: 0x02,
    Sealed: 0x03,
    CrlAdd: 0x04,
    CrlRequest: 0x05,
    CrlResponse: 0x06,
}
_BY_TAG = {tag: cls for cls, tag in _TAGS.items()}


def encode_wire(message: WireMessage) -> bytes:
    try:
        tag = _TAGS[type(message)]
    except KeyError:
        raise InvalidInput(f"not a wire message: {type(message).__name__}") from None
    return bytes((WIRE_VERSION, tag)) + message.body_bytes()


def decode_wire(data: bytes) -> WireMessage:
    if len(data) < 2:
        raise Malformed("wire message shorter than its 2-byte header", offset=len(data))
    if data[0] != WIRE_VERSION:
        raise Malformed(f"unsupported wire version {data[0]}", offset=0)
    try:
        cls = _BY_TAG[data[1]]
    except KeyError:
        raise Malformed(f"unknown message tag 0x{data[1]:02x}", offset=1) from None
    r = _Reader(data, 2)
    message = cls.read_body(r)
    r.finish()
    return message


def wire_size(message: WireMessage) -> int:
    return 2 + len(message.body_bytes())


def to_json(value: Any) -> Any:
    """JSON-ready rendering of a message (or any nested field) for event logs."""
    if isinstance(value, (bytes, bytearray)):
        return bytes(value).hex()
    if isinstance(value, MessageCategory):
        return value.label
    if isinstance(value, enum.Enum):
        return value.name
    if isinstance(value, tuple):
        return [to_json(v) for v in value]
    if hasattr(value, "__dataclass_fields__"):
        out = {"kind": type(value).__name__} if type(value) in _TAGS or isinstance(value, _Record) else {}
        out.update({f.name: to_json(getattr(value, f.name)) for f in fields(value)})
        return out
    return value
