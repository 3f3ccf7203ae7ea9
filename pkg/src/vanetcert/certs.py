"""Status certificates (valid / adversary) and short-lived identity certificates.

Every certificate encodes to exactly 100 bytes, big-endian::

    type(1) | vehicle_id(8) | issuer_id(8) | issued_at(8) | expires_at(8) |
    reason(1) | review_date(8) | key_fingerprint(16) | reserved(2) | signature(40)

The issuer signs the first 60 bytes. Times are integer seconds since the
simulation epoch.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, replace

from .crypto import FINGERPRINT_SIZE, SIGNATURE_SIZE, CryptoProvider, KeyPair, default_provider, fingerprint
from .errors import InvalidInput, Malformed, UnknownReason

CERT_SIZE = 100
SIGNED_SIZE = 60
ONE_YEAR = 31_536_000
IDENTITY_LIFETIME = 600

_LAYOUT = struct.Struct(">BQQQQBQ16s2s40s")
assert _LAYOUT.size == CERT_SIZE

REASONS = {
    1: "Bogus traffic information",
    2: "Disruption of network operation",
    3: "Cheating with identity, position or speed",
    4: "Uncovering the identities of other vehicles",
}


@dataclass(frozen=True)
class ReasonCode:
    code: int
    description: str

    @classmethod
    def of(cls, code: int) -> "ReasonCode":
        return cls(code, reason_lookup(code))


def reason_lookup(code: int) -> str:
    """Description of a revocation reason code (1-4)."""
    try:
        return REASONS[code]
    except (KeyError, TypeError):
        raise UnknownReason(f"unknown revocation reason code: {code!r}") from None


class CertType(enum.IntEnum):
    VC = 1
    AC = 2
    IDENTITY = 3

    @classmethod
    def parse(cls, value: "CertType | str | int") -> "CertType":
        if isinstance(value, CertType):
            return value
        if isinstance(value, str):
            try:
                return cls[value.upper()]
            except KeyError:
                raise InvalidInput(f"unknown certificate type {value!r}") from None
        try:
            return cls(value)
        except ValueError:
            raise InvalidInput(f"unknown certificate type {value!r}") from None

    @property
    def label(self) -> str:
        return "Identity" if self is CertType.IDENTITY else self.name


@dataclass(frozen=True)
class Certificate:
    cert_type: CertType
    vehicle_id: int
    issuer_id: int
    issued_at: int
    expires_at: int
    reason_code: int = 0
    review_date: int = 0
    key_fingerprint: bytes = bytes(FINGERPRINT_SIZE)
    signature: bytes = bytes(SIGNATURE_SIZE)

    def to_bytes(self) -> bytes:
        cached = self.__dict__.get("_encoded")
        if cached is not None:
            return cached
        try:
            encoded = _LAYOUT.pack(
                int(self.cert_type), self.vehicle_id, self.issuer_id, self.issued_at, self.expires_at,
                self.reason_code, self.review_date, self.key_fingerprint, b"\x00\x00", self.signature,
            )
        except struct.error as exc:
            raise InvalidInput(f"certificate field out of range: {exc}") from None
        self.__dict__["_encoded"] = encoded
        return encoded

    def signed_bytes(self) -> bytes:
        return self.to_bytes()[:SIGNED_SIZE]

    @classmethod
    def from_bytes(cls, data: bytes) -> "Certificate":
        if len(data) != CERT_SIZE:
            raise Malformed(f"certificate must be {CERT_SIZE} bytes, got {len(data)}", offset=min(len(data), CERT_SIZE))
        kind, vid, iid, issued, expires, reason, review, fp, reserved, sig = _LAYOUT.unpack(data)
        try:
            cert_type = CertType(kind)
        except ValueError:
            raise Malformed(f"unknown certificate type byte 0x{kind:02x}", offset=0) from None
        if reserved != b"\x00\x00":
            raise Malformed("reserved bytes must be zero", offset=58)
        return cls(cert_type, vid, iid, issued, expires, reason, review, fp, sig)

    @property
    def is_adversary(self) -> bool:
        return self.cert_type is CertType.AC


def encode(cert: Certificate) -> bytes:
    return cert.to_bytes()


def decode(data: bytes) -> Certificate:
    return Certificate.from_bytes(data)


def issue(
    cert_type: CertType | str,
    vehicle_id: int,
    issuer: KeyPair,
    now: int,
    reason: ReasonCode | int | None = None,
    *,
    issuer_id: int = 0,
    subject_key: bytes | None = None,
    provider: CryptoProvider | None = None,
) -> Certificate:
    """Issue and sign a certificate.

    ``reason`` must be given for adversary certificates and only for them.
    ``subject_key`` is the holder's public key; its fingerprint is embedded.
    """
    provider = provider or default_provider()
    cert_type = CertType.parse(cert_type)
    if isinstance(reason, ReasonCode):
        reason = reason.code
    if cert_type is CertType.AC:
        if reason is None:
            raise InvalidInput("adversary certificate requires a reason code")
        reason_lookup(reason)
        reason_code, review_date, expires_at = reason, now + ONE_YEAR, now + ONE_YEAR
    else:
        if reason is not None:
            raise InvalidInput(f"{cert_type.label} certificate cannot carry a reason code")
        reason_code, review_date = 0, 0
        expires_at = now + (IDENTITY_LIFETIME if cert_type is CertType.IDENTITY else ONE_YEAR)
    fp = fingerprint(subject_key) if subject_key is not None else bytes(FINGERPRINT_SIZE)
    unsigned = Certificate(cert_type, vehicle_id, issuer_id, now, expires_at, reason_code, review_date, fp)
    sig = provider.sign(issuer.private_key, unsigned.signed_bytes())
    return replace(unsigned, signature=sig.bytes)


class Validation(enum.Enum):
    VALID = "Valid"
    INVARIANT_VIOLATION = "InvariantViolation"
    BAD_SIGNATURE = "BadSignature"
    EXPIRED = "Expired"


def check_invariants(cert: Certificate) -> bool:
    if cert.cert_type is CertType.VC:
        return cert.reason_code == 0 and cert.review_date == 0
    if cert.cert_type is CertType.AC:
        return cert.reason_code in REASONS and cert.review_date == cert.issued_at + ONE_YEAR
    return (
        cert.reason_code == 0
        and cert.review_date == 0
        and cert.expires_at == cert.issued_at + IDENTITY_LIFETIME
    )


def validate(
    cert: Certificate,
    issuer_public_key: bytes,
    now: int,
    provider: CryptoProvider | None = None,
) -> Validation:
    """Check structure, then signature, then (identity only) expiry."""
    provider = provider or default_provider()
    if not check_invariants(cert):
        return Validation.INVARIANT_VIOLATION
    if not provider.verify(issuer_public_key, cert.signed_bytes(), cert.signature):
        return Validation.BAD_SIGNATURE
    if cert.cert_type is CertType.IDENTITY and now >= cert.expires_at:
        return Validation.EXPIRED
    return Validation.VALID


def dump(cert: Certificate) -> str:
    """Two-line human-readable rendering: a field line and the raw hex."""
    reason = str(cert.reason_code)
    if cert.reason_code in REASONS:
        reason += f' ("{REASONS[cert.reason_code]}")'
    fields = (
        f"type={cert.cert_type.label} vehicle={cert.vehicle_id} issuer={cert.issuer_id} "
        f"issued={cert.issued_at} expires={cert.expires_at} reason={reason} "
        f"review={cert.review_date} fingerprint={cert.key_fingerprint.hex()}"
    )
    return fields + "\n" + cert.to_bytes().hex()
