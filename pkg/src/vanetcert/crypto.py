"""Pluggable crypto provider.

Protocol code only talks to :class:`CryptoProvider`. The default backend,
:class:`DeterministicProvider`, is built from keyed BLAKE2b and a SHAKE-256
keystream. It is reproducible across runs and platforms, which is what the
simulator needs, and it offers no real security: anyone holding a public key
can forge signatures and read ciphertexts addressed to it.
"""

from __future__ import annotations

import abc
import hashlib
import hmac
import struct
from dataclasses import dataclass

from .errors import InvalidInput, Malformed, WrongRecipient

KEY_SIZE = 32
FINGERPRINT_SIZE = 16
SIGNATURE_SIZE = 40
TAG_SIZE = 16
MAX_PLAINTEXT = 64 * 1024


def fingerprint(public_key: bytes) -> bytes:
    """16-byte digest identifying a public key."""
    return hashlib.blake2b(public_key, digest_size=FINGERPRINT_SIZE, person=b"vanet-fp").digest()


@dataclass(frozen=True)
class KeyPair:
    public_key: bytes
    private_key: bytes = b""

    @property
    def fingerprint(self) -> bytes:
        return fingerprint(self.public_key)

    def __repr__(self) -> str:
        return f"KeyPair(fingerprint={self.fingerprint.hex()})"


@dataclass(frozen=True)
class Signature:
    bytes: bytes

    def __post_init__(self):
        if len(self.bytes) != SIGNATURE_SIZE:
            raise InvalidInput(f"signature must be {SIGNATURE_SIZE} bytes, got {len(self.bytes)}")


@dataclass(frozen=True)
class Ciphertext:
    """Encrypted blob addressed to one key.

    Serialized as ``fingerprint(16) | u32 length | payload``.
    """

    recipient_fingerprint: bytes
    payload: bytes

    def to_bytes(self) -> bytes:
        return self.recipient_fingerprint + struct.pack(">I", len(self.payload)) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "Ciphertext":
        ct, end = cls.read(data, 0)
        if end != len(data):
            raise Malformed("trailing bytes after ciphertext", offset=end)
        return ct

    @classmethod
    def read(cls, data: bytes, offset: int) -> tuple["Ciphertext", int]:
        """Parse one ciphertext starting at ``offset``; return it and the end offset."""
        head = offset + FINGERPRINT_SIZE + 4
        if len(data) < head:
            raise Malformed("truncated ciphertext header", offset=len(data))
        fp = bytes(data[offset:offset + FINGERPRINT_SIZE])
        (length,) = struct.unpack_from(">I", data, offset + FINGERPRINT_SIZE)
        if len(data) < head + length:
            raise Malformed(f"ciphertext payload truncated: need {length} bytes", offset=len(data))
        return cls(fp, bytes(data[head:head + length])), head + length

    @property
    def wire_size(self) -> int:
        return FINGERPRINT_SIZE + 4 + len(self.payload)


class CryptoProvider(abc.ABC):
    """Key generation, signatures and public-key encryption."""

    @abc.abstractmethod
    def generate_keypair(self, seed: int) -> KeyPair: ...

    @abc.abstractmethod
    def sign(self, private_key: bytes, message: bytes) -> Signature: ...

    @abc.abstractmethod
    def verify(self, public_key: bytes, message: bytes, signature: Signature | bytes) -> bool: ...

    @abc.abstractmethod
    def encrypt_for(self, public_key: bytes, plaintext: bytes) -> Ciphertext: ...

    @abc.abstractmethod
    def decrypt(self, private_key: bytes, ciphertext: Ciphertext) -> bytes: ...

    def fingerprint(self, public_key: bytes) -> bytes:
        return fingerprint(public_key)


def _xor(data: bytes, stream: bytes) -> bytes:
    if not data:
        return b""
    n = len(data)
    return (int.from_bytes(data, "big") ^ int.from_bytes(stream, "big")).to_bytes(n, "big")


class DeterministicProvider(CryptoProvider):
    """Reproducible test backend (keyed keystream + keyed digest)."""

    def _public_from_private(self, private_key: bytes) -> bytes:
        if len(private_key) != KEY_SIZE:
            raise InvalidInput(f"private key must be {KEY_SIZE} bytes")
        return hashlib.blake2b(private_key, digest_size=KEY_SIZE, person=b"vanet-pub").digest()

    def generate_keypair(self, seed: int) -> KeyPair:
        if not 0 <= seed < 2**64:
            raise InvalidInput("seed must be an unsigned 64-bit integer")
        private = hashlib.blake2b(seed.to_bytes(8, "big"), digest_size=KEY_SIZE, person=b"vanet-sk").digest()
        return KeyPair(self._public_from_private(private), private)

    def _mac(self, public_key: bytes, message: bytes) -> bytes:
        return hashlib.blake2b(message, key=public_key, digest_size=SIGNATURE_SIZE, person=b"vanet-sig").digest()

    def sign(self, private_key: bytes, message: bytes) -> Signature:
        if not message:
            raise InvalidInput("cannot sign an empty message")
        return Signature(self._mac(self._public_from_private(private_key), message))

    def verify(self, public_key: bytes, message: bytes, signature: Signature | bytes) -> bool:
        raw = signature.bytes if isinstance(signature, Signature) else bytes(signature)
        if not message or len(raw) != SIGNATURE_SIZE or len(public_key) != KEY_SIZE:
            return False
        return hmac.compare_digest(self._mac(public_key, message), raw)

    def _keystream(self, public_key: bytes, n: int) -> bytes:
        return hashlib.shake_256(b"vanet-ks" + public_key).digest(n)

    def _tag(self, public_key: bytes, body: bytes) -> bytes:
        return hashlib.blake2b(body, key=public_key, digest_size=TAG_SIZE, person=b"vanet-tag").digest()

    def encrypt_for(self, public_key: bytes, plaintext: bytes) -> Ciphertext:
        if len(plaintext) > MAX_PLAINTEXT:
            raise InvalidInput(f"plaintext exceeds {MAX_PLAINTEXT} bytes")
        body = _xor(plaintext, self._keystream(public_key, len(plaintext)))
        return Ciphertext(fingerprint(public_key), body + self._tag(public_key, body))

    def decrypt(self, private_key: bytes, ciphertext: Ciphertext) -> bytes:
        public = self._public_from_private(private_key)
        if fingerprint(public) != ciphertext.recipient_fingerprint:
            raise WrongRecipient("ciphertext is addressed to another key")
        payload = ciphertext.payload
        if len(payload) < TAG_SIZE:
            raise Malformed("ciphertext shorter than its tag", offset=len(payload))
        body, tag = payload[:-TAG_SIZE], payload[-TAG_SIZE:]
        if not hmac.compare_digest(self._tag(public, body), tag):
            raise Malformed("ciphertext failed integrity check")
        return _xor(body, self._keystream(public, len(body)))


_default = DeterministicProvider()


def default_provider() -> CryptoProvider:
    return _default


def generate_keypair(seed: int) -> KeyPair:
    return _default.generate_keypair(seed)


def sign(private_key: bytes, message: bytes) -> Signature:
    return _default.sign(private_key, message)


def verify(public_key: bytes, message: bytes, signature: Signature | bytes) -> bool:
    return _default.verify(public_key, message, signature)


def encrypt_for(public_key: bytes, plaintext: bytes) -> Ciphertext:
    return _default.encrypt_for(public_key, plaintext)


def decrypt(private_key: bytes, ciphertext: Ciphertext) -> bytes:
    return _default.decrypt(private_key, ciphertext)
