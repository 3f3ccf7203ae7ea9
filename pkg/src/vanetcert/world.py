"""Provisioning of one road: CA, RSU, road group key and enrolled vehicles."""

from __future__ import annotations

from .crypto import CryptoProvider, default_provider
from .protocol import (
    CertificateAuthority,
    KeyDirectory,
    ProtocolConfig,
    RoadsideUnit,
    TrustAnchors,
    Vehicle,
)

CA_ID = 900_001
RSU_ID = 900_002

# vehicle keys use their id as seed; infrastructure keys sit far above that range
_KEY_BASE = 1 << 62
CA_KEY_SEED = _KEY_BASE + 1
RSU_KEY_SEED = _KEY_BASE + 2
GROUP_KEY_SEED = _KEY_BASE + 3


class World:
    def __init__(
        self,
        *,
        config: ProtocolConfig = ProtocolConfig(),
        horizon: int = 3600,
        use_adversary_list: bool = True,
        provider: CryptoProvider | None = None,
    ):
        p = self.provider = provider or default_provider()
        self.config = config
        self.horizon = horizon
        self.use_adversary_list = use_adversary_list
        ca_keys = p.generate_keypair(CA_KEY_SEED)
        rsu_keys = p.generate_keypair(RSU_KEY_SEED)
        self.directory = KeyDirectory(provider=p)
        self.trust = TrustAnchors(ca_keys.public_key, p.generate_keypair(GROUP_KEY_SEED), self.directory,
                                  {RSU_ID: rsu_keys.public_key})
        self.ca = CertificateAuthority(CA_ID, ca_keys, self.directory, provider=p)
        self.ca.register_rsu(RSU_ID, rsu_keys.public_key)
        self.rsu = RoadsideUnit(RSU_ID, rsu_keys, self.trust, config=config, provider=p)
        self.vehicles: dict[int, Vehicle] = {}

    def add_vehicle(self, vehicle_id: int, *, compliant: bool = True, enrolled_at: int = 0) -> Vehicle:
        keys = self.provider.generate_keypair(vehicle_id)
        vc, identities = self.ca.enroll(vehicle_id, keys.public_key, enrolled_at, self.horizon)
        vehicle = Vehicle(
            vehicle_id, keys, self.trust, vc=vc, identities=identities, compliant=compliant,
            config=self.config, provider=self.provider, use_adversary_list=self.use_adversary_list,
        )
        self.vehicles[vehicle_id] = vehicle
        return vehicle
