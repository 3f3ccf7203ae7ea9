# Same traffic, two revocation schemes: adversary lists vs. rebroadcasting a CRL every 10 s.
from vanetcert.sim import canonical_config, crl_broadcast_bytes, run_comparison

config = canonical_config()
comparison, al, crl = run_comparison(config, crl_size=100)
print(comparison.report())
print()
print("closed form for the CRL side:", crl_broadcast_bytes(100, config.crl_broadcast_period, config.duration))

# the gap grows with the CRL; the adversary-list side does not depend on it
for size in (0, 10, 100, 1000):
    c, _, _ = run_comparison(config, crl_size=size)
    print(f"crl_size={size:5d}  al={c.al_revocation_bytes:6d}  crl={c.crl_revocation_bytes:8d}")
