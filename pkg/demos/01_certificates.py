# Certificates: issue, encode, decode, validate.
from vanetcert import certs, crypto

ca = crypto.generate_keypair(1)
car = crypto.generate_keypair(42)

vc = certs.issue("VC", 42, ca, now=0, subject_key=car.public_key)
ac = certs.issue("AC", 42, ca, now=0, reason=3)
pseudonym = certs.issue("Identity", 42, ca, now=0, subject_key=car.public_key)

for cert in (vc, ac, pseudonym):
    print(certs.dump(cert))
    print()

# every certificate is the same size on the wire
print("sizes:", {len(c.to_bytes()) for c in (vc, ac, pseudonym)})

# a pseudonym is only good for ten minutes
for t in (0, 599, 600):
    print(t, certs.validate(pseudonym, ca.public_key, t).name)

# flipping one bit of the body breaks the CA signature
raw = bytearray(vc.to_bytes())
raw[5] ^= 1
print("tampered:", certs.validate(certs.decode(bytes(raw)), ca.public_key, 0).name)

# AC reasons
for code in range(1, 5):
    print(code, certs.reason_lookup(code))
