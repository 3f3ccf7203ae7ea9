# One revocation round driven by hand: suspicion, accusation, threshold, CA, RSU orders.
from vanetcert.messages import category_lookup
from vanetcert.world import World

world = World(horizon=600)
for vid in range(1, 11):
    world.add_vehicle(vid)
liar = world.vehicles[9]
rsu_pk = world.rsu.keypair.public_key
now = 10

# two observation windows: everybody says 100 about the same intersection, vehicle 9 says 55
category = category_lookup("001")
for window in range(2):
    now += 10
    for vid, v in world.vehicles.items():
        world.rsu.observe_presence(vid, now)
        msg = v.compose(category, 55 if vid == 9 else 100, now)
        for other in world.vehicles.values():
            if other is not v:
                other.receive(msg, now)
    accusations = []
    for v in world.vehicles.values():
        verdict, sealed = v.close_window(now, rsu_pk)
        accusations += sealed
print("accusations:", len(accusations), "threshold:", world.rsu.threshold(now))

forward = None
for sealed in accusations:
    forward = world.rsu.collect(sealed, now) or forward
erase = world.ca.process_accusation(forward, now)
print("CA CRL:", world.ca.crl)

orders = world.rsu.execute(erase, now)
print("vehicle 9 erase applied:", liar.apply_order(orders.erase, now))
print("vehicle 9 insert applied:", liar.apply_order(orders.insert, now))
for vid, v in world.vehicles.items():
    if vid != 9:
        v.process_add_broadcast(orders.broadcast, now)
print("vehicle 1 list:", world.vehicles[1].al.ids())

# from now on vehicle 9 is skipped before anything is decrypted
msg = liar.compose(category, 55, now + 1)
before = world.vehicles[1].decrypt_count
print(world.vehicles[1].receive(msg, now + 1).label, "decrypts:", world.vehicles[1].decrypt_count - before)
