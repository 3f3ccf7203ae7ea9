# The adversary list: ten slots, newest first, touched entries move to the top.
from vanetcert.adversary_list import AdversaryList, AdversaryListEntry

YEAR = 31_536_000
al = AdversaryList()
for adv in range(101, 111):
    al.record(AdversaryListEntry(1, adv, adv, 1, adv + YEAR))
print("full:      ", al.ids())

# an eleventh adversary pushes out the oldest one
al.record(AdversaryListEntry(1, 111, 111, 2, 111 + YEAR))
print("after 111: ", al.ids())

# hearing from a listed adversary refreshes it without any decryption
al.touch(103, now=500)
print("touch 103: ", al.ids())

# vehicles that leave the road are dropped
al.purge_departed({105, 107})
print("purged:    ", al.ids())
print()
print(al.dump())
