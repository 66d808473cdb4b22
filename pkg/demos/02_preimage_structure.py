"""Anatomy of the max transform's inverse images.

Every target path has finitely many sporadic preimages at one critical level
plus an infinite ray along its negation.  The brute-force search below
reproduces the closed-form description exactly.
"""

from pitman_lab import Path, apply_T, enumerate_paths, preimage, preimage_stats, stats

x = Path.parse("0,1,0,-1,0")
pre = preimage(x)
print(f"target path        : {x}")
print(f"global minimum K0  : {pre.K0}")
print(f"ray                : s = {pre.ray_path} for every level g >= {pre.ray_g_min}")
print("sporadic members   :")
for g, s in pre.sporadic:
    st = stats(s)
    print(f"   g = {g}, s = {s}   (U={st.U}, D={st.D}, H={st.H})")

print("\nevery member maps back:")
for g, s in pre.members(g_max=6):
    assert apply_T(g, s) == x
print("   checked all members with g <= 6")

print("\nbrute force over all (g <= 4, s in the horizon-4 space):")
found = [(g, s) for s in enumerate_paths(4) for g in range(5) if apply_T(g, s) == x]
assert set(found) == set(pre.members(4))
print(f"   {len(found)} pairs found, identical to the closed-form set")

print("\nmember statistics follow the closed form U = r - K0 + D(x):")
for r in range(pre.K0, x.end + 1):
    print(f"   r = {r:+d}: (U, D, H) = {preimage_stats(x, r)}")
