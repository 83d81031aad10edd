"""Follow the zeros around loops in the parameter disk and read off permutations.

Run with ``python demos/monodromy.py``; takes about ten seconds.
"""
from partheta.continuation import build_loop, circle_loop, compose, labelled_zeros, monodromy

labels = labelled_zeros(0.1, [1, 2, 3, 4, 5])
print("zeros at q = 0.1:")
for k, z in labels:
    print(f"  xi_{k} = {z.real:.6g}")

loops = {
    "gamma(1)": build_loop("gamma(1)"),
    "gamma(2)": build_loop("gamma(2)"),
    "gamma(1) eta_plus delta(1) eta_minus": compose(
        [build_loop("gamma(1)"), build_loop("eta_plus"), build_loop("delta(1)"),
         build_loop("eta_minus")]),
    "circle |q| = 0.1": circle_loop(0j, 0.1),
}
for name, loop in loops.items():
    m = monodromy(loop, labels)
    cycles = " ".join("(" + " ".join(f"xi_{k}" for k in c) + ")" for c in m.cycles()) or "identity"
    print(f"{name:40s} -> {cycles}")
