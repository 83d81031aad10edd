"""Walk through evaluation, zero counting and the first spectral numbers.

Run with ``python demos/zeros_and_spectrum.py``; takes a few seconds.
"""
from partheta import evaluate
from partheta.spectrum import complex_spectral_point, real_spectrum_negative, real_spectrum_positive
from partheta.zeros import check_strong_separation, count_in_disk, separation_radius, zeros_in_disk

q = 0.5
res = evaluate(q, -4.0)
print(f"theta({q}, -4) = {res.value.real:.15f}  (terms {res.terms_used}, tail < {res.tail_bound:.1e})")

# zeros inside the circle C_6 = {|z| = q**(-6.5)}
R = separation_radius(q, 6)
print(f"\n{count_in_disk(q, R)} zeros of theta({q}, .) with |z| < {R:.1f}:")
for rec in zeros_in_disk(q, R):
    print(f"  z = {rec.z.real:+.10f} {rec.z.imag:+.10f}i   annulus {rec.annulus_index}")

rep = check_strong_separation(q, 8, 14)
print(f"\none zero per annulus for k = 8..14: {rep.strong}")

print("\nfirst positive spectral numbers (a real pair meets at a negative minimum):")
for p in real_spectrum_positive(3):
    print(f"  k={p.index}  q = {p.q.real:.13f}  y = {p.y.real:.10f}")

print("\nfirst negative spectral numbers (odd k: negative minimum, even k: positive maximum):")
for p in real_spectrum_negative(4):
    print(f"  k={p.index}  q = {p.q.real:.13f}  y = {p.y.real:+.10f}")

c = complex_spectral_point()
print(f"\na non-real spectral number: q = {c.q:.10f}, y = {c.y:.10f}")
