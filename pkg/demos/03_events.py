"""Typicality events and the gradient bound on a handful of samples.

Run:  python3 demos/03_events.py
"""
from percheeger import TorusSpec, sample_configuration
from percheeger.events import analyze_flips, events_from_analysis, gradient_claim_from_analysis
from percheeger.io import default_constants

k = default_constants()
print("constants:", k)
for seed in range(8):
    omega = sample_configuration(TorusSpec(2, 7), 0.7, seed)
    a = analyze_flips(omega)
    rep = events_from_analysis(a, k)
    claim = gradient_claim_from_analysis(a, k)
    flags = "".join("1" if getattr(rep, h) else "0" for h in ("h1", "h2", "h3", "h4", "h5", "g"))
    sup = "-" if claim.sup_grad is None else f"{float(claim.sup_grad) * 49:.2f}"
    print(f"seed {seed}: H1..H5,G={flags}  in H_n={rep.h_all!s:5}  n^d*sup|grad|={sup:>5}  "
          f"max symdiff={rep.details['max_symdiff']}  holds={claim.holds}")
# H3 is the event that fails most: one flip can attach or detach a cluster
# of 3+ vertices, which already exceeds sqrt(7)
