#!/usr/bin/env python3
# The regime classifier: exact-arithmetic exponents and verdicts for a tour
# of (d, nu, gamma) queries, including the boundary cases that motivate the
# rational bookkeeping.

from bnls import RegimeQuery, classify, critical_exponent, working_exponents

print(f"{'d':>2} {'nu':>5} {'gamma':>6} {'mu':>3}  {'Gamma_c':>8}  verdict")
print("-" * 72)

tour = [
    RegimeQuery(d=1, nu=3, gamma=0),
    RegimeQuery(d=1, nu=3, gamma=1.5),
    RegimeQuery(d=1, nu=9, gamma=0),                       # mass-critical
    RegimeQuery(d=1, nu=9, gamma=0, small_critical=True),  # small data
    RegimeQuery(d=1, nu=13, gamma=0.3),
    RegimeQuery(d=1, nu=13, gamma=1 / 6),                  # gamma = Gamma_c
    RegimeQuery(d=1, nu=13, gamma=0.1),                    # inflation window
    RegimeQuery(d=4, nu=3, gamma=2, mu=1),
    RegimeQuery(d=4, nu=3, gamma=2, mu=-1),
    RegimeQuery(d=4, nu=3, gamma=2, mu=-1, small_l2=True),
    RegimeQuery(d=4, nu=3, gamma=-3),                      # deep supercritical
    RegimeQuery(d=4, nu=5, gamma=0),                       # L^2 decoherence
    RegimeQuery(d=1, nu=5, gamma=-0.4),                    # genuine gap
    RegimeQuery(d=1, nu=2.5, gamma=3.2),                   # smoothness fails
    RegimeQuery(d=1, nu=3, gamma=0.25, beta=1.25),         # persistence
]
for q in tour:
    v = classify(q)
    gc = critical_exponent(q.d, q.nu)
    print(f"{q.d:>2} {float(q.nu):>5.2f} {float(q.gamma):>6.2f} "
          f"{q.mu:>+3d}  {str(gc):>8}  {v.verdict}  [{v.statement}]")

print("\nworking exponents on the local window (d=1, nu=5, gamma=1/4):")
r = working_exponents(RegimeQuery(d=1, nu=5, gamma=0.25))
print(f"  p = {r.p}, q = {r.q}, m = {r.m}, n = {r.n}")
print(f"  theta = {r.theta} (positive iff gamma above critical)")
print(f"  scaling weight of (p, q): {r.gamma_pq_check} (zero by construction)")
print(f"  admissible: {r.admissible_ok}")
