"""
Monte Carlo convergence of S_n/sigma_n to the standard normal
=============================================================

Kolmogorov-Smirnov distance of the normalized row sum against Phi over a
dyadic grid, for three rows satisfying the dependence conditions and one
deliberately broken row in which a single repeated variable carries 90%
of the variance (the Lindeberg sum stays bounded away from zero, and so
does the KS distance).
"""

import mdepclt as m

grid = [2**k for k in range(8, 15, 2)]
reps = 4000

models = {
    "two-scale(0.25)": m.build_model("two-scale", alpha=0.25),
    "block-repeat gaussian m=n^(1/4)": m.build_model(
        "block-repeat", innovation="normal", m_schedule=m.Schedule("power", 0.25)
    ),
    "moving-average(1, .5)": m.build_model("moving-average", coeffs=(1.0, 0.5)),
    "spiked block (control)": m.build_model("block-repeat", m_schedule=1, spike_frac=0.9),
}

band = m.kolmogorov_band(reps)
print(f"reps = {reps}, exact-normal 99% KS band = {band:.4f}\n")
header = "n".ljust(8) + "".join(name.ljust(34) for name in models)
print(header)
for n in grid:
    cells = []
    for model in models.values():
        emp = m.simulate_normalized_sums(model, n, reps=reps, seed=7)
        cells.append(f"{m.ks_statistic(emp):.4f}".ljust(34))
    print(str(n).ljust(8) + "".join(cells))

print("\nthe three conforming rows sink toward the Monte Carlo noise floor;")
print("the spiked control stays pinned near the mixture's sup-distance ~0.16")
