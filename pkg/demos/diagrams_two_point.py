# Diagrams for the 2-point function: enumerate, inspect, evaluate, export.
from pathlib import Path

from wightman import PhysicalParams, Thermal, chi_table
from wightman import diagrams as dg
from wightman.perturbation import correlator_perturbative
from wightman.verify import reference_diagrams

p = PhysicalParams(lam=0.05)
times = (1.3, 0.4)
chi = chi_table(Thermal(0.8), 10, p)

# a thermal state has only the 2-legged blob, which prunes the list a lot
for K in (0, 1, 2):
    print("K =", K, ":", len(dg.enumerate_diagrams(2, K)), "diagrams,",
          len(dg.enumerate_diagrams(2, K, chi=chi)), "with thermal blobs")

# labels, step functions and symmetry factor of the sunset
sunset = reference_diagrams()["sunset"][0]
info = dg.diagram_summary(sunset)
print("sunset S =", info["symmetry_factor"])
for labs, th in zip(info["labels"], info["step_weights"]):
    print("   ", labs, th)

# the tadpole with two blob legs: t1+ and t1- pieces cancel
tad = reference_diagrams()["tadpole with blob legs"][0]
val = dg.evaluate_diagram(tad, chi, times, p, detail=True)
for labs, v in val.by_assignment:
    print("   ", [str(l) for l in labs], v)

# summing every diagram reproduces the direct expansion
d = dg.correlator_diagrammatic(chi, times, p, 1)
e = correlator_perturbative(chi, times, p, 1)
print("diagrams", d, " direct", e, " diff", abs(d - e))

out = Path("sunset.dot")
out.write_text(dg.to_dot(sunset, "sunset") + "\n")
print("wrote", out)
