"""
Scaling of extension norm lower bounds
======================================

Dual ascent gives a lower bound for the L^p -> L^r extension norm at each q.
The log-log slope in q separates bounded pairs from unbounded ones.
"""

from ffrestrict.norms import scaling_scan

for p, r in [("2", "4"), ("2", "3"), ("2", "2")]:
    rep = scaling_scan(2, p, r, [3, 5, 7, 11, 13], restarts=4)
    values = ", ".join(f"{v:.3f}" for _, v in rep.points)
    print(f"d=2 (p, r) = ({p}, {r}): values [{values}], slope {rep.slope:.4f}")
