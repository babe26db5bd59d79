"""Write a chain bundle: a triangle around 0 in z1 times [a, b] in z2.

Usage: python3 demos/make_prism_bundle.py out.json [a] [b]
The result feeds `logperiods verify-cauchy --chains` and `logperiods thom-compare`.
"""

import json
import sys
from fractions import Fraction

from logperiods.chain_core import dump_bundle
from logperiods.random_instances import triangulated_disk_box

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "prism.json"
    a = Fraction(sys.argv[2]) if len(sys.argv) > 2 else Fraction(1)
    b = Fraction(sys.argv[3]) if len(sys.argv) > 3 else Fraction(2)
    K, gamma = triangulated_disk_box(a, b)
    with open(out, "w") as f:
        json.dump(dump_bundle(K, {"gamma": gamma}), f, indent=1)
    print("wrote", out)
