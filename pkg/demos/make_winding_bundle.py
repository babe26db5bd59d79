"""Write a chain bundle in C^1 whose triangles wind around 0 or miss it.

Gives `logperiods thom-compare` nonzero exact Thom cocycle values to compare.

Usage: python3 demos/make_winding_bundle.py out.json
"""

import json
import sys
from fractions import Fraction as F

from logperiods.chain_core import Chain, SimplicialComplex, Vertex, dump_bundle

POINTS = {0: (F(2), F(1, 5)), 1: (F(-1), F(2)), 2: (F(-3, 2), F(-2)), 3: (F(4), F(3)),
          4: (F(5), F(-1)), 5: (F(1, 2), F(-4)), 6: (F(-3), F(1))}
TRIANGLES = [(0, 1, 2), (0, 1, 3), (0, 2, 4), (2, 4, 5), (1, 2, 5), (0, 3, 4), (3, 5, 6)]


def winding_complex():
    verts = [Vertex(j, (p,)) for j, p in POINTS.items()]
    K = SimplicialComplex.from_maximal(verts, TRIANGLES, None, 1)
    return K, Chain.from_simplices(1, [(t, 1) for t in TRIANGLES])


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "winding.json"
    K, gamma = winding_complex()
    with open(out, "w") as f:
        json.dump(dump_bundle(K, {"triangles": gamma}), f, indent=1)
    print("wrote", out)
