#!/usr/bin/env python3
"""Regenerate src/sobol_table.inc from the Joe-Kuo (new-joe-kuo-6.21201)
direction numbers bundled with scipy."""
import os
import sys

import numpy as np
import scipy

DIMS = int(sys.argv[1]) if len(sys.argv) > 1 else 256

path = os.path.join(os.path.dirname(scipy.__file__), "stats",
                    "_sobol_direction_numbers.npz")
data = np.load(path)
poly, vinit = data["poly"], data["vinit"]

out = []
out.append("// Generated by tools/gen_sobol_table.py; do not edit.")
out.append("// Joe-Kuo new-joe-kuo-6.21201 direction numbers, dimensions 2..%d." % DIMS)
out.append("// Row layout: degree s, interior polynomial coefficients a, m_1..m_s.")
out.append("inline constexpr int kSobolTableDims = %d;" % DIMS)
out.append("inline constexpr SobolPoly kSobolPolys[kSobolTableDims - 1] = {")
for d in range(1, DIMS):
    p = int(poly[d])
    s = p.bit_length() - 1
    a = (p >> 1) & ((1 << (s - 1)) - 1) if s > 1 else 0
    ms = ", ".join(str(int(v)) for v in vinit[d][:s])
    out.append("    {%d, %d, {%s}}," % (s, a, ms))
out.append("};")
sys.stdout.write("\n".join(out) + "\n")
