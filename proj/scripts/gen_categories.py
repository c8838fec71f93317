#!/usr/bin/env python3
# Copyright 2026 The anyonsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates the bundled category files under data/categories/.

Every file is checked here (pentagon, F unitarity, S unitarity, Verlinde,
vacuum-pair F element) before it is written. The C++ loader re-checks all of
it independently.

Convention: |(a b)_e c; d> = sum_f F[a,b,c,d][e,f] |a (b c)_f; d>.
"""
import cmath
import itertools
import json
import math
import os
import sys

import numpy as np

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "categories")


class Cat:
    def __init__(self, name, labels, dual, fusion, qdim, smatrix):
        self.name = name
        self.labels = labels
        self.n = len(labels)
        self.dual = dual
        self.N = fusion  # set of (a,b,c)
        self.qdim = qdim
        self.S = np.array(smatrix, dtype=complex)
        self.F = {}

    def adm(self, a, b, c):
        return (a, b, c) in self.N

    def fkeys(self):
        r = range(self.n)
        for a, b, c, d in itertools.product(r, r, r, r):
            for e in r:
                if not (self.adm(a, b, e) and self.adm(e, c, d)):
                    continue
                for f in r:
                    if self.adm(b, c, f) and self.adm(a, f, d):
                        yield (a, b, c, d, e, f)

    def f(self, a, b, c, d, e, f):
        return self.F.get((a, b, c, d, e, f), 0.0)


def check(cat):
    r = range(cat.n)
    # F unitarity
    worst = 0.0
    for a, b, c, d in itertools.product(r, r, r, r):
        es = [e for e in r if cat.adm(a, b, e) and cat.adm(e, c, d)]
        fs = [f for f in r if cat.adm(b, c, f) and cat.adm(a, f, d)]
        assert len(es) == len(fs), (a, b, c, d)
        if not es:
            continue
        m = np.array([[cat.f(a, b, c, d, e, f) for f in fs] for e in es])
        worst = max(worst, np.abs(m @ m.conj().T - np.eye(len(es))).max())
    # pentagon: F[f,c,d,e][g,l] F[a,b,l,e][f,k] = sum_h F[a,b,c,g][f,h] F[a,h,d,e][g,k] F[b,c,d,k][h,l]
    pent = 0.0
    for a, b, c, d, e in itertools.product(r, r, r, r, r):
        for f, g, k, l in itertools.product(r, r, r, r):
            lhs = cat.f(f, c, d, e, g, l) * cat.f(a, b, l, e, f, k)
            rhs = sum(cat.f(a, b, c, g, f, h) * cat.f(a, h, d, e, g, k) * cat.f(b, c, d, k, h, l) for h in r)
            pent = max(pent, abs(lhs - rhs))
    S = cat.S
    D = math.sqrt(sum(x * x for x in cat.qdim))
    su = np.abs(S @ S.conj().T - np.eye(cat.n)).max()
    sym = np.abs(S - S.T).max()
    row0 = max(abs(S[0, a] - cat.qdim[a] / D) for a in r)
    verl = 0.0
    for a, b, c in itertools.product(r, r, r):
        v = sum(S[a, x] * S[b, x] * S[c, x].conjugate() / S[0, x] for x in r)
        verl = max(verl, abs(v - (1.0 if cat.adm(a, b, c) else 0.0)))
    f00 = max(abs(cat.f(a, cat.dual[a], a, a, 0, 0) - 1.0 / cat.qdim[a]) for a in r)
    print(f"{cat.name}: Funit={worst:.2e} pent={pent:.2e} Sunit={su:.2e} Ssym={sym:.2e} "
          f"S0={row0:.2e} verlinde={verl:.2e} f00={f00:.2e}")
    assert max(worst, pent, su, sym, row0, verl, f00) < 1e-12


def write(cat):
    check(cat)
    doc = {
        "format": "anyonsim-category/1",
        "name": cat.name,
        "labels": cat.labels,
        "dual": cat.dual,
        "qdim": cat.qdim,
        "fusion": sorted([list(t) for t in cat.N]),
        "fsymbols": [list(k) + [cat.F[k].real, cat.F[k].imag] for k in sorted(cat.F)],
        "smatrix": [[[z.real, z.imag] for z in row] for row in cat.S],
    }
    path = os.path.join(OUT, cat.name + ".json")
    lines = ["{"]
    keys = list(doc)
    for i, key in enumerate(keys):
        sep = "," if i + 1 < len(keys) else ""
        val = doc[key]
        if key in ("fusion", "fsymbols", "smatrix"):
            body = ",\n".join("    " + json.dumps(row, separators=(", ", ": ")) for row in val)
            lines.append(f'  "{key}": [\n{body}\n  ]{sep}')
        else:
            lines.append(f'  "{key}": {json.dumps(val)}{sep}')
    lines.append("}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def fill_trivial(cat):
    for k in cat.fkeys():
        cat.F.setdefault(k, complex(1.0))


def trivial():
    cat = Cat("trivial", ["1"], [0], {(0, 0, 0)}, [1.0], [[1.0]])
    fill_trivial(cat)
    return cat


def fibonacci():
    phi = (1 + math.sqrt(5)) / 2
    N = {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)}
    D = math.sqrt(2 + phi)
    S = [[1 / D, phi / D], [phi / D, -1 / D]]
    cat = Cat("fibonacci", ["1", "tau"], [0, 1], N, [1.0, phi], S)
    t = 1
    cat.F[(t, t, t, t, 0, 0)] = complex(1 / phi)
    cat.F[(t, t, t, t, 0, 1)] = complex(1 / math.sqrt(phi))
    cat.F[(t, t, t, t, 1, 0)] = complex(1 / math.sqrt(phi))
    cat.F[(t, t, t, t, 1, 1)] = complex(-1 / phi)
    fill_trivial(cat)
    return cat


def ising():
    s2 = math.sqrt(2)
    N = {(0, 0, 0), (0, 1, 1), (1, 0, 1), (0, 2, 2), (2, 0, 2),
         (1, 1, 0), (1, 1, 2), (1, 2, 1), (2, 1, 1), (2, 2, 0)}
    S = [[0.5, s2 / 2, 0.5], [s2 / 2, 0.0, -s2 / 2], [0.5, -s2 / 2, 0.5]]
    cat = Cat("ising", ["1", "sigma", "psi"], [0, 1, 2], N, [1.0, s2, 1.0], S)
    s = 1
    cat.F[(s, s, s, s, 0, 0)] = complex(1 / s2)
    cat.F[(s, s, s, s, 0, 2)] = complex(1 / s2)
    cat.F[(s, s, s, s, 2, 0)] = complex(1 / s2)
    cat.F[(s, s, s, s, 2, 2)] = complex(-1 / s2)
    cat.F[(1, 2, 1, 2, 1, 1)] = complex(-1.0)
    cat.F[(2, 1, 2, 1, 1, 1)] = complex(-1.0)
    fill_trivial(cat)
    return cat


def z3():
    N = {(a, b, (a + b) % 3) for a in range(3) for b in range(3)}
    w = cmath.exp(2j * math.pi / 3)
    S = [[w ** (a * b) / math.sqrt(3) for b in range(3)] for a in range(3)]
    cat = Cat("z3", ["0", "1", "2"], [0, 2, 1], N, [1.0, 1.0, 1.0], S)
    fill_trivial(cat)
    return cat


def su2k_jk(k):
    """SU(2)_k fusion rules with the Frobenius-Schur-positive (Jones-Kauffman) F-symbols."""
    n = k + 1  # labels m = 2j = 0..k
    den = math.sin(math.pi / (k + 2))

    def qint(x):
        return math.sin(math.pi * x / (k + 2)) / den

    def qfact(x):
        out = 1.0
        for i in range(1, x + 1):
            out *= qint(i)
        return out

    def adm(a, b, c):  # twice-spins
        return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b and a + b + c <= 2 * k

    def delta(a, b, c):
        return math.sqrt(qfact((a + b - c) // 2) * qfact((a - b + c) // 2) * qfact((-a + b + c) // 2)
                         / qfact((a + b + c) // 2 + 1))

    def sixj(j1, j2, j3, j4, j5, j6):  # arguments are twice-spins
        t1 = (j1 + j2 + j3) // 2
        t2 = (j1 + j5 + j6) // 2
        t3 = (j4 + j2 + j6) // 2
        t4 = (j4 + j5 + j3) // 2
        b1 = (j1 + j2 + j4 + j5) // 2
        b2 = (j2 + j3 + j5 + j6) // 2
        b3 = (j3 + j1 + j6 + j4) // 2
        tot = 0.0
        for z in range(max(t1, t2, t3, t4), min(b1, b2, b3) + 1):
            tot += (-1) ** z * qfact(z + 1) / (qfact(z - t1) * qfact(z - t2) * qfact(z - t3) * qfact(z - t4)
                                               * qfact(b1 - z) * qfact(b2 - z) * qfact(b3 - z))
        return delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3) * tot

    N = {(a, b, c) for a in range(n) for b in range(n) for c in range(n) if adm(a, b, c)}
    qdim = [qint(m + 1) for m in range(n)]
    D = math.sqrt(sum(x * x for x in qdim))
    # Jones-Kauffman partner: S flips sign on the odd x odd block.
    S = [[(-1) ** (a * b) * math.sqrt(2 / (k + 2)) * math.sin(math.pi * (a + 1) * (b + 1) / (k + 2))
          for b in range(n)] for a in range(n)]
    names = ["j0"] + [("j%d" % (m // 2)) if m % 2 == 0 else ("j%d_2" % m) for m in range(1, n)]
    cat = Cat("su2_%d" % k, names, list(range(n)), N, qdim, S)
    for (a, b, c, d, e, f) in cat.fkeys():
        val = (-1) ** ((a + b + c + d) // 2) * math.sqrt(qint(e + 1) * qint(f + 1)) * sixj(a, b, e, c, d, f)
        # Z2 3-cocycle twist on the odd sector
        if a % 2 and b % 2 and c % 2:
            val = -val
        cat.F[(a, b, c, d, e, f)] = complex(val)
    return cat


def main():
    os.makedirs(OUT, exist_ok=True)
    for cat in (trivial(), fibonacci(), ising(), z3(), su2k_jk(4)):
        write(cat)
    return 0


if __name__ == "__main__":
    sys.exit(main())
