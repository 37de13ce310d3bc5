"""Writes the bundled mini-corpus. Deterministic; rerun to regenerate."""

import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))


def write(family, name, lines):
    os.makedirs(os.path.join(HERE, family), exist_ok=True)
    with open(os.path.join(HERE, family, name + ".mps"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def mps(name, rows, cols, obj, rhs, bounds=(), sense=None, ranges=()):
    """rows: [(name, type)], cols: {col: {row: coef}}, obj: {col: c}."""
    out = [f"NAME {name}"]
    if sense:
        out += ["OBJSENSE", f"    {sense}"]
    out += ["ROWS", " N COST"] + [f" {t} {r}" for r, t in rows]
    out.append("COLUMNS")
    for c, entries in cols.items():
        if obj.get(c, 0) != 0:
            out.append(f"    {c} COST {obj[c]}")
        for r, v in entries.items():
            out.append(f"    {c} {r} {v}")
    out.append("RHS")
    out += [f"    RHS {r} {v}" for r, v in rhs.items()]
    if ranges:
        out.append("RANGES")
        out += [f"    RNG {r} {v}" for r, v in ranges]
    if bounds:
        out.append("BOUNDS")
        out += [f" {t} BND {c}" + ("" if v is None else f" {v}") for t, c, v in bounds]
    out.append("ENDATA")
    return out


def pure_slack():
    # max 3x1 + 2x2 + 4x3 + x4 over a dense <= system: standard form is [A | I]
    a = [[2, 1, 3, 1], [1, 3, 1, 2], [3, 1, 2, 2]]
    rows = [(f"C{i}", "L") for i in range(3)]
    cols = {f"X{j}": {f"C{i}": a[i][j] for i in range(3)} for j in range(4)}
    obj = {"X0": 3, "X1": 2, "X2": 4, "X3": 1}
    write("tiny", "pure_slack", mps("PURESLK", rows, cols, obj, {"C0": 10, "C1": 12, "C2": 9}, sense="MAX"))


def degenerate_square():
    # two equalities in two unknowns: n = m after standardization
    rows = [("E0", "E"), ("E1", "E")]
    cols = {"X": {"E0": 1, "E1": 1}, "Y": {"E0": 1, "E1": -1}}
    write("tiny", "degenerate_square", mps("DEGSQ", rows, cols, {"X": 1, "Y": 2}, {"E0": 2, "E1": 0}))


def covering_small():
    rows = [("R0", "G"), ("R1", "G")]
    cols = {"X1": {"R0": 1}, "X2": {"R0": 1}, "X3": {"R1": 1}, "X4": {"R1": 1}}
    write("tiny", "covering_small", mps("COVER2", rows, cols, {c: 1 for c in cols}, {"R0": 1, "R1": 1}))


def rank_deficient():
    # third row is the sum of the first two
    rows = [("A", "E"), ("B", "E"), ("S", "E")]
    cols = {
        "X1": {"A": 1, "S": 1},
        "X2": {"A": 2, "B": 1, "S": 3},
        "X3": {"B": 1, "S": 1},
        "X4": {"A": 1, "B": 2, "S": 3},
    }
    write("tiny", "rank_deficient", mps("RANKDEF", rows, cols, {"X1": 1, "X2": 1, "X3": 2, "X4": 1},
                                        {"A": 4, "B": 3, "S": 7}))


def mincost_flow(rng):
    nodes = 11
    arcs = set()
    for v in range(nodes - 1):
        arcs.add((v, v + 1))
    while len(arcs) < 26:
        u, v = rng.sample(range(nodes), 2)
        arcs.add((u, v))
    arcs = sorted(arcs)
    supply = [0] * nodes
    supply[0], supply[nodes - 1] = 6, -6
    supply[3], supply[7] = 2, -2
    rows = [(f"N{v}", "E") for v in range(nodes)]
    cols, obj, bounds = {}, {}, []
    for k, (u, v) in enumerate(arcs):
        c = f"F{k}_{u}_{v}"
        cols[c] = {f"N{u}": 1, f"N{v}": -1}
        obj[c] = rng.randint(1, 9)
        bounds.append(("UP", c, rng.randint(4, 10)))
    rhs = {f"N{v}": supply[v] for v in range(nodes) if supply[v] != 0}
    write("flow", "mincost_flow", mps("MCF11", rows, cols, obj, rhs, bounds))


def transport(rng):
    s, d = 5, 6
    cap = [rng.randint(20, 40) for _ in range(s)]
    dem = [rng.randint(10, 25) for _ in range(d)]
    rows = [(f"S{i}", "L") for i in range(s)] + [(f"D{j}", "G") for j in range(d)]
    cols, obj = {}, {}
    for i in range(s):
        for j in range(d):
            c = f"T{i}_{j}"
            cols[c] = {f"S{i}": 1, f"D{j}": 1}
            obj[c] = rng.randint(2, 20)
    rhs = {**{f"S{i}": cap[i] for i in range(s)}, **{f"D{j}": dem[j] for j in range(d)}}
    write("transport", "transport_5x6", mps("TRANS56", rows, cols, obj, rhs))


def set_cover(rng):
    m, n = 12, 16
    rows = [(f"E{i}", "G") for i in range(m)]
    cols, obj, bounds = {}, {}, []
    members = [rng.sample(range(m), rng.randint(2, 4)) for _ in range(n)]
    for i in range(m):
        if not any(i in s for s in members):
            members[rng.randrange(n)].append(i)
    for j, s in enumerate(members):
        c = f"S{j}"
        cols[c] = {f"E{i}": 1 for i in sorted(s)}
        obj[c] = rng.randint(1, 5)
        bounds.append(("UP", c, 1))
    write("covering", "set_cover_12", mps("SETCOV12", rows, cols, obj, {f"E{i}": 1 for i in range(m)}, bounds))


def production(rng):
    products, resources = 8, 10
    rows = [(f"RES{i}", "L") for i in range(resources)] + [("MIX", "G"), ("BAL", "E")]
    cols, obj, bounds = {}, {}, []
    for j in range(products):
        c = f"P{j}"
        entries = {f"RES{i}": round(rng.uniform(0.5, 4.0), 2) for i in range(resources) if rng.random() < 0.6}
        entries["MIX"] = 1
        if j < 4:
            entries["BAL"] = 1
        elif j < 6:
            entries["BAL"] = -1
        cols[c] = entries
        obj[c] = rng.randint(3, 15)
        bounds.append(("UP", c, rng.randint(5, 20)))
    rhs = {f"RES{i}": rng.randint(40, 90) for i in range(resources)}
    rhs["MIX"] = 5
    ranges = [("RES0", 30), ("RES1", 25)]
    write("production", "production_plan", mps("PROD8", rows, cols, obj, rhs, bounds, sense="MAX", ranges=ranges))


def main():
    rng = random.Random(11)
    pure_slack()
    degenerate_square()
    covering_small()
    rank_deficient()
    mincost_flow(rng)
    transport(rng)
    set_cover(rng)
    production(rng)


if __name__ == "__main__":
    main()
