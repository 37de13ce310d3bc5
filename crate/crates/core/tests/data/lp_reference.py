"""Reference optimal objectives from scipy's HiGHS interface.

standard: 100 feasible bounded problems min c'x, Ax = b, x >= 0 (10 x 20).
general: 100 feasible bounded problems in MPS form with mixed row senses,
ranges, bounds, free columns, both objective senses and an objective offset.
Writes lp_reference.json.
"""

import json

import numpy as np
from scipy.optimize import linprog


def standard_instances(rng, count):
    out = []
    while len(out) < count:
        m, n = 10, 20
        a = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.6)
        x0 = rng.uniform(0.1, 2.0, n)
        y0 = rng.normal(size=m)
        s0 = rng.uniform(0.1, 2.0, n)
        b = a @ x0
        c = a.T @ y0 + s0
        res = linprog(c, A_eq=a, b_eq=b, bounds=[(0, None)] * n, method="highs")
        if res.status != 0 or np.linalg.matrix_rank(a) < m:
            continue
        out.append({"m": m, "n": n, "a": a.tolist(), "b": b.tolist(), "c": c.tolist(), "objective": res.fun})
    return out


def fmt(v):
    return repr(float(v))


def general_instance(rng, idx):
    m = int(rng.integers(3, 8))
    n = int(rng.integers(4, 10))
    a = np.round(rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.7), 3)
    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    kinds = rng.choice(["pl", "up", "box", "fx", "fr", "mi", "lo"], size=n,
                       p=[0.3, 0.15, 0.2, 0.05, 0.1, 0.1, 0.1])
    for j, k in enumerate(kinds):
        if k == "up":
            upper[j] = round(rng.uniform(1, 5), 2)
        elif k == "box":
            lower[j] = round(rng.uniform(-3, 1), 2)
            upper[j] = lower[j] + round(rng.uniform(0.5, 4), 2)
        elif k == "fx":
            lower[j] = upper[j] = round(rng.uniform(-2, 2), 2)
        elif k == "fr":
            lower[j] = -np.inf
        elif k == "mi":
            lower[j] = -np.inf
            upper[j] = round(rng.uniform(-1, 3), 2)
        elif k == "lo":
            lower[j] = round(rng.uniform(-2, 2), 2)
    x0 = np.array([
        rng.uniform(lo if np.isfinite(lo) else -3, hi if np.isfinite(hi) else (lo if np.isfinite(lo) else 0) + 3)
        for lo, hi in zip(lower, upper)
    ])
    act = a @ x0
    senses = rng.choice(["L", "G", "E", "R"], size=m, p=[0.35, 0.35, 0.15, 0.15])
    rows = []
    for i, s in enumerate(senses):
        if s == "L":
            rows.append(("L", round(act[i] + rng.uniform(0, 2), 3), None))
        elif s == "G":
            rows.append(("G", round(act[i] - rng.uniform(0, 2), 3), None))
        elif s == "E":
            rows.append(("E", act[i], None))
        else:
            lo = round(act[i] - rng.uniform(0, 1.5), 3)
            rows.append(("L", round(lo + rng.uniform(0.2, 3), 3), lo))
    c = np.round(rng.normal(size=n), 3)
    maximize = bool(rng.random() < 0.4)
    offset = round(float(rng.normal()), 3) if rng.random() < 0.3 else 0.0

    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for i, (s, rhs, lo) in enumerate(rows):
        if s == "L":
            a_ub.append(a[i]); b_ub.append(rhs)
            if lo is not None:
                a_ub.append(-a[i]); b_ub.append(-lo)
        elif s == "G":
            a_ub.append(-a[i]); b_ub.append(-rhs)
        else:
            a_eq.append(a[i]); b_eq.append(rhs)
    bounds = [(None if not np.isfinite(l) else l, None if not np.isfinite(u) else u) for l, u in zip(lower, upper)]
    res = linprog(-c if maximize else c,
                  A_ub=np.array(a_ub) if a_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(a_eq) if a_eq else None, b_eq=b_eq or None,
                  bounds=bounds, method="highs")
    if res.status != 0:
        return None
    objective = (-res.fun if maximize else res.fun) + offset

    lines = [f"NAME GEN{idx}"]
    if maximize:
        lines += ["OBJSENSE", "    MAX"]
    lines.append("ROWS")
    lines.append(" N COST")
    for i, (s, _, _) in enumerate(rows):
        lines.append(f" {s} R{i}")
    lines.append("COLUMNS")
    for j in range(n):
        lines.append(f"    C{j} COST {fmt(c[j])}")
        for i in range(m):
            if a[i, j] != 0:
                lines.append(f"    C{j} R{i} {fmt(a[i, j])}")
    lines.append("RHS")
    for i, (_, rhs, _) in enumerate(rows):
        lines.append(f"    RHS R{i} {fmt(rhs)}")
    if offset != 0.0:
        lines.append(f"    RHS COST {fmt(-offset)}")
    if any(lo is not None for _, _, lo in rows):
        lines.append("RANGES")
        for i, (_, rhs, lo) in enumerate(rows):
            if lo is not None:
                lines.append(f"    RNG R{i} {fmt(rhs - lo)}")
    lines.append("BOUNDS")
    for j, k in enumerate(kinds):
        if k == "up":
            lines.append(f" UP BND C{j} {fmt(upper[j])}")
        elif k == "box":
            lines.append(f" LO BND C{j} {fmt(lower[j])}")
            lines.append(f" UP BND C{j} {fmt(upper[j])}")
        elif k == "fx":
            lines.append(f" FX BND C{j} {fmt(lower[j])}")
        elif k == "fr":
            lines.append(f" FR BND C{j}")
        elif k == "mi":
            lines.append(f" MI BND C{j}")
            lines.append(f" UP BND C{j} {fmt(upper[j])}")
        elif k == "lo":
            lines.append(f" LO BND C{j} {fmt(lower[j])}")
    lines.append("ENDATA")
    return {"name": f"GEN{idx}", "mps": "\n".join(lines) + "\n", "objective": objective}


def main():
    rng = np.random.default_rng(7)
    standard = standard_instances(rng, 100)
    general = []
    idx = 0
    while len(general) < 100:
        inst = general_instance(rng, idx)
        idx += 1
        if inst is not None:
            general.append(inst)
    with open("lp_reference.json", "w") as fh:
        json.dump({"standard": standard, "general": general}, fh, indent=1)


if __name__ == "__main__":
    main()
