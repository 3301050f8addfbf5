#!/usr/bin/env python3
"""Arbitrary-precision reference values for the rank and contingency statistics.

Every quantity is computed from its textbook definition with mpmath at 50
digits; ranks and U are obtained by brute-force pair counting rather than
sorting. Output is frozen into tests/data/stats_oracle.json:

    python3 crates/core/tests/oracle/stats_oracle.py > crates/core/tests/data/stats_oracle.json
"""
import json

import mpmath as mp

mp.mp.dps = 50


def avg_rank(value, pool):
    less = sum(1 for v in pool if v < value)
    equal = sum(1 for v in pool if v == value)
    return mp.mpf(less) + (mp.mpf(equal) + 1) / 2


def mann_whitney(xs, ys):
    n1, n2 = len(xs), len(ys)
    u1 = mp.mpf(0)
    for x in xs:
        for y in ys:
            if x > y:
                u1 += 1
            elif x == y:
                u1 += mp.mpf(1) / 2
    u2 = n1 * n2 - u1
    u = min(u1, u2)
    pool = xs + ys
    n = n1 + n2
    ties = mp.mpf(0)
    for value in sorted(set(pool)):
        t = pool.count(value)
        ties += t ** 3 - t
    var = mp.mpf(n1 * n2) / 12 * ((n + 1) - ties / (n * (n - 1)))
    mean = mp.mpf(n1 * n2) / 2
    if var == 0:
        p = mp.mpf(1)
    else:
        z = max(mp.mpf(0), abs(u - mean) - mp.mpf(1) / 2) / mp.sqrt(var)
        p = min(mp.mpf(1), mp.erfc(z / mp.sqrt(2)))
    return u, p


def spearman(xs, ys):
    n = len(xs)
    rx = [avg_rank(v, xs) for v in xs]
    ry = [avg_rank(v, ys) for v in ys]
    mx = mp.fsum(rx) / n
    my = mp.fsum(ry) / n
    sxy = mp.fsum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = mp.fsum((a - mx) ** 2 for a in rx)
    syy = mp.fsum((b - my) ** 2 for b in ry)
    rho = sxy / mp.sqrt(sxx * syy)
    df = n - 2
    if abs(rho) == 1:
        return rho, mp.mpf(0)
    t2 = rho ** 2 * df / (1 - rho ** 2)
    p = mp.betainc(mp.mpf(df) / 2, mp.mpf(1) / 2, 0, df / (df + t2), regularized=True)
    return rho, p


def chi2_gof(observed, probs, df):
    total = sum(observed)
    stat = mp.mpf(0)
    for o, p in zip(observed, probs):
        e = mp.mpf(p) * total
        if e > 0:
            stat += (o - e) ** 2 / e
    p = mp.gammainc(mp.mpf(df) / 2, stat / 2, mp.inf, regularized=True)
    return stat, p


def independence(table):
    rows = [r for r in table if sum(r) > 0]
    cols = [j for j in range(len(rows[0])) if sum(r[j] for r in rows) > 0]
    rows = [[r[j] for j in cols] for r in rows]
    n = mp.mpf(sum(sum(r) for r in rows))
    rsum = [sum(r) for r in rows]
    csum = [sum(r[j] for r in rows) for j in range(len(cols))]
    stat = mp.mpf(0)
    for i, r in enumerate(rows):
        for j, o in enumerate(r):
            e = mp.mpf(rsum[i]) * csum[j] / n
            stat += (o - e) ** 2 / e
    k = min(len(rows), len(cols))
    v = mp.sqrt(stat / n / (k - 1))
    df = (len(rows) - 1) * (len(cols) - 1)
    p = mp.gammainc(mp.mpf(df) / 2, stat / 2, mp.inf, regularized=True)
    return stat, p, v


DATASETS = [
    {
        "xs": [1, 2, 2, 3, 4, 4, 4, 5, 1, 3],
        "ys": [2, 3, 3, 4, 5, 5, 4, 5, 2, 2],
        "observed": [28, 31, 40, 35],
        "probs": [0.25, 0.25, 0.25, 0.25],
        "table": [[10, 4, 6], [3, 12, 5]],
    },
    {
        "xs": [1, 1, 1, 2, 2, 3, 3, 4, 5, 5, 5, 5],
        "ys": [5, 4, 4, 3, 3, 3, 2, 2, 1, 1, 2, 1],
        "observed": [10, 20, 30, 40],
        "probs": [0.1, 0.2, 0.3, 0.4],
        "table": [[8, 1, 1], [1, 8, 1], [1, 1, 8]],
    },
    {
        "xs": [3, 3, 3, 3, 3, 2, 4, 3],
        "ys": [1, 2, 3, 4, 5, 1, 5, 3],
        "observed": [5, 0, 12, 3],
        "probs": [0.3, 0.1, 0.4, 0.2],
        "table": [[5, 5], [5, 5], [10, 0]],
    },
    {
        "xs": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        "ys": [2, 1, 4, 3, 6, 5, 8, 7, 10, 9],
        "observed": [100, 0, 0, 0],
        "probs": [0.25, 0.25, 0.25, 0.25],
        "table": [[20, 0, 0], [0, 15, 0], [0, 0, 25]],
    },
    {
        "xs": [4, 4, 4, 4, 4, 4, 4],
        "ys": [1, 1, 1, 1, 1, 1, 2],
        "observed": [7, 9, 4],
        "probs": [0.5, 0.3, 0.2],
        "table": [[7, 3, 2, 8], [4, 6, 5, 5]],
    },
    {
        "xs": [2, 5, 1, 4, 3, 2, 5, 1, 4, 3, 3, 2, 1],
        "ys": [1, 5, 2, 4, 3, 1, 4, 2, 5, 3, 2, 2, 1],
        "observed": [13, 17, 22, 9, 14],
        "probs": [0.2, 0.2, 0.2, 0.2, 0.2],
        "table": [[12, 9], [7, 14]],
    },
    {
        "xs": [1, 2, 3, 4, 5],
        "ys": [1, 2, 3, 4, 5, 1, 2, 3, 4, 5],
        "observed": [50, 50],
        "probs": [0.5, 0.5],
        "table": [[5, 5, 5], [5, 5, 5], [5, 5, 5]],
    },
    {
        "xs": [1, 1, 2, 2, 2, 3, 3, 3, 3, 4],
        "ys": [4, 4, 4, 3, 3, 3, 2, 2, 1, 1],
        "observed": [3, 6, 11, 20],
        "probs": [0.1, 0.15, 0.25, 0.5],
        "table": [[0, 0, 0], [3, 4, 9], [6, 1, 2]],
    },
    {
        "xs": [5, 4, 5, 3, 4, 5, 2, 4, 5, 5, 4],
        "ys": [1, 2, 1, 3, 2, 2, 4, 1, 1, 3, 2],
        "observed": [60, 25, 15],
        "probs": [0.6, 0.25, 0.15],
        "table": [[15, 2, 3, 1], [2, 16, 1, 2], [1, 3, 14, 2], [2, 1, 2, 18]],
    },
    {
        "xs": [1, 3, 2, 4, 3, 5, 4, 2, 1, 5, 3, 3, 4, 2],
        "ys": [2, 3, 3, 4, 2, 5, 5, 1, 1, 4, 3, 4, 4, 3],
        "observed": [21, 19, 18, 22, 20],
        "probs": [0.25, 0.25, 0.2, 0.15, 0.15],
        "table": [[30, 10], [12, 28], [9, 11]],
    },
]


def f(x):
    return float(mp.nstr(x, 30))


def main():
    out = []
    for i, d in enumerate(DATASETS):
        u, up = mann_whitney(d["xs"], d["ys"])
        entry = dict(d)
        entry["id"] = i
        entry["mann_whitney"] = {"u": f(u), "p": f(up)}
        n = min(len(d["xs"]), len(d["ys"]))
        rho, rp = spearman(d["xs"][:n], d["ys"][:n]) if len(set(d["xs"][:n])) > 1 and len(set(d["ys"][:n])) > 1 else (None, None)
        entry["spearman"] = None if rho is None else {"n": n, "rho": f(rho), "p": f(rp)}
        df = len(d["observed"]) - 1
        stat, p = chi2_gof(d["observed"], d["probs"], df)
        entry["chi2_gof"] = {"df": df, "chi2": f(stat), "p": f(p)}
        stat, p, v = independence(d["table"])
        entry["cramers_v"] = {"chi2": f(stat), "p": f(p), "v": f(v)}
        out.append(entry)
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
