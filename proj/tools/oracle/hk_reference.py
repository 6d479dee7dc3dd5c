"""Brute-force exact reference for the HK update, used to derive the frozen
constants in the C++ test suites. Independent of the C++ implementation.

    python3 tools/oracle/hk_reference.py
"""
from fractions import Fraction as F


def step(xs):
    """One synchronous update; xs is a list of coordinate tuples."""
    out = []
    for xi in xs:
        nb = [xj for xj in xs if sum((a - b) ** 2 for a, b in zip(xi, xj)) <= 1]
        out.append(tuple(sum(c) / len(nb) for c in zip(*nb)))
    return out


def simulate(xs, cap=100000):
    t = 0
    traj = [xs]
    while t < cap:
        nxt = step(xs)
        if nxt == xs:
            return t, traj
        xs = nxt
        traj.append(xs)
        t += 1
    return None, traj


def potential(xs):
    v = F(0)
    for a in xs:
        for b in xs:
            sq = sum((p - q) ** 2 for p, q in zip(a, b))
            v += sq if sq < 1 else 1
    return v


def line(vals):
    return [(F(v),) for v in vals]


if __name__ == "__main__":
    tri = [(F(0), F(0)), (F(1), F(0)), (F(1, 2), F(1))]
    t1 = step(tri)
    print("triangle t=1:", t1)
    print("triangle t=2:", step(t1))
    print("triangle converged_at:", simulate(tri)[0])
    print("unit_line(3) converged_at:", simulate(line(range(3)))[0])
    for n in (10, 20, 40, 80):
        print(f"unit_line({n}) converged_at:", simulate(line(range(n)))[0])
    print("0,0.4,0.5 ->", step(line([0, F(2, 5), F(1, 2)])))
    print("V(0,1):", potential(line([0, 1])), "V after:", potential(step(line([0, 1]))))
    print("V(0,1/2):", potential(line([0, F(1, 2)])))
    xs = line([0, 1, 2])
    ys = step(xs)
    print("0,1,2 step:", ys, "max disp:", max(abs(a[0] - b[0]) for a, b in zip(xs, ys)))
    # HK_eta example: agents at -0.95 and 0, eta_i = 0.1
    etas = [F(1, 10), F(1, 10)]
    pos = [F(-95, 100), F(0)]
    nxt = []
    for i, xi in enumerate(pos):
        nb = [xj for xj in pos if -1 + etas[i] <= xj - xi <= 1]
        nxt.append(sum(nb) / len(nb))
    print("noisy step:", nxt)
