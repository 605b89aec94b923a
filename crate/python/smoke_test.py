"""Quick end-to-end check of the extension module."""

import math

import mlab


def main():
    assert "cylinder" in mlab.Surface.names()
    cyl = mlab.Surface.catalog("cylinder")
    inv = cyl.invariants(64)
    assert inv.kappa.shape == (64, 64)
    assert abs(inv.mobius_area - math.pi / 2) < 1e-9

    reports = {r["name"]: r for r in cyl.invariants(128).residuals(q=-0.125)}
    assert reports["isothermic_form"]["pass"]
    assert reports["constrained_willmore"]["pass"]
    assert not reports["willmore"]["pass"]

    kappa, c = inv.t_transform(0.5)
    assert max(abs(a - b) for a, b in zip(kappa.values(), inv.kappa.values())) < 1e-12

    h, hs, hss, km = mlab.flat_bonnet_solution(-1.0, 1.0)
    sol = mlab.integrate_hazzidakis("C", 1.0, [h, hs, hss], 3.0, 1e-3)
    worst = max(abs(H - 2.0 / s) for s, H in zip(sol["s"], sol["h"]))
    assert worst < 1e-8, worst

    n, r = 512, 2.0
    ds = 2 * math.pi * r / n
    circle = [complex(r * math.cos(k * ds / r), r * math.sin(k * ds / r)) for k in range(n)]
    ks = mlab.similarity_curvature(circle, ds, closed=True)
    assert max(abs(v) for v in ks[4:-4]) < 1e-6

    period = 2 * math.pi
    u0 = [0.5 + 0.2 * math.cos(period * k / 128) for k in range(128)]
    u1 = mlab.burgers_evolve(u0, period, 50)
    assert abs(sum(u1) - sum(u0)) < 1e-9

    try:
        mlab.Surface.catalog("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown surface accepted")

    (res,) = mlab.run_selftest(criterion=6)
    assert res["pass"], res
    print("smoke test ok")


if __name__ == "__main__":
    main()
