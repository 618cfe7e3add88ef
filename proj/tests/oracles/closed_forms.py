"""Symbolic oracles for the closed-form values frozen into the C++ tests.

Run with `python3 tests/oracles/closed_forms.py`. Every printed value is
computed from first principles with sympy, independently of the C++ code.
With --check, the values are compared against the constants frozen in the
unit and acceptance tests.
"""
import sys

import sympy as sp

FROZEN = {
    "interval S": 4,
    "interval u_G(0.5)": -0.34657359027997265,
    "interval u_G''(0.5)": 2,
    "simplex2 S": 12,
    "simplex2 hessian(1/3,1/3)": [[3, sp.Rational(3, 2)], [sp.Rational(3, 2), 3]],
    "square S": 8,
    "interval [0,2] S": 2,
    "simplex3 S": 24,
    "project x^2": (sp.Rational(-1, 6), 1),
    "int (xy)^2": sp.Rational(1, 9),
    "int (xy - x/2 - y/2)^2": sp.Rational(5, 72),
    "anova defect xy": sp.Rational(1, 144),
}

x, y = sp.symbols("x y", real=True)


def guillemin(facets, coords):
    """u_G = 1/2 sum l log l for affine facet functions l."""
    return sp.Rational(1, 2) * sum(l * sp.log(l) for l in facets)


def scalar_curvature(u, coords):
    """S = -sum_{jk} d^2 U^{jk} / dx_j dx_k with U the inverse Hessian."""
    hess = sp.hessian(u, coords)
    inv = sp.simplify(hess.inv())
    s = 0
    for j, a in enumerate(coords):
        for k, b in enumerate(coords):
            s += sp.diff(inv[j, k], a, b)
    return sp.simplify(-s), inv


def main(check=False):
    got = {}

    # Interval [0,1].
    u_int = guillemin([x, 1 - x], [x])
    s_int, inv_int = scalar_curvature(u_int, [x])
    print("interval U =", sp.factor(inv_int[0, 0]), " S =", s_int)
    got["interval S"] = s_int
    got["interval u_G(0.5)"] = sp.N(u_int.subs(x, sp.Rational(1, 2)), 17)
    got["interval u_G''(0.5)"] = sp.diff(u_int, x, 2).subs(x, sp.Rational(1, 2))
    print("interval u_G(0.5) =", sp.N(u_int.subs(x, sp.Rational(1, 2)), 17))
    print("interval u_G''(0.5) =", sp.diff(u_int, x, 2).subs(x, sp.Rational(1, 2)))

    # Standard 2-simplex.
    u_sim = guillemin([x, y, 1 - x - y], [x, y])
    s_sim, inv_sim = scalar_curvature(u_sim, [x, y])
    print("simplex2 U =", inv_sim.applyfunc(sp.factor).tolist(), " S =", s_sim)
    h = sp.hessian(u_sim, [x, y]).subs({x: sp.Rational(1, 3), y: sp.Rational(1, 3)})
    print("simplex2 hessian(1/3,1/3) =", h.tolist())
    got["simplex2 S"] = s_sim
    got["simplex2 hessian(1/3,1/3)"] = h.tolist()

    # Unit square (product of intervals).
    u_sq = guillemin([x, 1 - x, y, 1 - y], [x, y])
    s_sq, _ = scalar_curvature(u_sq, [x, y])
    print("square S =", s_sq)
    got["square S"] = s_sq

    s_two, _ = scalar_curvature(guillemin([x, 2 - x], [x]), [x])
    print("interval [0,2] S =", s_two)
    got["interval [0,2] S"] = s_two

    z = sp.symbols("z", real=True)
    s_sim3, _ = scalar_curvature(guillemin([x, y, z, 1 - x - y - z], [x, y, z]), [x, y, z])
    print("simplex3 S =", s_sim3)
    got["simplex3 S"] = s_sim3

    # Affine projection of x^2 on [0,1].
    a, b = sp.symbols("a b")
    r = x**2 - a - b * x
    sol = sp.solve([sp.integrate(r, (x, 0, 1)), sp.integrate(r * x, (x, 0, 1))], [a, b])
    print("project x^2 ->", sol)
    got["project x^2"] = (sol[a], sol[b])

    print("energy int (x^2-x+1/6)^2 =", sp.integrate((x**2 - x + sp.Rational(1, 6)) ** 2, (x, 0, 1)))
    print("midpoint x^2 n=2 =", (sp.Rational(1, 4) ** 2 + sp.Rational(3, 4) ** 2) / 2)

    sq = lambda e: sp.integrate(sp.integrate(e, (x, 0, 1)), (y, 0, 1))
    print("int (xy)^2 =", sq((x * y) ** 2))
    print("int (xy - x/2 - y/2)^2 =", sq((x * y - x / 2 - y / 2) ** 2))
    got["int (xy)^2"] = sq((x * y) ** 2)
    got["int (xy - x/2 - y/2)^2"] = sq((x * y - x / 2 - y / 2) ** 2)
    # Distance of xy to the separable subspace: xy - (x/2 + y/2 - 1/4).
    print("anova defect xy =", sq((x * y - x / 2 - y / 2 + sp.Rational(1, 4)) ** 2))
    got["anova defect xy"] = sq((x * y - x / 2 - y / 2 + sp.Rational(1, 4)) ** 2)

    if not check:
        return 0
    bad = 0
    for key, want in FROZEN.items():
        have = got[key]
        if key == "interval u_G(0.5)":
            ok = abs(float(have) - want) <= 1e-16
        else:
            ok = sp.simplify(sp.sympify(have) - sp.sympify(want)) == 0 if not isinstance(want, (list, tuple)) \
                else sp.Matrix(have) == sp.Matrix(want)
        print(("ok   " if ok else "FAIL ") + key)
        bad += not ok
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(check="--check" in sys.argv))
