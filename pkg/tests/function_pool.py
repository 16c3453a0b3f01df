"""A fixed pool of smooth functions on the half-plane chart with sympy derivatives."""
import numpy as np
import sympy as sp

from geoaffine import halfplane as hp

_t1, _t2 = sp.symbols("t1 t2", real=True)
POOL_EXPR = [
    _t1,
    sp.log(_t2),
    _t1**2 + _t2**2,
    sp.sin(_t1) * _t2,
    sp.exp(-_t1**2) / _t2,
    _t1 * _t2**3,
    sp.cos(_t1 + _t2),
    sp.atan(_t1 / _t2),
    (_t1**2 + (_t2 - 1) ** 2) / _t2,
    sp.sqrt(1 + _t1**2) * sp.log(1 + _t2),
]


def scalar_field(expr) -> hp.ScalarField2:
    f = sp.lambdify((_t1, _t2), expr, "math")
    g = sp.lambdify((_t1, _t2), [sp.diff(expr, _t1), sp.diff(expr, _t2)], "math")
    H = sp.lambdify((_t1, _t2), sp.hessian(expr, (_t1, _t2)).tolist(), "math")
    return hp.ScalarField2(f, lambda a, b: tuple(g(a, b)), lambda a, b: np.array(H(a, b), dtype=float))


POOL = [scalar_field(e) for e in POOL_EXPR]


def chart_points(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.uniform(-3, 3, n), rng.uniform(0.1, 3, n)])
