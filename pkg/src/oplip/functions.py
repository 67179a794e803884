"""Built-in Lipschitz functions R^d -> R, each with its exact Lipschitz constant.

Functions take a length-d numpy vector and return a float.  Coordinate
indices are 1-based throughout the package.  Names double as CLI identifiers:

    identity          first coordinate (the identity map for d = 1)
    abs               absolute value of the first coordinate
    euclid-norm       Euclidean norm of the vector
    max-abs           largest coordinate magnitude
    max-abs-scaled    largest coordinate magnitude divided by sqrt(d)
    coordinate:k      k-th coordinate
    crease            distance to the hyperplane <x, 1/sqrt(d)> = 1/2
    poly:c0,c1,...    polynomial in the first coordinate (no exact constant)
"""

import numpy as np

from .rng import generator


class BuiltinFunction:
    """A named function together with its exact Lipschitz constant (or None)."""

    def __init__(self, name, func, lipschitz, integer_valued):
        self.name = name
        self.func = func
        self.lipschitz = lipschitz  # None when no exact constant is known
        self.integer_valued = integer_valued

    def __call__(self, lam):
        return self.func(np.asarray(lam, dtype=float))


def _coordinate(k):
    return lambda lam: float(lam[k - 1])


def builtin_function(name: str, d: int) -> BuiltinFunction:
    """Resolve a CLI function name for dimension d."""
    if name == "identity":
        return BuiltinFunction(name, _coordinate(1), 1.0, True)
    if name == "abs":
        return BuiltinFunction(name, lambda lam: abs(float(lam[0])), 1.0, True)
    if name == "euclid-norm":
        return BuiltinFunction(
            name, lambda lam: float(np.linalg.norm(lam)), 1.0, d == 1
        )
    if name == "max-abs":
        return BuiltinFunction(
            name, lambda lam: float(np.max(np.abs(lam))), 1.0, True
        )
    if name == "max-abs-scaled":
        root = float(np.sqrt(d))
        return BuiltinFunction(
            name, lambda lam: float(np.max(np.abs(lam))) / root, 1.0 / root, d == 1
        )
    if name.startswith("coordinate:"):
        k = int(name.split(":", 1)[1])
        if not 1 <= k <= d:
            raise ValueError(f"coordinate index {k} outside 1..{d}")
        return BuiltinFunction(name, _coordinate(k), 1.0, True)
    if name == "crease":
        u = np.full(d, 1.0 / np.sqrt(d))
        return BuiltinFunction(
            name, lambda lam: abs(float(lam @ u) - 0.5), 1.0, False
        )
    if name.startswith("poly:"):
        coeffs = [float(c) for c in name.split(":", 1)[1].split(",")]
        poly = np.polynomial.Polynomial(coeffs)
        return BuiltinFunction(name, lambda lam: float(poly(lam[0])), None, False)
    raise ValueError(f"unknown function name {name!r}")


def experiment_function_names(d: int):
    """The function set swept by the ratio experiments for dimension d."""
    names = ["identity", "abs", "euclid-norm", "max-abs", "max-abs-scaled", "crease"]
    names += [f"coordinate:{k}" for k in range(2, d + 1)]
    return names


def contraction_names(d: int):
    """Built-in Euclidean contractions (Lipschitz constant <= 1) for dimension d."""
    names = ["identity", "abs", "euclid-norm", "max-abs", "max-abs-scaled", "crease"]
    names += [f"coordinate:{k}" for k in range(2, d + 1)]
    return names


def lipschitz_lower_bound(f, d, box=1.0, samples=2000, seed=0):
    """Sampled finite-difference LOWER bound on the Lipschitz constant.

    This is a lower estimate only: no finite sample certifies a supremum.
    """
    rng = generator(seed, 0xE57)
    a = rng.uniform(-box, box, size=(samples, d))
    b = a + rng.uniform(-box, box, size=(samples, d)) * rng.uniform(
        1e-6, 1.0, size=(samples, 1)
    )
    best = 0.0
    for p, q in zip(a, b):
        dist = float(np.linalg.norm(p - q))
        if dist == 0.0:
            continue
        best = max(best, abs(float(f(p)) - float(f(q))) / dist)
    return best
