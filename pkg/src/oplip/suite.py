"""Identity and property checks aggregated across all modules.

Each check returns a CheckResult carrying the measured residual and its
tolerance; :func:`run_identity_suite` bundles them into a machine-readable,
byte-deterministic report.  The sweep helpers (`perturbation_sweep`,
`conjugation_sweep`, `contraction_rounding_sweep`, `symbol_agreement_sweep`,
...) are parameterized so the acceptance tests can run them at full size
while the suite runs leaner versions of the same code.
"""

import math
from dataclasses import dataclass

import numpy as np

from .doi import (
    divided_difference_symbol,
    doi_apply,
    doi_l2_norm,
    doi_operator_matrix,
    perturbation_residual,
    symbol_product_check,
)
from .functions import builtin_function, contraction_names, experiment_function_names
from .norms import (
    matrix_trace_norm,
    matrix_weak_l1,
    mu_at,
    profile_from_values,
    schatten_norm,
    singular_values,
    tensor_profile,
    weak_l1,
)
from .rng import generator
from .spectral import (
    apply_function,
    commutator,
    joint_diagonalize,
    planted_commuting_tuple,
)
from .torus import (
    TWO_PI,
    HomogeneousSymbol,
    TorusSignal,
    coefficients,
    fejer,
    fourier_multiplier_apply,
    frequencies,
    frequency_index,
    signal_from_coefficients,
    signal_norms,
    symbol_eval,
)
from .transference import (
    _box_points,
    build_embedding,
    contraction_check,
    integer_tuple,
    round_contraction,
    verify_conjugation,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    details: str = ""


def _rel(diff, ref) -> float:
    return float(diff / (1.0 + ref))


def _random_matrix(n, rng):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _random_hermitian(n, rng):
    z = _random_matrix(n, rng)
    return (z + z.conj().T) / 2.0


# ---------------------------------------------------------------------------
# spectral-core checks


def roundtrip_residual(seed, instances=6):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x51, i)
        n = int(rng.integers(2, 17))
        d = int(rng.integers(1, 4))
        law = ["uniform", "integer:5"][i % 2]
        tup, _, _ = planted_commuting_tuple(n, d, law, seed=int(rng.integers(2**63)))
        js = joint_diagonalize(tup)
        for k, a in enumerate(tup.arrays()):
            recon = (js.basis * js.eigenvalues[:, k]) @ js.basis.conj().T
            scale = max(float(np.linalg.norm(a, "fro")), 1e-300)
            worst = max(worst, float(np.linalg.norm(a - recon, "fro")) / scale)
    return worst


def morphism_residual(seed, instances=4):
    """apply_function is multiplicative on polynomial pairs."""
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x52, i)
        n, d = int(rng.integers(2, 9)), int(rng.integers(1, 3))
        tup, _, _ = planted_commuting_tuple(n, d, "uniform", seed=int(rng.integers(2**63)))
        js = joint_diagonalize(tup)
        c = rng.standard_normal(3)
        f = lambda lam: float(c[0] + c[1] * lam[0] + c[2] * lam[0] ** 2)
        g = lambda lam: float(lam[0] + 0.5 * lam[-1] ** 2)
        fg = lambda lam: f(lam) * g(lam)
        lhs = apply_function(js, fg).data
        rhs = apply_function(js, f).data @ apply_function(js, g).data
        worst = max(worst, _rel(np.linalg.norm(lhs - rhs, "fro"),
                                np.linalg.norm(lhs, "fro")))
    return worst


def calculus_commutation_residual(seed, instances=4):
    """f(A) commutes with every member of the tuple."""
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x53, i)
        n, d = int(rng.integers(2, 9)), int(rng.integers(1, 4))
        tup, _, _ = planted_commuting_tuple(n, d, "uniform", seed=int(rng.integers(2**63)))
        js = joint_diagonalize(tup)
        f = builtin_function("euclid-norm", d)
        fa = apply_function(js, f).data
        for a in tup.arrays():
            dev = np.linalg.norm(commutator(fa, a), "fro")
            scale = np.linalg.norm(fa, "fro") * np.linalg.norm(a, "fro")
            worst = max(worst, float(dev / (1.0 + scale)))
    return worst


def sort_determinism_residual(seed):
    tup, _, _ = planted_commuting_tuple(7, 2, "integer:3", seed=seed)
    a = joint_diagonalize(tup)
    b = joint_diagonalize(tup)
    dev = float(np.max(np.abs(a.eigenvalues - b.eigenvalues)))
    dev = max(dev, float(np.max(np.abs(a.basis - b.basis))))
    return dev


# ---------------------------------------------------------------------------
# doi-engine checks


def doi_linearity_residual(seed, instances=4):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x61, i)
        n, d = int(rng.integers(2, 9)), int(rng.integers(1, 3))
        tup, _, _ = planted_commuting_tuple(n, d, "uniform", seed=int(rng.integers(2**63)))
        js = joint_diagonalize(tup)
        xi = divided_difference_symbol(builtin_function("euclid-norm", d), 1, d)
        v, w = _random_matrix(n, rng), _random_matrix(n, rng)
        a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        lhs = doi_apply(js, xi, a * v + b * w)
        rhs = a * doi_apply(js, xi, v) + b * doi_apply(js, xi, w)
        worst = max(worst, _rel(np.linalg.norm(lhs - rhs, "fro"),
                                np.linalg.norm(rhs, "fro")))
    return worst


def doi_self_adjoint_residual(seed, instances=4):
    """trace(T(V) W*) = trace(V T(W)*) for a real symmetric symbol."""
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x62, i)
        n, d = int(rng.integers(2, 9)), int(rng.integers(1, 3))
        tup, _, _ = planted_commuting_tuple(n, d, "uniform", seed=int(rng.integers(2**63)))
        js = joint_diagonalize(tup)
        xi = divided_difference_symbol(builtin_function("crease", d), 1, d)
        v, w = _random_matrix(n, rng), _random_matrix(n, rng)
        lhs = complex(np.trace(doi_apply(js, xi, v) @ w.conj().T))
        rhs = complex(np.trace(v @ doi_apply(js, xi, w).conj().T))
        worst = max(worst, _rel(abs(lhs - rhs), abs(lhs)))
    return worst


def doi_l2_oracle_residual(seed, instances=4, max_n=8):
    """doi_l2_norm against the largest singular value of the dense operator."""
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x63, i)
        n, d = int(rng.integers(2, max_n + 1)), int(rng.integers(1, 3))
        tup, _, _ = planted_commuting_tuple(n, d, "uniform", seed=int(rng.integers(2**63)))
        js = joint_diagonalize(tup)
        xi = divided_difference_symbol(builtin_function("euclid-norm", d), 1, d)
        direct = doi_l2_norm(js, xi)
        dense = float(np.linalg.svd(doi_operator_matrix(js, xi), compute_uv=False)[0])
        worst = max(worst, _rel(abs(direct - dense), abs(dense)))
    return worst


def perturbation_sweep(seed, instances=20, sizes=(4, 8, 16, 32)):
    """Max residual of the commutator decomposition identity over seeded instances.

    Each instance tests every built-in function of its dimension.
    """
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x64, i)
        n = sizes[i % len(sizes)]
        d = 1 + (i % 3)
        tup, _, _ = planted_commuting_tuple(n, d, "uniform", seed=int(rng.integers(2**63)))
        js = joint_diagonalize(tup)
        b = _random_hermitian(n, rng)
        for name in experiment_function_names(d):
            f = builtin_function(name, d)
            _, _, res = perturbation_residual(js, f, f.lipschitz, b)
            worst = max(worst, res)
    return worst


def divided_difference_bound_residual(seed, instances=6):
    """max over sampled pairs of |f_k| - L (should be <= 0 up to float)."""
    worst = -np.inf
    for i in range(instances):
        rng = generator(seed, 0x65, i)
        d = 1 + (i % 3)
        f = builtin_function(experiment_function_names(d)[i % 6], d)
        pts = rng.uniform(-2, 2, size=(40, d))
        for k in range(1, d + 1):
            fk = divided_difference_symbol(f, k, d)
            for a in pts[:20]:
                for b in pts[20:]:
                    worst = max(worst, abs(fk.func(a, b)) - f.lipschitz)
    return max(worst, 0.0)


def doi_multiplicativity_residual(seed, instances=4):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x66, i)
        n, d = int(rng.integers(2, 9)), int(rng.integers(1, 3))
        tup, _, _ = planted_commuting_tuple(n, d, "uniform", seed=int(rng.integers(2**63)))
        js = joint_diagonalize(tup)
        xi1 = divided_difference_symbol(builtin_function("euclid-norm", d), 1, d)
        xi2 = divided_difference_symbol(builtin_function("crease", d), 1, d)
        v = _random_matrix(n, rng)
        worst = max(worst, symbol_product_check(js, xi1, xi2, v))
    return worst


# ---------------------------------------------------------------------------
# normlab checks


def quasi_triangle_margin(seed, instances=200):
    """max of weak(X+Y) - 2 weak(X) - 2 weak(Y), clipped at 0."""
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x71, i)
        n = int(rng.integers(1, 9))
        x, y = _random_matrix(n, rng), _random_matrix(n, rng)
        gap = matrix_weak_l1(x + y) - 2.0 * matrix_weak_l1(x) - 2.0 * matrix_weak_l1(y)
        worst = max(worst, gap)
    return max(worst, 0.0)


def mu_subadditivity_margin(seed, instances=200):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x72, i)
        n = int(rng.integers(1, 9))
        x, y = _random_matrix(n, rng), _random_matrix(n, rng)
        px, py = singular_values(x), singular_values(y)
        pxy = singular_values(x + y)
        t, s = float(rng.uniform(0, n)), float(rng.uniform(0, n))
        worst = max(worst, mu_at(pxy, t + s) - mu_at(px, t) - mu_at(py, s))
    return max(worst, 0.0)


def tensor_kron_residual(seed, instances=10, max_n=6):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x73, i)
        n1, n2 = int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_n + 1))
        a, b = _random_matrix(n1, rng), _random_matrix(n2, rng)
        direct = tensor_profile(singular_values(a), singular_values(b))
        kron = singular_values(np.kron(a, b))
        worst = max(worst, float(np.max(np.abs(direct.values - kron.values)))
                    / (1.0 + float(kron.values[0])))
    return worst


def tensor_weak_bound_margin(seed, instances=10, max_n=6):
    """max of ||A (x) B||_{1,inf} - ||A||_1 ||B||_{1,inf}, clipped at 0."""
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x74, i)
        n1, n2 = int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_n + 1))
        a, b = _random_matrix(n1, rng), _random_matrix(n2, rng)
        lhs = weak_l1(tensor_profile(singular_values(a), singular_values(b)))
        rhs = matrix_trace_norm(a) * matrix_weak_l1(b)
        worst = max(worst, lhs - rhs)
    return max(worst, 0.0)


def weak_dominated_margin(seed, instances=200):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x75, i)
        n = int(rng.integers(1, 12))
        vals = np.abs(rng.standard_normal(n))
        wts = rng.uniform(0.1, 2.0, size=n)
        p = profile_from_values(vals, wts)
        worst = max(worst, weak_l1(p) - schatten_norm(p, 1))
    return max(worst, 0.0)


def weak_homogeneity_residual(seed, instances=100):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x76, i)
        n = int(rng.integers(1, 12))
        p = profile_from_values(np.abs(rng.standard_normal(n)),
                                rng.uniform(0.1, 2.0, size=n))
        c = float(rng.uniform(0.1, 10.0))
        worst = max(worst, abs(weak_l1(p.scaled(c)) - c * weak_l1(p))
                    / (1.0 + c * weak_l1(p)))
    return worst


# ---------------------------------------------------------------------------
# torus-multiplier checks


def plancherel_residual(seed, instances=4):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x81, i)
        d_torus = 1 + (i % 2)
        n_grid = 8 * (1 + (i % 2))
        w = TorusSignal(
            rng.standard_normal((n_grid,) * d_torus + (2, 2))
            + 1j * rng.standard_normal((n_grid,) * d_torus + (2, 2))
        )
        _, l2, _ = signal_norms(w)
        coeff_l2 = TWO_PI ** (d_torus / 2.0) * float(np.linalg.norm(coefficients(w)))
        worst = max(worst, _rel(abs(l2 - coeff_l2), abs(coeff_l2)))
    return worst


def multiplier_composition_residual(seed, instances=4):
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x82, i)
        d_torus = 1 + (i % 2)
        n_grid = 8
        w = TorusSignal(
            rng.standard_normal((n_grid,) * d_torus + (2, 2))
            + 1j * rng.standard_normal((n_grid,) * d_torus + (2, 2))
        )
        m1 = lambda k: 1.0 / (1.0 + float(np.sum(np.asarray(k) ** 2)))
        m2 = lambda k: float(np.cos(float(np.sum(k))))
        m12 = lambda k: m1(k) * m2(k)
        lhs = fourier_multiplier_apply(m2, fourier_multiplier_apply(m1, w))
        rhs = fourier_multiplier_apply(m12, w)
        worst = max(worst, _rel(np.linalg.norm(lhs.samples - rhs.samples),
                                np.linalg.norm(rhs.samples)))
    return worst


def l2_contraction_margin(seed, instances=4):
    """Multipliers of sup-norm <= 1 do not increase the L2 norm."""
    worst = 0.0
    g = HomogeneousSymbol(d=1, k0=1)
    for i in range(instances):
        rng = generator(seed, 0x83, i)
        n_grid = 16
        w = TorusSignal(
            rng.standard_normal((n_grid, n_grid, 2, 2))
            + 1j * rng.standard_normal((n_grid, n_grid, 2, 2))
        )
        freqs = frequencies(n_grid)
        mesh = np.stack(np.meshgrid(freqs, freqs, indexing="ij"), axis=-1)
        gvals = symbol_eval(g, mesh.reshape(-1, 2).astype(float))
        sup = max(float(np.max(np.abs(gvals))), 1e-300)
        bounded = lambda k: symbol_eval(g, np.asarray(k, float)) / sup
        _, before, _ = signal_norms(w)
        _, after, _ = signal_norms(fourier_multiplier_apply(bounded, w))
        worst = max(worst, (after - before) / (1.0 + before))
    return max(worst, 0.0)


def fejer_brute(w: TorusSignal, order: int) -> TorusSignal:
    """Average of the rectangular partial sums, computed literally."""
    coeffs = coefficients(w)
    d_torus = w.torus_dim
    freqs = frequencies(w.grid_size)
    acc = np.zeros_like(coeffs)
    for k in np.ndindex(*((order + 1,) * d_torus)):
        mask = np.ones((w.grid_size,) * d_torus, dtype=bool)
        for axis, kj in enumerate(k):
            shape = [1] * d_torus
            shape[axis] = w.grid_size
            mask &= (np.abs(freqs) <= kj).reshape(shape)
        acc += coeffs * mask[..., np.newaxis, np.newaxis]
    return signal_from_coefficients(acc / (order + 1) ** d_torus)


def fejer_bruteforce_residual(seed, orders=(0, 1, 2, 3), grid=8, fiber=2):
    worst = 0.0
    for d_torus in (1, 2):
        rng = generator(seed, 0x84, d_torus)
        w = TorusSignal(
            rng.standard_normal((grid,) * d_torus + (fiber, fiber))
            + 1j * rng.standard_normal((grid,) * d_torus + (fiber, fiber))
        )
        for order in orders:
            closed = fejer(w, order)
            brute = fejer_brute(w, order)
            worst = max(
                worst,
                float(np.max(np.abs(coefficients(closed) - coefficients(brute)))),
            )
    return worst


def fejer_convergence_profile(d_torus=1, amplitude=0.04, orders=(1, 3, 10, 25, 50, 57, 100)):
    """(order, ||A_n W - W||_1 / ||W||_1) for the fixed degree-1 test signal.

    The signal is 1 + amplitude*cos(t_1): its oscillatory mass is small
    relative to its mean, which is what makes the 1e-3 threshold at n = 50x
    degree attainable (the deficiency of a degree-m coefficient is exactly
    m/(n+1) per axis).
    """
    n_grid = 16
    coeffs = np.zeros((n_grid,) * d_torus + (1, 1), dtype=complex)
    coeffs[frequency_index(np.zeros(d_torus, int), n_grid)] = 1.0
    plus = np.zeros(d_torus, int)
    plus[0] = 1
    coeffs[frequency_index(plus, n_grid)] = amplitude / 2.0
    coeffs[frequency_index(-plus, n_grid)] = amplitude / 2.0
    w = signal_from_coefficients(coeffs)
    base_l1 = signal_norms(w)[0]
    out = []
    for order in orders:
        diff = fejer(w, order).samples - w.samples
        out.append((order, signal_norms(TorusSignal(diff))[0] / base_l1))
    return out


def deleeuw_ratios(seed, sizes=(32, 64, 128), signals=10, d=1, fiber=2,
                   freq_radius=4, freq_count=4):
    """weak-L1(g(grad)W)/L1(W) for a fixed signal family across grid sizes."""
    d_torus = d + 1
    g = HomogeneousSymbol(d=d, k0=1)
    rng = generator(seed, 0x85)
    family = []
    for _ in range(signals):
        terms = []
        while len(terms) < freq_count:
            k = rng.integers(-freq_radius, freq_radius + 1, size=d_torus)
            if np.any(k != 0):
                fib = rng.standard_normal((fiber, fiber)) + 1j * rng.standard_normal(
                    (fiber, fiber)
                )
                terms.append((k.copy(), fib))
        family.append(terms)
    results = []
    for terms in family:
        ratios = {}
        for n_grid in sizes:
            coeffs = np.zeros((n_grid,) * d_torus + (fiber, fiber), dtype=complex)
            for k, fib in terms:
                coeffs[frequency_index(k, n_grid)] += fib
            w = signal_from_coefficients(coeffs)
            l1 = signal_norms(w)[0]
            weak = signal_norms(fourier_multiplier_apply(g, w))[2]
            ratios[n_grid] = weak / l1
        results.append(ratios)
    return results


def deleeuw_stability_factor(seed, sizes=(32, 64, 128), signals=10, d=1):
    """Largest max/min ratio spread over the family (should stay below 2)."""
    worst = 1.0
    for ratios in deleeuw_ratios(seed, sizes, signals, d):
        vals = list(ratios.values())
        if min(vals) > 0:
            worst = max(worst, max(vals) / min(vals))
    return worst


# ---------------------------------------------------------------------------
# transference checks


def conjugation_instances(seed, count):
    """Seeded instances (IntegerTuple, integer contraction, V, k0), d <= 2, n <= 8."""
    out = []
    rng = generator(seed, 0x91)
    for i in range(count):
        d = 1 + (i % 2)
        n = int(rng.integers(2, 9))
        tup, _, _ = planted_commuting_tuple(
            n, d, "integer:5", seed=int(rng.integers(2**63))
        )
        it = integer_tuple(tup)
        kind = i % 4
        if kind == 0:
            base = builtin_function("max-abs", d)
            h = lambda iv, b=base: int(round(b(np.asarray(iv, float))))
            name = "max-abs"
        elif kind == 1:
            h = round_contraction(builtin_function("euclid-norm", d), 2 + 2 * (i % 3))
            name = "round(euclid-norm)"
        elif kind == 2:
            h = round_contraction(builtin_function("crease", d), 1 + (i % 4))
            name = "round(crease)"
        else:
            h = lambda iv: int(iv[0])
            name = "coordinate:1"
        v = _random_matrix(n, rng)
        k0 = 1 + int(rng.integers(0, d))
        out.append((it, h, name, v, k0))
    return out


def conjugation_sweep(seed, count=10, grid_size=64):
    worst = 0.0
    for it, h, _, v, k0 in conjugation_instances(seed, count):
        worst = max(worst, verify_conjugation(it, h, v, grid_size, k0))
    return worst


def isometry_residual(seed, instances=3):
    """L1 and weak-L1 of I(V) equal (2 pi)^(d+1) times those of V."""
    worst = 0.0
    for i in range(instances):
        rng = generator(seed, 0x92, i)
        d = 1 + (i % 2)
        n = int(rng.integers(2, 5))
        tup, _, _ = planted_commuting_tuple(
            n, d, "integer:3", seed=int(rng.integers(2**63))
        )
        it = integer_tuple(tup)
        h = round_contraction(builtin_function("euclid-norm", d), 4)
        v = _random_matrix(n, rng)
        w = build_embedding(it, h, v, 32)
        l1, _, weak = signal_norms(w)
        factor = TWO_PI ** (d + 1)
        worst = max(worst, _rel(abs(l1 - factor * matrix_trace_norm(v)),
                                factor * matrix_trace_norm(v)))
        worst = max(worst, _rel(abs(weak - factor * matrix_weak_l1(v)),
                                factor * matrix_weak_l1(v)))
    return worst


def contraction_rounding_sweep(d_values=(1, 2), radius=10, n_values=range(1, 9),
                               names=None):
    """Number of contraction violations over built-in functions and roundings."""
    violations = 0
    checked = 0
    for d in d_values:
        for name in (names or contraction_names(d)):
            f = builtin_function(name, d)
            for n in n_values:
                h = round_contraction(f, n)
                report = contraction_check(h, radius, d, report_margin=False)
                checked += 1
                if not report.ok:
                    violations += 1
    return violations, checked


def symbol_agreement_sweep(d_values=(1, 2), radius=10, n_values=range(1, 9),
                           names=None, block=4_000_000):
    """max |g(i-j, h(i)-h(j)) - h_k0(i, j)| over lattice box pairs.

    The left side travels through the normalized homogeneous symbol with its
    smoothing function; the right side is the divided difference evaluated on
    the lattice.  Both sides depend only on the pair difference (delta, m), so
    the deviation is tabulated once on that superset and gathered over the
    realized pairs of each rounded contraction.
    """
    worst = 0.0
    for d in d_values:
        points = _box_points(radius, d)
        span = 2 * radius
        side = 2 * span + 1
        mmax = int(math.ceil(span * math.sqrt(d))) + 1
        mcard = 2 * mmax + 1

        axes = [np.arange(-span, span + 1)] * d
        delta_grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        m_grid = np.arange(-mmax, mmax + 1)
        tshape = delta_grid.shape[:-1] + (mcard,)
        tvecs = np.empty(tshape + (d + 1,))
        tvecs[..., :d] = delta_grid[..., None, :]
        tvecs[..., d] = m_grid
        denom = np.sum(delta_grid.astype(float) ** 2, axis=-1)
        mask = denom > 0
        dev_tables = []
        for k0 in range(1, d + 1):
            g = HomogeneousSymbol(d=d, k0=k0)
            gv = symbol_eval(g, tvecs.reshape(-1, d + 1)).reshape(tshape)
            dd = np.zeros(tshape)
            dd[mask] = (
                delta_grid[..., k0 - 1][mask][:, None] * m_grid
            ) / denom[mask][:, None]
            dev_tables.append(np.abs(gv - dd).ravel())

        base = np.zeros((points.shape[0],) * 2, dtype=np.int64)
        stride = mcard
        for axis in range(d - 1, -1, -1):
            col = points[:, axis]
            base += ((col[:, None] - col[None, :]) + span) * stride
            stride *= side

        for name in (names or contraction_names(d)):
            f = builtin_function(name, d)
            for n in n_values:
                h = round_contraction(f, n)
                values = np.array([h(p) for p in points], dtype=np.int64)
                dh = values[:, None] - values[None, :]
                if np.max(np.abs(dh)) > mmax:
                    raise ValueError(
                        f"{name} rounded at n={n} moves farther than a contraction"
                    )
                idx = (base + (dh + mmax)).ravel()
                for table in dev_tables:
                    for start in range(0, idx.size, block):
                        worst = max(
                            worst, float(np.max(table[idx[start:start + block]]))
                        )
    return worst


# ---------------------------------------------------------------------------
# experiments checks


def experiments_determinism_residual(seed):
    """Identical configs must produce identical record streams."""
    from .experiments import ExperimentConfig, commutator_ratio

    config = ExperimentConfig(seed=seed, n=4, d=2, trials=4, f_name="crease")
    a = commutator_ratio(config)
    b = commutator_ratio(config)
    same = all(
        ra.kind == rb.kind and ra.instance == rb.instance and ra.ratio == rb.ratio
        for ra, rb in zip(a, b)
    ) and len(a) == len(b)
    return 0.0 if same else 1.0


def experiments_summary_margin(seed):
    """Summary max-ratio dominates per-trial ratios; skips are counted."""
    from .experiments import ExperimentConfig, commutator_ratio

    records = commutator_ratio(
        ExperimentConfig(seed=seed, n=5, d=1, trials=6, f_name="euclid-norm")
    )
    summary = records[-1]
    worst = max(
        (r.ratio - summary.ratio for r in records if r.kind == "trial"),
        default=0.0,
    )
    degenerate = commutator_ratio(
        ExperimentConfig(seed=seed, n=1, d=1, trials=3, f_name="identity")
    )
    if degenerate[-1].skipped != 3:
        worst = max(worst, 1.0)
    return max(worst, 0.0)


# ---------------------------------------------------------------------------
# report assembly


def run_identity_suite(seed: int, tolerance_scale: float = 1.0) -> dict:
    """Execute every cross-module identity/property with the given seed.

    ``tolerance_scale`` multiplies every tolerance; it exists as a test hook
    (a corrupted scale must flip the exit status).  The report contains no
    wall-clock data, so identical inputs produce byte-identical reports.
    """
    checks = []

    def add(name, residual, tolerance, details=""):
        tol = tolerance * tolerance_scale
        checks.append(
            CheckResult(name, bool(residual <= tol), float(residual), float(tol),
                        details)
        )

    add("spectral.roundtrip", roundtrip_residual(seed), 1e-8)
    add("spectral.calculus-morphism", morphism_residual(seed), 1e-9)
    add("spectral.calculus-commutes", calculus_commutation_residual(seed), 1e-9)
    add("spectral.sort-determinism", sort_determinism_residual(seed), 0.0,
        "bitwise-identical spectra on repeated calls")
    add("doi.linearity", doi_linearity_residual(seed), 1e-12)
    add("doi.self-adjoint", doi_self_adjoint_residual(seed), 1e-10)
    add("doi.l2-norm-oracle", doi_l2_oracle_residual(seed), 1e-10)
    add("doi.perturbation-identity", perturbation_sweep(seed, instances=12), 1e-9)
    add("doi.divided-difference-bound", divided_difference_bound_residual(seed), 1e-12)
    add("doi.multiplicativity", doi_multiplicativity_residual(seed), 1e-12)
    add("norms.quasi-triangle", quasi_triangle_margin(seed, instances=100), 1e-12)
    add("norms.mu-subadditivity", mu_subadditivity_margin(seed, instances=100), 1e-12)
    add("norms.tensor-kron", tensor_kron_residual(seed), 1e-10)
    add("norms.tensor-weak-bound", tensor_weak_bound_margin(seed), 1e-12)
    add("norms.weak-le-l1", weak_dominated_margin(seed, instances=100), 1e-12)
    add("norms.weak-homogeneity", weak_homogeneity_residual(seed, instances=50), 1e-12)
    add("torus.plancherel", plancherel_residual(seed), 1e-10)
    add("torus.multiplier-composition", multiplier_composition_residual(seed), 1e-12)
    add("torus.l2-contraction", l2_contraction_margin(seed), 1e-12)
    add("torus.fejer-bruteforce", fejer_bruteforce_residual(seed), 1e-14)
    profile = fejer_convergence_profile()
    tail = max(r for order, r in profile if order >= 50)
    add("torus.fejer-convergence", tail, 1e-3,
        "relative L1 deficiency of the Fejer mean at n >= 50x degree")
    add("torus.deleeuw-stability", deleeuw_stability_factor(seed, signals=4), 2.0,
        "max/min spread of weak-L1/L1 ratios across grid doublings")
    add("transference.conjugation", conjugation_sweep(seed, count=8), 1e-9)
    add("transference.isometry", isometry_residual(seed), 1e-10)
    violations, checked = contraction_rounding_sweep(radius=10)
    add("transference.contraction-rounding", float(violations), 0.0,
        f"exhaustive box checks over {checked} rounded contractions")
    add("transference.symbol-agreement", symbol_agreement_sweep(radius=10), 1e-12)
    add("experiments.determinism", experiments_determinism_residual(seed), 0.0,
        "identical configs produce identical record streams")
    add("experiments.summary-accounting", experiments_summary_margin(seed), 0.0,
        "summary dominates trial ratios; degenerate trials are counted")

    return {
        "suite": "oplip-identity-suite",
        "version": 1,
        "seed": int(seed),
        "tolerance_scale": float(tolerance_scale),
        "all_passed": all(c.passed for c in checks),
        "checks": [
            {
                "name": c.name,
                "passed": c.passed,
                "residual": c.residual,
                "tolerance": c.tolerance,
                "details": c.details,
            }
            for c in checks
        ],
    }
