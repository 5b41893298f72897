"""Variational eigenpair solvers on the discrete energy landscape.

Three mechanisms produce certified eigenpairs: constrained minimization of
I_lambda over a gradient-energy ball (sub-homogeneous regime), maximization
of F over a sphere (its first-eigenvalue dual), and a path-deformation
saddle search between the origin and a negative-energy endpoint
(super-homogeneous regime).  Each accepted pair carries the relative
residual of the weak eigenpair identity as its certificate.
"""

from __future__ import annotations

import dataclasses
import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .functionals import (
    EnergySnapshot,
    ProblemData,
    _first_mode,
    _grad_profile,
    _mass_profile,
    _profile_scale,
    _sphere_scale,
    alpha_independent_threshold,
    energies,
    grad_F,
    grad_G,
    is_superlinear,
    lambda_alpha,
    residual,
    window_alpha,
)
from .mesh import gradient, gradient_magnitude
from .spaces import luxemburg_norm

__all__ = [
    "SolverConfig",
    "EigenPair",
    "SweepRow",
    "SweepReport",
    "BALL_MIN",
    "SPHERE_MAX",
    "MOUNTAIN_PASS",
    "project_to_sphere",
    "mode_seed",
    "bump_seed",
    "solve_sublinear",
    "solve_sphere_max",
    "solve_mountain_pass",
    "spectrum_sweep",
    "eigenfamily",
    "rescale_constant_exponent",
]

BALL_MIN = "ball_min"
SPHERE_MAX = "sphere_max"
MOUNTAIN_PASS = "mountain_pass"


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 20000
    grad_tol: float = 1e-6
    step0: float = 1.0
    backtrack: float = 0.5
    armijo: float = 1e-4
    path_nodes: int = 21
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.grad_tol <= 0 or self.step0 <= 0:
            raise ValueError("grad_tol and step0 must be positive")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtrack must lie in (0, 1)")
        if not 0.0 < self.armijo < 1.0:
            raise ValueError("armijo must lie in (0, 1)")
        if self.path_nodes < 5:
            raise ValueError("path_nodes must be at least 5")


@dataclass(frozen=True)
class EigenPair:
    lam: float
    u: np.ndarray
    residual: float
    snapshot: EnergySnapshot
    mechanism: str
    converged: bool
    iterations: int
    alpha: float


@dataclass(frozen=True)
class SweepRow:
    lam: float
    residual: float
    u_norm: float
    I_value: float
    iterations: int
    mechanism: str
    converged: bool
    alpha: float


@dataclass(frozen=True)
class SweepReport:
    rows: list
    pairs: list = field(repr=False, default_factory=list)

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.rows)


def project_to_sphere(u, pd: ProblemData, alpha: float, tol: float = 1e-10):
    """Return (t, t*u) with G(t*u) = alpha within tol."""
    u = np.asarray(u, dtype=float)
    t = _sphere_scale(u, pd, alpha, tol)
    return t, t * u


def mode_seed(pd: ProblemData, k=1) -> np.ndarray:
    """Separable sine mode; k is the first-axis frequency or one per axis.

    Each axis factor is explicitly (anti)symmetrized, so grid reflections
    map the seed to exactly plus or minus itself in floating point.
    Elementwise descent updates preserve that parity bit for bit, which
    pins a family run to its own symmetry class on symmetric problem data.
    """
    grid = pd.grid
    if np.isscalar(k):
        freqs = (int(k),) + (1,) * (grid.dim - 1)
    else:
        freqs = tuple(int(m) for m in k)
    if len(freqs) != grid.dim or any(m < 1 for m in freqs):
        raise ValueError("mode frequencies must be positive, one per axis")
    u = np.ones(grid.shape)
    for axis, m in enumerate(freqs):
        f = np.sin(m * np.pi * np.linspace(0.0, 1.0, grid.extents[axis]))
        f = 0.5 * (f + f[::-1]) if m % 2 else 0.5 * (f - f[::-1])
        shape = [1] * grid.dim
        shape[axis] = f.size
        u = u * f.reshape(shape)
    u[grid.boundary_mask] = 0.0
    return u


def _mode_tuples(dim: int, count: int) -> list:
    """First `count` per-axis frequency tuples, ordered by total frequency."""
    top = count + 1
    cands = sorted(itertools.product(range(1, top), repeat=dim), key=lambda t: (sum(t), t))
    return cands[:count]


def bump_seed(pd: ProblemData, center: float, width: float) -> np.ndarray:
    """Tent bump at a fractional position along the first axis.

    Localized seeds let a family run explore separate energy wells; the
    remaining axes carry a first sine mode so the bump vanishes on the
    whole boundary.
    """
    if not 0.0 < center < 1.0 or width <= 0.0:
        raise ValueError("bump seed needs 0 < center < 1 and width > 0")
    grid = pd.grid
    coords = grid.node_coordinates()
    x = coords[0] / grid.lengths[0]
    u = np.maximum(0.0, 1.0 - np.abs(x - center) / width)
    for axis in range(1, grid.dim):
        u = u * np.sin(np.pi * coords[axis] / grid.lengths[axis])
    u = u.copy()
    u[grid.boundary_mask] = 0.0
    return u


def _x_norm(u, pd: ProblemData) -> float:
    gm = gradient_magnitude(gradient(u, pd.grid))
    return luxemburg_norm(gm, pd.p, pd.grid.cell_volume).norm


def _pair(u, pd, lam, mechanism, converged, iterations, alpha, grad_tol=None) -> EigenPair:
    if mechanism in (BALL_MIN, MOUNTAIN_PASS):
        # lam is imposed here (not a level ratio), so land exactly on the
        # ray crossing to close the v = u identity psi = lam * phi
        try:
            wg = _grad_profile(u, pd)
            wm = _mass_profile(u, pd)
            u = _ray_crossing(wg, wm, pd, lam) * u
        except ValueError:
            pass
    res = residual(u, pd, lam)
    # the rescale above can carry a stalled iterate below tolerance; the
    # certificate is the final defect, so the flag follows it
    if grad_tol is not None and res <= grad_tol:
        converged = True
    return EigenPair(
        float(lam),
        u,
        res,
        energies(u, pd, lam),
        mechanism,
        bool(converged),
        int(iterations),
        float(alpha),
    )


def _negative_seed(pd: ProblemData, alpha: float, lam: float, v0=None) -> np.ndarray:
    """Start at the ray minimum of I_lambda through the seed, inside the ball.

    Seeding at the deepest point of the ray keeps localized seeds inside
    their own energy well; a small-amplitude start would crawl for
    thousands of iterations and could drift into a neighbouring well.
    """
    w = _first_mode(pd.grid) if v0 is None else np.asarray(v0, dtype=float)
    if not np.any(w):
        raise ValueError("seed function is identically zero")
    wg = _grad_profile(w, pd)
    wm = _mass_profile(w, pd)
    try:
        t = _ray_crossing(wg, wm, pd, lam)
    except ValueError:
        t = _sphere_scale(w, pd, 0.5 * alpha)
    t = min(t, _profile_scale(wg, pd, alpha))
    for _ in range(200):
        if energies(t * w, pd, lam).I_lambda < 0.0:
            return t * w
        t *= 0.5
    raise ValueError("no negative-energy seed found; regime looks non-sublinear")


def _bb_step(du: np.ndarray, dg: np.ndarray, fallback: float) -> float:
    """Spectral step length, clipped to a safe positive range."""
    denom = float(np.vdot(dg, dg))
    if denom <= 0.0:
        return fallback
    step = float(np.vdot(du, dg)) / denom
    if not np.isfinite(step) or step <= 0.0:
        return fallback
    return min(max(step, 1e-16), 1e12)


def solve_sublinear(
    pd: ProblemData,
    alpha: float,
    lam: float,
    cfg: SolverConfig,
    *,
    v0=None,
) -> EigenPair:
    """Minimize I_lambda over the ball G <= alpha by projected descent.

    The descent is monotone in I_lambda (Armijo backtracking; iterates that
    leave the ball are rescaled onto the sphere before the test), and the
    accepted minimizer is an interior critical point whenever lam sits
    inside the certified window.
    """
    if not pd.q.lo < pd.p.lo:
        raise ValueError("ball minimization needs inf q < inf p")
    if alpha <= 0 or lam <= 0:
        raise ValueError("alpha and lam must be positive")
    if lam >= lambda_alpha(pd, alpha):
        warnings.warn(
            "lam sits at or above the certified window; attempting anyway",
            RuntimeWarning,
            stacklevel=2,
        )

    u = _negative_seed(pd, alpha, lam, v0)
    i_val = energies(u, pd, lam).I_lambda
    gG = grad_G(u, pd)
    g = gG - lam * grad_F(u, pd)
    step = cfg.step0
    prev_u = prev_g = None
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        res = float(np.linalg.norm(g) / np.linalg.norm(gG))
        if res <= cfg.grad_tol:
            converged = True
            break
        if prev_u is not None:
            step = _bb_step(u - prev_u, g - prev_g, step)
        accepted = False
        s = step
        # moves beyond twice the iterate scale scramble localized iterates
        move_cap = 2.0 * float(np.linalg.norm(u))
        g_norm = float(np.linalg.norm(g))
        for _ in range(60):
            if s * g_norm > move_cap:
                s *= cfg.backtrack
                continue
            cand = u - s * g
            if not np.any(cand):
                s *= cfg.backtrack
                continue
            wg = _grad_profile(cand, pd)
            wm = _mass_profile(cand, pd)
            cand_g = float(np.sum(wg))
            if cand_g > alpha:
                t = _profile_scale(wg, pd, alpha)
                cand = t * cand
                cand_g = float(np.sum(wg * t**pd.p.values))
                cand_f = float(np.sum(wm * t**pd.q.values))
            else:
                cand_f = float(np.sum(wm))
            cand_i = cand_g - lam * cand_f
            decrease = float(np.vdot(g, cand - u))
            if cand_i <= i_val + cfg.armijo * decrease and cand_i < i_val:
                prev_u, prev_g = u, g
                u, i_val = cand, cand_i
                gG = grad_G(u, pd)
                g = gG - lam * grad_F(u, pd)
                accepted = True
                break
            s *= cfg.backtrack
        if not accepted:
            break

    return _pair(u, pd, lam, BALL_MIN, converged, iterations, alpha, cfg.grad_tol)


def solve_sphere_max(
    pd: ProblemData,
    alpha: float,
    cfg: SolverConfig,
    *,
    v0=None,
) -> EigenPair:
    """Maximize F on the sphere G = alpha by tangential ascent.

    The F sequence is nondecreasing (rollback on failed steps) and the
    accepted pair reports lam = psi/phi, the reciprocal of the first
    constrained level ratio; snapshot.F is that level.
    """
    if not pd.q.hi <= pd.p.lo:
        raise ValueError("sphere maximization needs sup q <= inf p")
    if alpha <= 0:
        raise ValueError("alpha must be positive")

    rng = np.random.default_rng(cfg.seed)
    if v0 is not None:
        u = np.asarray(v0, dtype=float).copy()
        u[pd.grid.boundary_mask] = 0.0
    else:
        u = rng.standard_normal(pd.grid.shape)
        u[pd.grid.boundary_mask] = 0.0
    for _ in range(8):
        if np.any(u):
            break
        u = rng.standard_normal(pd.grid.shape)
        u[pd.grid.boundary_mask] = 0.0
    u = _sphere_scale(u, pd, alpha) * u
    snap = energies(u, pd)
    gF = grad_F(u, pd)
    gG = grad_G(u, pd)
    f_val = snap.F

    step = cfg.step0
    prev_u = prev_d = None
    converged = False
    iterations = 0
    lam = np.nan
    for iterations in range(1, cfg.max_iters + 1):
        lam = snap.psi / snap.phi
        res = float(np.linalg.norm(gG - lam * gF) / np.linalg.norm(gG))
        if res <= cfg.grad_tol:
            converged = True
            break
        d = gF - (np.vdot(gF, gG) / np.vdot(gG, gG)) * gG
        if not np.any(d):
            # tangential gradient vanished on a non-critical start: reseed
            u = rng.standard_normal(pd.grid.shape)
            u[pd.grid.boundary_mask] = 0.0
            u = _sphere_scale(u, pd, alpha) * u
            snap = energies(u, pd)
            gF, gG, f_val = grad_F(u, pd), grad_G(u, pd), snap.F
            prev_u = prev_d = None
            continue
        if prev_u is not None:
            # spectral step for the ascent: y is the drop in ascent direction
            step = _bb_step(u - prev_u, prev_d - d, step)

        def ascend_at(s):
            raw = u + s * d
            if not np.any(raw):
                return None
            wg = _grad_profile(raw, pd)
            t = _profile_scale(wg, pd, alpha)
            cand_f = float(np.sum(_mass_profile(raw, pd) * t**pd.q.values))
            return (t * raw, cand_f) if cand_f > f_val else None

        hit = None
        s = step
        for _ in range(60):
            hit = ascend_at(s)
            if hit is not None:
                break
            s *= cfg.backtrack
        if hit is None:
            # the spectral step can land far below the useful range, where
            # every shrink is a float no-op on F, so probe upward as well
            s = step / cfg.backtrack
            for _ in range(60):
                hit = ascend_at(s)
                if hit is not None:
                    break
                s /= cfg.backtrack
        if hit is None:
            break
        prev_u, prev_d = u, d
        u, _ = hit
        snap = energies(u, pd)
        gF, gG, f_val = grad_F(u, pd), grad_G(u, pd), snap.F
        step = min(s * 1.5, 1e12)

    return _pair(u, pd, lam, SPHERE_MAX, converged, iterations, alpha, cfg.grad_tol)


def _ray_crossing(wg: np.ndarray, wm: np.ndarray, pd: ProblemData, lam: float) -> float:
    """Positive tau where the ray derivative of I_lambda changes sign.

    Works on the per-cell scale profiles: tau * dI/dtau equals
    sum(p*wg*tau^p) - lam*sum(q*wm*tau^q), which after division by
    tau^{sup p} (superlinear) or tau^{sup q} (sublinear) is strictly
    monotone, so the crossing is unique: the ray maximum in the first
    regime, the ray minimum in the second. Constant exponents admit a
    closed form.
    """
    a = pd.p.values * wg
    b = lam * pd.q.values * wm
    psi = float(np.sum(a))
    lam_phi = float(np.sum(b))
    if psi == 0.0 or lam_phi == 0.0:
        raise ValueError("ray crossing undefined: an energy term vanished")
    if pd.p.is_constant and pd.q.is_constant:
        return float((psi / lam_phi) ** (1.0 / (pd.q.lo - pd.p.lo)))
    if pd.q.lo >= pd.p.hi:
        sgn = 1.0
    elif pd.q.hi <= pd.p.lo:
        sgn = -1.0
    else:
        raise ValueError("ray crossing needs exponents ordered on every cell")
    pv, qv = pd.p.values, pd.q.values

    def h(tau):
        return sgn * float(np.sum(a * tau**pv) - np.sum(b * tau**qv))

    guard = 0
    if h(1.0) > 0.0:
        hi = 2.0
        while h(hi) > 0.0:
            hi *= 2.0
            guard += 1
            if guard > 4096:
                raise ValueError("ray crossing failed to bracket from above")
        lo = hi / 2.0
    else:
        lo = 0.5
        while h(lo) <= 0.0:
            lo *= 0.5
            guard += 1
            if guard > 4096:
                raise ValueError("ray crossing failed to bracket from below")
        hi = lo * 2.0
    while hi - lo > 1e-14 * hi:
        mid = 0.5 * (lo + hi)
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _ray_max_descent(pd: ProblemData, lam: float, u0, alpha: float, cfg: SolverConfig, budget: int):
    """Minimize the ray-maximum of I_lambda over directions on M_alpha.

    The objective u -> max_tau I_lambda(tau*u) is invariant along rays, so
    re-projection onto the sphere never changes it; its minimizer's crossing
    point is a critical point of I_lambda at the lowest ridge level, which
    is exactly where a connecting path must top out.
    """
    u = _sphere_scale(u0, pd, alpha) * u0
    wg, wm = _grad_profile(u, pd), _mass_profile(u, pd)
    tau = _ray_crossing(wg, wm, pd, lam)
    val = float(np.sum(wg * tau**pd.p.values) - lam * np.sum(wm * tau**pd.q.values))

    def grad_at(u_cur, tau_cur):
        w = tau_cur * u_cur
        gG = grad_G(w, pd)
        g = tau_cur * (gG - lam * grad_F(w, pd))
        return g, float(np.linalg.norm(g) / (tau_cur * np.linalg.norm(gG)))

    g, res = grad_at(u, tau)
    step = cfg.step0
    prev_u = prev_g = None
    used = 0
    while used < budget and res > cfg.grad_tol:
        used += 1
        if prev_u is not None:
            step = _bb_step(u - prev_u, g - prev_g, step)

        def descend_at(s):
            raw = u - s * g
            if not np.any(raw):
                return None
            wg_r = _grad_profile(raw, pd)
            wm_r = _mass_profile(raw, pd)
            tau_r = _ray_crossing(wg_r, wm_r, pd, lam)
            cand_val = float(
                np.sum(wg_r * tau_r**pd.p.values) - lam * np.sum(wm_r * tau_r**pd.q.values)
            )
            decrease = float(np.vdot(g, raw - u))
            if cand_val <= val + cfg.armijo * decrease and cand_val < val:
                return raw, wg_r, tau_r, cand_val
            return None

        hit = None
        s = step
        for _ in range(60):
            hit = descend_at(s)
            if hit is not None:
                break
            s *= cfg.backtrack
        if hit is None:
            s = step / cfg.backtrack
            for _ in range(60):
                hit = descend_at(s)
                if hit is not None:
                    break
                s /= cfg.backtrack
        if hit is None:
            break
        raw, wg_r, tau_r, val = hit
        scale = _profile_scale(wg_r, pd, alpha)
        prev_u, prev_g = u, g
        u = scale * raw
        tau = tau_r / scale
        g, res = grad_at(u, tau)
        step = min(s * 1.5, 1e12)
    return u, tau, res, used


def _respace(path: np.ndarray) -> np.ndarray:
    """Redistribute path nodes to equal arclength in the nodal metric."""
    k = path.shape[0]
    flat = path.reshape(k, -1)
    seg = np.linalg.norm(np.diff(flat, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    if arc[-1] == 0.0:
        return path
    targets = np.linspace(0.0, arc[-1], k)
    out = np.empty_like(flat)
    for j in range(flat.shape[1]):
        out[:, j] = np.interp(targets, arc, flat[:, j])
    out[0] = flat[0]
    out[-1] = flat[-1]
    return out.reshape(path.shape)


def solve_mountain_pass(
    pd: ProblemData,
    alpha: float,
    lam: float,
    cfg: SolverConfig,
    *,
    v0=None,
) -> EigenPair:
    """Deform a discrete path from 0 to a negative-energy endpoint.

    The seed direction is first descended to the lowest ridge crossing (the
    infimum over rays of the along-ray maximum of I_lambda), so the initial
    path already tops out on the ridge.  The maximal-energy interior node is
    then repeatedly relocated along the descent direction of I_lambda (ties
    broken toward the lowest index), with an equal-arclength respacing every
    10 relocations.  If the maximum collapses onto an endpoint the path is
    re-discretized with twice the nodes, at most three times.
    """
    if not is_superlinear(pd):
        raise ValueError("path deformation needs p(x) < q(x) on every cell")
    if pd.q.lo < pd.p.hi:
        raise ValueError("path deformation needs inf q >= sup p")
    if alpha <= 0 or lam <= 0:
        raise ValueError("alpha and lam must be positive")
    if lam >= lambda_alpha(pd, alpha):
        warnings.warn(
            "lam sits at or above the certified window; attempting anyway",
            RuntimeWarning,
            stacklevel=2,
        )

    w0 = _first_mode(pd.grid) if v0 is None else np.asarray(v0, dtype=float)
    if not np.any(w0):
        raise ValueError("seed function is identically zero")
    # phase one: descend the seed direction to the lowest ridge crossing, so
    # the discretized path below tops out where a certifiable crest lives
    w, tau, _, iterations = _ray_max_descent(pd, lam, w0, alpha, cfg, cfg.max_iters)

    t = 1.0
    guard = 0
    while energies(t * w, pd, lam).I_lambda >= 0.0:
        t *= 2.0
        guard += 1
        if guard > 200:
            raise ValueError("no negative-energy endpoint found; window looks wrong")
    e1 = t * w
    crest = tau / t

    def make_path(k):
        weights = np.linspace(0.0, 1.0, k).reshape((k,) + (1,) * pd.grid.dim)
        new_path = weights * e1[None, ...]
        j = min(max(int(round(crest * (k - 1))), 1), k - 2)
        new_path[j] = tau * w
        return new_path

    n_nodes = cfg.path_nodes
    path = make_path(n_nodes)
    i_vals = np.array([energies(node, pd, lam).I_lambda for node in path])

    def refresh(new_path):
        vals = np.array([energies(node, pd, lam).I_lambda for node in new_path])
        return new_path, vals

    converged = False
    redisc = 0
    relocations = 0
    misses = 0

    while iterations < cfg.max_iters and not converged:
        m = int(np.argmax(i_vals))
        if m == 0 or m == n_nodes - 1:
            if redisc >= 3:
                break
            redisc += 1
            n_nodes *= 2
            path, i_vals = refresh(make_path(n_nodes))
            continue

        # relocate the crest node: descend along -grad I_lambda (spectral
        # steps with backtracking) for as long as it stays the path maximum
        u = path[m]
        step = cfg.step0
        prev_u = prev_g = None
        moved = False
        others = np.delete(i_vals, m)
        ceiling = float(others.max())
        while iterations < cfg.max_iters:
            gG = grad_G(u, pd)
            g = gG - lam * grad_F(u, pd)
            res = float(np.linalg.norm(g) / np.linalg.norm(gG))
            if res <= cfg.grad_tol:
                converged = True
                break
            if prev_u is not None:
                step = _bb_step(u - prev_u, g - prev_g, step)
            slope = float(np.vdot(g, g))
            i_here = i_vals[m]

            def relocate_at(s):
                cand = u - s * g
                cand_i = energies(cand, pd, lam).I_lambda
                if cand_i < i_here - cfg.armijo * s * slope:
                    return cand, cand_i
                return None

            hit = None
            s = step
            for _ in range(60):
                hit = relocate_at(s)
                if hit is not None:
                    break
                s *= cfg.backtrack
            if hit is None:
                s = step / cfg.backtrack
                for _ in range(60):
                    hit = relocate_at(s)
                    if hit is not None:
                        break
                    s /= cfg.backtrack
            iterations += 1
            if hit is None:
                break
            prev_u, prev_g = u, g
            u, i_new = hit
            path[m], i_vals[m] = u, i_new
            step = min(s * 1.5, 1e12)
            moved = True
            if i_new < ceiling:
                break
        if converged:
            break
        if not moved:
            # crest node is at its float floor: reshuffle once via respacing
            misses += 1
            if misses >= 2:
                break
            path, i_vals = refresh(_respace(path))
            continue
        misses = 0
        relocations += 1
        if relocations % 10 == 0:
            path, i_vals = refresh(_respace(path))

    m = int(np.argmax(i_vals))
    if m == 0 or m == n_nodes - 1:
        m = int(np.argmax(i_vals[1:-1])) + 1
    return _pair(path[m], pd, lam, MOUNTAIN_PASS, converged, iterations, alpha, cfg.grad_tol)


def _sweep_one(pd, lam, alpha_base, cfg, index):
    cfg_i = dataclasses.replace(cfg, seed=cfg.seed + index)
    try:
        alpha = window_alpha(pd, lam)
    except ValueError:
        alpha = alpha_base
    try:
        if pd.q.hi < pd.p.lo:
            pair = solve_sublinear(pd, alpha, lam, cfg_i)
        else:
            pair = solve_mountain_pass(pd, alpha, lam, cfg_i)
    except (ValueError, OverflowError) as exc:
        warnings.warn(f"sweep row {index} (lam={lam}) failed: {exc}", RuntimeWarning)
        return None
    return pair


def spectrum_sweep(
    pd: ProblemData,
    lambdas,
    alpha: float,
    cfg: SolverConfig,
    *,
    max_workers: int = 1,
) -> SweepReport:
    """Solve one eigenpair per requested lam, never aborting on a bad row.

    The sphere level is re-chosen per row so each lam sits inside its
    certified window (it grows with lam in the sub-homogeneous regime and
    shrinks in the super-homogeneous one); `alpha` is the fallback level
    used only if the closed-form choice fails.
    """
    if pd.q.hi < pd.p.lo:
        pass
    elif pd.q.lo > pd.p.hi and is_superlinear(pd):
        pass
    else:
        raise ValueError("sweep needs a strict regime; boundary cases go to eigenfamily")
    lambdas = [float(l) for l in lambdas]

    def run(i_lam):
        i, lam = i_lam
        try:
            return i, _sweep_one(pd, lam, alpha, cfg, i)
        except Exception as exc:  # row isolation: a bad row must not abort the sweep
            warnings.warn(f"sweep row {i} raised: {exc}", RuntimeWarning)
            return i, None

    items = list(enumerate(lambdas))
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = dict(pool.map(run, items))
    else:
        results = dict(map(run, items))

    rows, pairs = [], []
    for i, lam in items:
        pair = results[i]
        if pair is None:
            rows.append(SweepRow(lam, np.nan, np.nan, np.nan, 0, "none", False, np.nan))
            pairs.append(None)
        else:
            rows.append(
                SweepRow(
                    pair.lam,
                    pair.residual,
                    _x_norm(pair.u, pd),
                    pair.snapshot.I_lambda,
                    pair.iterations,
                    pair.mechanism,
                    pair.converged,
                    pair.alpha,
                )
            )
            pairs.append(pair)
    return SweepReport(rows, pairs)


def eigenfamily(
    pd: ProblemData,
    mu: float,
    radii,
    cfg: SolverConfig,
) -> list:
    """One eigenpair per sphere level, all sharing the eigenvalue mu.

    Boundary regimes only: ball minimization when sup q = inf p (with inf q
    strictly below), path deformation when inf q = sup p.  The level-k run
    is seeded with the k-th separable sine mode (ordered by total
    frequency); on reflection-symmetric problem data each mode keeps its
    own exact parity class throughout the descent, so distinct levels land
    on genuinely different critical points.  Distinctness is certified by
    pairwise nodal gaps exceeding 10 * grad_tol (a warning is issued for
    any pair that collapses onto one function).
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")

    tol = 1e-9
    ball_regime = abs(pd.q.hi - pd.p.lo) <= tol * pd.p.lo and pd.q.lo < pd.p.lo - tol
    pass_regime = abs(pd.q.lo - pd.p.hi) <= tol * pd.p.hi and is_superlinear(pd)
    if not (ball_regime or pass_regime):
        raise ValueError("eigenfamily needs a boundary regime (sup q = inf p or inf q = sup p)")

    window = alpha_independent_threshold(pd)
    if mu >= window:
        warnings.warn(
            f"mu={mu} is outside the level-independent window (0, {window}); attempting anyway",
            RuntimeWarning,
            stacklevel=2,
        )

    count = len(radii)
    modes = _mode_tuples(pd.grid.dim, count)
    pairs = []
    for k, alpha in enumerate(radii):
        cfg_k = dataclasses.replace(cfg, seed=cfg.seed + k)
        seed_fn = mode_seed(pd, modes[k])
        if ball_regime:
            if alpha * pd.p.hi < 1.0:
                warnings.warn(
                    "level-independence needs alpha*sup(p) >= 1 in the ball regime",
                    RuntimeWarning,
                )
            pairs.append(solve_sublinear(pd, alpha, mu, cfg_k, v0=seed_fn))
        else:
            if alpha * pd.p.hi >= 1.0:
                warnings.warn(
                    "level-independence needs alpha*sup(p) < 1 in the path regime",
                    RuntimeWarning,
                )
            pairs.append(solve_mountain_pass(pd, alpha, mu, cfg_k, v0=seed_fn))

    gap_floor = 10.0 * cfg.grad_tol
    for i in range(count):
        for j in range(i + 1, count):
            gap = float(np.linalg.norm(pairs[i].u - pairs[j].u))
            if gap <= gap_floor:
                warnings.warn(
                    f"radii {radii[i]} and {radii[j]} landed on one function "
                    f"(nodal gap {gap:.3e} <= {gap_floor:.3e})",
                    RuntimeWarning,
                    stacklevel=2,
                )
    return pairs


def rescale_constant_exponent(
    pair: EigenPair,
    lam_new: float,
    pd: ProblemData,
    tol: float = 1e-5,
) -> EigenPair:
    """Map an eigenpair to a new eigenvalue via the homogeneity of constant exponents.

    For constant p and q, (u, lam) solves the weak identity iff
    (t u, t^{p-q} lam) does; choosing t = (lam/lam_new)^{1/(q-p)} lands on
    lam_new exactly, so the rescaled pair certifies it independently.
    """
    if not (pd.p.is_constant and pd.q.is_constant):
        raise ValueError("rescaling requires constant exponents")
    if lam_new <= 0:
        raise ValueError("lam_new must be positive")
    p_val, q_val = pd.p.lo, pd.q.lo
    t = (pair.lam / lam_new) ** (1.0 / (q_val - p_val))
    u = t * pair.u
    res = residual(u, pd, lam_new)
    return EigenPair(
        float(lam_new),
        u,
        res,
        energies(u, pd, lam_new),
        pair.mechanism,
        res <= tol,
        pair.iterations,
        energies(u, pd).G,
    )
