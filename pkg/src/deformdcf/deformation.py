"""Sub-filter position optimization.

Positions are moved by Barzilai-Borwein gradient descent on the data
misfit plus a deformation prior that ties current positions to the initial
grid through a 2x2 linear transform, itself re-estimated in closed form
after every descent step.  Raw BB is non-monotone, so the final iterate is
safeguarded: the returned state never has a higher objective than the
input state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateGeometryError, DimensionError
from .filters import FilterCoefficients, shift_phase, subfilter_score_raw
from .training import TrainingSample

GRADIENT_TOL = 1e-6


@dataclass(frozen=True)
class DeformationState:
    """Anchors, current positions, transform and prior settings.

    ``anchors`` are the first-frame sub-filter positions (origin at the
    target center); ``positions`` the current ones, kept wrapped inside
    (-T/2, T/2].  ``movable`` masks sub-filters the descent may move (the
    root stays pinned).  In ``identity`` mode the transform stays the
    identity matrix at all times.
    """

    anchors: np.ndarray
    positions: np.ndarray
    transform: np.ndarray
    position_weight: float
    mode: str
    period: tuple[float, float]
    movable: np.ndarray | None = None

    def __post_init__(self):
        anchors = np.asarray(self.anchors, dtype=np.float64)
        positions = np.asarray(self.positions, dtype=np.float64)
        transform = np.asarray(self.transform, dtype=np.float64)
        if anchors.ndim != 2 or anchors.shape[1] != 2:
            raise DimensionError(f"anchors must be (M, 2), got {anchors.shape}")
        if positions.shape != anchors.shape:
            raise DimensionError("positions shape differs from anchors")
        if transform.shape != (2, 2):
            raise DimensionError("transform must be 2x2")
        if self.position_weight < 0:
            raise ValueError("position weight must be non-negative")
        if self.mode not in ("affine", "identity"):
            raise ValueError(f"unknown deformation mode {self.mode!r}")
        if self.mode == "identity" and not np.array_equal(transform, np.eye(2)):
            raise ValueError("identity mode requires the identity transform")
        if not (np.all(np.isfinite(anchors)) and np.all(np.isfinite(positions))):
            raise ValueError("positions must be finite")
        movable = self.movable
        if movable is None:
            movable = np.ones(anchors.shape[0], dtype=bool)
        else:
            movable = np.asarray(movable, dtype=bool)
            if movable.shape != (anchors.shape[0],):
                raise DimensionError("movable mask must have one entry per sub-filter")
        for arr in (anchors, positions, transform, movable):
            arr.setflags(write=False)
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "transform", transform)
        object.__setattr__(self, "movable", movable)

    @property
    def nsub(self) -> int:
        return self.anchors.shape[0]


@dataclass(frozen=True)
class BBParams:
    """Step control for the Barzilai-Borwein descent."""

    max_iters: int = 10
    initial_step: float = 1.0
    step_min: float = 1e-4
    step_max: float = 10.0
    shrink: float = 0.5

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.step_min <= self.step_max:
            raise ValueError("need 0 < step_min <= step_max")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink factor must be in (0, 1)")


def wrap_positions(positions: np.ndarray, period: tuple[float, float]) -> np.ndarray:
    """Wrap every coordinate into (-T/2, T/2]."""
    p = np.asarray(positions, dtype=np.float64)
    t = np.asarray(period, dtype=np.float64)
    return t / 2.0 - np.mod(t / 2.0 - p, t)


def reg_energy(state: DeformationState) -> float:
    """Prior energy: weight * sum of squared |p - R p_init|."""
    d = state.positions - state.anchors @ state.transform.T
    return float(state.position_weight * np.sum(d * d))


def estimate_transform(anchors: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Least-squares 2x2 transform mapping anchors onto positions.

    Solves min_R sum_m |p_m - R a_m|^2 via the ridge-guarded normal
    equations with one refinement step (so non-degenerate configurations
    are recovered to machine precision, while collinear or coincident
    anchors stay bounded).  All anchors at the origin are rejected.
    """
    a = np.asarray(anchors, dtype=np.float64)
    p = np.asarray(positions, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 2 or a.shape != p.shape:
        raise DimensionError("anchors and positions must both be (M, 2)")
    if a.shape[0] < 2:
        raise ValueError("need at least two point pairs")
    p1 = a.T
    pc = p.T
    gram = p1 @ p1.T
    trace = float(np.trace(gram))
    if trace == 0.0:
        raise DegenerateGeometryError(
            "all anchors at the origin; transform is undefined"
        )
    guard = gram + (1e-8 * trace / 2.0) * np.eye(2)
    b = pc @ p1.T
    r = np.linalg.solve(guard.T, b.T).T
    r = r + np.linalg.solve(guard.T, (b - r @ gram).T).T
    return r


def _zero_fixed(grad: np.ndarray, state: DeformationState) -> np.ndarray:
    g = grad.copy()
    g[~state.movable] = 0.0
    return g


class _PositionProblem:
    """Misfit + prior as a function of the current sample's positions.

    Sub-filter scores do not depend on the positions, so they are computed
    once; every evaluation then only re-applies the translation phases.
    """

    def __init__(self, f: FilterCoefficients, sample: TrainingSample,
                 state: DeformationState):
        self.layout = f.layout
        if state.nsub != f.layout.nsub:
            raise DimensionError("deformation state does not match filter")
        self.sample = sample
        self.state = state
        self.sub_scores = [subfilter_score_raw(f.layout, f.coeffs[m], sample.spectra)
                           for m in range(f.layout.nsub)]
        k1, k2 = f.layout.kmax
        t1, t2 = f.layout.period
        self.k1_over_t1 = np.arange(-k1, k1 + 1)[:, None] / t1
        self.k2_over_t2 = np.arange(-k2, k2 + 1)[None, :] / t2

    def _phases(self, positions):
        return [shift_phase(self.layout, positions[m])
                for m in range(self.layout.nsub)]

    def _residual(self, phases):
        score = np.zeros(self.layout.score_layout.shape, dtype=np.complex128)
        for ph, s in zip(phases, self.sub_scores):
            score += ph * s
        return score - self.sample.label

    def energy(self, positions: np.ndarray, transform: np.ndarray) -> float:
        err = self._residual(self._phases(positions))
        e1 = self.sample.weight * float(np.sum(np.abs(err) ** 2))
        d = positions - self.state.anchors @ transform.T
        e3 = self.state.position_weight * float(np.sum(d * d))
        return e1 + e3

    def gradient(self, positions: np.ndarray, transform: np.ndarray) -> np.ndarray:
        phases = self._phases(positions)
        err_conj = np.conj(self._residual(phases))
        grad = np.empty((self.layout.nsub, 2))
        for m in range(self.layout.nsub):
            term = err_conj * phases[m] * self.sub_scores[m]
            # d/dp of the misfit: 2*w*Re(conj(err) * (-i 2 pi k/T) * beta * S_m)
            grad[m, 0] = (4.0 * np.pi * self.sample.weight *
                          float(np.sum(self.k1_over_t1 * term.imag)))
            grad[m, 1] = (4.0 * np.pi * self.sample.weight *
                          float(np.sum(self.k2_over_t2 * term.imag)))
        grad += (2.0 * self.state.position_weight *
                 (positions - self.state.anchors @ transform.T))
        return grad


def position_objective(f: FilterCoefficients, sample: TrainingSample,
                       state: DeformationState,
                       positions: np.ndarray | None = None) -> float:
    """Current-sample misfit plus prior at the given (or state) positions."""
    problem = _PositionProblem(f, sample, state)
    p = state.positions if positions is None else np.asarray(positions, float)
    return problem.energy(p, state.transform)


def grad_positions(f: FilterCoefficients, sample: TrainingSample,
                   state: DeformationState) -> np.ndarray:
    """Gradient of the misfit + prior with respect to every position."""
    problem = _PositionProblem(f, sample, state)
    return problem.gradient(state.positions, state.transform)


def _estimate_or_keep(state: DeformationState, positions: np.ndarray,
                      transform: np.ndarray) -> np.ndarray:
    if state.mode != "affine" or state.nsub < 2:
        return transform
    try:
        return estimate_transform(state.anchors, positions)
    except DegenerateGeometryError:
        return transform


def bb_descent(f: FilterCoefficients, sample: TrainingSample,
               state: DeformationState, params: BBParams) -> DeformationState:
    """Barzilai-Borwein descent on the current sample's positions.

    Uses the step (dp.dp)/(dp.dg) clamped to [step_min, step_max]; the
    transform is re-estimated after every move in affine mode.  If the
    final objective exceeds the starting one, the last step is shrunk
    repeatedly and the best iterate seen is kept, so the returned state
    never increases the objective.  A NaN gradient aborts the descent and
    returns the input state unchanged.
    """
    problem = _PositionProblem(f, sample, state)
    p = state.positions.copy()
    r = state.transform.copy()
    g = _zero_fixed(problem.gradient(p, r), state)
    if not np.all(np.isfinite(g)):
        return state
    e_start = problem.energy(p, r)
    best = (e_start, p, r)
    if np.linalg.norm(g) < GRADIENT_TOL:
        return state

    prev_p = p
    prev_g = g
    step = params.initial_step
    for it in range(params.max_iters):
        if it > 0:
            dp = p - prev_p
            dg = g - prev_g
            denom = float(np.sum(dp * dg))
            num = float(np.sum(dp * dp))
            step = num / denom if denom > 1e-300 and num > 0 else params.initial_step
            if step <= 0:
                step = params.initial_step
        step = min(max(step, params.step_min), params.step_max)
        prev_p, prev_g = p, g
        p = wrap_positions(p - step * g, state.period)
        r = _estimate_or_keep(state, p, r)
        e = problem.energy(p, r)
        if e < best[0]:
            best = (e, p, r)
        g = _zero_fixed(problem.gradient(p, r), state)
        if not np.all(np.isfinite(g)):
            break
        if np.linalg.norm(g) < GRADIENT_TOL:
            break

    if problem.energy(p, r) > e_start:
        shrunk = step
        for _ in range(10):
            shrunk *= params.shrink
            cand = wrap_positions(prev_p - shrunk * prev_g, state.period)
            r_cand = _estimate_or_keep(state, cand, state.transform)
            e_cand = problem.energy(cand, r_cand)
            if e_cand < best[0]:
                best = (e_cand, cand, r_cand)
            if e_cand <= e_start:
                break

    if best[0] < e_start:
        return replace(state, positions=best[1], transform=best[2])
    return state
