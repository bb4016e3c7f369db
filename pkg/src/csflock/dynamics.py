"""Discrete-time Cucker-Smale dynamics on switching digraphs.

One step of the model is

    x_i(t+1) = x_i(t) + h v_i(t)
    v_i(t+1) = v_i(t) + h sum_j chi_ij psi_ij (v_j(t) - v_i(t))

with ``psi_ij = (1 + |x_i - x_j|^2)^(-beta)``.  In matrix form the velocity
update is ``v(t+1) = F v(t)`` with the flocking matrix ``F = Id - h L``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterator

import numpy as np

from .errors import DimensionError, ParameterError
from .topology import Digraph, SwitchingSignal

__all__ = [
    "FlockParams",
    "FlockState",
    "ReferenceState",
    "Trajectory",
    "psi",
    "psi_matrix",
    "weighted_adjacency",
    "degrees",
    "laplacian",
    "flocking_matrix",
    "flocking_support",
    "step",
    "reference",
    "reference_transition",
    "simulate",
    "random_initial_state",
    "evolve_batch",
]


@dataclass(frozen=True)
class FlockParams:
    """Time step ``h``, decay exponent ``beta``, agent count ``N`` and dimension ``d``."""

    h: float
    beta: float
    N: int
    d: int = 3

    def __post_init__(self):
        if not self.h > 0:
            raise ParameterError(f"time step h must be positive, got {self.h}")
        if not self.beta >= 0:
            raise ParameterError(f"beta must be nonnegative, got {self.beta}")
        if self.N < 1 or self.d < 1:
            raise ParameterError(f"need N >= 1 and d >= 1, got N={self.N}, d={self.d}")

    @property
    def h_max(self) -> float:
        """Strict upper bound ``1/(N+1)`` on ``h`` required by the flocking estimates."""
        return 1.0 / (self.N + 1)

    @property
    def satisfies_step_condition(self) -> bool:
        return self.h < self.h_max

    def require_step_condition(self) -> None:
        if not self.satisfies_step_condition:
            raise ParameterError(
                f"h = {self.h} violates h < 1/(N+1) = {self.h_max:.6g} for N = {self.N}"
            )


@dataclass(frozen=True)
class FlockState:
    """Positions ``x`` and velocities ``v`` (both ``N x d``) at step ``t``."""

    x: np.ndarray
    v: np.ndarray
    t: int = 0

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        v = np.array(self.v, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if v.ndim == 1:
            v = v[:, None]
        if x.shape != v.shape or x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise DimensionError(f"positions {x.shape} and velocities {v.shape} must both be N x d")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("state has non-finite coordinates")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @property
    def N(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class ReferenceState:
    """Positions and velocities relative to the last agent, each ``(N-1) x d``."""

    xhat: np.ndarray
    vhat: np.ndarray

    @property
    def xhat_norm(self) -> float:
        return float(np.linalg.norm(self.xhat))

    @property
    def vhat_inf_norm(self) -> float:
        return float(np.abs(self.vhat).max()) if self.vhat.size else 0.0


def psi(xi, xj, beta: float) -> float:
    """Communication weight ``(1 + |xi - xj|^2)^(-beta)``."""
    diff = np.asarray(xi, dtype=float) - np.asarray(xj, dtype=float)
    return float((1.0 + np.dot(diff.ravel(), diff.ravel())) ** (-beta))


def psi_matrix(x, beta: float) -> np.ndarray:
    """All pairwise weights ``psi[i, j]`` for positions ``x`` of shape ``N x d``."""
    x = np.asarray(x, dtype=float)
    diff = x[:, None, :] - x[None, :, :]
    return (1.0 + np.einsum("ijk,ijk->ij", diff, diff)) ** (-beta)


def _check_graph(state: FlockState, g: Digraph, params: FlockParams | None = None) -> None:
    if g.n != state.N:
        raise DimensionError(f"graph has {g.n} vertices but the flock has {state.N} agents")
    if params is not None and (params.N != state.N or params.d != state.d):
        raise DimensionError(
            f"params describe N={params.N}, d={params.d}; state has N={state.N}, d={state.d}"
        )


def weighted_adjacency(state: FlockState, g: Digraph, params: FlockParams) -> np.ndarray:
    """``chi * psi``: entry ``(i, j)`` is the weight with which ``j`` influences ``i``."""
    _check_graph(state, g, params)
    return np.where(g.adjacency, psi_matrix(state.x, params.beta), 0.0)


def degrees(state: FlockState, g: Digraph, params: FlockParams) -> np.ndarray:
    """Weighted in-degree ``d_i = sum_j chi_ij psi_ij`` of every agent."""
    return weighted_adjacency(state, g, params).sum(axis=1)


def laplacian(state: FlockState, g: Digraph, params: FlockParams) -> np.ndarray:
    """Weighted Laplacian ``diag(d) - chi * psi``; each row sums to zero."""
    W = weighted_adjacency(state, g, params)
    L = -W
    np.fill_diagonal(L, W.sum(axis=1))
    return L


def flocking_matrix(L, h: float) -> np.ndarray:
    """``Id - h L``, refusing ``h`` large enough to make a diagonal entry negative."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise DimensionError(f"Laplacian must be square, got shape {L.shape}")
    diag = 1.0 - h * np.diag(L)
    if np.any(diag < 0):
        raise ParameterError(
            f"h = {h} makes a flocking-matrix diagonal negative (min {diag.min():.3g}); "
            f"need h * max degree <= 1"
        )
    return np.eye(L.shape[0]) - h * L


def flocking_support(g: Digraph) -> np.ndarray:
    """Structural nonzero pattern of a flocking matrix: self-loops plus ``chi``.

    Weights ``psi`` are strictly positive, so this is exact whenever the
    diagonal ``1 - h d_i`` is positive (always true for ``h < 1/(N+1)``).
    """
    return np.asarray(g.adjacency) | np.eye(g.n, dtype=bool)


def step(state: FlockState, g: Digraph, params: FlockParams) -> FlockState:
    """Advance one step on graph ``g``.

    Positions move with the time-``t`` velocities.  ``h`` is not restricted
    here, so steps beyond ``1/(N+1)`` can be explored.
    """
    _check_graph(state, g, params)
    W = np.where(g.adjacency, psi_matrix(state.x, params.beta), 0.0)
    F = params.h * W
    np.fill_diagonal(F, 1.0 - params.h * W.sum(axis=1))
    return FlockState(state.x + params.h * state.v, F @ state.v, state.t + 1)


def reference(state: FlockState) -> ReferenceState:
    """Differences against the last agent."""
    if state.N < 2:
        raise DimensionError("reference system needs at least two agents")
    return ReferenceState(state.x[:-1] - state.x[-1], state.v[:-1] - state.v[-1])


def reference_transition(state: FlockState, g: Digraph, params: FlockParams) -> np.ndarray:
    """Matrix ``P`` with ``vhat(t+1) = P vhat(t)``; not necessarily nonnegative.

    ``P_ii = 1 - h d_i - h chi_Ni psi_Ni`` and
    ``P_ij = h chi_ij psi_ij - h chi_Nj psi_Nj`` for ``i != j``, ``i, j < N``.
    """
    if state.N < 2:
        raise DimensionError("reference system needs at least two agents")
    W = weighted_adjacency(state, g, params)
    h = params.h
    n1 = state.N - 1
    d = W.sum(axis=1)
    P = h * W[:n1, :n1] - h * W[-1, :n1][None, :]
    P[np.diag_indices(n1)] = 1.0 - h * d[:n1] - h * W[-1, :n1]
    return P


@dataclass
class Trajectory:
    """Stacked states ``x[t]``, ``v[t]`` for ``t = 0..steps`` and the graph active at each ``t``."""

    params: FlockParams
    x: np.ndarray
    v: np.ndarray
    graph_keys: list = field(default_factory=list)

    @property
    def steps(self) -> int:
        return self.x.shape[0] - 1

    def state(self, t: int) -> FlockState:
        return FlockState(self.x[t], self.v[t], t)

    @property
    def xhat(self) -> np.ndarray:
        return self.x[:, :-1] - self.x[:, -1:]

    @property
    def vhat(self) -> np.ndarray:
        return self.v[:, :-1] - self.v[:, -1:]

    def xhat_norms(self) -> np.ndarray:
        """``|xhat(t)|`` over the stacked ``(N-1) d`` vector."""
        return np.linalg.norm(self.xhat.reshape(self.x.shape[0], -1), axis=1)

    def vhat_inf_norms(self) -> np.ndarray:
        vh = self.vhat.reshape(self.x.shape[0], -1)
        return np.abs(vh).max(axis=1) if vh.shape[1] else np.zeros(vh.shape[0])

    def reference_states(self) -> list[ReferenceState]:
        return [ReferenceState(a, b) for a, b in zip(self.xhat, self.vhat)]

    def flocking_matrices(self, signal: SwitchingSignal) -> Iterator[np.ndarray]:
        """Flocking matrices ``F_sigma(t)`` for ``t = 0..steps-1`` along this trajectory."""
        for t in range(self.steps):
            s = self.state(t)
            yield flocking_matrix(laplacian(s, signal(t), self.params), self.params.h)


def simulate(
    state: FlockState, signal: SwitchingSignal, params: FlockParams, steps: int
) -> Trajectory:
    """Run ``steps`` steps of the switching system from ``state``.

    The schedule is evaluated at absolute time ``state.t + k``.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if signal.n != state.N:
        raise DimensionError(f"signal graphs have {signal.n} vertices, flock has {state.N} agents")
    xs = np.empty((steps + 1, state.N, state.d))
    vs = np.empty_like(xs)
    keys: list[Hashable] = []
    s = state
    for k in range(steps + 1):
        xs[k] = s.x
        vs[k] = s.v
        key = signal.index_at(s.t)
        keys.append(key)
        if k < steps:
            s = step(s, signal.graphs[key], params)
    return Trajectory(params, xs, vs, keys)


def random_initial_state(
    N: int,
    d: int,
    rng: np.random.Generator,
    position_length: float = 10.0,
    velocity_length: float = 1.0,
) -> FlockState:
    """Coordinates uniform on ``[0, position_length]`` and ``[0, velocity_length]``."""
    x = rng.uniform(0.0, position_length, size=(N, d))
    v = rng.uniform(0.0, velocity_length, size=(N, d))
    return FlockState(x, v, 0)


def evolve_batch(x0, v0, chi_lib, schedule, h, beta):
    """Run many independent trajectories in lockstep.

    ``x0`` and ``v0`` have shape ``(B, N, d)``; ``chi_lib`` is a ``(K, N, N)``
    stack of adjacency matrices and ``schedule`` a ``(B, T)`` integer array of
    indices into it.  ``h`` and ``beta`` are scalars or length-``B`` arrays.

    Yields ``(t, x, v, F)`` for ``t = 0..T-1`` where ``F`` is the batch of
    flocking matrices applied at step ``t``, then ``(T, x, v, None)``.
    The yielded arrays must not be modified.
    """
    x = np.array(x0, dtype=float)
    v = np.array(v0, dtype=float)
    chi_lib = np.asarray(chi_lib, dtype=bool)
    schedule = np.asarray(schedule)
    B, N, _ = x.shape
    h = np.broadcast_to(np.asarray(h, dtype=float), (B,))[:, None, None]
    beta = np.broadcast_to(np.asarray(beta, dtype=float), (B,))[:, None, None]
    diag = np.arange(N)
    for t in range(schedule.shape[1]):
        chi = chi_lib[schedule[:, t]]
        diff = x[:, :, None, :] - x[:, None, :, :]
        W = np.where(chi, (1.0 + np.einsum("bijk,bijk->bij", diff, diff)) ** (-beta), 0.0)
        F = h * W
        F[:, diag, diag] = 1.0 - h[:, :, 0] * W.sum(axis=2)
        yield t, x, v, F
        x = x + h * v
        v = F @ v
    yield schedule.shape[1], x, v, None

