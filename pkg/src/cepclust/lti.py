"""State-space models: circuit construction, discretization, simulation, norms.

The data generator's two reference systems are third-order RLC circuits
driven by a current source, with the voltage over the second inductor as
output.  Everything else here is standard discrete-time machinery: Tustin
and zero-order-hold discretization, direct state recursion, and the H2 and
H-infinity norms used for model-based clustering baselines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DiscretizationSingularityError,
    DivergenceError,
    IncompatibleModelError,
    UnboundedNormError,
    ValidationError,
)
from .signals import TimeSeries, series_values


def _as_state_matrices(A, B, C, D):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        A = A.reshape(0, 0)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValidationError(f"A must be square, got shape {A.shape}")
    B = np.asarray(B, dtype=float).reshape(n, 1) if n else np.zeros((0, 1))
    C = np.asarray(C, dtype=float).reshape(1, n) if n else np.zeros((1, 0))
    D = float(np.asarray(D).reshape(()))
    return A, B, C, D


@dataclass
class ContinuousStateSpace:
    """Continuous-time SISO model dx/dt = Ax + Bu, y = Cx + Du."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float

    def __post_init__(self) -> None:
        self.A, self.B, self.C, self.D = _as_state_matrices(self.A, self.B, self.C, self.D)

    @property
    def order(self) -> int:
        return self.A.shape[0]


@dataclass
class StateSpace:
    """Discrete-time SISO model x(k+1) = Ax(k) + Bu(k), y(k) = Cx(k) + Du(k)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float
    sample_period: float

    def __post_init__(self) -> None:
        self.A, self.B, self.C, self.D = _as_state_matrices(self.A, self.B, self.C, self.D)
        if self.sample_period <= 0:
            raise ValidationError("sample_period must be positive")

    @property
    def order(self) -> int:
        return self.A.shape[0]


def is_stable(ss: StateSpace) -> bool:
    """True when every eigenvalue of A lies strictly inside the unit circle."""
    if ss.order == 0:
        return True
    return bool(np.max(np.abs(np.linalg.eigvals(ss.A))) < 1.0)


@dataclass
class CircuitComponents:
    """Component values of the reference circuit: R in ohms, L in henry, C in farad."""

    R: float
    L1: float
    L2: float
    C: float

    def __post_init__(self) -> None:
        for name in ("R", "L1", "L2", "C"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"circuit component {name} must be positive")


S1_COMPONENTS = CircuitComponents(R=100.0, L1=60.0, L2=20.0, C=50.0)
S2_COMPONENTS = CircuitComponents(R=100.0, L1=160.0, L2=200.0, C=75.0)


def circuit_model(comp: CircuitComponents) -> ContinuousStateSpace:
    """Order-3 model of the current-driven RLC circuit.

    Topology: the source current enters a node tied to ground through L1
    and through C, and through the series branch R into a second node,
    which is tied to ground through L2; the output is the second node's
    voltage (the voltage over L2).  Nodal analysis gives

        H(s) = s^2 L2 / (s^3 C L2 + s^2 R C + s (1 + L2/L1) + R/L1),

    realized here in controllable canonical form.
    """
    R, L1, L2, C = comp.R, comp.L1, comp.L2, comp.C
    a2 = R / L2
    a1 = 1.0 / (C * L2) + 1.0 / (C * L1)
    a0 = R / (C * L1 * L2)
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-a0, -a1, -a2]])
    B = np.array([[0.0], [0.0], [1.0]])
    Crow = np.array([[0.0, 0.0, 1.0 / C]])
    return ContinuousStateSpace(A, B, Crow, 0.0)


def continuous_response(css: ContinuousStateSpace, s: complex) -> complex:
    """Transfer function value C (sI - A)^{-1} B + D at one complex frequency."""
    if css.order == 0:
        return complex(css.D)
    x = np.linalg.solve(s * np.eye(css.order) - css.A, css.B)
    return complex((css.C @ x).item() + css.D)


def discrete_response(ss: StateSpace, z: complex) -> complex:
    """Transfer function value C (zI - A)^{-1} B + D at one point of the z-plane."""
    if ss.order == 0:
        return complex(ss.D)
    x = np.linalg.solve(z * np.eye(ss.order) - ss.A, ss.B)
    return complex((ss.C @ x).item() + ss.D)


def discretize(css: ContinuousStateSpace, dt: float, method: str = "bilinear") -> StateSpace:
    """Discretize a continuous model with the given sample period.

    The default is the bilinear (Tustin) transform, which maps the open
    left half-plane onto the open unit disk and preserves the DC gain.
    ``method="zoh"`` instead samples the exact response to inputs held
    constant over each period.
    """
    if dt <= 0:
        raise ValidationError("dt must be positive")
    A, B, C, D = css.A, css.B, css.C, css.D
    n = css.order
    if method == "bilinear":
        if n:
            eigenvalues = np.linalg.eigvals(A)
            limit = 2.0 / dt
            if np.min(np.abs(eigenvalues - limit)) <= 1e-9 * limit:
                raise DiscretizationSingularityError(
                    f"eigenvalue at 2/dt = {limit:g} makes the bilinear transform singular"
                )
            M = np.eye(n) - (dt / 2.0) * A
            Minv = np.linalg.inv(M)
            Ad = Minv @ (np.eye(n) + (dt / 2.0) * A)
            Bd = Minv @ B * dt
            Cd = C @ Minv
            Dd = D + (dt / 2.0) * (C @ Minv @ B).item()
        else:
            Ad, Bd, Cd, Dd = A, B, C, D
        return StateSpace(Ad, Bd, Cd, Dd, sample_period=dt)
    if method == "zoh":
        block = np.zeros((n + 1, n + 1))
        block[:n, :n] = A * dt
        block[:n, n:] = B * dt
        exp_block = scipy.linalg.expm(block)
        return StateSpace(exp_block[:n, :n], exp_block[:n, n:], C, D, sample_period=dt)
    raise ValidationError(f"unknown discretization method {method!r}")


def simulate(ss: StateSpace, u) -> TimeSeries:
    """Run the state recursion x(k+1) = Ax + Bu, y(k) = Cx + Du from x(0) = 0.

    Raises a divergence error as soon as any output magnitude exceeds 1e12.
    """
    values = series_values(u)
    n = ss.order
    if n == 0:
        y = ss.D * values
        if np.any(np.abs(y) > 1e12):
            raise DivergenceError("simulated output exceeded 1e12")
        return TimeSeries(y, sample_period=ss.sample_period)
    A, b, c, d = ss.A, ss.B[:, 0], ss.C[0, :], ss.D
    x = np.zeros(n)
    y = np.empty(len(values))
    for k, u_k in enumerate(values):
        y_k = c @ x + d * u_k
        if abs(y_k) > 1e12:
            raise DivergenceError(f"simulated output exceeded 1e12 at sample {k}")
        y[k] = y_k
        x = A @ x + b * u_k
    return TimeSeries(y, sample_period=ss.sample_period)


def h2_norm(ss: StateSpace) -> float:
    """H2 norm: RMS response to unit white noise.

    For SISO discrete systems this is the l2 norm of the impulse response,
    computed through the observability Gramian: A'XA - X + C'C = 0 and
    ||H||_2 = sqrt(D^2 + B'XB).
    """
    if not is_stable(ss):
        raise UnboundedNormError("H2 norm of an unstable system is unbounded")
    if ss.order == 0:
        return abs(ss.D)
    X = scipy.linalg.solve_discrete_lyapunov(ss.A.T, ss.C.T @ ss.C)
    # The Gramian quadratic form is nonnegative; roundoff can leave a tiny
    # negative residue for near-zero norms (e.g. differences of equal models).
    return float(np.sqrt(max(ss.D**2 + (ss.B.T @ X @ ss.B).item(), 0.0)))


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def hinf_norm(ss: StateSpace, grid_size: int = 4096) -> float:
    """H-infinity norm: peak gain of the frequency response over [0, pi].

    Dense grid search followed by golden-section refinement around the
    grid argmax.  The result is never below the plain grid maximum.
    """
    if grid_size < 2:
        raise ValidationError("grid_size must be at least 2")
    if ss.order == 0:
        return abs(ss.D)
    poles = np.linalg.eigvals(ss.A)
    if np.any(np.abs(np.abs(poles) - 1.0) < 1e-9):
        raise UnboundedNormError("H-infinity norm is unbounded for poles on the unit circle")

    omegas = np.linspace(0.0, np.pi, grid_size, endpoint=False)
    z = np.exp(1j * omegas)
    lhs = z[:, None, None] * np.eye(ss.order)[None, :, :] - ss.A[None, :, :]
    states = np.linalg.solve(lhs, np.broadcast_to(ss.B, (grid_size, ss.order, 1)))
    gains = np.abs((ss.C[None, :, :] @ states)[:, 0, 0] + ss.D)

    peak_index = int(np.argmax(gains))
    best = float(gains[peak_index])
    lo = omegas[max(0, peak_index - 1)]
    hi = omegas[peak_index + 1] if peak_index + 1 < grid_size else np.pi

    def gain(omega: float) -> float:
        return abs(discrete_response(ss, np.exp(1j * omega)))

    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = gain(x1), gain(x2)
    for _ in range(80):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = gain(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = gain(x1)
        best = max(best, f1, f2)
    return best


def model_distance(ss1: StateSpace, ss2: StateSpace, norm: str = "h2") -> float:
    """Norm of the difference system H1 - H2 under the chosen norm.

    The difference is realized in parallel form: block-diagonal dynamics,
    stacked inputs, subtracted outputs.
    """
    if ss1.sample_period != ss2.sample_period:
        raise IncompatibleModelError(
            f"sample periods differ: {ss1.sample_period} vs {ss2.sample_period}"
        )
    n1, n2 = ss1.order, ss2.order
    A = np.zeros((n1 + n2, n1 + n2))
    A[:n1, :n1] = ss1.A
    A[n1:, n1:] = ss2.A
    B = np.vstack([ss1.B, ss2.B])
    C = np.hstack([ss1.C, -ss2.C])
    difference = StateSpace(A, B, C, ss1.D - ss2.D, sample_period=ss1.sample_period)
    if norm == "h2":
        return h2_norm(difference)
    if norm == "hinf":
        return hinf_norm(difference)
    raise ValidationError(f"unknown norm {norm!r}, expected 'h2' or 'hinf'")


def model_to_dict(ss: StateSpace) -> dict:
    return {
        "A": ss.A.tolist(),
        "B": ss.B[:, 0].tolist(),
        "C": ss.C[0, :].tolist(),
        "D": ss.D,
        "dt": ss.sample_period,
    }


def model_from_dict(payload: dict) -> StateSpace:
    return StateSpace(
        np.asarray(payload["A"], dtype=float),
        np.asarray(payload["B"], dtype=float),
        np.asarray(payload["C"], dtype=float),
        float(payload["D"]),
        sample_period=float(payload["dt"]),
    )


def save_model(ss: StateSpace, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(ss), fh, indent=2)


def load_model(path) -> StateSpace:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
