"""Hybrid Fourier-autoregressive (HFA) schedule generation.

A schedule assigns the circuit angles (gamma_l, beta_l) for layers
l = 1..p. The standard parameterization treats all 2p angles as free; the
HFA generator produces them from a fixed-size hyperparameter vector: a
truncated sine/cosine backbone evaluated on the normalized layer grid
x_l = (l - 1/2) / p, plus a geometrically decaying AR(1) residual per
angle family. The generator dimension is 3K + 4 for K spectral modes and
does not grow with p, so one hyperparameter vector can be resampled at any
depth.

Schedules carry both raw angles and their mod-2*pi reduction. The raw
values are the smooth trajectory (the Lipschitz certificate and the
circuit consume these); the wrapped values are the canonical angle
representatives. For beta the two are physically identical (the mixer is
2*pi-periodic); for gamma they differ on non-integer cost spectra, which
is why the circuit path sticks to raw values.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


def layer_grid(p: int) -> np.ndarray:
    """Normalized temporal coordinates x_l = (l - 1/2)/p for l = 1..p."""
    if p < 1:
        raise ValueError(f"need depth p >= 1, got {p}")
    return (np.arange(1, p + 1) - 0.5) / p


@dataclass(frozen=True)
class HfaParams:
    """HFA hyperparameters: spectra, AR terms, and frequency weights.

    Flattened layout (length 3K + 4):
    (a_1..a_K, b_1..b_K, lambda_gamma, lambda_beta, delta_gamma0,
    delta_beta0, w_1..w_K).
    """

    a: np.ndarray
    b: np.ndarray
    lambda_gamma: float
    lambda_beta: float
    delta_gamma0: float
    delta_beta0: float
    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", np.asarray(self.a, dtype=np.float64))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=np.float64))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        k = self.a.size
        if k < 1:
            raise ValueError("need at least one spectral mode")
        if self.b.size != k or self.weights.size != k:
            raise ValueError("a, b and weights must share the mode count K")

    @property
    def k_modes(self) -> int:
        return int(self.a.size)

    @property
    def dimension(self) -> int:
        return 3 * self.k_modes + 4

    def to_vector(self) -> np.ndarray:
        return np.concatenate([
            self.a,
            self.b,
            [self.lambda_gamma, self.lambda_beta, self.delta_gamma0, self.delta_beta0],
            self.weights,
        ])

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "HfaParams":
        v = np.asarray(v, dtype=np.float64)
        if v.ndim != 1 or v.size < 7 or (v.size - 4) % 3 != 0:
            raise ValueError(f"HFA vector length must be 3K + 4 with K >= 1, got {v.size}")
        k = (v.size - 4) // 3
        return cls(
            a=v[:k].copy(),
            b=v[k:2 * k].copy(),
            lambda_gamma=float(v[2 * k]),
            lambda_beta=float(v[2 * k + 1]),
            delta_gamma0=float(v[2 * k + 2]),
            delta_beta0=float(v[2 * k + 3]),
            weights=v[2 * k + 4:].copy(),
        )

    def to_json(self) -> str:
        return json.dumps({
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "lambda_gamma": self.lambda_gamma,
            "lambda_beta": self.lambda_beta,
            "delta_gamma0": self.delta_gamma0,
            "delta_beta0": self.delta_beta0,
            "weights": self.weights.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "HfaParams":
        d = json.loads(text)
        return cls(
            a=np.array(d["a"]),
            b=np.array(d["b"]),
            lambda_gamma=float(d["lambda_gamma"]),
            lambda_beta=float(d["lambda_beta"]),
            delta_gamma0=float(d["delta_gamma0"]),
            delta_beta0=float(d["delta_beta0"]),
            weights=np.array(d["weights"]),
        )


@dataclass(frozen=True)
class Schedule:
    """Realized layer angles plus the temporal grid.

    ``gammas``/``betas`` are the mod-2*pi representatives of
    ``raw_gammas``/``raw_betas``.
    """

    gammas: np.ndarray
    betas: np.ndarray
    grid: np.ndarray
    raw_gammas: np.ndarray
    raw_betas: np.ndarray

    @property
    def depth(self) -> int:
        return int(self.grid.size)

    def write_csv(self, path: str) -> None:
        """Columns: l, x_l, gamma, beta (wrapped angles)."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["l", "x_l", "gamma", "beta"])
            for l in range(self.depth):
                writer.writerow([l + 1, repr(float(self.grid[l])),
                                 repr(float(self.gammas[l])), repr(float(self.betas[l]))])


def _schedule_from_raw(raw_gammas: np.ndarray, raw_betas: np.ndarray, p: int) -> Schedule:
    return Schedule(
        gammas=np.mod(raw_gammas, TWO_PI),
        betas=np.mod(raw_betas, TWO_PI),
        grid=layer_grid(p),
        raw_gammas=raw_gammas,
        raw_betas=raw_betas,
    )


def _ar_residuals(delta0: float, lam: float, p: int) -> np.ndarray:
    """Iterative AR(1): delta_1 = delta0, delta_l = lam * delta_{l-1}."""
    out = np.empty(p)
    out[0] = delta0
    for l in range(1, p):
        out[l] = lam * out[l - 1]
    return out


def hfa_generate(params: HfaParams, p: int) -> Schedule:
    """Realize the HFA schedule at depth p.

    raw_gamma_l = sum_k a_k w_k sin(k*pi*x_l) + lambda_gamma^(l-1) * dg0,
    raw_beta_l  = sum_k b_k w_k cos(k*pi*x_l) + lambda_beta^(l-1) * db0.
    """
    vec = params.to_vector()
    if not np.all(np.isfinite(vec)):
        raise ValueError("non-finite HFA parameters")
    x = layer_grid(p)
    k_pi_x = np.pi * np.outer(np.arange(1, params.k_modes + 1), x)  # (K, p)
    aw = params.a * params.weights
    bw = params.b * params.weights
    raw_gammas = aw @ np.sin(k_pi_x) + _ar_residuals(params.delta_gamma0, params.lambda_gamma, p)
    raw_betas = bw @ np.cos(k_pi_x) + _ar_residuals(params.delta_beta0, params.lambda_beta, p)
    return _schedule_from_raw(raw_gammas, raw_betas, p)


def standard_pack(sched: Schedule) -> np.ndarray:
    """Flatten to the independent-angle vector (gamma block, then beta block)."""
    return np.concatenate([sched.raw_gammas, sched.raw_betas])


def standard_unpack(v: np.ndarray, p: int) -> Schedule:
    """Inverse of standard_pack; v has length 2p."""
    v = np.asarray(v, dtype=np.float64)
    if v.size != 2 * p:
        raise ValueError(f"expected a 2p = {2 * p} vector, got length {v.size}")
    return _schedule_from_raw(v[:p].copy(), v[p:].copy(), p)


def dimension_ratio(k_modes: int, p: int) -> float:
    """Spectral-generator to standard dimension ratio (2K + 4) / 2p."""
    return (2 * k_modes + 4) / (2 * p)


def resample(params: HfaParams, p_new: int, ar_rescale_from: int | None = None) -> Schedule:
    """Evaluate the continuous schedule on a new depth grid.

    Default mode keeps the AR decay per layer index (identical to
    hfa_generate at p_new). With ``ar_rescale_from=p_old`` the decay rates
    are raised to the power p_old/p_new so the AR envelope is invariant in
    normalized time instead; negative rates keep their sign with the
    magnitude rescaled (the alternation period stays tied to the layer
    index, which has no continuum analogue).
    """
    if ar_rescale_from is None:
        return hfa_generate(params, p_new)
    ratio = ar_rescale_from / p_new

    def rescale(lam: float) -> float:
        return float(np.sign(lam) * abs(lam) ** ratio) if lam != 0.0 else 0.0

    adjusted = HfaParams(
        a=params.a,
        b=params.b,
        lambda_gamma=rescale(params.lambda_gamma),
        lambda_beta=rescale(params.lambda_beta),
        delta_gamma0=params.delta_gamma0,
        delta_beta0=params.delta_beta0,
        weights=params.weights,
    )
    return hfa_generate(adjusted, p_new)


@dataclass(frozen=True)
class LipschitzReport:
    """Certificate constants per angle family and the worst bound violation.

    The per-layer bound is |raw_{l+1} - raw_l| <= c_spec/p + c_ar*|lam|^(l-1);
    ``max_violation`` is the largest left-minus-right residual over both
    families and all layers (<= 0 up to roundoff whenever |lam| < 1).
    """

    c_spec_gamma: float
    c_ar_gamma: float
    c_spec_beta: float
    c_ar_beta: float
    max_violation: float


def _family_violation(raw: np.ndarray, c_spec: float, c_ar: float, lam: float, p: int) -> float:
    if p == 1:
        return 0.0  # no consecutive layers, nothing to bound
    gaps = np.abs(np.diff(raw))
    bound = c_spec / p + c_ar * np.abs(lam) ** np.arange(p - 1)
    return float(np.max(gaps - bound))


def lipschitz_certificate(params: HfaParams, p: int) -> LipschitzReport:
    """Check the layer-smoothness bound on the raw schedule at depth p.

    c_spec = pi * sum_k k*|a_k*w_k| (analogously with b for beta) and
    c_ar = |delta0|*|1 - lam|. Requires |lam| < 1 for both families.
    """
    if abs(params.lambda_gamma) >= 1 or abs(params.lambda_beta) >= 1:
        raise ValueError("certificate requires |lambda| < 1")
    k = np.arange(1, params.k_modes + 1)
    c_spec_gamma = float(np.pi * np.sum(k * np.abs(params.a * params.weights)))
    c_spec_beta = float(np.pi * np.sum(k * np.abs(params.b * params.weights)))
    c_ar_gamma = abs(params.delta_gamma0) * abs(1.0 - params.lambda_gamma)
    c_ar_beta = abs(params.delta_beta0) * abs(1.0 - params.lambda_beta)
    sched = hfa_generate(params, p)
    violation = max(
        _family_violation(sched.raw_gammas, c_spec_gamma, c_ar_gamma, params.lambda_gamma, p),
        _family_violation(sched.raw_betas, c_spec_beta, c_ar_beta, params.lambda_beta, p),
    )
    return LipschitzReport(
        c_spec_gamma=c_spec_gamma,
        c_ar_gamma=c_ar_gamma,
        c_spec_beta=c_spec_beta,
        c_ar_beta=c_ar_beta,
        max_violation=violation,
    )
