"""Variational energy minimisation over circuit parameters."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .circuit import Circuit, Metrics, metrics
from .hamiltonian import PauliSum
from .sim import compile_circuit

OPTIMIZERS = ("simplex_free", "quasi_newton")


class VqeError(ValueError):
    pass


@dataclass(frozen=True)
class VqeConfig:
    """``max_iters`` counts objective evaluations for ``simplex_free`` and
    optimizer iterations for ``quasi_newton``."""

    optimizer: str = "simplex_free"
    max_iters: int = 10000
    init_scale: float = 1e-2
    seed: int = 0
    tol: float = 1e-8
    fd_step: float = 1e-4

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise VqeError(f"optimizer must be one of {OPTIMIZERS}")
        if self.max_iters < 1:
            raise VqeError("max_iters must be >= 1")
        if self.init_scale < 0:
            raise VqeError("init_scale must be >= 0")
        if self.tol <= 0:
            raise VqeError("tol must be > 0")


@dataclass
class VqeResult:
    best_energy: float
    best_params: np.ndarray
    energy_trace: list[float]
    iterations_used: int
    metrics: Metrics
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "best_energy": self.best_energy,
            "best_params": [float(x) for x in self.best_params],
            "energy_trace": [float(x) for x in self.energy_trace],
            "iterations_used": self.iterations_used,
            "metrics": self.metrics.to_dict(),
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"


def fd_gradient(f, x: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Central finite differences."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    e = np.zeros_like(x)
    for i in range(x.size):
        e[i] = step
        grad[i] = (f(x + e) - f(x - e)) / (2 * step)
        e[i] = 0.0
    return grad


def energy_function(c: Circuit, hm: PauliSum):
    """``theta -> <psi(theta)|H|psi(theta)>``.

    The compiled state is real, so only the real (symmetric) part of the
    Hamiltonian matrix contributes.
    """
    if c.n_qubits != hm.n_qubits:
        raise VqeError(f"circuit has {c.n_qubits} qubits, Hamiltonian {hm.n_qubits}")
    mat = hm.sparse.real.tocsr()
    run = compile_circuit(c)

    def energy(theta) -> float:
        psi = run(theta)
        return float(psi @ (mat @ psi))

    return energy


def run_vqe(c: Circuit, hm: PauliSum, cfg: VqeConfig = VqeConfig()) -> VqeResult:
    energy = energy_function(c, hm)
    rng = np.random.default_rng(cfg.seed)
    x0 = rng.uniform(-cfg.init_scale, cfg.init_scale, size=c.n_params)

    trace: list[float] = []
    best = {"e": np.inf, "x": x0}

    def objective(x):
        e = energy(x)
        trace.append(e)
        if e < best["e"]:
            best["e"], best["x"] = e, np.array(x, dtype=float)
        return e

    if c.n_params == 0:
        objective(x0)
    elif cfg.optimizer == "simplex_free":
        minimize(objective, x0, method="COBYLA",
                 options={"maxiter": cfg.max_iters, "rhobeg": 0.5, "tol": cfg.tol})
    else:
        minimize(objective, x0, method="L-BFGS-B",
                 jac=lambda x: fd_gradient(energy, x, cfg.fd_step),
                 options={"maxiter": cfg.max_iters, "ftol": cfg.tol, "gtol": 1e-10})

    return VqeResult(
        best_energy=float(best["e"]),
        best_params=best["x"],
        energy_trace=trace,
        iterations_used=len(trace),
        metrics=metrics(c),
    )


def energy_error(result: VqeResult | float, reference: float) -> float:
    best = result.best_energy if isinstance(result, VqeResult) else float(result)
    if not np.isfinite(reference):
        raise VqeError("reference energy must be finite")
    return best - reference


def summarize(errors) -> dict:
    """Median and interquartile range of a batch of energy errors."""
    a = np.asarray(list(errors), dtype=float)
    if a.size == 0:
        return {"n": 0, "median": float("nan"), "q1": float("nan"), "q3": float("nan"), "iqr": float("nan")}
    q1, med, q3 = np.percentile(a, [25, 50, 75])
    return {"n": int(a.size), "median": float(med), "q1": float(q1), "q3": float(q3), "iqr": float(q3 - q1)}
