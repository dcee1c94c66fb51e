"""Topic-supervised NMF: min ||V - (W o L) H||_F^2 with W, H >= 0.

Solved with masked Lee-Seung multiplicative updates. The mask enters both
the reconstruction and, as a projection, the W update, so masked entries of
W are zero from initialization onward.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import sparse


class FactorizationError(ValueError):
    pass


class DimensionMismatch(FactorizationError):
    pass


class NonNegativityViolation(FactorizationError):
    pass


class DegenerateTopic(FactorizationError):
    pass


@dataclass(frozen=True)
class FactorizationConfig:
    k: int = 2
    max_iterations: int = 500
    relative_tolerance: float = 1e-5
    epsilon: float = 1e-12
    rng_seed: int = 0
    init: str = "random_uniform"

    def __post_init__(self):
        if self.k < 1 or self.max_iterations < 1:
            raise ValueError("k and max_iterations must be >= 1")
        if self.relative_tolerance <= 0 or self.epsilon <= 0:
            raise ValueError("relative_tolerance and epsilon must be positive")
        if self.init not in ("random_uniform", "nndsvd"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass
class FactorModel:
    U: np.ndarray  # users x k
    T: np.ndarray  # k x terms
    L: np.ndarray  # users x k mask
    rows: list[str] = field(default_factory=list)
    terms: list[str] = field(default_factory=list)
    objective_trace: list[float] = field(default_factory=list)
    converged: bool = False
    iterations_run: int = 0
    clip_factor: float = 1.0
    config: FactorizationConfig = field(default_factory=FactorizationConfig)

    def reconstruction(self) -> np.ndarray:
        return (self.U * self.L) @ self.T

    def to_dict(self) -> dict:
        return {
            "rows": list(self.rows),
            "terms": list(self.terms),
            "U": self.U.tolist(),
            "T": self.T.tolist(),
            "L": self.L.astype(int).tolist(),
            "objective_trace": list(self.objective_trace),
            "converged": self.converged,
            "iterations_run": self.iterations_run,
            "clip_factor": self.clip_factor,
            "config": asdict(self.config),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FactorModel":
        return cls(
            U=np.asarray(d["U"], float),
            T=np.asarray(d["T"], float),
            L=np.asarray(d["L"], float),
            rows=list(d["rows"]),
            terms=list(d["terms"]),
            objective_trace=list(d["objective_trace"]),
            converged=bool(d["converged"]),
            iterations_run=int(d["iterations_run"]),
            clip_factor=float(d["clip_factor"]),
            config=FactorizationConfig(**d["config"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FactorModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _as_matrix(V):
    if isinstance(V, np.ndarray):
        return V.astype(float, copy=False)
    if sparse.issparse(V):
        return sparse.csr_matrix(V, dtype=float)
    values = getattr(V, "values", None)  # DocumentTermMatrix
    if values is not None:
        return _as_matrix(values)
    return np.asarray(V, dtype=float)


def objective(V, U: np.ndarray, T: np.ndarray, L: np.ndarray) -> float:
    """||V - (U o L) T||_F^2, exact on the nonzero pattern when V is sparse."""
    V = _as_matrix(V)
    U, T, L = np.asarray(U, float), np.asarray(T, float), np.asarray(L, float)
    n, m = V.shape
    if U.shape != L.shape or U.shape[0] != n or T.shape != (U.shape[1], m):
        raise DimensionMismatch(f"V {V.shape}, U {U.shape}, L {L.shape}, T {T.shape}")
    W = U * L
    if isinstance(V, np.ndarray):
        R = V - W @ T
        return float(np.sum(R * R))
    coo = V.tocoo()
    approx_nz = np.einsum("ik,ki->i", W[coo.row], T[:, coo.col])
    on_pattern = float(np.sum((coo.data - approx_nz) ** 2))
    # ||WT||^2 over all cells minus the part already counted on the pattern
    total_sq = float(np.sum((W.T @ W) * (T @ T.T)))
    return on_pattern + max(total_sq - float(np.sum(approx_nz**2)), 0.0)


def initialize(V, k: int, config: FactorizationConfig) -> tuple[np.ndarray, np.ndarray]:
    V = _as_matrix(V)
    n, m = V.shape
    if config.init == "nndsvd":
        return _nndsvd(V, k)
    rng = np.random.default_rng(config.rng_seed)
    scale = math.sqrt(float(V.sum()) / (n * m) / k)
    # 1 - uniform[0, 1) lands in (0, 1]
    W = (1.0 - rng.random((n, k))) * scale
    H = (1.0 - rng.random((k, m))) * scale
    return W, H


def _nndsvd(V, k):
    """Nonnegative double SVD init (Boutsidis & Gallopoulos), zeros filled with the mean."""
    from scipy.sparse.linalg import svds

    n, m = V.shape
    if min(n, m) - 1 > k:
        # fixed start vector keeps the init deterministic
        v0 = np.full(min(n, m), 1.0 / math.sqrt(min(n, m)))
        u, s, vt = svds(sparse.csr_matrix(V), k=k, v0=v0)
        order = np.argsort(-s)
        u, s, vt = u[:, order], s[order], vt[order]
    else:
        dense = V.toarray() if sparse.issparse(V) else V
        u, s, vt = np.linalg.svd(dense, full_matrices=False)
        u, s, vt = u[:, :k], s[:k], vt[:k]
    W = np.zeros((n, k))
    H = np.zeros((k, m))
    W[:, 0] = math.sqrt(s[0]) * np.abs(u[:, 0])
    H[0] = math.sqrt(s[0]) * np.abs(vt[0])
    for j in range(1, k):
        x, y = u[:, j], vt[j]
        xp, xn = np.maximum(x, 0), np.maximum(-x, 0)
        yp, yn = np.maximum(y, 0), np.maximum(-y, 0)
        mp = np.linalg.norm(xp) * np.linalg.norm(yp)
        mn = np.linalg.norm(xn) * np.linalg.norm(yn)
        if mp >= mn:
            a, b, sigma = xp / max(np.linalg.norm(xp), 1e-300), yp / max(np.linalg.norm(yp), 1e-300), mp
        else:
            a, b, sigma = xn / max(np.linalg.norm(xn), 1e-300), yn / max(np.linalg.norm(yn), 1e-300), mn
        W[:, j] = math.sqrt(s[j] * sigma) * a
        H[j] = math.sqrt(s[j] * sigma) * b
    avg = float(V.sum()) / (n * m)
    W[W == 0] = avg
    H[H == 0] = avg
    return W, H


def fit(
    V,
    L,
    config: FactorizationConfig | None = None,
    init: tuple[np.ndarray, np.ndarray] | None = None,
    normalize: bool = True,
) -> FactorModel:
    """Fit the masked factorization.

    ``objective_trace[0]`` is the objective at the (masked) initialization and
    ``objective_trace[i]`` the objective after sweep ``i``. Iteration stops
    when the relative objective change drops below the tolerance.
    """
    config = config or FactorizationConfig()
    rows = list(getattr(V, "rows", []) or [])
    vocab = getattr(V, "vocabulary", None)
    terms = list(vocab.terms) if vocab is not None else []
    mask = np.asarray(getattr(L, "values", L), dtype=float)
    V = _as_matrix(V)
    n, m = V.shape
    k = config.k
    if mask.shape != (n, k):
        raise DimensionMismatch(f"mask shape {mask.shape} does not match ({n}, {k})")
    if n < k or m < k:
        raise DimensionMismatch(f"V {V.shape} too small for k={k}")
    if not np.isin(mask, (0.0, 1.0)).all() or (mask.sum(axis=1) == 0).any():
        raise FactorizationError("mask must be binary without all-zero rows")
    data = V.data if sparse.issparse(V) else V
    if (data < 0).any():
        raise NonNegativityViolation("V has negative entries")

    if init is None:
        W, H = initialize(V, k, config)
    else:
        W, H = (np.array(a, dtype=float) for a in init)
        if W.shape != (n, k) or H.shape != (k, m):
            raise DimensionMismatch("init factors do not conform")
    W = W * mask
    eps = config.epsilon

    trace = [objective(V, W, H, mask)]
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        WL = W * mask
        W = mask * W * np.asarray(V @ H.T) / (WL @ (H @ H.T) + eps)
        WL = W * mask
        H = H * np.asarray(WL.T @ V if isinstance(V, np.ndarray) else (V.T @ WL).T) / ((WL.T @ WL) @ H + eps)
        trace.append(objective(V, W, H, mask))
        prev, cur = trace[-2], trace[-1]
        if abs(prev - cur) <= config.relative_tolerance * max(prev, np.finfo(float).tiny):
            converged = True
            break

    model = FactorModel(
        U=W,
        T=H,
        L=mask,
        rows=rows,
        terms=terms,
        objective_trace=trace,
        converged=converged,
        iterations_run=it,
        config=config,
    )
    return normalize_model(model) if normalize else model


def normalize_model(model: FactorModel) -> FactorModel:
    """L1-normalize each topic row of T, push the scale into U, clip U into [0, 1].

    The clip divides U by max(1, max U); that factor is multiplied into
    ``clip_factor`` so the reconstruction can be recovered.
    """
    T = np.array(model.T, dtype=float)
    U = np.array(model.U, dtype=float)
    sums = T.sum(axis=1)
    if (sums <= 0).any():
        raise DegenerateTopic(f"topic(s) {np.flatnonzero(sums <= 0).tolist()} have an all-zero term row")
    T = T / sums[:, None]
    U = U * sums[None, :]
    clip = max(1.0, float(U.max())) if U.size else 1.0
    if clip != 1.0:
        U = U / clip
    return replace(model, U=U, T=T, clip_factor=model.clip_factor * clip)
