"""Data generators for the simulation designs.

Designs
-------
ex1a  independent groups, normal class mixtures with AR(0.7) covariance
ex1b  independent groups, exponential class mixtures mixed by Sigma^(1/2)
ex2a  dependent groups, joint (p+q)-dimensional normal mixture
ex2b  dependent groups, 2-d exponential mixture mixed by Sigma^(1/2)
ex3   binary logistic model on V ~ N(0, Sigma_10); X = V1..V5, Y from V6..V10

``beta`` only moves the ``x`` class distributions, so at ``beta = 0`` both
groups share the same association with the labels.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, fields

import numpy as np

from .core import DataError, PairedDataset, RngStream, as_stream

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DESIGNS = ("ex1a", "ex1b", "ex2a", "ex2b", "ex3")
SIGMA_VARIANTS = ("independent", "ar")
EXP_RATES = (1.0, 2.0, 4.0)
AR_BASE = 0.7
EX3_AR_BASE = 0.5
EX3_DIM = 10
EX3_ACTIVE = 5
MAX_REDRAWS = 100


@dataclass(frozen=True)
class CovarianceSpec:
    dim: int
    base: float = AR_BASE

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not -1.0 < self.base < 1.0:
            raise ValueError(f"base must lie in (-1, 1), got {self.base}")


def ar_covariance(spec: CovarianceSpec | int, base: float | None = None) -> np.ndarray:
    """AR(1)-type matrix with entries ``base ** |i - j|``.

    ``spec`` may be a :class:`CovarianceSpec` or a dimension.
    """
    if not isinstance(spec, CovarianceSpec):
        spec = CovarianceSpec(int(spec), AR_BASE if base is None else base)
    i = np.arange(spec.dim)
    return np.power(float(spec.base), np.abs(i[:, None] - i[None, :]))


def psd_sqrt(sigma) -> np.ndarray:
    """Symmetric square root of a symmetric positive semidefinite matrix.

    Eigenvalues down to ``-1e-10`` are clamped to zero.
    """
    s = np.asarray(sigma, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DataError(f"expected a square matrix, got shape {s.shape}")
    if not np.allclose(s, s.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(s).max())):
        raise DataError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(s)
    if vals.min() < -1e-10:
        raise DataError(f"matrix has a negative eigenvalue {vals.min():.3g}")
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return (root + root.T) / 2.0


def sample_mvnormal(mean, sigma, n: int, rng) -> np.ndarray:
    """``n`` draws from N(mean, sigma) as ``mean + z @ sigma^(1/2)``."""
    mean = np.atleast_1d(np.asarray(mean, dtype=np.float64))
    sigma = np.atleast_2d(np.asarray(sigma, dtype=np.float64))
    if sigma.shape != (mean.size, mean.size):
        raise DataError(f"mean has length {mean.size} but sigma is {sigma.shape}")
    z = as_stream(rng).generator.standard_normal((int(n), mean.size))
    return mean + z @ psd_sqrt(sigma)


def sample_exponential_vector(rate: float, dim: int, rng, size: int | None = None,
                              convention: str = "rate") -> np.ndarray:
    """I.i.d. exponential draws, shape ``(dim,)`` or ``(size, dim)``.

    With ``convention="rate"`` the mean is ``1 / rate``; with ``"mean"`` the
    parameter is read as the mean itself.
    """
    if not rate > 0:
        raise ValueError(f"rate must be positive, got {rate}")
    if convention == "rate":
        scale = 1.0 / rate
    elif convention == "mean":
        scale = float(rate)
    else:
        raise ValueError(f"convention must be 'rate' or 'mean', got {convention!r}")
    shape = (int(dim),) if size is None else (int(size), int(dim))
    return as_stream(rng).generator.exponential(scale, shape)


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of one simulated sample.

    For ``ex3`` the labels come from the logistic model, so only the total
    ``sum(class_sizes)`` is used; ``p`` must be 5 and ``q`` picks
    ``Y = (V6, ..., V(5+q))``.
    """
    design: str = "ex1a"
    dims: tuple = (1, 1)
    class_sizes: tuple = (40, 40, 40)
    beta: float = 0.0
    sigma_variant: str = "independent"
    seed: int = 0
    exp_convention: str = "rate"

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(v) for v in self.dims))
        object.__setattr__(self, "class_sizes", tuple(int(v) for v in self.class_sizes))
        object.__setattr__(self, "beta", float(self.beta))
        self.validate()

    @property
    def p(self) -> int:
        return self.dims[0]

    @property
    def q(self) -> int:
        return self.dims[1]

    @property
    def n(self) -> int:
        return sum(self.class_sizes)

    def validate(self):
        if self.design not in DESIGNS:
            raise DataError(
                f"unknown design {self.design!r}; valid designs: {', '.join(DESIGNS)}"
            )
        if len(self.dims) != 2 or min(self.dims) < 1:
            raise DataError(f"dims must be (p, q) with p, q >= 1, got {self.dims}")
        if not 0.0 <= self.beta <= 1.0:
            raise DataError(f"beta must lie in [0, 1], got {self.beta}")
        if self.sigma_variant not in SIGMA_VARIANTS:
            raise DataError(f"sigma_variant must be one of {SIGMA_VARIANTS}")
        if self.exp_convention not in ("rate", "mean"):
            raise DataError("exp_convention must be 'rate' or 'mean'")
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must be a non-negative 64-bit integer")
        if self.design == "ex3":
            if self.p != EX3_ACTIVE or not 1 <= self.q <= EX3_DIM - EX3_ACTIVE:
                raise DataError("ex3 needs p = 5 and 1 <= q <= 5")
            if self.n < 6:
                raise DataError("ex3 needs a total sample size of at least 6")
            return
        if len(self.class_sizes) != 3:
            raise DataError(f"{self.design} has 3 classes; got sizes {self.class_sizes}")
        if min(self.class_sizes) < 3:
            raise DataError(f"every class needs at least 3 rows, got {self.class_sizes}")
        if self.design == "ex2b" and self.dims != (1, 1):
            raise DataError("ex2b is defined for p = q = 1 only")

    def with_beta(self, beta: float) -> "ScenarioConfig":
        return ScenarioConfig(**{**self.to_dict(), "beta": beta})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_flat(self) -> dict:
        """Flat key/value form: ``p``, ``q`` and ``n1..nK`` spelled out."""
        out = {"design": self.design, "p": self.p, "q": self.q}
        for k, nk in enumerate(self.class_sizes, 1):
            out[f"n{k}"] = nk
        out.update(beta=self.beta, sigma_variant=self.sigma_variant, seed=self.seed,
                   exp_convention=self.exp_convention)
        return out

    @classmethod
    def from_flat(cls, kv: dict) -> "ScenarioConfig":
        kv = dict(kv)
        sizes = kv.pop("n", None)
        numbered = sorted((int(k[1:]), k) for k in kv if k[:1] == "n" and k[1:].isdigit())
        if numbered:
            sizes = [kv.pop(k) for _, k in numbered]
        args = {}
        if sizes is not None:
            args["class_sizes"] = tuple(sizes) if isinstance(sizes, (list, tuple)) else (sizes,)
        if "p" in kv or "q" in kv:
            args["dims"] = (kv.pop("p", 1), kv.pop("q", 1))
        for f in fields(cls):
            if f.name in kv:
                args[f.name] = kv.pop(f.name)
        if kv:
            raise DataError(f"unknown config keys: {sorted(kv)}")
        return cls(**args)


def format_flat(kv: dict) -> str:
    """Render a flat mapping as ``key = value`` lines (a TOML subset)."""
    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if isinstance(v, float):
            return repr(v)
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        return str(v)
    return "".join(f"{k} = {fmt(v)}\n" for k, v in kv.items())


def parse_flat(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"malformed config: {exc}") from None


def save_config(cfg: ScenarioConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_flat(cfg.to_flat()))


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return ScenarioConfig.from_flat(parse_flat(fh.read()))


# ---------------------------------------------------------------------------
# Designs
# ---------------------------------------------------------------------------

def _labels(sizes):
    return np.repeat(np.arange(1, len(sizes) + 1), sizes)


def _ex1a(cfg, gen):
    sx, sy = psd_sqrt(ar_covariance(cfg.p)), psd_sqrt(ar_covariance(cfg.q))
    xs, ys = [], []
    for k, nk in enumerate(cfg.class_sizes):
        xs.append((2.0 + k) + k * cfg.beta + gen.standard_normal((nk, cfg.p)) @ sx)
        ys.append(float(k) + gen.standard_normal((nk, cfg.q)) @ sy)
    return np.vstack(xs), np.vstack(ys)


def _exp_scale(cfg, rate):
    return 1.0 / rate if cfg.exp_convention == "rate" else rate


def _ex1b(cfg, gen):
    sx, sy = psd_sqrt(ar_covariance(cfg.p)), psd_sqrt(ar_covariance(cfg.q))
    xs, ys = [], []
    for k, nk in enumerate(cfg.class_sizes):
        scale = _exp_scale(cfg, EXP_RATES[k])
        shift = cfg.beta if k < 2 else 0.0
        xs.append(gen.exponential(scale, (nk, cfg.p)) @ sx + shift)
        ys.append(gen.exponential(scale, (nk, cfg.q)) @ sy)
    return np.vstack(xs), np.vstack(ys)


def _ex2a(cfg, gen):
    p, q = cfg.dims
    s = psd_sqrt(ar_covariance(p + q))
    rows = []
    for k, nk in enumerate(cfg.class_sizes):
        mu = np.concatenate([np.full(p, 2.0 + k + k * cfg.beta), np.full(q, float(k))])
        rows.append(mu + gen.standard_normal((nk, p + q)) @ s)
    w = np.vstack(rows)
    return w[:, :p], w[:, p:]


def _ex2b(cfg, gen):
    s = psd_sqrt(ar_covariance(2))
    rows = []
    for k, nk in enumerate(cfg.class_sizes):
        w = gen.exponential(_exp_scale(cfg, EXP_RATES[k]), (nk, 2)) @ s
        if k < 2:
            w[:, 0] += cfg.beta
        rows.append(w)
    w = np.vstack(rows)
    return w[:, :1], w[:, 1:]


def ex3_logit(v) -> np.ndarray:
    """Log-odds of ``Z = 1`` given ``V`` in the logistic design."""
    v = np.asarray(v)
    return (-3.0 + 2.0 * v[:, 0] + 2.0 * v[:, 1] + 2.0 * v[:, 2]
            + 3.0 * np.sin(v[:, 3]) + 4.0 * v[:, 4] ** 2)


def _ex3(cfg, gen):
    base = EX3_AR_BASE if cfg.sigma_variant == "ar" else 0.0
    s = psd_sqrt(ar_covariance(CovarianceSpec(EX3_DIM, base)))
    for _ in range(MAX_REDRAWS):
        v = gen.standard_normal((cfg.n, EX3_DIM)) @ s
        prob = 1.0 / (1.0 + np.exp(-ex3_logit(v)))
        z = np.where(gen.random(cfg.n) < prob, 1, -1)
        if min(np.count_nonzero(z == 1), np.count_nonzero(z == -1)) >= 3:
            return v[:, :EX3_ACTIVE], v[:, EX3_ACTIVE:EX3_ACTIVE + cfg.q], z
    raise DataError(f"ex3 sample kept a class below 3 rows after {MAX_REDRAWS} redraws")


_DESIGN_FUNCS = {"ex1a": _ex1a, "ex1b": _ex1b, "ex2a": _ex2a, "ex2b": _ex2b}


def gen_scenario(cfg: ScenarioConfig, rng=None) -> PairedDataset:
    """Draw one sample from the configured design.

    ``rng`` defaults to ``RngStream(cfg.seed)``.
    """
    gen = (RngStream(cfg.seed) if rng is None else as_stream(rng)).generator
    if cfg.design == "ex3":
        x, y, z = _ex3(cfg, gen)
        return PairedDataset(x, y, z)
    x, y = _DESIGN_FUNCS[cfg.design](cfg, gen)
    return PairedDataset(x, y, _labels(cfg.class_sizes))
