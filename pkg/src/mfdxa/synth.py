"""Synthetic series with known scaling, and their analytic exponents.

Randomness comes from numpy's PCG64 bit generator seeded with the
:class:`GeneratorSpec` seed, which gives the same stream on every platform.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .exceptions import EmbeddingFailure, InvalidSpec
from .series import ReturnSeries

PRNG_NAME = "numpy.random.PCG64"
MIN_LENGTH = 256
FARIMA_TRUNCATION = 1000
FARIMA_TAIL_TOLERANCE = 1e-4

KINDS = ("white_noise", "fgn", "pmodel", "farima_pair")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    N: int
    seed: int = 0
    hurst: Optional[float] = None
    a: Optional[float] = None
    d_x: Optional[float] = None
    d_y: Optional[float] = None
    independent: bool = False
    truncation: int = FARIMA_TRUNCATION

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if int(self.N) != self.N or self.N < MIN_LENGTH:
            raise InvalidSpec(f"length must be an integer >= {MIN_LENGTH}, got {self.N}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")
        if self.kind == "fgn":
            if self.hurst is None or not 0.0 < self.hurst < 1.0:
                raise InvalidSpec(f"fgn needs 0 < H < 1, got {self.hurst}")
        elif self.kind == "pmodel":
            if self.a is None or not 0.5 < self.a < 1.0:
                raise InvalidSpec(f"pmodel needs 0.5 < a < 1, got {self.a}")
            if self.N & (self.N - 1):
                raise InvalidSpec(f"pmodel length must be a power of 2, got {self.N}")
        elif self.kind == "farima_pair":
            for name in ("d_x", "d_y"):
                d = getattr(self, name)
                if d is None or not abs(d) < 0.5:
                    raise InvalidSpec(f"farima_pair needs |{name}| < 0.5, got {d}")
            if self.truncation < 1:
                raise InvalidSpec("truncation must be positive")

    def to_dict(self):
        keys = ["kind", "N", "seed"] + {
            "white_noise": [],
            "fgn": ["hurst"],
            "pmodel": ["a"],
            "farima_pair": ["d_x", "d_y", "independent", "truncation"],
        }[self.kind]
        d = asdict(self)
        return {k: d[k] for k in keys}


def rng_for(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def gen_white_noise(spec: GeneratorSpec) -> ReturnSeries:
    return ReturnSeries(rng_for(spec.seed).standard_normal(int(spec.N)), source_label="white_noise")


def fgn_autocovariance(k, hurst):
    """Autocovariance of unit-variance fractional Gaussian noise at lag ``k``."""
    k = np.abs(np.asarray(k, dtype=float))
    H2 = 2.0 * hurst
    return 0.5 * ((k + 1.0) ** H2 - 2.0 * k ** H2 + np.abs(k - 1.0) ** H2)


def _circulant_fgn(N, hurst, rng):
    gamma = fgn_autocovariance(np.arange(N + 1), hurst)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eig = np.fft.fft(row).real
    if np.min(eig) < -1e-10 * np.max(eig):
        raise EmbeddingFailure(f"circulant embedding is not PSD for N={N}, H={hurst}")
    eig = np.clip(eig, 0.0, None)
    M = row.size
    z = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    y = np.fft.fft(np.sqrt(eig / M) * z)
    return y.real[:N]


def _hosking_fgn(N, hurst, rng):
    """Durbin-Levinson recursion; O(N^2) but never fails."""
    gamma = fgn_autocovariance(np.arange(N), hurst)
    eps = rng.standard_normal(N)
    out = np.empty(N)
    out[0] = eps[0]
    phi = np.zeros(0)
    v = gamma[0]
    for t in range(1, N):
        k = (gamma[t] - np.dot(phi, gamma[1:t][::-1])) / v
        phi = np.concatenate([phi - k * phi[::-1], [k]])
        v *= 1.0 - k * k
        out[t] = np.dot(phi, out[t - 1::-1]) + math.sqrt(v) * eps[t]
    return out


def gen_fgn(spec: GeneratorSpec, method="circulant") -> ReturnSeries:
    """Fractional Gaussian noise by circulant embedding, with a Hosking fallback."""
    if spec.kind != "fgn":
        raise InvalidSpec(f"gen_fgn called with kind {spec.kind!r}")
    rng = rng_for(spec.seed)
    N, H = int(spec.N), float(spec.hurst)
    if method == "hosking":
        values = _hosking_fgn(N, H, rng)
    else:
        try:
            values = _circulant_fgn(N, H, rng)
        except EmbeddingFailure as exc:
            warnings.warn(f"{exc}; falling back to Hosking recursion", RuntimeWarning)
            values = _hosking_fgn(N, H, rng_for(spec.seed))
    return ReturnSeries(values, source_label=f"fgn(H={H})")


def pmodel_masses(N, a):
    """Binomial cascade: each cell hands ``a`` of its mass to the left half."""
    levels = int(round(math.log2(N)))
    m = np.ones(1)
    for _ in range(levels):
        m = np.stack([m * a, m * (1.0 - a)], axis=1).reshape(-1)
    return m


def gen_pmodel(spec: GeneratorSpec) -> ReturnSeries:
    if spec.kind != "pmodel":
        raise InvalidSpec(f"gen_pmodel called with kind {spec.kind!r}")
    return ReturnSeries(pmodel_masses(int(spec.N), float(spec.a)), source_label=f"pmodel(a={spec.a})")


def pmodel_tau(a, q):
    """Mass exponent of the binomial measure, ``-log2(a^q + (1-a)^q)``."""
    q = np.asarray(q, dtype=float)
    return -np.log2(a ** q + (1.0 - a) ** q)


def pmodel_hq_oracle(a, q, step=1e-6):
    """Generalised Hurst exponent of the binomial cascade's increments.

    ``h(q) = (1 + tau(q)) / q``; at q = 0 the symmetric limit with ``step``
    is used.
    """
    def h(qv):
        return (1.0 - np.log2(a ** qv + (1.0 - a) ** qv)) / qv

    q_arr = np.asarray(q, dtype=float)
    zero = np.abs(q_arr) < 1e-9
    safe = np.where(zero, 1.0, q_arr)
    out = np.where(zero, 0.5 * (h(step) + h(-step)), h(safe))
    return float(out) if out.ndim == 0 else out


def pmodel_alpha_oracle(a, q):
    """Singularity strength ``d tau / dq`` of the binomial cascade."""
    q = np.asarray(q, dtype=float)
    wa, wb = a ** q, (1.0 - a) ** q
    return -(wa * np.log(a) + wb * np.log(1.0 - a)) / ((wa + wb) * np.log(2.0))


def farima_weights(d, J=FARIMA_TRUNCATION):
    """MA(inf) weights Gamma(j+d) / (Gamma(j+1) Gamma(d)) for j = 0..J."""
    psi = np.empty(J + 1)
    psi[0] = 1.0
    j = np.arange(1, J + 1)
    psi[1:] = np.cumprod((j - 1 + d) / j)
    return psi


def farima_tail_fraction(d, J=FARIMA_TRUNCATION):
    """Share of the FARIMA(0,d,0) variance carried by weights beyond lag J."""
    if d == 0:
        return 0.0
    total = math.exp(gammaln(1.0 - 2.0 * d) - 2.0 * gammaln(1.0 - d))
    kept = float(np.sum(farima_weights(d, J) ** 2))
    return max(0.0, 1.0 - kept / total)


def gen_farima_pair(spec: GeneratorSpec):
    """Two FARIMA(0, d, 0) series; they share innovations unless ``spec.independent``."""
    if spec.kind != "farima_pair":
        raise InvalidSpec(f"gen_farima_pair called with kind {spec.kind!r}")
    rng = rng_for(spec.seed)
    N, J = int(spec.N), int(spec.truncation)
    e_x = rng.standard_normal(N + J)
    e_y = rng.standard_normal(N + J) if spec.independent else e_x
    out = []
    for d, e in ((spec.d_x, e_x), (spec.d_y, e_y)):
        tail = farima_tail_fraction(d, J)
        if tail > FARIMA_TAIL_TOLERANCE:
            warnings.warn(
                f"FARIMA d={d}: weights beyond lag {J} carry {tail:.2e} of the variance",
                RuntimeWarning,
            )
        values = np.convolve(e, farima_weights(d, J), mode="valid")
        out.append(ReturnSeries(values, source_label=f"farima(d={d})"))
    return out[0], out[1]


def generate(spec: GeneratorSpec):
    """Dispatch on ``spec.kind``; returns a tuple of one or two series."""
    if spec.kind == "white_noise":
        return (gen_white_noise(spec),)
    if spec.kind == "fgn":
        return (gen_fgn(spec),)
    if spec.kind == "pmodel":
        return (gen_pmodel(spec),)
    return gen_farima_pair(spec)
