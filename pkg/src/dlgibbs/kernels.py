"""The three MCMC transition kernels and full posterior chains.

All three kernels draw from the same conditional distributions; what
separates a correct sampler from the published incorrect one is purely the
order of the blocks inside the joint (psi, phi, tau | theta) update:

* ORIGINAL   - (psi, tau, phi): psi from the incoming (phi, tau), tau from
  the incoming phi, phi from theta.  This is the published order and is
  deliberately preserved, bugs included; it samples the marginalized
  conditionals after the full conditional they were marginalized out of.
* CORRECTED  - (phi, tau, psi): marginal first, conditional later.  tau
  consumes the phi drawn this sweep, psi consumes both.
* ALTERNATIVE - works on (psi, lambda) with lambda_j = phi_j tau:
  lambda_j | theta_j first, then psi | theta, lambda.

``hyper_step`` exposes the block composition with an arbitrary order so the
ordering itself can be tested as the load-bearing difference.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import _compiled as _c
from .errors import ParameterError
from .model import AltHyperState, HyperState, PriorConfig, _as_vector
from .rng import RngStream

__all__ = [
    "KernelId",
    "ChainConfig",
    "SampleMatrix",
    "hyper_step",
    "kernel_step_original",
    "kernel_step_corrected",
    "kernel_step_alternative",
    "run_posterior_chain",
]


class KernelId(str, enum.Enum):
    ORIGINAL = "original"
    CORRECTED = "corrected"
    ALTERNATIVE = "alternative"


# Block update orders inside the joint (psi, phi, tau | theta) update.
ORDER_ORIGINAL = ("psi", "tau", "phi")
ORDER_CORRECTED = ("phi", "tau", "psi")

_BLOCK_CODES = {"psi": _c.BLOCK_PSI, "tau": _c.BLOCK_TAU, "phi": _c.BLOCK_PHI}


def _order_codes(order: tuple[str, str, str]) -> tuple[int, int, int]:
    if sorted(order) != ["phi", "psi", "tau"]:
        raise ParameterError(
            f"order must be a permutation of ('psi', 'tau', 'phi'), got {order!r}"
        )
    return tuple(_BLOCK_CODES[name] for name in order)


def kernel_order(kernel: KernelId) -> tuple[str, str, str]:
    """The hyper-block update order a standard-parameterization kernel uses."""
    if kernel == KernelId.ORIGINAL:
        return ORDER_ORIGINAL
    if kernel == KernelId.CORRECTED:
        return ORDER_CORRECTED
    raise ParameterError(f"{kernel} has no standard-parameterization block order")


@dataclass(frozen=True)
class ChainConfig:
    """Chain-length and provenance settings for one posterior run."""

    iterations: int
    burn_in: int
    thin: int
    seed: int
    kernel: KernelId
    prior: PriorConfig

    def __post_init__(self):
        if self.iterations < 1:
            raise ParameterError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 <= self.burn_in < self.iterations:
            raise ParameterError(
                f"burn_in must satisfy 0 <= burn_in < iterations, got "
                f"{self.burn_in} vs {self.iterations}"
            )
        if self.thin < 1:
            raise ParameterError(f"thin must be >= 1, got {self.thin}")
        object.__setattr__(self, "kernel", KernelId(self.kernel))

    @property
    def retained(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


@dataclass
class SampleMatrix:
    """Column-labeled matrix of retained draws, one row per retained sweep."""

    names: tuple[str, ...]
    rows: np.ndarray
    meta: ChainConfig

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.names.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def theta(self) -> np.ndarray:
        """The (rows, n) block of theta draws."""
        return self.rows[:, : self.meta.prior.n]

    def to_csv(self) -> str:
        """Full-precision CSV: shortest decimal representation, round-trip exact."""
        lines = [",".join(self.names)]
        for row in self.rows:
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def _state_columns(n: int, kernel: KernelId) -> tuple[str, ...]:
    names = [f"theta_{j + 1}" for j in range(n)]
    names += [f"psi_{j + 1}" for j in range(n)]
    if kernel == KernelId.ALTERNATIVE:
        names += [f"lambda_{j + 1}" for j in range(n)]
    else:
        names += [f"phi_{j + 1}" for j in range(n)]
        names.append("tau")
    return tuple(names)


def hyper_step(
    order: tuple[str, str, str],
    state: HyperState,
    theta,
    config: PriorConfig,
    rng: RngStream,
) -> HyperState:
    """One joint (psi, phi, tau | theta) update with an explicit block order.

    The ordering is the load-bearing part of this package: permuting the
    corrected kernel's ('phi', 'tau', 'psi') back to ('psi', 'tau', 'phi')
    reproduces the original kernel draw-for-draw.
    """
    codes = _order_codes(order)
    theta = _as_vector(theta, "theta", config.n)
    psi = state.psi.copy()
    phi = state.phi.copy()
    tau = _c.hyper_step_standard(rng.gen, theta, psi, phi, state.tau, config.a, *codes)
    return HyperState(psi=psi, phi=phi, tau=tau)


def kernel_step_original(state: HyperState, theta, config: PriorConfig,
                         rng: RngStream) -> HyperState:
    """The published update order (psi, tau, phi) - incorrect by design.

    psi is drawn from the incoming (phi, tau) and tau from the incoming phi,
    i.e. the marginalized conditionals run after the block they marginalize
    out.  Kept verbatim so the harness and the simulation study can measure
    the consequences; do not "fix" the order here.
    """
    return hyper_step(ORDER_ORIGINAL, state, theta, config, rng)


def kernel_step_corrected(state: HyperState, theta, config: PriorConfig,
                          rng: RngStream) -> HyperState:
    """Corrected order (phi, tau, psi): marginal first, conditional later."""
    return hyper_step(ORDER_CORRECTED, state, theta, config, rng)


def kernel_step_alternative(state: AltHyperState, theta, config: PriorConfig,
                            rng: RngStream) -> AltHyperState:
    """Alternative-parameterization update: lambda | theta, then psi | theta, lambda."""
    if not isinstance(state, AltHyperState):
        raise ParameterError("kernel_step_alternative needs an AltHyperState")
    theta = _as_vector(theta, "theta", config.n)
    psi = state.psi.copy()
    lam = state.lam.copy()
    _c.hyper_step_alt(rng.gen, theta, psi, lam, config.a)
    return AltHyperState(psi=psi, lam=lam)


def run_posterior_chain(y, chain: ChainConfig, rng: RngStream | None = None) -> SampleMatrix:
    """Run one posterior chain on data y and return the retained draws.

    The hyper state is initialized with a prior draw, then each sweep updates
    theta from its full conditional and applies the kernel's joint hyper
    update.  Deterministic under (chain.seed, kernel): passing rng=None
    derives the stream from chain.seed.
    """
    y = _as_vector(y, "y", chain.prior.n)
    if rng is None:
        rng = RngStream(chain.seed)
    n = chain.prior.n
    rows = chain.retained
    if chain.kernel == KernelId.ALTERNATIVE:
        out = np.empty((rows, 3 * n))
        _c.run_chain_alt(rng.gen, y, chain.prior.a, chain.iterations,
                         chain.burn_in, chain.thin, out)
    else:
        codes = _order_codes(kernel_order(chain.kernel))
        out = np.empty((rows, 3 * n + 1))
        _c.run_chain_standard(rng.gen, y, chain.prior.a, *codes,
                              chain.iterations, chain.burn_in, chain.thin, out)
    if not np.all(np.isfinite(out)):
        raise ParameterError("chain produced non-finite draws")
    return SampleMatrix(names=_state_columns(n, chain.kernel), rows=out,
                        meta=replace(chain))


def posterior_summary(matrix: SampleMatrix) -> dict[str, np.ndarray]:
    """Per-coordinate posterior mean, median and central 95% interval of theta."""
    theta = matrix.theta()
    return {
        "mean": theta.mean(axis=0),
        "median": np.median(theta, axis=0),
        "q2.5": np.quantile(theta, 0.025, axis=0),
        "q97.5": np.quantile(theta, 0.975, axis=0),
    }
