"""Model constants and the analytic single-particle spectrum.

A single real coupling ``gamma`` fixes everything else:

* ``lambda_scale``  Lambda = sqrt(1 + 2 gamma^2), the ladder spacing,
* ``alpha``         rotation parameter with tan(sqrt(2) alpha) = sqrt(2) gamma,
* ``eta``           ratio (Lambda - 1) / (sqrt(2) gamma) controlling the
                    geometric decay of the ground eigenvector (eta = 0 at
                    gamma = 0 by the analytic limit).

Mode k of the decoupled ladder carries energy Lambda * (4k - 3) / 4.
"""

import math
from dataclasses import dataclass

__all__ = ["ModelParams", "make_params", "mode_energy", "METRIC_GAMMA_BOUND"]

# The ladder-sum exponential exp(2*alpha*(S+ + S-)) has finite matrix entries
# only while 2*alpha < pi/2, i.e. |gamma| < tan(pi/(2 sqrt(2)))/sqrt(2).
METRIC_GAMMA_BOUND = math.tan(math.pi / (2.0 * math.sqrt(2.0))) / math.sqrt(2.0)


@dataclass(frozen=True)
class ModelParams:
    """Immutable bundle of the model constants derived from gamma."""

    gamma: float
    lambda_scale: float
    alpha: float
    eta: float


def make_params(gamma: float) -> ModelParams:
    """Build the constant bundle for a real coupling gamma.

    Raises ValueError for non-finite gamma.  gamma = 0 is handled by the
    analytic limit eta = alpha = 0.
    """
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise ValueError(f"gamma must be finite, got {gamma!r}")
    lam = math.sqrt(1.0 + 2.0 * gamma * gamma)
    alpha = math.atan(math.sqrt(2.0) * gamma) / math.sqrt(2.0)
    if gamma == 0.0:
        eta = 0.0
    else:
        eta = (lam - 1.0) / (math.sqrt(2.0) * gamma)
    return ModelParams(gamma=gamma, lambda_scale=lam, alpha=alpha, eta=eta)


def mode_energy(params: ModelParams, k: int) -> float:
    """Energy of ladder mode k >= 1: Lambda * (4k - 3) / 4."""
    if k < 1:
        raise ValueError(f"mode index must be >= 1, got {k}")
    return params.lambda_scale * (4 * k - 3) / 4.0
