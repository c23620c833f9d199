"""Network parameterisation shared by the analytic and simulation code."""

from dataclasses import asdict, dataclass, replace
import math

from .errors import InvalidParams

PER_KM2 = 1e-6  # BS/km^2 -> BS/m^2


@dataclass(frozen=True)
class NetworkParams:
    """Two-tier network: PPP macro tier, PHP small-cell tier.

    Densities are per square metre, lengths in metres, powers in any common
    unit (only the ratio ``P1 / P2`` matters for SIR).
    """

    lambda1: float
    lambda2: float
    D: float
    alpha: float = 4.0
    P1: float = 1.0
    P2: float = 1.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "D", "alpha", "P1", "P2"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParams(f"{name} must be finite")
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise InvalidParams("densities must be positive")
        if self.D < 0:
            raise InvalidParams("hole radius D must be nonnegative")
        if self.alpha <= 2:
            raise InvalidParams("path-loss exponent must exceed 2")
        if self.P1 <= 0 or self.P2 <= 0:
            raise InvalidParams("transmit powers must be positive")

    @classmethod
    def from_km2(cls, lambda1_per_km2, lambda2_per_km2, **kw):
        return cls(lambda1=lambda1_per_km2 * PER_KM2, lambda2=lambda2_per_km2 * PER_KM2, **kw)

    def with_(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)


# Both reference setups use 1 macro/km^2 and alpha = 4; only the ratio P1/P2 is fixed.
SETUP1 = NetworkParams.from_km2(1.0, 50.0, D=50.0, alpha=4.0, P1=1000.0, P2=1.0)
SETUP2 = NetworkParams.from_km2(1.0, 25.0, D=200.0, alpha=4.0, P1=100.0, P2=1.0)
PRESETS = {"setup1": SETUP1, "setup2": SETUP2}


def db_to_linear(gamma_db):
    return 10.0 ** (gamma_db / 10.0)


def linear_to_db(gamma):
    return 10.0 * math.log10(gamma)
