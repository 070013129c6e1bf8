from dataclasses import dataclass, replace

import numpy as np

from core.conf import mvboot_setting
from core.exceptions import InvalidConfiguration
from core.streams import validate_seed


@dataclass(frozen=True)
class BootConfig:
    """
    Replicate count, master seed, nominal miscoverage and the pairs redraw limit.

    ``B=None`` defers the replicate count to ``resolve(n)``, which applies the
    ``REPLICATES_PER_CASE`` rule (B = 4n by default).
    """
    B: int = None
    seed: int = 0
    alpha: float = None
    max_redraws: int = None

    def __post_init__(self):
        alpha = mvboot_setting('DEFAULT_ALPHA') if self.alpha is None else float(self.alpha)
        max_redraws = mvboot_setting('MAX_REDRAWS') if self.max_redraws is None else int(self.max_redraws)
        if self.B is not None and (isinstance(self.B, bool) or int(self.B) != self.B or self.B < 2):
            raise InvalidConfiguration(f"B must be an integer >= 2, got {self.B!r}")
        if not 0.0 < alpha < 1.0:
            raise InvalidConfiguration(f"alpha must lie in (0, 1), got {alpha}")
        if max_redraws < 0:
            raise InvalidConfiguration(f"max_redraws must be >= 0, got {max_redraws}")
        object.__setattr__(self, 'seed', validate_seed(self.seed))
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'max_redraws', max_redraws)
        if self.B is not None:
            object.__setattr__(self, 'B', int(self.B))

    def resolve(self, n):
        if self.B is not None:
            return self
        return replace(self, B=max(2, mvboot_setting('REPLICATES_PER_CASE') * int(n)))

    def as_dict(self):
        return {'B': self.B, 'seed': self.seed, 'alpha': self.alpha, 'max_redraws': self.max_redraws}


@dataclass(frozen=True)
class BootstrapDraws:
    """
    The stored replicates of one bootstrap run.

    ``draws`` is B×rp with row b holding vec(β̂*_b); ``sigma_star`` is B×r×r
    with every replicate's Σ̂*. ``var_star`` is always recomputable from
    ``draws`` with ``intervals.var_star``.
    """
    method: str
    draws: np.ndarray
    var_star: np.ndarray
    sigma_star: np.ndarray
    resample_counts: np.ndarray
    config: BootConfig
    labels: tuple = ()
    redraws: int = 0
    design_moment_last: np.ndarray = None

    def __post_init__(self):
        for name in ('draws', 'var_star', 'sigma_star', 'resample_counts', 'design_moment_last'):
            value = getattr(self, name)
            if value is not None:
                value = np.asarray(value)
                value.setflags(write=False)
                object.__setattr__(self, name, value)

    @property
    def B(self):
        return self.draws.shape[0]

    @property
    def sigma_star_last(self):
        """Σ̂* of the final replicate."""
        return self.sigma_star[-1]

    def provenance(self):
        return {'method': self.method, 'redraws': self.redraws, **self.config.as_dict()}
