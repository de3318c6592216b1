"""Process parameters and the scalar maps of the binary hidden Markov model.

The observed process is ``Z_k = X_k xor E_k`` where ``X`` is a stationary
two-state Markov chain and ``E`` is i.i.d. Bernoulli(``eps``) noise.  With
belief ``x = P(X_n = 0 | Z_1^n)`` the one-step maps are

* ``q(x)  = a*x + pi10``                prior P(X_{n+1} = 0 | Z_1^n)
* ``g0(x) = eps + (1 - 2*eps) * q(x)``  P(Z_{n+1} = 0 | Z_1^n)
* ``f0(x) = (1 - eps) * q(x) / g0(x)``  updated belief after observing 0
* ``f1(x) = eps * q(x) / g1(x)``        updated belief after observing 1

with ``a = 1 - pi01 - pi10``.  ``g0`` is written through ``q`` so that the
degenerate noise levels ``eps = 0`` and ``eps = 1/2`` come out exact.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

__all__ = [
    "ModelParams",
    "ContractionInfo",
    "validate",
    "g0",
    "g1",
    "f0",
    "f1",
    "f0_prime",
    "f1_prime",
    "hb",
    "phi_prime",
    "contraction",
]


@dataclass(frozen=True)
class ModelParams:
    """Validated parameters ``(pi01, pi10, eps)`` with stationary ``p0``.

    Build instances with :func:`validate`; the constructor performs no checks.
    """

    pi01: float
    pi10: float
    eps: float
    p0: float = field(init=False)
    strict_regime: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "p0", self.pi10 / (self.pi01 + self.pi10))
        object.__setattr__(
            self, "strict_regime", 0.0 < self.eps < min(self.pi01, self.pi10)
        )

    @property
    def a(self):
        """Slope ``1 - pi01 - pi10`` of the prior-prediction map."""
        return 1.0 - self.pi01 - self.pi10

    def as_dict(self):
        return {
            "pi01": self.pi01,
            "pi10": self.pi10,
            "eps": self.eps,
            "p0": self.p0,
            "strict_regime": self.strict_regime,
        }


@dataclass(frozen=True)
class ContractionInfo:
    """Uniform derivative bounds of the belief maps.

    Attributes
    ----------
    delta : float
        sup over [0, 1] of ``max(|f0'|, |f1'|)``.
    bigM : float
        sup over [0, 1] of ``|d/dx hb(g0(x))|``.
    contractive : bool
        ``delta < 1``.
    """

    delta: float
    bigM: float
    contractive: bool

    def envelope(self, n):
        """Width envelope ``bigM * delta**n``, or None when not contractive."""
        if not self.contractive:
            return None
        return self.bigM * self.delta**n

    def as_dict(self):
        return {"delta": self.delta, "bigM": self.bigM, "contractive": self.contractive}


def _check_finite(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(name, f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise ParameterError(name, f"{name} must be finite, got {value!r}")
    return value


def validate(pi01, pi10, eps):
    """Check the parameter ranges and return a :class:`ModelParams`.

    Transition probabilities must lie in the open interval (0, 1/2); the
    noise level is accepted on the closed interval [0, 1/2].  Whether the
    stricter regime ``0 < eps < min(pi01, pi10)`` holds is reported through
    ``strict_regime`` but not enforced.

    Raises
    ------
    ParameterError
        With ``field`` set to the first offending parameter.
    """
    pi01 = _check_finite("pi01", pi01)
    pi10 = _check_finite("pi10", pi10)
    eps = _check_finite("eps", eps)
    for name, value in (("pi01", pi01), ("pi10", pi10)):
        if not 0.0 < value < 0.5:
            raise ParameterError(name, f"{name} must satisfy 0 < {name} < 1/2, got {value!r}")
    if not 0.0 <= eps <= 0.5:
        raise ParameterError("eps", f"eps must satisfy 0 <= eps <= 1/2, got {eps!r}")
    return ModelParams(pi01, pi10, eps)


def _q(params, x):
    return params.a * x + params.pi10


def g0(params, x):
    """Probability that the next observation is 0 given belief ``x``."""
    return params.eps + (1.0 - 2.0 * params.eps) * _q(params, x)


def g1(params, x):
    """Probability that the next observation is 1; exactly ``1 - g0``."""
    return 1.0 - g0(params, x)


# The belief updates are rearranged so every floating-point step is a
# monotone operation in x; the computed maps are then exactly nondecreasing.


def f0(params, x):
    """Belief update after observing symbol 0: ``(1-eps) q / g0``."""
    eps = params.eps
    return np.minimum((1.0 - eps) / ((1.0 - 2.0 * eps) + eps / _q(params, x)), 1.0)


def f1(params, x):
    """Belief update after observing symbol 1: ``eps q / g1``."""
    eps = params.eps
    return np.minimum(eps / ((1.0 - eps) / _q(params, x) - (1.0 - 2.0 * eps)), 1.0)


def f0_prime(params, x):
    eps = params.eps
    return params.a * eps * (1.0 - eps) / g0(params, x) ** 2


def f1_prime(params, x):
    eps = params.eps
    return params.a * eps * (1.0 - eps) / g1(params, x) ** 2


def hb(x):
    """Binary entropy in bits, with ``0 log 0 = 0``.

    Accepts scalars or arrays; scalars return a Python float.
    """
    x = np.asarray(x, dtype=float)
    y = 1.0 - x
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.where(x > 0, x * np.log2(x), 0.0) - np.where(y > 0, y * np.log2(y), 0.0)
    return float(out) if out.ndim == 0 else out


def phi_prime(params, x):
    """Derivative of ``hb(g0(x))``."""
    g = g0(params, x)
    return params.a * (1.0 - 2.0 * params.eps) * np.log2((1.0 - g) / g)


def contraction(params):
    """Closed-form contraction coefficient and Lipschitz constant.

    Both ``|f0'|`` and ``|f1'|`` are ``a*eps*(1-eps)`` over a squared
    predictive probability, so their suprema sit where ``g0`` (for f0) or
    ``g1`` (for f1) is smallest: at x = 0 and x = 1 respectively.  The
    log-odds factor of ``d/dx hb(g0(x))`` is monotone in x, so its largest
    magnitude is also at an endpoint.
    """
    a, eps = params.a, params.eps
    gmin = min(g0(params, 0.0), g1(params, 1.0))
    delta = a * eps * (1.0 - eps) / gmin**2
    ends = [g0(params, 0.0), g0(params, 1.0)]
    bigM = a * (1.0 - 2.0 * eps) * max(abs(math.log2((1.0 - g) / g)) for g in ends)
    return ContractionInfo(delta=float(delta), bigM=float(bigM), contractive=bool(delta < 1.0))
