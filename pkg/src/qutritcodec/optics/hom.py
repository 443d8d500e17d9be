"""Hong-Ou-Mandel dip at the variable-ratio coupler.

One photon enters ``f2`` and one ``f3``; the attenuator in ``f5`` is closed so
``f2`` reaches the analyser only through ``f6`` and D1 + D2 together count
every photon leaving the coupler in ``f2``.  The plotted quantity is the summed
D1-D3 and D2-D3 coincidence rate.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..statekit import PureState
from .encoder import encoder_output
from .fock import click, coincidence
from .params import IDEAL, ImperfectionParams, accidental_rate

_ZERO = PureState([1.0, 0.0])
_ONE = PureState([0.0, 1.0])


def hom_dip_scan(reflectance: float, delays: Sequence[float], params: ImperfectionParams = IDEAL,
                 pair_rate: float = 1.0) -> list[tuple[float, float]]:
    """Summed coincidence rate for each relative delay (seconds)."""
    if not 0.0 < reflectance < 1.0:
        raise ValueError(f"reflectance must lie in (0, 1), got {reflectance}")
    eta = params.detector_efficiency
    rows = []
    for tau in delays:
        # qubit 1 in |0> puts its photon in f2, qubit 2 in |1> puts its photon in f3
        out = encoder_output(_ZERO, _ONE, reflectance, params, apply_filters=False, compensate=False, delay=tau)
        p = out.probability(coincidence("f2", "f3"))
        s_out = pair_rate * eta * out.probability(click("f2"))
        s_herald = pair_rate * eta * out.probability(click("f3"))
        # D1 and D2 each see half of f2 and both pair with the herald
        acc = accidental_rate(s_out / 2, s_herald, params) + accidental_rate(s_out / 2, s_herald, params)
        rows.append((float(tau), pair_rate * eta**2 * p + acc))
    return rows


def visibility(rates: Sequence[float]) -> float:
    """Dip contrast ``(max - min) / (max + min)``."""
    hi, lo = max(rates), min(rates)
    return (hi - lo) / (hi + lo)


def visibility_relative(rates: Sequence[float]) -> float:
    """Dip depth relative to the background, ``(max - min) / max``."""
    hi, lo = max(rates), min(rates)
    return (hi - lo) / hi


def overlap_for_visibility(reflectance: float, target: float) -> float:
    """Mode overlap giving contrast ``target`` in the ``(max - min) / (max + min)`` convention.

    Coincidences fall from ``R^2 + T^2`` to ``R^2 + T^2 - 2 R T m``.
    """
    r = reflectance
    t = 1.0 - r
    m = target * (r * r + t * t) / (r * t * (1.0 + target))
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"visibility {target} is out of reach at R={reflectance}")
    return float(m)


def default_delays(params: ImperfectionParams, span: float = 8.0, points: int = 81) -> np.ndarray:
    """Symmetric delay grid spanning ``+-span`` coherence times."""
    return np.linspace(-span, span, points) * params.coherence_time
