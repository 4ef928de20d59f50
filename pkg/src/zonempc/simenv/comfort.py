"""Steady-state Fanger PMV following the ISO 7730 equation set."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ITER = 150
TCL_TOL = 1e-5  # clothing surface temperature tolerance, degC


class PMVConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ComfortParams:
    met: float = 1.2
    clo: float = 0.5
    air_velocity: float = 0.1  # m/s
    # mean radiant temperature is taken equal to air temperature

    def __post_init__(self):
        if self.met <= 0 or self.clo <= 0 or self.air_velocity <= 0:
            raise ValueError("comfort parameters must be positive")


SUMMER = ComfortParams(clo=0.5)
WINTER = ComfortParams(clo=1.0)


def pmv_iso(ta, tr, rh, met, clo, vel, wme=0.0):
    """PMV for air temp ``ta``, radiant temp ``tr`` (degC) and RH fraction ``rh``.

    Array inputs broadcast. Raises PMVConvergenceError if the clothing
    surface temperature iteration has not settled after 150 iterations.
    """
    ta, tr, rh = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (ta, tr, rh)))
    pa = rh * 100.0 * 10.0 * np.exp(16.6536 - 4030.183 / (ta + 235.0))
    icl = 0.155 * clo
    m = met * 58.15
    w = wme * 58.15
    mw = m - w
    fcl = 1.0 + 1.29 * icl if icl <= 0.078 else 1.05 + 0.645 * icl
    hcf = 12.1 * np.sqrt(vel)
    taa = ta + 273.0
    tra = tr + 273.0
    tcla = taa + (35.5 - ta) / (3.5 * icl + 0.1)

    p1 = icl * fcl
    p2 = p1 * 3.96
    p3 = p1 * 100.0
    p4 = p1 * taa
    p5 = 308.7 - 0.028 * mw + p2 * (tra / 100.0) ** 4
    xn = tcla / 100.0
    xf = tcla / 50.0
    tol = TCL_TOL / 100.0
    n = 0
    while np.any(np.abs(xn - xf) > tol):
        xf = (xf + xn) / 2.0
        hcn = 2.38 * np.abs(100.0 * xf - taa) ** 0.25
        hc = np.maximum(hcf, hcn)
        xn = (p5 + p4 * hc - p2 * xf**4) / (100.0 + p3 * hc)
        n += 1
        if n > MAX_ITER:
            raise PMVConvergenceError(
                f"clothing surface temperature did not converge in {MAX_ITER} iterations"
            )
    hcn = 2.38 * np.abs(100.0 * xn - taa) ** 0.25
    hc = np.maximum(hcf, hcn)
    tcl = 100.0 * xn - 273.0

    hl1 = 3.05e-3 * (5733.0 - 6.99 * mw - pa)
    hl2 = np.where(mw > 58.15, 0.42 * (mw - 58.15), 0.0)
    hl3 = 1.7e-5 * m * (5867.0 - pa)
    hl4 = 0.0014 * m * (34.0 - ta)
    hl5 = 3.96 * fcl * (xn**4 - (tra / 100.0) ** 4)
    hl6 = fcl * hc * (tcl - ta)
    ts = 0.303 * np.exp(-0.036 * m) + 0.028
    return ts * (mw - hl1 - hl2 - hl3 - hl4 - hl5 - hl6)


def compute_pmv(t_air, rh, params: ComfortParams = SUMMER):
    """PMV with mean radiant temperature equal to air temperature."""
    t = np.asarray(t_air, dtype=float)
    r = np.asarray(rh, dtype=float)
    if np.any(t < -10) or np.any(t > 50):
        raise ValueError("t_air outside [-10, 50] degC")
    if np.any(r < 0) or np.any(r > 1):
        raise ValueError("rh outside [0, 1]")
    out = pmv_iso(t, t, r, params.met, params.clo, params.air_velocity)
    return float(out) if out.ndim == 0 else out
