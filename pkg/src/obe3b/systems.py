"""Named test Hamiltonians, so reproduction runs never depend on typed constants."""
from __future__ import annotations

from .matel import SystemConfig
from .talmi import Gaussian, Power

__all__ = ["BUILTIN_SYSTEMS", "builtin_system"]

HELIUM_MASS = 0.0231048  # (a.u.)^-2 K^-1, energies in K and lengths in a.u.
HELIUM_V0, HELIUM_R = 1.227, 10.03
HELIUM_W0, HELIUM_RHO0 = 0.279, 13.85


def _gauss3b() -> SystemConfig:
    return SystemConfig(1.0, 1.0, 1.0, three_body=Gaussian(-(3.0 ** (4.0 / 3.0)), 1.0 / 27.0))


def _coulomb3b() -> SystemConfig:
    return SystemConfig(1.0, 1.0, 1.0, three_body=Power(-3.0, -1.0))


def _coulomb_linear() -> SystemConfig:
    v = Power(-1.0, -1.0)
    return SystemConfig(1.0, 1.0, 1.0, v12=v, v13=v, v23=v, three_body=Power(0.5, 1.0))


def _helium_trimer() -> SystemConfig:
    m = HELIUM_MASS
    v = Gaussian(-HELIUM_V0, 1.0 / HELIUM_R**2)
    return SystemConfig(m, m, m, v12=v, v13=v, v23=v, three_body=Gaussian(HELIUM_W0, 1.0 / HELIUM_RHO0**2))


def _bench_linear3b() -> SystemConfig:
    return SystemConfig(1.0, 1.0, 1.0, three_body=Power(0.5, 1.0))


BUILTIN_SYSTEMS = {
    "gauss3b": _gauss3b,
    "coulomb3b": _coulomb3b,
    "coulomb-linear": _coulomb_linear,
    "helium-trimer": _helium_trimer,
    "bench-linear3b": _bench_linear3b,
}


def builtin_system(name: str) -> SystemConfig:
    try:
        return BUILTIN_SYSTEMS[name]()
    except KeyError:
        raise KeyError(f"unknown system {name!r}; choose from {sorted(BUILTIN_SYSTEMS)}") from None
