"""Free-space mmWave link budget: path loss, SNR and maximum LoS range."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class RadioParams:
    """Radio configuration. Defaults are the 60 GHz evaluation setting.

    ``g_t`` is the flat-top antenna gain applied everywhere inside the beam;
    ``hpbw`` is the full half-power beamwidth, so the beam half-angle is hpbw/2.
    """

    f_c: float = 60e9
    p_t: float = 0.5
    g_t: float = 10.0
    bandwidth: float = 1e9
    noise_psd: float = -174.0
    snr_threshold: float = 15.0
    hpbw: float = 45.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise ValueError(f"radio.{name} must be finite, got {value}")
        if self.f_c <= 0:
            raise ValueError("radio.f_c must be positive")
        if self.p_t <= 0:
            raise ValueError("radio.p_t must be positive")
        if self.bandwidth <= 0:
            raise ValueError("radio.bandwidth must be positive")
        if not 0.0 < self.hpbw < 180.0:
            raise ValueError("radio.hpbw must lie in (0, 180) degrees")

    @property
    def tx_power_dbm(self) -> float:
        return 10.0 * math.log10(self.p_t * 1000.0)

    @property
    def noise_power_dbm(self) -> float:
        return self.noise_psd + 10.0 * math.log10(self.bandwidth)


@dataclass(frozen=True)
class LinkBudget:
    distance: float
    path_loss: float
    snr: float


def path_loss(params: RadioParams, d: float) -> float:
    """Free-space path loss in dB at distance ``d`` meters."""
    if not d > 0:
        raise ValueError(f"nonpositive distance: {d}")
    return 20.0 * math.log10(4.0 * math.pi * params.f_c * d / SPEED_OF_LIGHT)


def snr(params: RadioParams, d: float) -> float:
    """Downlink SNR in dB; transmit and noise power both taken in dBm."""
    return params.tx_power_dbm + params.g_t - path_loss(params, d) - params.noise_power_dbm


def link_budget(params: RadioParams, d: float) -> LinkBudget:
    return LinkBudget(d, path_loss(params, d), snr(params, d))


def max_range(params: RadioParams) -> float:
    """Distance at which the SNR drops to the coverage threshold (closed form)."""
    allowed_loss = (
        params.tx_power_dbm + params.g_t - params.noise_power_dbm - params.snr_threshold
    )
    return SPEED_OF_LIGHT / (4.0 * math.pi * params.f_c) * 10.0 ** (allowed_loss / 20.0)
