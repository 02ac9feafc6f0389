"""Periodic traveling waves of the generalized Kuramoto-Sivashinsky equation."""

from ._gks import (
    ExponentFit,
    GksError,
    ModelParams,
    PeriodicWave,
    WaveFamily,
    __version__,
    bloch_spectrum,
    continue_family,
    decay_exponent,
    evolve,
    fd_spectrum,
    load_family,
    load_wave,
    save_family,
    save_wave,
    scan_band,
    solve_from_hopf,
    solve_profile,
    whitham_speeds,
    xi_grid,
)

__all__ = [name for name in dir() if not name.startswith("_")]
