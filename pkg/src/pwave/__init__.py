"""Trap-loss simulator and fitting toolkit for the p-wave Feshbach
resonances of ultracold 6Li in the lowest hyperfine manifold.

Subpackages follow the physics: `channels` (spin-channel catalog and the
molecular selection rule), `trap` (harmonic-trap density moments), `loss_model`
(resonant two-body rate and its thermal average, three-body threshold law),
`dynamics` (rate-equation evolution and synthetic data), `inference` (loss-rate
and detuning fits), `ramp` (two-path magneto-association bookkeeping) and
`cli` (command-line frontend).
"""

from .backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
