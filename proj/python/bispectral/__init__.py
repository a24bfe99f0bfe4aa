"""Bispectrum, bicoherence and surrogate testing for quadratic phase coupling."""

from ._bispectral import (
    BicoherenceMap,
    BispectralError,
    BispectrumEstimate,
    bicoherence,
    biphase,
    bispectrum,
    coupling_index,
    detect_peaks,
    dft,
    dft_reference,
    generate,
    inverse_dft,
    power_spectrum,
    surrogate_test,
)

__all__ = [
    "BicoherenceMap",
    "BispectralError",
    "BispectrumEstimate",
    "bicoherence",
    "biphase",
    "bispectrum",
    "coupling_index",
    "detect_peaks",
    "dft",
    "dft_reference",
    "generate",
    "inverse_dft",
    "power_spectrum",
    "surrogate_test",
]
