"""
Services module exports
"""

from .spectral_service import SpectralService, smooth_cutoff
from .model_service import ModelService
from .soliton_service import SolitonService
from .integrator_service import IntegratorService
from .gauge_service import GaugeService
from .analysis_service import AnalysisService, envelope_square_bound
from .datum_service import DatumService


__all__ = [
    "SpectralService",
    "smooth_cutoff",
    "ModelService",
    "SolitonService",
    "IntegratorService",
    "GaugeService",
    "AnalysisService",
    "envelope_square_bound",
    "DatumService",
]
