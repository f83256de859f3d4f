"""
Experiment command routers
"""

from .soliton_routes import router as soliton_router
from .conservation_routes import router as conservation_router
from .regularization_routes import router as regularization_router
from .picard_routes import router as picard_router
from .scaling_routes import router as scaling_router
from .gauge_routes import router as gauge_router
from .lipschitz_routes import router as lipschitz_router
from .envelope_routes import router as envelope_router
from .modulation_routes import router as modulation_router
from .energy_routes import router as energy_router
from .lp_routes import router as lp_router
from .continuity_routes import router as continuity_router
from .sweep_routes import router as sweep_router


__all__ = [
    "soliton_router",
    "conservation_router",
    "regularization_router",
    "picard_router",
    "scaling_router",
    "gauge_router",
    "lipschitz_router",
    "envelope_router",
    "modulation_router",
    "energy_router",
    "lp_router",
    "continuity_router",
    "sweep_router",
]
