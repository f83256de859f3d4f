"""
The lab: every experiment command registered on one harness
"""

from app.api.router import CommandRouter, Lab, RunContext
from app.api.routes import (
    soliton_router,
    conservation_router,
    regularization_router,
    picard_router,
    scaling_router,
    gauge_router,
    lipschitz_router,
    envelope_router,
    modulation_router,
    energy_router,
    lp_router,
    continuity_router,
    sweep_router
)

lab = Lab()

lab.include_router(soliton_router)
lab.include_router(conservation_router)
lab.include_router(regularization_router)
lab.include_router(picard_router)
lab.include_router(scaling_router)
lab.include_router(gauge_router)
lab.include_router(lipschitz_router)
lab.include_router(envelope_router)
lab.include_router(modulation_router)
lab.include_router(energy_router)
lab.include_router(lp_router)
lab.include_router(continuity_router)
lab.include_router(sweep_router)


__all__ = ["lab", "Lab", "CommandRouter", "RunContext"]
