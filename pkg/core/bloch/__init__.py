# Invariant densities, effective diffusion, Bloch fibers and large-time asymptotics
from core.bloch.asymptotics import (
    RemainderScan,
    UniformFamilyScan,
    gaussian_main_term,
    remainder_scan,
    sharp_ballistic_amplitude,
    uniform_family_scan,
)
from core.bloch.effective import (
    DriftSpec,
    EffectiveDiffusion,
    correctors,
    effective_diffusion,
    invariant_density,
    load_drift,
)
from core.bloch.fiber import FiberExpansion, bloch_fiber, fiber_expansion

__all__ = [
    'RemainderScan', 'UniformFamilyScan', 'gaussian_main_term', 'remainder_scan', 'sharp_ballistic_amplitude',
    'uniform_family_scan', 'DriftSpec', 'EffectiveDiffusion', 'correctors', 'effective_diffusion',
    'invariant_density', 'load_drift', 'FiberExpansion', 'bloch_fiber', 'fiber_expansion',
]
