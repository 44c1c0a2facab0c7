# Periodic grid functions on the unit torus
from core.torus.field import (
    ScalarField,
    TorusGrid,
    VectorField,
    divergence,
    evaluate,
    evaluate_tensor,
    fourier_coefficients,
    gradient,
    interpolate,
    laplacian,
    mean,
    periodic_sampler,
    upsample,
)
from core.torus.io import read_field, read_vector_field, write_field, write_vector_field

__all__ = [
    'ScalarField', 'TorusGrid', 'VectorField', 'divergence', 'evaluate', 'evaluate_tensor',
    'fourier_coefficients', 'gradient', 'interpolate', 'laplacian', 'mean', 'periodic_sampler',
    'upsample', 'read_field', 'read_vector_field', 'write_field', 'write_vector_field',
]
