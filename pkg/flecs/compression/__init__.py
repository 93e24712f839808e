from .base import IDENTITY, RANDOM_DITHERING, CompressorSpec, CompressedVector, CompressedMatrix
from .dithering import dithering_levels, dither, dither_samples
from .operators import compress_vector, compress_matrix, estimate_omega_q
