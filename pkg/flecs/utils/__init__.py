from .data import check_finite, check_vector, check_matrix, check_symmetric
from .parallel import parallel_map
from .random import RandomState, check_random_state, derive_generator
