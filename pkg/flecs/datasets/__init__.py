from .libsvm import Dataset, normalize_labels, parse_libsvm, load_libsvm, dump_libsvm
from .partitioning import CONTIGUOUS, SHUFFLED, PartitionSpec, partition_indices, partition
from .synthetic import make_synthetic_dataset
