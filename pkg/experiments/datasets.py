import os
from typing import Optional

#: The LIBSVM binary classification datasets, together with their number of features.
LIBSVM_DATASETS = {
    'a9a': 123,
    'gisette_scale': 5000,
    'real-sim': 20958
}


def dataset_filepath(root: str, name: str) -> str:
    """
    Get the filepath of a LIBSVM dataset.

    :param root: The datasets root directory.
    :param name: The dataset name.
    :return: The dataset filepath.
    :raises FileNotFoundError: If the dataset file does not exist.
    """
    filepath = os.path.join(root, name)
    if not os.path.isfile(filepath):
        raise FileNotFoundError(
            "The dataset {} must be downloaded from the LIBSVM website and stored in {}".format(name, root)
        )
    return filepath


def dataset_n_features(name: str) -> Optional[int]:
    """
    Get the number of features of a LIBSVM dataset, if known.

    :param name: The dataset name.
    :return: The number of features, or None if the dataset is not known.
    """
    return LIBSVM_DATASETS.get(name)
