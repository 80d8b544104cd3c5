"""Spectral clustering with automatic selection of the number of clusters.

Four validity criteria (silhouette, eigengap, Davies-Bouldin,
Calinski-Harabasz) are scored over a candidate range of cluster counts,
normalized to confidences in [0, 1] and averaged; the best-scoring count is
then used for spectral clustering.
"""

from .errors import FileFormatError, InvalidInputError, NumericalError
from .evalbench import (
    EvaluationReport,
    SequenceRecord,
    SynthSpec,
    error_rate,
    evaluate_manifest,
    exact_accuracy,
    generate_block_affinity,
    mse_metric,
    read_manifest,
)
from .io import load_affinity, read_labels, read_matrix, write_labels, write_matrix
from .matrix import (
    AffinityMatrix,
    DistanceMatrix,
    Spectrum,
    fuse,
    laplacian,
    sym_eigensolve,
    to_affinity,
    to_distance,
)
from .selection import (
    CRITERIA,
    ConfidenceTable,
    KRange,
    confidence_table,
    select_for_views,
    select_k,
)
from .spectral import ClusterAssignment, Embedding, kmeans, spectral_cluster, spectral_embed
from .validity import ClusterStats, calinski_harabasz, davies_bouldin, eigengap_gaps, silhouette

__version__ = "0.1.0"
